use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::PdeError;

type HoloFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// The holomorphic coefficient `U(z)` of the cubic differential `U dz³`.
#[derive(Clone, Default)]
pub enum CubicDifferential {
    #[default]
    Zero,
    Constant(Complex64),
    /// `U(z) = z^{−n}`.
    MonomialPower(i32),
    /// Arbitrary holomorphic function with a label for reports.
    Callable(String, HoloFn),
}

impl fmt::Debug for CubicDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl CubicDifferential {
    pub fn callable(label: impl Into<String>, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        CubicDifferential::Callable(label.into(), Arc::new(f))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, PdeError> {
        let v = match self {
            CubicDifferential::Zero => Complex64::new(0.0, 0.0),
            CubicDifferential::Constant(c) => *c,
            CubicDifferential::MonomialPower(n) => {
                if *n > 0 && z.norm() == 0.0 {
                    return Err(PdeError::SingularU { z });
                }
                z.powi(-*n)
            }
            CubicDifferential::Callable(_, f) => f(z),
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(PdeError::SingularU { z });
        }
        Ok(v)
    }

    /// `|U(z)|²`.
    pub fn norm_sqr(&self, z: Complex64) -> Result<f64, PdeError> {
        self.eval(z).map(|u| u.norm_sqr())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CubicDifferential::Zero => true,
            CubicDifferential::Constant(c) => *c == Complex64::new(0.0, 0.0),
            _ => false,
        }
    }

    /// Short text descriptor for reports.
    pub fn describe(&self) -> String {
        match self {
            CubicDifferential::Zero => "0".into(),
            CubicDifferential::Constant(c) => format!("const:{:?},{:?}", c.re, c.im),
            CubicDifferential::MonomialPower(n) => format!("z^-{n}"),
            CubicDifferential::Callable(l, _) => format!("fn({l})"),
        }
    }

    /// Parses `0`, `1`, `const:RE,IM`, `z^-N`.
    pub fn parse(s: &str) -> Result<Self, PdeError> {
        let s = s.trim();
        if s == "0" || s.eq_ignore_ascii_case("zero") {
            return Ok(CubicDifferential::Zero);
        }
        if let Some(rest) = s.strip_prefix("z^-") {
            return rest
                .parse::<i32>()
                .map(CubicDifferential::MonomialPower)
                .map_err(|_| PdeError::BadGrid(format!("bad cubic differential '{s}'")));
        }
        let body = s.strip_prefix("const:").unwrap_or(s);
        let parts: Vec<&str> = body.split(',').collect();
        let num = |p: &str| p.trim().parse::<f64>().ok();
        match parts.as_slice() {
            [a] => num(a).map(|a| CubicDifferential::Constant(Complex64::new(a, 0.0))),
            [a, b] => num(a).zip(num(b)).map(|(a, b)| CubicDifferential::Constant(Complex64::new(a, b))),
            _ => None,
        }
        .ok_or_else(|| PdeError::BadGrid(format!("bad cubic differential '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_pole() {
        let u = CubicDifferential::MonomialPower(2);
        assert!(matches!(u.eval(Complex64::new(0.0, 0.0)), Err(PdeError::SingularU { .. })));
        let v = u.eval(Complex64::new(0.0, 2.0)).unwrap();
        assert!((v - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parse_round_trip() {
        assert!(CubicDifferential::parse("0").unwrap().is_zero());
        assert_eq!(CubicDifferential::parse("z^-2").unwrap().describe(), "z^-2");
        let c = CubicDifferential::parse("const:1,-0.5").unwrap();
        assert_eq!(c.eval(Complex64::new(3.0, 3.0)).unwrap(), Complex64::new(1.0, -0.5));
        assert!(CubicDifferential::parse("banana").is_err());
    }
}
