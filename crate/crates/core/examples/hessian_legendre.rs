//! The hemisphere satisfies the Tzitzéica condition `det v'' = (v − x·∇v)⁴`,
//! and its Legendre transform solves `det w'' = w⁻⁴`.

use affsphere::hessian::{
    dual_ma_residual, graph_metric_at, legendre, tzitzeica_residual, GraphFunction, LegendreOptions,
};
use affsphere::pdesolve::GridShape;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v = GraphFunction::sphere();
    println!("induced metric at (0.3, 0.1): {:?}", graph_metric_at(&v.jet([0.3, 0.1]))?);
    for n in [17, 33, 65] {
        let xs = GridShape::rect(n, n, -0.25, 0.25, -0.25, 0.25)?;
        let tz = tzitzeica_residual(&v.sample(xs), 1)?.max_abs_interior();
        let ps = GridShape::rect(n, n, -0.5, 0.5, -0.5, 0.5)?;
        let dual = legendre(&v, ps, &LegendreOptions::default())?;
        let ma = dual_ma_residual(&dual)?.max_abs_interior();
        let rt = dual.inverse_samples().iter().map(|(x, val)| (val - v.jet(*x).v).abs()).fold(0.0, f64::max);
        println!("n = {n:>2}: Tzitzeica {tz:.2e}, dual Monge-Ampere {ma:.2e}, round trip {rt:.1e}");
    }
    Ok(())
}
