//! The symmetric example L(y) = κy, P(y, z) = λ(y + z): the constraint holds
//! exactly and the transform is a single instanton centred at the origin.

use std::f64::consts::PI;

use adhm::boundary::{build_grid, constraint_residual_inf, BoundaryTransform, SimpleExample};
use adhm::cli::fitted_size;
use adhm::fields::probe;
use adhm::quat::Quaternion;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = build_grid(16, 16, 16)?;
    println!("{:>10} {:>10} {:>10} {:>10} {:>10}", "2pi^2 lam", "kappa", "rho", "rho_fit", "residual");
    for frac in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let ex = SimpleExample::new(frac / (2.0 * PI * PI))?;
        let data = ex.data(grid.clone());
        let residual = constraint_residual_inf(&data, &ex.kernel())?;
        let t = BoundaryTransform::new(&data, &ex.kernel())?;
        let s = |x| probe(|y| t.potential(y), x, 1e-3).map(|p| p.2);
        let rho_fit = fitted_size(s(Quaternion::ZERO)?, s(Quaternion::real(0.2))?, 0.2);
        println!("{frac:>10} {:>10.5} {:>10.5} {rho_fit:>10.5} {residual:>10.1e}", ex.kappa, ex.rho);
    }

    // the action density depends only on |x|
    let ex = SimpleExample::new(1.0 / (4.0 * PI * PI))?;
    let t = BoundaryTransform::new(&ex.data(grid), &ex.kernel())?;
    for x in [Quaternion::new(0.25, 0.0, 0.0, 0.0), Quaternion::new(0.0, 0.0, 0.0, -0.25), Quaternion::new(0.125, 0.125, 0.125, 0.125)] {
        println!("s({x}) = {:.8}", probe(|y| t.potential(y), x, 1e-3)?.2);
    }
    Ok(())
}
