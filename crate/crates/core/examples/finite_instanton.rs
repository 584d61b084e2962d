//! Charge-2 't Hooft data through the finite ADHM transform, checked against
//! the ansatz and the finite-difference self-duality residual.

use adhm::adhm::thooft_data;
use adhm::ansatz::{ansatz_potential, PoleSum};
use adhm::fields::probe;
use adhm::quat::Quaternion;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let poles = [Quaternion::new(0.3, 0.0, 0.0, 0.2), Quaternion::new(-0.2, 0.1, -0.3, 0.0)];
    let lambdas = [0.4, 0.25];
    let data = thooft_data(&poles, &lambdas)?;
    let phi = PoleSum::new(poles.to_vec(), lambdas.to_vec())?;
    println!("rank {}, constraint residual {:e}", data.rank(), data.constraint_residual());

    for x in [Quaternion::new(0.5, 0.5, 0.0, -0.4), Quaternion::new(-0.6, 0.2, 0.3, 0.6), Quaternion::real(-0.9)] {
        let a = data.gauge_potential(x)?;
        let b = ansatz_potential(&phi, x)?;
        let (_, sd, s) = probe(|y| data.gauge_potential(y), x, 1e-3)?;
        println!("x = {x}: |A| = {:.6}, |A - A_ansatz| = {:.1e}, s = {s:.6}, sd_residual = {sd:.1e}", a.norm(), a.distance(&b));
    }

    // the poles themselves are where M + x fails to be invertible
    match data.gauge_potential(poles[0]) {
        Err(e) => println!("at the first pole: {e}"),
        Ok(_) => println!("unexpected: pole evaluated"),
    }
    Ok(())
}
