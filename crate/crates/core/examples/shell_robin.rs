//! Constant boundary data produces a constant harmonic function and no field;
//! the Robin map recovers the data from the harmonic function.

use std::f64::consts::PI;

use adhm::ansatz::HarmonicProvider;
use adhm::boundary::{
    ansatz_transform, build_grid, layer_potential, robin_data, BoundaryData, BoundaryProfile, HarmonicExpansion,
};
use adhm::quat::Quaternion;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l0 = 0.1;
    let grid = build_grid(16, 16, 16)?;
    let shell = BoundaryData::from_profile(grid.clone(), BoundaryProfile::constant(Quaternion::real(l0)));
    let phi = layer_potential(&shell)?;
    println!("expected phi = 1 + 2 pi^2 L0^2 = {:.12}", 1.0 + 2.0 * PI * PI * l0 * l0);
    for r in [0.0, 0.1, 0.2, 0.3] {
        let x = Quaternion::new(r, 0.0, 0.0, 0.0);
        println!("|x| = {r}: phi = {:.12}, |A| = {:.1e}", phi.eval(x)?.value, ansatz_transform(&shell, x)?.norm());
    }

    // a band-limited profile comes back exactly through the Robin map
    let l2 = |y: Quaternion| 0.04 * (1.0 + 0.5 * y.0[0] * y.0[1]);
    let data = BoundaryData::from_fn(grid, |y| Quaternion::real(l2(y).sqrt()));
    let series = HarmonicExpansion::from_boundary(&data, 4)?;
    let worst = data
        .grid()
        .nodes
        .iter()
        .map(|y| Ok((robin_data(&series, *y)? - l2(*y)).abs()))
        .collect::<adhm::error::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("robin round trip: max |recovered L^2 - L^2| = {worst:.1e}");
    Ok(())
}
