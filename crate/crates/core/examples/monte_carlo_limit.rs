//! Random 't Hooft data approximating smooth boundary data: the error in φ
//! falls like N^(-1/2).

use adhm::boundary::{build_grid, discretize_thooft, BoundaryData, BoundaryProfile};
use adhm::cli::{convergence_table, fitted_slope};
use adhm::fields::Lattice;
use adhm::quat::Quaternion;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = BoundaryProfile::constant(Quaternion::real(0.2))
        .term(Quaternion::real(0.1), [1, 0, 0, 0])
        .term(Quaternion::real(0.05), [0, 1, 1, 0]);
    let data = BoundaryData::from_profile(build_grid(24, 24, 24)?, profile);

    let finite = discretize_thooft(&data, 500, 1)?;
    println!("N = 500 discretization: rank {}, {} poles on S3", finite.rank(), finite.singular_points().len());

    let points = Lattice::new(5, 0.5)?.points();
    let rows = convergence_table(&data, &[100, 1000, 10000], 1, &points)?;
    println!("{:>8} {:>12} {:>12}", "N", "max|dphi|", "max|dA|");
    for r in &rows {
        println!("{:>8} {:>12.4e} {:>12.4e}", r.n, r.phi_error, r.field_error);
    }
    if let Some(s) = fitted_slope(&rows) {
        println!("fitted slope {s:.3}");
    }
    Ok(())
}
