//! Small quaternion-valued boundary data: the first-order kernel, the three
//! abelian fields, and how fast each approximation approaches the full transform.

use adhm::boundary::{build_grid, constraint_residual_inf, BoundaryData, BoundaryProfile};
use adhm::fields::probe;
use adhm::linearized::{linearized_potential, order_test, p_first_order};
use adhm::quat::Quaternion;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = BoundaryProfile::constant(Quaternion::real(1.0))
        .term(Quaternion::basis(0) * 0.6, [0, 1, 0, 0])
        .term(Quaternion::basis(2) * 0.4, [0, 0, 0, 1]);
    let base = BoundaryData::from_profile(build_grid(4, 4, 4)?, profile);

    for eps in [0.04, 0.02, 0.01] {
        let d = base.scaled(eps);
        let r = constraint_residual_inf(&d, &p_first_order(&d)?)?;
        println!("eps = {eps}: constraint residual with first-order P = {r:.3e}");
    }

    let d = base.scaled(0.02);
    let x = Quaternion::new(0.1, -0.2, 0.15, 0.05);
    let f = linearized_potential(&d, x)?;
    for a in 1..=3 {
        let sd = probe(|y| Ok(linearized_potential(&d, y)?.abelian(a)), x, 1e-4)?.1;
        let c = f.0[a - 1];
        println!("A^{a} = [{:.3e}, {:.3e}, {:.3e}, {:.3e}], abelian sd_residual {sd:.1e}", c[0], c[1], c[2], c[3]);
    }

    let pts = [x, Quaternion::new(-0.2, 0.0, 0.1, -0.1), Quaternion::ZERO];
    let report = order_test(&base, 0.02, &pts)?;
    println!(
        "full vs linearized: {:.3e} -> {:.3e} (ratio {:.2})",
        report.linearized_error[0],
        report.linearized_error[1],
        report.linearized_ratio()
    );
    println!(
        "full vs leading order: {:.3e} -> {:.3e} (ratio {:.2})",
        report.leading_error[0],
        report.leading_error[1],
        report.leading_ratio()
    );
    Ok(())
}
