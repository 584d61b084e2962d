//! Sample a field on the default 9⁴ lattice and write it as CSV.

use adhm::ansatz::{ansatz_potential, PoleSum};
use adhm::fields::{sample_field, Lattice, SampleOptions, DEFAULT_FD_STEP};
use adhm::io::field_sample_csv;
use adhm::quat::Quaternion;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = PoleSum::new(vec![Quaternion::new(0.0, 0.0, 0.35, 0.0)], vec![0.3])?;
    let points = Lattice::default().points();
    let opts = SampleOptions::new(DEFAULT_FD_STEP).avoiding(phi.points.clone());
    let sample = sample_field(|x| ansatz_potential(&phi, x), &points, &opts);

    let path = std::env::temp_dir().join("adhm_lattice.csv");
    std::fs::write(&path, field_sample_csv(&sample, true))?;
    println!(
        "{} points written to {}, {} skipped; max action density {:.4e}, max sd_residual {:.3e}",
        sample.points.len(),
        path.display(),
        sample.skipped.len(),
        sample.max_action_density(),
        sample.max_sd_residual()
    );
    Ok(())
}
