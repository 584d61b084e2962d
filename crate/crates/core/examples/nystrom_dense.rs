//! A dense kernel P written to the binary kernel format, read back, and used
//! in the general transform.

use adhm::boundary::{build_grid, constraint_residual_inf, BoundaryTransform, KernelP, SimpleExample};
use adhm::fields::probe;
use adhm::quat::Quaternion;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ex = SimpleExample::new(0.02)?;
    let grid = build_grid(6, 6, 6)?;
    let data = ex.data(grid.clone());
    let closed = ex.kernel();

    let path = std::env::temp_dir().join("adhm_kernel.bin");
    KernelP::save(&closed.to_dense(&grid), &path)?;
    let dense = KernelP::Dense(KernelP::load(&path)?);
    println!("kernel file {} ({} nodes)", path.display(), grid.len());

    let low_rank = BoundaryTransform::new(&data, &closed)?;
    let full = BoundaryTransform::new(&data, &dense)?;
    let x = Quaternion::new(0.1, 0.2, -0.1, 0.0);
    println!("|A_low_rank - A_dense| = {:.1e}", low_rank.potential(x)?.distance(&full.potential(x)?));
    println!("constraint residual {:.1e}", constraint_residual_inf(&data, &dense)?);
    println!("s(x) = {:.6}", probe(|y| full.potential(y), x, 1e-3)?.2);
    Ok(())
}
