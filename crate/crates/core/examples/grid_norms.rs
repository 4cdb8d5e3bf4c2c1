//! Decomposition norms of band-limited functions on a periodic grid.
//!
//! cargo run --release --example grid_norms

use alphamod::alpha_covering::{build_partition, CoveringSpec};
use alphamod::grid_transforms::fft::{forward, inverse};
use alphamod::grid_transforms::{bump_function, lp_quasinorm, reconstruct, space_norm, FreqGrid};
use alphamod::index_calculus::SpaceParams;

fn main() -> alphamod::Result<()> {
    let grid = FreqGrid::new(1, 1 << 12, 32.0)?;
    let mut f = bump_function(&grid, [10.0, 0.0], 4.0, [16.0, 0.0])?;
    f.add_assign(&bump_function(&grid, [-25.0, 0.0], 2.0, [5.0, 0.0])?)?;

    let back = inverse(&forward(&f)?)?;
    println!("fft round trip error {:.2e}", back.relative_l2_distance(&f)?);
    println!("|f|_2 = {:.6}  |f|_1 = {:.6}", lp_quasinorm(&f, 0.5)?, lp_quasinorm(&f, 1.0)?);

    for alpha in [0.0, 0.5, 1.0] {
        let p = build_partition(&CoveringSpec::calibrated(alpha, 1)?, &grid)?;
        let rec = reconstruct(&f, &p)?;
        for (rp, rq) in [(0.5, 0.5), (1.0, 1.0), (0.5, 0.0)] {
            let params = SpaceParams { rp, rq, s: 0.5, alpha, n: 1 };
            let r = space_norm(&f, &params, &p)?;
            println!(
                "alpha={alpha:<4} 1/p={rp:<3} 1/q={rq:<3} s=1/2  norm {:>10.5}  pieces {:<3} reconstruction {:.1e}",
                r.value,
                r.pieces.len(),
                rec.relative_l2_distance(&f)?
            );
        }
    }
    Ok(())
}
