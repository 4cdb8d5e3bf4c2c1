//! Builds α-coverings, samples their partitions of unity and inspects the
//! neighbour sets.
//!
//! cargo run --release --example covering_partition

use alphamod::alpha_covering::{
    build_partition, covering_radius, neighbor_set, verify_partition, Covering, CoveringSpec, Relation, WindowIndex,
};
use alphamod::grid_transforms::FreqGrid;

fn main() -> alphamod::Result<()> {
    let grid = FreqGrid::new(1, 1 << 13, 32.0)?;
    println!("alpha  rho*    members  sum-dev    overlap  grad-ratio");
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let spec = CoveringSpec::calibrated(alpha, 1)?;
        let p = build_partition(&spec, &grid)?;
        let r = verify_partition(&p)?;
        let rho = if alpha < 1.0 { covering_radius(alpha, 1) } else { f64::NAN };
        println!(
            "{alpha:<6} {rho:<7.4} {:<8} {:<10.2e} {:<8} {:.2}",
            r.members, r.max_sum_deviation, r.max_overlap, r.gradient_ratio
        );
    }

    let coarse = Covering::calibrated(0.5, 1)?;
    let fine = Covering::calibrated(0.0, 1)?;
    for k in [4, 8, 16] {
        let idx = WindowIndex::lattice1(k);
        let w = coarse.window(idx)?;
        let gamma = neighbor_set(Relation::Gamma, idx, &coarse, Some(&fine))?;
        let tilde = neighbor_set(Relation::GammaTilde, idx, &coarse, Some(&fine))?;
        println!(
            "k={k:<3} centre {:>8.3} scale {:>6.3} clean {:>6.3}  |Γ|={:<3} |Γ̃|={}",
            w.center[0],
            w.scale,
            w.clean_radius,
            gamma.members.len(),
            tilde.members.len()
        );
    }
    Ok(())
}
