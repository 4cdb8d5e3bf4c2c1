//! Numerical cross-checks of the verdict: multiplier growth, dilations,
//! Bernstein scaling and norm equivalence across coverings.
//!
//! cargo run --release --example embedding_checks

use alphamod::asymptotic_lab::{
    bernstein_check, dilation_necessity_check, embedding_consistency_check, prop31_ratio_check, ConsistencyOptions,
};
use alphamod::grid_transforms::FreqGrid;
use alphamod::index_calculus::SpaceParams;

fn sp(rp: f64, rq: f64, s: f64, alpha: f64) -> SpaceParams {
    SpaceParams { rp, rq, s, alpha, n: 1 }
}

fn main() -> alphamod::Result<()> {
    let opts = ConsistencyOptions::default();
    for s in [0.0, 1.0] {
        let r = embedding_consistency_check(&sp(0.5, 0.5, s, 0.0), &sp(0.5, 1.0, 0.0, 0.0), &opts)?;
        println!("M^{{{s},0}}_{{2,2}} -> M^{{0,0}}_{{2,1}}: margin {:+.2}, {:?}, truncated norms {:?}", r.verdict.margin, r.status, r.truncated);
    }

    let d = dilation_necessity_check(0.0, 0.5, 1, 5, 1 << 14)?;
    println!("dilation slope {:.4} (law {:.4})", d.fit.slope, d.expected_slope);
    let b = bernstein_check(1.0, 0.5, 2, 4, 1 << 12)?;
    println!("bernstein slope n=2 {:.4} (law {:.4})", b.fit.slope, b.expected_slope);

    let grid = FreqGrid::new(1, 4096, 32.0)?;
    let p = prop31_ratio_check(&sp(0.5, 0.5, 0.0, 0.0), 0.5, 20, 11, &grid)?;
    println!("fine vs coarse norm ratio in [{:.3}, {:.3}]", p.min, p.max);
    Ok(())
}
