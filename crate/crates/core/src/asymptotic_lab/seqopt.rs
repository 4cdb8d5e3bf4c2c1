//! Direct maximization of `‖{a_k λ_k}‖_{ℓ_{q₂}^{s₂,α}}` over the unit sphere
//! of `ℓ_{q₁}^{s₁,α}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid_transforms::sequence::{index_weight, IndexedSeq};
use crate::index_calculus::{check_reciprocal, multiplier_aggregate};

/// Lower estimate of the multiplier norm from explicit test sequences: unit
/// masses, the stationary point of the Lagrange conditions, and randomly
/// restarted multiplicative hill climbing.
pub fn seq_multiplier_norm_bruteforce(
    a: &IndexedSeq,
    s1: f64,
    s2: f64,
    rq1: f64,
    rq2: f64,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_reciprocal("1/q1", rq1)?;
    check_reciprocal("1/q2", rq2)?;
    a.check_convention(alpha)?;
    if a.len() > 64 {
        return Err(Error::param("brute force is limited to 64 indices"));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    // substituting u_k = w¹_k|λ_k| leaves b_k = |a_k| w²_k / w¹_k
    let b: Vec<f64> = a
        .iter()
        .map(|(k, v)| v.abs() * index_weight(k, s2, alpha) / index_weight(k, s1, alpha))
        .collect();
    let value = |u: &[f64]| -> f64 {
        let norm = multiplier_aggregate(u.iter().copied(), rq1);
        if norm == 0.0 {
            return 0.0;
        }
        multiplier_aggregate(b.iter().zip(u).map(|(bk, uk)| bk * uk / norm), rq2)
    };
    let mut best: f64 = 0.0;
    for i in 0..b.len() {
        let mut e = vec![0.0; b.len()];
        e[i] = 1.0;
        best = best.max(value(&e));
    }
    best = best.max(value(&vec![1.0; b.len()]));
    if rq2 > rq1 {
        // u_k ∝ b_k^{q₂/(q₁−q₂)}
        let e = rq1 / (rq2 - rq1);
        let u: Vec<f64> = b.iter().map(|&x| if x > 0.0 { x.powf(e) } else { 0.0 }).collect();
        best = best.max(value(&u));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let mut u: Vec<f64> = (0..b.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut cur = value(&u);
        let mut step: f64 = 0.5;
        for _ in 0..400 {
            let i = rng.random_range(0..u.len());
            let old = u[i];
            u[i] = old * (step * rng.random_range(-1.0..1.0)).exp();
            let v = value(&u);
            if v >= cur {
                cur = v;
            } else {
                u[i] = old;
                step = (step * 0.995).max(0.01);
            }
        }
        best = best.max(cur);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_calculus::seq_multiplier_norm_closed;

    #[test]
    fn single_index_is_exact() {
        let a = IndexedSeq::lattice_1d([(7, -2.5)]);
        let got = seq_multiplier_norm_bruteforce(&a, 0.3, 1.1, 0.5, 1.0, 0.25, 4, 1).unwrap();
        let expect = 2.5 * index_weight(crate::alpha_covering::WindowIndex::lattice1(7), 0.8, 0.25);
        assert!((got - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn diagonal_on_equal_spaces_is_the_sup() {
        let a = IndexedSeq::lattice_1d((0..10).map(|k| (k, (k as f64 * 0.7).sin())));
        let got = seq_multiplier_norm_bruteforce(&a, 0.0, 0.0, 0.5, 0.5, 0.0, 4, 2).unwrap();
        let sup = a.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
        assert!((got - sup).abs() < 1e-12);
        let closed = seq_multiplier_norm_closed(&a, 0.0, 0.0, 0.5, 0.5, 0.0).unwrap();
        assert!((closed - sup).abs() < 1e-12);
    }
}
