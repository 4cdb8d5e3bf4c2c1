//! Closed forms for pointwise multipliers between weighted sequence spaces
//! `ℓ_{q₁}^{s₁,α} → ℓ_{q₂}^{s₂,α}`.
//!
//! For `1/q₂ ≤ 1/q₁` the multiplier space is the weighted `ℓ_∞`, otherwise it
//! is the weighted `ℓ_r` with `1/r = 1/q₂ − 1/q₁`; both norms are attained
//! exactly (mass concentration and the Hölder extremal respectively).

use super::{check_alpha, check_reciprocal};
use crate::alpha_covering::WindowIndex;
use crate::error::{Error, Result};
use crate::grid_transforms::sequence::{index_weight, IndexedSeq};
use crate::scalar::Scalar;

/// Multiplier norm of a finitely supported sequence `a`.
///
/// Lattice-indexed sequences require `alpha < 1`; dyadic-indexed sequences
/// require `alpha = 1`.
pub fn seq_multiplier_norm_closed(a: &IndexedSeq, s1: f64, s2: f64, rq1: f64, rq2: f64, alpha: f64) -> Result<f64> {
    check_reciprocal("1/q1", rq1)?;
    check_reciprocal("1/q2", rq2)?;
    a.check_convention(alpha)?;
    let rr = (rq2 - rq1).max(0.0);
    let weighted = a.iter().map(|(k, v)| index_weight(k, s2 - s1, alpha) * v.abs());
    Ok(aggregate(weighted, rr))
}

/// `ℓ_r` aggregation with `rr = 1/r` (`rr = 0` is the supremum).
pub(crate) fn aggregate(values: impl Iterator<Item = f64>, rr: f64) -> f64 {
    if rr == 0.0 {
        values.fold(0.0, f64::max)
    } else {
        let r = 1.0 / rr;
        let sum: f64 = values.map(|v| v.powf(r)).sum();
        sum.powf(rr)
    }
}

/// Result of the symbolic power-weight test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplierExponent {
    /// Exponent of the weighted sequence (`⟨k⟩^e` or `2^{je}`).
    pub effective_exponent: f64,
    /// `1/r`
    pub rr: f64,
    pub finite: bool,
    /// Numerical norm (`+∞` when divergent).
    pub value: f64,
}

/// Multiplier norm of the infinite power weight `a_k = ⟨k⟩^t` on `ℤⁿ`
/// (`α < 1`) or `a_j = 2^{jt}` on `ℕ` (`α = 1`).
pub fn power_weight_multiplier_norm<T: Scalar>(t: T, n: u32, s1: T, s2: T, rq1: T, rq2: T, alpha: T) -> Result<MultiplierExponent> {
    check_reciprocal("1/q1", rq1)?;
    check_reciprocal("1/q2", rq2)?;
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::param("dimension n must be at least 1"));
    }
    let dyadic = alpha == T::one();
    let e = if dyadic { t + s2 - s1 } else { t + (s2 - s1) / (T::one() - alpha) };
    let rr = (rq2 - rq1).max2(T::zero());
    let nn = T::from_i64(n as i64);
    let finite = if rr == T::zero() {
        e <= T::slack()
    } else if dyadic {
        e < -T::slack()
    } else {
        e + nn * rr < -T::slack()
    };
    let (ef, rrf) = (e.to_f64(), rr.to_f64());
    let value = if !finite {
        f64::INFINITY
    } else if rrf == 0.0 {
        1.0
    } else if dyadic {
        let ratio = 2f64.powf(ef / rrf);
        (1.0 / (1.0 - ratio)).powf(rrf)
    } else {
        lattice_power_sum(n, ef / rrf).powf(rrf)
    };
    Ok(MultiplierExponent { effective_exponent: ef, rr: rrf, finite, value })
}

/// `Σ_{k∈ℤⁿ} ⟨k⟩^γ` for `γ < −n`: exact shell sums up to radius² `M` plus an
/// integral tail estimate.
pub fn lattice_power_sum(n: u32, gamma: f64) -> f64 {
    let n = n as usize;
    let m_max: usize = if n <= 2 { 250_000 } else { 40_000 };
    let counts = representation_counts(n, m_max);
    let partial: f64 = counts
        .iter()
        .enumerate()
        .map(|(m, &c)| c * (1.0 + m as f64).powf(gamma / 2.0))
        .sum();
    let k = (m_max as f64).sqrt();
    let tail = sphere_area(n) * k.powf(n as f64 + gamma) / (-(n as f64 + gamma));
    partial + tail
}

// r_n(m): number of k ∈ ℤⁿ with |k|² = m, m ≤ m_max
fn representation_counts(n: usize, m_max: usize) -> Vec<f64> {
    let mut r1 = vec![0.0; m_max + 1];
    let mut i = 0usize;
    while i * i <= m_max {
        r1[i * i] += if i == 0 { 1.0 } else { 2.0 };
        i += 1;
    }
    let squares: Vec<(usize, f64)> = r1.iter().enumerate().filter(|(_, &c)| c > 0.0).map(|(m, &c)| (m, c)).collect();
    let mut acc = r1.clone();
    for _ in 1..n {
        let mut next = vec![0.0; m_max + 1];
        for (m, &c) in acc.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for &(sq, w) in &squares {
                if m + sq > m_max {
                    break;
                }
                next[m + sq] += c * w;
            }
        }
        acc = next;
    }
    acc
}

fn sphere_area(n: usize) -> f64 {
    // 2 π^{n/2} / Γ(n/2)
    let half_gamma = if n % 2 == 0 {
        (1..n / 2).map(|i| i as f64).product::<f64>()
    } else {
        // Γ(m + 1/2) = (2m)! √π / (4^m m!)
        let m = (n - 1) / 2;
        let mut g = std::f64::consts::PI.sqrt();
        for i in 0..m {
            g *= i as f64 + 0.5;
        }
        g
    };
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / half_gamma
}

impl IndexedSeq {
    pub(crate) fn check_convention(&self, alpha: f64) -> Result<()> {
        let dyadic = alpha == 1.0;
        for (k, _) in self.iter() {
            match (k, dyadic) {
                (WindowIndex::Lattice(_), false) | (WindowIndex::Dyadic(_), true) => {}
                _ => {
                    return Err(Error::param(
                        "index convention mismatch: alpha = 1 needs dyadic indices, alpha < 1 needs lattice indices",
                    ))
                }
            }
        }
        Ok(())
    }
}
