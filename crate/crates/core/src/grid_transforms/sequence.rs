//! Finitely supported sequences indexed by windows and their weighted
//! `ℓ_q^{s,α}` norms.

use serde::{Deserialize, Serialize};

use crate::alpha_covering::{bracket, WindowIndex};
use crate::error::Result;
use crate::index_calculus::multiplier_aggregate;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IndexedSeq {
    entries: Vec<(WindowIndex, f64)>,
}

impl IndexedSeq {
    pub fn new(entries: impl IntoIterator<Item = (WindowIndex, f64)>) -> Self {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        IndexedSeq { entries }
    }

    pub fn lattice_1d(entries: impl IntoIterator<Item = (i64, f64)>) -> Self {
        IndexedSeq::new(entries.into_iter().map(|(k, v)| (WindowIndex::lattice1(k), v)))
    }

    pub fn dyadic(entries: impl IntoIterator<Item = (u32, f64)>) -> Self {
        IndexedSeq::new(entries.into_iter().map(|(j, v)| (WindowIndex::Dyadic(j), v)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (WindowIndex, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, k: WindowIndex, v: f64) {
        self.entries.push((k, v));
        self.entries.sort_by(|a, b| a.0.cmp(&b.0));
    }
}

/// `⟨k⟩^{s/(1−α)}` for lattice indices, `2^{js}` for dyadic levels.
pub fn index_weight(k: WindowIndex, s: f64, alpha: f64) -> f64 {
    match k {
        WindowIndex::Lattice(_) => bracket(k.euclid()).powf(s / (1.0 - alpha)),
        WindowIndex::Dyadic(j) => 2f64.powf(j as f64 * s),
    }
}

/// Weighted `ℓ_q^{s,α}` norm (`rq = 1/q`, `rq = 0` is the supremum).
pub fn sequence_norm(lambda: &IndexedSeq, s: f64, rq: f64, alpha: f64) -> Result<f64> {
    crate::index_calculus::check_reciprocal("1/q", rq)?;
    lambda.check_convention(alpha)?;
    Ok(multiplier_aggregate(lambda.iter().map(|(k, v)| index_weight(k, s, alpha) * v.abs()), rq))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mass_at_origin() {
        let l = IndexedSeq::lattice_1d([(0, 1.0)]);
        for s in [-2.0, 0.0, 3.5] {
            for a in [0.0, 0.5, 0.9] {
                assert_eq!(sequence_norm(&l, s, 0.5, a).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn telescoping_dyadic_weights() {
        let l = IndexedSeq::dyadic((0..=10).map(|j| (j, 2f64.powi(-(j as i32)))));
        let v = sequence_norm(&l, 1.0, 0.0, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flat_sequence_converges_below_critical_smoothness() {
        // s < −n(1−α)/q: partial sums settle; compare K and 4K against the
        // integral tail 2∫_K^∞ x^{sq/(1−α)} dx
        let (s, rq, a) = (-0.8, 1.0, 0.5);
        let e = s / (rq * (1.0 - a));
        let norm = |k: i64| sequence_norm(&IndexedSeq::lattice_1d((-k..=k).map(|i| (i, 1.0))), s, rq, a).unwrap();
        let (v1, v2) = (norm(2000), norm(8000));
        let tail = 2.0 * 2000f64.powf(e + 1.0) / -(e + 1.0);
        assert!(v2 > v1 && v2 - v1 < tail);
    }
}
