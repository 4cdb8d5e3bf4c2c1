//! Closed-form index functions and the sharp embedding decision between two
//! α-modulation spaces `M^{s,α}_{p,q}`.
//!
//! Exponents are carried as reciprocals (`rp = 1/p`, `rq = 1/q`), so `p = ∞`
//! is `rp = 0` and the quasi-Banach range `p < 1` is `rp > 1`. Every function
//! is generic over [`Scalar`]: use [`Rational`](crate::scalar::Rational) for
//! exact verdicts and `f64` for numerical sweeps.

mod multiplier;
mod regions;

pub(crate) use multiplier::aggregate as multiplier_aggregate;
pub use multiplier::{lattice_power_sum, power_weight_multiplier_norm, seq_multiplier_norm_closed, MultiplierExponent};
pub use regions::{region_classify, Region};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Parameters of one α-modulation space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams<T = f64> {
    /// `1/p`
    pub rp: T,
    /// `1/q`
    pub rq: T,
    pub s: T,
    pub alpha: T,
    pub n: u32,
}

impl<T: Scalar> SpaceParams<T> {
    pub fn new(rp: T, rq: T, s: T, alpha: T, n: u32) -> Result<Self> {
        let p = SpaceParams { rp, rq, s, alpha, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_reciprocal("1/p", self.rp)?;
        check_reciprocal("1/q", self.rq)?;
        check_alpha(self.alpha)?;
        if self.n == 0 {
            return Err(Error::param("dimension n must be at least 1"));
        }
        Ok(())
    }

    pub fn with_s(mut self, s: T) -> Self {
        self.s = s;
        self
    }

    pub fn to_f64(&self) -> SpaceParams<f64> {
        SpaceParams {
            rp: self.rp.to_f64(),
            rq: self.rq.to_f64(),
            s: self.s.to_f64(),
            alpha: self.alpha.to_f64(),
            n: self.n,
        }
    }
}

impl SpaceParams<f64> {
    /// Exponent `p` (infinite when `1/p = 0`).
    pub fn p(&self) -> f64 {
        recip(self.rp)
    }

    pub fn q(&self) -> f64 {
        recip(self.rq)
    }
}

fn recip(r: f64) -> f64 {
    if r == 0.0 {
        f64::INFINITY
    } else {
        1.0 / r
    }
}

pub(crate) fn check_reciprocal<T: Scalar>(name: &str, v: T) -> Result<()> {
    if !(v >= T::zero()) {
        return Err(Error::param(format!("{name} must be non-negative, got {:?}", v)));
    }
    Ok(())
}

pub(crate) fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return Err(Error::param(format!("alpha must lie in [0,1], got {:?}", alpha)));
    }
    Ok(())
}

/// Which formula family of the index function applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `α₁ ≤ α₂`
    LE,
    /// `α₁ > α₂`
    GT,
}

/// The three affine terms of the index function together with their maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexBreakdown<T = f64> {
    pub branch: Branch,
    pub terms: [T; 3],
    pub value: T,
    /// 1-based indices of the terms attaining the maximum; ties are kept.
    pub argmax: Vec<u8>,
}

impl<T: Scalar> IndexBreakdown<T> {
    fn from_terms(branch: Branch, terms: [T; 3]) -> Self {
        let value = terms[0].max2(terms[1]).max2(terms[2]);
        let argmax = (0..3)
            .filter(|&i| value - terms[i] <= T::slack())
            .map(|i| i as u8 + 1)
            .collect();
        IndexBreakdown { branch, terms, value, argmax }
    }

    pub fn to_f64(&self) -> IndexBreakdown<f64> {
        IndexBreakdown {
            branch: self.branch,
            terms: self.terms.map(Scalar::to_f64),
            value: self.value.to_f64(),
            argmax: self.argmax.clone(),
        }
    }
}

/// Growth exponent `A(p, q; α₁, α₂)` of the localized identity
/// `□_k^{α₁∨α₂} : M^{0,α₁}_{p₁,q} → M^{0,α₂}_{p₂,q}` measured in powers of
/// `⟨k⟩^{1/(1-α₁∨α₂)}`.
pub fn index_a<T: Scalar>(n: u32, rp1: T, rp2: T, rq: T, alpha1: T, alpha2: T) -> Result<IndexBreakdown<T>> {
    if n == 0 {
        return Err(Error::param("dimension n must be at least 1"));
    }
    check_reciprocal("1/p1", rp1)?;
    check_reciprocal("1/p2", rp2)?;
    check_reciprocal("1/q", rq)?;
    check_alpha(alpha1)?;
    check_alpha(alpha2)?;

    let nn = T::from_i64(n as i64);
    let one = T::one();
    // shared between both branches
    let a2 = nn * alpha2 * (one - rp2) - nn * alpha1 * (one - rp1) - nn * (alpha2 - alpha1) * rq;
    if alpha1 <= alpha2 {
        let a1 = nn * alpha1 * (rp1 - rp2);
        let a3 = nn * (alpha2 - alpha1) * (rp2 - rq) + nn * alpha1 * (rp1 - rp2);
        Ok(IndexBreakdown::from_terms(Branch::LE, [a1, a2, a3]))
    } else {
        let a1 = nn * alpha2 * (rp1 - rp2);
        let a3 = nn * (alpha1 - alpha2) * (rq - rp1) + nn * alpha2 * (rp1 - rp2);
        Ok(IndexBreakdown::from_terms(Branch::GT, [a1, a2, a3]))
    }
}

/// Index `R(p, q; α₁, α₂)`: `A` evaluated at `q₁` when `α₁ ≤ α₂` and at `q₂`
/// otherwise.
pub fn index_r<T: Scalar>(n: u32, rp1: T, rp2: T, rq1: T, rq2: T, alpha1: T, alpha2: T) -> Result<IndexBreakdown<T>> {
    check_reciprocal("1/q1", rq1)?;
    check_reciprocal("1/q2", rq2)?;
    let rq = if alpha1 <= alpha2 { rq1 } else { rq2 };
    index_a(n, rp1, rp2, rq, alpha1, alpha2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QCase {
    /// `1/q₂ ≤ 1/q₁`
    QDown,
    /// `1/q₂ > 1/q₁`
    QUp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVerdict<T = f64> {
    pub embeds: bool,
    pub q_case: QCase,
    pub r_value: T,
    pub index: IndexBreakdown<T>,
    /// `s₁ − s₂ − R − correction`
    pub margin: T,
    pub correction: T,
    pub strict_required: bool,
    pub p_order_ok: bool,
    pub reason: String,
}

impl<T: Scalar> EmbeddingVerdict<T> {
    pub fn to_f64(&self) -> EmbeddingVerdict<f64> {
        EmbeddingVerdict {
            embeds: self.embeds,
            q_case: self.q_case,
            r_value: self.r_value.to_f64(),
            index: self.index.to_f64(),
            margin: self.margin.to_f64(),
            correction: self.correction.to_f64(),
            strict_required: self.strict_required,
            p_order_ok: self.p_order_ok,
            reason: self.reason.clone(),
        }
    }
}

fn binding_reason<T: Scalar>(ib: &IndexBreakdown<T>) -> String {
    let name = match ib.branch {
        Branch::LE => "A",
        Branch::GT => "Ã",
    };
    let labels: Vec<String> = ib.argmax.iter().map(|i| format!("{name}{i}")).collect();
    format!("R binds on {}", labels.join("="))
}

/// Sharp decision of `M^{s₁,α₁}_{p₁,q₁} ⊆ M^{s₂,α₂}_{p₂,q₂}`.
pub fn embedding_decide<T: Scalar>(source: &SpaceParams<T>, target: &SpaceParams<T>) -> Result<EmbeddingVerdict<T>> {
    source.validate()?;
    target.validate()?;
    if source.n != target.n {
        return Err(Error::param(format!("dimension mismatch: {} vs {}", source.n, target.n)));
    }
    let n = source.n;
    let index = index_r(n, source.rp, target.rp, source.rq, target.rq, source.alpha, target.alpha)?;
    let r_value = index.value;
    let q_case = if target.rq <= source.rq { QCase::QDown } else { QCase::QUp };
    let alpha_max = source.alpha.max2(target.alpha);
    let correction = match q_case {
        QCase::QDown => T::zero(),
        // the factor (1 − α∨) vanishes identically at α∨ = 1
        QCase::QUp if alpha_max == T::one() => T::zero(),
        QCase::QUp => T::from_i64(n as i64) * (T::one() - alpha_max) * (target.rq - source.rq),
    };
    let margin = source.s - target.s - r_value - correction;
    let p_order_ok = target.rp <= source.rp;
    let strict_required = q_case == QCase::QUp;
    let smooth_ok = match q_case {
        QCase::QDown => margin >= -T::slack(),
        QCase::QUp => margin > T::slack(),
    };
    let embeds = p_order_ok && smooth_ok;
    let reason = if !p_order_ok {
        "p-order violated: 1/p2 > 1/p1".to_string()
    } else {
        binding_reason(&index)
    };
    Ok(EmbeddingVerdict { embeds, q_case, r_value, index, margin, correction, strict_required, p_order_ok, reason })
}

/// Threshold of the classical equal-exponent criterion:
/// `0 ∨ n(α₂−α₁)(1/p−1/q) ∨ n(α₂−α₁)(1−1/p−1/q)`.
pub fn wang_han_threshold<T: Scalar>(n: u32, rp: T, rq: T, alpha1: T, alpha2: T) -> T {
    let d = T::from_i64(n as i64) * (alpha2 - alpha1);
    T::zero().max2(d * (rp - rq)).max2(d * (T::one() - rp - rq))
}

/// Independent decision for the special case `p₁ = p₂`, `q₁ = q₂`.
pub fn wang_han_decide<T: Scalar>(source: &SpaceParams<T>, target: &SpaceParams<T>) -> Result<EmbeddingVerdict<T>> {
    source.validate()?;
    target.validate()?;
    if source.n != target.n {
        return Err(Error::param("dimension mismatch"));
    }
    if source.rp != target.rp || source.rq != target.rq {
        return Err(Error::param("equal-exponent criterion needs p1 = p2 and q1 = q2"));
    }
    let threshold = wang_han_threshold(source.n, source.rp, source.rq, source.alpha, target.alpha);
    let margin = source.s - target.s - threshold;
    let d = T::from_i64(source.n as i64) * (target.alpha - source.alpha);
    let terms = [T::zero(), d * (source.rp - source.rq), d * (T::one() - source.rp - source.rq)];
    let index = IndexBreakdown::from_terms(
        if source.alpha <= target.alpha { Branch::LE } else { Branch::GT },
        terms,
    );
    Ok(EmbeddingVerdict {
        embeds: margin >= -T::slack(),
        q_case: QCase::QDown,
        r_value: threshold,
        reason: format!("threshold {:?}", threshold.to_f64()),
        index,
        margin,
        correction: T::zero(),
        strict_required: false,
        p_order_ok: true,
    })
}

/// Convenience: exact parameters from small rationals.
pub fn exact(rp: Rational, rq: Rational, s: Rational, alpha: Rational, n: u32) -> Result<SpaceParams<Rational>> {
    SpaceParams::new(rp, rq, s, alpha, n)
}
