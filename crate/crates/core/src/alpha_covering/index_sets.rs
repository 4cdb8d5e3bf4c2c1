use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Covering, WindowIndex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// Windows overlapping the anchor.
    Lambda,
    /// Windows overlapping some member of `Λ_k`.
    LambdaStar,
    /// Windows of the member covering overlapping the anchor window.
    Gamma,
    /// Windows of the member covering whose support lies where the anchor
    /// symbol is identically one.
    GammaTilde,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexSet {
    pub relation: Relation,
    pub anchor: WindowIndex,
    pub members: BTreeSet<WindowIndex>,
}

impl IndexSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, idx: &WindowIndex) -> bool {
        self.members.contains(idx)
    }
}

/// Index set of `relation` around `anchor` (a window of `anchor_cov`).
///
/// `Gamma`/`GammaTilde` draw members from `member_cov`: with `α₁` the member
/// covering and `α₂` the anchor covering this is `Γ_k^{α₁,α₂}`.
pub fn neighbor_set(
    relation: Relation,
    anchor: WindowIndex,
    anchor_cov: &Covering,
    member_cov: Option<&Covering>,
) -> Result<IndexSet> {
    let members: BTreeSet<WindowIndex> = match relation {
        Relation::Lambda => anchor_cov.neighbors(anchor)?.into_iter().collect(),
        Relation::LambdaStar => {
            let mut out = BTreeSet::new();
            for l in anchor_cov.neighbors(anchor)? {
                out.extend(anchor_cov.neighbors(l)?);
            }
            out
        }
        Relation::Gamma | Relation::GammaTilde => {
            let other = member_cov.ok_or_else(|| Error::param("Gamma relations need a second covering"))?;
            if other.n() != anchor_cov.n() {
                return Err(Error::param("coverings of different dimension"));
            }
            let window = anchor_cov.window(anchor)?;
            let (lo, hi) = window.support.bounding_box();
            let mut out = BTreeSet::new();
            for l in other.windows_touching_box(lo, hi)? {
                let sup = other.support(l)?;
                let keep = match relation {
                    Relation::Gamma => sup.intersects(&window.support),
                    _ => window.clean_radius > 0.0 && window.clean.contains(&sup),
                };
                if keep {
                    out.insert(l);
                }
            }
            out
        }
    };
    Ok(IndexSet { relation, anchor, members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha_covering::CoveringSpec;

    #[test]
    fn lambda_is_symmetric_and_reflexive() {
        let cov = Covering::calibrated(0.5, 2).unwrap();
        for k in [[0, 0], [3, -1], [7, 7]] {
            let a = WindowIndex::Lattice(k);
            let set = neighbor_set(Relation::Lambda, a, &cov, None).unwrap();
            assert!(set.contains(&a));
            for l in &set.members {
                assert!(neighbor_set(Relation::Lambda, *l, &cov, None).unwrap().contains(&a));
            }
        }
    }

    #[test]
    fn lambda_star_contains_lambda() {
        let spec = CoveringSpec::calibrated(0.0, 1).unwrap().with_c_big(0.8);
        let cov = Covering::new(spec).unwrap();
        let a = WindowIndex::lattice1(-4);
        let star = neighbor_set(Relation::LambdaStar, a, &cov, None).unwrap();
        assert_eq!(star.len(), 5);
    }

    #[test]
    fn gamma_tilde_inside_gamma_and_grows_with_scale_ratio() {
        let fine = Covering::calibrated(0.0, 1).unwrap();
        let coarse = Covering::calibrated(0.5, 1).unwrap();
        let mut pts = Vec::new();
        for k in [4i64, 8, 16, 32, 64, 128] {
            let a = WindowIndex::lattice1(k);
            let g = neighbor_set(Relation::Gamma, a, &coarse, Some(&fine)).unwrap();
            let gt = neighbor_set(Relation::GammaTilde, a, &coarse, Some(&fine)).unwrap();
            assert!(gt.members.is_subset(&g.members));
            assert!(!gt.is_empty());
            pts.push(((k as f64).ln(), (g.len() as f64).ln()));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 1.0).abs() < 0.1, "{slope}");
    }
}
