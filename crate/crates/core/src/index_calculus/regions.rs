use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{check_reciprocal, Branch};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Closed regions of `(1/p₁, 1/p₂, 1/q)` on which a single term of the index
/// function attains the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    S1,
    S2,
    S3,
    S1Tilde,
    S2Tilde,
    S3Tilde,
}

impl Region {
    /// 1-based index of the index-function term this region belongs to.
    pub fn term(self) -> u8 {
        match self {
            Region::S1 | Region::S1Tilde => 1,
            Region::S2 | Region::S2Tilde => 2,
            Region::S3 | Region::S3Tilde => 3,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::S1 => "S1",
            Region::S2 => "S2",
            Region::S3 => "S3",
            Region::S1Tilde => "S1~",
            Region::S2Tilde => "S2~",
            Region::S3Tilde => "S3~",
        };
        f.write_str(s)
    }
}

/// Region labels of a point; boundary points belong to every adjacent region.
pub fn region_classify<T: Scalar>(rp1: T, rp2: T, rq: T, branch: Branch) -> Result<BTreeSet<Region>> {
    check_reciprocal("1/p1", rp1)?;
    check_reciprocal("1/p2", rp2)?;
    check_reciprocal("1/q", rq)?;
    if rp2 > rp1 {
        return Err(Error::param("region classification needs 1/p2 <= 1/p1"));
    }
    let one = T::one();
    let half = T::half();
    let mut out = BTreeSet::new();
    match branch {
        Branch::LE => {
            if rq >= one - rp2 && rq >= rp2 {
                out.insert(Region::S1);
            }
            if rq <= one - rp2 && rp2 <= half {
                out.insert(Region::S2);
            }
            if rq <= rp2 && rp2 >= half {
                out.insert(Region::S3);
            }
        }
        Branch::GT => {
            if rq <= one - rp1 && rq <= rp1 {
                out.insert(Region::S1Tilde);
            }
            if rq >= one - rp1 && rp1 >= half {
                out.insert(Region::S2Tilde);
            }
            if rq >= rp1 && rp1 <= half {
                out.insert(Region::S3Tilde);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_calculus::index_a;
    use num_rational::Ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triple_point() {
        let h = Ratio::<i128>::new(1, 2);
        let set = region_classify(h, h, h, Branch::LE).unwrap();
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn lower_corner_is_s2_only() {
        let set = region_classify(0.7, 0.0, 0.0, Branch::LE).unwrap();
        assert_eq!(set.into_iter().collect::<Vec<_>>(), vec![Region::S2]);
    }

    #[test]
    fn rejects_reversed_p_order() {
        assert!(region_classify(0.2, 0.5, 0.0, Branch::GT).is_err());
    }

    #[test]
    fn regions_cover_the_whole_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let rp1: f64 = rng.random_range(0.0..3.0);
            let rp2: f64 = rng.random_range(0.0..=rp1);
            let rq: f64 = rng.random_range(0.0..3.0);
            for b in [Branch::LE, Branch::GT] {
                assert!(!region_classify(rp1, rp2, rq, b).unwrap().is_empty());
            }
        }
    }

    // Brute force: the region predicate must agree with the argmax of the
    // three affine terms whenever α₁ ≠ α₂ (for α₁ = α₂ all terms coincide).
    #[test]
    fn regions_match_argmax_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let den = 12i128;
            let rp1 = Ratio::new(rng.random_range(0..=36), den);
            let rp2 = Ratio::new(rng.random_range(0..=*rp1.numer()), den);
            let rq = Ratio::new(rng.random_range(0..=36), den);
            let (a1, a2) = loop {
                let a = Ratio::new(rng.random_range(0..=12), den);
                let b = Ratio::new(rng.random_range(0..=12), den);
                if a != b {
                    break (a, b);
                }
            };
            let ib = index_a(rng.random_range(1..4), rp1, rp2, rq, a1, a2).unwrap();
            let regions = region_classify(rp1, rp2, rq, ib.branch).unwrap();
            let labels: Vec<u8> = regions.iter().map(|r| r.term()).collect();
            assert_eq!(labels, ib.argmax, "rp1={rp1} rp2={rp2} rq={rq} a=({a1},{a2})");
        }
    }
}
