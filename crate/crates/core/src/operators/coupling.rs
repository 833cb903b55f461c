//! Pair couplings `lambda_{n,n'}` between chain sites.
//!
//! Each unordered pair appears once with its full strength, as a bond
//! oriented `from -> to`. On a ring the orientation follows the shorter arc
//! (`to = from + d mod N` with `d < N/2`), which keeps translation-invariant
//! couplings translation invariant even for a complex phase `e^{i phi}`.
//! Antipodal pairs (`2d = N`) have no preferred direction and are stored as
//! two opposite bonds of half strength. Open chains orient `from < to`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::Boundary;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bond {
    pub from: usize,
    pub to: usize,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingMap {
    num_sites: usize,
    boundary: Boundary,
    bonds: Vec<Bond>,
    seed: Option<u64>,
}

impl CouplingMap {
    /// Couplings from explicit unordered pairs. Repeated pairs are summed.
    pub fn from_pairs(
        num_sites: usize,
        boundary: Boundary,
        pairs: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (a, b, s) in pairs {
            if a >= num_sites || b >= num_sites || a == b {
                return Err(Error::InvalidParameter(format!(
                    "invalid coupling pair ({a}, {b}) on {num_sites} sites"
                )));
            }
            if !s.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "coupling ({a}, {b}) is not a finite real number"
                )));
            }
            *merged.entry((a.min(b), a.max(b))).or_insert(0.0) += s;
        }
        let mut bonds = Vec::new();
        for ((a, b), s) in merged {
            if s == 0.0 {
                continue;
            }
            match boundary {
                Boundary::Open => bonds.push(Bond { from: a, to: b, strength: s }),
                Boundary::Periodic => {
                    let forward = b - a;
                    let backward = num_sites - forward;
                    if forward < backward {
                        bonds.push(Bond { from: a, to: b, strength: s });
                    } else if backward < forward {
                        bonds.push(Bond { from: b, to: a, strength: s });
                    } else {
                        bonds.push(Bond { from: a, to: b, strength: 0.5 * s });
                        bonds.push(Bond { from: b, to: a, strength: 0.5 * s });
                    }
                }
            }
        }
        Ok(Self {
            num_sites,
            boundary,
            bonds,
            seed: None,
        })
    }

    /// `lambda / dist(n, n')^2` for every pair, with the minimal ring
    /// distance on periodic chains.
    pub fn inverse_square(num_sites: usize, boundary: Boundary, lambda: f64) -> Result<Self> {
        let pairs = all_pairs(num_sites).map(|(a, b)| {
            let d = distance(num_sites, boundary, a, b) as f64;
            (a, b, lambda / (d * d))
        });
        Self::from_pairs(num_sites, boundary, pairs.collect::<Vec<_>>())
    }

    /// `lambda` on nearest-neighbour bonds only.
    pub fn nearest_neighbor(num_sites: usize, boundary: Boundary, lambda: f64) -> Result<Self> {
        let pairs: Vec<_> = all_pairs(num_sites)
            .filter(|&(a, b)| distance(num_sites, boundary, a, b) == 1)
            .map(|(a, b)| (a, b, lambda))
            .collect();
        Self::from_pairs(num_sites, boundary, pairs)
    }

    /// `lambda * c_{n,n'} / dist(n, n')^2` with each `c` drawn uniformly from
    /// `[0.5, 1.0]` by a ChaCha8 generator seeded with `seed`.
    pub fn random_inverse_square(num_sites: usize, boundary: Boundary, lambda: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<_> = all_pairs(num_sites)
            .map(|(a, b)| {
                let c: f64 = rng.random_range(0.5..=1.0);
                let d = distance(num_sites, boundary, a, b) as f64;
                (a, b, lambda * c / (d * d))
            })
            .collect();
        let mut map = Self::from_pairs(num_sites, boundary, pairs)?;
        map.seed = Some(seed);
        Ok(map)
    }

    pub fn zero(num_sites: usize, boundary: Boundary) -> Self {
        Self {
            num_sites,
            boundary,
            bonds: Vec::new(),
            seed: None,
        }
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn is_zero(&self) -> bool {
        self.bonds.is_empty()
    }

    /// Total coupling of the unordered pair `{a, b}`.
    pub fn strength(&self, a: usize, b: usize) -> f64 {
        self.bonds
            .iter()
            .filter(|bd| (bd.from == a && bd.to == b) || (bd.from == b && bd.to == a))
            .map(|bd| bd.strength)
            .sum()
    }

    /// True on a ring when shifting every site by `step` maps the couplings
    /// onto themselves.
    pub fn is_translation_invariant(&self, step: usize) -> bool {
        if self.boundary != Boundary::Periodic {
            return false;
        }
        let n = self.num_sites;
        let scale = self.bonds.iter().map(|b| b.strength.abs()).fold(0.0, f64::max);
        all_pairs(n).all(|(a, b)| {
            let shifted = self.strength((a + step) % n, (b + step) % n);
            (shifted - self.strength(a, b)).abs() <= 1e-14 * scale
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for b in &mut out.bonds {
            b.strength *= s;
        }
        out
    }
}

fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

fn distance(n: usize, boundary: Boundary, a: usize, b: usize) -> usize {
    let d = a.abs_diff(b);
    match boundary {
        Boundary::Periodic => d.min(n - d),
        Boundary::Open => d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_square_uses_ring_distance() {
        let map = CouplingMap::inverse_square(6, Boundary::Periodic, 1.0).unwrap();
        assert_eq!(map.strength(0, 5), 1.0);
        assert_eq!(map.strength(0, 4), 0.25);
        assert!((map.strength(0, 3) - 1.0 / 9.0).abs() < 1e-15);
        // antipodal pair split into two half bonds
        assert_eq!(map.bonds().iter().filter(|b| b.from.abs_diff(b.to) == 3).count(), 6);
        // shorter-arc orientation
        assert!(map.bonds().iter().any(|b| b.from == 5 && b.to == 0));
    }

    #[test]
    fn random_couplings_are_seeded_and_bounded() {
        let a = CouplingMap::random_inverse_square(6, Boundary::Periodic, 1.0, 7).unwrap();
        let b = CouplingMap::random_inverse_square(6, Boundary::Periodic, 1.0, 7).unwrap();
        let c = CouplingMap::random_inverse_square(6, Boundary::Periodic, 1.0, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for n in 0..6 {
            for m in n + 1..6 {
                let d = distance(6, Boundary::Periodic, n, m) as f64;
                let s = a.strength(n, m) * d * d;
                assert!((0.5..=1.0).contains(&s));
            }
        }
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(CouplingMap::from_pairs(3, Boundary::Open, [(0, 0, 1.0)]).is_err());
        assert!(CouplingMap::from_pairs(3, Boundary::Open, [(0, 3, 1.0)]).is_err());
        assert!(CouplingMap::from_pairs(3, Boundary::Open, [(0, 1, f64::NAN)]).is_err());
    }
}
