//! Centralizer statistics on g(F_p) and the commutator identities they feed.

use super::engine::{CountOptions, WordMap};
use crate::chevalley::ChevalleyAlgebra;
use crate::error::{check_budget, Error, Result};
use crate::linalg::rank_mod_p;
use crate::polymap::Carrier as MapCarrier;
use crate::ring::{is_prime, Ring};
use crate::words::{parse_lie, Word};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use std::collections::BTreeMap;

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn ad_rank(alg: &ChevalleyAlgebra, ring: &Ring, z: &[u64]) -> usize {
    let d = alg.dim;
    let flat = alg.ad_matrix(ring, z);
    let rows = (0..d).map(|i| flat[i * d..(i + 1) * d].to_vec()).collect();
    rank_mod_p(rows, ring.size())
}

/// |Cent(Z)| = p^{dim - rank ad Z}.
pub fn centralizer_size(alg: &ChevalleyAlgebra, p: u64, z: &[u64]) -> Result<u128> {
    check_prime(p)?;
    let ring = Ring::parse(&format!("fp:{p}"), None)?;
    Ok((p as u128).pow((alg.dim - ad_rank(alg, &ring, z)) as u32))
}

/// Number of Z in g(F_p) with each centralizer dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralizerCensus {
    pub p: u64,
    pub dim: usize,
    pub counts: BTreeMap<usize, u128>,
}

impl CentralizerCensus {
    /// Σ_Z |Cent(Z)|^a.
    pub fn power_sum(&self, a: u32) -> BigUint {
        self.counts.iter().map(|(&nul, &c)| BigUint::from(c) * BigUint::from(self.p).pow(a * nul as u32)).sum()
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.dim as u32)
    }
}

/// Census over projective representatives: rank ad(cZ) = rank ad(Z) for
/// c ≠ 0, so each line is visited once with weight p − 1.
pub fn centralizer_census(alg: &ChevalleyAlgebra, p: u64, budget: u64) -> Result<CentralizerCensus> {
    check_prime(p)?;
    let d = alg.dim;
    let lines = ((p as u128).pow(d as u32) - 1) / (p as u128 - 1);
    check_budget(lines, budget)?;
    let ring = Ring::parse(&format!("fp:{p}"), None)?;
    let merge = |mut a: BTreeMap<usize, u128>, b: BTreeMap<usize, u128>| {
        for (k, v) in b {
            *a.entry(k).or_insert(0) += v;
        }
        a
    };
    let mut counts = (0..d)
        .into_par_iter()
        .map(|lead| {
            let tail = d - lead - 1;
            let mut local = BTreeMap::new();
            for c in 0..p.pow(tail as u32) {
                let mut z = vec![0u64; d];
                z[lead] = 1;
                let mut c = c;
                for slot in z[lead + 1..].iter_mut() {
                    *slot = c % p;
                    c /= p;
                }
                *local.entry(d - ad_rank(alg, &ring, &z)).or_insert(0u128) += (p - 1) as u128;
            }
            local
        })
        .reduce(BTreeMap::new, merge);
    *counts.entry(d).or_insert(0) += 1;
    Ok(CentralizerCensus { p, dim: d, counts })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpsilonReport {
    pub p: u64,
    /// |Υ(F_p)| = Σ_Z |Cent(Z)|².
    pub count: BigUint,
    /// |Υ|/|g|² − 1.
    pub deviation: BigRational,
}

impl UpsilonReport {
    pub fn deviation_f64(&self) -> f64 {
        self.deviation.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn upsilon_count(alg: &ChevalleyAlgebra, p: u64, budget: u64) -> Result<UpsilonReport> {
    let census = centralizer_census(alg, p, budget)?;
    let count = census.power_sum(2);
    let g2 = census.order().pow(2);
    let deviation = BigRational::new(count.clone().into(), g2.into()) - BigRational::one();
    Ok(UpsilonReport { p, count, deviation })
}

/// τ_comm^{*2}(0): a brute-force side and a census side.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorCheck {
    pub p: u64,
    pub algebra: String,
    pub lhs: Option<BigRational>,
    pub rhs: BigRational,
}

impl CommutatorCheck {
    pub fn exact_match(&self) -> Option<bool> {
        self.lhs.as_ref().map(|l| *l == self.rhs)
    }
}

/// Left side from the pair histogram N(a) = #{[X,Y] = a}: Σ_a N(a)N(−a)/|g|⁴.
/// Right side Σ_Z |Cent(Z)|²/|g|³. When the pair enumeration exceeds the
/// budget only the right side is reported.
pub fn commutator_fourier_check(alg: &ChevalleyAlgebra, p: u64, opts: &CountOptions) -> Result<CommutatorCheck> {
    let census = centralizer_census(alg, p, opts.budget)?;
    let order = census.order();
    let rhs = BigRational::new(census.power_sum(2).into(), order.pow(3).into());
    let ring = Ring::parse(&format!("fp:{p}"), None)?;
    let word = Word::Lie(parse_lie("[x1,x2]")?);
    let map = WordMap::new(word, &MapCarrier::Algebra(alg.clone()), &ring, opts.budget)?;
    let brute = CountOptions { method: super::engine::CountMethod::Enumerate, ..*opts };
    let lhs = match map.histogram(&brute) {
        Ok(h) => {
            let c = map.carrier();
            let mut acc = BigUint::default();
            for (&a, &n) in &h.counts {
                acc += BigUint::from(n) * BigUint::from(h.get(c.inv(a)));
            }
            Some(BigRational::new(acc.into(), order.pow(4).into()))
        }
        Err(e) if e.is_budget() => None,
        Err(e) => return Err(e),
    };
    Ok(CommutatorCheck { p, algebra: alg.literal(), lhs, rhs })
}
