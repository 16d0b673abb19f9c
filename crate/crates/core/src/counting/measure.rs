//! Exact probability measures on a finite carrier, their convolutions,
//! L^a distances to uniform and mixing times.

use super::carrier::{Carrier, GroupCarrier};
use super::engine::Histogram;
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Masses `num[key] / den`, reduced so that gcd(den, all num) = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    pub carrier: String,
    pub order: u64,
    pub den: BigUint,
    pub num: BTreeMap<u64, BigUint>,
}

impl Measure {
    fn normalized(carrier: String, order: u64, den: BigUint, num: BTreeMap<u64, BigUint>) -> Measure {
        let g = num.values().fold(den.clone(), |g, v| g.gcd(v));
        let num = num.into_iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (k, v / &g)).collect();
        Measure { carrier, order, den: den / g, num }
    }

    pub fn from_histogram(h: &Histogram) -> Measure {
        let num = h.counts.iter().map(|(&k, &v)| (k, BigUint::from(v))).collect();
        Measure::normalized(h.carrier.clone(), h.order, BigUint::from(h.total), num)
    }

    pub fn delta(c: &dyn Carrier, key: u64) -> Measure {
        Measure { carrier: c.label(), order: c.order(), den: BigUint::one(), num: BTreeMap::from([(key, BigUint::one())]) }
    }

    pub fn uniform(c: &dyn Carrier) -> Measure {
        let num = (0..c.order()).map(|k| (k, BigUint::one())).collect();
        Measure { carrier: c.label(), order: c.order(), den: BigUint::from(c.order()), num }
    }

    pub fn mass(&self, key: u64) -> BigRational {
        let n = self.num.get(&key).cloned().unwrap_or_default();
        BigRational::new(n.into(), self.den.clone().into())
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.num.keys().copied()
    }

    pub fn total(&self) -> BigRational {
        let s: BigUint = self.num.values().sum();
        BigRational::new(s.into(), self.den.clone().into())
    }

    fn check_carrier(&self, c: &dyn Carrier) -> Result<()> {
        if self.carrier != c.label() {
            return Err(Error::CarrierMismatch(self.carrier.clone(), c.label()));
        }
        Ok(())
    }

    /// (μ * ν)(g) = Σ_{ab = g} μ(a) ν(b).
    pub fn convolve(&self, other: &Measure, c: &dyn Carrier) -> Result<Measure> {
        if self.carrier != other.carrier {
            return Err(Error::CarrierMismatch(self.carrier.clone(), other.carrier.clone()));
        }
        self.check_carrier(c)?;
        let mut num: BTreeMap<u64, BigUint> = BTreeMap::new();
        for (&a, x) in &self.num {
            for (&b, y) in &other.num {
                *num.entry(c.op(a, b)).or_default() += x * y;
            }
        }
        Ok(Measure::normalized(self.carrier.clone(), self.order, &self.den * &other.den, num))
    }

    /// μ^{*t} for t ≥ 1.
    pub fn power(&self, t: usize, c: &dyn Carrier) -> Result<Measure> {
        if t == 0 {
            return Ok(Measure::delta(c, c.identity()));
        }
        let mut acc = self.clone();
        for _ in 1..t {
            acc = acc.convolve(self, c)?;
        }
        Ok(acc)
    }

    /// μ(hgh⁻¹) = μ(g) for all g, h.
    pub fn is_conjugation_invariant(&self, g: &GroupCarrier) -> bool {
        (0..g.order()).all(|h| {
            let hi = g.inv(h);
            self.num.iter().all(|(&x, m)| self.num.get(&g.op(g.op(h, x), hi)) == Some(m))
        })
    }

    /// f(g) = μ(g) − 1/|G| over the whole carrier, as (value, multiplicity):
    /// the off-support part is folded into a single entry.
    fn deviations(&self) -> Vec<(BigRational, u64)> {
        let n = BigRational::from_integer(self.order.into());
        let u = BigRational::one() / &n;
        let mut out: Vec<(BigRational, u64)> = self.num.keys().map(|&k| (self.mass(k) - &u, 1)).collect();
        let missing = self.order - self.num.len() as u64;
        if missing > 0 {
            out.push((-u, missing));
        }
        out
    }

    /// ‖μ − π‖_a with the |G|^{a−1} normalization.
    pub fn distance(&self, a: Norm) -> Distance {
        let n = BigRational::from_integer(self.order.into());
        let dev = self.deviations();
        match a {
            Norm::L1 => {
                let s: BigRational = dev.iter().map(|(f, m)| f.abs() * BigRational::from_integer((*m).into())).sum();
                Distance::exact(s, false)
            }
            Norm::L2 => {
                let s: BigRational = dev.iter().map(|(f, m)| f * f * BigRational::from_integer((*m).into())).sum();
                Distance::exact(s * n, true)
            }
            Norm::LInf => {
                let max = dev.iter().map(|(f, _)| f.abs()).max().unwrap_or_default();
                Distance::exact(max * n, false)
            }
            Norm::La(a) => {
                let nf = self.order as f64;
                let s: f64 = dev.iter().map(|(f, m)| f.to_f64().unwrap_or(f64::NAN).abs().powf(a) * *m as f64).sum();
                Distance { exact: None, squared: false, value: (nf.powf(a - 1.0) * s).powf(1.0 / a) }
            }
        }
    }

    pub fn to_json(&self, c: &dyn Carrier) -> serde_json::Value {
        let masses: Vec<_> = self
            .num
            .iter()
            .map(|(&k, v)| json!({"key": k, "element": c.format(k), "num": v.to_string(), "den": self.den.to_string()}))
            .collect();
        json!({"carrier": self.carrier, "order": self.order, "masses": masses})
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    L1,
    L2,
    LInf,
    La(f64),
}

impl std::str::FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Norm> {
        match s {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            "inf" | "∞" => Ok(Norm::LInf),
            _ => match s.parse::<f64>() {
                Ok(a) if a >= 1.0 && a.is_finite() => Ok(Norm::La(a)),
                _ => Err(Error::Invalid(format!("norm exponent '{s}'"))),
            },
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Norm::L1 => write!(f, "1"),
            Norm::L2 => write!(f, "2"),
            Norm::LInf => write!(f, "inf"),
            Norm::La(a) => write!(f, "{a}"),
        }
    }
}

/// For L² the exact field holds the square of the distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Distance {
    pub exact: Option<BigRational>,
    pub squared: bool,
    pub value: f64,
}

impl Distance {
    fn exact(v: BigRational, squared: bool) -> Distance {
        let f = v.to_f64().unwrap_or(f64::NAN);
        Distance { value: if squared { f.sqrt() } else { f }, exact: Some(v), squared }
    }

    /// Exact comparison with a rational threshold where possible.
    pub fn less_than(&self, t: &BigRational) -> bool {
        match &self.exact {
            Some(v) if self.squared => *v < t * t,
            Some(v) => v < t,
            None => self.value < t.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Exact comparison of two distances in the same norm.
    pub fn le(&self, other: &Distance) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a <= b,
            _ => self.value <= other.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub norm: Norm,
    pub t: usize,
    /// (t, ‖μ^{*t} − π‖) for t = 1..=t_a.
    pub table: Vec<(usize, Distance)>,
}

fn generated_subgroup_is_whole(mu: &Measure, c: &dyn Carrier) -> bool {
    let gens: Vec<u64> = mu.support().collect();
    let mut seen = BTreeSet::from([c.identity()]);
    let mut queue = VecDeque::from([c.identity()]);
    while let Some(x) = queue.pop_front() {
        for &g in &gens {
            let y = c.op(x, g);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len() as u64 == c.order()
}

/// Least t with ‖μ^{*t} − π‖_a < threshold.
pub fn mixing_time(mu: &Measure, c: &dyn Carrier, a: Norm, threshold: &BigRational, t_max: usize) -> Result<MixingReport> {
    mu.check_carrier(c)?;
    if !mu.num.contains_key(&c.identity()) || !generated_subgroup_is_whole(mu, c) {
        return Err(Error::NonGenerating);
    }
    let mut table = vec![];
    let mut acc = mu.clone();
    for t in 1..=t_max {
        if t > 1 {
            acc = acc.convolve(mu, c)?;
        }
        let d = acc.distance(a);
        let done = d.less_than(threshold);
        table.push((t, d));
        if done {
            return Ok(MixingReport { norm: a, t, table });
        }
    }
    Err(Error::TMax(t_max))
}

/// Distances of μ^{*t} for t = 1..=t_max in each norm.
pub fn distance_table(mu: &Measure, c: &dyn Carrier, norms: &[Norm], t_max: usize) -> Result<Vec<(usize, Vec<Distance>)>> {
    let mut out = vec![];
    let mut acc = mu.clone();
    for t in 1..=t_max {
        if t > 1 {
            acc = acc.convolve(mu, c)?;
        }
        out.push((t, norms.iter().map(|&a| acc.distance(a)).collect()));
    }
    Ok(out)
}

/// Σ_g |f(g)|^a computed by summing every element separately; an oracle
/// for `Measure::distance` that does not fold the off-support part.
pub fn distance_by_summation(mu: &Measure, a: u32) -> BigRational {
    let n = BigInt::from(mu.order);
    let u = BigRational::new(BigInt::one(), n.clone());
    let mut s = BigRational::zero();
    for g in 0..mu.order {
        s += num_traits::pow((mu.mass(g) - &u).abs(), a as usize);
    }
    s * BigRational::from_integer(num_traits::pow(n, a as usize - 1))
}
