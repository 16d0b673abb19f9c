//! Exhaustive and sampled evaluation of word maps over a carrier.
//!
//! Inputs are enumerated in fixed-size chunks; per-chunk histograms merge
//! by integer addition, so results do not depend on the worker count.

use super::carrier::{Carrier, GroupCarrier, ModuleCarrier};
use crate::error::{check_budget, Error, Result};
use crate::polymap::{word_to_polymap, Carrier as MapCarrier};
use crate::ring::{Ring, RingKind};
use crate::words::{disjoint_factors, LieTree, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

pub const DEFAULT_BUDGET: u64 = 1 << 32;
const CHUNK: u64 = 1 << 15;
const SAMPLE_CHUNK: u64 = 1 << 12;
const DENSE_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    /// Shortcuts where available: disjoint factors are convolved, the
    /// commutator fiber over 0 comes from the centralizer census.
    Auto,
    /// Evaluate every input tuple.
    Enumerate,
}

#[derive(Debug, Clone, Copy)]
pub struct CountOptions {
    pub budget: u64,
    pub workers: usize,
    pub method: CountMethod,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { budget: DEFAULT_BUDGET, workers: 1, method: CountMethod::Auto }
    }
}

impl CountOptions {
    pub fn enumerate() -> CountOptions {
        CountOptions { method: CountMethod::Enumerate, ..Default::default() }
    }
}

pub enum Space {
    Module(ModuleCarrier),
    Group(GroupCarrier),
}

impl Space {
    pub fn build(carrier: &MapCarrier, ring: &Ring, budget: u64) -> Result<Space> {
        Ok(match carrier {
            MapCarrier::Algebra(a) => Space::Module(ModuleCarrier::new(a.clone(), ring.clone())?),
            MapCarrier::Sl(n) => Space::Group(GroupCarrier::new(*n, ring, budget)?),
        })
    }

    pub fn carrier(&self) -> &dyn Carrier {
        match self {
            Space::Module(m) => m,
            Space::Group(g) => g,
        }
    }

    pub fn ring(&self) -> &Ring {
        match self {
            Space::Module(m) => &m.ring,
            Space::Group(g) => &g.group.group.ring,
        }
    }

    fn map_carrier(&self) -> MapCarrier {
        match self {
            Space::Module(m) => MapCarrier::Algebra(m.alg.clone()),
            Space::Group(g) => MapCarrier::Sl(g.group.group.n),
        }
    }
}

type Term = (u64, Vec<(usize, u32)>);

enum Eval {
    /// `lazy`: every coordinate fits in a u64 before reduction, so only the
    /// final sum is reduced.
    Poly {
        coords: Vec<Vec<Term>>,
        modulus: Option<u64>,
        radix: u64,
        lazy: bool,
    },
    Group {
        letters: Vec<(usize, bool)>,
    },
}

/// Exact fiber counts of a word map: `counts[y] = |φ^{-1}(y)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub carrier: String,
    pub order: u64,
    pub total: u128,
    pub counts: BTreeMap<u64, u128>,
}

impl Histogram {
    pub fn delta(carrier: &dyn Carrier, key: u64, total: u128) -> Histogram {
        Histogram { carrier: carrier.label(), order: carrier.order(), total, counts: BTreeMap::from([(key, total)]) }
    }

    pub fn get(&self, key: u64) -> u128 {
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn max_fiber(&self) -> u128 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    /// Fibers of the convolution φ*ψ on disjoint inputs.
    pub fn convolve(&self, other: &Histogram, c: &dyn Carrier) -> Result<Histogram> {
        for h in [self, other] {
            if h.carrier != c.label() {
                return Err(Error::CarrierMismatch(h.carrier.clone(), c.label()));
            }
        }
        let mut counts: BTreeMap<u64, u128> = BTreeMap::new();
        for (&a, &x) in &self.counts {
            for (&b, &y) in &other.counts {
                *counts.entry(c.op(a, b)).or_insert(0) += x * y;
            }
        }
        Ok(Histogram { carrier: self.carrier.clone(), order: self.order, total: self.total * other.total, counts })
    }

    fn scale(mut self, f: u128) -> Histogram {
        self.total *= f;
        for v in self.counts.values_mut() {
            *v *= f;
        }
        self
    }
}

/// Sample counts with per-cell standard errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledHistogram {
    pub carrier: String,
    pub samples: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl SampledHistogram {
    /// (estimated mass, standard error).
    pub fn estimate(&self, key: u64) -> (f64, f64) {
        let n = self.samples as f64;
        let p = self.counts.get(&key).copied().unwrap_or(0) as f64 / n;
        (p, (p * (1.0 - p) / n).sqrt())
    }
}

enum Acc {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

impl Acc {
    fn new(order: u64) -> Acc {
        if order <= DENSE_LIMIT {
            Acc::Dense(vec![0; order as usize])
        } else {
            Acc::Sparse(HashMap::new())
        }
    }

    #[inline]
    fn bump(&mut self, k: u64) {
        match self {
            Acc::Dense(v) => v[k as usize] += 1,
            Acc::Sparse(m) => *m.entry(k).or_insert(0) += 1,
        }
    }

    fn merge(self, other: Acc) -> Acc {
        match (self, other) {
            (Acc::Dense(mut a), Acc::Dense(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Acc::Dense(a)
            }
            (Acc::Sparse(mut a), Acc::Sparse(b)) => {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                Acc::Sparse(a)
            }
            _ => unreachable!("accumulators share a layout"),
        }
    }

    fn into_counts(self) -> BTreeMap<u64, u128> {
        match self {
            Acc::Dense(v) => v.into_iter().enumerate().filter(|(_, c)| *c > 0).map(|(k, c)| (k as u64, c as u128)).collect(),
            Acc::Sparse(m) => m.into_iter().map(|(k, c)| (k, c as u128)).collect(),
        }
    }
}

/// Runs `body` over chunk indices on `workers` threads and merges.
fn par_chunks<A: Send>(
    workers: usize,
    chunks: u64,
    init: impl Fn() -> A + Sync + Send,
    body: impl Fn(&mut A, u64) + Sync + Send,
    merge: impl Fn(A, A) -> A + Sync + Send,
) -> Result<A> {
    if workers <= 1 {
        let mut acc = init();
        for c in 0..chunks {
            body(&mut acc, c);
        }
        return Ok(acc);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .fold(&init, |mut a, c| {
                body(&mut a, c);
                a
            })
            .reduce(&init, &merge)
    }))
}

/// A word together with the carrier it is evaluated on.
pub struct WordMap {
    pub word: Word,
    pub space: Arc<Space>,
    eval: Eval,
    n_inputs: usize,
    radix: u64,
}

impl WordMap {
    pub fn new(word: Word, carrier: &MapCarrier, ring: &Ring, budget: u64) -> Result<WordMap> {
        WordMap::on_space(word, Arc::new(Space::build(carrier, ring, budget)?))
    }

    pub fn on_space(word: Word, space: Arc<Space>) -> Result<WordMap> {
        let r = word.arity();
        let (eval, n_inputs, radix) = match (&word, space.as_ref()) {
            (Word::Group(g), Space::Group(gc)) => {
                let letters = g.letters.iter().map(|&(s, e)| (s - 1, e > 0)).collect();
                (Eval::Group { letters }, r, gc.order())
            }
            (Word::Group(_), _) | (_, Space::Group(_)) => {
                return Err(Error::UnsupportedCarrier(format!("{:?} word on {}", word.kind(), space.carrier().label())));
            }
            (_, Space::Module(mc)) => {
                let phi = word_to_polymap(&word, &space.map_carrier())?;
                let ring = &mc.ring;
                let modulus = matches!(ring.spec().kind, RingKind::PrimeField | RingKind::IntegersModPrimePower)
                    .then_some(ring.size())
                    .filter(|&m| m < 1 << 32);
                let coords = phi
                    .coords
                    .iter()
                    .map(|p| {
                        p.terms
                            .iter()
                            .map(|(m, &c)| (ring.from_int(c), m.iter().map(|&(v, e)| (v as usize, e)).collect()))
                            .filter(|(c, _)| *c != 0)
                            .collect()
                    })
                    .collect::<Vec<Vec<Term>>>();
                let lazy = modulus.is_some_and(|m| {
                    coords.iter().all(|terms| {
                        let deg = terms.iter().map(|(_, mono)| mono.iter().map(|&(_, e)| e).sum::<u32>()).max().unwrap_or(0);
                        ((m - 1) as u128).checked_pow(deg + 1).and_then(|b| b.checked_mul(terms.len() as u128)).is_some_and(|b| b < 1 << 64)
                    })
                });
                (Eval::Poly { coords, modulus, radix: ring.size(), lazy }, r * mc.alg.dim, ring.size())
            }
        };
        Ok(WordMap { word, space, eval, n_inputs, radix })
    }

    pub fn carrier(&self) -> &dyn Carrier {
        self.space.carrier()
    }

    /// dim X_Q: r copies of the carrier.
    pub fn dim_x(&self) -> usize {
        self.word.arity() * self.carrier().dim()
    }

    pub fn dim_y(&self) -> usize {
        self.carrier().dim()
    }

    pub fn input_count(&self) -> u128 {
        (self.radix as u128).checked_pow(self.n_inputs as u32).unwrap_or(u128::MAX)
    }

    /// Input digits are ring coordinates (module) or element keys (group).
    #[inline]
    pub fn eval_key(&self, x: &[u64]) -> u64 {
        match &self.eval {
            Eval::Poly { coords, modulus: Some(m), radix, lazy: true } => {
                let mut key = 0u64;
                for terms in coords.iter().rev() {
                    let mut acc = 0u64;
                    for (c, mono) in terms {
                        let mut t = *c;
                        for &(v, e) in mono {
                            for _ in 0..e {
                                t *= x[v];
                            }
                        }
                        acc += t;
                    }
                    key = key * radix + acc % m;
                }
                key
            }
            Eval::Poly { coords, modulus: Some(m), radix, .. } => {
                let m = *m;
                let mut key = 0u64;
                for terms in coords.iter().rev() {
                    let mut acc = 0u64;
                    for (c, mono) in terms {
                        let mut t = *c;
                        for &(v, e) in mono {
                            for _ in 0..e {
                                t = t * x[v] % m;
                            }
                        }
                        acc += t;
                        if acc >= m {
                            acc -= m;
                        }
                    }
                    key = key * radix + acc;
                }
                key
            }
            Eval::Poly { coords, modulus: None, radix, .. } => {
                let ring = self.space.ring();
                let mut key = 0u64;
                for terms in coords.iter().rev() {
                    let mut acc = 0u64;
                    for (c, mono) in terms {
                        let mut t = *c;
                        for &(v, e) in mono {
                            t = ring.mul(t, ring.pow(x[v], e as u64));
                        }
                        acc = ring.add(acc, t);
                    }
                    key = key * radix + acc;
                }
                key
            }
            Eval::Group { letters } => {
                let Space::Group(g) = self.space.as_ref() else { unreachable!() };
                let mut acc = g.identity();
                for &(s, pos) in letters {
                    let y = if pos { x[s] } else { g.inv(x[s]) };
                    acc = g.op(acc, y);
                }
                acc
            }
        }
    }

    fn histogram_enumerate(&self, opts: &CountOptions) -> Result<Histogram> {
        let total = self.input_count();
        check_budget(total, opts.budget)?;
        let total = total as u64;
        let (n, radix) = (self.n_inputs, self.radix);
        let order = self.carrier().order();
        let chunks = total.div_ceil(CHUNK);
        let acc = par_chunks(
            opts.workers,
            chunks,
            || Acc::new(order),
            |acc, c| {
                let start = c * CHUNK;
                let end = (start + CHUNK).min(total);
                let mut x = vec![0u64; n];
                let mut s = start;
                for d in x.iter_mut() {
                    *d = s % radix;
                    s /= radix;
                }
                for _ in start..end {
                    acc.bump(self.eval_key(&x));
                    for d in x.iter_mut() {
                        *d += 1;
                        if *d < radix {
                            break;
                        }
                        *d = 0;
                    }
                }
            },
            Acc::merge,
        )?;
        Ok(Histogram { carrier: self.carrier().label(), order, total: total as u128, counts: acc.into_counts() })
    }

    /// All fiber sizes.
    pub fn histogram(&self, opts: &CountOptions) -> Result<Histogram> {
        if opts.method == CountMethod::Enumerate {
            return self.histogram_enumerate(opts);
        }
        let (parts, unused) = disjoint_factors(&self.word);
        if parts.len() <= 1 && unused == 0 {
            return self.histogram_enumerate(opts);
        }
        let c = self.carrier();
        let maps: Vec<WordMap> = parts.into_iter().map(|w| WordMap::on_space(w, self.space.clone())).collect::<Result<_>>()?;
        let work: u128 = maps.iter().map(|m| m.input_count()).fold(0u128, |a, b| a.saturating_add(b));
        check_budget(work, opts.budget)?;
        let pad = (c.order() as u128).checked_pow(unused as u32).ok_or(Error::Budget { needed: u128::MAX, budget: opts.budget })?;
        let mut h = Histogram::delta(c, c.identity(), 1);
        for m in &maps {
            h = h.convolve(&m.histogram_enumerate(opts)?, c)?;
        }
        Ok(h.scale(pad))
    }

    fn is_plain_commutator(&self) -> bool {
        match &self.word {
            Word::Lie(w) if w.arity == 2 && w.terms.len() == 1 => {
                matches!(w.terms.keys().next(), Some(LieTree::Br(a, b)) if matches!((a.as_ref(), b.as_ref()), (LieTree::Gen(_), LieTree::Gen(_))))
            }
            _ => false,
        }
    }

    /// |φ^{-1}(target)|.
    pub fn fiber_count(&self, target: u64, opts: &CountOptions) -> Result<u128> {
        if opts.method == CountMethod::Auto && target == 0 && self.is_plain_commutator() {
            if let Space::Module(mc) = self.space.as_ref() {
                if mc.ring.spec().kind == RingKind::PrimeField {
                    // #{[X,Y] = 0} = Σ_X |Cent(X)|
                    let census = super::lie_stats::centralizer_census(&mc.alg, mc.ring.size(), opts.budget)?;
                    return Ok(census.power_sum(1).try_into().expect("fits u128"));
                }
            }
        }
        Ok(self.histogram(opts)?.get(target))
    }

    /// `samples` uniform inputs from a counter-based stream per chunk.
    pub fn sample(&self, samples: u64, seed: u64, workers: usize) -> Result<SampledHistogram> {
        if samples == 0 {
            return Err(Error::Invalid("sampling needs at least one sample".into()));
        }
        let (n, radix) = (self.n_inputs, self.radix);
        let chunks = samples.div_ceil(SAMPLE_CHUNK);
        let acc = par_chunks(
            workers,
            chunks,
            HashMap::<u64, u64>::new,
            |acc, c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c);
                let len = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
                let mut x = vec![0u64; n];
                for _ in 0..len {
                    for d in x.iter_mut() {
                        *d = rng.gen_range(0..radix);
                    }
                    *acc.entry(self.eval_key(&x)).or_insert(0) += 1;
                }
            },
            |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            },
        )?;
        Ok(SampledHistogram { carrier: self.carrier().label(), samples, counts: acc.into_iter().collect() })
    }
}
