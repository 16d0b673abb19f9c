//! Points of affine schemes over finite local rings: direct counts,
//! Hensel lifting, h_X, jet points and jet-based lct estimates.

use crate::error::{check_budget, Error, Result};
use crate::linalg::rank_mod_p;
use crate::polymap::{jet_of_ideal, IdealSpec, JetConvention, Poly};
use crate::ring::{is_prime, ring_make, Ring, RingKind};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A polynomial with coefficients already in the ring.
struct Compiled {
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl Compiled {
    fn new(p: &Poly, ring: &Ring, remap: &[usize]) -> Compiled {
        let terms = p
            .terms
            .iter()
            .map(|(m, &c)| (ring.from_int(c), m.iter().map(|&(v, e)| (remap[v as usize], e)).collect()))
            .filter(|(c, _)| *c != 0)
            .collect();
        Compiled { terms }
    }

    fn eval(&self, ring: &Ring, x: &[u64]) -> u64 {
        let mut acc = 0;
        for (c, mono) in &self.terms {
            let mut t = *c;
            for &(v, e) in mono {
                t = ring.mul(t, ring.pow(x[v], e as u64));
            }
            acc = ring.add(acc, t);
        }
        acc
    }
}

fn vars_of(p: &Poly) -> BTreeSet<u32> {
    p.terms.keys().flat_map(|m| m.iter().map(|&(v, _)| v)).collect()
}

fn pow_u128(q: u64, e: usize) -> Option<u128> {
    (q as u128).checked_pow(e as u32)
}

/// Every point, tested one at a time; the oracle for `count_points`.
pub fn count_points_brute(ideal: &IdealSpec, ring: &Ring, budget: u64) -> Result<u128> {
    let q = ring.size();
    let total = pow_u128(q, ideal.n_vars).ok_or(Error::Budget { needed: u128::MAX, budget })?;
    check_budget(total, budget)?;
    let mut x = vec![0u64; ideal.n_vars];
    let mut count = 0;
    for _ in 0..total {
        if ideal.is_zero_at(ring, &x) {
            count += 1;
        }
        for d in x.iter_mut() {
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
    }
    Ok(count)
}

/// |X(R)|. Unused variables contribute |R| each; a single equation that is
/// a sum of pieces in disjoint variables is counted by convolving the value
/// distributions of the pieces; otherwise variables are assigned in order
/// and each equation is tested as soon as its last variable is set.
pub fn count_points(ideal: &IdealSpec, ring: &Ring, budget: u64) -> Result<u128> {
    let q = ring.size();
    let used: BTreeSet<u32> = ideal.polys.iter().flat_map(vars_of).collect();
    let free = ideal.n_vars - used.len();
    let pad = pow_u128(q, free).ok_or(Error::Budget { needed: u128::MAX, budget })?;
    let mut remap = vec![usize::MAX; ideal.n_vars];
    for (i, &v) in used.iter().enumerate() {
        remap[v as usize] = i;
    }
    let n = used.len();
    if ideal.polys.len() == 1 {
        let pieces = split_pieces(&ideal.polys[0], &remap);
        if pieces.len() > 1 {
            return Ok(pad * separable_count(&pieces, ring, budget)?);
        }
    }
    let polys: Vec<Compiled> = ideal.polys.iter().map(|p| Compiled::new(p, ring, &remap)).collect();
    // equations grouped by the level at which they become decidable
    let mut at_level: Vec<Vec<usize>> = vec![vec![]; n + 1];
    for (i, p) in ideal.polys.iter().enumerate() {
        let lvl = p.max_var().map_or(0, |v| remap[v as usize] + 1);
        at_level[lvl].push(i);
    }
    if at_level[0].iter().any(|&i| polys[i].eval(ring, &[]) != 0) {
        return Ok(0);
    }
    if n == 0 {
        return Ok(pad);
    }
    let linear = last_linear(ideal, &at_level[n], &remap, n - 1, ring);
    let depth = if linear.is_some() { n - 1 } else { n };
    check_budget(pow_u128(q, depth).unwrap_or(u128::MAX), budget)?;
    let mut x = vec![0u64; n];
    let ctx = Search { ring, q, polys: &polys, at_level: &at_level, linear: linear.as_ref(), n };
    Ok(pad * ctx.descend(&mut x, 0))
}

/// Last variable enters a single equation as A·v + B.
struct Linear {
    a: Compiled,
    b: Compiled,
}

fn last_linear(ideal: &IdealSpec, eqs: &[usize], remap: &[usize], last: usize, ring: &Ring) -> Option<Linear> {
    let [only] = eqs else { return None };
    let p = &ideal.polys[*only];
    let mut a = Poly::zero();
    let mut b = Poly::zero();
    for (m, &c) in &p.terms {
        match m.iter().position(|&(v, _)| remap[v as usize] == last) {
            Some(k) if m[k].1 == 1 => {
                let mut rest = m.clone();
                rest.remove(k);
                a.add_term(rest, c);
            }
            Some(_) => return None,
            None => b.add_term(m.clone(), c),
        }
    }
    Some(Linear { a: Compiled::new(&a, ring, remap), b: Compiled::new(&b, ring, remap) })
}

struct Search<'a> {
    ring: &'a Ring,
    q: u64,
    polys: &'a [Compiled],
    at_level: &'a [Vec<usize>],
    linear: Option<&'a Linear>,
    n: usize,
}

impl Search<'_> {
    fn descend(&self, x: &mut [u64], level: usize) -> u128 {
        if level == self.n - 1 {
            if let Some(lin) = self.linear {
                // #{v : A v = −B} = |k|^{val A} when val A ≤ val B, else 0
                let a = lin.a.eval(self.ring, x);
                let b = lin.b.eval(self.ring, x);
                let (va, vb) = (self.ring.valuation(a), self.ring.valuation(b));
                return if va <= vb { (self.ring.residue_size() as u128).pow(va) } else { 0 };
            }
        }
        let mut count = 0;
        for c in 0..self.q {
            x[level] = c;
            if self.at_level[level + 1].iter().all(|&i| self.polys[i].eval(self.ring, x) == 0) {
                count += if level + 1 == self.n { 1 } else { self.descend(x, level + 1) };
            }
        }
        x[level] = 0;
        count
    }
}

/// Terms of `p` grouped into pieces with pairwise disjoint variables; the
/// constant term rides with the first piece.
fn split_pieces(p: &Poly, remap: &[usize]) -> Vec<Poly> {
    let n = remap.iter().filter(|&&r| r != usize::MAX).count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for m in p.terms.keys() {
        for w in m.windows(2) {
            let (a, b) = (find(&mut parent, remap[w[0].0 as usize]), find(&mut parent, remap[w[1].0 as usize]));
            parent[a] = b;
        }
    }
    let mut pieces: BTreeMap<usize, Poly> = BTreeMap::new();
    let mut constant = None;
    for (m, &c) in &p.terms {
        match m.first() {
            Some(&(v, _)) => {
                let root = find(&mut parent, remap[v as usize]);
                pieces.entry(root).or_default().add_term(m.clone(), c);
            }
            None => constant = Some(c),
        }
    }
    let mut out: Vec<Poly> = pieces.into_values().collect();
    if let (Some(c), Some(first)) = (constant, out.first_mut()) {
        first.add_term(vec![], c);
    }
    out
}

fn separable_count(pieces: &[Poly], ring: &Ring, budget: u64) -> Result<u128> {
    let q = ring.size();
    let sizes: Vec<usize> = pieces.iter().map(|p| vars_of(p).len()).collect();
    let work = sizes.iter().map(|&s| pow_u128(q, s).unwrap_or(u128::MAX)).fold(0u128, |a, b| a.saturating_add(b));
    check_budget(work, budget)?;
    let mut hists: Vec<HashMap<u64, u128>> = pieces.iter().map(|p| value_histogram(p, ring)).collect();
    let last = hists.pop().expect("at least two pieces");
    let mut acc: HashMap<u64, u128> = HashMap::from([(0, 1)]);
    for hist in &hists {
        let mut next: HashMap<u64, u128> = HashMap::new();
        for (&a, &x) in &acc {
            for (&b, &y) in hist {
                *next.entry(ring.add(a, b)).or_insert(0) += x * y;
            }
        }
        acc = next;
    }
    // only the value 0 of the final sum is needed
    Ok(acc.iter().map(|(&a, &x)| x * last.get(&ring.neg(a)).copied().unwrap_or(0)).sum())
}

fn value_histogram(p: &Poly, ring: &Ring) -> HashMap<u64, u128> {
    let q = ring.size();
    let vars: Vec<u32> = vars_of(p).into_iter().collect();
    let mut local = vec![usize::MAX; vars.last().map_or(0, |&v| v as usize + 1)];
    for (i, &v) in vars.iter().enumerate() {
        local[v as usize] = i;
    }
    let c = Compiled::new(p, ring, &local);
    let mut hist: HashMap<u64, u128> = HashMap::new();
    let mut x = vec![0u64; vars.len()];
    for _ in 0..pow_u128(q, vars.len()).unwrap() {
        *hist.entry(c.eval(ring, &x)).or_insert(0) += 1;
        for d in x.iter_mut() {
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
    }
    hist
}

/// |X(Z/p^k)| for X smooth over F_p: |X(F_p)|·p^{(k−1)(n−c)} with c the
/// number of equations. Fails if some F_p-point has a Jacobian of rank < c.
pub fn hensel_count(ideal: &IdealSpec, p: u64, k: u32, budget: u64) -> Result<u128> {
    let ring = Ring::parse(&format!("fp:{p}"), None)?;
    let (n, c) = (ideal.n_vars, ideal.polys.len());
    let total = pow_u128(p, n).ok_or(Error::Budget { needed: u128::MAX, budget })?;
    check_budget(total, budget)?;
    let jac: Vec<Vec<Poly>> = ideal.polys.iter().map(|f| (0..n as u32).map(|v| f.partial(v)).collect()).collect();
    let mut x = vec![0u64; n];
    let mut points = 0u128;
    for _ in 0..total {
        if ideal.is_zero_at(&ring, &x) {
            let rows = jac.iter().map(|row| row.iter().map(|d| d.eval(&ring, &x)).collect()).collect();
            if rank_mod_p(rows, p) < c {
                return Err(Error::Invalid(format!("singular F_{p}-point {x:?}")));
            }
            points += 1;
        }
        for d in x.iter_mut() {
            *d += 1;
            if *d < p {
                break;
            }
            *d = 0;
        }
    }
    Ok(points * (p as u128).pow((k - 1) * (n - c) as u32))
}

/// n = Π p_i^{k_i}.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        let mut k = 0;
        while n % d == 0 {
            n /= d;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_power_ring(p: u64, k: u32) -> Result<Ring> {
    if k == 1 {
        Ring::parse(&format!("fp:{p}"), None)
    } else {
        Ring::parse(&format!("zmod:{p}^{k}"), None)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HxValue {
    pub modulus: u64,
    pub count: BigUint,
    /// |X(Z/n)| / n^{dim X}.
    pub h: BigRational,
}

/// h_X(Z/n); composite n goes through the CRT product of prime-power counts.
pub fn h_x(ideal: &IdealSpec, n: u64, budget: u64) -> Result<HxValue> {
    if n < 2 {
        return Err(Error::Invalid(format!("modulus {n}")));
    }
    let mut count = BigUint::one();
    for (p, k) in factor(n) {
        count *= BigUint::from(count_points(ideal, &prime_power_ring(p, k)?, budget)?);
    }
    let h = BigRational::new(BigInt::from(count.clone()), BigInt::from(n).pow(ideal.dim as u32));
    Ok(HxValue { modulus: n, count, h })
}

/// F_q[t]/t^{m+1} with q = p^r.
pub fn truncated_ring(p: u64, r: u32, m: usize) -> Result<Ring> {
    if m == 0 {
        return if r == 1 { Ring::parse(&format!("fp:{p}"), None) } else { Ring::parse(&format!("fq:{p}^{r}"), None) };
    }
    ring_make(RingKind::TruncatedPolynomials, p, m as u32 + 1, r, None)
}

/// (|X(F_p[t]/t^{m+1})|, |J_m(X)(F_p)|), the second from the coefficient jet equations.
pub fn jet_point_counts(ideal: &IdealSpec, p: u64, m: usize, budget: u64) -> Result<(u128, u128)> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let arcs = count_points(ideal, &truncated_ring(p, 1, m)?, budget)?;
    let jets = count_points(&jet_of_ideal(ideal, m, JetConvention::Coefficient), &Ring::parse(&format!("fp:{p}"), None)?, budget)?;
    Ok((arcs, jets))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JetRow {
    pub m: usize,
    pub p: u64,
    /// (q, |J_m(Z)(F_q)|) over the field tower.
    pub counts: Vec<(u64, u128)>,
    pub slope: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LctReport {
    /// n − max_{m ≤ m_max} dim J_m / (m+1); an upper bound for lct.
    pub estimate: BigRational,
    pub rows: Vec<JetRow>,
    /// Estimate after each m, non-increasing.
    pub partial: Vec<BigRational>,
}

/// dim J_m(Z) is read off as the growth exponent of |Z(F_q[t]/t^{m+1})| in
/// q: with one level, log_p of the count over F_p; with more levels, the
/// slope between the last two fields F_{p^{L-1}}, F_{p^L}. Slopes within
/// 0.1 of an integer are rounded, anything else is an error.
pub fn lct_estimate_via_jets(ideal: &IdealSpec, m_max: usize, primes: &[u64], levels: u32, budget: u64) -> Result<LctReport> {
    if primes.is_empty() || levels == 0 {
        return Err(Error::Invalid("need at least one prime and one level".into()));
    }
    let n = BigRational::from_integer(ideal.n_vars.into());
    let mut rows = vec![];
    let mut partial: Vec<BigRational> = vec![];
    let mut best = BigRational::from_integer(0.into());
    for m in 0..=m_max {
        let mut dims = vec![];
        for &p in primes {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let mut counts = vec![];
            for r in 1..=levels {
                let ring = truncated_ring(p, r, m)?;
                counts.push((ring.residue_size(), count_points(ideal, &ring, budget)?));
            }
            let ln = |c: u128| (c as f64).ln();
            let slope = match counts.as_slice() {
                [(q, c)] => ln(*c) / (*q as f64).ln(),
                [.., (q0, c0), (q1, c1)] => (ln(*c1) - ln(*c0)) / ((*q1 as f64).ln() - (*q0 as f64).ln()),
                [] => unreachable!(),
            };
            let rounded = slope.round();
            if (slope - rounded).abs() >= 0.1 || rounded < 0.0 {
                return Err(Error::NonIntegralSlope { m, slope });
            }
            dims.push(rounded as usize);
            rows.push(JetRow { m, p, counts, slope, dim: rounded as usize });
        }
        let dim = *dims.iter().max().unwrap();
        let ratio = BigRational::new(dim.into(), (m + 1).into());
        if ratio > best {
            best = ratio;
        }
        partial.push(&n - &best);
    }
    Ok(LctReport { estimate: partial.last().unwrap().clone(), rows, partial })
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
