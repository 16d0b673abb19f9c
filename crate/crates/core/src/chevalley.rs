//! Classical Lie algebras with integral structure constants read off from
//! explicit matrix realizations, the full matrix algebras M_n, and SL_n over
//! the coefficient rings.

use crate::error::{check_budget, Error, Result};
use crate::linalg::{det_bigint, gcd_all, prime_factors, solve_rational};
use crate::matrix::Mat;
use crate::ring::Ring;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgebraType {
    A,
    B,
    C,
    D,
    /// The full matrix algebra M_n with the commutator bracket.
    Mat,
}

impl AlgebraType {
    pub fn letter(self) -> &'static str {
        match self {
            AlgebraType::A => "A",
            AlgebraType::B => "B",
            AlgebraType::C => "C",
            AlgebraType::D => "D",
            AlgebraType::Mat => "mat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootType {
    A,
    B,
    C,
    Cartan,
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootType::A => "a",
            RootType::B => "b",
            RootType::C => "c",
            RootType::Cartan => "cartan",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootInfo {
    pub root_type: RootType,
    /// Signed height: positive roots > 0, negative roots < 0, Cartan 0.
    pub height: i64,
}

#[derive(Debug, Clone)]
pub struct ChevalleyAlgebra {
    pub ty: AlgebraType,
    pub rank: usize,
    pub dim: usize,
    /// Size of the realizing matrices.
    pub n: usize,
    pub labels: Vec<String>,
    /// Row-major integer matrices, one per basis element.
    pub mats: Vec<Vec<i64>>,
    /// Root in ε-coordinates (zero for Cartan elements).
    pub roots: Vec<Vec<i64>>,
    pub info: Vec<RootInfo>,
    /// 1-based matrix position: the anchor entry of a root vector, (i,i)
    /// for the i-th Cartan element.
    pub positions: Vec<(usize, usize)>,
    /// `structure[i][j]` lists (l, c) with [e_i, e_j] = Σ c e_l.
    pub structure: Vec<Vec<Vec<(usize, i64)>>>,
    pub killing: Vec<Vec<i64>>,
    pub killing_det: BigInt,
    /// gcd of the Killing matrix entries; κ / gcd is the primitive form.
    pub killing_gcd: i64,
    pub bad_primes: Vec<u64>,
    pub bad_primes_primitive: Vec<u64>,
}

fn weight_of_coord(ty: AlgebraType, rank: usize, a: usize) -> Vec<i64> {
    match ty {
        AlgebraType::A | AlgebraType::Mat => {
            let mut w = vec![0; rank + 1];
            w[a] = 1;
            w
        }
        _ => {
            let mut w = vec![0; rank];
            if a < rank {
                w[a] = 1;
            } else if a < 2 * rank {
                w[a - rank] = -1;
            }
            w
        }
    }
}

fn mat_mul(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x != 0 {
                for j in 0..n {
                    out[i * n + j] += x * b[k * n + j];
                }
            }
        }
    }
    out
}

fn mat_bracket(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let ab = mat_mul(n, a, b);
    let ba = mat_mul(n, b, a);
    ab.iter().zip(&ba).map(|(x, y)| x - y).collect()
}

fn transpose(n: usize, a: &[i64]) -> Vec<i64> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

fn simple_roots(ty: AlgebraType, rank: usize) -> Vec<Vec<i64>> {
    let len = if ty == AlgebraType::A { rank + 1 } else { rank };
    let e = |i: usize| {
        let mut v = vec![0; len];
        v[i] = 1;
        v
    };
    let diff = |i: usize| {
        let mut v = e(i);
        v[i + 1] = -1;
        v
    };
    let count_a = if ty == AlgebraType::A { rank } else { rank - 1 };
    let mut out: Vec<Vec<i64>> = (0..count_a).map(diff).collect();
    match ty {
        AlgebraType::B => out.push(e(rank - 1)),
        AlgebraType::C => out.push(e(rank - 1).iter().map(|x| 2 * x).collect()),
        AlgebraType::D => {
            let mut v = e(rank - 1);
            v[rank - 2] = 1;
            out.push(v);
        }
        _ => {}
    }
    out
}

fn root_label(root: &[i64]) -> String {
    let mut s = String::from("e[");
    for (i, &c) in root.iter().enumerate() {
        for _ in 0..c.unsigned_abs() {
            s.push(if c > 0 { '+' } else { '-' });
            s.push_str(&(i + 1).to_string());
        }
    }
    s.push(']');
    s
}

fn classify_root(ty: AlgebraType, root: &[i64]) -> RootType {
    if root.iter().all(|&c| c == 0) {
        return RootType::Cartan;
    }
    let pos: i64 = root.iter().filter(|&&c| c > 0).sum();
    let neg: i64 = -root.iter().filter(|&&c| c < 0).sum::<i64>();
    match (pos, neg) {
        (1, 1) => RootType::A,
        (2, 0) | (0, 2) => RootType::B,
        (1, 0) | (0, 1) if ty == AlgebraType::B => RootType::C,
        _ => unreachable!("unexpected root {root:?}"),
    }
}

impl ChevalleyAlgebra {
    /// Parses `A:2`, `B:3`, `C:2`, `D:4` or `mat:3`.
    pub fn parse(lit: &str) -> Result<ChevalleyAlgebra> {
        let (head, rank) = lit.trim().split_once(':').ok_or_else(|| Error::Invalid(format!("malformed algebra literal '{lit}'")))?;
        let rank: usize = rank.parse().map_err(|_| Error::Invalid(format!("malformed rank in '{lit}'")))?;
        let ty = match head {
            "A" => AlgebraType::A,
            "B" => AlgebraType::B,
            "C" => AlgebraType::C,
            "D" => AlgebraType::D,
            "mat" => AlgebraType::Mat,
            other => return Err(Error::UnsupportedType(other.to_string())),
        };
        algebra_make(ty, rank)
    }

    pub fn literal(&self) -> String {
        format!("{}:{}", self.ty.letter(), if self.ty == AlgebraType::Mat { self.n } else { self.rank })
    }

    /// Conventional name, e.g. `sl_3`, `so_5`, `sp_4`, `gl_2`.
    pub fn name(&self) -> String {
        match self.ty {
            AlgebraType::A => format!("sl_{}", self.n),
            AlgebraType::B | AlgebraType::D => format!("so_{}", self.n),
            AlgebraType::C => format!("sp_{}", self.n),
            AlgebraType::Mat => format!("M_{}", self.n),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// c_{i,j}^l.
    pub fn constant(&self, i: usize, j: usize, l: usize) -> i64 {
        self.structure[i][j].iter().find(|&&(k, _)| k == l).map_or(0, |&(_, c)| c)
    }

    pub fn root_classify(&self, label: &str) -> Result<RootInfo> {
        self.index_of(label).map(|i| self.info[i]).ok_or_else(|| Error::Unknown(format!("basis label '{label}' of {}", self.name())))
    }

    /// Bracket of coordinate vectors over a ring.
    pub fn bracket(&self, ring: &Ring, u: &[u64], v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.dim];
        for (i, &a) in u.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in v.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let ab = ring.mul(a, b);
                for &(l, c) in &self.structure[i][j] {
                    out[l] = ring.add(out[l], ring.mul(ab, ring.from_int(c as i128)));
                }
            }
        }
        out
    }

    /// Matrix of ad(z) acting on coordinate vectors, row-major `dim x dim`.
    pub fn ad_matrix(&self, ring: &Ring, z: &[u64]) -> Vec<u64> {
        let d = self.dim;
        let mut out = vec![0u64; d * d];
        for (i, &a) in z.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for j in 0..d {
                for &(l, c) in &self.structure[i][j] {
                    out[l * d + j] = ring.add(out[l * d + j], ring.mul(a, ring.from_int(c as i128)));
                }
            }
        }
        out
    }

    /// Matrix realization of a coordinate vector.
    pub fn to_matrix(&self, ring: &Ring, coords: &[u64]) -> Mat {
        let n = self.n;
        let mut m = Mat::zero(n);
        for (k, &a) in coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (e, &v) in self.mats[k].iter().enumerate() {
                if v != 0 {
                    m.data[e] = ring.add(m.data[e], ring.mul(a, ring.from_int(v as i128)));
                }
            }
        }
        m
    }

    /// Killing form value on coordinate vectors, using the primitive form
    /// when `primitive` is set.
    pub fn killing_value(&self, ring: &Ring, u: &[u64], v: &[u64], primitive: bool) -> u64 {
        let mut acc = 0u64;
        for (i, &a) in u.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in v.iter().enumerate() {
                let k = self.killing[i][j];
                if b == 0 || k == 0 {
                    continue;
                }
                let k = if primitive { k / self.killing_gcd } else { k };
                acc = ring.add(acc, ring.mul(ring.mul(a, b), ring.from_int(k as i128)));
            }
        }
        acc
    }

    pub fn is_bad_prime(&self, p: u64, primitive: bool) -> bool {
        let list = if primitive { &self.bad_primes_primitive } else { &self.bad_primes };
        self.killing_det.is_zero() || list.contains(&p)
    }

    /// Jacobi identity on all basis triples.
    pub fn check_jacobi(&self) -> bool {
        let d = self.dim;
        let br = |u: &BTreeMap<usize, i64>, k: usize| -> BTreeMap<usize, i64> {
            let mut out = BTreeMap::new();
            for (&i, &a) in u {
                for &(l, c) in &self.structure[i][k] {
                    *out.entry(l).or_insert(0) += a * c;
                }
            }
            out
        };
        let basis = |i: usize, j: usize| -> BTreeMap<usize, i64> { self.structure[i][j].iter().copied().collect() };
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let mut tot: BTreeMap<usize, i64> = BTreeMap::new();
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (l, v) in br(&basis(a, b), c) {
                            *tot.entry(l).or_insert(0) += v;
                        }
                    }
                    if tot.values().any(|&v| v != 0) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl fmt::Display for ChevalleyAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

struct Realization {
    n: usize,
    basis: Vec<Vec<i64>>,
    labels: Vec<String>,
    roots: Vec<Vec<i64>>,
    positions: Vec<(usize, usize)>,
    /// (flat entry, value) anchoring each root vector; None for Cartans.
    anchors: Vec<Option<(usize, i64)>>,
    cartan: Vec<usize>,
}

impl Realization {
    fn coords(&self, m: &[i64]) -> Option<Vec<i64>> {
        let n = self.n;
        let mut out = vec![0i64; self.basis.len()];
        let mut rest = m.to_vec();
        for (k, a) in self.anchors.iter().enumerate() {
            if let Some((e, v)) = a {
                if m[*e] % v != 0 {
                    return None;
                }
                out[k] = m[*e] / v;
                for (x, y) in rest.iter_mut().zip(&self.basis[k]) {
                    *x -= out[k] * y;
                }
            }
        }
        if !self.cartan.is_empty() {
            let q = |x: i64| BigRational::from_integer(BigInt::from(x));
            let a: Vec<Vec<BigRational>> = (0..n).map(|i| self.cartan.iter().map(|&k| q(self.basis[k][i * n + i])).collect()).collect();
            let b: Vec<BigRational> = (0..n).map(|i| q(rest[i * n + i])).collect();
            let x = solve_rational(&a, &b)?;
            for (c, &k) in x.iter().zip(&self.cartan) {
                if !c.is_integer() {
                    return None;
                }
                out[k] = c.to_integer().to_i64()?;
                for (r, y) in rest.iter_mut().zip(&self.basis[k]) {
                    *r -= out[k] * y;
                }
            }
        }
        rest.iter().all(|&x| x == 0).then_some(out)
    }
}

fn realize_matrix_algebra(n: usize) -> Realization {
    let mut basis = vec![];
    let mut labels = vec![];
    let mut positions = vec![];
    let mut anchors = vec![];
    let mut roots = vec![];
    for i in 0..n {
        for j in 0..n {
            let mut m = vec![0; n * n];
            m[i * n + j] = 1;
            basis.push(m);
            labels.push(format!("E[{},{}]", i + 1, j + 1));
            positions.push((i + 1, j + 1));
            anchors.push(Some((i * n + j, 1)));
            let mut r = vec![0; n];
            if i != j {
                r[i] = 1;
                r[j] = -1;
            }
            roots.push(r);
        }
    }
    Realization { n, basis, labels, roots, positions, anchors, cartan: vec![] }
}

fn realize_classical(ty: AlgebraType, rank: usize) -> Result<Realization> {
    let n = match ty {
        AlgebraType::A => rank + 1,
        AlgebraType::B => 2 * rank + 1,
        _ => 2 * rank,
    };
    // the involution X -> -F^{-1} X^T F whose fixed points form the algebra
    let (form, form_inv) = match ty {
        AlgebraType::A => (None, None),
        _ => {
            let mut f = vec![0i64; n * n];
            for i in 0..rank {
                f[i * n + rank + i] = 1;
                f[(rank + i) * n + i] = if ty == AlgebraType::C { -1 } else { 1 };
            }
            if ty == AlgebraType::B {
                f[n * n - 1] = 1;
            }
            let finv = if ty == AlgebraType::C { f.iter().map(|x| -x).collect() } else { f.clone() };
            (Some(f), Some(finv))
        }
    };
    let sigma = |x: &[i64]| -> Vec<i64> {
        match (&form, &form_inv) {
            (Some(f), Some(fi)) => mat_mul(n, &mat_mul(n, fi, &transpose(n, x)), f).iter().map(|v| -v).collect(),
            _ => x.to_vec(),
        }
    };

    let mut root_vecs: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut e = vec![0i64; n * n];
            e[a * n + b] = 1;
            let v: Vec<i64> = if ty == AlgebraType::A {
                e
            } else {
                let s = sigma(&e);
                e.iter().zip(&s).map(|(x, y)| x + y).collect()
            };
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let wa = weight_of_coord(ty, rank, a);
            let wb = weight_of_coord(ty, rank, b);
            let w: Vec<i64> = wa.iter().zip(&wb).map(|(x, y)| x - y).collect();
            if w.iter().all(|&x| x == 0) {
                continue;
            }
            let g = gcd_all(v.iter().copied());
            let first = *v.iter().find(|&&x| x != 0).unwrap();
            let s = if first > 0 { g } else { -g };
            let v: Vec<i64> = v.iter().map(|x| x / s).collect();
            match root_vecs.get(&w) {
                Some(old) => debug_assert_eq!(old, &v, "root space of {w:?} is not one-dimensional"),
                None => {
                    root_vecs.insert(w, v);
                }
            }
        }
    }

    let simple = simple_roots(ty, rank);
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let simple_q: Vec<Vec<BigRational>> = (0..simple[0].len()).map(|c| simple.iter().map(|s| q(s[c])).collect()).collect();
    let height = |w: &[i64]| -> i64 {
        let b: Vec<BigRational> = w.iter().map(|&x| q(x)).collect();
        let ks = solve_rational(&simple_q, &b).expect("roots lie in the root lattice");
        let ks: Vec<i64> = ks.iter().map(|k| k.to_integer().to_i64().unwrap()).collect();
        assert!(ks.iter().all(|&k| k >= 0) || ks.iter().all(|&k| k <= 0));
        ks.iter().sum()
    };
    let anchor = |v: &[i64]| -> (usize, i64) {
        let e = v.iter().position(|&x| x != 0).unwrap();
        (e, v[e])
    };

    let mut pos: Vec<(i64, usize, Vec<i64>)> = vec![];
    for w in root_vecs.keys() {
        let h = height(w);
        if h > 0 {
            pos.push((h, anchor(&root_vecs[w]).0, w.clone()));
        }
    }
    pos.sort();

    // orient e_{-α} so that α([e_α, e_{-α}]) > 0
    for (_, _, w) in &pos {
        let neg: Vec<i64> = w.iter().map(|x| -x).collect();
        let e = &root_vecs[w];
        let f = &root_vecs[&neg];
        let h = mat_bracket(n, e, f);
        let he = mat_bracket(n, &h, e);
        let (ae, av) = anchor(e);
        if he[ae] * av < 0 {
            let f: Vec<i64> = f.iter().map(|x| -x).collect();
            root_vecs.insert(neg, f);
        }
    }

    let mut negs: Vec<(i64, usize, Vec<i64>)> = pos
        .iter()
        .map(|(h, _, w)| {
            let neg: Vec<i64> = w.iter().map(|x| -x).collect();
            (*h, anchor(&root_vecs[&neg]).0, neg)
        })
        .collect();
    negs.sort();

    let mut basis = vec![];
    let mut labels = vec![];
    let mut roots = vec![];
    let mut positions = vec![];
    let mut anchors = vec![];
    let mut cartan = vec![];
    let sl2 = ty == AlgebraType::A && rank == 1;
    for (_, _, w) in &pos {
        let v = root_vecs[w].clone();
        let (e, val) = anchor(&v);
        positions.push((e / n + 1, e % n + 1));
        anchors.push(Some((e, val)));
        labels.push(if sl2 { "e".to_string() } else { root_label(w) });
        roots.push(w.clone());
        basis.push(v);
    }
    for (i, s) in simple.iter().enumerate() {
        let neg: Vec<i64> = s.iter().map(|x| -x).collect();
        let h = mat_bracket(n, &root_vecs[s], &root_vecs[&neg]);
        cartan.push(basis.len());
        positions.push((i + 1, i + 1));
        anchors.push(None);
        labels.push(if sl2 { "h".to_string() } else { format!("h{}", i + 1) });
        roots.push(vec![0; s.len()]);
        basis.push(h);
    }
    for (_, _, w) in &negs {
        let v = root_vecs[w].clone();
        let (e, val) = anchor(&v);
        positions.push((e / n + 1, e % n + 1));
        anchors.push(Some((e, val)));
        labels.push(if sl2 { "f".to_string() } else { root_label(w) });
        roots.push(w.clone());
        basis.push(v);
    }
    Ok(Realization { n, basis, labels, roots, positions, anchors, cartan })
}

/// Builds the algebra of the given type and rank with all invariants
/// verified.
pub fn algebra_make(ty: AlgebraType, rank: usize) -> Result<ChevalleyAlgebra> {
    let min = match ty {
        AlgebraType::A | AlgebraType::Mat => 1,
        AlgebraType::B | AlgebraType::C => 2,
        AlgebraType::D => 3,
    };
    if rank < min {
        return Err(Error::Rank { ty: ty.letter().chars().next().unwrap(), rank });
    }
    let real = if ty == AlgebraType::Mat { realize_matrix_algebra(rank) } else { realize_classical(ty, rank)? };
    let dim = real.basis.len();
    let n = real.n;

    let mut structure = vec![vec![vec![]; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let b = mat_bracket(n, &real.basis[i], &real.basis[j]);
            let c = real.coords(&b).ok_or_else(|| Error::NonIntegral(format!("[{}, {}]", real.labels[i], real.labels[j])))?;
            structure[i][j] = c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(l, &x)| (l, x)).collect();
        }
    }

    let mut killing = vec![vec![0i64; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let mut t = 0;
            for b in 0..dim {
                for &(a, c1) in &structure[i][b] {
                    for &(b2, c2) in &structure[j][a] {
                        if b2 == b {
                            t += c1 * c2;
                        }
                    }
                }
            }
            killing[i][j] = t;
            killing[j][i] = t;
        }
    }
    let killing_det = det_bigint(&killing);
    let g = gcd_all(killing.iter().flatten().copied()).max(1);
    let primitive: Vec<Vec<i64>> = killing.iter().map(|r| r.iter().map(|x| x / g).collect()).collect();
    let bad_primes = prime_factors(&killing_det);
    let bad_primes_primitive = prime_factors(&det_bigint(&primitive));

    let info = real
        .roots
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let root_type = if real.cartan.contains(&k) || (ty == AlgebraType::Mat && r.iter().all(|&x| x == 0)) {
                RootType::Cartan
            } else {
                classify_root(ty, r)
            };
            let height = if root_type == RootType::Cartan {
                0
            } else if ty == AlgebraType::Mat {
                let (i, j) = real.positions[k];
                j as i64 - i as i64
            } else {
                let simple = simple_roots(ty, rank);
                let q = |x: i64| BigRational::from_integer(BigInt::from(x));
                let a: Vec<Vec<BigRational>> = (0..simple[0].len()).map(|c| simple.iter().map(|s| q(s[c])).collect()).collect();
                let b: Vec<BigRational> = r.iter().map(|&x| q(x)).collect();
                solve_rational(&a, &b).unwrap().iter().map(|x| x.to_integer().to_i64().unwrap()).sum()
            };
            RootInfo { root_type, height }
        })
        .collect();

    let alg = ChevalleyAlgebra {
        ty,
        rank,
        dim,
        n,
        labels: real.labels,
        mats: real.basis,
        roots: real.roots,
        info,
        positions: real.positions,
        structure,
        killing,
        killing_det,
        killing_gcd: g,
        bad_primes,
        bad_primes_primitive,
    };
    if dim <= 200 && !alg.check_jacobi() {
        return Err(Error::Invalid(format!("Jacobi identity fails for {}", alg.name())));
    }
    Ok(alg)
}

// ---------------------------------------------------------------------------
// SL_n over a finite ring

/// |SL_n(R)| for a finite local ring R with residue field of size q and
/// |R| = q^k: q^{(k-1)(n²-1)} · |SL_n(F_q)|.
pub fn sl_order(n: usize, ring: &Ring) -> u128 {
    let q = ring.residue_size() as u128;
    let mut size = q.pow((n * (n - 1) / 2) as u32);
    for i in 2..=n {
        size *= q.pow(i as u32) - 1;
    }
    let mut lift = 1u128;
    let mut r = ring.size() as u128;
    while r > q {
        r /= q;
        lift *= q.pow((n * n - 1) as u32);
    }
    size * lift
}

/// SL_n(R): arithmetic without enumeration.
#[derive(Debug, Clone)]
pub struct SlGroup {
    pub n: usize,
    pub ring: Ring,
}

pub fn group_make(n: usize, ring: &Ring) -> Result<SlGroup> {
    if n < 2 {
        return Err(Error::Invalid(format!("SL_n needs n >= 2, got {n}")));
    }
    Ok(SlGroup { n, ring: ring.clone() })
}

impl SlGroup {
    pub fn literal(&self) -> String {
        format!("sl:{}", self.n)
    }

    pub fn order(&self) -> u128 {
        sl_order(self.n, &self.ring)
    }

    pub fn identity(&self) -> Mat {
        Mat::identity(&self.ring, self.n)
    }

    pub fn is_member(&self, g: &Mat) -> bool {
        g.n == self.n && g.det(&self.ring) == self.ring.one()
    }

    pub fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        a.mul(&self.ring, b)
    }

    /// Inverse as the adjugate; refuses non-unimodular input.
    pub fn inverse(&self, g: &Mat) -> Result<Mat> {
        if !self.is_member(g) {
            return Err(Error::Invalid("matrix does not have determinant 1".into()));
        }
        Ok(g.adjugate(&self.ring))
    }

    /// All elements in lexicographic order of their row-major codes.
    pub fn enumerate(&self, budget: u64) -> Result<FiniteGroup> {
        let n = self.n;
        let ring = &self.ring;
        let size = ring.size();
        let nn = n * n;
        check_budget((size as u128).pow(nn as u32 - 1), budget)?;
        check_budget(self.order(), budget)?;
        let mut elements = vec![];
        let mut data = vec![0u64; nn];
        let one = ring.one();
        loop {
            // solve for the last entry: det = d * M + rest
            data[nn - 1] = 0;
            let m0 = Mat { n, data: data.clone() };
            let rest = m0.det(ring);
            let cof = if n == 1 {
                one
            } else {
                let mut minor = Vec::with_capacity((n - 1) * (n - 1));
                for i in 0..n - 1 {
                    minor.extend_from_slice(&data[i * n..i * n + n - 1]);
                }
                Mat { n: n - 1, data: minor }.det(ring)
            };
            let need = ring.sub(one, rest);
            if ring.is_unit(cof) {
                let d = ring.mul(need, ring.unit_inverse(cof)?);
                let mut g = data.clone();
                g[nn - 1] = d;
                elements.push(Mat { n, data: g });
            } else {
                for d in 0..size {
                    if ring.mul(d, cof) == need {
                        let mut g = data.clone();
                        g[nn - 1] = d;
                        elements.push(Mat { n, data: g });
                    }
                }
            }
            // odometer over the first nn-1 entries, last position fastest
            let mut pos = nn - 1;
            loop {
                if pos == 0 {
                    debug_assert_eq!(elements.len() as u128, self.order());
                    return Ok(FiniteGroup::new(self.clone(), elements));
                }
                pos -= 1;
                data[pos] += 1;
                if data[pos] < size {
                    break;
                }
                data[pos] = 0;
            }
        }
    }
}

const TABLE_LIMIT: usize = 1500;

/// An enumerated SL_n(R) with elements addressed by their index.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    pub group: SlGroup,
    pub elements: Vec<Mat>,
    index: HashMap<u128, u32>,
    table: Option<Vec<u32>>,
    inverses: Vec<u32>,
    pub identity: u32,
}

impl FiniteGroup {
    fn new(group: SlGroup, elements: Vec<Mat>) -> FiniteGroup {
        let base = group.ring.size() as u128;
        let pack = |m: &Mat| m.data.iter().rev().fold(0u128, |acc, &c| acc * base + c as u128);
        let index: HashMap<u128, u32> = elements.iter().enumerate().map(|(i, m)| (pack(m), i as u32)).collect();
        let mut fg = FiniteGroup { group, elements, index, table: None, inverses: vec![], identity: 0 };
        fg.identity = fg.index_of(&fg.group.identity()).expect("identity");
        fg.inverses =
            (0..fg.elements.len()).map(|i| fg.index_of(&fg.elements[i].adjugate(&fg.group.ring)).expect("closed under inverse")).collect();
        let size = fg.elements.len();
        if size <= TABLE_LIMIT {
            let mut t = Vec::with_capacity(size * size);
            for a in 0..size {
                for b in 0..size {
                    t.push(fg.mul_slow(a as u32, b as u32));
                }
            }
            fg.table = Some(t);
        }
        fg
    }

    fn pack(&self, m: &Mat) -> u128 {
        let base = self.group.ring.size() as u128;
        m.data.iter().rev().fold(0u128, |acc, &c| acc * base + c as u128)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, m: &Mat) -> Option<u32> {
        self.index.get(&self.pack(m)).copied()
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let m = self.elements[a as usize].mul(&self.group.ring, &self.elements[b as usize]);
        self.index_of(&m).expect("closed under multiplication")
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.elements.len() + b as usize],
            None => self.mul_slow(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }
}

/// Fraction of SL_2n(F_p) reached by alternating products
/// U+ U- U+ ... of `steps` block-unipotent factors, as (reached, order).
pub fn unipotent_cover_fraction(n: usize, p: u64, steps: usize, budget: u64) -> Result<(u128, u128)> {
    let ring = Ring::parse(&format!("fp:{p}"), None)?;
    let m = 2 * n;
    let order = sl_order(m, &ring);
    check_budget(order, budget)?;
    let blocks: Vec<Vec<u64>> = {
        let count = (p as u128).pow((n * n) as u32);
        check_budget(count, budget)?;
        (0..count as u64)
            .map(|mut c| {
                (0..n * n)
                    .map(|_| {
                        let d = c % p;
                        c /= p;
                        d
                    })
                    .collect()
            })
            .collect()
    };
    let unipotent = |a: &[u64], upper: bool| -> Mat {
        let mut g = Mat::identity(&ring, m);
        for i in 0..n {
            for j in 0..n {
                let (r, c) = if upper { (i, n + j) } else { (n + i, j) };
                g.data[r * m + c] = a[i * n + j];
            }
        }
        g
    };
    let ups: Vec<Mat> = blocks.iter().map(|a| unipotent(a, true)).collect();
    let downs: Vec<Mat> = blocks.iter().map(|a| unipotent(a, false)).collect();
    let mut current: HashSet<Mat> = ups.iter().cloned().collect();
    for step in 1..steps {
        if current.len() as u128 == order {
            break;
        }
        let factors = if step % 2 == 0 { &ups } else { &downs };
        let mut next = HashSet::with_capacity(current.len() * 2);
        for g in &current {
            for u in factors {
                next.insert(g.mul(&ring, u));
            }
        }
        current = next;
    }
    Ok((current.len() as u128, order))
}
