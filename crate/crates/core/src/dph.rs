//! d-polyhypergraphs attached to homogeneous Lie words: construction from
//! a Chevalley basis, elimination, coloring and the induced maps.

use crate::chevalley::{ChevalleyAlgebra, RootInfo};
use crate::error::{Error, Result};
use crate::polymap::{Poly, PolyMap};
use crate::words::{left_normalize, LieWord};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde_json::json;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// A typed hyperedge: a multiset of vertices (sorted), a type and the
/// multilinear form in the variables v_{i,s} at index (s-1)·|I| + i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub vertices: Vec<usize>,
    pub ty: usize,
    pub form: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyHypergraph {
    pub d: usize,
    /// Copies of V per vertex in a single assignment (the word's arity).
    pub r: usize,
    pub labels: Vec<String>,
    pub info: Vec<RootInfo>,
    pub positions: Vec<(usize, usize)>,
    /// The type set J, a subset of the vertex indices (dual basis).
    pub types: Vec<usize>,
    /// Sorted by (type, vertices).
    pub edges: Vec<Edge>,
}

/// Coloring function ω: I → Z^M, stored per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub m: usize,
    pub omega: Vec<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct ColoringResult {
    pub admissible: bool,
    /// First type with no color giving a strict minimum on all its edges.
    pub witness: Option<usize>,
    pub parts: Vec<PolyHypergraph>,
}

type BracketTable = Vec<(Vec<usize>, Vec<(usize, i64)>)>;

/// Nonzero left-normed brackets [e_{i1}, ..., e_{id}] of basis elements.
fn bracket_table(alg: &ChevalleyAlgebra, d: usize) -> Arc<BracketTable> {
    static CACHE: OnceLock<Mutex<HashMap<(String, usize), Arc<BracketTable>>>> = OnceLock::new();
    let key = (alg.literal(), d);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return t.clone();
    }
    let mut out = vec![];
    let mut stack: Vec<(Vec<usize>, BTreeMap<usize, i64>)> = (0..alg.dim).rev().map(|i| (vec![i], BTreeMap::from([(i, 1)]))).collect();
    while let Some((tuple, vec)) = stack.pop() {
        if tuple.len() == d {
            out.push((tuple, vec.into_iter().collect()));
            continue;
        }
        for j in (0..alg.dim).rev() {
            let mut next = BTreeMap::new();
            for (&i, &c) in &vec {
                for &(l, k) in &alg.structure[i][j] {
                    *next.entry(l).or_insert(0) += c * k;
                }
            }
            next.retain(|_, c| *c != 0);
            if !next.is_empty() {
                let mut t = tuple.clone();
                t.push(j);
                stack.push((t, next));
            }
        }
    }
    let t = Arc::new(out);
    cache.lock().unwrap().insert(key, t.clone());
    t
}

/// Γ_{g,w}: vertices and types are the Chevalley basis; each form collects
/// the ordered refinements of its multiset.
pub fn dph_build(alg: &ChevalleyAlgebra, w: &LieWord) -> Result<PolyHypergraph> {
    if w.is_zero() {
        return Err(Error::EmptyWord);
    }
    if !w.is_homogeneous() {
        return Err(Error::Invalid(format!("{w} is not homogeneous")));
    }
    let d = w.degree();
    let dim = alg.dim;
    let ln = left_normalize(w);
    let den = ln.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let seqs: Vec<(Vec<usize>, i128)> = ln
        .terms
        .iter()
        .map(|(t, c)| {
            let scaled = (c * BigRational::from_integer(den.clone())).to_integer();
            (t.leaves(), scaled.to_i128().expect("coefficient fits"))
        })
        .collect();
    let table = bracket_table(alg, d);
    let mut by_type: Vec<Vec<(&Vec<usize>, i64)>> = vec![vec![]; dim];
    for (tuple, vals) in table.iter() {
        for &(l, c) in vals {
            by_type[l].push((tuple, c));
        }
    }
    let den = den.to_i128().expect("denominator fits");
    let per_type: Vec<Result<Vec<Edge>>> = by_type
        .par_iter()
        .enumerate()
        .map(|(l, entries)| {
            let mut forms: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
            for &(tuple, c) in entries {
                let mut ms = tuple.clone();
                ms.sort_unstable();
                let form = forms.entry(ms).or_default();
                for (seq, cs) in &seqs {
                    let mono = Poly::constant(cs * c as i128);
                    let term = seq.iter().zip(tuple).fold(mono, |acc, (&s, &i)| acc.mul(&Poly::var(((s - 1) * dim + i) as u32)));
                    *form = form.add(&term);
                }
            }
            let mut edges = vec![];
            for (vertices, form) in forms {
                if form.is_zero() {
                    continue;
                }
                let mut exact = Poly::zero();
                for (m, c) in form.terms {
                    if c % den != 0 {
                        return Err(Error::NonIntegral(w.to_string()));
                    }
                    exact.add_term(m, c / den);
                }
                edges.push(Edge { vertices, ty: l, form: exact });
            }
            Ok(edges)
        })
        .collect();
    let mut edges = vec![];
    for e in per_type {
        edges.extend(e?);
    }
    if edges.is_empty() {
        return Err(Error::ZeroWordMap(alg.name()));
    }
    Ok(PolyHypergraph {
        d,
        r: w.arity,
        labels: alg.labels.clone(),
        info: alg.info.clone(),
        positions: alg.positions.clone(),
        types: (0..dim).collect(),
        edges,
    })
}

impl PolyHypergraph {
    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn edges_of(&self, ty: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.ty == ty)
    }

    /// Types of J carrying no edge; nonempty means a non-generating map.
    pub fn missing_types(&self) -> Vec<usize> {
        self.types.iter().copied().filter(|&l| self.edges_of(l).next().is_none()).collect()
    }

    /// Edges (as indices into `edges`) whose integral form is ≡ 0 mod p.
    /// They are edges over Z but not over F_p.
    pub fn edges_vanishing_mod(&self, p: u64) -> Vec<usize> {
        let p = p as i128;
        (0..self.edges.len()).filter(|&i| self.edges[i].form.terms.values().all(|c| c % p == 0)).collect()
    }

    /// Types left without edges once the forms are reduced mod p.
    pub fn missing_types_mod(&self, p: u64) -> Vec<usize> {
        let dead = self.edges_vanishing_mod(p);
        let alive = |l: usize| (0..self.edges.len()).any(|i| self.edges[i].ty == l && dead.binary_search(&i).is_err());
        self.types.iter().copied().filter(|&l| !alive(l)).collect()
    }

    fn with_edges(&self, types: Vec<usize>, edges: Vec<Edge>) -> PolyHypergraph {
        PolyHypergraph { types, edges, ..self.clone() }
    }

    fn vertex_weight(vertices: &[usize], omega: impl Fn(usize) -> i64) -> i64 {
        vertices.iter().map(|&i| omega(i)).sum()
    }

    /// Φ_Γ on `t` copies of V^r per vertex. Variable (k, s, i) sits at
    /// ((k-1)·r + s - 1)·|I| + i, matching the word map of w^{*t}.
    pub fn induced_polymap(&self, t: usize) -> PolyMap {
        assert!(t >= 1);
        let dim = self.n_vertices();
        let shift = (self.r * dim) as u32;
        let coords = self
            .types
            .iter()
            .map(|&l| {
                let mut out = Poly::zero();
                for e in self.edges_of(l) {
                    for k in 0..t as u32 {
                        for (m, &c) in &e.form.terms {
                            out.add_term(m.iter().map(|&(v, x)| (v + k * shift, x)).collect(), c);
                        }
                    }
                }
                out
            })
            .collect();
        let vars = (1..=t * self.r).flat_map(|g| self.labels.iter().map(move |lab| format!("X{g}.{lab}"))).collect();
        PolyMap::new(vars, coords)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dim = self.n_vertices();
        let vertices: Vec<_> = (0..dim)
            .map(|i| {
                json!({
                    "label": self.labels[i],
                    "root_type": self.info[i].root_type.to_string(),
                    "height": self.info[i].height,
                    "position": [self.positions[i].0, self.positions[i].1],
                })
            })
            .collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let form: Vec<_> = e
                    .form
                    .terms
                    .iter()
                    .map(|(m, &c)| {
                        let mono: Vec<_> =
                            m.iter().map(|&(v, x)| json!([self.labels[v as usize % dim], v as usize / dim + 1, x])).collect();
                        json!({"monomial": mono, "coef": c})
                    })
                    .collect();
                json!({
                    "vertices": e.vertices.iter().map(|&i| &self.labels[i]).collect::<Vec<_>>(),
                    "type": self.labels[e.ty],
                    "form": form,
                })
            })
            .collect();
        json!({
            "d": self.d,
            "r": self.r,
            "vertices": vertices,
            "types": self.types.iter().map(|&l| &self.labels[l]).collect::<Vec<_>>(),
            "edges": edges,
        })
    }
}

/// gr_ω Γ: per type, the edges of minimal ω-weight.
pub fn dph_eliminate(g: &PolyHypergraph, omega: &[i64]) -> Result<PolyHypergraph> {
    let mut edges = vec![];
    for &l in &g.types {
        let min = g.edges_of(l).map(|e| PolyHypergraph::vertex_weight(&e.vertices, |i| omega[i])).min();
        let Some(min) = min else {
            return Err(Error::EmptyType(g.labels[l].clone()));
        };
        edges.extend(g.edges_of(l).filter(|e| PolyHypergraph::vertex_weight(&e.vertices, |i| omega[i]) == min).cloned());
    }
    Ok(g.with_edges(g.types.clone(), edges))
}

/// gr_{ω,m} Γ for every color, with the admissibility verdict.
pub fn dph_color(g: &PolyHypergraph, col: &Coloring) -> ColoringResult {
    let tilde = |e: &Edge| -> Vec<i64> { (0..col.m).map(|m| PolyHypergraph::vertex_weight(&e.vertices, |i| col.omega[i][m])).collect() };
    let unique_min = |v: &[i64]| -> Option<usize> {
        let min = *v.iter().min()?;
        let mut it = v.iter().enumerate().filter(|(_, &x)| x == min);
        let first = it.next()?.0;
        it.next().is_none().then_some(first)
    };
    let mut witness = None;
    for &l in &g.types {
        let ok = (0..col.m).any(|m| g.edges_of(l).all(|e| unique_min(&tilde(e)) == Some(m)));
        if !ok {
            witness = Some(l);
            break;
        }
    }
    let parts = (0..col.m)
        .map(|m| {
            let edges: Vec<Edge> = g
                .edges
                .iter()
                .filter(|e| {
                    let t = tilde(e);
                    t.iter().all(|&x| t[m] <= x)
                })
                .cloned()
                .collect();
            let types: Vec<usize> = g.types.iter().copied().filter(|&l| edges.iter().any(|e| e.ty == l)).collect();
            g.with_edges(types, edges)
        })
        .collect();
    ColoringResult { admissible: witness.is_none(), witness, parts }
}

/// ν_0(e_α) = (-2d·ht α, -1, 2d·ht α). The middle entry is -1 so that
/// Cartan types, where the outer entries tie at 0, still have a strict
/// minimum.
pub fn nu0_coloring(g: &PolyHypergraph) -> Coloring {
    let d = g.d as i64;
    Coloring { m: 3, omega: g.info.iter().map(|inf| vec![-2 * d * inf.height, -1, 2 * d * inf.height]).collect() }
}

/// (Γ_+, Γ_0, Γ_-): the parts of the ν_0 coloring.
pub fn dph_nu0_split(g: &PolyHypergraph) -> Result<(PolyHypergraph, PolyHypergraph, PolyHypergraph)> {
    let res = dph_color(g, &nu0_coloring(g));
    if let Some(l) = res.witness {
        return Err(Error::Invalid(format!("nu_0 is not admissible at type {}", g.labels[l])));
    }
    let mut it = res.parts.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap(), it.next().unwrap()))
}

/// ω_av(e_α) = (d+1)^{|ht α|}.
pub fn omega_av(g: &PolyHypergraph) -> Vec<i64> {
    g.info.iter().map(|inf| (g.d as i64 + 1).pow(inf.height.unsigned_abs() as u32)).collect()
}

/// ω_mon(e) = (d+1)^{ord}, ord = (i-1)n + j from the matrix position.
pub fn omega_mon(g: &PolyHypergraph, n: usize) -> Vec<i64> {
    g.positions.iter().map(|&(i, j)| (g.d as i64 + 1).pow(((i - 1) * n + j) as u32)).collect()
}

/// A vertex weight lifted to the coordinates of the t-fold induced map.
pub fn lift_weight(omega: &[i64], r: usize, t: usize) -> Vec<i64> {
    (0..r * t).flat_map(|_| omega.iter().copied()).collect()
}

/// The weight ω'(i, m) = ω(i)_m on the M-fold induced map, copy m using
/// color m.
pub fn lift_coloring(col: &Coloring, r: usize) -> Vec<i64> {
    (0..col.m).flat_map(|m| (0..r).flat_map(move |_| col.omega.iter().map(move |w| w[m]))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymap::{lie_word_polymap, weight_symbol};
    use crate::ring::Ring;
    use crate::words::{convolution_power, parse_lie, Word};

    fn alg(lit: &str) -> ChevalleyAlgebra {
        ChevalleyAlgebra::parse(lit).unwrap()
    }

    fn build(lit: &str, w: &str) -> PolyHypergraph {
        dph_build(&alg(lit), &parse_lie(w).unwrap()).unwrap()
    }

    #[test]
    fn sl2_commutator_edge() {
        let g = build("A:1", "[x1,x2]");
        let (e, h, f) = (0usize, 1usize, 2usize);
        let edge = g.edges.iter().find(|x| x.vertices == vec![e, f] && x.ty == h).unwrap();
        // v_{e,1} v_{f,2} - v_{f,1} v_{e,2}
        assert_eq!(edge.form.terms.get(&vec![(e as u32, 1), (3 + f as u32, 1)]), Some(&1));
        assert_eq!(edge.form.terms.get(&vec![(f as u32, 1), (3 + e as u32, 1)]), Some(&-1));
        assert!(g.missing_types().is_empty());
        let js = g.to_json();
        assert_eq!(js["edges"].as_array().unwrap().len(), g.edges.len());
    }

    #[test]
    fn form_on_one_two_two() {
        // τ_{{1,2,2},l} = (v_{1,1} v_{2,2}^2 - v_{2,1} v_{1,2} v_{2,2}) ê_l([e1,e2,e2])
        // with e1 = h, e2 = e on sl_2: [h,e,e] = [2e,e] = 0; use e1 = f, e2 = e:
        // [[f,e],e] = [-h,e] = -2e
        let g = build("A:1", "[[x1,x2],x2]");
        let (e, f) = (0u32, 2u32);
        let edge = g.edges.iter().find(|x| x.vertices == vec![0, 0, 2] && x.ty == 0).unwrap();
        let mut expect = Poly::zero();
        // v_{f,1} v_{e,2}^2 - v_{e,1} v_{f,2} v_{e,2}, times -2
        expect.add_term(vec![(f, 1), (3 + e, 2)], -2);
        expect.add_term(vec![(e, 1), (3 + e, 1), (3 + f, 1)], 2);
        assert_eq!(edge.form, expect);
    }

    #[test]
    fn edges_cancelling_mod_p() {
        let g = build("A:1", "[[x1,x2],x2]");
        let dead = g.edges_vanishing_mod(2);
        assert!(!dead.is_empty());
        assert!(dead.iter().all(|&i| g.edges[i].form.terms.values().all(|c| c % 2 == 0)));
        assert!(g.edges_vanishing_mod(3).is_empty());
        assert!(g.missing_types_mod(3).is_empty());
        // [h,e] = 2e: the h-e edges die mod 2 and only type h keeps an edge,
        // as [sl_2, sl_2] is spanned by h in characteristic 2
        let comm = build("A:1", "[x1,x2]");
        let dead = comm.edges_vanishing_mod(2);
        assert_eq!(dead.len(), 2);
        assert!(dead.iter().all(|&i| comm.edges[i].vertices.contains(&1)));
        assert_eq!(comm.missing_types_mod(2), vec![0, 2]);
    }

    #[test]
    fn zero_word_is_reported() {
        let ex = parse_lie("[[[[x3,x2],x2],x1],x2] - [[[[x3,x2],x1],x2],x2]").unwrap();
        assert!(matches!(dph_build(&alg("A:1"), &ex), Err(Error::ZeroWordMap(_))));
        assert!(dph_build(&alg("A:2"), &ex).is_ok());
    }

    #[test]
    fn induced_map_equals_word_map() {
        for lit in ["A:1", "A:2", "C:2"] {
            let a = alg(lit);
            for w in ["[x1,x2]", "[[x1,x2],x2]"] {
                let w = parse_lie(w).unwrap();
                let g = dph_build(&a, &w).unwrap();
                for t in 1..=2 {
                    let Word::Lie(wt) = convolution_power(&Word::Lie(w.clone()), t).unwrap() else { unreachable!() };
                    let direct = lie_word_polymap(&wt, &a).unwrap();
                    assert_eq!(g.induced_polymap(t).coords, direct.coords, "{lit} {w} t={t}");
                }
            }
        }
    }

    #[test]
    fn elimination_is_weight_symbol() {
        for lit in ["A:1", "A:2", "C:2"] {
            for w in ["[x1,x2]", "[[x1,x2],x2]"] {
                let g = build(lit, w);
                for omega in [omega_av(&g), omega_mon(&g, alg(lit).n), vec![1; g.n_vertices()]] {
                    let e = dph_eliminate(&g, &omega).unwrap();
                    for t in 1..=2 {
                        let lifted = lift_weight(&omega, g.r, t);
                        assert_eq!(e.induced_polymap(t), weight_symbol(&g.induced_polymap(t), &lifted));
                    }
                    assert_eq!(dph_eliminate(&e, &omega).unwrap(), e);
                }
                let constant = dph_eliminate(&g, &vec![7; g.n_vertices()]).unwrap();
                assert_eq!(constant, g);
            }
        }
    }

    #[test]
    fn averaging_keeps_balanced_edges() {
        let g = build("A:2", "[x1,x2]");
        let (plus, _, _) = dph_nu0_split(&g).unwrap();
        let av = dph_eliminate(&plus, &omega_av(&g)).unwrap();
        let e13 = g.labels.iter().position(|l| l == "e[+1-3]").unwrap();
        let e12 = g.labels.iter().position(|l| l == "e[+1-2]").unwrap();
        let e23 = g.labels.iter().position(|l| l == "e[+2-3]").unwrap();
        let kept: Vec<_> = av.edges_of(e13).map(|e| e.vertices.clone()).collect();
        let mut expect = vec![e12, e23];
        expect.sort();
        assert_eq!(kept, vec![expect]);
        // before averaging, e13 also pairs with Cartan vertices
        assert!(plus.edges_of(e13).count() > 1);
    }

    #[test]
    fn monomialization_leaves_one_edge() {
        for (lit, n) in [("A:2", 3), ("A:3", 4)] {
            for w in ["[x1,x2]", "[[x1,x2],x2]"] {
                let g = build(lit, w);
                let (plus, _, minus) = dph_nu0_split(&g).unwrap();
                for part in [plus, minus] {
                    let g1 = dph_eliminate(&part, &omega_av(&g)).unwrap();
                    let g2 = dph_eliminate(&g1, &omega_mon(&g, n)).unwrap();
                    for &l in &g2.types {
                        assert_eq!(g2.edges_of(l).count(), 1, "{lit} {w} {}", g.labels[l]);
                    }
                }
            }
        }
    }

    #[test]
    fn nu0_split_partitions() {
        let g = build("A:1", "[x1,x2]");
        let (p, z, m) = dph_nu0_split(&g).unwrap();
        assert_eq!((p.types.clone(), z.types.clone(), m.types.clone()), (vec![0], vec![1], vec![2]));
        for lit in ["A:2", "B:2", "C:2", "D:3", "mat:2"] {
            for w in ["[x1,x2]", "[[x1,x2],x2]"] {
                let g = build(lit, w);
                let (p, z, m) = dph_nu0_split(&g).unwrap();
                assert_eq!(p.edges.len() + z.edges.len() + m.edges.len(), g.edges.len());
                assert!(p.types.iter().all(|&l| g.info[l].height > 0));
                assert!(m.types.iter().all(|&l| g.info[l].height < 0));
                assert!(z.types.iter().all(|&l| g.info[l].height == 0));
                // the (★) computation: ν̃_0 is determined by the type
                let col = nu0_coloring(&g);
                let d = g.d as i64;
                for e in &g.edges {
                    let h = g.info[e.ty].height;
                    let tilde: Vec<i64> = (0..3).map(|c| e.vertices.iter().map(|&i| col.omega[i][c]).sum()).collect();
                    assert_eq!(tilde, vec![-2 * d * h, -d, 2 * d * h]);
                }
            }
        }
        let (_, z, _) = dph_nu0_split(&build("B:2", "[x1,x2]")).unwrap();
        assert_eq!(z.types.len(), 2);
    }

    #[test]
    fn colorings() {
        let g = build("A:1", "[x1,x2]");
        let trivial = dph_color(&g, &Coloring { m: 1, omega: vec![vec![0]; 3] });
        assert!(trivial.admissible);
        assert_eq!(trivial.parts[0], g);
        let tie = dph_color(&g, &Coloring { m: 2, omega: vec![vec![1, 1]; 3] });
        assert!(!tie.admissible);
        assert_eq!(tie.witness, Some(0));
        // the literal (2d(i-j), 1, 2d(j-i)) ties on Cartan types
        let literal = Coloring { m: 3, omega: g.info.iter().map(|i| vec![-4 * i.height, 1, 4 * i.height]).collect() };
        let res = dph_color(&g, &literal);
        assert!(!res.admissible);
        assert_eq!(res.witness, Some(1));
    }

    /// Fiber over 0 of gr_{ω'}(Γ_M)'s map is the product of the parts'.
    #[test]
    fn coloring_fiber_product() {
        let ring = Ring::parse("fp:2", None).unwrap();
        let g = build("A:1", "[x1,x2]");
        let col = nu0_coloring(&g);
        let res = dph_color(&g, &col);
        assert!(res.admissible);
        let union = weight_symbol(&g.induced_polymap(3), &lift_coloring(&col, g.r));
        let count = |phi: &PolyMap| -> u64 {
            (0..1u64 << phi.n_in)
                .filter(|c| {
                    let x: Vec<u64> = (0..phi.n_in).map(|i| c >> i & 1).collect();
                    phi.eval(&ring, &x).iter().all(|&v| v == 0)
                })
                .count() as u64
        };
        let product: u64 = res.parts.iter().map(|p| count(&p.induced_polymap(1))).product();
        assert_eq!(count(&union), product);
        // and coordinatewise: colour m feeds exactly the types of part m
        for (m, part) in res.parts.iter().enumerate() {
            for &l in &part.types {
                let coord = &union.coords[l];
                assert!(coord.terms.keys().all(|mono| mono.iter().all(|&(v, _)| v as usize / 6 == m)));
            }
        }
    }

    #[test]
    fn empty_type_after_restriction_is_an_error() {
        let g = build("A:1", "[x1,x2]");
        let broken = g.with_edges(g.types.clone(), g.edges.iter().filter(|e| e.ty != 1).cloned().collect());
        assert_eq!(broken.missing_types(), vec![1]);
        assert!(matches!(dph_eliminate(&broken, &[0, 0, 0]), Err(Error::EmptyType(_))));
    }

    #[test]
    fn single_edge_monomial() {
        let g = PolyHypergraph {
            d: 2,
            r: 1,
            labels: vec!["a".into(), "b".into()],
            info: vec![RootInfo { root_type: crate::chevalley::RootType::Cartan, height: 0 }; 2],
            positions: vec![(1, 1), (2, 2)],
            types: vec![0],
            edges: vec![Edge { vertices: vec![0, 1], ty: 0, form: Poly::var(0).mul(&Poly::var(1)) }],
        };
        assert_eq!(g.induced_polymap(1).coords, vec![Poly::var(0).mul(&Poly::var(1))]);
    }
}
