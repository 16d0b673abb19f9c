//! Free group words, free Lie words and free associative words.
//!
//! Generators are 1-based. Jet variables `X_s^{(u)}` of an arity-`r` word
//! are ordinary generators with index `u*r + s`, so derivative words are
//! plain words of arity `r*(m+1)`.

use crate::error::{Error, Result};
use crate::matrix::{rational_in_ring, Mat};
use crate::ring::Ring;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordKind {
    Group,
    Lie,
    Assoc,
}

impl std::str::FromStr for WordKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<WordKind> {
        match s {
            "group" => Ok(WordKind::Group),
            "lie" => Ok(WordKind::Lie),
            "assoc" => Ok(WordKind::Assoc),
            _ => Err(Error::Unknown(format!("word kind '{s}'"))),
        }
    }
}

/// A freely reduced word in the free group on `arity` generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupWord {
    pub arity: usize,
    /// (generator, exponent +1 or -1)
    pub letters: Vec<(usize, i8)>,
}

impl GroupWord {
    pub fn new(arity: usize, letters: Vec<(usize, i8)>) -> GroupWord {
        let mut out: Vec<(usize, i8)> = Vec::with_capacity(letters.len());
        for l in letters {
            if let Some(&last) = out.last() {
                if last.0 == l.0 && last.1 == -l.1 {
                    out.pop();
                    continue;
                }
            }
            out.push(l);
        }
        GroupWord { arity, letters: out }
    }

    /// ℓ(w): the number of letters after free reduction.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { arity: self.arity, letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }

    pub fn product(&self, other: &GroupWord) -> GroupWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        GroupWord::new(self.arity.max(other.arity), letters)
    }

    /// Group commutator `a b a^-1 b^-1`.
    pub fn commutator(a: &GroupWord, b: &GroupWord) -> GroupWord {
        a.product(b).product(&a.inverse()).product(&b.inverse())
    }

    pub fn generator(arity: usize, g: usize) -> GroupWord {
        GroupWord { arity, letters: vec![(g, 1)] }
    }

    fn shifted(&self, by: usize) -> GroupWord {
        GroupWord { arity: self.arity + by, letters: self.letters.iter().map(|&(g, e)| (g + by, e)).collect() }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        // group runs of equal letters into powers
        let mut parts = vec![];
        let mut i = 0;
        while i < self.letters.len() {
            let (g, e) = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == (g, e) {
                j += 1;
            }
            let exp = (j - i) as i64 * e as i64;
            parts.push(if exp == 1 { format!("x{g}") } else { format!("x{g}^{exp}") });
            i = j;
        }
        f.write_str(&parts.join(" "))
    }
}

/// A bracket monomial with generator leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LieTree {
    Gen(usize),
    Br(Box<LieTree>, Box<LieTree>),
}

// Higher degree sorts first, so canonical forms of left-normed monomials
// stay left-normed.
impl Ord for LieTree {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match other.degree().cmp(&self.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (self, other) {
            (LieTree::Gen(a), LieTree::Gen(b)) => a.cmp(b),
            (LieTree::Br(a1, b1), LieTree::Br(a2, b2)) => a1.cmp(a2).then_with(|| b1.cmp(b2)),
            _ => unreachable!("equal degree"),
        }
    }
}

impl PartialOrd for LieTree {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl LieTree {
    pub fn br(a: LieTree, b: LieTree) -> LieTree {
        LieTree::Br(Box::new(a), Box::new(b))
    }

    /// Left-normed monomial `[..[[x_{s1}, x_{s2}], x_{s3}].., x_{sd}]`.
    pub fn left_normed(seq: &[usize]) -> LieTree {
        let mut t = LieTree::Gen(seq[0]);
        for &s in &seq[1..] {
            t = LieTree::br(t, LieTree::Gen(s));
        }
        t
    }

    pub fn degree(&self) -> usize {
        match self {
            LieTree::Gen(_) => 1,
            LieTree::Br(a, b) => a.degree() + b.degree(),
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = vec![];
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            LieTree::Gen(g) => out.push(*g),
            LieTree::Br(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    pub fn max_gen(&self) -> usize {
        self.leaves().into_iter().max().unwrap_or(0)
    }

    /// Replaces leaves, in left-to-right order, by `labels`.
    pub fn relabel(&self, labels: &[usize]) -> LieTree {
        let mut it = labels.iter();
        self.relabel_inner(&mut it)
    }

    fn relabel_inner(&self, it: &mut std::slice::Iter<usize>) -> LieTree {
        match self {
            LieTree::Gen(_) => LieTree::Gen(*it.next().expect("enough labels")),
            LieTree::Br(a, b) => {
                let a = a.relabel_inner(it);
                LieTree::br(a, b.relabel_inner(it))
            }
        }
    }

    /// Canonical representative under antisymmetry: `[a,a] = 0` and
    /// `[a,b] = -[b,a]` with the smaller child first.
    pub fn canonical(&self) -> Option<(i8, LieTree)> {
        match self {
            LieTree::Gen(_) => Some((1, self.clone())),
            LieTree::Br(a, b) => {
                let (sa, a) = a.canonical()?;
                let (sb, b) = b.canonical()?;
                match a.cmp(&b) {
                    std::cmp::Ordering::Equal => None,
                    std::cmp::Ordering::Less => Some((sa * sb, LieTree::br(a, b))),
                    std::cmp::Ordering::Greater => Some((-sa * sb, LieTree::br(b, a))),
                }
            }
        }
    }

    pub fn is_left_normed(&self) -> bool {
        match self {
            LieTree::Gen(_) => true,
            LieTree::Br(a, b) => matches!(**b, LieTree::Gen(_)) && a.is_left_normed(),
        }
    }

    /// Expansion in the free associative algebra.
    pub fn to_assoc(&self) -> BTreeMap<Vec<usize>, i64> {
        match self {
            LieTree::Gen(g) => BTreeMap::from([(vec![*g], 1)]),
            LieTree::Br(a, b) => {
                let ea = a.to_assoc();
                let eb = b.to_assoc();
                let mut out: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
                for (wa, ca) in &ea {
                    for (wb, cb) in &eb {
                        let mut ab = wa.clone();
                        ab.extend_from_slice(wb);
                        *out.entry(ab).or_default() += ca * cb;
                        let mut ba = wb.clone();
                        ba.extend_from_slice(wa);
                        *out.entry(ba).or_default() -= ca * cb;
                    }
                }
                out.retain(|_, c| *c != 0);
                out
            }
        }
    }

    fn shifted(&self, by: usize) -> LieTree {
        match self {
            LieTree::Gen(g) => LieTree::Gen(g + by),
            LieTree::Br(a, b) => LieTree::br(a.shifted(by), b.shifted(by)),
        }
    }
}

impl fmt::Display for LieTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieTree::Gen(g) => write!(f, "X{g}"),
            LieTree::Br(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

fn fmt_terms<K: fmt::Display>(f: &mut fmt::Formatter<'_>, terms: &[(&K, &Q)]) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (i, (m, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        let sign = match (i, neg) {
            (0, false) => "",
            (0, true) => "-",
            (_, false) => " + ",
            (_, true) => " - ",
        };
        if a.is_one() {
            write!(f, "{sign}{m}")?;
        } else {
            write!(f, "{sign}{a} {m}")?;
        }
    }
    Ok(())
}

/// A rational combination of bracket monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LieWord {
    pub arity: usize,
    pub terms: BTreeMap<LieTree, Q>,
}

impl LieWord {
    pub fn zero(arity: usize) -> LieWord {
        LieWord { arity, terms: BTreeMap::new() }
    }

    pub fn from_tree(arity: usize, t: LieTree) -> LieWord {
        let mut w = LieWord::zero(arity);
        w.add_term(q(1), t);
        w
    }

    /// The left-normed monomial on `seq`.
    pub fn left_normed(arity: usize, seq: &[usize]) -> LieWord {
        LieWord::from_tree(arity, LieTree::left_normed(seq))
    }

    pub fn add_term(&mut self, c: Q, t: LieTree) {
        if c.is_zero() {
            return;
        }
        if let Some((s, t)) = t.canonical() {
            let c = if s < 0 { -c } else { c };
            let e = self.terms.entry(t).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                self.terms.retain(|_, v| !v.is_zero());
            }
        }
    }

    pub fn add(&self, other: &LieWord) -> LieWord {
        let mut out = LieWord { arity: self.arity.max(other.arity), terms: self.terms.clone() };
        for (t, c) in &other.terms {
            out.add_term(c.clone(), t.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> LieWord {
        let mut out = LieWord::zero(self.arity);
        for (t, d) in &self.terms {
            out.add_term(c * d, t.clone());
        }
        out
    }

    /// Bracket of two Lie words, expanded bilinearly.
    pub fn bracket(&self, other: &LieWord) -> LieWord {
        let mut out = LieWord::zero(self.arity.max(other.arity));
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(ca * cb, LieTree::br(a.clone(), b.clone()));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximal grade with a nonzero term (0 for the zero word).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|t| t.degree()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut ds = self.terms.keys().map(|t| t.degree());
        match ds.next() {
            None => true,
            Some(d) => ds.all(|e| e == d),
        }
    }

    pub fn homogeneous_parts(&self) -> BTreeMap<usize, LieWord> {
        let mut out: BTreeMap<usize, LieWord> = BTreeMap::new();
        for (t, c) in &self.terms {
            out.entry(t.degree()).or_insert_with(|| LieWord::zero(self.arity)).add_term(c.clone(), t.clone());
        }
        out
    }

    /// Image in the free associative algebra; faithful, so two Lie words are
    /// equal in the free Lie algebra iff their expansions agree.
    pub fn to_assoc(&self) -> AssocWord {
        let mut out = AssocWord::zero(self.arity);
        for (t, c) in &self.terms {
            for (w, k) in t.to_assoc() {
                out.add_term(c * q(k), w);
            }
        }
        out
    }

    pub fn is_left_normed(&self) -> bool {
        self.terms.keys().all(|t| t.is_left_normed())
    }

    fn shifted(&self, by: usize) -> LieWord {
        let mut out = LieWord::zero(self.arity + by);
        for (t, c) in &self.terms {
            out.add_term(c.clone(), t.shifted(by));
        }
        out
    }

    /// Evaluation on a tuple of matrices with bracket `AB - BA`.
    pub fn eval_matrices(&self, ring: &Ring, xs: &[Mat]) -> Result<Mat> {
        let n = xs[0].n;
        let mut acc = Mat::zero(n);
        for (t, c) in &self.terms {
            let v = eval_tree_matrix(t, ring, xs);
            acc = acc.add(ring, &v.scale(ring, rational_in_ring(ring, c)?));
        }
        Ok(acc)
    }
}

fn eval_tree_matrix(t: &LieTree, ring: &Ring, xs: &[Mat]) -> Mat {
    match t {
        LieTree::Gen(g) => xs[g - 1].clone(),
        LieTree::Br(a, b) => {
            let a = eval_tree_matrix(a, ring, xs);
            let b = eval_tree_matrix(b, ring, xs);
            a.commutator(ring, &b)
        }
    }
}

impl fmt::Display for LieWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(t, _)| t.degree());
        fmt_terms(f, &terms)
    }
}

/// A generator string, ordered by length and then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssocMono(pub Vec<usize>);

impl Ord for AssocMono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}
impl PartialOrd for AssocMono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AssocMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|g| format!("X{g}")).collect();
        f.write_str(&s.join(" "))
    }
}

/// A rational combination of nonempty generator strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssocWord {
    pub arity: usize,
    pub terms: BTreeMap<AssocMono, Q>,
}

impl AssocWord {
    pub fn zero(arity: usize) -> AssocWord {
        AssocWord { arity, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, c: Q, w: Vec<usize>) {
        if c.is_zero() || w.is_empty() {
            return;
        }
        let key = AssocMono(w);
        let e = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &AssocWord) -> AssocWord {
        let mut out = AssocWord { arity: self.arity.max(other.arity), terms: self.terms.clone() };
        for (m, c) in &other.terms {
            out.add_term(c.clone(), m.0.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut ds = self.terms.keys().map(|m| m.0.len());
        match ds.next() {
            None => true,
            Some(d) => ds.all(|e| e == d),
        }
    }

    fn shifted(&self, by: usize) -> AssocWord {
        let mut out = AssocWord::zero(self.arity + by);
        for (m, c) in &self.terms {
            out.add_term(c.clone(), m.0.iter().map(|g| g + by).collect());
        }
        out
    }

    pub fn eval_matrices(&self, ring: &Ring, xs: &[Mat]) -> Result<Mat> {
        let n = xs[0].n;
        let mut acc = Mat::zero(n);
        for (m, c) in &self.terms {
            let mut v = xs[m.0[0] - 1].clone();
            for g in &m.0[1..] {
                v = v.mul(ring, &xs[g - 1]);
            }
            acc = acc.add(ring, &v.scale(ring, rational_in_ring(ring, c)?));
        }
        Ok(acc)
    }
}

impl fmt::Display for AssocWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<_> = self.terms.iter().collect();
        fmt_terms(f, &terms)
    }
}

/// Names `X_s^{(u)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVariableIndex {
    pub s: usize,
    pub u: usize,
}

impl JetVariableIndex {
    /// ord(X_s^{(u)}) = u*r + s.
    pub fn ord(&self, r: usize) -> usize {
        self.u * r + self.s
    }

    pub fn from_ord(ord: usize, r: usize) -> JetVariableIndex {
        JetVariableIndex { s: (ord - 1) % r + 1, u: (ord - 1) / r }
    }
}

impl fmt::Display for JetVariableIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.u == 0 {
            write!(f, "X{}", self.s)
        } else {
            write!(f, "X{}^({})", self.s, self.u)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    Group(GroupWord),
    Lie(LieWord),
    Assoc(AssocWord),
}

impl Word {
    pub fn kind(&self) -> WordKind {
        match self {
            Word::Group(_) => WordKind::Group,
            Word::Lie(_) => WordKind::Lie,
            Word::Assoc(_) => WordKind::Assoc,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Word::Group(w) => w.arity,
            Word::Lie(w) => w.arity,
            Word::Assoc(w) => w.arity,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Group(w) => w.fmt(f),
            Word::Lie(w) => w.fmt(f),
            Word::Assoc(w) => w.fmt(f),
        }
    }
}

// ---------------------------------------------------------------------------
// parsing

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    max_gen: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().or_else(|_| self.err("number too large"))
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            if self.peek() == Some(b'+') {
                self.pos += 1;
            }
            false
        };
        let n = self.number()? as i64;
        Ok(if neg { -n } else { n })
    }

    fn generator(&mut self) -> Result<usize> {
        match self.peek() {
            Some(b'x') | Some(b'X') => {
                self.pos += 1;
                let g = self.number()? as usize;
                if g == 0 {
                    return self.err("generators are numbered from 1");
                }
                self.max_gen = self.max_gen.max(g);
                Ok(g)
            }
            _ => self.err("expected a generator xN"),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    // group grammar
    fn group_seq(&mut self) -> Result<GroupWord> {
        let mut w = GroupWord::new(0, vec![]);
        while let Some(c) = self.peek() {
            if c == b',' || c == b']' || c == b')' {
                break;
            }
            let t = self.group_term()?;
            w = w.product(&t);
        }
        Ok(w)
    }

    fn group_term(&mut self) -> Result<GroupWord> {
        let atom = match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let a = self.group_seq()?;
                self.expect(b',')?;
                let b = self.group_seq()?;
                self.expect(b']')?;
                GroupWord::commutator(&a, &b)
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.group_seq()?;
                self.expect(b')')?;
                a
            }
            Some(b'1') => {
                self.pos += 1;
                GroupWord::new(0, vec![])
            }
            _ => {
                let g = self.generator()?;
                GroupWord::generator(g, g)
            }
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.signed_int()?;
            let base = if e < 0 { atom.inverse() } else { atom };
            let mut out = GroupWord::new(0, vec![]);
            for _ in 0..e.unsigned_abs() {
                out = out.product(&base);
            }
            Ok(out)
        } else {
            Ok(atom)
        }
    }

    fn coefficient(&mut self) -> Result<Option<Q>> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                let mut c = q(n as i64);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.number()?;
                    if d == 0 {
                        return self.err("zero denominator");
                    }
                    c /= q(d as i64);
                }
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                }
                Ok(Some(c))
            }
            _ => Ok(None),
        }
    }

    // Lie grammar: signed sums of coef? monomial
    fn lie_sum(&mut self) -> Result<LieWord> {
        let mut acc = LieWord::zero(0);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    q(1)
                }
                Some(b'-') => {
                    self.pos += 1;
                    q(-1)
                }
                _ if first => q(1),
                _ => break,
            };
            first = false;
            let c = self.coefficient()?.unwrap_or_else(|| q(1));
            let m = self.lie_mono()?;
            acc = acc.add(&m.scale(&(sign * c)));
        }
        Ok(acc)
    }

    fn lie_mono(&mut self) -> Result<LieWord> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let a = self.lie_sum()?;
                self.expect(b',')?;
                let b = self.lie_sum()?;
                self.expect(b']')?;
                Ok(a.bracket(&b))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.lie_sum()?;
                self.expect(b')')?;
                Ok(a)
            }
            _ => {
                let g = self.generator()?;
                Ok(LieWord::from_tree(g, LieTree::Gen(g)))
            }
        }
    }

    // associative grammar
    fn assoc_sum(&mut self) -> Result<AssocWord> {
        let mut acc = AssocWord::zero(0);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    q(1)
                }
                Some(b'-') => {
                    self.pos += 1;
                    q(-1)
                }
                _ if first => q(1),
                _ => break,
            };
            first = false;
            let c = self.coefficient()?.unwrap_or_else(|| q(1));
            let mut mono = vec![];
            while matches!(self.peek(), Some(b'x') | Some(b'X')) {
                let g = self.generator()?;
                let e = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let e = self.number()?;
                    if e == 0 {
                        return self.err("exponent must be positive");
                    }
                    e
                } else {
                    1
                };
                for _ in 0..e {
                    mono.push(g);
                }
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                }
            }
            if mono.is_empty() {
                return self.err("expected a monomial");
            }
            acc.add_term(sign * c, mono);
        }
        Ok(acc)
    }
}

/// Parses `text` as a word of the given kind; the arity is the largest
/// generator index unless `arity` is given.
pub fn parse_word_with_arity(text: &str, kind: WordKind, arity: Option<usize>) -> Result<Word> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, max_gen: 0 };
    let w = match kind {
        WordKind::Group => Word::Group(p.group_seq()?),
        WordKind::Lie => Word::Lie(p.lie_sum()?),
        WordKind::Assoc => Word::Assoc(p.assoc_sum()?),
    };
    if !p.at_end() {
        return p.err("unexpected trailing input");
    }
    let r = match arity {
        Some(r) if p.max_gen > r => return Err(Error::Arity { index: p.max_gen, arity: r }),
        Some(r) => r,
        None => p.max_gen,
    };
    Ok(match w {
        Word::Group(g) => Word::Group(GroupWord { arity: r, letters: g.letters }),
        Word::Lie(mut l) => {
            l.arity = r;
            Word::Lie(l)
        }
        Word::Assoc(mut a) => {
            a.arity = r;
            Word::Assoc(a)
        }
    })
}

pub fn parse_word(text: &str, kind: WordKind) -> Result<Word> {
    parse_word_with_arity(text, kind, None)
}

pub fn parse_group(text: &str) -> Result<GroupWord> {
    match parse_word(text, WordKind::Group)? {
        Word::Group(g) => Ok(g),
        _ => unreachable!(),
    }
}

pub fn parse_lie(text: &str) -> Result<LieWord> {
    match parse_word(text, WordKind::Lie)? {
        Word::Lie(g) => Ok(g),
        _ => unreachable!(),
    }
}

pub fn parse_assoc(text: &str) -> Result<AssocWord> {
    match parse_word(text, WordKind::Assoc)? {
        Word::Assoc(g) => Ok(g),
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// operations

/// Convolution on disjoint variables: concatenation for group words, sum
/// for Lie and associative words.
pub fn word_concat(w1: &Word, w2: &Word) -> Result<Word> {
    match (w1, w2) {
        (Word::Group(a), Word::Group(b)) => {
            let b = b.shifted(a.arity);
            let mut letters = a.letters.clone();
            letters.extend(b.letters);
            Ok(Word::Group(GroupWord::new(a.arity + w2.arity(), letters)))
        }
        (Word::Lie(a), Word::Lie(b)) => {
            let mut s = a.add(&b.shifted(a.arity));
            s.arity = a.arity + b.arity;
            Ok(Word::Lie(s))
        }
        (Word::Assoc(a), Word::Assoc(b)) => {
            let mut s = a.add(&b.shifted(a.arity));
            s.arity = a.arity + b.arity;
            Ok(Word::Assoc(s))
        }
        _ => Err(Error::KindMismatch(format!("{:?} * {:?}", w1.kind(), w2.kind()))),
    }
}

/// The `t`-th convolution power `w * w * ... * w`.
pub fn convolution_power(w: &Word, t: usize) -> Result<Word> {
    assert!(t >= 1);
    let mut out = w.clone();
    for _ in 1..t {
        out = word_concat(&out, w)?;
    }
    Ok(out)
}

type LnCombo = BTreeMap<Vec<usize>, Q>;

fn ln_bracket(left: &LnCombo, right: &LieTree) -> LnCombo {
    match right {
        LieTree::Gen(g) => left
            .iter()
            .map(|(seq, c)| {
                let mut s = seq.clone();
                s.push(*g);
                (s, c.clone())
            })
            .collect(),
        LieTree::Br(c, d) => {
            // [L,[C,D]] = [[L,C],D] - [[L,D],C]
            let lc = ln_bracket(left, c);
            let first = ln_bracket(&lc, d);
            let ld = ln_bracket(left, d);
            let second = ln_bracket(&ld, c);
            let mut out = first;
            for (s, v) in second {
                *out.entry(s).or_insert_with(Q::zero) -= v;
            }
            out.retain(|_, v| !v.is_zero());
            out
        }
    }
}

fn ln_tree(t: &LieTree) -> LnCombo {
    match t {
        LieTree::Gen(g) => BTreeMap::from([(vec![*g], q(1))]),
        LieTree::Br(a, b) => ln_bracket(&ln_tree(a), b),
    }
}

/// Rewrites `w` as a combination of left-normed monomials (Jacobi identity).
pub fn left_normalize(w: &LieWord) -> LieWord {
    let mut out = LieWord::zero(w.arity);
    for (t, c) in &w.terms {
        for (seq, v) in ln_tree(t) {
            out.add_term(c * v, LieTree::left_normed(&seq));
        }
    }
    out
}

/// Splits `w` into factors on pairwise disjoint generator sets, each
/// relabelled to x1..xk, so that `w` is their convolution in order. Also
/// returns how many generators below the arity never occur.
pub fn disjoint_factors(w: &Word) -> (Vec<Word>, usize) {
    fn relabel_map(gens: &BTreeSet<usize>) -> BTreeMap<usize, usize> {
        gens.iter().enumerate().map(|(i, &g)| (g, i + 1)).collect()
    }
    fn components(sets: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
        // union-find over term indices sharing a generator
        let mut parent: Vec<usize> = (0..sets.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, s) in sets.iter().enumerate() {
            for &g in s {
                match owner.get(&g) {
                    Some(&j) => {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                    None => {
                        owner.insert(g, i);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..sets.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|g| sets[g[0]].iter().next().copied());
        out
    }
    let used: BTreeSet<usize> = match w {
        Word::Group(g) => g.letters.iter().map(|&(s, _)| s).collect(),
        Word::Lie(l) => l.terms.keys().flat_map(|t| t.leaves()).collect(),
        Word::Assoc(a) => a.terms.keys().flat_map(|m| m.0.iter().copied()).collect(),
    };
    let unused = w.arity() - used.len();
    let parts = match w {
        Word::Group(g) => {
            let mut parts = vec![];
            let mut start = 0;
            for cut in 1..=g.letters.len() {
                let left: BTreeSet<usize> = g.letters[start..cut].iter().map(|&(s, _)| s).collect();
                let right: BTreeSet<usize> = g.letters[cut..].iter().map(|&(s, _)| s).collect();
                if left.is_disjoint(&right) {
                    let map = relabel_map(&left);
                    let letters = g.letters[start..cut].iter().map(|&(s, e)| (map[&s], e)).collect();
                    parts.push(Word::Group(GroupWord::new(map.len(), letters)));
                    start = cut;
                }
            }
            parts
        }
        Word::Lie(l) => {
            let terms: Vec<(&LieTree, &Q)> = l.terms.iter().collect();
            let sets: Vec<BTreeSet<usize>> = terms.iter().map(|(t, _)| t.leaves().into_iter().collect()).collect();
            components(&sets)
                .into_iter()
                .map(|idx| {
                    let gens: BTreeSet<usize> = idx.iter().flat_map(|&i| sets[i].iter().copied()).collect();
                    let map = relabel_map(&gens);
                    let mut part = LieWord::zero(map.len());
                    for i in idx {
                        let labels: Vec<usize> = terms[i].0.leaves().iter().map(|g| map[g]).collect();
                        part.add_term(terms[i].1.clone(), terms[i].0.relabel(&labels));
                    }
                    Word::Lie(part)
                })
                .collect()
        }
        Word::Assoc(a) => {
            let terms: Vec<(&AssocMono, &Q)> = a.terms.iter().collect();
            let sets: Vec<BTreeSet<usize>> = terms.iter().map(|(m, _)| m.0.iter().copied().collect()).collect();
            components(&sets)
                .into_iter()
                .map(|idx| {
                    let gens: BTreeSet<usize> = idx.iter().flat_map(|&i| sets[i].iter().copied()).collect();
                    let map = relabel_map(&gens);
                    let mut part = AssocWord::zero(map.len());
                    for i in idx {
                        part.add_term(terms[i].1.clone(), terms[i].0 .0.iter().map(|g| map[g]).collect());
                    }
                    Word::Assoc(part)
                })
                .collect()
        }
    };
    (parts, unused)
}

/// Pure summands keyed by the sorted multiset of generators.
pub fn pure_type_decompose(w: &LieWord) -> Vec<(Vec<usize>, LieWord)> {
    let mut parts: BTreeMap<Vec<usize>, LieWord> = BTreeMap::new();
    for (t, c) in &w.terms {
        let mut key = t.leaves();
        key.sort_unstable();
        parts.entry(key).or_insert_with(|| LieWord::zero(w.arity)).add_term(c.clone(), t.clone());
    }
    parts.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

pub fn pure_type_decompose_assoc(w: &AssocWord) -> Vec<(Vec<usize>, AssocWord)> {
    let mut parts: BTreeMap<Vec<usize>, AssocWord> = BTreeMap::new();
    for (m, c) in &w.terms {
        let mut key = m.0.clone();
        key.sort_unstable();
        parts.entry(key).or_insert_with(|| AssocWord::zero(w.arity)).add_term(c.clone(), m.0.clone());
    }
    parts.into_iter().collect()
}

// truncated free associative algebra
type Series = HashMap<Vec<usize>, Q>;

fn series_mul(a: &Series, b: &Series, max_deg: usize) -> Series {
    let mut out: Series = HashMap::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > max_deg {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            *out.entry(w).or_insert_with(Q::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn exp_letter(g: usize, e: i8, max_deg: usize) -> Series {
    let mut s: Series = HashMap::new();
    let mut coef = q(1);
    for n in 0..=max_deg {
        s.insert(vec![g; n], coef.clone());
        coef = coef * q(e as i64) / q(n as i64 + 1);
    }
    s
}

fn log_one_plus(y: &Series, max_deg: usize) -> Series {
    let mut out: Series = HashMap::new();
    let mut pow = y.clone();
    for n in 1..=max_deg {
        let c = q(if n % 2 == 1 { 1 } else { -1 }) / q(n as i64);
        for (w, v) in &pow {
            *out.entry(w.clone()).or_insert_with(Q::zero) += v * &c;
        }
        pow = series_mul(&pow, y, max_deg);
        if pow.is_empty() {
            break;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Dynkin-Specht-Wever projection of a homogeneous primitive element of
/// degree `d`; errors if the input is not a Lie element.
pub fn dynkin_projection(arity: usize, part: &AssocWord) -> Result<LieWord> {
    let d = part.degree();
    let mut out = LieWord::zero(arity);
    for (m, c) in &part.terms {
        out.add_term(c / q(d as i64), LieTree::left_normed(&m.0));
    }
    if out.to_assoc() != *part {
        return Err(Error::Invalid("homogeneous part is not a Lie element".into()));
    }
    Ok(out)
}

/// Lowest nonvanishing homogeneous part of log(prod exp(±X_i)) and its
/// degree. `max_degree` defaults to max(ℓ(w), 2).
pub fn magnus_symbol(w: &GroupWord, max_degree: Option<usize>) -> Result<(LieWord, usize)> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let cap = max_degree.unwrap_or(w.len().max(2));
    for d in 1..=cap {
        let mut prod: Series = HashMap::from([(vec![], q(1))]);
        for &(g, e) in &w.letters {
            prod = series_mul(&prod, &exp_letter(g, e, d), d);
        }
        prod.remove(&vec![]);
        let log = log_one_plus(&prod, d);
        let mut part = AssocWord::zero(w.arity);
        for (word, c) in log {
            if word.len() == d {
                part.add_term(c, word);
            }
        }
        if !part.is_zero() {
            return Ok((dynkin_projection(w.arity, &part)?, d));
        }
    }
    Err(Error::DegreeExceeds(cap))
}

/// All compositions of `u` into `d` nonnegative parts.
pub fn compositions(u: usize, d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return if u == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = vec![];
    for first in (0..=u).rev() {
        for mut rest in compositions(u - first, d - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn multinomial(parts: &[usize]) -> BigInt {
    let mut acc = BigInt::one();
    let mut total = 0u64;
    for &p in parts {
        for i in 1..=p as u64 {
            total += 1;
            acc = acc * BigInt::from(total) / BigInt::from(i);
        }
    }
    acc
}

/// u-th formal derivative: each monomial distributes `u` derivatives over
/// its leaves with multinomial weights; jet generator `X_s^{(j)}` has index
/// `j*r + s` and the result has arity `r*(u+1)`.
pub fn word_formal_derivative(w: &LieWord, u: usize) -> LieWord {
    let r = w.arity;
    let mut out = LieWord::zero(r * (u + 1));
    for (t, c) in &w.terms {
        let leaves = t.leaves();
        for js in compositions(u, leaves.len()) {
            let labels: Vec<usize> = leaves.iter().zip(&js).map(|(&s, &j)| j * r + s).collect();
            let m = Q::from_integer(multinomial(&js));
            out.add_term(c * m, t.relabel(&labels));
        }
    }
    out
}

pub fn word_formal_derivative_assoc(w: &AssocWord, u: usize) -> AssocWord {
    let r = w.arity;
    let mut out = AssocWord::zero(r * (u + 1));
    for (m, c) in &w.terms {
        for js in compositions(u, m.0.len()) {
            let labels: Vec<usize> = m.0.iter().zip(&js).map(|(&s, &j)| j * r + s).collect();
            out.add_term(c * Q::from_integer(multinomial(&js)), labels);
        }
    }
    out
}
