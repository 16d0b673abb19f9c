//! Finite local coefficient rings: F_p, F_{p^r}, Z/p^k and F_{p^r}[t]/t^k.
//!
//! Every element is a `u64` code. For Z/p^k the code is the least
//! non-negative residue. For the polynomial kinds it is `sum c_i q^i`, where
//! `c_i` is itself the code of a residue-field element (`sum a_j p^j` over
//! the basis `1, t, .., t^{r-1}` of F_p[t]/(modulus)). Enumeration order is
//! numeric order on codes.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest ring size accepted at construction (p^k <= 2^63).
pub const MAX_RING_SIZE: u128 = 1 << 63;
/// Residue fields up to this size get full addition/multiplication tables.
const FIELD_TABLE_LIMIT: u64 = 256;
/// Polynomial rings up to this size get full multiplication tables.
const RING_TABLE_LIMIT: u64 = 512;
/// Bound on p^(r/2) for the exhaustive irreducibility test.
const IRREDUCIBILITY_LIMIT: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingKind {
    PrimeField,
    PrimePowerField,
    IntegersModPrimePower,
    TruncatedPolynomials,
}

impl RingKind {
    pub fn is_local(self) -> bool {
        matches!(self, RingKind::IntegersModPrimePower | RingKind::TruncatedPolynomials)
    }
}

/// Validated ring parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub kind: RingKind,
    pub p: u64,
    /// Level (number of t-adic or p-adic digits); 1 for the field kinds.
    pub k: u32,
    /// Degree of the residue field over F_p.
    pub r: u32,
    /// Monic modulus of the residue field, low-to-high, length r+1.
    pub modulus: Vec<u64>,
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn checked_pow(base: u64, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
        if acc > MAX_RING_SIZE {
            return None;
        }
    }
    Some(acc)
}

// ---------------------------------------------------------------------------
// polynomials over F_p as coefficient vectors (low to high)

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo the monic-or-not polynomial `m` over F_p.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    poly_trim(&mut a);
    let mut m = m.to_vec();
    poly_trim(&mut m);
    let dm = m.len() - 1;
    let lead_inv = mod_inverse(m[dm], p).expect("nonzero leading coefficient");
    while a.len() > dm {
        let da = a.len() - 1;
        let c = a[da] * lead_inv % p;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = da - dm + i;
                a[idx] = (a[idx] + p - c * mi % p) % p;
            }
        }
        a.pop();
        poly_trim(&mut a);
    }
    a
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Exhaustive test: no monic factor of degree 1..=r/2 divides `f`.
fn is_irreducible(f: &[u64], p: u64) -> Result<bool> {
    let r = f.len() - 1;
    if r == 1 {
        return Ok(true);
    }
    let half = r / 2;
    let search = checked_pow(p, half as u32).unwrap_or(u128::MAX);
    if search > IRREDUCIBILITY_LIMIT {
        return Err(Error::Invalid(format!("irreducibility search p^{half} too large for p = {p}")));
    }
    for deg in 1..=half {
        let count = p.pow(deg as u32);
        for code in 0..count {
            let mut g: Vec<u64> = digits(code, p, deg);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn digits(mut code: u64, base: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % base);
        code /= base;
    }
    out
}

/// Least monic irreducible of degree `r`, ordering candidates by the numeric
/// value of their lower coefficients read base p (so the top coefficient
/// below the leading one dominates).
pub fn default_modulus(p: u64, r: u32) -> Result<Vec<u64>> {
    let count = checked_pow(p, r).ok_or_else(|| Error::Invalid("modulus search too large".into()))?;
    for code in 0..count as u64 {
        let mut f = digits(code, p, r as usize);
        f.push(1);
        if f[0] == 0 && r > 1 {
            continue;
        }
        if is_irreducible(&f, p)? {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

// ---------------------------------------------------------------------------

/// The residue field F_{p^r}.
#[derive(Debug, Clone)]
pub struct Field {
    p: u64,
    r: u32,
    q: u64,
    modulus: Vec<u64>,
    add_t: Vec<u32>,
    mul_t: Vec<u32>,
    inv_t: Vec<u32>,
}

impl Field {
    fn new(p: u64, r: u32, modulus: Vec<u64>) -> Field {
        let q = p.pow(r);
        let mut f = Field { p, r, q, modulus, add_t: vec![], mul_t: vec![], inv_t: vec![] };
        if r > 1 && q <= FIELD_TABLE_LIMIT {
            let n = q as usize;
            let mut add_t = vec![0u32; n * n];
            let mut mul_t = vec![0u32; n * n];
            for a in 0..q {
                for b in 0..q {
                    add_t[(a * q + b) as usize] = f.add_slow(a, b) as u32;
                    mul_t[(a * q + b) as usize] = f.mul_slow(a, b) as u32;
                }
            }
            let mut inv_t = vec![0u32; n];
            for a in 1..q {
                for b in 1..q {
                    if mul_t[(a * q + b) as usize] == 1 {
                        inv_t[a as usize] = b as u32;
                    }
                }
            }
            f.add_t = add_t;
            f.mul_t = mul_t;
            f.inv_t = inv_t;
        }
        f
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    fn add_slow(&self, a: u64, b: u64) -> u64 {
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..self.r {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let r = self.r as usize;
        let da = digits(a, self.p, r);
        let db = digits(b, self.p, r);
        let mut prod = vec![0u64; 2 * r - 1];
        for i in 0..r {
            for j in 0..r {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % self.p;
            }
        }
        let rem = poly_rem(&prod, &self.modulus, self.p);
        rem.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.r == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if !self.add_t.is_empty() {
            self.add_t[(a * self.q + b) as usize] as u64
        } else {
            self.add_slow(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if self.r == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let (mut a, mut out, mut place) = (a, 0, 1);
            for _ in 0..self.r {
                out += ((self.p - a % self.p) % self.p) * place;
                a /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.r == 1 {
            ((a as u128 * b as u128) % self.p as u128) as u64
        } else if !self.mul_t.is_empty() {
            self.mul_t[(a * self.q + b) as usize] as u64
        } else {
            self.mul_slow(a, b)
        }
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        if self.r == 1 {
            return mod_inverse(a, self.p);
        }
        if !self.inv_t.is_empty() {
            return Some(self.inv_t[a as usize] as u64);
        }
        // a^(q-2)
        let (mut base, mut e, mut acc) = (a, self.q - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        Some(acc)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }
}

#[derive(Debug, Clone)]
enum Arith {
    /// Z/m with m = p^k.
    Modular { m: u64 },
    /// F_q[t]/t^k, code = sum c_i q^i.
    Poly { field: Field, q: u64, k: u32, mul_t: Vec<u32> },
}

/// A validated finite local ring with exact arithmetic on `u64` codes.
#[derive(Debug, Clone)]
pub struct Ring {
    spec: RingSpec,
    size: u64,
    arith: Arith,
}

/// Builds a ring. `k` is ignored for the field kinds and `r` must be 1 for
/// the two prime kinds with `r > 1` only meaningful for
/// prime-power-field and truncated-polynomials (residue field F_{p^r}).
pub fn ring_make(kind: RingKind, p: u64, k: u32, r: u32, modulus: Option<Vec<u64>>) -> Result<Ring> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::Invalid("extension degree r must be >= 1".into()));
    }
    let (k, r) = match kind {
        RingKind::PrimeField => {
            if r != 1 {
                return Err(Error::Invalid("prime-field has r = 1".into()));
            }
            (1, 1)
        }
        RingKind::PrimePowerField => (1, r),
        RingKind::IntegersModPrimePower => {
            if r > 1 {
                return Err(Error::GaloisRing);
            }
            (k, 1)
        }
        RingKind::TruncatedPolynomials => (k, r),
    };
    if k == 0 {
        return Err(Error::Invalid("level k must be >= 1".into()));
    }
    let q = checked_pow(p, r).ok_or_else(|| Error::Invalid("ring too large".into()))?;
    let size = checked_pow(q as u64, k).ok_or_else(|| Error::Invalid(format!("ring of size {p}^{} exceeds 2^63", r * k)))?;
    let modulus = match modulus {
        Some(m) => {
            if m.len() != r as usize + 1 || *m.last().unwrap() != 1 {
                return Err(Error::Invalid(format!("modulus must be monic of degree {r}")));
            }
            if m.iter().any(|&c| c >= p) {
                return Err(Error::Invalid("modulus coefficients must lie in [0, p)".into()));
            }
            if !is_irreducible(&m, p)? {
                return Err(Error::Reducible(m, p));
            }
            m
        }
        None if r == 1 => vec![0, 1],
        None => default_modulus(p, r)?,
    };
    let spec = RingSpec { kind, p, k, r, modulus: modulus.clone() };
    let arith = match kind {
        RingKind::PrimeField | RingKind::IntegersModPrimePower => Arith::Modular { m: size as u64 },
        _ => {
            let field = Field::new(p, r, modulus);
            let mut arith = Arith::Poly { field, q: q as u64, k, mul_t: vec![] };
            if k > 1 && size as u64 <= RING_TABLE_LIMIT {
                let n = size as u64;
                let mut t = vec![0u32; (n * n) as usize];
                for a in 0..n {
                    for b in 0..n {
                        t[(a * n + b) as usize] = poly_mul(&arith, a, b) as u32;
                    }
                }
                if let Arith::Poly { mul_t, .. } = &mut arith {
                    *mul_t = t;
                }
            }
            arith
        }
    };
    Ok(Ring { spec, size: size as u64, arith })
}

fn poly_mul(arith: &Arith, a: u64, b: u64) -> u64 {
    let Arith::Poly { field, q, k, .. } = arith else { unreachable!() };
    let k = *k as usize;
    let da = digits(a, *q, k);
    let db = digits(b, *q, k);
    let mut out = vec![0u64; k];
    for i in 0..k {
        if da[i] == 0 {
            continue;
        }
        for j in 0..k - i {
            out[i + j] = field.add(out[i + j], field.mul(da[i], db[j]));
        }
    }
    out.iter().rev().fold(0, |acc, &c| acc * q + c)
}

impl Ring {
    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }
    pub fn size(&self) -> u64 {
        self.size
    }
    pub fn characteristic_prime(&self) -> u64 {
        self.spec.p
    }
    pub fn level(&self) -> u32 {
        self.spec.k
    }
    /// Size of the residue field.
    pub fn residue_size(&self) -> u64 {
        self.spec.p.pow(self.spec.r)
    }
    pub fn is_field(&self) -> bool {
        self.spec.k == 1
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        match &self.arith {
            Arith::Modular { m } => {
                let s = a as u128 + b as u128;
                if s >= *m as u128 {
                    (s - *m as u128) as u64
                } else {
                    s as u64
                }
            }
            Arith::Poly { field, q, k, .. } => {
                if *k == 1 {
                    return field.add(a, b);
                }
                let (mut a, mut b, mut out, mut place) = (a, b, 0u64, 1u64);
                for _ in 0..*k {
                    out += field.add(a % q, b % q) * place;
                    a /= q;
                    b /= q;
                    place = place.wrapping_mul(*q);
                }
                out
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        match &self.arith {
            Arith::Modular { m } => {
                if a == 0 {
                    0
                } else {
                    m - a
                }
            }
            Arith::Poly { field, q, k, .. } => {
                if *k == 1 {
                    return field.neg(a);
                }
                let (mut a, mut out, mut place) = (a, 0u64, 1u64);
                for _ in 0..*k {
                    out += field.neg(a % q) * place;
                    a /= q;
                    place = place.wrapping_mul(*q);
                }
                out
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match &self.arith {
            Arith::Modular { m } => ((a as u128 * b as u128) % *m as u128) as u64,
            Arith::Poly { field, k, mul_t, .. } => {
                if *k == 1 {
                    field.mul(a, b)
                } else if !mul_t.is_empty() {
                    mul_t[(a * self.size + b) as usize] as u64
                } else {
                    poly_mul(&self.arith, a, b)
                }
            }
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn zero(&self) -> u64 {
        0
    }
    pub fn one(&self) -> u64 {
        if self.size == 1 {
            0
        } else {
            1
        }
    }

    /// Image of an integer under Z -> R.
    pub fn from_int(&self, v: i128) -> u64 {
        match &self.arith {
            Arith::Modular { m } => v.rem_euclid(*m as i128) as u64,
            Arith::Poly { field, .. } => field.from_int(v),
        }
    }

    /// Uniformizer valuation: the largest j with `a` in m^j (k for zero).
    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.spec.k;
        }
        let base = match &self.arith {
            Arith::Modular { .. } => self.spec.p,
            Arith::Poly { q, .. } => *q,
        };
        let (mut a, mut v) = (a, 0);
        while a % base == 0 {
            a /= base;
            v += 1;
        }
        v
    }

    /// Residue of `a` in the residue field.
    pub fn residue(&self, a: u64) -> u64 {
        match &self.arith {
            Arith::Modular { .. } => a % self.spec.p,
            Arith::Poly { q, .. } => a % q,
        }
    }

    pub fn is_unit(&self, a: u64) -> bool {
        self.residue(a) != 0
    }

    /// The inverse of a unit.
    pub fn unit_inverse(&self, a: u64) -> Result<u64> {
        if !self.is_unit(a) {
            return Err(Error::NonUnit);
        }
        match &self.arith {
            Arith::Modular { m } => mod_inverse(a, *m).ok_or(Error::NonUnit),
            Arith::Poly { field, q, k, .. } => {
                // power-series inversion digit by digit
                let k = *k as usize;
                let da = digits(a, *q, k);
                let a0inv = field.inv(da[0]).ok_or(Error::NonUnit)?;
                let mut b = vec![0u64; k];
                b[0] = a0inv;
                for n in 1..k {
                    let mut s = 0u64;
                    for i in 1..=n {
                        s = field.add(s, field.mul(da[i], b[n - i]));
                    }
                    b[n] = field.mul(field.neg(s), a0inv);
                }
                Ok(b.iter().rev().fold(0, |acc, &c| acc * q + c))
            }
        }
    }

    /// The same ring kind at level `k2 <= k`.
    pub fn at_level(&self, k2: u32) -> Result<Ring> {
        if !self.spec.kind.is_local() {
            return Err(Error::Invalid("level reduction needs a local ring kind".into()));
        }
        if k2 > self.spec.k || k2 == 0 {
            return Err(Error::Level { from: self.spec.k, to: k2 });
        }
        ring_make(self.spec.kind, self.spec.p, k2, self.spec.r, Some(self.spec.modulus.clone()))
    }

    /// Reduction R/m^k -> R/m^k2 on codes.
    pub fn reduce_level(&self, a: u64, k2: u32) -> Result<u64> {
        if !self.spec.kind.is_local() {
            return Err(Error::Invalid("level reduction needs a local ring kind".into()));
        }
        if k2 > self.spec.k || k2 == 0 {
            return Err(Error::Level { from: self.spec.k, to: k2 });
        }
        let base = match &self.arith {
            Arith::Modular { .. } => self.spec.p,
            Arith::Poly { q, .. } => *q,
        };
        Ok(a % base.pow(k2))
    }

    /// All elements in canonical (numeric) order, refusing rings above `budget`.
    pub fn enumerate(&self, budget: u64) -> Result<std::ops::Range<u64>> {
        crate::error::check_budget(self.size as u128, budget)?;
        Ok(0..self.size)
    }

    /// Human-readable form: integers for Z/p^k, polynomials in `t`
    /// (and `a` for the residue field generator) otherwise.
    pub fn format(&self, x: u64) -> String {
        match &self.arith {
            Arith::Modular { .. } => x.to_string(),
            Arith::Poly { q, k, .. } => {
                let cs = digits(x, *q, *k as usize);
                let mut terms = vec![];
                for (i, &c) in cs.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let cstr = self.format_residue(c);
                    let needs_paren = cstr.contains('+');
                    let coeff = match (i, cstr.as_str()) {
                        (0, _) => cstr.clone(),
                        (_, "1") => String::new(),
                        _ if needs_paren => format!("({cstr})"),
                        _ => cstr.clone(),
                    };
                    let var = match i {
                        0 => String::new(),
                        1 => "t".into(),
                        _ => format!("t^{i}"),
                    };
                    terms.push(format!("{coeff}{var}"));
                }
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join("+")
                }
            }
        }
    }

    fn format_residue(&self, c: u64) -> String {
        if self.spec.r == 1 {
            return c.to_string();
        }
        let ds = digits(c, self.spec.p, self.spec.r as usize);
        let mut terms = vec![];
        for (i, &d) in ds.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "a".into(),
                _ => format!("a^{i}"),
            };
            terms.push(match (i, d) {
                (0, _) => d.to_string(),
                (_, 1) => var,
                _ => format!("{d}{var}"),
            });
        }
        terms.join("+")
    }

    /// Short literal such as `fp:5`, `fq:2^3`, `zmod:3^2`, `tpoly:3^2`.
    pub fn literal(&self) -> String {
        let s = &self.spec;
        match s.kind {
            RingKind::PrimeField => format!("fp:{}", s.p),
            RingKind::PrimePowerField => format!("fq:{}^{}", s.p, s.r),
            RingKind::IntegersModPrimePower => format!("zmod:{}^{}", s.p, s.k),
            RingKind::TruncatedPolynomials if s.r == 1 => format!("tpoly:{}^{}", s.p, s.k),
            RingKind::TruncatedPolynomials => format!("tpoly:{}^{}^{}", s.p, s.r, s.k),
        }
    }

    /// Parses a ring literal; `modulus` overrides the residue-field modulus.
    pub fn parse(text: &str, modulus: Option<Vec<u64>>) -> Result<Ring> {
        let bad = || Error::Invalid(format!("malformed ring literal '{text}'"));
        let (head, rest) = text.trim().split_once(':').ok_or_else(bad)?;
        let nums: Vec<u64> = rest.split('^').map(|s| s.trim().parse::<u64>().map_err(|_| bad())).collect::<Result<_>>()?;
        let to_u32 = |v: u64| u32::try_from(v).map_err(|_| bad());
        match (head.trim(), nums.as_slice()) {
            ("fp", [p]) => ring_make(RingKind::PrimeField, *p, 1, 1, modulus),
            ("fq", [p]) => ring_make(RingKind::PrimeField, *p, 1, 1, modulus),
            ("fq", [p, r]) => ring_make(RingKind::PrimePowerField, *p, 1, to_u32(*r)?, modulus),
            ("zmod", [p]) => ring_make(RingKind::IntegersModPrimePower, *p, 1, 1, modulus),
            ("zmod", [p, k]) => ring_make(RingKind::IntegersModPrimePower, *p, to_u32(*k)?, 1, modulus),
            ("tpoly", [p, k]) => ring_make(RingKind::TruncatedPolynomials, *p, to_u32(*k)?, 1, modulus),
            ("tpoly", [p, r, k]) => ring_make(RingKind::TruncatedPolynomials, *p, to_u32(*k)?, to_u32(*r)?, modulus),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        self.spec == other.spec
    }
}
impl Eq for Ring {}
