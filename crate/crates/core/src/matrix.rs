//! Dense square matrices over a [`Ring`], stored row-major as codes.

use crate::error::{Error, Result};
use crate::ring::Ring;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub n: usize,
    pub data: Vec<u64>,
}

impl Mat {
    pub fn zero(n: usize) -> Mat {
        Mat { n, data: vec![0; n * n] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Mat {
        let mut m = Mat::zero(n);
        for i in 0..n {
            m.data[i * n + i] = ring.one();
        }
        m
    }

    pub fn from_ints(ring: &Ring, n: usize, vals: &[i64]) -> Mat {
        assert_eq!(vals.len(), n * n);
        Mat { n, data: vals.iter().map(|&v| ring.from_int(v as i128)).collect() }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    pub fn add(&self, ring: &Ring, other: &Mat) -> Mat {
        Mat { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| ring.add(a, b)).collect() }
    }

    pub fn sub(&self, ring: &Ring, other: &Mat) -> Mat {
        Mat { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| ring.sub(a, b)).collect() }
    }

    pub fn scale(&self, ring: &Ring, c: u64) -> Mat {
        Mat { n: self.n, data: self.data.iter().map(|&a| ring.mul(c, a)).collect() }
    }

    pub fn mul(&self, ring: &Ring, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.data[k * n + j];
                    if b != 0 {
                        out[i * n + j] = ring.add(out[i * n + j], ring.mul(a, b));
                    }
                }
            }
        }
        Mat { n, data: out }
    }

    pub fn commutator(&self, ring: &Ring, other: &Mat) -> Mat {
        self.mul(ring, other).sub(ring, &other.mul(ring, self))
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Mat {
        let n = self.n;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_r) {
            for j in (0..n).filter(|&j| j != skip_c) {
                data.push(self.data[i * n + j]);
            }
        }
        Mat { n: n - 1, data }
    }

    /// Determinant by cofactor expansion (n is small everywhere we use it).
    pub fn det(&self, ring: &Ring) -> u64 {
        match self.n {
            0 => ring.one(),
            1 => self.data[0],
            2 => ring.sub(ring.mul(self.data[0], self.data[3]), ring.mul(self.data[1], self.data[2])),
            n => {
                let mut acc = 0;
                for j in 0..n {
                    let a = self.data[j];
                    if a == 0 {
                        continue;
                    }
                    let term = ring.mul(a, self.minor(0, j).det(ring));
                    acc = if j % 2 == 0 { ring.add(acc, term) } else { ring.sub(acc, term) };
                }
                acc
            }
        }
    }

    /// Classical adjoint: `self * adj = det * I`.
    pub fn adjugate(&self, ring: &Ring) -> Mat {
        let n = self.n;
        if n == 1 {
            return Mat { n, data: vec![ring.one()] };
        }
        let mut out = Mat::zero(n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det(ring);
                out.data[j * n + i] = if (i + j) % 2 == 0 { c } else { ring.neg(c) };
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
}

/// Image of a rational number in the ring, when the denominator is a unit.
pub fn rational_in_ring(ring: &Ring, c: &BigRational) -> Result<u64> {
    let m = ring.size() as i128;
    let reduce = |b: &num_bigint::BigInt| -> u64 {
        let r = b % num_bigint::BigInt::from(m);
        let r = if r.is_negative() { r + num_bigint::BigInt::from(m) } else { r };
        r.to_u64().expect("reduced residue fits")
    };
    // For polynomial rings the prime subfield is F_p; reduce mod p instead.
    let (num, den) = if ring.spec().kind == crate::ring::RingKind::IntegersModPrimePower {
        (reduce(c.numer()), reduce(c.denom()))
    } else {
        let p = num_bigint::BigInt::from(ring.characteristic_prime());
        let f = |b: &num_bigint::BigInt| {
            let r = b % &p;
            let r = if r.is_negative() { r + &p } else { r };
            ring.from_int(r.to_i128().unwrap())
        };
        (f(c.numer()), f(c.denom()))
    };
    let inv = ring.unit_inverse(den).map_err(|_| Error::Invalid(format!("denominator of {c} is not a unit in {ring}")))?;
    Ok(ring.mul(num, inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjugate_identity() {
        let r = Ring::parse("zmod:5^2", None).unwrap();
        let m = Mat::from_ints(&r, 3, &[2, 7, 1, 0, 3, 4, 9, 1, 1]);
        let d = m.det(&r);
        let prod = m.mul(&r, &m.adjugate(&r));
        assert_eq!(prod, Mat::identity(&r, 3).scale(&r, d));
    }

    #[test]
    fn rationals() {
        let r = Ring::parse("zmod:3^2", None).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(rational_in_ring(&r, &half).unwrap(), 5);
        let third = BigRational::new(1.into(), 3.into());
        assert!(rational_in_ring(&r, &third).is_err());
        let t = Ring::parse("tpoly:3^2", None).unwrap();
        let mhalf = BigRational::new((-1).into(), 2.into());
        assert_eq!(rational_in_ring(&t, &mhalf).unwrap(), 1);
    }
}
