//! Exact arithmetic in Q(ζ_p) for a prime p.
//!
//! An element is Σ_{j<p} c_j ζ^j reduced by 1 + ζ + ... + ζ^{p-1} = 0 so
//! that c_{p-1} = 0; the remaining p-1 coefficients are then unique.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cyclotomic {
    pub p: u64,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(p: u64) -> Cyclotomic {
        Cyclotomic { p, coeffs: vec![BigRational::zero(); p as usize] }
    }

    pub fn rational(p: u64, c: BigRational) -> Cyclotomic {
        let mut z = Cyclotomic::zero(p);
        z.coeffs[0] = c;
        z
    }

    /// Σ_j buckets[j] ζ^j.
    pub fn from_buckets(p: u64, buckets: Vec<BigRational>) -> Cyclotomic {
        assert_eq!(buckets.len(), p as usize);
        let mut z = Cyclotomic { p, coeffs: buckets };
        z.normalize();
        z
    }

    fn normalize(&mut self) {
        let last = self.coeffs[self.p as usize - 1].clone();
        if !last.is_zero() {
            for c in self.coeffs.iter_mut() {
                *c -= &last;
            }
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs[..self.p as usize - 1]
    }

    pub fn add(&self, o: &Cyclotomic) -> Cyclotomic {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Cyclotomic { p: self.p, coeffs }
    }

    pub fn scale(&self, c: &BigRational) -> Cyclotomic {
        Cyclotomic { p: self.p, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiplication by ζ^k.
    pub fn rotate(&self, k: u64) -> Cyclotomic {
        let p = self.p as usize;
        let mut coeffs = vec![BigRational::zero(); p];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[(j + k as usize) % p] = c.clone();
        }
        let mut z = Cyclotomic { p: self.p, coeffs };
        z.normalize();
        z
    }

    pub fn mul(&self, o: &Cyclotomic) -> Cyclotomic {
        let p = self.p as usize;
        let mut coeffs = vec![BigRational::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in o.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                coeffs[(i + j) % p] += a * b;
            }
        }
        let mut z = Cyclotomic { p: self.p, coeffs };
        z.normalize();
        z
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The value when it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| Complex64::from_polar(1.0, TAU * j as f64 / self.p as f64) * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn relation_and_products() {
        let p = 5;
        // Σ ζ^j = 0
        let all = Cyclotomic::from_buckets(p, vec![q(1, 1); 5]);
        assert!(all.is_zero());
        let z = Cyclotomic::rational(p, q(1, 1)).rotate(1);
        let mut acc = Cyclotomic::rational(p, q(1, 1));
        for _ in 0..5 {
            acc = acc.mul(&z);
        }
        assert_eq!(acc.as_rational(), Some(q(1, 1)));
        assert!((z.to_complex() - Complex64::from_polar(1.0, TAU / 5.0)).norm() < 1e-12);
        // Gauss sum squared: (Σ (j/5) ζ^j)^2 = 5
        let legendre = [0, 1, -1, -1, 1];
        let g = Cyclotomic::from_buckets(p, legendre.iter().map(|&c| q(c, 1)).collect());
        assert_eq!(g.mul(&g).as_rational(), Some(q(5, 1)));
    }

    #[test]
    fn p_two() {
        let minus = Cyclotomic::rational(2, q(1, 1)).rotate(1);
        assert_eq!(minus.as_rational(), Some(q(-1, 1)));
        assert_eq!(minus.mul(&minus).as_rational(), Some(q(1, 1)));
    }
}
