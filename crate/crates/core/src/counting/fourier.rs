//! Additive Fourier transform on g(F_p), with characters identified with
//! g(F_p) through the primitive Killing form: f̂(Z) = Σ_W f(W) ζ^{⟨Z,W⟩}.

use super::carrier::{Carrier, ModuleCarrier};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::ring::RingKind;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Primitive Killing Gram matrix mod p, after the admissibility checks.
fn gram(mc: &ModuleCarrier) -> Result<(u64, Vec<Vec<u64>>)> {
    if mc.ring.spec().kind != RingKind::PrimeField {
        return Err(Error::UnsupportedCarrier(format!("Fourier analysis needs a prime field, got {}", mc.ring.literal())));
    }
    let p = mc.ring.size();
    if mc.alg.is_bad_prime(p, true) {
        return Err(Error::BadPrime { p, algebra: mc.alg.literal() });
    }
    let d = mc.alg.dim;
    let k = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut u = vec![0; d];
                    let mut v = vec![0; d];
                    u[i] = 1;
                    v[j] = 1;
                    mc.alg.killing_value(&mc.ring, &u, &v, true)
                })
                .collect()
        })
        .collect();
    Ok((p, k))
}

/// For every W in `keys`, the vector K·W, so ⟨Z,W⟩ = Z · (K W).
fn paired(mc: &ModuleCarrier, k: &[Vec<u64>], keys: impl Iterator<Item = u64>) -> Vec<(u64, Vec<u64>)> {
    let p = mc.ring.size();
    keys.map(|w| {
        let wv = mc.decode(w);
        let kw = k.iter().map(|row| row.iter().zip(&wv).map(|(a, b)| a * b % p).sum::<u64>() % p).collect();
        (w, kw)
    })
    .collect()
}

fn dot(z: &[u64], kw: &[u64], p: u64) -> u64 {
    z.iter().zip(kw).map(|(a, b)| a * b % p).sum::<u64>() % p
}

/// Exact transform, one entry per key of g(F_p).
pub fn additive_fourier(mc: &ModuleCarrier, f: &BTreeMap<u64, BigRational>) -> Result<Vec<Cyclotomic>> {
    let (p, k) = gram(mc)?;
    let support = paired(mc, &k, f.iter().filter(|(_, v)| !v.is_zero()).map(|(&w, _)| w));
    Ok((0..mc.order())
        .map(|z| {
            let zv = mc.decode(z);
            let mut buckets = vec![BigRational::zero(); p as usize];
            for (w, kw) in &support {
                buckets[dot(&zv, kw, p) as usize] += &f[w];
            }
            Cyclotomic::from_buckets(p, buckets)
        })
        .collect())
}

/// f(W) = |g|⁻¹ Σ_Z f̂(Z) ζ^{−⟨Z,W⟩}.
pub fn fourier_inverse(mc: &ModuleCarrier, fhat: &[Cyclotomic]) -> Result<Vec<Cyclotomic>> {
    let (p, k) = gram(mc)?;
    let all = paired(mc, &k, 0..mc.order());
    let scale = BigRational::new(1.into(), mc.order().into());
    Ok(all
        .iter()
        .map(|(_, kw)| {
            let mut acc = Cyclotomic::zero(p);
            for (z, fz) in fhat.iter().enumerate() {
                if fz.is_zero() {
                    continue;
                }
                let e = dot(&mc.decode(z as u64), kw, p);
                acc = acc.add(&fz.rotate((p - e) % p));
            }
            acc.scale(&scale)
        })
        .collect())
}

/// Floating-point transform for primes where exact arithmetic is too slow.
pub fn additive_fourier_float(mc: &ModuleCarrier, f: &BTreeMap<u64, f64>) -> Result<Vec<Complex64>> {
    let (p, k) = gram(mc)?;
    let roots: Vec<Complex64> = (0..p).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / p as f64)).collect();
    let support = paired(mc, &k, f.iter().filter(|(_, v)| **v != 0.0).map(|(&w, _)| w));
    Ok((0..mc.order())
        .map(|z| {
            let zv = mc.decode(z);
            support.iter().map(|(w, kw)| roots[dot(&zv, kw, p) as usize] * f[w]).sum()
        })
        .collect())
}

pub fn fourier_inverse_float(mc: &ModuleCarrier, fhat: &[Complex64]) -> Result<Vec<Complex64>> {
    let (p, k) = gram(mc)?;
    let roots: Vec<Complex64> = (0..p).map(|j| Complex64::from_polar(1.0, -TAU * j as f64 / p as f64)).collect();
    let n = mc.order() as f64;
    Ok(paired(mc, &k, 0..mc.order())
        .iter()
        .map(|(_, kw)| fhat.iter().enumerate().map(|(z, fz)| roots[dot(&mc.decode(z as u64), kw, p) as usize] * fz).sum::<Complex64>() / n)
        .collect())
}

/// Largest |f(W) − g(W)|, for certifying float round trips.
pub fn max_error(a: &[Complex64], b: &BTreeMap<u64, f64>) -> f64 {
    a.iter().enumerate().map(|(w, x)| (x - b.get(&(w as u64)).copied().unwrap_or(0.0)).norm()).fold(0.0, f64::max)
}

/// Rational-valued transform, if every entry is rational.
pub fn rational_values(v: &[Cyclotomic]) -> Option<Vec<BigRational>> {
    v.iter().map(|c| c.as_rational()).collect()
}

pub fn to_f64_map(f: &BTreeMap<u64, BigRational>) -> BTreeMap<u64, f64> {
    f.iter().map(|(&k, v)| (k, v.to_f64().unwrap_or(f64::NAN))).collect()
}
