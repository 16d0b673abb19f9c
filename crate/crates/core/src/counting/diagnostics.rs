//! Normalized fiber-count statistics across primes and levels.
//!
//! Verdicts compare finitely many primes against a band c·q^{-1/2}; the
//! true constants are not effective, so every verdict here is heuristic.

use super::engine::{CountOptions, WordMap};
use super::points::{count_points, factor, prime_power_ring};
use crate::error::{Error, Result};
use crate::polymap::{Carrier as MapCarrier, IdealSpec};
use crate::ring::Ring;
use crate::words::Word;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::json;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    pub statistic: String,
    pub exact: Option<BigRational>,
    pub value: f64,
}

impl Row {
    pub fn exact(p: u64, k: u32, q: u64, statistic: &str, v: BigRational) -> Row {
        let value = v.to_f64().unwrap_or(f64::NAN);
        Row { p, k, q, statistic: statistic.into(), exact: Some(v), value }
    }

    pub fn real(p: u64, k: u32, q: u64, statistic: &str, value: f64) -> Row {
        Row { p, k, q, statistic: statistic.into(), exact: None, value }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    pub word: String,
    pub carrier: String,
    pub dim_x: usize,
    pub dim_y: usize,
    pub rows: Vec<Row>,
    /// Named summary verdicts.
    pub verdicts: Vec<(String, bool)>,
}

impl DiagnosticSeries {
    fn new(word: String, carrier: String, dim_x: usize, dim_y: usize) -> Result<DiagnosticSeries> {
        if dim_x == 0 || dim_y == 0 {
            return Err(Error::Invalid(format!("dimensions must be positive, got {dim_x} and {dim_y}")));
        }
        Ok(DiagnosticSeries { word, carrier, dim_x, dim_y, rows: vec![], verdicts: vec![] })
    }

    fn push(&mut self, row: Row) {
        debug_assert!(!self.rows.iter().any(|r| (r.p, r.k, &r.statistic) == (row.p, row.k, &row.statistic)));
        self.rows.push(row);
    }

    pub fn get(&self, p: u64, k: u32, statistic: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.p == p && r.k == k && r.statistic == statistic)
    }

    pub fn verdict(&self, name: &str) -> Option<bool> {
        self.verdicts.iter().find(|(n, _)| n == name).map(|v| v.1)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let io = |e: csv::Error| Error::Invalid(e.to_string());
        w.write_record(["p", "k", "q", "statistic", "numerator", "denominator", "float"]).map_err(io)?;
        for r in &self.rows {
            let (num, den) = match &r.exact {
                Some(v) => (v.numer().to_string(), v.denom().to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([r.p.to_string(), r.k.to_string(), r.q.to_string(), r.statistic.clone(), num, den, format!("{}", r.value)])
                .map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?).map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "p": r.p, "k": r.k, "q": r.q, "statistic": r.statistic,
                    "numerator": r.exact.as_ref().map(|v| v.numer().to_string()),
                    "denominator": r.exact.as_ref().map(|v| v.denom().to_string()),
                    "float": r.value,
                })
            })
            .collect();
        let verdicts: serde_json::Map<String, serde_json::Value> = self.verdicts.iter().map(|(n, v)| (n.clone(), json!(v))).collect();
        json!({
            "word": self.word, "carrier": self.carrier, "dim_x": self.dim_x, "dim_y": self.dim_y,
            "rows": rows, "verdicts": verdicts, "heuristic": true,
        })
    }
}

fn int(v: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn band(c: f64, q: u64) -> f64 {
    c / (q as f64).sqrt()
}

fn nearest_int(r: &BigRational) -> BigRational {
    r.round()
}

/// Per prime: fiber ratios |φ⁻¹(y)| / q^{dim X − dim Y} over every y of the
/// carrier, at level k = 1.
///
/// `fgi_band`: every ratio within c·q^{-1/2} of 1 at every prime.
/// `flat_consistent`: every ratio within the band of a nonnegative integer,
/// the largest ratio at most c·q^{1/2}, and the integer nearest the largest
/// ratio never grows from one prime to the next.
pub fn flatness_scan(word: &Word, carrier: &MapCarrier, primes: &[u64], c: f64, opts: &CountOptions) -> Result<DiagnosticSeries> {
    let mut series: Option<DiagnosticSeries> = None;
    let (mut fgi, mut consistent) = (true, true);
    let mut last_top: Option<BigRational> = None;
    for &p in primes {
        let ring = Ring::parse(&format!("fp:{p}"), None)?;
        let map = WordMap::new(word.clone(), carrier, &ring, opts.budget)?;
        let s = match &mut series {
            Some(s) => s,
            None => series.insert(DiagnosticSeries::new(word.to_string(), carrier.literal(), map.dim_x(), map.dim_y())?),
        };
        let h = map.histogram(opts)?;
        let scale = int((p as u128).pow((s.dim_x - s.dim_y) as u32));
        let order = map.carrier().order();
        let ratios: BTreeSet<BigRational> = h.counts.values().map(|&v| int(v) / &scale).collect();
        let mut ratios: Vec<BigRational> = ratios.into_iter().collect();
        if (h.counts.len() as u64) < order {
            ratios.insert(0, BigRational::zero());
        }
        let one = int(1);
        let max = ratios.last().unwrap().clone();
        let min = ratios[0].clone();
        let dev1 = ratios.iter().map(|r| (r - &one).abs()).max().unwrap();
        let dev_int = ratios.iter().map(|r| (r - nearest_int(r)).abs()).max().unwrap();
        let b = band(c, p);
        fgi &= dev1.to_f64().unwrap() <= b;
        consistent &= dev_int.to_f64().unwrap() <= b && max.to_f64().unwrap() <= c * (p as f64).sqrt();
        let top = nearest_int(&max);
        if let Some(prev) = &last_top {
            consistent &= top <= *prev;
        }
        last_top = Some(top);
        s.push(Row::exact(p, 1, p, "max_ratio", max));
        s.push(Row::exact(p, 1, p, "min_ratio", min));
        s.push(Row::exact(p, 1, p, "max_dev_from_1", dev1));
        s.push(Row::exact(p, 1, p, "max_dev_from_int", dev_int));
        s.push(Row::real(p, 1, p, "band", b));
    }
    let mut s = series.ok_or_else(|| Error::Invalid("empty prime list".into()))?;
    s.verdicts = vec![("fgi_band".into(), fgi), ("flat_consistent".into(), consistent)];
    Ok(s)
}

/// ε̂(p,k) = (dim X − log_q max_y |φ⁻¹(y)|)/dim Y with q = p^k = |R|.
pub fn epsilon_flat_estimate(word: &Word, carrier: &MapCarrier, grid: &[(u64, u32)], opts: &CountOptions) -> Result<DiagnosticSeries> {
    let mut series: Option<DiagnosticSeries> = None;
    let mut min = f64::INFINITY;
    for &(p, k) in grid {
        let ring = prime_power_ring(p, k)?;
        let map = WordMap::new(word.clone(), carrier, &ring, opts.budget)?;
        let s = match &mut series {
            Some(s) => s,
            None => series.insert(DiagnosticSeries::new(word.to_string(), carrier.literal(), map.dim_x(), map.dim_y())?),
        };
        let q = ring.size();
        let max = map.histogram(opts)?.max_fiber();
        let eps = (s.dim_x as f64 - (max as f64).ln() / (q as f64).ln()) / s.dim_y as f64;
        min = min.min(eps);
        s.push(Row::exact(p, k, q, "max_fiber", int(max)));
        s.push(Row::real(p, k, q, "eps_hat", eps));
    }
    let mut s = series.ok_or_else(|| Error::Invalid("empty grid".into()))?;
    s.rows.push(Row::real(0, 0, 0, "eps_hat_min", min));
    Ok(s)
}

/// h_X(Z/n) for each modulus; composite moduli use CRT products of
/// prime-power counts. `bounded` holds when along every prime the values
/// grow by at most a factor 1 + c·p^{-1/2} per level.
pub fn hx_sequence(ideal: &IdealSpec, label: &str, moduli: &[u64], c: f64, budget: u64) -> Result<DiagnosticSeries> {
    if moduli.is_empty() {
        return Err(Error::Invalid("empty modulus list".into()));
    }
    let dim = ideal.dim.max(1);
    let mut s = DiagnosticSeries::new(label.into(), "affine".into(), dim, dim)?;
    s.dim_x = ideal.dim;
    let mut by_prime: std::collections::BTreeMap<u64, Vec<(u32, BigRational)>> = Default::default();
    for &n in moduli {
        let f = factor(n);
        let mut count = BigInt::from(1);
        for &(p, k) in &f {
            count *= BigInt::from(count_points(ideal, &prime_power_ring(p, k)?, budget)?);
        }
        let h = BigRational::new(count, BigInt::from(n).pow(ideal.dim as u32));
        match f.as_slice() {
            [(p, k)] => {
                by_prime.entry(*p).or_default().push((*k, h.clone()));
                s.push(Row::exact(*p, *k, n, "h", h));
            }
            _ => s.push(Row::exact(n, 1, n, "h_composite", h)),
        }
    }
    let mut bounded = true;
    for (p, mut hs) in by_prime {
        hs.sort_by_key(|x| x.0);
        let growth = 1.0 + band(c, p);
        bounded &= hs.windows(2).all(|w| w[1].1.to_f64().unwrap() <= w[0].1.to_f64().unwrap() * growth);
    }
    s.verdicts = vec![("bounded".into(), bounded)];
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{parse_word, WordKind};

    fn lie(w: &str) -> Word {
        parse_word(w, WordKind::Lie).unwrap()
    }

    #[test]
    fn flatness_signatures() {
        let sl2 = MapCarrier::parse("A:1").unwrap();
        let opts = CountOptions::default();
        let double = flatness_scan(&lie("[x1,x2] + [x3,x4]"), &sl2, &[3, 5, 7], 3.0, &opts).unwrap();
        assert_eq!(double.verdict("fgi_band"), Some(true));
        let single = flatness_scan(&lie("[x1,x2]"), &sl2, &[3, 5, 7], 3.0, &opts).unwrap();
        assert_eq!(single.verdict("fgi_band"), Some(false));
        assert_eq!(single.verdict("flat_consistent"), Some(false));
        assert_eq!(single.get(3, 1, "max_ratio").unwrap().exact, Some(BigRational::new(105.into(), 27.into())));
        let sq = flatness_scan(&parse_word("x1^2", WordKind::Group).unwrap(), &MapCarrier::Sl(2), &[5], 3.0, &opts).unwrap();
        assert_eq!(sq.get(5, 1, "max_ratio").unwrap().value, 30.0);
        assert_eq!(sq.verdict("flat_consistent"), Some(false));
        let csv = sq.to_csv().unwrap();
        assert!(csv.starts_with("p,k,q,statistic,numerator,denominator,float\n5,1,5,max_ratio,30,1,30\n"));
    }

    #[test]
    fn epsilon_estimates() {
        let opts = CountOptions::default();
        let s = epsilon_flat_estimate(&lie("[x1,x2]"), &MapCarrier::parse("A:1").unwrap(), &[(7, 1)], &opts).unwrap();
        assert_eq!(s.get(7, 1, "max_fiber").unwrap().value, 2737.0);
        assert!((s.get(7, 1, "eps_hat").unwrap().value - 0.6442).abs() < 1e-3);
        let sq = epsilon_flat_estimate(&parse_word("x1^2", WordKind::Group).unwrap(), &MapCarrier::Sl(2), &[(5, 1)], &opts).unwrap();
        assert!((sq.get(5, 1, "eps_hat").unwrap().value - 0.2955).abs() < 1e-3);
        let id = epsilon_flat_estimate(&parse_word("x1", WordKind::Group).unwrap(), &MapCarrier::Sl(2), &[(3, 1), (3, 2)], &opts).unwrap();
        assert!(id.rows.iter().filter(|r| r.statistic == "eps_hat").all(|r| r.value == 1.0));
    }

    #[test]
    fn hx_series() {
        let xy = IdealSpec::parse("x1*x2", None, 1).unwrap();
        let s = hx_sequence(&xy, "xy", &[5, 25, 125, 15], 3.0, 1 << 24).unwrap();
        assert_eq!(s.get(5, 3, "h").unwrap().exact, Some(BigRational::new(17.into(), 5.into())));
        assert!(s.get(15, 1, "h_composite").is_some());
        let sl2 = IdealSpec::sl(2);
        let s = hx_sequence(&sl2, "SL2", &[3, 9, 27, 5, 25], 3.0, 1 << 30).unwrap();
        assert_eq!(s.verdict("bounded"), Some(true));
        let json = s.to_json();
        assert_eq!(json["rows"][0]["numerator"], "8");
    }
}
