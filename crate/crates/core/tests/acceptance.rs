//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every criterion runs even if an earlier one fails. The process exits
//! nonzero on any failure, except a speed-up shortfall measured on a
//! machine with fewer than eight hardware threads, which is printed as FAIL
//! but cannot be fixed by the code.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};
use wordlab_core::chevalley::unipotent_cover_fraction;
use wordlab_core::counting::fourier::{additive_fourier, rational_values};
use wordlab_core::counting::measure::Norm;
use wordlab_core::counting::*;
use wordlab_core::dph::dph_build;
use wordlab_core::polymap::lie_word_polymap;
use wordlab_core::words::{convolution_power, parse_lie, parse_word, word_concat};
use wordlab_core::{Carrier, ChevalleyAlgebra, IdealSpec, Ring, Word, WordKind};

type Outcome = Result<String, String>;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn int(v: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn fp(p: u64) -> Ring {
    Ring::parse(&format!("fp:{p}"), None).unwrap()
}

fn alg(lit: &str) -> ChevalleyAlgebra {
    ChevalleyAlgebra::parse(lit).unwrap()
}

fn word(text: &str, kind: WordKind) -> Word {
    parse_word(text, kind).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: wordlab_core::Error) -> String {
    e.to_string()
}

fn measure_of(w: &Word, carrier: &Carrier, ring: &Ring, method: CountMethod) -> Result<(Measure, WordMap), String> {
    let map = WordMap::new(w.clone(), carrier, ring, DEFAULT_BUDGET).map_err(err)?;
    let opts = CountOptions { method, ..Default::default() };
    let h = map.histogram(&opts).map_err(err)?;
    Ok((Measure::from_histogram(&h), map))
}

fn fourier_identity() -> Outcome {
    let start = Instant::now();
    let comm = word("[x1,x2]", WordKind::Lie);
    let mut checked = 0;
    for (lit, p) in [("A:1", 3), ("A:1", 5), ("A:1", 7), ("A:2", 2)] {
        let a = alg(lit);
        let (mu, map) = measure_of(&comm, &Carrier::Algebra(a.clone()), &fp(p), CountMethod::Enumerate)?;
        let Space::Module(mc) = map.space.as_ref() else { unreachable!() };
        let f: BTreeMap<u64, BigRational> = mu.support().map(|k| (k, mu.mass(k))).collect();
        let fhat = additive_fourier(mc, &f).map_err(err)?;
        let fhat = rational_values(&fhat).ok_or(format!("{lit} p={p}: transform not rational"))?;
        let order = int(mc.order() as u128);
        for (z, v) in fhat.iter().enumerate() {
            let cent = centralizer_size(&a, p, &mc.decode(z as u64)).map_err(err)?;
            ensure(v * &order == int(cent), || format!("{lit} p={p} Z={z}: {v}·|g| != {cent}"))?;
            checked += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), || format!("took {t:?}"))?;
    Ok(format!("{checked} elements exact in {:.1}s", t.as_secs_f64()))
}

fn double_star() -> Outcome {
    let mut parts = vec![];
    for (lit, p) in [("A:1", 3), ("A:1", 5), ("A:2", 2)] {
        let r = commutator_fourier_check(&alg(lit), p, &CountOptions::default()).map_err(err)?;
        let lhs = r.lhs.clone().ok_or(format!("{lit} p={p}: brute side refused"))?;
        ensure(lhs == r.rhs, || format!("{lit} p={p}: {lhs} != {}", r.rhs))?;
        parts.push(format!("{lit}/F{p}={}", r.rhs));
    }
    Ok(parts.join(" "))
}

/// Scans primes p ∤ n for sl_n: when p | n the scalars lie in sl_n(F_p),
/// every centralizer contains them and the algebra is not simple. Those
/// primes are still computed and shown.
fn upsilon_trend() -> Outcome {
    let mut parts = vec![];
    let mut excluded = vec![];
    let mut over = vec![];
    for (lit, n) in [("A:1", 2u64), ("A:2", 3)] {
        for p in [2u64, 3, 5, 7] {
            if n == 2 && p == 2 {
                continue;
            }
            let r = upsilon_count(&alg(lit), p, DEFAULT_BUDGET).map_err(err)?;
            let dev = r.deviation_f64().abs();
            if n % p == 0 {
                excluded.push(format!("{lit}/F{p}:{dev:.3}"));
                continue;
            }
            if dev > (p as f64).powf(-0.5) {
                over.push(format!("{lit} p={p}"));
            }
            parts.push(format!("{lit}/F{p}:{dev:.3}"));
        }
    }
    ensure(over.is_empty(), || format!("above p^-1/2 at {}; deviations {}", over.join(", "), parts.join(" ")))?;
    Ok(format!("{}; p | n not scanned: {}", parts.join(" "), excluded.join(" ")))
}

fn flatness_signature() -> Outcome {
    let sl2 = Carrier::parse("A:1").unwrap();
    let opts = CountOptions::default();
    let primes = [3u64, 5, 7];
    let double = flatness_scan(&word("[x1,x2] + [x3,x4]", WordKind::Lie), &sl2, &primes, 3.0, &opts).map_err(err)?;
    let single = flatness_scan(&word("[x1,x2]", WordKind::Lie), &sl2, &primes, 3.0, &opts).map_err(err)?;
    let mut devs = vec![];
    for p in primes {
        let band = 3.0 / (p as f64).sqrt();
        let d = double.get(p, 1, "max_dev_from_1").unwrap().value;
        ensure(d <= band, || format!("double commutator p={p}: {d:.4} > {band:.4}"))?;
        devs.push(format!("{d:.3}"));
    }
    let outside: Vec<u64> =
        primes.iter().copied().filter(|&p| single.get(p, 1, "max_dev_from_1").unwrap().value > 3.0 / (p as f64).sqrt()).collect();
    ensure(!outside.is_empty() && single.verdict("fgi_band") == Some(false), || "single commutator stays in the band".into())?;
    let r3 = single.get(3, 1, "max_ratio").unwrap().exact.clone().unwrap();
    ensure(r3 == q(105, 27), || format!("single commutator ratio at 3 is {r3}"))?;
    Ok(format!("double max|r-1| = {}; single leaves band at p in {outside:?}", devs.join(",")))
}

fn hx_exact() -> Outcome {
    let x2 = IdealSpec::parse("x1^2", None, 0).unwrap();
    for p in [3u64, 5, 7] {
        for k in 1..=2u32 {
            let h = h_x(&x2, p.pow(2 * k), DEFAULT_BUDGET).map_err(err)?.h;
            ensure(h == int(p.pow(k) as u128), || format!("x^2 p={p} k={k}: h = {h}"))?;
        }
    }
    let sl2 = IdealSpec::sl(2);
    for p in [3u64, 5] {
        let hs: Vec<BigRational> =
            (1..=3u32).map(|k| h_x(&sl2, p.pow(k), DEFAULT_BUDGET).map(|v| v.h)).collect::<Result<_, _>>().map_err(err)?;
        ensure(hs.iter().all(|h| *h == hs[0]), || format!("SL_2 p={p}: {hs:?}"))?;
        let expect = int(1) - q(1, (p * p) as i64);
        ensure(hs[0] == expect, || format!("SL_2 p={p}: {} != {expect}", hs[0]))?;
    }
    Ok("x^2: h(Z/p^2k) = p^k; SL_2: h = 1 - p^-2 for k <= 3".into())
}

fn jet_identification() -> Outcome {
    let xy = IdealSpec::parse("x1*x2", None, 1).unwrap();
    let mut n = 0;
    for (name, x) in [("SL_2", IdealSpec::sl(2)), ("xy", xy)] {
        for p in [2u64, 3, 5] {
            for m in 0..=2 {
                let (arcs, jets) = jet_point_counts(&x, p, m, DEFAULT_BUDGET).map_err(err)?;
                ensure(arcs == jets, || format!("{name} p={p} m={m}: {arcs} != {jets}"))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} (X, p, m) cases agree"))
}

fn lct_jets() -> Outcome {
    for (n, primes) in [(2usize, [3u64, 5, 7]), (3, [3, 5, 7])] {
        let z = IdealSpec::parse(&format!("x1^{n}"), None, 0).unwrap();
        for p in primes {
            let r = lct_estimate_via_jets(&z, n - 1, &[p], 1, DEFAULT_BUDGET).map_err(err)?;
            ensure(r.estimate == q(1, n as i64), || format!("x^{n} p={p}: {}", r.estimate))?;
        }
    }
    let cusp = IdealSpec::parse("x1^2 + x2^3", None, 1).unwrap();
    let r = lct_estimate_via_jets(&cusp, 3, &[3], 3, DEFAULT_BUDGET).map_err(err)?;
    ensure(r.partial.iter().all(|e| *e >= q(5, 6)), || format!("cusp estimates {:?}", r.partial))?;
    ensure(r.partial.windows(2).all(|w| w[1] <= w[0]), || "cusp estimate increased".into())?;
    Ok(format!("x^2 -> 1/2, x^3 -> 1/3; cusp estimates {}", r.partial.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")))
}

fn razmyslov_word() -> Outcome {
    let text = "[[[[x3,x2],x2],x1],x2] - [[[[x3,x2],x1],x2],x2]";
    let lie = parse_lie(text).unwrap();
    let w = Word::Lie(lie.clone());
    // exhaustive over sl_2(F_5)^3
    let ring5 = fp(5);
    let sl2 = alg("A:1");
    let map = WordMap::new(w.clone(), &Carrier::Algebra(sl2.clone()), &ring5, DEFAULT_BUDGET).map_err(err)?;
    let h = map.histogram(&CountOptions::enumerate()).map_err(err)?;
    ensure(h.counts.len() == 1 && h.get(0) == 5u128.pow(9), || format!("nonzero values on sl_2(F_5): {:?}", h.counts.len()))?;
    // random tuples through the matrix realization
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..10_000 {
        let xs: Vec<_> = (0..3).map(|_| sl2.to_matrix(&ring5, &(0..3).map(|_| rng.gen_range(0..5)).collect::<Vec<_>>())).collect();
        let v = lie.eval_matrices(&ring5, &xs).map_err(err)?;
        ensure(v.is_zero(), || "random tuple gives a nonzero matrix".into())?;
    }
    let ring2 = fp(2);
    let sl3 = alg("A:2");
    let map3 = WordMap::new(w, &Carrier::Algebra(sl3.clone()), &ring2, DEFAULT_BUDGET).map_err(err)?;
    for attempt in 0..100_000 {
        let x: Vec<u64> = (0..24).map(|_| rng.gen_range(0..2)).collect();
        if map3.eval_key(&x) != 0 {
            let xs: Vec<_> = x.chunks(8).map(|c| sl3.to_matrix(&ring2, c)).collect();
            let v = lie.eval_matrices(&ring2, &xs).map_err(err)?;
            ensure(!v.is_zero(), || "coordinate and matrix evaluations disagree".into())?;
            return Ok(format!("zero on all 5^9 tuples + 10^4 samples; nonzero on sl_3(F_2) after {} draws", attempt + 1));
        }
    }
    Err("no nonzero value found on sl_3(F_2)".into())
}

fn unipotent_cover() -> Outcome {
    for p in [3u64, 5] {
        let (reached, order) = unipotent_cover_fraction(1, p, 13, DEFAULT_BUDGET).map_err(err)?;
        ensure(reached == order, || format!("p={p}: {reached}/{order}"))?;
    }
    Ok("fraction 1 at p = 3, 5".into())
}

fn master_identity() -> Outcome {
    let mut n = 0;
    for lit in ["A:1", "A:2", "C:2"] {
        let a = alg(lit);
        for text in ["[x1,x2]", "[[x1,x2],x2]"] {
            let w = parse_lie(text).unwrap();
            let g = dph_build(&a, &w).map_err(err)?;
            for t in 1..=2 {
                let Word::Lie(wt) = convolution_power(&Word::Lie(w.clone()), t).map_err(err)? else { unreachable!() };
                let direct = lie_word_polymap(&wt, &a).map_err(err)?;
                ensure(g.induced_polymap(t).coords == direct.coords, || format!("{lit} {text} t={t}"))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} (g, w, t) cases coordinate-exact"))
}

fn measure_algebra() -> Outcome {
    let ring = fp(3);
    let sl2 = Carrier::Sl(2);
    let corpus = ["x1 x2 x1^-1 x2^-1", "x1^2", "x1^3", "x1 x2 x1 x2^-1", "x1^2 x2^2"];
    let words: Vec<Word> = corpus.iter().map(|t| word(t, WordKind::Group)).collect();
    let mut measures = vec![];
    for w in &words {
        measures.push(measure_of(w, &sl2, &ring, CountMethod::Enumerate)?);
    }
    let c = measures[0].1.carrier();
    let mut pairs = 0;
    for (i, w1) in words.iter().enumerate() {
        for (j, w2) in words.iter().enumerate() {
            let conv = measures[i].0.convolve(&measures[j].0, c).map_err(err)?;
            let direct = measure_of(&word_concat(w1, w2).map_err(err)?, &sl2, &ring, CountMethod::Enumerate)?.0;
            ensure(conv == direct, || format!("{} * {}", corpus[i], corpus[j]))?;
            pairs += 1;
        }
    }
    for (i, (mu, _)) in measures.iter().enumerate() {
        let lhs = mu.convolve(mu, c).map_err(err)?.distance(Norm::LInf).exact.unwrap();
        let rhs = mu.distance(Norm::L2).exact.unwrap();
        ensure(lhs <= rhs, || format!("Young bound fails for {}: {lhs} > {rhs}", corpus[i]))?;
    }
    Ok(format!("{pairs} ordered pairs exact; Young bound on all 5"))
}

fn mixing_sanity() -> Outcome {
    let (mu, map) = measure_of(&word("x1 x2 x1^-1 x2^-1", WordKind::Group), &Carrier::Sl(2), &fp(5), CountMethod::Auto)?;
    let c = map.carrier();
    let half = q(1, 2);
    let quarter = q(1, 4);
    let mut times = vec![];
    for a in [Norm::L1, Norm::L2, Norm::LInf] {
        let r = mixing_time(&mu, c, a, &half, 64).map_err(err)?;
        let doubled = mu.power(2 * r.t, c).map_err(err)?.distance(a);
        ensure(doubled.less_than(&quarter), || format!("L^{a}: distance at 2t = {} not < 1/4", doubled.value))?;
        times.push(r.t);
    }
    ensure(times[0] <= times[2], || format!("t_1 = {} > t_inf = {}", times[0], times[2]))?;
    let table = distance_table(&mu, c, &[Norm::L2, Norm::LInf], times[2] * 2).map_err(err)?;
    for k in 0..2 {
        ensure(table.windows(2).all(|w| w[1].1[k].le(&w[0].1[k])), || "distance table increases".into())?;
    }
    Ok(format!("t_1 = {}, t_2 = {}, t_inf = {}", times[0], times[1], times[2]))
}

/// Returns (outcome, tolerated) where `tolerated` marks a shortfall that the
/// hardware rules out.
fn performance() -> (Outcome, bool) {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let run = || -> Result<(String, bool), String> {
        let comm = word("[x1,x2]", WordKind::Lie);
        let map = WordMap::new(comm.clone(), &Carrier::parse("A:1").unwrap(), &fp(7), DEFAULT_BUDGET).map_err(err)?;
        let start = Instant::now();
        let n0 = map.fiber_count(0, &CountOptions::enumerate()).map_err(err)?;
        let t_fiber = start.elapsed();
        ensure(n0 == 2737, || format!("fiber over 0 is {n0}"))?;
        ensure(t_fiber < Duration::from_secs(1), || format!("sl_2(F_7) fiber count took {t_fiber:?}"))?;

        let big = WordMap::new(comm, &Carrier::parse("A:2").unwrap(), &fp(3), DEFAULT_BUDGET).map_err(err)?;
        let timed = |workers| -> Result<(String, Duration), String> {
            let start = Instant::now();
            let h = big.histogram(&CountOptions { workers, ..CountOptions::enumerate() }).map_err(err)?;
            let t = start.elapsed();
            Ok((Measure::from_histogram(&h).to_json(big.carrier()).to_string(), t))
        };
        let (one, t1) = timed(1)?;
        let (eight, t8) = timed(8)?;
        ensure(one == eight, || "1-worker and 8-worker measures differ".into())?;
        let speedup = t1.as_secs_f64() / t8.as_secs_f64();
        let detail = format!(
            "fiber {:.3}s; sl_3(F_3) measure 1 worker {:.2}s, 8 workers {:.2}s, identical, speed-up {speedup:.2}x on {threads} hardware threads",
            t_fiber.as_secs_f64(),
            t1.as_secs_f64(),
            t8.as_secs_f64()
        );
        Ok((detail, speedup >= 4.0))
    };
    match run() {
        Ok((detail, true)) => (Ok(detail), false),
        Ok((detail, false)) => (Err(format!("speed-up below 4x: {detail}")), threads < 8),
        Err(e) => (Err(e), false),
    }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("Fourier transform of the commutator measure is |Cent(Z)|/|g|", fourier_identity),
        ("second convolution power at 0 equals the centralizer census", double_star),
        ("|Upsilon|/|g|^2 - 1 within p^-1/2", upsilon_trend),
        ("double commutator within the flatness band, single commutator outside", flatness_signature),
        ("h_X for x^2 = 0 and SL_2", hx_exact),
        ("truncated-ring points equal jet points", jet_identification),
        ("lct estimates via jets", lct_jets),
        ("degree-5 word vanishes on sl_2, not on sl_3", razmyslov_word),
        ("unipotent factors cover SL_2", unipotent_cover),
        ("induced map of the polyhypergraph equals the word map", master_identity),
        ("measure convolution and Young bound", measure_algebra),
        ("mixing times on SL_2(F_5)", mixing_sanity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{:.1}s]", i + 1, start.elapsed().as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e}", i + 1);
            }
        }
    }
    let (outcome, tolerated) = performance();
    match outcome {
        Ok(d) => println!("PASS 13 performance: {d}"),
        Err(e) if tolerated => println!("FAIL 13 performance (hardware-limited, not counted): {e}"),
        Err(e) => {
            failed += 1;
            println!("FAIL 13 performance: {e}");
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
