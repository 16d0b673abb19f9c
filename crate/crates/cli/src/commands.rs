//! One function per subcommand, each producing a [`Report`].

use crate::config::{parse_moduli, Cmd, Opts};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use std::sync::Arc;
use wordlab_core::chevalley::unipotent_cover_fraction;
use wordlab_core::counting::{
    additive_fourier, additive_fourier_float, centralizer_census, commutator_fourier_check, distance_table, epsilon_flat_estimate,
    flatness_scan, hx_sequence, jet_point_counts, lct_estimate_via_jets, mixing_time, upsilon_count, FiniteCarrier, Norm, Space,
};
use wordlab_core::dph::dph_build;
use wordlab_core::words::{magnus_symbol, parse_word, Word};
use wordlab_core::{Carrier, Error, Mat, Measure, Result, WordKind, WordMap};

/// Plain text for the terminal plus a structured result and a table.
pub struct Report {
    pub text: String,
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Pre-rendered CSV that replaces the generic table.
    pub csv: Option<String>,
    /// Set when the computation finished but the check it ran did not hold.
    pub failed: bool,
}

impl Report {
    fn new(text: String, result: Value) -> Report {
        Report { text, result, header: vec![], rows: vec![], csv: None, failed: false }
    }

    fn table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Report {
        self.header = header;
        self.rows = rows;
        self
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn word(o: &Opts) -> Result<Word> {
    parse_word(o.word_text()?, o.word_kind())
}

fn space(o: &Opts) -> Result<Arc<Space>> {
    Ok(Arc::new(Space::build(&o.carrier()?, &o.ring()?, o.budget)?))
}

fn word_measure(w: Word, sp: &Arc<Space>, o: &Opts) -> Result<Measure> {
    let map = WordMap::on_space(w, sp.clone())?;
    Ok(Measure::from_histogram(&map.histogram(&o.count_options())?))
}

fn frac(r: &BigRational) -> String {
    r.to_string()
}

fn measure_rows(mu: &Measure, c: &dyn FiniteCarrier) -> Vec<Vec<String>> {
    mu.support().map(|k| vec![k.to_string(), c.format(k), frac(&mu.mass(k))]).collect()
}

fn measure_text(mu: &Measure, c: &dyn FiniteCarrier) -> String {
    let mut s = format!("carrier {} order {} support {}\n", mu.carrier, mu.order, mu.support().count());
    for k in mu.support() {
        s += &format!("{} {}\n", c.format(k), mu.mass(k));
    }
    s
}

/// Target key: "0" is the additive zero, "I"/"-I" the scalar matrices,
/// anything else comma-separated coordinates or row-major entries.
fn target_key(sp: &Space, t: &str) -> Result<u64> {
    let t = t.trim();
    let ints =
        || -> Result<Vec<i64>> { t.split(',').map(|v| v.trim().parse().map_err(|_| invalid(format!("malformed target '{t}'")))).collect() };
    match sp {
        Space::Module(mc) => {
            if t == "0" {
                return Ok(0);
            }
            let v = ints()?;
            if v.len() != mc.alg.dim {
                return Err(invalid(format!("target needs {} coordinates, got {}", mc.alg.dim, v.len())));
            }
            Ok(mc.encode(&v.iter().map(|&c| mc.ring.from_int(c as i128)).collect::<Vec<_>>()))
        }
        Space::Group(gc) => {
            let ring = &gc.group.group.ring;
            let n = gc.group.group.n;
            let m = match t {
                "I" | "1" | "e" => Mat::identity(ring, n),
                "-I" | "-1" => {
                    let mut m = Mat::zero(n);
                    for i in 0..n {
                        m.data[i * n + i] = ring.from_int(-1);
                    }
                    m
                }
                _ => {
                    let v = ints()?;
                    if v.len() != n * n {
                        return Err(invalid(format!("target needs {} matrix entries, got {}", n * n, v.len())));
                    }
                    Mat::from_ints(ring, n, &v)
                }
            };
            gc.key_of(&m).ok_or_else(|| invalid(format!("target '{t}' is not in {}", gc.label())))
        }
    }
}

pub fn run(cmd: Cmd, o: &Opts) -> Result<Report> {
    match cmd {
        Cmd::Measure => measure(o),
        Cmd::Fiber => fiber(o),
        Cmd::Mix => mix(o),
        Cmd::Convolve => convolve(o),
        Cmd::Fourier => fourier(o),
        Cmd::VerifyCommutator => verify_commutator(o),
        Cmd::ScanFlat => scan_flat(o),
        Cmd::EpsFlat => eps_flat(o),
        Cmd::Hx => hx(o),
        Cmd::Jets => jets(o),
        Cmd::Lct => lct(o),
        Cmd::Dph => dph(o),
        Cmd::Symbol => symbol(o),
        Cmd::Cover => cover(o),
    }
}

fn measure(o: &Opts) -> Result<Report> {
    let sp = space(o)?;
    let c = sp.carrier();
    if let Some(n) = o.samples {
        let map = WordMap::on_space(word(o)?, sp.clone())?;
        let h = map.sample(n, o.seed, o.workers.max(1))?;
        let mut text = format!("carrier {} samples {}\n", h.carrier, h.samples);
        let mut rows = vec![];
        let mut masses = vec![];
        for &k in h.counts.keys() {
            let (p, se) = h.estimate(k);
            text += &format!("{} {p:.6} ± {se:.6}\n", c.format(k));
            rows.push(vec![k.to_string(), c.format(k), h.counts[&k].to_string(), format!("{p}"), format!("{se}")]);
            masses.push(json!({"key": k, "element": c.format(k), "hits": h.counts[&k], "estimate": p, "stderr": se}));
        }
        let result = json!({"carrier": h.carrier, "samples": h.samples, "masses": masses});
        return Ok(Report::new(text, result).table(vec!["key", "element", "hits", "estimate", "stderr"], rows));
    }
    let mu = word_measure(word(o)?, &sp, o)?;
    Ok(Report::new(measure_text(&mu, c), mu.to_json(c)).table(vec!["key", "element", "mass"], measure_rows(&mu, c)))
}

fn fiber(o: &Opts) -> Result<Report> {
    let sp = space(o)?;
    let target = o.target.as_deref().unwrap_or(match &*sp {
        Space::Module(_) => "0",
        Space::Group(_) => "I",
    });
    let key = target_key(&sp, target)?;
    let map = WordMap::on_space(word(o)?, sp.clone())?;
    let n = map.fiber_count(key, &o.count_options())?;
    let inputs = map.input_count();
    let result = json!({"target": sp.carrier().format(key), "count": n.to_string(), "inputs": inputs.to_string()});
    Ok(Report::new(format!("{n}\n"), result)
        .table(vec!["target", "count", "inputs"], vec![vec![sp.carrier().format(key), n.to_string(), inputs.to_string()]]))
}

fn norms(o: &Opts) -> Result<Vec<Norm>> {
    o.norm.split(',').map(|s| s.trim().parse()).collect()
}

fn mix(o: &Opts) -> Result<Report> {
    let sp = space(o)?;
    if !matches!(&*sp, Space::Group(_)) {
        return Err(Error::UnsupportedCarrier("mix runs on SL_n carriers".into()));
    }
    let c = sp.carrier();
    let mu = word_measure(word(o)?, &sp, o)?;
    let threshold: BigRational = o.threshold.parse().map_err(|_| invalid(format!("malformed threshold '{}'", o.threshold)))?;
    let norms = norms(o)?;
    let mut text = String::new();
    let mut times = vec![];
    let mut t_hi = 1;
    for &a in &norms {
        let r = mixing_time(&mu, c, a, &threshold, o.t_max)?;
        text += &format!("t_{a} = {}\n", r.t);
        times.push(json!({"norm": a.to_string(), "t": r.t}));
        t_hi = t_hi.max(r.t);
    }
    let table = distance_table(&mu, c, &norms, t_hi)?;
    let mut rows = vec![];
    let mut dist = vec![];
    for (t, ds) in &table {
        for (a, d) in norms.iter().zip(ds) {
            let exact = d.exact.as_ref().map(frac).unwrap_or_default();
            rows.push(vec![t.to_string(), a.to_string(), exact.clone(), format!("{}", d.value)]);
            dist.push(json!({"t": t, "norm": a.to_string(), "exact": exact, "value": d.value}));
            text += &format!("t={t} L{a} {}\n", d.value);
        }
    }
    let result = json!({"threshold": frac(&threshold), "mixing_times": times, "distances": dist});
    Ok(Report::new(text, result).table(vec!["t", "norm", "exact", "value"], rows))
}

fn convolve(o: &Opts) -> Result<Report> {
    let sp = space(o)?;
    let c = sp.carrier();
    let mu = word_measure(word(o)?, &sp, o)?;
    let out = match (&o.word2, o.power) {
        (Some(w2), None) => mu.convolve(&word_measure(parse_word(w2, o.word_kind())?, &sp, o)?, c)?,
        (None, Some(t)) if t >= 1 => mu.power(t, c)?,
        (None, Some(_)) => return Err(invalid("--power must be at least 1")),
        (None, None) => return Err(invalid("convolve needs --word2 or --power")),
        (Some(_), Some(_)) => return Err(invalid("give either --word2 or --power")),
    };
    Ok(Report::new(measure_text(&out, c), out.to_json(c)).table(vec!["key", "element", "mass"], measure_rows(&out, c)))
}

fn fourier(o: &Opts) -> Result<Report> {
    let sp = space(o)?;
    let Space::Module(mc) = &*sp else {
        return Err(Error::UnsupportedCarrier("Fourier analysis runs on algebra carriers".into()));
    };
    let mu = word_measure(word(o)?, &sp, o)?;
    let f: std::collections::BTreeMap<u64, BigRational> = mu.support().map(|k| (k, mu.mass(k))).collect();
    let mut text = String::new();
    let mut rows = vec![];
    let mut vals = vec![];
    if o.float {
        let fm = f.iter().map(|(&k, v)| (k, v.to_f64().unwrap_or(f64::NAN))).collect();
        for (z, v) in additive_fourier_float(mc, &fm)?.iter().enumerate() {
            let e = mc.format(z as u64);
            text += &format!("{e} {:.12} {:+.12}i\n", v.re, v.im);
            rows.push(vec![z.to_string(), e.clone(), format!("{}", v.re), format!("{}", v.im)]);
            vals.push(json!({"key": z, "element": e, "re": v.re, "im": v.im}));
        }
        return Ok(Report::new(text, json!({"values": vals})).table(vec!["key", "element", "re", "im"], rows));
    }
    for (z, v) in additive_fourier(mc, &f)?.iter().enumerate() {
        let e = mc.format(z as u64);
        let (shown, coeffs) = match v.as_rational() {
            Some(r) => (frac(&r), vec![frac(&r)]),
            None => {
                let cs: Vec<String> = v.coeffs().iter().map(frac).collect();
                (format!("zeta-coefficients [{}]", cs.join(",")), cs)
            }
        };
        text += &format!("{e} {shown}\n");
        rows.push(vec![z.to_string(), e.clone(), coeffs.join(" ")]);
        vals.push(json!({"key": z, "element": e, "value": coeffs}));
    }
    Ok(Report::new(text, json!({"values": vals})).table(vec!["key", "element", "value"], rows))
}

fn prime_field(o: &Opts) -> Result<u64> {
    let ring = o.ring()?;
    if ring.spec().kind != wordlab_core::RingKind::PrimeField {
        return Err(Error::UnsupportedCarrier(format!("{} is not a prime field", ring.literal())));
    }
    Ok(ring.size())
}

fn algebra(o: &Opts) -> Result<wordlab_core::ChevalleyAlgebra> {
    match o.carrier()? {
        Carrier::Algebra(a) => Ok(a),
        c => Err(Error::UnsupportedCarrier(format!("{} is not an algebra", c.literal()))),
    }
}

fn verify_commutator(o: &Opts) -> Result<Report> {
    let alg = algebra(o)?;
    let p = prime_field(o)?;
    let chk = commutator_fourier_check(&alg, p, &o.count_options())?;
    let ups = upsilon_count(&alg, p, o.budget)?;
    let census = centralizer_census(&alg, p, o.budget)?;
    let lhs = chk.lhs.as_ref().map(frac);
    let (verdict, failed) = match chk.exact_match() {
        Some(true) => ("EXACT MATCH", false),
        Some(false) => ("MISMATCH", true),
        None => ("CENSUS ONLY", false),
    };
    let text = format!(
        "{verdict} at p={p} on {}: enumeration {} census {}; |Upsilon(F_{p})| = {}, |Upsilon|/|g|^2 - 1 = {}\n",
        chk.algebra,
        lhs.as_deref().unwrap_or("over budget"),
        chk.rhs,
        ups.count,
        ups.deviation
    );
    let nullities: Vec<Value> = census.counts.iter().map(|(k, v)| json!({"nullity": k, "count": v.to_string()})).collect();
    let result = json!({
        "verdict": verdict, "p": p, "algebra": chk.algebra, "enumeration": lhs, "census": frac(&chk.rhs),
        "upsilon": ups.count.to_string(), "deviation": frac(&ups.deviation), "nullities": nullities,
    });
    let rows = vec![vec![
        p.to_string(),
        chk.algebra.clone(),
        lhs.unwrap_or_default(),
        frac(&chk.rhs),
        ups.count.to_string(),
        frac(&ups.deviation),
    ]];
    let mut r = Report::new(text, result).table(vec!["p", "algebra", "enumeration", "census", "upsilon", "deviation"], rows);
    r.failed = failed;
    Ok(r)
}

fn series_report(s: wordlab_core::DiagnosticSeries) -> Result<Report> {
    let mut text = String::new();
    for r in &s.rows {
        let shown = r.exact.as_ref().map(frac).unwrap_or_else(|| format!("{}", r.value));
        text += &format!("p={} k={} {} = {shown}\n", r.p, r.k, r.statistic);
    }
    for (name, v) in &s.verdicts {
        text += &format!("verdict {name}: {v} (heuristic)\n");
    }
    let mut rep = Report::new(text, s.to_json());
    rep.csv = Some(s.to_csv()?);
    Ok(rep)
}

fn scan_flat(o: &Opts) -> Result<Report> {
    let g = o.grid()?;
    if g.k != [1] {
        return Err(invalid("scan-flat runs over prime fields; drop k from the grid"));
    }
    series_report(flatness_scan(&word(o)?, &o.carrier()?, &g.p, o.tolerance_c, &o.count_options())?)
}

fn eps_flat(o: &Opts) -> Result<Report> {
    let g = o.grid()?;
    let cells: Vec<(u64, u32)> = g.p.iter().flat_map(|&p| g.k.iter().map(move |&k| (p, k))).collect();
    series_report(epsilon_flat_estimate(&word(o)?, &o.carrier()?, &cells, &o.count_options())?)
}

fn hx(o: &Opts) -> Result<Report> {
    let ideal = o.ideal()?;
    let moduli = match &o.moduli {
        Some(m) => parse_moduli(m)?,
        None => {
            let g = o.grid()?;
            let mut m = vec![];
            for &p in &g.p {
                for &k in &g.k {
                    m.push(p.checked_pow(k).ok_or_else(|| invalid(format!("{p}^{k} overflows")))?);
                }
            }
            m
        }
    };
    series_report(hx_sequence(&ideal, o.ideal.as_deref().unwrap_or(""), &moduli, o.tolerance_c, o.budget)?)
}

fn jets(o: &Opts) -> Result<Report> {
    let ideal = o.ideal()?;
    let g = o.grid()?;
    let mut text = String::new();
    let mut rows = vec![];
    let mut all = true;
    for &p in &g.p {
        for m in 0..=o.m_max {
            let (arcs, jets) = jet_point_counts(&ideal, p, m, o.budget)?;
            all &= arcs == jets;
            text += &format!("p={p} m={m} arcs={arcs} jets={jets}\n");
            rows.push(vec![p.to_string(), m.to_string(), arcs.to_string(), jets.to_string()]);
        }
    }
    text += if all { "all counts agree\n" } else { "MISMATCH\n" };
    let rj: Vec<Value> = rows.iter().map(|r| json!({"p": r[0], "m": r[1], "arcs": r[2], "jets": r[3]})).collect();
    let mut rep = Report::new(text, json!({"agree": all, "rows": rj})).table(vec!["p", "m", "arcs", "jets"], rows);
    rep.failed = !all;
    Ok(rep)
}

fn lct(o: &Opts) -> Result<Report> {
    let ideal = o.ideal()?;
    let g = o.grid()?;
    let r = lct_estimate_via_jets(&ideal, o.m_max, &g.p, o.levels, o.budget)?;
    let mut text = String::new();
    let mut rows = vec![];
    for row in &r.rows {
        let counts: Vec<String> = row.counts.iter().map(|(q, c)| format!("{q}:{c}")).collect();
        text += &format!("m={} p={} counts {} slope {:.4} dim {}\n", row.m, row.p, counts.join(" "), row.slope, row.dim);
        rows.push(vec![row.m.to_string(), row.p.to_string(), counts.join(" "), format!("{}", row.slope), row.dim.to_string()]);
    }
    text += &format!("lct estimate {}\n", r.estimate);
    let partial: Vec<String> = r.partial.iter().map(frac).collect();
    let rj: Vec<Value> = r.rows.iter().map(|x| json!({"m": x.m, "p": x.p, "counts": x.counts.iter().map(|(q, c)| json!([q, c.to_string()])).collect::<Vec<_>>(), "slope": x.slope, "dim": x.dim})).collect();
    let result = json!({"estimate": frac(&r.estimate), "partial": partial, "rows": rj});
    Ok(Report::new(text, result).table(vec!["m", "p", "counts", "slope", "dim"], rows))
}

fn dph(o: &Opts) -> Result<Report> {
    let alg = algebra(o)?;
    let Word::Lie(w) = parse_word(o.word_text()?, WordKind::Lie)? else { unreachable!() };
    let g = dph_build(&alg, &w)?;
    let missing = g.missing_types();
    let mut text = format!("{} vertices, {} edges, {} types", g.n_vertices(), g.edges.len(), g.types.len());
    if !missing.is_empty() {
        text += &format!(", {} without edges (non-generating)", missing.len());
    }
    text.push('\n');
    let mut result = json!({"graph": g.to_json()});
    if o.grid.is_some() {
        let mut per_prime = vec![];
        for p in o.grid()?.p {
            let dead = g.edges_vanishing_mod(p);
            let lost: Vec<&str> = g.missing_types_mod(p).iter().map(|&l| g.labels[l].as_str()).collect();
            text += &format!("p={p}: {} edges vanish mod p", dead.len());
            if !lost.is_empty() {
                text += &format!(", types without edges: {}", lost.join(" "));
            }
            text.push('\n');
            per_prime.push(json!({"p": p, "vanishing_edges": dead, "types_without_edges": lost}));
        }
        result["mod_p"] = per_prime.into();
    }
    if let Some(t) = o.power {
        if t == 0 {
            return Err(invalid("--power must be at least 1"));
        }
        let phi = g.induced_polymap(t);
        text += &format!("induced map for t={t}:\n{phi}\n");
        result["induced"] = phi.to_json();
    }
    Ok(Report::new(text, result))
}

fn symbol(o: &Opts) -> Result<Report> {
    let Word::Group(w) = parse_word(o.word_text()?, WordKind::Group)? else { unreachable!() };
    let (sym, d) = magnus_symbol(&w, o.max_degree)?;
    let text = format!("degree={d} symbol={sym}\n");
    Ok(Report::new(text, json!({"degree": d, "symbol": sym.to_string()}))
        .table(vec!["degree", "symbol"], vec![vec![d.to_string(), sym.to_string()]]))
}

fn cover(o: &Opts) -> Result<Report> {
    let n = match o.carrier()? {
        Carrier::Sl(n) if n % 2 == 0 => n / 2,
        c => return Err(Error::UnsupportedCarrier(format!("cover needs SL_2n, got {}", c.literal()))),
    };
    let primes = match (&o.grid, &o.ring) {
        (Some(_), _) => o.grid()?.p,
        (None, Some(_)) => vec![prime_field(o)?],
        (None, None) => return Err(invalid("cover needs --ring fp:p or --grid")),
    };
    let mut text = String::new();
    let mut rows = vec![];
    let mut rj = vec![];
    for p in primes {
        let (reached, order) = unipotent_cover_fraction(n, p, o.steps, o.budget)?;
        text += &format!("p={p} reached {reached} of {order}\n");
        rows.push(vec![p.to_string(), o.steps.to_string(), reached.to_string(), order.to_string()]);
        rj.push(json!({"p": p, "steps": o.steps, "reached": reached.to_string(), "order": order.to_string()}));
    }
    Ok(Report::new(text, json!({"rows": rj})).table(vec!["p", "steps", "reached", "order"], rows))
}
