//! Flag parsing into a resolved experiment configuration.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wordlab_core::counting::{CountMethod, CountOptions, DEFAULT_BUDGET};
use wordlab_core::{Carrier, Error, IdealSpec, Result, Ring, WordKind};

#[derive(Parser, Debug)]
#[command(name = "wordlab", version, about = "Word maps over finite rings: fiber counts, measures, jets, degenerations")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cmd {
    /// Exact (or sampled) word measure on a carrier
    Measure,
    /// Size of one fiber of the word map
    Fiber,
    /// L^a distances of convolution powers and mixing times on SL_n
    Mix,
    /// Convolution of two word measures, or a convolution power
    Convolve,
    /// Additive Fourier transform of a word measure on g(F_p)
    Fourier,
    /// Compare the commutator's second convolution power at 0 with the centralizer census
    VerifyCommutator,
    /// Normalized fiber ratios of a word map across primes
    ScanFlat,
    /// Flatness exponent estimates over a (p, k) grid
    EpsFlat,
    /// h_X(n) = |X(Z/n)| / n^dim X
    Hx,
    /// Arc counts against truncated-ring point counts
    Jets,
    /// Log canonical threshold estimate from jet dimensions
    Lct,
    /// Polyhypergraph of a Lie word, optionally its induced map
    Dph,
    /// Lowest nonvanishing Magnus term of a group word
    Symbol,
    /// Fraction of SL_n reached by products of unipotent factors
    Cover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Group,
    Lie,
    Assoc,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Word text, e.g. "[x1,x2]" or "x1 x2 x1^-1 x2^-1"
    #[arg(long, global = true)]
    pub word: Option<String>,
    /// Second word for `convolve`
    #[arg(long, global = true)]
    pub word2: Option<String>,
    /// Word kind; inferred from the carrier when omitted
    #[arg(long, value_enum, global = true)]
    pub kind: Option<KindArg>,
    /// A:2, B:3, C:2, D:4, mat:3 or sl:3
    #[arg(long, global = true)]
    pub carrier: Option<String>,
    /// fp:5, fq:2^3, zmod:3^2, tpoly:3^2, tpoly:3^2^2
    #[arg(long, global = true)]
    pub ring: Option<String>,
    /// Low-to-high coefficients of the residue field modulus
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Prime and level grid, e.g. "p=3,5,7;k=1..3"
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Primes dropped from every grid, e.g. "2,3"
    #[arg(long = "exclude-primes", global = true)]
    pub exclude_primes: Option<String>,
    /// "0", "I", "-I" or comma-separated coordinates / matrix entries
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub target: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Sample count; exhaustive enumeration when omitted
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// Evaluate every tuple instead of using shortcuts
    #[arg(long, global = true)]
    pub enumerate: bool,
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[arg(long = "tolerance-c", global = true, default_value_t = 1.0)]
    pub tolerance_c: f64,
    /// Norm exponents for `mix`: "1", "2", "inf" or a real a >= 1
    #[arg(long, global = true, default_value = "1,2,inf")]
    pub norm: String,
    /// Mixing threshold as an exact rational
    #[arg(long, global = true, default_value = "1/2")]
    pub threshold: String,
    #[arg(long = "t-max", global = true, default_value_t = 20)]
    pub t_max: usize,
    /// Convolution power for `convolve` (without --word2) and `dph`
    #[arg(long, global = true)]
    pub power: Option<usize>,
    /// Equations separated by ';', or "sl:n" for det - 1
    #[arg(long, global = true)]
    pub ideal: Option<String>,
    /// Number of variables of the ideal; defaults to the largest used
    #[arg(long, global = true)]
    pub vars: Option<usize>,
    /// Dimension of X; defaults to vars minus equations
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Explicit moduli for `hx`, overriding the grid
    #[arg(long, global = true)]
    pub moduli: Option<String>,
    #[arg(long = "m-max", global = true, default_value_t = 2)]
    pub m_max: usize,
    /// Field tower levels used for jet dimensions
    #[arg(long, global = true, default_value_t = 1)]
    pub levels: u32,
    /// Number of unipotent factors for `cover`
    #[arg(long, global = true, default_value_t = 4)]
    pub steps: usize,
    #[arg(long = "max-degree", global = true)]
    pub max_degree: Option<usize>,
    /// Floating-point Fourier transform
    #[arg(long, global = true)]
    pub float: bool,
}

/// Everything that determines an output, echoed into it.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub subcommand: Cmd,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    pub budget: u64,
    pub workers: usize,
    pub method: &'static str,
    pub tolerance_c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideal: Option<String>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub p: Vec<u64>,
    pub k: Vec<u32>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    let mut out = vec![];
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| invalid(format!("bad {what} range '{part}'")))?;
            let b: u64 = b.trim().parse().map_err(|_| invalid(format!("bad {what} range '{part}'")))?;
            if a > b {
                return Err(invalid(format!("empty {what} range '{part}'")));
            }
            for v in a..=b {
                out.push(v.to_string().parse().map_err(|_| invalid(format!("bad {what} '{v}'")))?);
            }
        } else {
            out.push(part.parse().map_err(|_| invalid(format!("bad {what} '{part}'")))?);
        }
    }
    if out.is_empty() {
        return Err(invalid(format!("empty {what} list")));
    }
    Ok(out)
}

/// `p=3,5,7;k=1..3`; k defaults to 1.
pub fn parse_grid(s: &str) -> Result<Grid> {
    let mut p = None;
    let mut k = None;
    for part in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        match part.split_once('=') {
            Some(("p", v)) => p = Some(parse_list::<u64>(v, "prime")?),
            Some(("k", v)) => k = Some(parse_list::<u32>(v, "level")?),
            _ => return Err(invalid(format!("grid entry '{part}' is not p=... or k=..."))),
        }
    }
    let p = p.ok_or_else(|| invalid("grid needs p=..."))?;
    for &q in &p {
        if !wordlab_core::ring::is_prime(q) {
            return Err(Error::NotPrime(q));
        }
    }
    Ok(Grid { p, k: k.unwrap_or_else(|| vec![1]) })
}

pub fn parse_moduli(s: &str) -> Result<Vec<u64>> {
    let m: Vec<u64> = parse_list(s, "modulus")?;
    if m.iter().any(|&n| n < 2) {
        return Err(invalid("moduli must be at least 2"));
    }
    Ok(m)
}

impl Opts {
    pub fn count_options(&self) -> CountOptions {
        CountOptions {
            budget: self.budget,
            workers: self.workers.max(1),
            method: if self.enumerate { CountMethod::Enumerate } else { CountMethod::Auto },
        }
    }

    pub fn word_text(&self) -> Result<&str> {
        self.word.as_deref().ok_or_else(|| invalid("--word is required"))
    }

    pub fn carrier(&self) -> Result<Carrier> {
        Carrier::parse(self.carrier.as_deref().ok_or_else(|| invalid("--carrier is required"))?)
    }

    pub fn ring(&self) -> Result<Ring> {
        let lit = self.ring.as_deref().ok_or_else(|| invalid("--ring is required"))?;
        let modulus = self.modulus.as_deref().map(|m| parse_list::<u64>(m, "modulus coefficient")).transpose()?;
        Ring::parse(lit, modulus)
    }

    pub fn grid(&self) -> Result<Grid> {
        let mut g = parse_grid(self.grid.as_deref().ok_or_else(|| invalid("--grid is required"))?)?;
        if let Some(ex) = &self.exclude_primes {
            let ex: Vec<u64> = parse_list(ex, "excluded prime")?;
            g.p.retain(|p| !ex.contains(p));
            if g.p.is_empty() {
                return Err(invalid("every grid prime is excluded"));
            }
        }
        Ok(g)
    }

    /// The explicit kind, else lie on algebras, group on SL_n, group with no carrier.
    pub fn word_kind(&self) -> WordKind {
        match self.kind {
            Some(KindArg::Group) => WordKind::Group,
            Some(KindArg::Lie) => WordKind::Lie,
            Some(KindArg::Assoc) => WordKind::Assoc,
            None => match self.carrier.as_deref().map(Carrier::parse) {
                Some(Ok(Carrier::Algebra(_))) => WordKind::Lie,
                _ => WordKind::Group,
            },
        }
    }

    pub fn ideal(&self) -> Result<IdealSpec> {
        let text = self.ideal.as_deref().ok_or_else(|| invalid("--ideal is required"))?;
        if let Some(n) = text.trim().strip_prefix("sl:") {
            let n: usize = n.parse().map_err(|_| invalid(format!("malformed ideal '{text}'")))?;
            if n == 0 {
                return Err(invalid("sl:0"));
            }
            let mut sl = IdealSpec::sl(n);
            if let Some(d) = self.dim {
                sl.dim = d;
            }
            return Ok(sl);
        }
        let lines = text.replace(';', "\n");
        let mut spec = IdealSpec::parse(&lines, self.vars, 0)?;
        spec.dim = match self.dim {
            Some(d) => d,
            None => spec.n_vars.checked_sub(spec.polys.len()).ok_or_else(|| invalid("more equations than variables; pass --dim"))?,
        };
        Ok(spec)
    }

    pub fn resolve(&self, cmd: Cmd) -> Result<ExperimentConfig> {
        let grid = if self.grid.is_some() { Some(self.grid()?) } else { None };
        let ring = match &self.ring {
            Some(_) => Some(self.ring()?.literal()),
            None => None,
        };
        let carrier = match &self.carrier {
            Some(_) => Some(self.carrier()?.literal()),
            None => None,
        };
        let uses_word = self.word.is_some();
        let kind = uses_word.then(|| match self.word_kind() {
            WordKind::Group => KindArg::Group,
            WordKind::Lie => KindArg::Lie,
            WordKind::Assoc => KindArg::Assoc,
        });
        let mut extra = serde_json::Map::new();
        let mut put = |k: &str, v: serde_json::Value| {
            extra.insert(k.into(), v);
        };
        match cmd {
            Cmd::Mix => {
                put("norm", self.norm.clone().into());
                put("threshold", self.threshold.clone().into());
                put("t_max", self.t_max.into());
            }
            Cmd::Convolve | Cmd::Dph => {
                if let Some(t) = self.power {
                    put("power", t.into());
                }
            }
            Cmd::Hx => {
                if let Some(m) = &self.moduli {
                    put("moduli", parse_moduli(m)?.into());
                }
            }
            Cmd::Jets | Cmd::Lct => {
                put("m_max", self.m_max.into());
                if cmd == Cmd::Lct {
                    put("levels", self.levels.into());
                }
            }
            Cmd::Cover => put("steps", self.steps.into()),
            Cmd::Symbol => {
                if let Some(d) = self.max_degree {
                    put("max_degree", d.into());
                }
            }
            Cmd::Fourier => put("float", self.float.into()),
            _ => {}
        }
        if let Some(ex) = &self.exclude_primes {
            put("exclude_primes", parse_list::<u64>(ex, "excluded prime")?.into());
        }
        if self.modulus.is_some() {
            put("modulus", self.modulus.clone().into());
        }
        if matches!(cmd, Cmd::Hx | Cmd::Jets | Cmd::Lct) {
            let spec = self.ideal()?;
            put("vars", spec.n_vars.into());
            put("dim", spec.dim.into());
        }
        Ok(ExperimentConfig {
            subcommand: cmd,
            word: self.word.clone(),
            word2: self.word2.clone(),
            kind,
            carrier,
            ring,
            grid,
            target: self.target.clone(),
            seed: self.seed,
            samples: self.samples,
            budget: self.budget,
            workers: self.workers.max(1),
            method: if self.enumerate { "enumerate" } else { "auto" },
            tolerance_c: self.tolerance_c,
            ideal: self.ideal.clone(),
            extra,
        })
    }
}
