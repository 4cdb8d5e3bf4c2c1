use std::path::PathBuf;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_calculus::SpaceParams;
use crate::scalar::{parse_exponent_reciprocal, parse_rational, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Decide,
    Index,
    Covering,
    Normcalc,
    VerifyAsymptotics,
    VerifyEmbedding,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Decide => "decide",
            Command::Index => "index",
            Command::Covering => "covering",
            Command::Normcalc => "normcalc",
            Command::VerifyAsymptotics => "verify-asymptotics",
            Command::VerifyEmbedding => "verify-embedding",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            other => Err(Error::Parse(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    Gaussian,
    Bump,
    Tone,
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Builtin::Gaussian),
            "bump" => Ok(Builtin::Bump),
            "tone" => Ok(Builtin::Tone),
            other => Err(Error::Parse(format!("unknown built-in function '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormInput {
    Builtin(Builtin),
    /// Grid function file, binary or CSV by extension.
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub n: usize,
    pub size: usize,
    pub period: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams { n: 1, size: 4096, period: 32.0 }
    }
}

/// Parses `"N,L"`.
pub fn parse_grid(text: &str, n: usize) -> Result<GridParams> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("grid must be 'N,L', got '{text}'")))?;
    let size = a.trim().parse().map_err(|_| Error::Parse(format!("bad grid size '{a}'")))?;
    let period: f64 = parse_rational(b)?.to_f64();
    Ok(GridParams { n, size, period })
}

/// Parses `"c,C"`.
pub fn parse_pair(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected two comma-separated numbers, got '{text}'")))?;
    Ok((parse_rational(a)?.to_f64(), parse_rational(b)?.to_f64()))
}

/// Parses `"lo..hi"` or `"lo..=hi"` (both inclusive).
pub fn parse_range(text: &str) -> Result<(u32, u32)> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("range must be 'lo..hi', got '{text}'")))?;
    let b = b.trim_start_matches('=');
    let lo = a.trim().parse().map_err(|_| Error::Parse(format!("bad range start '{a}'")))?;
    let hi = b.trim().parse().map_err(|_| Error::Parse(format!("bad range end '{b}'")))?;
    if lo > hi {
        return Err(Error::Parse(format!("empty range '{text}'")));
    }
    Ok((lo, hi))
}

/// Parses `"p=2,q=inf,s=1/2,alpha=1/2,n=1"`. `p`, `q` and `alpha` are
/// required; `s` defaults to 0 and `n` to 1. `rp`/`rq` give reciprocals
/// directly.
pub fn parse_space(text: &str) -> Result<SpaceParams<Rational>> {
    let (mut rp, mut rq, mut alpha) = (None, None, None);
    let mut s = Rational::zero();
    let mut n = 1u32;
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
        match key.trim().to_ascii_lowercase().as_str() {
            "p" => rp = Some(parse_exponent_reciprocal(value)?),
            "q" => rq = Some(parse_exponent_reciprocal(value)?),
            "rp" => rp = Some(parse_rational(value)?),
            "rq" => rq = Some(parse_rational(value)?),
            "s" => s = parse_rational(value)?,
            "alpha" | "a" => alpha = Some(parse_rational(value)?),
            "n" => n = value.trim().parse().map_err(|_| Error::Parse(format!("bad dimension '{value}'")))?,
            other => return Err(Error::Parse(format!("unknown space key '{other}'"))),
        }
    }
    let missing = |name: &str| Error::Parse(format!("space '{text}' lacks {name}"));
    let rp = rp.ok_or_else(|| missing("p"))?;
    let rq = rq.ok_or_else(|| missing("q"))?;
    let alpha = alpha.ok_or_else(|| missing("alpha"))?;
    if alpha > Rational::one() {
        return Err(Error::param(format!("alpha must lie in [0,1], got {alpha}")));
    }
    SpaceParams::new(rp, rq, s, alpha, n)
}

/// Exact parameters rendered as text for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceText {
    pub p: String,
    pub q: String,
    pub s: String,
    pub alpha: String,
    pub n: u32,
}

fn exponent_text(r: Rational) -> String {
    if r.is_zero() {
        "inf".into()
    } else {
        (Rational::one() / r).to_string()
    }
}

impl From<&SpaceParams<Rational>> for SpaceText {
    fn from(p: &SpaceParams<Rational>) -> Self {
        SpaceText {
            p: exponent_text(p.rp),
            q: exponent_text(p.rq),
            s: p.s.to_string(),
            alpha: p.alpha.to_string(),
            n: p.n,
        }
    }
}

/// One fully resolved invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub source: Option<SpaceParams<Rational>>,
    pub target: Option<SpaceParams<Rational>>,
    pub grid: GridParams,
    /// Covering constants `(c, C)`; calibrated defaults otherwise.
    pub alpha_constants: Option<(f64, f64)>,
    /// Covering parameter of the `covering` command (else taken from the
    /// source space).
    pub alpha: Option<Rational>,
    pub k_max: Option<i64>,
    pub input: Option<NormInput>,
    pub j_range: Option<(u32, u32)>,
    pub levels: Option<(u32, u32)>,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Binary partition dump written by `covering`.
    pub dump: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            source: None,
            target: None,
            grid: GridParams::default(),
            alpha_constants: None,
            alpha: None,
            k_max: None,
            input: None,
            j_range: None,
            levels: None,
            trials: 0,
            seed: 0,
            out: None,
            dump: None,
            format: Format::Json,
        }
    }

    pub fn with_spaces(mut self, source: &str, target: &str) -> Result<Self> {
        self.source = Some(parse_space(source)?);
        self.target = Some(parse_space(target)?);
        Ok(self)
    }

    pub(crate) fn pair(&self) -> Result<(SpaceParams<Rational>, SpaceParams<Rational>)> {
        match (self.source, self.target) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::param(format!("{} needs --source and --target", self.command.name()))),
        }
    }

    /// Checks everything a command needs before any computation starts.
    pub fn validate(&self) -> Result<()> {
        for p in self.source.iter().chain(self.target.iter()) {
            p.validate()?;
        }
        if let (Some(a), Some(b)) = (self.source, self.target) {
            if a.n != b.n {
                return Err(Error::param("source and target dimensions differ"));
            }
        }
        let g = &self.grid;
        if !(1..=2).contains(&g.n) || !g.size.is_power_of_two() || !(g.period > 0.0) {
            return Err(Error::param("grid needs n in {1,2}, N a power of two and L > 0"));
        }
        if let Some((c, big)) = self.alpha_constants {
            if !(c > 0.0 && big > c) {
                return Err(Error::param("alpha constants need 0 < c < C"));
            }
        }
        match self.command {
            Command::Decide | Command::Index | Command::VerifyEmbedding => {
                self.pair()?;
            }
            Command::Covering => {
                if self.alpha.is_none() && self.source.is_none() {
                    return Err(Error::param("covering needs --alpha or --source"));
                }
            }
            Command::Normcalc => {
                if self.source.is_none() {
                    return Err(Error::param("normcalc needs --source"));
                }
                if self.input.is_none() {
                    return Err(Error::param("normcalc needs --input or --builtin"));
                }
            }
            Command::VerifyAsymptotics => {
                if self.source.is_some() != self.target.is_some() {
                    return Err(Error::param("give both --source and --target, or neither for the built-in set"));
                }
                if let Some((lo, hi)) = self.j_range {
                    if hi < lo + 4 {
                        return Err(Error::param("the scale range must span at least 4 octaves"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Resolved configuration embedded in every report.
    pub fn provenance(&self) -> serde_json::Value {
        serde_json::json!({
            "command": self.command.name(),
            "source": self.source.as_ref().map(SpaceText::from),
            "target": self.target.as_ref().map(SpaceText::from),
            "grid": self.grid,
            "alpha_constants": self.alpha_constants,
            "alpha": self.alpha.map(|a| a.to_string()),
            "k_max": self.k_max,
            "input": self.input,
            "j_range": self.j_range,
            "levels": self.levels,
            "trials": self.trials,
            "seed": self.seed,
            "format": self.format,
        })
    }
}
