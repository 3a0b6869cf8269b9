//! Spec documents: JSON input, family shorthands and resolution to explicit values.

use std::path::Path;

use ewens_core::ewens::{Family, MultiplicativeSpec};
use ewens_core::exact::{parse_rational, rational_from_f64, rational_to_f64};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{validation, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex64> for ComplexEntry {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<ComplexEntry> for Complex64 {
    fn from(c: ComplexEntry) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FhatInput {
    Explicit(Vec<ComplexEntry>),
    Family(Family),
}

/// θ as written: a JSON number, or a string such as `"5/3"` or `"0.5"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaInput {
    Number(serde_json::Number),
    Text(String),
}

impl ThetaInput {
    /// Flag values that read as plain floats stay numbers in the report.
    pub fn from_flag(text: &str) -> Self {
        match text.trim().parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
            Some(n) => ThetaInput::Number(n),
            None => ThetaInput::Text(text.trim().to_string()),
        }
    }

    /// The decimal or fraction as written, exactly.
    pub fn exact(&self) -> CliResult<BigRational> {
        let text = match self {
            ThetaInput::Number(n) => n.to_string(),
            ThetaInput::Text(t) => t.clone(),
        };
        match parse_rational(&text) {
            Ok(q) => Ok(q),
            Err(_) => {
                let x = self.float()?;
                Ok(rational_from_f64(x)?)
            }
        }
    }

    pub fn float(&self) -> CliResult<f64> {
        let x = match self {
            ThetaInput::Number(n) => n.as_f64(),
            ThetaInput::Text(t) => t
                .trim()
                .parse::<f64>()
                .ok()
                .or_else(|| parse_rational(t).ok().map(|q| rational_to_f64(&q))),
        };
        x.filter(|x| x.is_finite()).ok_or_else(|| validation(format!("cannot read θ from {self:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub n: usize,
    pub theta: ThetaInput,
    pub fhat: FhatInput,
}

impl SpecDocument {
    pub fn read(path: &str) -> CliResult<Self> {
        let text = if path == "-" {
            std::io::read_to_string(std::io::stdin()).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?
        } else {
            std::fs::read_to_string(Path::new(path)).map_err(|source| CliError::Io { path: path.into(), source })?
        };
        let doc: SpecDocument = serde_json::from_str(&text)?;
        if doc.n == 0 {
            return Err(validation("spec n must be at least 1"));
        }
        if let FhatInput::Explicit(values) = &doc.fhat {
            if values.len() != doc.n {
                return Err(validation(format!("explicit fhat has {} entries but n = {}", values.len(), doc.n)));
            }
        }
        Ok(doc)
    }
}

/// `constant:RE[,IM]`, `unimodular:TAU`, `zero_on:J1,J2,...`, `random_disk:SEED`.
pub fn parse_family(text: &str) -> CliResult<Family> {
    let (name, args) = text.split_once(':').unwrap_or((text, ""));
    let bad = || validation(format!("cannot parse family `{text}`"));
    let floats = || -> CliResult<Vec<f64>> {
        args.split(',').map(|a| a.trim().parse::<f64>().map_err(|_| bad())).collect()
    };
    match name.trim() {
        "constant" => match floats()?.as_slice() {
            [re] => Ok(Family::Constant { re: *re, im: 0.0 }),
            [re, im] => Ok(Family::Constant { re: *re, im: *im }),
            _ => Err(bad()),
        },
        "unimodular" => match floats()?.as_slice() {
            [tau] => Ok(Family::Unimodular { tau: *tau }),
            _ => Err(bad()),
        },
        "zero_on" => {
            let lengths = args
                .split(',')
                .map(|a| a.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Family::ZeroOn { lengths })
        }
        "random_disk" => args.trim().parse::<u64>().map(|seed| Family::RandomDisk { seed }).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

/// Where the cycle values come from before resolution.
#[derive(Debug, Clone)]
pub enum Source {
    Explicit(Vec<Complex64>),
    Family(Family),
}

/// A spec after flags have been merged into the document (flags win).
#[derive(Debug, Clone)]
pub struct SpecInput {
    pub n: Option<usize>,
    pub theta: Option<ThetaInput>,
    pub source: Option<Source>,
}

impl SpecInput {
    pub fn gather(path: Option<&str>, family: Option<&str>, n: Option<usize>, theta: Option<&str>) -> CliResult<Self> {
        let doc = path.map(SpecDocument::read).transpose()?;
        let mut source = doc.as_ref().map(|d| match &d.fhat {
            FhatInput::Explicit(v) => Source::Explicit(v.iter().map(|&c| c.into()).collect()),
            FhatInput::Family(f) => Source::Family(f.clone()),
        });
        if let Some(text) = family {
            if doc.is_some() {
                return Err(validation("give either --spec or --family, not both"));
            }
            source = Some(Source::Family(parse_family(text)?));
        }
        if n == Some(0) {
            return Err(validation("--n must be at least 1"));
        }
        Ok(Self {
            n: n.or(doc.as_ref().map(|d| d.n)),
            theta: theta.map(ThetaInput::from_flag).or(doc.map(|d| d.theta)),
            source,
        })
    }

    pub fn theta(&self) -> CliResult<&ThetaInput> {
        self.theta.as_ref().ok_or_else(|| validation("θ is required (--theta or the spec document)"))
    }

    pub fn n(&self) -> CliResult<usize> {
        self.n.ok_or_else(|| validation("n is required (--n or the spec document)"))
    }

    pub fn family(&self) -> Option<&Family> {
        match &self.source {
            Some(Source::Family(f)) => Some(f),
            _ => None,
        }
    }

    /// Explicit values for `f̂(1..n)`: family builders run at `n`, explicit
    /// arrays must have exactly `n` entries.
    pub fn resolve(&self, n: usize) -> CliResult<MultiplicativeSpec> {
        match &self.source {
            None => Err(validation("a cycle-value spec is required (--spec or --family)")),
            Some(Source::Family(f)) => Ok(f.build(n)?),
            Some(Source::Explicit(values)) if values.len() == n => Ok(MultiplicativeSpec::new(values.clone())?),
            Some(Source::Explicit(values)) => Err(validation(format!(
                "explicit fhat has {} entries but n = {n}",
                values.len()
            ))),
        }
    }

    /// The resolved document that reproduces this run when fed back in.
    pub fn resolved_document(&self, spec: &MultiplicativeSpec) -> CliResult<SpecDocument> {
        Ok(SpecDocument {
            n: spec.n(),
            theta: self.theta()?.clone(),
            fhat: FhatInput::Explicit(spec.fhat().iter().map(|&c| c.into()).collect()),
        })
    }
}

/// Restriction of a spec to `f̂(1..n)`.
pub fn prefix(spec: &MultiplicativeSpec, n: usize) -> CliResult<MultiplicativeSpec> {
    if n > spec.n() {
        return Err(validation(format!("grid point {n} exceeds spec length {}", spec.n())));
    }
    Ok(MultiplicativeSpec::new(spec.fhat()[..n].to_vec())?)
}
