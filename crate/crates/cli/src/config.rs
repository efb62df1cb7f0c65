//! Run configuration: JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::Args;
use num_complex::Complex64;
use qcdual::identities::{CertificateInputs, Mode};
use qcdual::model::{parse_complex, to_pair, Couplings, ModelSpec, Pair, RootSystem};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub kind: RootSystem,
    pub n: Option<usize>,
    /// Defaults to `floor(n/2)`.
    pub m: Option<usize>,
    pub z: Option<Vec<Pair>>,
    /// Initial momenta for `evolve`; zero when absent.
    pub p: Option<Vec<f64>>,
    pub xi: f64,
    pub hbar: f64,
    pub omega: f64,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub g4: Option<f64>,
    pub seeds: usize,
    pub rng_seed: u64,
    pub tol: Option<f64>,
    pub samples: usize,
    pub mode: Mode,
    pub dt: f64,
    pub steps: usize,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    /// Inputs copied from a certificate; `identity` re-runs exactly this draw.
    pub replay: Option<CertificateInputs>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kind: RootSystem::C,
            n: None,
            m: None,
            z: None,
            p: None,
            xi: 0.0,
            hbar: 1.0,
            omega: 0.0,
            g1: None,
            g2: None,
            g4: None,
            seeds: 64,
            rng_seed: 2024,
            tol: None,
            samples: 20,
            mode: Mode::Rational,
            dt: 1e-3,
            steps: 1000,
            jobs: None,
            out: None,
            replay: None,
        }
    }
}

fn parse_list(s: &str) -> anyhow::Result<Vec<Complex64>> {
    s.split(',')
        .map(|t| parse_complex(t.trim()).map_err(|e| anyhow!("{e}")))
        .collect()
}

fn parse_reals(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {t:?}"))
        })
        .collect()
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// JSON run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Root system: A, B, C or D
    #[arg(long)]
    pub kind: Option<RootSystem>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Comma-separated coordinates, each "re", "re+imi" or "imi"
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Comma-separated initial momenta
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub g1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub g2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub g4: Option<f64>,
    /// Newton seeds for the Bethe solver
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub rng_seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Random draws for identity and factorization
    #[arg(long)]
    pub samples: Option<usize>,
    /// rational or float
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Worker threads
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Report path; CSV data goes next to it with a .csv extension
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "rational" => Ok(Mode::Rational),
        "float" => Ok(Mode::Float),
        other => Err(format!("unknown mode {other:?}")),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn from_args(a: &ConfigArgs) -> anyhow::Result<Self> {
        let mut c = match &a.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = a.$f.clone() { c.$f = v; } )* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if a.$f.is_some() { c.$f = a.$f.clone(); } )* };
        }
        set!(kind, xi, hbar, omega, seeds, rng_seed, samples, mode, dt, steps);
        set_opt!(n, m, g1, g2, g4, tol, jobs, out);
        if let Some(z) = &a.z {
            c.z = Some(parse_list(z)?.into_iter().map(to_pair).collect());
        }
        if let Some(p) = &a.p {
            c.p = Some(parse_reals(p)?);
        }
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> anyhow::Result<()> {
        if let (Some(n), Some(z)) = (self.n, &self.z) {
            if n != z.len() {
                bail!("n = {n} but {} coordinates given", z.len());
            }
        }
        if let (Some(p), Some(z)) = (&self.p, &self.z) {
            if p.len() != z.len() {
                bail!("{} momenta for {} coordinates", p.len(), z.len());
            }
        }
        if self.seeds == 0 || self.samples == 0 || self.steps == 0 {
            bail!("seeds, samples and steps must be positive");
        }
        if !(self.dt.is_finite() && self.dt != 0.0) {
            bail!("dt must be finite and nonzero");
        }
        Ok(())
    }

    pub fn n(&self) -> anyhow::Result<usize> {
        self.n
            .or(self.z.as_ref().map(Vec::len))
            .ok_or_else(|| anyhow!("n is required (--n or --z)"))
    }

    pub fn m(&self) -> anyhow::Result<usize> {
        Ok(self.m.unwrap_or(self.n()? / 2))
    }

    pub fn model(&self) -> anyhow::Result<ModelSpec> {
        let z = self
            .z
            .as_ref()
            .ok_or_else(|| anyhow!("coordinates are required (--z)"))?;
        let z: Vec<Complex64> = z.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        let m = self.m.unwrap_or(z.len() / 2);
        let xi = if self.kind == RootSystem::C {
            self.xi
        } else {
            0.0
        };
        ModelSpec::new(self.kind, m, &z, xi, self.hbar, self.omega).map_err(|e| anyhow!("{e}"))
    }

    pub fn explicit_couplings(&self) -> Option<Couplings<f64>> {
        if self.g1.is_none() && self.g2.is_none() && self.g4.is_none() {
            return None;
        }
        Some(Couplings::new(
            self.g1.unwrap_or(0.0),
            self.g2.unwrap_or(0.0),
            self.g4.unwrap_or(0.0),
        ))
    }
}
