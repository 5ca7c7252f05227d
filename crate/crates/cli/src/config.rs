//! Run configuration: defaults, then a `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qmix::samplers::SpectrumSampler;
use qmix::{Dims, MeasureSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    DistR,
    DistLmax,
    Psep,
    Rstar,
    Borel,
    Sample,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::DistR => "dist-r",
            Command::DistLmax => "dist-lmax",
            Command::Psep => "psep",
            Command::Rstar => "rstar",
            Command::Borel => "borel",
            Command::Sample => "sample",
        })
    }
}

/// Settings as read from one source; unset fields defer to the next source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub dims: Option<String>,
    pub measure: Option<String>,
    pub samples: Option<u64>,
    pub bins: Option<usize>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub etas: Option<String>,
    pub ns: Option<String>,
    pub states: Option<bool>,
}

impl Overrides {
    /// `later` wins wherever it is set.
    pub fn layered(self, later: Overrides) -> Overrides {
        Overrides {
            n: later.n.or(self.n),
            dims: later.dims.or(self.dims),
            measure: later.measure.or(self.measure),
            samples: later.samples.or(self.samples),
            bins: later.bins.or(self.bins),
            seed: later.seed.or(self.seed),
            alpha: later.alpha.or(self.alpha),
            threads: later.threads.or(self.threads),
            out: later.out.or(self.out),
            etas: later.etas.or(self.etas),
            ns: later.ns.or(self.ns),
            states: later.states.or(self.states),
        }
    }

    pub fn from_file(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_file(&text)
    }

    pub fn parse_file(text: &str) -> Result<Overrides, CliError> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            let bad = |what: &str| CliError::Config(format!("config line {}: invalid {what} {value:?}", lineno + 1));
            match key {
                "n" => o.n = Some(value.parse().map_err(|_| bad("n"))?),
                "dims" => o.dims = Some(value),
                "measure" => o.measure = Some(value),
                "samples" => o.samples = Some(value.parse().map_err(|_| bad("samples"))?),
                "bins" => o.bins = Some(value.parse().map_err(|_| bad("bins"))?),
                "seed" => o.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "alpha" => o.alpha = Some(value.parse().map_err(|_| bad("alpha"))?),
                "threads" => o.threads = Some(value.parse().map_err(|_| bad("threads"))?),
                "out" => o.out = Some(PathBuf::from(value)),
                "etas" => o.etas = Some(value),
                "ns" => o.ns = Some(value),
                "states" => o.states = Some(value.parse().map_err(|_| bad("states"))?),
                other => return Err(CliError::Config(format!("config line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        Ok(o)
    }
}

/// Fully resolved and validated settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub dims: Dims,
    pub measure: MeasureSpec,
    pub samples: u64,
    pub bins: usize,
    pub seed: u64,
    pub alpha: f64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub etas: Vec<f64>,
    pub ns: Vec<usize>,
    pub states: bool,
}

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_NS: &str = "4,8,16,32,64,128,256,512,1024";

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    let items: Result<Vec<T>, _> = s.split(',').map(|x| x.trim().parse::<T>()).collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::Config(format!("invalid {what} list {s:?}"))),
    }
}

fn parse_dims(s: &str) -> Result<Dims, CliError> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::Config(format!("dims {s:?} must look like AxB")))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::Config(format!("invalid dims {s:?}")));
    Dims::new(parse(a)?, parse(b)?).map_err(|e| CliError::Config(e.to_string()))
}

impl RunConfig {
    pub fn resolve(command: Command, o: Overrides) -> Result<RunConfig, CliError> {
        let dims = match (&o.dims, o.n) {
            (Some(d), n) => {
                let dims = parse_dims(d)?;
                if let Some(n) = n {
                    if n != dims.total() {
                        return Err(CliError::Config(format!("n = {n} but dims {dims} give {}", dims.total())));
                    }
                }
                dims
            }
            (None, Some(n)) => Dims::single(n).map_err(|e| CliError::Config(e.to_string()))?,
            (None, None) => Dims::new(2, 2).expect("2x2 is valid"),
        };
        let n = dims.total();
        let measure: MeasureSpec = o
            .measure
            .as_deref()
            .unwrap_or("dirichlet:1")
            .parse()
            .map_err(|e: qmix::Error| CliError::Config(e.to_string()))?;
        let samples = o.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        let bins = o.bins.unwrap_or(qmix::montecarlo::DEFAULT_BINS);
        if bins == 0 {
            return Err(CliError::Config("bins must be at least 1".into()));
        }
        let alpha = o.alpha.unwrap_or(DEFAULT_ALPHA);
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CliError::Config(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if o.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        let etas = match &o.etas {
            Some(s) => {
                let v: Vec<f64> = parse_list(s, "eta")?;
                if v.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
                    return Err(CliError::Config(format!("every eta must be positive, got {s:?}")));
                }
                v
            }
            None => match &measure {
                MeasureSpec::Dirichlet { eta } => vec![*eta],
                MeasureSpec::SimplexUniform => vec![1.0],
                _ => vec![],
            },
        };
        let ns: Vec<usize> = parse_list(o.ns.as_deref().unwrap_or(DEFAULT_NS), "N")?;

        let cfg = RunConfig {
            command,
            n,
            dims,
            measure,
            samples,
            bins,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            alpha,
            threads: o.threads,
            out: o.out,
            etas,
            ns,
            states: o.states.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let config = |e: qmix::Error| CliError::Config(e.to_string());
        match self.command {
            Command::DistR | Command::DistLmax | Command::Sample => {
                SpectrumSampler::new(self.measure.clone(), self.n).map_err(config)?;
                if self.n < 2 {
                    return Err(CliError::Config("distributions need N ≥ 2".into()));
                }
            }
            Command::Psep => {
                if !matches!((self.dims.a, self.dims.b), (2, 2) | (2, 3)) {
                    return Err(CliError::Config(format!("psep needs dims 2x2 or 2x3, got {}", self.dims)));
                }
                self.require_etas()?;
                if self.samples < 2 {
                    return Err(CliError::Config("psep needs at least 2 samples".into()));
                }
            }
            Command::Rstar => {
                self.require_etas()?;
                if self.samples < 2 || self.n < 2 {
                    return Err(CliError::Config("rstar needs N ≥ 2 and at least 2 samples".into()));
                }
            }
            Command::Borel => {
                if let Some(&bad) = self.ns.iter().find(|&&n| n < 4) {
                    return Err(CliError::Config(format!("borel needs N ≥ 4, got {bad}")));
                }
            }
        }
        Ok(())
    }

    fn require_etas(&self) -> Result<(), CliError> {
        if self.etas.is_empty() {
            return Err(CliError::Config(format!(
                "{} needs --etas or a Dirichlet measure, got {}",
                self.command, self.measure
            )));
        }
        Ok(())
    }

    /// `key = value` lines recorded in every output header.
    pub fn header_lines(&self) -> Vec<String> {
        let list = |v: &[String]| v.join(",");
        let mut lines = vec![
            format!("qmix {}", env!("CARGO_PKG_VERSION")),
            format!("command = {}", self.command),
            format!("n = {}", self.n),
            format!("dims = {}", self.dims),
            format!("measure = {}", self.measure),
            format!("samples = {}", self.samples),
            format!("bins = {}", self.bins),
            format!("seed = {}", self.seed),
            format!("alpha = {}", self.alpha),
            format!("threads = {}", self.threads.map_or("auto".to_string(), |t| t.to_string())),
            format!("out = {}", self.out.as_ref().map_or("-".to_string(), |p| p.display().to_string())),
        ];
        match self.command {
            Command::Psep | Command::Rstar => {
                lines.push(format!("etas = {}", list(&self.etas.iter().map(|e| e.to_string()).collect::<Vec<_>>())))
            }
            Command::Borel => lines.push(format!("ns = {}", list(&self.ns.iter().map(|e| e.to_string()).collect::<Vec<_>>()))),
            Command::Sample => lines.push(format!("states = {}", self.states)),
            _ => {}
        }
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Overrides::parse_file("# run\nn = 6\nmeasure = dirichlet:2 # comment\nsamples=10\n").unwrap();
        let flags = Overrides {
            samples: Some(20),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Command::DistR, file.layered(flags)).unwrap();
        assert_eq!(cfg.n, 6);
        assert_eq!(cfg.samples, 20);
        assert_eq!(cfg.measure, MeasureSpec::dirichlet(2.0));
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(Overrides::parse_file("bogus = 1").is_err());
        assert!(Overrides::parse_file("samples = lots").is_err());
        assert!(Overrides::parse_file("no equals sign").is_err());
        let bad = |o: Overrides, c: Command| RunConfig::resolve(c, o).is_err();
        assert!(bad(Overrides { samples: Some(0), ..Default::default() }, Command::DistR));
        assert!(bad(Overrides { alpha: Some(1.5), ..Default::default() }, Command::DistR));
        assert!(bad(Overrides { n: Some(5), dims: Some("2x2".into()), ..Default::default() }, Command::DistR));
        assert!(bad(Overrides { dims: Some("3x3".into()), ..Default::default() }, Command::Psep));
        assert!(bad(Overrides { dims: Some("2by2".into()), ..Default::default() }, Command::DistR));
        assert!(bad(Overrides { measure: Some("fixed-r:2".into()), ..Default::default() }, Command::Psep));
        assert!(bad(Overrides { ns: Some("3,8".into()), ..Default::default() }, Command::Borel));
        assert!(bad(Overrides { etas: Some("1,-2".into()), ..Default::default() }, Command::Rstar));
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(Command::DistLmax, Overrides::default()).unwrap();
        assert_eq!((cfg.n, cfg.dims.a, cfg.dims.b), (4, 2, 2));
        assert_eq!(cfg.bins, 200);
        assert_eq!(cfg.etas, vec![1.0]);
    }
}
