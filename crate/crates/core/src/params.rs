//! Experiment inputs, derived length scales and the configuration file.
//!
//! All lengths are stored in meters. The configuration file is flat
//! `key = value` text with unit suffixes (`nm`, `um`/`μm`, `mm`, `m`):
//!
//! ```text
//! # degenerate type-I source
//! lambda   = 702 nm
//! lambda_p = 351.1 nm
//! L_p      = 7 mm
//! Omega    = 5 sigma
//! f        = 200 mm
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{positive, Error, Result};

/// Base of the logarithm used for entanglement measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

impl FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "e" | "natural" | "ln" => Ok(LogBase::Natural),
            "2" | "two" => Ok(LogBase::Two),
            "10" | "ten" => Ok(LogBase::Ten),
            other => Err(format!("unknown log base `{other}` (expected e, 2 or 10)")),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        })
    }
}

/// Pump, crystal and photon inputs from which every other quantity derives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentParams {
    /// Biphoton wavelength λ.
    pub lambda: f64,
    /// Pump wavelength λ_p.
    pub lambda_p: f64,
    /// Crystal length L_p.
    pub crystal_length: f64,
    /// Initial width Ω of the plus coordinate.
    pub omega: f64,
    /// Optional focal length of the imaging lens.
    pub focal_length: Option<f64>,
    /// Dimensionless factor standing in for `c` in the lens formulas.
    pub c_scale: f64,
    pub log_base: LogBase,
}

impl ExperimentParams {
    pub fn new(lambda: f64, lambda_p: f64, crystal_length: f64, omega: f64) -> Result<Self> {
        Ok(ExperimentParams {
            lambda: positive("lambda", lambda)?,
            lambda_p: positive("lambda_p", lambda_p)?,
            crystal_length: positive("L_p", crystal_length)?,
            omega: positive("Omega", omega)?,
            focal_length: None,
            c_scale: 1.0,
            log_base: LogBase::Natural,
        })
    }

    /// The degenerate 702 nm / 351.1 nm / 7 mm source with Ω = `omega_over_sigma`·σ.
    pub fn reference(omega_over_sigma: f64) -> Self {
        let (lambda, lambda_p, crystal_length) = (702e-9, 351.1e-9, 7e-3);
        let sigma = derive_sigma(lambda_p, crystal_length).expect("reference inputs are positive");
        ExperimentParams::new(lambda, lambda_p, crystal_length, omega_over_sigma * sigma)
            .expect("reference inputs are positive")
    }

    pub fn with_focal_length(mut self, f: f64) -> Result<Self> {
        self.focal_length = Some(positive("f", f)?);
        Ok(self)
    }

    pub fn with_c_scale(mut self, c: f64) -> Result<Self> {
        self.c_scale = positive("c_scale", c)?;
        Ok(self)
    }

    pub fn with_log_base(mut self, base: LogBase) -> Self {
        self.log_base = base;
        self
    }

    pub fn scales(&self) -> Result<DerivedScales> {
        derive_scales(self)
    }
}

/// Length scales shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Minus-coordinate width σ.
    pub sigma: f64,
    /// Plus-coordinate width Ω.
    pub omega: f64,
    /// Wavenumber 2π/λ.
    pub k0: f64,
    /// Rayleigh length k₀Ω².
    pub z0_plus: f64,
    /// Rayleigh length k₀σ².
    pub z0_minus: f64,
}

impl DerivedScales {
    /// Builds scales directly from the two Rayleigh lengths at wavenumber `k0`.
    /// Used by sweeps that hold z0₋ fixed and vary the ratio z0₊/z0₋.
    pub fn from_rayleigh(k0: f64, z0_plus: f64, z0_minus: f64) -> Result<Self> {
        let k0 = positive("k0", k0)?;
        let z0_plus = positive("z0_plus", z0_plus)?;
        let z0_minus = positive("z0_minus", z0_minus)?;
        Ok(DerivedScales {
            sigma: (z0_minus / k0).sqrt(),
            omega: (z0_plus / k0).sqrt(),
            k0,
            z0_plus,
            z0_minus,
        })
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k0
    }

    /// max/min of the two Rayleigh lengths.
    pub fn rayleigh_ratio(&self) -> f64 {
        let (a, b) = (self.z0_plus, self.z0_minus);
        a.max(b) / a.min(b)
    }
}

/// σ = √(L_p λ_p / 6π).
pub fn derive_sigma(lambda_p: f64, crystal_length: f64) -> Result<f64> {
    let lambda_p = positive("lambda_p", lambda_p)?;
    let crystal_length = positive("L_p", crystal_length)?;
    Ok((crystal_length * lambda_p / (6.0 * PI)).sqrt())
}

pub fn derive_scales(p: &ExperimentParams) -> Result<DerivedScales> {
    let sigma = derive_sigma(p.lambda_p, p.crystal_length)?;
    let omega = positive("Omega", p.omega)?;
    let k0 = 2.0 * PI / positive("lambda", p.lambda)?;
    Ok(DerivedScales {
        sigma,
        omega,
        k0,
        z0_plus: k0 * omega * omega,
        z0_minus: k0 * sigma * sigma,
    })
}

/// Parses a length with an optional unit suffix; bare numbers are meters.
pub fn parse_length(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let split = t
        .find(|c: char| c.is_alphabetic() || c == 'μ' || c == 'µ')
        .unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("`{t}` is not a number with an optional length unit"))?;
    let scale = match unit.trim() {
        "" | "m" => 1.0,
        "mm" => 1e-3,
        "um" | "μm" | "µm" => 1e-6,
        "nm" => 1e-9,
        other => return Err(format!("unknown length unit `{other}`")),
    };
    Ok(value * scale)
}

/// Result of reading a configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub params: ExperimentParams,
}

#[derive(Debug, Clone, Copy)]
enum OmegaInput {
    Length(f64),
    SigmaMultiple(f64),
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut lambda = None;
        let mut lambda_p = None;
        let mut crystal_length = None;
        let mut omega = None;
        let mut focal_length = None;
        let mut c_scale = None;
        let mut log_base = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let parse_err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let length = || parse_length(value).map_err(parse_err);
            match key {
                "lambda" => lambda = Some(length()?),
                "lambda_p" => lambda_p = Some(length()?),
                "L_p" => crystal_length = Some(length()?),
                "f" => focal_length = Some(length()?),
                "Omega" => {
                    omega = Some(match value.strip_suffix("sigma") {
                        Some(k) => OmegaInput::SigmaMultiple(k.trim().parse().map_err(|_| {
                            parse_err(format!("`{value}` is not of the form `<number> sigma`"))
                        })?),
                        None => OmegaInput::Length(length()?),
                    })
                }
                "c_scale" => {
                    c_scale = Some(
                        value
                            .parse::<f64>()
                            .map_err(|_| parse_err(format!("`{value}` is not a number")))?,
                    )
                }
                "log_base" => log_base = Some(value.parse::<LogBase>().map_err(parse_err)?),
                other => return Err(parse_err(format!("unknown key `{other}`"))),
            }
        }

        let mut missing = Vec::new();
        if lambda.is_none() {
            missing.push("lambda");
        }
        if lambda_p.is_none() {
            missing.push("lambda_p");
        }
        if crystal_length.is_none() {
            missing.push("L_p");
        }
        if omega.is_none() {
            missing.push("Omega");
        }
        if !missing.is_empty() {
            return Err(Error::MissingKeys(missing.join(", ")));
        }
        let (lambda, lambda_p, crystal_length) =
            (lambda.unwrap(), lambda_p.unwrap(), crystal_length.unwrap());
        let omega = match omega.unwrap() {
            OmegaInput::Length(v) => v,
            OmegaInput::SigmaMultiple(k) => k * derive_sigma(lambda_p, crystal_length)?,
        };

        let mut params = ExperimentParams::new(lambda, lambda_p, crystal_length, omega)?;
        if let Some(f) = focal_length {
            params = params.with_focal_length(f)?;
        }
        if let Some(c) = c_scale {
            params = params.with_c_scale(c)?;
        }
        if let Some(b) = log_base {
            params = params.with_log_base(b);
        }
        Ok(Config { params })
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        Config::parse(&text)
    }
}
