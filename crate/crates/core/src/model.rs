//! Model handles and parameter points.
//!
//! A [`ModelHandle`] names one objective family together with its
//! hyperparameters. A [`ParamPoint`] is a point in the parameter box:
//! answer coordinates `x` in `[0, 1]` and ability coordinates `w` in
//! `[0, W_max]`. The reduced (scalar) form used by the property checks is a
//! point with one coordinate on each axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation guard used when sweeping objectives that diverge at `w = W_max`.
///
/// Verification sweeps and iterative solvers stay at or below
/// `W_max - ZETA` for the Dawid-Skene family so every logarithm stays finite.
pub const ZETA: f64 = 1e-9;

/// The five supported objective families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    /// Negative log-likelihood of the one-coin worker model, abilities
    /// reparameterized to `w = 2p - 1`.
    DawidSkene,
    /// Negative log-likelihood of the thresholded additive-noise response
    /// model, with a configurable noise CDF.
    AdditiveNoise,
    /// Restricted dual of the minimax-entropy program, negated so that lower
    /// is better.
    MinimaxRestricted,
    /// GLAD with all question-difficulty parameters fixed to zero.
    GladRestricted,
    /// Piecewise-linear convex objective: the pointwise maximum of two
    /// hyperplanes. Does not model spammers.
    ConvexPl,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 5] = [
        ModelFamily::DawidSkene,
        ModelFamily::AdditiveNoise,
        ModelFamily::MinimaxRestricted,
        ModelFamily::GladRestricted,
        ModelFamily::ConvexPl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::DawidSkene => "dawid_skene",
            ModelFamily::AdditiveNoise => "additive_noise",
            ModelFamily::MinimaxRestricted => "minimax_restricted",
            ModelFamily::GladRestricted => "glad_restricted",
            ModelFamily::ConvexPl => "convex_pl",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        ModelFamily::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown model family `{name}`")))
    }
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Noise distribution for the additive-noise family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseCdf {
    Logistic,
    Gaussian,
}

/// One objective family plus its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelHandle {
    pub family: ModelFamily,
    /// Upper end of the checked ability domain; the lower end is always 0.
    pub w_max: f64,
    /// Lower end of the full ability domain, recorded for completeness.
    /// Checks never evaluate below 0.
    pub w_min: f64,
    /// Response-count scale of the reduced objective.
    pub n: u32,
    /// Noise CDF; meaningful for the additive-noise family only.
    pub noise_cdf: NoiseCdf,
    /// Whether `w = 0` encodes a spammer (constant objective in `x`).
    pub models_spammer: bool,
    /// Whether the objective is differentiable on the interior of the box.
    pub differentiable: bool,
}

impl ModelHandle {
    /// Handle with default hyperparameters: `W_max = 1`, `n = 1`, logistic
    /// noise.
    pub fn new(family: ModelFamily) -> Self {
        ModelHandle {
            family,
            w_max: 1.0,
            w_min: 0.0,
            n: 1,
            noise_cdf: NoiseCdf::Logistic,
            models_spammer: family != ModelFamily::ConvexPl,
            differentiable: family != ModelFamily::ConvexPl,
        }
    }

    pub fn with_n(mut self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        self.n = n;
        Ok(self)
    }

    pub fn with_w_max(mut self, w_max: f64) -> Result<Self> {
        if !w_max.is_finite() || w_max <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "W_max must be positive and finite, got {w_max}"
            )));
        }
        // The one-coin ability transform w = 2p - 1 caps the domain at 1.
        if self.family == ModelFamily::DawidSkene && w_max > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "W_max for dawid_skene cannot exceed 1, got {w_max}"
            )));
        }
        self.w_max = w_max;
        Ok(self)
    }

    pub fn with_w_min(mut self, w_min: f64) -> Result<Self> {
        if !w_min.is_finite() || w_min > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "W_min must be <= 0 so that 0 lies in [W_min, W_max), got {w_min}"
            )));
        }
        self.w_min = w_min;
        Ok(self)
    }

    pub fn with_noise_cdf(mut self, cdf: NoiseCdf) -> Self {
        self.noise_cdf = cdf;
        self
    }

    /// Largest `w` that evaluation sweeps and solvers may use.
    ///
    /// `W_max - ZETA` for Dawid-Skene, whose logarithms diverge at the upper
    /// edge; `W_max` for every other family.
    pub fn w_eval_cap(&self) -> f64 {
        match self.family {
            ModelFamily::DawidSkene => self.w_max - ZETA,
            _ => self.w_max,
        }
    }

    /// Reject `x` or `w` outside the closed parameter box.
    pub fn check_domain(&self, x: f64, w: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) || x.is_nan() {
            return Err(Error::DomainViolation {
                name: "x",
                value: x,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(0.0..=self.w_max).contains(&w) || w.is_nan() {
            return Err(Error::DomainViolation {
                name: "w",
                value: w,
                lo: 0.0,
                hi: self.w_max,
            });
        }
        Ok(())
    }
}

/// JSON configuration for a model: `{"family": ..., "W_max": ..., "n": ...,
/// "noise_cdf": ...}`. Omitted fields take the defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: ModelFamily,
    #[serde(rename = "W_max", default = "default_w_max")]
    pub w_max: f64,
    #[serde(rename = "W_min", default)]
    pub w_min: f64,
    #[serde(default = "default_n")]
    pub n: u32,
    #[serde(default = "default_noise_cdf")]
    pub noise_cdf: NoiseCdf,
}

fn default_w_max() -> f64 {
    1.0
}

fn default_n() -> u32 {
    1
}

fn default_noise_cdf() -> NoiseCdf {
    NoiseCdf::Logistic
}

impl TryFrom<ModelConfig> for ModelHandle {
    type Error = Error;

    fn try_from(cfg: ModelConfig) -> Result<Self> {
        Ok(ModelHandle::new(cfg.family)
            .with_w_max(cfg.w_max)?
            .with_w_min(cfg.w_min)?
            .with_n(cfg.n)?
            .with_noise_cdf(cfg.noise_cdf))
    }
}

impl ModelHandle {
    pub fn from_json(json: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(json)?;
        cfg.try_into()
    }
}

/// A point in the joint parameter box, or its reduced scalar form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl ParamPoint {
    pub fn new(x: Vec<f64>, w: Vec<f64>) -> Self {
        ParamPoint { x, w }
    }

    /// The scalar `(x, w)` pair used on the reduced domain.
    pub fn reduced(x: f64, w: f64) -> Self {
        ParamPoint {
            x: vec![x],
            w: vec![w],
        }
    }

    /// All coordinates inside the closed boxes of `model`.
    pub fn validate_for(&self, model: &ModelHandle) -> Result<()> {
        for &x in &self.x {
            model.check_domain(x, 0.0)?;
        }
        for &w in &self.w {
            model.check_domain(0.0, w)?;
        }
        Ok(())
    }
}
