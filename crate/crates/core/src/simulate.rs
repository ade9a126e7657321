//! Synthetic response generation and evaluation metrics.
//!
//! All randomness in the crate flows through [`SplitMix64`], chosen for its
//! trivially portable, bit-exact state evolution. Generation consumes the
//! stream in a fixed, documented order so that fixtures are reproducible
//! across platforms and implementations:
//!
//! 1. true answers `x*_j` for `j = 0..d`, one `next_u64` each (low bit);
//! 2. worker accuracies `p_i` for `i = 0..k`, one `next_f64` each (always
//!    consumed, even for a degenerate band);
//! 3. the assignment: nothing for `Full`; for `Replication(r)`, `r`
//!    partial Fisher-Yates draws (`next_u64 % remaining`) per question in
//!    ascending question order; for `Probability(rho)`, one `next_f64` per
//!    `(i, j)` cell in row-major order (worker-outer);
//! 4. responses, one `next_f64` per assigned cell in row-major order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infer::{round_deterministic, InferenceResult};
use crate::response::{RawEntry, RawResponses, ResponseMatrix};

/// SplitMix64 pseudo-random stream.
///
/// State evolution: `state += 0x9E3779B97F4A7C15`, then the output is mixed
/// as `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
/// z *= 0x94D049BB133111EB; z ^= z >> 31`. Uniform doubles take the top 53
/// bits: `(out >> 11) * 2^-53`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform double in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform integer in `[0, n)`.
    ///
    /// Plain modulo reduction; the bias is immaterial at the scales used here
    /// and keeps the draw sequence trivial to reproduce elsewhere.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }
}

/// One population band: a fraction of the workers with accuracy drawn
/// uniformly from `[p_lo, p_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbilityBand {
    pub fraction: f64,
    pub p_lo: f64,
    pub p_hi: f64,
}

impl AbilityBand {
    pub fn new(fraction: f64, p_lo: f64, p_hi: f64) -> Self {
        AbilityBand { fraction, p_lo, p_hi }
    }

    /// The degenerate band of uniformly random answerers.
    pub fn spammers(fraction: f64) -> Self {
        AbilityBand::new(fraction, 0.5, 0.5)
    }
}

/// Which `(worker, question)` cells receive a response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assignment {
    /// Every worker answers every question.
    Full,
    /// Every question is answered by exactly this many distinct workers.
    Replication(u32),
    /// Each cell is asked independently with this probability.
    Probability(f64),
}

/// Configuration of one synthetic instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub k: usize,
    pub d: usize,
    pub ability_spec: Vec<AbilityBand>,
    pub assignment: Assignment,
    pub seed: u64,
}

impl SimConfig {
    /// All `k` workers drawn from a single accuracy band, plus the explicit
    /// (empty) spammer band.
    pub fn uniform_ability(
        k: usize,
        d: usize,
        p_lo: f64,
        p_hi: f64,
        assignment: Assignment,
        seed: u64,
    ) -> Self {
        SimConfig {
            k,
            d,
            ability_spec: vec![AbilityBand::spammers(0.0), AbilityBand::new(1.0, p_lo, p_hi)],
            assignment,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.d == 0 {
            return Err(Error::InvalidConfig("k and d must be positive".into()));
        }
        if self.ability_spec.is_empty() {
            return Err(Error::InvalidConfig("ability_spec must be non-empty".into()));
        }
        let mut total = 0.0;
        let mut has_spammer_band = false;
        for b in &self.ability_spec {
            if !(0.0..=1.0).contains(&b.fraction) {
                return Err(Error::InvalidConfig(format!(
                    "band fraction {} outside [0, 1]",
                    b.fraction
                )));
            }
            if !(0.5..=1.0).contains(&b.p_lo) || !(0.5..=1.0).contains(&b.p_hi) || b.p_lo > b.p_hi
            {
                return Err(Error::InvalidConfig(format!(
                    "band accuracy range [{}, {}] not within [0.5, 1]",
                    b.p_lo, b.p_hi
                )));
            }
            if b.p_lo == 0.5 && b.p_hi == 0.5 {
                has_spammer_band = true;
            }
            total += b.fraction;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "band fractions sum to {total}, expected 1"
            )));
        }
        if !has_spammer_band {
            return Err(Error::InvalidConfig(
                "ability_spec must state the spammer fraction explicitly (a band at p = 0.5; \
                 its fraction may be 0)"
                    .into(),
            ));
        }
        match self.assignment {
            Assignment::Full => {}
            Assignment::Replication(r) => {
                if r == 0 || r as usize > self.k {
                    return Err(Error::InvalidConfig(format!(
                        "replication {r} outside 1..={}",
                        self.k
                    )));
                }
            }
            Assignment::Probability(rho) => {
                if !(0.0..=1.0).contains(&rho) {
                    return Err(Error::InvalidConfig(format!(
                        "assignment probability {rho} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(json)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// The latent state behind a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// True answers, one 0/1 per question.
    pub x_star: Vec<u8>,
    /// Worker accuracies.
    pub p: Vec<f64>,
    /// Worker abilities, `w = 2p - 1` exactly.
    pub w: Vec<f64>,
}

/// Quality of an inference result against the generating truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    /// Fraction of questions answered correctly after deterministic rounding.
    pub accuracy: f64,
    /// Mean absolute deviation of the soft answers from the truth.
    pub mean_abs_error: f64,
    /// `||w_hat - w|| / sqrt(k)`.
    pub ability_rmse: f64,
}

/// Number of workers in each band: cumulative-fraction rounding, which is
/// deterministic and sums to `k`.
fn band_counts(bands: &[AbilityBand], k: usize) -> Vec<usize> {
    let mut counts = Vec::with_capacity(bands.len());
    let mut cum = 0.0;
    let mut assigned = 0usize;
    for b in bands {
        cum += b.fraction;
        let upto = (cum * k as f64 + 0.5).floor() as usize;
        let upto = upto.min(k);
        counts.push(upto - assigned);
        assigned = upto;
    }
    // Guard against accumulated rounding: give any remainder to the last band.
    if assigned < k {
        *counts.last_mut().unwrap() += k - assigned;
    }
    counts
}

/// Draw a ground truth and response matrix under the one-coin model.
pub fn generate(cfg: &SimConfig) -> Result<(GroundTruth, ResponseMatrix)> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);

    let x_star: Vec<u8> = (0..cfg.d).map(|_| (rng.next_u64() & 1) as u8).collect();

    let counts = band_counts(&cfg.ability_spec, cfg.k);
    let mut p = Vec::with_capacity(cfg.k);
    for (band, count) in cfg.ability_spec.iter().zip(counts) {
        for _ in 0..count {
            let u = rng.next_f64();
            p.push(band.p_lo + u * (band.p_hi - band.p_lo));
        }
    }

    let mut assigned = vec![false; cfg.k * cfg.d];
    match cfg.assignment {
        Assignment::Full => assigned.fill(true),
        Assignment::Replication(r) => {
            let mut pool: Vec<usize> = Vec::with_capacity(cfg.k);
            for j in 0..cfg.d {
                pool.clear();
                pool.extend(0..cfg.k);
                for s in 0..r as usize {
                    let pick = s + rng.next_below((cfg.k - s) as u64) as usize;
                    pool.swap(s, pick);
                    assigned[pool[s] * cfg.d + j] = true;
                }
            }
        }
        Assignment::Probability(rho) => {
            for cell in assigned.iter_mut() {
                *cell = rng.next_f64() < rho;
            }
        }
    }

    let mut entries = Vec::new();
    for i in 0..cfg.k {
        for j in 0..cfg.d {
            if !assigned[i * cfg.d + j] {
                continue;
            }
            let agree = rng.next_f64() < p[i];
            let y = if agree { x_star[j] } else { 1 - x_star[j] };
            entries.push(RawEntry {
                i: i as u64 + 1,
                j: j as u64 + 1,
                y: y as i64,
            });
        }
    }
    if entries.is_empty() {
        return Err(Error::InvalidConfig(
            "assignment produced no responses; increase rho or use replication".into(),
        ));
    }

    let w = p.iter().map(|&pi| 2.0 * pi - 1.0).collect();
    let truth = GroundTruth { x_star, p, w };
    let responses = crate::response::validate_responses(&RawResponses {
        k: cfg.k as u64,
        d: cfg.d as u64,
        entries,
    })?;
    Ok((truth, responses))
}

/// Answer accuracy, soft-answer error, and ability RMSE for `result` against
/// the generating `truth`.
pub fn evaluate(result: &InferenceResult, truth: &GroundTruth) -> Result<Metrics> {
    if result.x_hat.len() != truth.x_star.len() {
        return Err(Error::DimensionMismatch {
            what: "x_hat",
            got: result.x_hat.len(),
            expected: truth.x_star.len(),
        });
    }
    if result.w_hat.len() != truth.w.len() {
        return Err(Error::DimensionMismatch {
            what: "w_hat",
            got: result.w_hat.len(),
            expected: truth.w.len(),
        });
    }
    let rounded = round_deterministic(&result.x_hat)?;
    let d = truth.x_star.len();
    let correct = rounded
        .iter()
        .zip(&truth.x_star)
        .filter(|(a, b)| a == b)
        .count();
    let mean_abs_error = result
        .x_hat
        .iter()
        .zip(&truth.x_star)
        .map(|(&xh, &xs)| (xh - xs as f64).abs())
        .sum::<f64>()
        / d as f64;
    let k = truth.w.len();
    let sq = result
        .w_hat
        .iter()
        .zip(&truth.w)
        .map(|(&wh, &wt)| (wh - wt) * (wh - wt))
        .sum::<f64>();
    Ok(Metrics {
        accuracy: correct as f64 / d as f64,
        mean_abs_error,
        ability_rmse: (sq / k as f64).sqrt(),
    })
}
