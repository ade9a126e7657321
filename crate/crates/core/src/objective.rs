//! The objective-function zoo.
//!
//! Every family is defined through its reduced form `L(x, w; 1)`: the value of
//! the joint objective on the subspace where all answer parameters equal `x`,
//! all ability parameters equal `w`, and every observed response is "1". The
//! response "0" is handled for all families by the reflection
//! `L(x, w; 0) = L(1 - x, w; 1)`.
//!
//! Reduced forms, natural logarithm throughout, `n` = response count:
//!
//! * `dawid_skene`: `-n (x ln((1+w)/2) + (1-x) ln((1-w)/2))`, with
//!   `0 * ln 0 := 0`.
//! * `additive_noise`: `-n ln(1 - F(-(x - 0.5) w))` for a strictly increasing
//!   CDF `F` (logistic in closed form, or Gaussian through a rational erf
//!   approximation with absolute error below `1.5e-7`).
//! * `minimax_restricted`: the negated two-term softmax
//!   `-n e^a / (e^a + e^b)` with `a = (1-x)(0.5-w) + x(0.5+w)` and `b` its
//!   mirror image; equivalently `-n sigma(2w(2x-1))`. The displayed dual this
//!   restricts carries a leading minus over the summed softmax terms, so the
//!   per-cell value is negated here; without the negation the objective would
//!   *increase* toward the observed answer.
//! * `glad_restricted`: `n x ln(1+e^{-w}) + n (1-x) ln(1+e^{w})`.
//! * `convex_pl`: `n max(H0, H1)` with hyperplanes `H0 = -w - x - 1` and
//!   `H1 = w - 5x + 1`; `H0` attains exactly when `w <= 2x - 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelFamily, ModelHandle, NoiseCdf, ParamPoint};
use crate::response::ResponseMatrix;

/// Which hyperplane attains the `convex_pl` maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    H0,
    H1,
    Tie,
}

/// Value and (sub)gradient of a reduced objective at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedEval {
    pub value: f64,
    pub grad_x: f64,
    pub grad_w: f64,
    /// Attaining hyperplane; populated for `convex_pl` only.
    pub branch: Option<Branch>,
}

/// `ln(1 + e^z)` without overflow for large `|z|`.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Logistic function, stable on both tails.
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Rational approximation of the error function and its exact derivative.
///
/// Abramowitz & Stegun 7.1.26; absolute error below 1.5e-7. The returned
/// derivative differentiates the approximation itself, so analytic gradients
/// built on it agree with finite differences of the implemented objective.
fn erf_approx(z: f64) -> (f64, f64) {
    const P: f64 = 0.327_591_1;
    const A1: f64 = 0.254_829_592;
    const A2: f64 = -0.284_496_736;
    const A3: f64 = 1.421_413_741;
    const A4: f64 = -1.453_152_027;
    const A5: f64 = 1.061_405_429;
    let za = z.abs();
    let s = 1.0 / (1.0 + P * za);
    let poly = ((((A5 * s + A4) * s + A3) * s + A2) * s + A1) * s;
    let dpoly = (((5.0 * A5 * s + 4.0 * A4) * s + 3.0 * A3) * s + 2.0 * A2) * s + A1;
    let gauss = (-za * za).exp();
    let value = 1.0 - poly * gauss;
    let deriv = gauss * (P * s * s * dpoly + 2.0 * za * poly);
    if z < 0.0 {
        (-value, deriv)
    } else {
        (value, deriv)
    }
}

/// Standard normal CDF built on [`erf_approx`], with its exact derivative.
fn normal_cdf(t: f64) -> (f64, f64) {
    const INV_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
    let (e, de) = erf_approx(t * INV_SQRT_2);
    (0.5 * (1.0 + e), 0.5 * de * INV_SQRT_2)
}

/// Per-response value of `L(x, w; 1)` with `n = 1`, no domain checks.
///
/// Callers must keep `(x, w)` inside the clamped box; for `dawid_skene` this
/// means `w < 1` unless `x = 1`.
pub(crate) fn value1(m: &ModelHandle, x: f64, w: f64) -> f64 {
    match m.family {
        ModelFamily::DawidSkene => {
            let t1 = if x == 0.0 { 0.0 } else { x * (0.5 * (1.0 + w)).ln() };
            let t2 = if x == 1.0 { 0.0 } else { (1.0 - x) * (0.5 * (1.0 - w)).ln() };
            -(t1 + t2)
        }
        ModelFamily::AdditiveNoise => {
            let t = (x - 0.5) * w;
            match m.noise_cdf {
                // -ln(1 - F(-t)) = -ln(sigma(t)) = softplus(-t)
                NoiseCdf::Logistic => softplus(-t),
                NoiseCdf::Gaussian => {
                    let (phi, _) = normal_cdf(t);
                    -phi.ln()
                }
            }
        }
        ModelFamily::MinimaxRestricted => {
            let a = (1.0 - x) * (0.5 - w) + x * (0.5 + w);
            let b = x * (0.5 - w) + (1.0 - x) * (0.5 + w);
            -sigmoid(a - b)
        }
        ModelFamily::GladRestricted => x * softplus(-w) + (1.0 - x) * softplus(w),
        ModelFamily::ConvexPl => {
            let (h0, h1) = hyperplanes(x, w);
            h0.max(h1)
        }
    }
}

/// The two hyperplanes of the piecewise-linear convex objective.
pub fn hyperplanes(x: f64, w: f64) -> (f64, f64) {
    (-w - x - 1.0, w - 5.0 * x + 1.0)
}

/// Per-response gradient of `L(x, w; 1)` with `n = 1`.
fn grad1(m: &ModelHandle, x: f64, w: f64) -> (f64, f64, Option<Branch>) {
    match m.family {
        ModelFamily::DawidSkene => {
            let gx = -((0.5 * (1.0 + w)).ln() - (0.5 * (1.0 - w)).ln());
            let gw = -(x / (1.0 + w) - (1.0 - x) / (1.0 - w));
            (gx, gw, None)
        }
        ModelFamily::AdditiveNoise => {
            let t = (x - 0.5) * w;
            let dt = match m.noise_cdf {
                NoiseCdf::Logistic => -sigmoid(-t),
                NoiseCdf::Gaussian => {
                    let (phi, dphi) = normal_cdf(t);
                    -dphi / phi
                }
            };
            (dt * w, dt * (x - 0.5), None)
        }
        ModelFamily::MinimaxRestricted => {
            let z = 2.0 * w * (2.0 * x - 1.0);
            let s = sigmoid(z);
            let ds = s * (1.0 - s);
            (-ds * 4.0 * w, -ds * 2.0 * (2.0 * x - 1.0), None)
        }
        ModelFamily::GladRestricted => {
            let gx = softplus(-w) - softplus(w);
            let gw = (1.0 - x) * sigmoid(w) - x * sigmoid(-w);
            (gx, gw, None)
        }
        ModelFamily::ConvexPl => {
            let (h0, h1) = hyperplanes(x, w);
            // Ties report H1's gradient.
            if h0 > h1 {
                (-1.0, -1.0, Some(Branch::H0))
            } else if h1 > h0 {
                (-5.0, 1.0, Some(Branch::H1))
            } else {
                (-5.0, 1.0, Some(Branch::Tie))
            }
        }
    }
}

fn check_singular(m: &ModelHandle, x: f64, w: f64, xe: f64) -> Result<()> {
    if m.family == ModelFamily::DawidSkene && w >= 1.0 && xe < 1.0 {
        return Err(Error::Singular {
            family: m.family,
            x,
            w,
        });
    }
    Ok(())
}

/// Evaluate the reduced objective `L(x, w; y)`, scaled by `m.n`.
///
/// `y = false` uses the reflection to `L(1 - x, w; 1)`. Inputs outside the
/// closed box are rejected; so is the Dawid-Skene evaluation at `w = 1` when
/// its logarithm would diverge.
pub fn reduced_objective(m: &ModelHandle, x: f64, w: f64, y: bool) -> Result<f64> {
    m.check_domain(x, w)?;
    let xe = if y { x } else { 1.0 - x };
    check_singular(m, x, w, xe)?;
    Ok(m.n as f64 * value1(m, xe, w))
}

/// Analytic (sub)gradient of the reduced objective, scaled by `m.n`.
///
/// For `convex_pl` the gradient of the attaining hyperplane is returned, with
/// exact ties resolved to `H1`. Dawid-Skene gradients diverge at `w = 1` and
/// are rejected there.
pub fn reduced_gradient(m: &ModelHandle, x: f64, w: f64, y: bool) -> Result<(f64, f64)> {
    let e = reduced_eval(m, x, w, y)?;
    Ok((e.grad_x, e.grad_w))
}

/// Value, gradient, and attaining branch in one evaluation.
pub fn reduced_eval(m: &ModelHandle, x: f64, w: f64, y: bool) -> Result<ReducedEval> {
    m.check_domain(x, w)?;
    let xe = if y { x } else { 1.0 - x };
    if m.family == ModelFamily::DawidSkene && w >= 1.0 {
        // The gradient has no finite value at the edge even when the
        // objective does.
        return Err(Error::Singular {
            family: m.family,
            x,
            w,
        });
    }
    let n = m.n as f64;
    let value = n * value1(m, xe, w);
    let (gx, gw, branch) = grad1(m, xe, w);
    let sign = if y { 1.0 } else { -1.0 };
    Ok(ReducedEval {
        value,
        grad_x: sign * n * gx,
        grad_w: n * gw,
        branch,
    })
}

/// Joint objective over the full parameter vectors: the sum of per-response
/// reduced values (each with `n = 1`) over the observed cells of `responses`.
pub fn full_objective(
    m: &ModelHandle,
    point: &ParamPoint,
    responses: &ResponseMatrix,
) -> Result<f64> {
    if point.x.len() != responses.questions() {
        return Err(Error::DimensionMismatch {
            what: "x",
            got: point.x.len(),
            expected: responses.questions(),
        });
    }
    if point.w.len() != responses.workers() {
        return Err(Error::DimensionMismatch {
            what: "w",
            got: point.w.len(),
            expected: responses.workers(),
        });
    }
    point.validate_for(m)?;
    let m1 = ModelHandle { n: 1, ..*m };
    let mut total = 0.0;
    for e in responses.entries() {
        total += reduced_objective(&m1, point.x[e.question], point.w[e.worker], e.answer)?;
    }
    Ok(total)
}

/// The confidence-crossing function `g(w)`: the answer level at which the
/// sign of the ability derivative flips.
///
/// Non-decreasing, valued in `[0.5, 1)`, defined on `[0, W_max)`.
pub fn crossing_g(m: &ModelHandle, w: f64) -> Result<f64> {
    if w.is_nan() || w < 0.0 || w >= m.w_max {
        return Err(Error::DomainViolation {
            name: "w",
            value: w,
            lo: 0.0,
            hi: m.w_max,
        });
    }
    Ok(match m.family {
        ModelFamily::DawidSkene | ModelFamily::ConvexPl => 0.5 * (1.0 + w),
        ModelFamily::AdditiveNoise | ModelFamily::MinimaxRestricted => 0.5,
        ModelFamily::GladRestricted => sigmoid(w),
    })
}
