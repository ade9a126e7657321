//! Joint estimation of answers and abilities, plus rounding and confidence.
//!
//! Three solvers cover the zoo:
//!
//! * [`infer_alternating`] — exact coordinate minimization for the
//!   Dawid-Skene objective. The ability step has a closed form per worker;
//!   the answer step is affine per question, so each answer snaps to an end
//!   of the interval (or to 0.5 on a vanishing coefficient). Initialized
//!   from majority vote plus random restarts; the best run wins.
//! * [`infer_subgradient`] — projected (sub)gradient descent on the box with
//!   step size `step0 / sqrt(t)` from a deterministic center start. Works for
//!   any family; keeps the best iterate seen.
//! * [`solve_convex`] — global minimization of the piecewise-linear convex
//!   objective through its epigraph linear program: one bound variable per
//!   observed cell, two hyperplane constraints each, box constraints on the
//!   parameters.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpOutcome};
use crate::model::{ModelFamily, ModelHandle, ParamPoint};
use crate::objective::{full_objective, reduced_eval};
use crate::response::ResponseMatrix;
use crate::simulate::SplitMix64;

/// Which solver produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InferMethod {
    Alternating,
    Subgradient,
    Epigraph,
}

/// A solution of the joint minimization together with solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferenceResult {
    pub x_hat: Vec<f64>,
    pub w_hat: Vec<f64>,
    pub objective: f64,
    pub method: InferMethod,
    pub iterations: u64,
    pub restarts_used: u32,
    pub converged: bool,
}

impl InferenceResult {
    pub fn point(&self) -> ParamPoint {
        ParamPoint::new(self.x_hat.clone(), self.w_hat.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serialization cannot fail")
    }
}

/// Objective decrease below which an alternating sweep counts as converged.
const ALT_TOL: f64 = 1e-10;
/// Coefficient magnitude below which the affine answer step is treated as
/// flat.
const COEF_TOL: f64 = 1e-12;
const MAX_SWEEPS: u64 = 200;

struct AltRun {
    x: Vec<f64>,
    w: Vec<f64>,
    objective: f64,
    sweeps: u64,
    converged: bool,
    /// Objective after every half-step, for descent diagnostics.
    #[allow(dead_code)]
    trace: Vec<f64>,
}

fn majority_vote(responses: &ResponseMatrix) -> Vec<f64> {
    let d = responses.questions();
    let mut ones = vec![0i64; d];
    let mut total = vec![0i64; d];
    for e in responses.entries() {
        total[e.question] += 1;
        ones[e.question] += e.answer as i64;
    }
    (0..d)
        .map(|j| {
            let zeros = total[j] - ones[j];
            if ones[j] > zeros {
                1.0
            } else if ones[j] < zeros {
                0.0
            } else {
                0.5
            }
        })
        .collect()
}

/// One alternating run from a given answer initialization.
fn alternating_run(m: &ModelHandle, responses: &ResponseMatrix, x0: Vec<f64>) -> AltRun {
    let k = responses.workers();
    let d = responses.questions();
    let w_cap = m.w_eval_cap();
    let mut x = x0;
    let mut w = vec![0.0; k];
    let mut trace = Vec::new();
    let mut objective = f64::INFINITY;
    let mut sweeps = 0;
    let mut converged = false;

    let eval = |x: &Vec<f64>, w: &Vec<f64>| {
        full_objective(m, &ParamPoint::new(x.clone(), w.clone()), responses)
            .expect("iterates stay inside the clamped box")
    };

    while sweeps < MAX_SWEEPS {
        sweeps += 1;

        // Ability step: per worker, the exact minimizer of the one-coin
        // likelihood given the current answers, clamped into [0, w_cap].
        let mut agree = vec![0.0; k];
        let mut count = vec![0u32; k];
        for e in responses.entries() {
            let xj = x[e.question];
            agree[e.worker] += if e.answer { xj } else { 1.0 - xj };
            count[e.worker] += 1;
        }
        for i in 0..k {
            w[i] = if count[i] == 0 {
                0.0
            } else {
                let a = agree[i];
                let b = count[i] as f64 - a;
                ((a - b) / (a + b)).clamp(0.0, w_cap)
            };
        }
        trace.push(eval(&x, &w));

        // Answer step: the objective is affine in each x_j, so the sign of
        // the coefficient decides the end point.
        let mut coef = vec![0.0; d];
        for e in responses.entries() {
            let wi = w[e.worker];
            let sign = if e.answer { 1.0 } else { -1.0 };
            coef[e.question] -= sign * ((0.5 * (1.0 + wi)).ln() - (0.5 * (1.0 - wi)).ln());
        }
        for j in 0..d {
            x[j] = if coef[j] > COEF_TOL {
                0.0
            } else if coef[j] < -COEF_TOL {
                1.0
            } else {
                0.5
            };
        }
        let next = eval(&x, &w);
        trace.push(next);

        if objective - next < ALT_TOL {
            objective = objective.min(next);
            converged = true;
            break;
        }
        objective = next;
    }

    AltRun {
        x,
        w,
        objective,
        sweeps,
        converged,
        trace,
    }
}

/// Dawid-Skene inference by alternating exact coordinate minimization.
///
/// Runs once from the majority-vote initialization and `restarts` more times
/// from uniform-random answer vectors drawn from the seeded stream, returning
/// the run with the lowest objective (ties go to the earliest run).
pub fn infer_alternating(
    m: &ModelHandle,
    responses: &ResponseMatrix,
    restarts: u32,
    seed: u64,
) -> Result<InferenceResult> {
    if m.family != ModelFamily::DawidSkene {
        return Err(Error::WrongFamily {
            expected: ModelFamily::DawidSkene,
            got: m.family,
        });
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter(
            "restarts must be at least 1".into(),
        ));
    }
    let d = responses.questions();
    let mut rng = SplitMix64::new(seed);
    let mut best: Option<AltRun> = None;
    let mut total_sweeps = 0;
    for r in 0..=restarts {
        let x0 = if r == 0 {
            majority_vote(responses)
        } else {
            (0..d).map(|_| rng.next_f64()).collect()
        };
        let run = alternating_run(m, responses, x0);
        total_sweeps += run.sweeps;
        let better = match &best {
            None => true,
            Some(b) => run.objective < b.objective,
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("at least the majority-vote run exists");
    Ok(InferenceResult {
        objective: best.objective,
        x_hat: best.x,
        w_hat: best.w,
        method: InferMethod::Alternating,
        iterations: total_sweeps,
        restarts_used: restarts,
        converged: best.converged,
    })
}

/// Projected (sub)gradient descent on the box for any family.
///
/// Deterministic start at the box center (`x = 0.5`, `w = W_max / 2`), step
/// size `step0 / sqrt(t)`, projection after every step. Returns the best
/// iterate seen; `converged` is always false since the method carries no
/// stopping certificate.
pub fn infer_subgradient(
    m: &ModelHandle,
    responses: &ResponseMatrix,
    steps: u64,
    step0: f64,
) -> Result<InferenceResult> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    if !step0.is_finite() || step0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step0 must be positive, got {step0}"
        )));
    }
    let k = responses.workers();
    let d = responses.questions();
    let w_cap = m.w_eval_cap();
    let m1 = ModelHandle { n: 1, ..*m };

    let mut x = vec![0.5; d];
    let mut w = vec![m.w_max / 2.0; k];
    let eval = |x: &Vec<f64>, w: &Vec<f64>| {
        full_objective(m, &ParamPoint::new(x.clone(), w.clone()), responses)
            .expect("iterates stay inside the clamped box")
    };
    let mut best_obj = eval(&x, &w);
    let mut best_x = x.clone();
    let mut best_w = w.clone();

    let mut gx = vec![0.0; d];
    let mut gw = vec![0.0; k];
    for t in 1..=steps {
        gx.fill(0.0);
        gw.fill(0.0);
        for e in responses.entries() {
            let ev = reduced_eval(&m1, x[e.question], w[e.worker], e.answer)
                .expect("iterates stay inside the clamped box");
            gx[e.question] += ev.grad_x;
            gw[e.worker] += ev.grad_w;
        }
        let eta = step0 / (t as f64).sqrt();
        for j in 0..d {
            x[j] = (x[j] - eta * gx[j]).clamp(0.0, 1.0);
        }
        for i in 0..k {
            w[i] = (w[i] - eta * gw[i]).clamp(0.0, w_cap);
        }
        let obj = eval(&x, &w);
        if obj < best_obj {
            best_obj = obj;
            best_x.copy_from_slice(&x);
            best_w.copy_from_slice(&w);
        }
    }
    Ok(InferenceResult {
        x_hat: best_x,
        w_hat: best_w,
        objective: best_obj,
        method: InferMethod::Subgradient,
        iterations: steps,
        restarts_used: 0,
        converged: false,
    })
}

/// Shift that keeps the epigraph bound variables nonnegative: every
/// per-cell value lies in `[-3, 2]` on the unit box.
const EPI_SHIFT: f64 = 4.0;

/// Globally minimize the piecewise-linear convex objective by linear
/// programming on its epigraph.
///
/// Per observed cell the bound variable must dominate both hyperplanes (the
/// reflected pair for answer 0); the answers and abilities carry box
/// constraints. Any vertex optimum of this program is a global minimizer of
/// the objective.
pub fn solve_convex(responses: &ResponseMatrix) -> InferenceResult {
    let m = ModelHandle::new(ModelFamily::ConvexPl);
    let k = responses.workers();
    let d = responses.questions();
    let cells = responses.entries();
    let nc = cells.len();
    let nvar = d + k + nc;

    let mut c = vec![0.0; nvar];
    for t in 0..nc {
        c[d + k + t] = 1.0;
    }
    let mut a = Vec::with_capacity(2 * nc + d + k);
    let mut b = Vec::with_capacity(2 * nc + d + k);
    for (t, e) in cells.iter().enumerate() {
        // Plane coefficients (ax, aw, constant) with the reflection already
        // applied for answer 0.
        let planes: [(f64, f64, f64); 2] = if e.answer {
            [(-1.0, -1.0, -1.0), (-5.0, 1.0, 1.0)]
        } else {
            [(1.0, -1.0, -2.0), (5.0, 1.0, -4.0)]
        };
        for (ax, aw, c0) in planes {
            let mut row = vec![0.0; nvar];
            row[e.question] = ax;
            row[d + e.worker] = aw;
            row[d + k + t] = -1.0;
            a.push(row);
            b.push(-c0 - EPI_SHIFT);
        }
    }
    for j in 0..d {
        let mut row = vec![0.0; nvar];
        row[j] = 1.0;
        a.push(row);
        b.push(1.0);
    }
    for i in 0..k {
        let mut row = vec![0.0; nvar];
        row[d + i] = 1.0;
        a.push(row);
        b.push(m.w_max);
    }

    let (v, lp_obj, pivots) = match solve_lp(&c, &a, &b) {
        LpOutcome::Optimal {
            v,
            objective,
            pivots,
        } => (v, objective, pivots),
        other => unreachable!("epigraph program is feasible and bounded: {other:?}"),
    };

    let x_hat: Vec<f64> = v[..d].iter().map(|&x| x.clamp(0.0, 1.0)).collect();
    let w_hat: Vec<f64> = v[d..d + k].iter().map(|&w| w.clamp(0.0, m.w_max)).collect();
    let objective = full_objective(&m, &ParamPoint::new(x_hat.clone(), w_hat.clone()), responses)
        .expect("solution is inside the box");
    debug_assert!(
        (objective - (lp_obj - nc as f64 * EPI_SHIFT)).abs() < 1e-6,
        "bound variables must sit on the objective at optimality"
    );
    InferenceResult {
        x_hat,
        w_hat,
        objective,
        method: InferMethod::Epigraph,
        iterations: pivots,
        restarts_used: 0,
        converged: true,
    }
}

fn check_unit(x_hat: &[f64]) -> Result<()> {
    for &v in x_hat {
        if !(0.0..=1.0).contains(&v) || v.is_nan() {
            return Err(Error::DomainViolation {
                name: "x_hat",
                value: v,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    Ok(())
}

/// Threshold rounding: 1 exactly where the soft answer exceeds 0.5.
pub fn round_deterministic(x_hat: &[f64]) -> Result<Vec<u8>> {
    check_unit(x_hat)?;
    Ok(x_hat.iter().map(|&v| (v > 0.5) as u8).collect())
}

/// Bernoulli rounding: coordinate `j` becomes 1 with probability `x_hat[j]`,
/// drawn from the seeded stream in coordinate order.
pub fn round_probabilistic(x_hat: &[f64], seed: u64) -> Result<Vec<u8>> {
    check_unit(x_hat)?;
    let mut rng = SplitMix64::new(seed);
    Ok(x_hat.iter().map(|&v| (rng.next_f64() < v) as u8).collect())
}

/// Distance of each soft answer from the undecided midpoint.
pub fn confidence(x_hat: &[f64]) -> Result<Vec<f64>> {
    check_unit(x_hat)?;
    Ok(x_hat.iter().map(|&v| (v - 0.5).abs()).collect())
}
