//! Objective functions for crowdsourced label aggregation, their structural
//! properties, and inference.
//!
//! Crowd-labeling models infer the true answers `x` and worker abilities `w`
//! jointly by minimizing an objective `L(x, w; Y)` over the observed response
//! matrix `Y`. This crate implements five concrete objective families and the
//! machinery to study the one property none of the spammer-aware ones can
//! have: convexity.
//!
//! * [`response`] — the sparse binary response matrix and its JSON format.
//! * [`model`] — model handles, hyperparameters, and parameter points.
//! * [`objective`] — reduced and joint objectives, gradients, and each
//!   family's confidence-crossing function.
//! * [`verify`] — numerical property checks, the constructive Jensen
//!   violation for spammer-modeling objectives, a randomized convexity
//!   probe, and the max-of-hyperplanes certificate for the convex family.
//! * [`infer`] — alternating minimization for Dawid-Skene, projected
//!   subgradient descent for any family, an exact epigraph LP solver for the
//!   convex family, and rounding/confidence post-processing.
//! * [`simulate`] — a portable deterministic PRNG, synthetic instance
//!   generation with explicit spammer populations, and evaluation metrics.
//! * [`surface`] — objective-surface grids in CSV form for plotting.

pub mod error;
pub mod infer;
mod lp;
pub mod model;
pub mod objective;
pub mod response;
pub mod simulate;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
pub use infer::{
    confidence, infer_alternating, infer_subgradient, round_deterministic, round_probabilistic,
    solve_convex, InferMethod, InferenceResult,
};
pub use model::{ModelConfig, ModelFamily, ModelHandle, NoiseCdf, ParamPoint, ZETA};
pub use objective::{
    crossing_g, full_objective, hyperplanes, reduced_eval, reduced_gradient, reduced_objective,
    Branch, ReducedEval,
};
pub use response::{validate_responses, RawEntry, RawResponses, ResponseEntry, ResponseMatrix};
pub use simulate::{
    evaluate, generate, AbilityBand, Assignment, GroundTruth, Metrics, SimConfig, SplitMix64,
};
pub use surface::{emit_surface, SurfaceGrid};
pub use verify::{
    check_axiom1, check_axiom2, check_p1, check_p2, check_p3, find_axiom1_eps,
    hyperplane_identity, jensen_probe, standard_battery, constructive_witness, Counterexample,
    GridSpec, PropertyReport, PropertyTarget, WitnessReport,
};
