//! Objective-surface grids for external plotting.
//!
//! A [`SurfaceGrid`] tabulates one reduced objective over
//! `[0, 1] x [0, W_max - ZETA]`, both edges included. The CSV form carries
//! the exact header `x,w,L` and writes every value with 17 significant
//! digits, so a re-parsed grid reproduces the evaluation bit for bit.

use crate::error::{Error, Result};
use crate::model::{ModelHandle, ZETA};
use crate::objective::reduced_objective;

/// A reduced objective evaluated on a rectangular grid, row-major with the
/// answer axis outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub model: ModelHandle,
    pub y: bool,
    pub x_step: f64,
    pub w_step: f64,
    /// `(x, w, L)` triples.
    pub rows: Vec<(f64, f64, f64)>,
}

/// The ability axis stops at `W_max - ZETA` for every family, so the same
/// grid recipe works where the upper edge diverges.
fn w_cap(m: &ModelHandle) -> f64 {
    (m.w_max - ZETA).max(0.0)
}

fn axis(hi: f64, step: f64) -> Vec<f64> {
    let mut points = Vec::new();
    let mut i = 0u64;
    loop {
        let t = i as f64 * step;
        if t >= hi - 1e-15 {
            break;
        }
        points.push(t);
        i += 1;
    }
    points.push(hi);
    points
}

/// Evaluate `L(x, w; y)` on the grid with the given step on both axes.
pub fn emit_surface(m: &ModelHandle, y: bool, step: f64) -> Result<SurfaceGrid> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::DomainViolation {
            name: "step",
            value: step,
            lo: f64::MIN_POSITIVE,
            hi: 0.1,
        });
    }
    let xs = axis(1.0, step);
    let ws = axis(w_cap(m), step);
    let mut rows = Vec::with_capacity(xs.len() * ws.len());
    for &x in &xs {
        for &w in &ws {
            let value = reduced_objective(m, x, w, y)?;
            rows.push((x, w, value));
        }
    }
    Ok(SurfaceGrid {
        model: *m,
        y,
        x_step: step,
        w_step: step,
        rows,
    })
}

impl SurfaceGrid {
    /// Points along one axis.
    pub fn x_count(&self) -> usize {
        axis(1.0, self.x_step).len()
    }

    pub fn w_count(&self) -> usize {
        axis(w_cap(&self.model), self.w_step).len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 72 + 8);
        out.push_str("x,w,L\n");
        for (x, w, l) in &self.rows {
            out.push_str(&format!("{x:.16e},{w:.16e},{l:.16e}\n"));
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
        let mut lines = text.lines();
        match lines.next() {
            Some("x,w,L") => {}
            other => {
                return Err(Error::InvalidConfig(format!(
                    "expected surface header `x,w,L`, got {other:?}"
                )))
            }
        }
        let mut rows = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let mut next = || -> Result<f64> {
                fields
                    .next()
                    .ok_or_else(|| {
                        Error::InvalidConfig(format!("surface row {} truncated", idx + 2))
                    })?
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidConfig(format!("surface row {}: {e}", idx + 2)))
            };
            rows.push((next()?, next()?, next()?));
        }
        Ok(rows)
    }
}
