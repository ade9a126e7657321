//! A small dense two-phase simplex solver.
//!
//! Solves `minimize c . v` subject to `A v <= b`, `v >= 0`. This is all the
//! epigraph formulation of the piecewise-linear objective needs: instances
//! have a few dozen variables, so a dense tableau with Bland's rule is exact,
//! fast, and cannot cycle.

const EPS: f64 = 1e-9;
const MAX_PIVOTS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal {
        v: Vec<f64>,
        objective: f64,
        pivots: u64,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `rows x cols` body, last column is the RHS.
    t: Vec<Vec<f64>>,
    /// Objective row (reduced costs), last entry is `-objective`.
    cost: Vec<f64>,
    /// Basic variable of each row.
    basis: Vec<usize>,
    rows: usize,
    cols: usize,
    pivots: u64,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[row][col];
        debug_assert!(piv.abs() > EPS);
        for v in &mut self.t[row] {
            *v /= piv;
        }
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.t[r][col];
            if factor == 0.0 {
                continue;
            }
            for c in 0..=self.cols {
                self.t[r][c] -= factor * self.t[row][c];
            }
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for c in 0..=self.cols {
                self.cost[c] -= factor * self.t[row][c];
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Bland's rule: enter the lowest-index improving column, leave by the
    /// minimum ratio with ties broken toward the lowest basic index.
    fn run(&mut self, allowed: usize) -> Result<(), LpOutcome> {
        loop {
            let mut entering = None;
            for c in 0..allowed {
                if self.cost[c] < -EPS {
                    entering = Some(c);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.t[r][col];
                if a > EPS {
                    let ratio = self.t[r][self.cols] / a;
                    let better = match leaving {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - EPS
                                || (ratio < lratio + EPS && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return Err(LpOutcome::Unbounded);
            };
            self.pivot(row, col);
            if self.pivots > MAX_PIVOTS {
                // Cannot happen with Bland's rule on these sizes; fail loudly
                // rather than spin.
                panic!("simplex exceeded pivot budget");
            }
        }
    }
}

/// Minimize `c . v` subject to `a[r] . v <= b[r]` for every row and `v >= 0`.
pub(crate) fn solve_lp(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    debug_assert_eq!(b.len(), m);

    // Columns: n structural, m slacks, then one artificial per negative-RHS
    // row. Rows with b >= 0 start with their slack basic; rows with b < 0 are
    // negated (slack coefficient -1) and get an artificial.
    let neg: Vec<bool> = b.iter().map(|&bi| bi < 0.0).collect();
    let n_art = neg.iter().filter(|&&v| v).count();
    let cols = n + m + n_art;

    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut art_idx = 0;
    for r in 0..m {
        let sign = if neg[r] { -1.0 } else { 1.0 };
        for j in 0..n {
            t[r][j] = sign * a[r][j];
        }
        t[r][n + r] = sign;
        t[r][cols] = sign * b[r];
        if neg[r] {
            let col = n + m + art_idx;
            t[r][col] = 1.0;
            basis[r] = col;
            art_idx += 1;
        } else {
            basis[r] = n + r;
        }
    }

    let mut tab = Tableau {
        t,
        cost: vec![0.0; cols + 1],
        basis,
        rows: m,
        cols,
        pivots: 0,
    };

    if n_art > 0 {
        // Phase 1: price out the artificials.
        for col in n + m..cols {
            tab.cost[col] = 1.0;
        }
        for r in 0..m {
            if tab.basis[r] >= n + m {
                for c in 0..=cols {
                    tab.cost[c] -= tab.t[r][c];
                }
            }
        }
        if let Err(out) = tab.run(cols) {
            return out;
        }
        let phase1 = -tab.cost[cols];
        if phase1 > 1e-7 {
            return LpOutcome::Infeasible;
        }
        // Remove artificials still sitting in the basis at level zero.
        for r in 0..m {
            if tab.basis[r] >= n + m {
                if let Some(col) = (0..n + m).find(|&c| tab.t[r][c].abs() > EPS) {
                    tab.pivot(r, col);
                }
            }
        }
    }

    // Phase 2 with the real objective, artificials banned from entering.
    tab.cost = vec![0.0; cols + 1];
    tab.cost[..n].copy_from_slice(c);
    for r in 0..m {
        let bv = tab.basis[r];
        let factor = tab.cost[bv];
        if factor != 0.0 {
            for ccol in 0..=cols {
                tab.cost[ccol] -= factor * tab.t[r][ccol];
            }
        }
    }
    if let Err(out) = tab.run(n + m) {
        return out;
    }

    let mut v = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            v[tab.basis[r]] = tab.t[r][tab.cols];
        }
    }
    let objective = v.iter().zip(c).map(|(vi, ci)| vi * ci).sum();
    LpOutcome::Optimal {
        v,
        objective,
        pivots: tab.pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(out: LpOutcome) -> (Vec<f64>, f64) {
        match out {
            LpOutcome::Optimal { v, objective, .. } => (v, objective),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximization_as_minimization() {
        // max x + 2y s.t. x + y <= 4, 2x + y >= 2, 0 <= y <= 3, x >= 0.
        // Optimum 7 at (1, 3).
        let c = vec![-1.0, -2.0];
        let a = vec![
            vec![1.0, 1.0],
            vec![-2.0, -1.0],
            vec![0.0, 1.0],
        ];
        let b = vec![4.0, -2.0, 3.0];
        let (v, obj) = optimal(solve_lp(&c, &a, &b));
        assert!((obj + 7.0).abs() < 1e-9);
        assert!((v[0] - 1.0).abs() < 1e-9);
        assert!((v[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // min x + y s.t. x + y >= 2, x <= 5, y <= 5. Optimum 2.
        let c = vec![1.0, 1.0];
        let a = vec![vec![-1.0, -1.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let b = vec![-2.0, 5.0, 5.0];
        let (v, obj) = optimal(solve_lp(&c, &a, &b));
        assert!((obj - 2.0).abs() < 1e-9);
        assert!((v[0] + v[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        // x >= 3 and x <= 1.
        let c = vec![1.0];
        let a = vec![vec![-1.0], vec![1.0]];
        let b = vec![-3.0, 1.0];
        assert_eq!(solve_lp(&c, &a, &b), LpOutcome::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let c = vec![-1.0];
        let a = vec![vec![0.0]];
        let b = vec![1.0];
        assert_eq!(solve_lp(&c, &a, &b), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_vertices_terminate() {
        // Degenerate: several constraints meet at the optimum.
        let c = vec![-1.0, -1.0];
        let a = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![1.0, 1.0],
        ];
        let b = vec![1.0, 1.0, 2.0, 2.0];
        let (v, obj) = optimal(solve_lp(&c, &a, &b));
        assert!((obj + 2.0).abs() < 1e-9);
        assert!((v[0] - 1.0).abs() < 1e-9 && (v[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn epigraph_of_scalar_max() {
        // min t s.t. t >= 1 - z, t >= z, 0 <= z: optimum 0.5 at z = 0.5.
        // Shift t by 2 to keep variables nonnegative.
        let c = vec![0.0, 1.0];
        let a = vec![
            vec![-1.0, -1.0], // 1 - z <= t' - 2  =>  -z - t' <= -3
            vec![1.0, -1.0],  // z <= t' - 2      =>   z - t' <= -2
            vec![1.0, 0.0],   // z <= 1
        ];
        let b = vec![-3.0, -2.0, 1.0];
        let (v, obj) = optimal(solve_lp(&c, &a, &b));
        assert!((obj - 2.5).abs() < 1e-9, "objective {obj}");
        assert!((v[0] - 0.5).abs() < 1e-9, "z {}", v[0]);
    }
}
