//! Cross-method checks for the convex piecewise-linear objective.

use crowdobj_core::*;

/// Exhaustive 201-per-axis grid minimum for a 2x2 instance, computed by
/// scanning ability pairs and minimizing the separable answer coordinates
/// exactly on their own 201-point grids. Identical to the full
/// 201x201x201x201 scan because the objective is a sum of per-question terms
/// once the abilities are fixed.
fn grid_oracle_2x2(y: &ResponseMatrix) -> f64 {
    assert_eq!(y.workers(), 2);
    assert_eq!(y.questions(), 2);
    let cell = |x: f64, w: f64, ans: bool| -> f64 {
        let xe = if ans { x } else { 1.0 - x };
        let (h0, h1) = hyperplanes(xe, w);
        h0.max(h1)
    };
    let axis: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
    let mut best = f64::INFINITY;
    for &w1 in &axis {
        for &w2 in &axis {
            let w = [w1, w2];
            let mut total = 0.0;
            for j in 0..2 {
                let mut qmin = f64::INFINITY;
                for &x in &axis {
                    let mut v = 0.0;
                    for e in y.entries().iter().filter(|e| e.question == j) {
                        v += cell(x, w[e.worker], e.answer);
                    }
                    qmin = qmin.min(v);
                }
                total += qmin;
            }
            best = best.min(total);
        }
    }
    best
}

#[test]
fn epigraph_solution_matches_dense_grid_on_mixed_2x2() {
    let y = ResponseMatrix::from_triples(
        2,
        2,
        &[(0, 0, true), (0, 1, false), (1, 0, false), (1, 1, true)],
    )
    .unwrap();
    let lp = solve_convex(&y);
    let oracle = grid_oracle_2x2(&y);
    assert!(
        (lp.objective - oracle).abs() <= 1e-3,
        "lp {} vs grid {}",
        lp.objective,
        oracle
    );
    assert!(lp.objective <= oracle + 1e-9);
}

#[test]
fn methods_agree_exactly_on_corner_pinned_instances() {
    // Unanimous single-answer instances have their optimum at a box corner,
    // where the projection makes the subgradient iterates land exactly.
    let pl = ModelHandle::new(ModelFamily::ConvexPl);
    let ones = ResponseMatrix::from_triples(2, 2, &[(0, 0, true), (1, 1, true)]).unwrap();
    let zeros = ResponseMatrix::from_triples(1, 2, &[(0, 0, false), (0, 1, false)]).unwrap();
    for y in [ones, zeros] {
        let lp = solve_convex(&y);
        let sg = infer_subgradient(&pl, &y, 100_000, 0.5).unwrap();
        assert!(
            (lp.objective - sg.objective).abs() <= 1e-4,
            "lp {} vs subgradient {}",
            lp.objective,
            sg.objective
        );
    }
}

#[test]
fn single_cell_optima_are_exact() {
    let y1 = ResponseMatrix::from_triples(1, 1, &[(0, 0, true)]).unwrap();
    let r1 = solve_convex(&y1);
    assert!((r1.objective + 3.0).abs() < 1e-9);
    assert!((r1.x_hat[0] - 1.0).abs() < 1e-9 && (r1.w_hat[0] - 1.0).abs() < 1e-9);

    let y0 = ResponseMatrix::from_triples(1, 1, &[(0, 0, false)]).unwrap();
    let r0 = solve_convex(&y0);
    assert!((r0.objective + 3.0).abs() < 1e-9);
    assert!(r0.x_hat[0].abs() < 1e-9 && (r0.w_hat[0] - 1.0).abs() < 1e-9);
}

#[test]
fn subgradient_on_convex_objective_descends_toward_optimum() {
    // Longer budgets never move the best-seen objective away from the LP
    // optimum.
    let pl = ModelHandle::new(ModelFamily::ConvexPl);
    let y = ResponseMatrix::from_triples(
        3,
        2,
        &[
            (0, 0, true),
            (0, 1, false),
            (1, 0, true),
            (1, 1, true),
            (2, 0, false),
            (2, 1, true),
        ],
    )
    .unwrap();
    let lp = solve_convex(&y);
    let mut prev_gap = f64::INFINITY;
    for steps in [100u64, 1_000, 10_000] {
        let sg = infer_subgradient(&pl, &y, steps, 0.5).unwrap();
        let gap = sg.objective - lp.objective;
        assert!(gap >= -1e-9, "subgradient below the global optimum");
        assert!(gap <= prev_gap + 1e-12, "best-seen regressed at {steps}");
        prev_gap = gap;
    }
}
