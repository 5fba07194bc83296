use geohmc_demo::{kinetic, potential_grid, sample, target, trajectory, TARGETS};

#[test]
fn every_target_builds_with_both_kinetics() {
    for name in TARGETS {
        let m = target(name).unwrap();
        assert_eq!(m.dim(), 2);
        for k in ["euclidean", "riemannian"] {
            kinetic(k, &m).unwrap();
        }
    }
    assert!(target("nope").is_err());
}

#[test]
fn grid_marks_infeasible_points() {
    let m = target("halfspace").unwrap();
    let grid = potential_grid(&m, [-1.0, 1.0, -1.0, 1.0], 5, 5);
    assert_eq!(grid.len(), 25);
    // Rows run top to bottom: (-1, 1) has q1 < 0, (1, 1) has q1 + q2 > 1.5,
    // (1, 0) is inside.
    assert!(grid[0].is_infinite());
    assert!(grid[4].is_infinite());
    assert!(grid[2 * 5 + 4].is_finite());
}

#[test]
fn trajectory_stays_feasible_and_reports_reflections() {
    let m = target("halfspace").unwrap();
    let k = kinetic("euclidean", &m).unwrap();
    let path = trajectory(&m, &k, [0.5, 0.0], [-2.0, 0.3], 0.05, 40).unwrap();
    assert_eq!(path.points.len(), 2 * 41);
    assert_eq!(path.energy.len(), 41);
    assert!(path.reflections >= 1);
    assert!(path.points.chunks(2).all(|xy| xy[0] >= -1e-9 && xy[0] + xy[1] <= 1.5 + 1e-9));
    let drift = path.energy.iter().map(|h| (h - path.energy[0]).abs()).fold(0.0, f64::max);
    // Reflection events are only first-order accurate in the step size.
    assert!(drift < 0.1, "energy drift {drift}");
}

#[test]
fn riemannian_sampling_on_banana_is_reasonable() {
    let m = target("banana").unwrap();
    let k = kinetic("riemannian", &m).unwrap();
    let s = sample(&m, &k, 1, 300, 0.05, 15).unwrap();
    assert_eq!(s.points.len(), 600);
    assert!(s.accept_rate > 0.5, "accept {}", s.accept_rate);
}
