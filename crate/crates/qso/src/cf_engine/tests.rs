use super::*;
use crate::distributions::DistributionSpec;

fn normal(mean: f64, variance: f64) -> DistributionSpec {
    DistributionSpec::Normal { mean, variance }
}

fn point(value: f64) -> DistributionSpec {
    DistributionSpec::PointMass { value }
}

#[test]
fn iterate_cf_degenerate_pair() {
    let spec = IterateSpec {
        seed: point(2.0),
        kernel: point(0.0),
        n: 7,
    };
    let grid = iterate_cf(&spec, &symmetric_grid(0.5, 10)).unwrap();
    for (s, v) in grid.points.iter().zip(&grid.values) {
        let expected = Complex64::from_polar(1.0, 2.0 * s);
        assert!((v - expected).norm() < 1e-12, "s={s}");
    }
}

#[test]
fn iterate_cf_normal_closed_form() {
    // phi = exp(i m s - (v_F 2^-n + 2 v_G (1 - 2^-n)) s^2 / 2)
    let (m, v_f, v_g) = (1.25, 1.0, 0.5);
    for n in [0u32, 1, 3, 8] {
        let spec = IterateSpec {
            seed: normal(m, v_f),
            kernel: normal(0.0, v_g),
            n,
        };
        let grid = iterate_cf(&spec, &symmetric_grid(0.25, 40)).unwrap();
        let pow = (n as f64).exp2();
        let var = v_f / pow + 2.0 * v_g * (1.0 - 1.0 / pow);
        for (s, v) in grid.points.iter().zip(&grid.values) {
            let expected = Complex64::new(-var * s * s / 2.0, m * s).exp();
            assert!(
                (v - expected).norm() < 1e-12 * (1.0 + expected.norm()),
                "n={n}, s={s}"
            );
        }
    }
}

#[test]
fn iterate_cf_exponential_seed_reference_value() {
    // F = Exp(1), G = Normal(0, 0.5), n = 1, s = 1:
    // (1/(1 - i/2))^2 e^(-1/4) = 0.37382437587427434 + 0.49843250116569912 i
    let spec = IterateSpec {
        seed: DistributionSpec::Exponential { rate: 1.0 },
        kernel: normal(0.0, 0.5),
        n: 1,
    };
    let grid = iterate_cf(&spec, &[1.0]).unwrap();
    let expected = Complex64::new(0.37382437587427434, 0.49843250116569912);
    assert!((grid.values[0] - expected).norm() < 1e-14);
}

#[test]
fn iterate_cf_n_zero_is_seed() {
    let spec = IterateSpec {
        seed: normal(0.3, 2.0),
        kernel: normal(0.0, 0.5),
        n: 0,
    };
    let grid = iterate_cf(&spec, &symmetric_grid(0.5, 8)).unwrap();
    for (s, v) in grid.points.iter().zip(&grid.values) {
        let expected = spec.seed.analytic_cf(*s).unwrap();
        assert!((v - expected).norm() < 1e-13);
    }
}

#[test]
fn induction_step_consistency() {
    // phi_{H^(n+1)}(s) = (phi_{H^(n)}(s/2))^2 phi_G(s), relative 1e-10
    let pairs = [
        (normal(0.0, 1.0), normal(0.0, 0.5)),
        (DistributionSpec::Exponential { rate: 1.0 }, normal(0.0, 0.5)),
        (
            normal(1.0, 2.0),
            DistributionSpec::SymmetricStable { exponent: 1.5 },
        ),
        (point(2.0), point(0.0)),
    ];
    let points = symmetric_grid(0.2, 25);
    let halved: Vec<f64> = points.iter().map(|s| s / 2.0).collect();
    for (seed, kernel) in pairs {
        for n in 0..6u32 {
            let next = iterate_cf(
                &IterateSpec {
                    seed: seed.clone(),
                    kernel: kernel.clone(),
                    n: n + 1,
                },
                &points,
            )
            .unwrap();
            let cur = iterate_cf(
                &IterateSpec {
                    seed: seed.clone(),
                    kernel: kernel.clone(),
                    n,
                },
                &halved,
            )
            .unwrap();
            for i in 0..points.len() {
                let rhs = cur.values[i] * cur.values[i] * kernel.analytic_cf(points[i]).unwrap();
                let denom = next.values[i].norm().max(1e-30);
                assert!(
                    (next.values[i] - rhs).norm() / denom < 1e-10,
                    "{seed:?}/{kernel:?} n={n} s={}",
                    points[i]
                );
            }
        }
    }
}

#[test]
fn mean_retention_via_phase_derivative() {
    // central difference of the phase at 0 recovers the seed mean
    let m = 0.75;
    for n in [1u32, 4, 12] {
        let spec = IterateSpec {
            seed: normal(m, 1.0),
            kernel: normal(0.0, 0.5),
            n,
        };
        let h = 1e-4;
        let grid = iterate_cf(&spec, &[-h, h]).unwrap();
        let phase = (grid.values[1].arg() - grid.values[0].arg()) / (2.0 * h);
        assert!((phase - m).abs() < 1e-6, "n={n}: {phase}");
    }
}

#[test]
fn variance_recursion_via_log_second_difference() {
    let (v_f, v_g) = (1.0, 0.5);
    for n in [0u32, 2, 6, 12] {
        let spec = IterateSpec {
            seed: DistributionSpec::Exponential { rate: 1.0 },
            kernel: normal(0.0, v_g),
            n,
        };
        let h = 1e-4;
        let grid = iterate_cf(&spec, &[-h, 0.0, h]).unwrap();
        let logs: Vec<Complex64> = grid.values.iter().map(|v| v.ln()).collect();
        let second = (logs[0] - 2.0 * logs[1] + logs[2]) / (h * h);
        let var = -second.re;
        let pow = (n as f64).exp2();
        let expected = v_f / pow + 2.0 * v_g * (1.0 - 1.0 / pow);
        assert!(
            (var - expected).abs() / expected < 1e-4,
            "n={n}: {var} vs {expected}"
        );
    }
}

#[test]
fn kernel_limit_point_mass_is_one() {
    let lim = kernel_limit_cf(&point(0.0), &symmetric_grid(0.5, 10), 64, 1e-12, None).unwrap();
    assert!(lim.converged);
    for v in &lim.grid.values {
        assert_eq!(*v, Complex64::new(1.0, 0.0));
    }
}

#[test]
fn kernel_limit_normal_closed_form() {
    // G = N(0, 0.5): limit is exp(-s^2/2); at s = 1 that is 0.60653065971263342
    let lim = kernel_limit_cf(&normal(0.0, 0.5), &[0.0, 1.0, 2.0], 64, 1e-14, None).unwrap();
    assert!(lim.converged);
    assert!((lim.grid.values[1].re - 0.6065306597126334).abs() < 1e-10);
    assert!((lim.grid.values[2].re - (-2.0f64).exp()).abs() < 1e-9);
}

#[test]
fn kernel_limit_stable_geometric_series() {
    // G stable(1.5): sum_j 2^j (2^-j)^1.5 = 1/(1 - 2^-1/2); at s = 1 the
    // limit is exp(-3.4142135623730950) = 0.032902272114214730
    let lim = kernel_limit_cf(
        &DistributionSpec::SymmetricStable { exponent: 1.5 },
        &[1.0],
        96,
        1e-14,
        None,
    )
    .unwrap();
    assert!(lim.converged);
    assert!(
        (lim.grid.values[0].re - 0.03290227211421473).abs() < 1e-10,
        "{}",
        lim.grid.values[0].re
    );
}

#[test]
fn kernel_limit_halving_tol_stays_within_reported_bound() {
    let points = symmetric_grid(0.25, 20);
    let tail = TailBoundParams::new(1.0, 1.5, 10.0).unwrap();
    let kernel = DistributionSpec::SymmetricStable { exponent: 1.5 };
    let coarse = kernel_limit_cf(&kernel, &points, 96, 1e-6, Some(&tail)).unwrap();
    let fine = kernel_limit_cf(&kernel, &points, 96, 5e-7, Some(&tail)).unwrap();
    let bound = coarse.truncation_bound.unwrap();
    for (a, b) in coarse.grid.values.iter().zip(&fine.grid.values) {
        assert!((a - b).norm() <= bound, "{} > {bound}", (a - b).norm());
    }
}

#[test]
fn kernel_limit_nonconvergence_without_tail_params() {
    // depth cap 1 cannot satisfy tol, and no bound is available
    let err = kernel_limit_cf(&normal(0.0, 0.5), &[4.0], 1, 1e-14, None).unwrap_err();
    assert!(matches!(err, QsoError::NonConvergence { .. }));
}

#[test]
fn fixed_point_normal_unit_variance() {
    let points = symmetric_grid(0.05, 200);
    let kernel = normal(0.0, 0.5);
    for mu in [0.0, 1.0, -3.0] {
        let candidate = CFGrid::from_spec(&normal(mu, 1.0), &points).unwrap();
        let report = fixed_point_residual(&candidate, &kernel).unwrap();
        assert!(
            report.sup_residual < 1e-12,
            "mu={mu}: {}",
            report.sup_residual
        );
    }
}

#[test]
fn fixed_point_negative_control() {
    // N(0, 2) is not a fixed point for the N(0, 0.5) kernel
    let points = symmetric_grid(0.05, 200);
    let candidate = CFGrid::from_spec(&normal(0.0, 2.0), &points).unwrap();
    let report = fixed_point_residual(&candidate, &normal(0.0, 0.5)).unwrap();
    assert!(report.sup_residual > 0.1, "{}", report.sup_residual);
}

#[test]
fn fixed_point_degenerate() {
    let points = symmetric_grid(0.5, 10);
    let candidate = CFGrid::from_spec(&point(0.0), &points).unwrap();
    let report = fixed_point_residual(&candidate, &point(0.0)).unwrap();
    assert_eq!(report.sup_residual, 0.0);
}

#[test]
fn fixed_point_needs_usable_grid() {
    // irrational spacing: no point has s/2 on the grid except 0
    let points = vec![-1.1, 0.7, 1.3];
    let candidate = CFGrid::from_spec(&point(0.0), &points).unwrap();
    assert!(matches!(
        fixed_point_residual(&candidate, &point(0.0)),
        Err(QsoError::InvalidGrid(_))
    ));
}

#[test]
fn dyadic_stability_cauchy_cf() {
    // exp(-c|s| + i m s) satisfies phi(2s) = phi(s)^2
    let points = symmetric_grid(0.1, 100);
    let candidate = CFGrid::from_fn(&points, |s| {
        (Complex64::new(-0.8 * s.abs(), 0.4 * s)).exp()
    });
    let report = dyadic_stability_residual(&candidate).unwrap();
    assert!(report.sup_residual < 1e-12, "{}", report.sup_residual);

    let degenerate = CFGrid::from_fn(&points, |s| Complex64::from_polar(1.0, 2.0 * s));
    let report = dyadic_stability_residual(&degenerate).unwrap();
    assert!(report.sup_residual < 1e-15);
}

#[test]
fn dyadic_stability_normal_negative_control() {
    // sup |e^(-2s^2) - e^(-s^2)| is about 0.25 (attained at s^2 = ln 2)
    let points = symmetric_grid(0.05, 100);
    let candidate = CFGrid::from_spec(&normal(0.0, 1.0), &points).unwrap();
    let report = dyadic_stability_residual(&candidate).unwrap();
    assert!(
        (report.sup_residual - 0.25).abs() < 0.01,
        "{}",
        report.sup_residual
    );
}

#[test]
fn tail_bound_normal_exact_log() {
    // |ln phi_G| = v s^2 / 2 <= v s^2
    let params = TailBoundParams::new(0.5, 2.0, 1.0).unwrap();
    let points: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.05).collect();
    let report = verify_tail_bound(&normal(0.0, 0.5), &params, &points).unwrap();
    assert!(report.holds);
    assert!((report.worst_ratio - 0.5).abs() < 1e-9);
    assert!(report.sandwich_holds);
}

#[test]
fn tail_bound_stable_is_tight() {
    let eps = 0.5;
    let params = TailBoundParams::new(1.0, 1.0 + eps, 1.0).unwrap();
    let points: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.1).collect();
    let report = verify_tail_bound(
        &DistributionSpec::SymmetricStable { exponent: 1.0 + eps },
        &params,
        &points,
    )
    .unwrap();
    assert!(report.holds);
    assert!((report.worst_ratio - 1.0).abs() < 1e-12);
    assert!(report.sandwich_holds);
}

#[test]
fn tail_bound_power_law_from_proposition_constant() {
    let eps = 0.5;
    let spec = DistributionSpec::DiscretePowerLaw { epsilon: eps };
    // fit C at x = 1: tail(1) = C
    let c_fit = spec.tail_mass(1.0).unwrap().1;
    let params = TailBoundParams::from_tail_constant(c_fit, eps, 1.0).unwrap();
    let points: Vec<f64> = (1..=20).map(|k| k as f64 * 0.05).collect();
    let report = verify_tail_bound(&spec, &params, &points).unwrap();
    assert!(report.holds, "worst ratio {}", report.worst_ratio);
    assert!(report.sandwich_holds);
}

#[test]
fn tail_bound_rejects_out_of_range_grid() {
    let params = TailBoundParams::new(1.0, 2.0, 1.0).unwrap();
    assert!(matches!(
        verify_tail_bound(&normal(0.0, 1.0), &params, &[0.5, 2.0]),
        Err(QsoError::InvalidGrid(_))
    ));
}

#[test]
fn stable_limit_exact_cauchy_is_exact() {
    // CauchyLike(0, 1, 2) is the standard Cauchy: phi = exp(-|s|), C = 1/pi
    let dist = DistributionSpec::CauchyLike {
        mu: 0.0,
        a: 1.0,
        alpha: 2.0,
    };
    let points = symmetric_grid(0.25, 20);
    let rows = stable_limit_check(
        &dist,
        1.0 / std::f64::consts::PI,
        &[1, 4, 16, 256, 1024],
        &points,
    )
    .unwrap();
    for row in &rows {
        assert!(row.sup_error < 1e-12, "n={}: {}", row.n, row.sup_error);
    }
}

#[test]
fn stable_limit_normal_negative_control() {
    let rows = stable_limit_check(
        &normal(0.0, 1.0),
        1.0 / std::f64::consts::PI,
        &[16, 256, 4096],
        &symmetric_grid(0.25, 20),
    )
    .unwrap();
    for row in rows {
        assert!(row.sup_error > 0.3, "n={}: {}", row.n, row.sup_error);
    }
}

#[test]
fn levy_constant_reference_values() {
    // frozen against a 40-digit Gamma evaluation
    assert!((levy_constant(0.5).unwrap() - 3.7599424119465008).abs() < 1e-9);
    assert!((levy_constant(0.99).unwrap() - 199.84488237584439).abs() < 1e-6);
    // eps -> 0+ limit is pi/2
    assert!((levy_constant(0.001).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-2);
    assert!(levy_constant(0.0).is_err());
    assert!(levy_constant(1.0).is_err());
}

#[test]
fn remark_sandwich_exact_inequality() {
    // direct check on a sweep of complex a with |a| < 0.5
    for k in 1..50 {
        for phase in 0..8 {
            let a = Complex64::from_polar(0.01 * k as f64, phase as f64 * 0.7);
            let log_norm = (Complex64::new(1.0, 0.0) + a).ln().norm();
            let m = a.norm();
            assert!(m * (1.0 - m) <= log_norm && log_norm <= m * (1.0 + m), "a={a}");
        }
    }
}
