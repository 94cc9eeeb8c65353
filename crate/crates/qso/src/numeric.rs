//! Small numeric helpers: adaptive quadrature, deterministic summation,
//! Riemann zeta by partial sums.

/// Deterministic pairwise (tree) summation. Left-to-right at the leaves, so
/// the result is independent of how callers chunk their work.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    residual: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = (left + right - whole) / 15.0;
    if err.abs() <= tol || depth == 0 {
        if depth == 0 {
            *residual += err.abs();
        }
        return left + right + err;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, residual)
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, residual)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Returns `(integral, residual)` where `residual` accumulates the error
/// estimates of intervals that hit the recursion depth limit; it is 0 when the
/// tolerance was met everywhere.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    let mut residual = 0.0;
    let v = adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 48, &mut residual);
    (v, residual)
}

/// Riemann zeta at real `s > 1`: partial sum plus Euler-Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta requires s > 1");
    const M: u64 = 100_000;
    let mut acc = 0.0;
    // summed small-to-large for accuracy
    for k in (1..=M).rev() {
        acc += (k as f64).powf(-s);
    }
    let m = M as f64;
    acc + m.powf(1.0 - s) / (s - 1.0) - 0.5 * m.powf(-s) + s * m.powf(-s - 1.0) / 12.0
}
