//! Exact characteristic-function computation for QSO iterates: the dyadic
//! product formula, the kernel-limit infinite product, fixed-point and dyadic
//! stability residuals, and the tail/log bounds used as convergence
//! certificates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::distributions::DistributionSpec;
use crate::error::{QsoError, Result};

/// Evaluation grid of frequency points with complex CF values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CFGrid {
    pub points: Vec<f64>,
    pub values: Vec<Complex64>,
    pub flags: Vec<PointFlag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFlag {
    Ok,
    /// Some factor had modulus below 1e-300; the product was clamped to 0.
    Underflow,
    /// A factor's principal log had |Im| > pi/2; branch crossing possible.
    BranchSuspect,
}

impl CFGrid {
    pub fn new(points: Vec<f64>, values: Vec<Complex64>) -> Self {
        let flags = vec![PointFlag::Ok; points.len()];
        Self {
            points,
            values,
            flags,
        }
    }

    /// Evaluate an analytic CF on a grid.
    pub fn from_spec(spec: &DistributionSpec, points: &[f64]) -> Result<Self> {
        let values = points
            .iter()
            .map(|s| spec.analytic_cf(*s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(points.to_vec(), values))
    }

    /// Evaluate a closed-form CF on a grid.
    pub fn from_fn(points: &[f64], f: impl Fn(f64) -> Complex64) -> Self {
        let values = points.iter().map(|s| f(*s)).collect();
        Self::new(points.to_vec(), values)
    }

    fn index_of(&self, target: f64) -> Option<usize> {
        let tol = 1e-9 * (1.0 + target.abs());
        let i = self.points.partition_point(|p| *p < target - tol);
        if i < self.points.len() && (self.points[i] - target).abs() <= tol {
            Some(i)
        } else {
            None
        }
    }
}

/// Symmetric arithmetic grid `{k * delta : |k| <= half_points}`; `s/2` lies on
/// the grid for every even `k`, which is what the residual operations need.
pub fn symmetric_grid(delta: f64, half_points: i64) -> Vec<f64> {
    (-half_points..=half_points)
        .map(|k| k as f64 * delta)
        .collect()
}

/// `(F, G, n)` identifying the iterate `H^(n)`; `n = 0` is `F` itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateSpec {
    pub seed: DistributionSpec,
    pub kernel: DistributionSpec,
    pub n: u32,
}

/// Parameters of the log-CF tail bound `|ln phi_G(s)| <= A |s|^p` on
/// `|s| <= s_max`, optionally derived from a power tail constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundParams {
    pub amplitude: f64,
    pub power: f64,
    pub s_max: f64,
    pub tail_constant: Option<f64>,
    pub tail_exponent: Option<f64>,
}

impl TailBoundParams {
    pub fn new(amplitude: f64, power: f64, s_max: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !(power > 1.0) || !(s_max > 0.0) {
            return Err(QsoError::Domain(format!(
                "tail bound requires A > 0, p > 1, s_max > 0; got ({amplitude}, {power}, {s_max})"
            )));
        }
        Ok(Self {
            amplitude,
            power,
            s_max,
            tail_constant: None,
            tail_exponent: None,
        })
    }

    /// Derive `(A, p)` from a symmetric tail bound `C x^-(1+eps)` via the
    /// explicit constant `2 C pi^(1-eps) + 4 C pi^-(1+eps)` of the tail
    /// proposition's proof.
    pub fn from_tail_constant(c: f64, epsilon: f64, s_max: f64) -> Result<Self> {
        if !(c > 0.0) || !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(QsoError::Domain(format!(
                "tail constant requires C > 0 and eps in (0,1); got ({c}, {epsilon})"
            )));
        }
        let pi = std::f64::consts::PI;
        let amplitude = 2.0 * c * pi.powf(1.0 - epsilon) + 4.0 * c * pi.powf(-(1.0 + epsilon));
        let mut params = Self::new(amplitude, 1.0 + epsilon, s_max)?;
        params.tail_constant = Some(c);
        params.tail_exponent = Some(epsilon);
        Ok(params)
    }
}

struct LogAccumulator {
    sum: Complex64,
    flag: PointFlag,
    zero: bool,
}

impl LogAccumulator {
    fn new() -> Self {
        Self {
            sum: Complex64::new(0.0, 0.0),
            flag: PointFlag::Ok,
            zero: false,
        }
    }

    fn push(&mut self, factor: Complex64, weight: f64) {
        if factor.norm() < 1e-300 {
            self.zero = true;
            self.flag = PointFlag::Underflow;
            return;
        }
        self.push_log(factor.ln(), weight);
    }

    fn push_log(&mut self, log: Complex64, weight: f64) {
        if log.im.abs() > std::f64::consts::FRAC_PI_2 {
            self.flag = PointFlag::BranchSuspect;
        }
        self.sum += weight * log;
    }

    fn finish(self) -> (Complex64, PointFlag) {
        if self.zero {
            return (Complex64::new(0.0, 0.0), self.flag);
        }
        if self.sum.re < -690.0 {
            return (Complex64::new(0.0, 0.0), PointFlag::Underflow);
        }
        (self.sum.exp(), self.flag)
    }
}

/// One log-domain factor: the closed-form log-CF when the family has one
/// (accurate even where the CF itself rounds to 1), else the principal log
/// of the evaluated CF. Returns the log-modulus contribution `w |Log phi|`.
fn push_factor(
    acc: &mut LogAccumulator,
    dist: &DistributionSpec,
    s: f64,
    weight: f64,
) -> Result<f64> {
    if let Some(log) = dist.analytic_log_cf(s) {
        acc.push_log(log, weight);
        return Ok(weight * log.norm());
    }
    let phi = dist.analytic_cf(s)?;
    let contrib = if phi.norm() >= 1e-300 {
        weight * phi.ln().norm()
    } else {
        f64::INFINITY
    };
    acc.push(phi, weight);
    Ok(contrib)
}

/// `phi_{H^(n)}` on the grid via the product formula
/// `(phi_F(s/2^n))^(2^n) prod_j (phi_G(s/2^j))^(2^j)`, accumulated in the
/// log domain with the principal branch per factor.
pub fn iterate_cf(spec: &IterateSpec, points: &[f64]) -> Result<CFGrid> {
    spec.seed.validate()?;
    spec.kernel.validate()?;
    let n = spec.n;
    let mut values = Vec::with_capacity(points.len());
    let mut flags = Vec::with_capacity(points.len());
    for &s in points {
        let mut acc = LogAccumulator::new();
        let scale = (n as f64).exp2();
        push_factor(&mut acc, &spec.seed, s / scale, scale)?;
        for j in 0..n {
            let w = (j as f64).exp2();
            push_factor(&mut acc, &spec.kernel, s / w, w)?;
        }
        let (v, flag) = acc.finish();
        values.push(v);
        flags.push(flag);
    }
    Ok(CFGrid {
        points: points.to_vec(),
        values,
        flags,
    })
}

/// Result of the truncated kernel-limit product.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelLimit {
    pub grid: CFGrid,
    pub depth: u32,
    pub converged: bool,
    /// Largest log-modulus contribution of the last factor over the grid.
    pub last_increment: f64,
    /// `A max|s|^p 2^(-J(p-1)) / (1 - 2^(-(p-1)))` when tail params are known.
    pub truncation_bound: Option<f64>,
}

/// `phi_{G^(infinity)}` approximated by truncating the infinite product when
/// the incremental factor's contribution drops below `tol` uniformly on the
/// grid, or at `depth_cap`.
pub fn kernel_limit_cf(
    kernel: &DistributionSpec,
    points: &[f64],
    depth_cap: u32,
    tol: f64,
    tail: Option<&TailBoundParams>,
) -> Result<KernelLimit> {
    kernel.validate()?;
    if !(tol > 0.0) {
        return Err(QsoError::Domain(format!("tol must be positive, got {tol}")));
    }
    let mut accs: Vec<LogAccumulator> = points.iter().map(|_| LogAccumulator::new()).collect();
    let mut depth = 0;
    let mut last_increment = f64::INFINITY;
    let mut converged = false;
    for j in 0..depth_cap {
        let w = (j as f64).exp2();
        let mut max_contrib = 0.0f64;
        for (acc, &s) in accs.iter_mut().zip(points) {
            max_contrib = max_contrib.max(push_factor(acc, kernel, s / w, w)?);
        }
        depth = j + 1;
        last_increment = max_contrib;
        if max_contrib < tol {
            converged = true;
            break;
        }
    }
    let truncation_bound = tail.map(|t| {
        let s_sup = points.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let pm1 = t.power - 1.0;
        t.amplitude * s_sup.powf(t.power) * (-(depth as f64) * pm1).exp2()
            / (1.0 - (-pm1).exp2())
    });
    if !converged && truncation_bound.is_none() {
        return Err(QsoError::NonConvergence {
            depth_cap,
            last_increment,
        });
    }
    let mut values = Vec::with_capacity(points.len());
    let mut flags = Vec::with_capacity(points.len());
    for acc in accs {
        let (v, f) = acc.finish();
        values.push(v);
        flags.push(f);
    }
    Ok(KernelLimit {
        grid: CFGrid {
            points: points.to_vec(),
            values,
            flags,
        },
        depth,
        converged,
        last_increment,
        truncation_bound,
    })
}

/// Sup-residual report; serializes with the fixed field names of the CLI's
/// JSON output format.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResidualReport {
    pub sup_residual: f64,
    pub argmax_s: f64,
    pub points_used: usize,
}

/// Sup over usable grid points of `|phi(s) - (phi(s/2))^2 phi_G(s)|`, the
/// fixed-point functional equation of the limit law.
pub fn fixed_point_residual(
    candidate: &CFGrid,
    kernel: &DistributionSpec,
) -> Result<ResidualReport> {
    kernel.validate()?;
    let mut report = ResidualReport {
        sup_residual: 0.0,
        argmax_s: f64::NAN,
        points_used: 0,
    };
    for (i, &s) in candidate.points.iter().enumerate() {
        let Some(half) = candidate.index_of(s / 2.0) else {
            continue;
        };
        let lhs = candidate.values[i];
        let rhs = candidate.values[half] * candidate.values[half] * kernel.analytic_cf(s)?;
        let r = (lhs - rhs).norm();
        report.points_used += 1;
        if r > report.sup_residual || report.points_used == 1 {
            report.sup_residual = r;
            report.argmax_s = s;
        }
    }
    if report.points_used < 3 {
        return Err(QsoError::InvalidGrid(format!(
            "only {} points admit s/2 on the grid; need at least 3",
            report.points_used
        )));
    }
    Ok(report)
}

/// Sup over usable grid points of `|phi(2s) - (phi(s))^2|`, the dyadic
/// stability equation of the averaging-component limit.
pub fn dyadic_stability_residual(candidate: &CFGrid) -> Result<ResidualReport> {
    let mut report = ResidualReport {
        sup_residual: 0.0,
        argmax_s: f64::NAN,
        points_used: 0,
    };
    for (i, &s) in candidate.points.iter().enumerate() {
        let Some(double) = candidate.index_of(2.0 * s) else {
            continue;
        };
        if double == i && s != 0.0 {
            continue;
        }
        let r = (candidate.values[double] - candidate.values[i] * candidate.values[i]).norm();
        report.points_used += 1;
        if r > report.sup_residual || report.points_used == 1 {
            report.sup_residual = r;
            report.argmax_s = s;
        }
    }
    if report.points_used < 3 {
        return Err(QsoError::InvalidGrid(format!(
            "only {} points admit 2s on the grid; need at least 3",
            report.points_used
        )));
    }
    Ok(report)
}

/// Outcome of checking `|ln phi_G(s)| <= A |s|^p` on a grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailBoundReport {
    pub holds: bool,
    pub worst_ratio: f64,
    pub worst_s: f64,
    /// Same ratio for the `|phi_G(s) - 1|` variant of the bound.
    pub cf_gap_worst_ratio: f64,
    /// `|a|(1-|a|) <= |ln(1+a)| <= |a|(1+|a|)` for every evaluated
    /// `a = phi_G(s) - 1` with `|a| < 0.5`; checked as exact inequalities.
    pub sandwich_holds: bool,
}

pub fn verify_tail_bound(
    kernel: &DistributionSpec,
    params: &TailBoundParams,
    points: &[f64],
) -> Result<TailBoundReport> {
    kernel.validate()?;
    let mut report = TailBoundReport {
        holds: true,
        worst_ratio: 0.0,
        worst_s: f64::NAN,
        cf_gap_worst_ratio: 0.0,
        sandwich_holds: true,
    };
    for &s in points {
        if s == 0.0 {
            continue;
        }
        if s.abs() > params.s_max * (1.0 + 1e-12) {
            return Err(QsoError::InvalidGrid(format!(
                "grid point {s} outside |s| <= {}",
                params.s_max
            )));
        }
        let phi = kernel.analytic_cf(s)?;
        let bound = params.amplitude * s.abs().powf(params.power);
        let log_norm = phi.ln().norm();
        let ratio = log_norm / bound;
        if ratio > report.worst_ratio {
            report.worst_ratio = ratio;
            report.worst_s = s;
        }
        let gap = phi - Complex64::new(1.0, 0.0);
        report.cf_gap_worst_ratio = report.cf_gap_worst_ratio.max(gap.norm() / bound);
        let a = gap.norm();
        if a < 0.5 && !(a * (1.0 - a) <= log_norm && log_norm <= a * (1.0 + a)) {
            report.sandwich_holds = false;
        }
    }
    report.holds = report.worst_ratio <= 1.0 + 1e-12;
    Ok(report)
}

/// Sup-error of `(phi(s/n))^n` against the Cauchy limit `exp(-C pi |s|)` for
/// each requested `n`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StableLimitRow {
    pub n: u64,
    pub sup_error: f64,
}

pub fn stable_limit_check(
    dist: &DistributionSpec,
    tail_constant: f64,
    n_values: &[u64],
    points: &[f64],
) -> Result<Vec<StableLimitRow>> {
    dist.validate()?;
    if !(tail_constant > 0.0) {
        return Err(QsoError::Domain(format!(
            "tail constant must be positive, got {tail_constant}"
        )));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        if n == 0 {
            return Err(QsoError::Domain("n values must be positive".into()));
        }
        let mut sup = 0.0f64;
        for &s in points {
            let phi = dist.analytic_cf(s / n as f64)?;
            let powered = phi.powf(n as f64);
            let limit = (-tail_constant * std::f64::consts::PI * s.abs()).exp();
            sup = sup.max((powered - Complex64::new(limit, 0.0)).norm());
        }
        rows.push(StableLimitRow { n, sup_error: sup });
    }
    Ok(rows)
}

/// The Levy tail-to-CF constant `c(eps) = (1+eps) Gamma(1-eps) sin(eps pi/2) / eps`
/// for `eps` strictly inside (0, 1).
pub fn levy_constant(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(QsoError::Domain(format!(
            "levy constant requires eps in (0,1), got {epsilon}"
        )));
    }
    Ok((1.0 + epsilon) * gamma(1.0 - epsilon) * (epsilon * std::f64::consts::FRAC_PI_2).sin()
        / epsilon)
}

#[cfg(test)]
mod tests;
