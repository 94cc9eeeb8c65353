//! Statistical verification layer: empirical CFs, moment summaries,
//! two-sample distances and histogram export.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cf_engine::CFGrid;
use crate::error::{QsoError, Result};
use crate::numeric::pairwise_sum;

/// Empirical characteristic function `(1/K) sum_k exp(i s x_k)` on a grid.
pub fn empirical_cf(values: &[f64], points: &[f64]) -> Result<CFGrid> {
    if values.is_empty() {
        return Err(QsoError::InvalidInput("empirical CF of an empty sample".into()));
    }
    let n = values.len() as f64;
    let cf_values: Vec<Complex64> = points
        .iter()
        .map(|&s| {
            let re: Vec<f64> = values.iter().map(|x| (s * x).cos()).collect();
            let im: Vec<f64> = values.iter().map(|x| (s * x).sin()).collect();
            Complex64::new(pairwise_sum(&re) / n, pairwise_sum(&im) / n)
        })
        .collect();
    Ok(CFGrid::new(points.to_vec(), cf_values))
}

/// Sup-distance between an empirical CF of a sample and a reference grid.
pub fn cf_sup_distance(sample: &[f64], reference: &CFGrid) -> Result<f64> {
    let ecf = empirical_cf(sample, &reference.points)?;
    Ok(ecf
        .values
        .iter()
        .zip(&reference.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Unbiased sample mean/variance, deterministic via tree summation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    pub variance: f64,
    pub count: usize,
    /// Set when the sample has a single value and the variance is reported
    /// as 0 by convention.
    pub degenerate: bool,
}

pub fn summarize(values: &[f64]) -> Result<SampleSummary> {
    if values.is_empty() {
        return Err(QsoError::InvalidInput("summary of an empty sample".into()));
    }
    let n = values.len();
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return Ok(SampleSummary {
            mean,
            variance: 0.0,
            count: 1,
            degenerate: true,
        });
    }
    let devs: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    Ok(SampleSummary {
        mean,
        variance: pairwise_sum(&devs) / (n as f64 - 1.0),
        count: n,
        degenerate: false,
    })
}

/// Exact two-sample Kolmogorov-Smirnov statistic with the asymptotic 1%
/// critical value `1.628 sqrt((n_a + n_b)/(n_a n_b))`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_value_1pct: f64,
    pub sample_sizes: (usize, usize),
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(QsoError::InvalidInput("KS statistic of an empty sample".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut diff = 0.0f64;
    let mut stat = 0.0f64;
    while i < xs.len() || j < ys.len() {
        let advance_x = match (xs.get(i), ys.get(j)) {
            (Some(x), Some(y)) => x <= y,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        if advance_x {
            let x = xs[i];
            while i < xs.len() && xs[i] == x {
                diff += 1.0 / na;
                i += 1;
            }
            while j < ys.len() && ys[j] == x {
                diff -= 1.0 / nb;
                j += 1;
            }
        } else {
            let y = ys[j];
            while j < ys.len() && ys[j] == y {
                diff -= 1.0 / nb;
                j += 1;
            }
        }
        stat = stat.max(diff.abs());
    }
    Ok(KsResult {
        statistic: stat.min(1.0),
        critical_value_1pct: 1.628 * ((na + nb) / (na * nb)).sqrt(),
        sample_sizes: (xs.len(), ys.len()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Counts,
    Density,
}

/// Histogram request: even bins over `[lo, hi)`, half-open, with explicit
/// overflow accounting; `range: None` spans the data.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bin_count: usize,
    pub range: Option<(f64, f64)>,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    pub underflow: usize,
    pub overflow: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

pub fn histogram(values: &[f64], spec: &HistogramSpec) -> Result<Histogram> {
    if values.is_empty() {
        return Err(QsoError::InvalidInput("histogram of an empty sample".into()));
    }
    if spec.bin_count == 0 {
        return Err(QsoError::InvalidInput("histogram needs at least one bin".into()));
    }
    let (lo, hi) = match spec.range {
        Some((lo, hi)) => {
            if !(lo < hi) {
                return Err(QsoError::InvalidInput(format!(
                    "histogram range must satisfy lo < hi, got [{lo}, {hi})"
                )));
            }
            (lo, hi)
        }
        None => {
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            // nudge the upper edge so the maximum lands inside the last bin
            let span = (max - min).max(1e-300);
            (min, max + span * 1e-9)
        }
    };
    let width = (hi - lo) / spec.bin_count as f64;
    let mut counts = vec![0usize; spec.bin_count];
    let mut underflow = 0usize;
    let mut overflow = 0usize;
    for &v in values {
        if v < lo {
            underflow += 1;
        } else if v >= hi {
            overflow += 1;
        } else {
            let idx = (((v - lo) / width) as usize).min(spec.bin_count - 1);
            counts[idx] += 1;
        }
    }
    let n = values.len() as f64;
    let bins = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| HistogramBin {
            lo: lo + i as f64 * width,
            hi: lo + (i + 1) as f64 * width,
            value: match spec.normalization {
                Normalization::Counts => c as f64,
                Normalization::Density => c as f64 / (n * width),
            },
        })
        .collect();
    Ok(Histogram {
        bins,
        underflow,
        overflow,
        total: values.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;
    use crate::rng::RandomStream;

    #[test]
    fn empirical_cf_trivial_cases() {
        let g = empirical_cf(&[0.0], &[0.0, 1.3, -2.0]).unwrap();
        for v in g.values {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        // cosine identity at s = pi over {-1, 1}
        let g = empirical_cf(&[-1.0, 1.0], &[std::f64::consts::PI]).unwrap();
        assert!((g.values[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        assert!(empirical_cf(&[], &[0.0]).is_err());
    }

    #[test]
    fn empirical_cf_monte_carlo_bound() {
        let spec = DistributionSpec::Normal {
            mean: 0.0,
            variance: 1.0,
        };
        let n = 100_000;
        let draws = spec.sample(n, &RandomStream::root(3)).unwrap();
        let points: Vec<f64> = (-100..=100).map(|k| k as f64 * 0.05).collect();
        let reference = CFGrid::from_spec(&spec, &points).unwrap();
        let d = cf_sup_distance(&draws, &reference).unwrap();
        assert!(d < 0.016, "sup distance {d}");
    }

    #[test]
    fn empirical_cf_at_zero_is_exactly_one() {
        let draws = vec![1.0, -4.0, 7.5, 0.25];
        let g = empirical_cf(&draws, &[0.0]).unwrap();
        assert_eq!(g.values[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn summary_basic_and_degenerate() {
        let s = summarize(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.variance), (1.0, 0.0));
        assert!(!s.degenerate);

        let s = summarize(&[2.5]).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.variance, 0.0);

        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn summary_translation_behavior() {
        let base = vec![0.3, -1.2, 4.5, 2.2, -0.7];
        let shifted: Vec<f64> = base.iter().map(|x| x + 10.0).collect();
        let a = summarize(&base).unwrap();
        let b = summarize(&shifted).unwrap();
        assert!((b.mean - (a.mean + 10.0)).abs() < 1e-12);
        assert!((b.variance - a.variance).abs() < 1e-12);
    }

    #[test]
    fn ks_trivial_cases() {
        let a = vec![0.4, 1.0, -2.0, 0.1];
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);

        let zeros = vec![0.0; 1000];
        let ones = vec![1.0; 1000];
        let r = ks_two_sample(&zeros, &ones).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!((r.critical_value_1pct - 1.628 * (2.0f64 / 1000.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ks_symmetry() {
        let a = vec![0.1, 0.5, 0.9, 1.5, -0.3];
        let b = vec![0.2, 0.6, 1.1];
        let ab = ks_two_sample(&a, &b).unwrap();
        let ba = ks_two_sample(&b, &a).unwrap();
        assert_eq!(ab.statistic, ba.statistic);
    }

    #[test]
    fn histogram_trivial_and_exact_placement() {
        let spec = HistogramSpec {
            bin_count: 1,
            range: Some((0.0, 1.0)),
            normalization: Normalization::Counts,
        };
        let h = histogram(&[0.5], &spec).unwrap();
        assert_eq!(h.bins[0].value, 1.0);

        // 10^4 bin-midpoint-offset grid points over [0, 1), 10 bins: exactly
        // 10^3 each; the half offset keeps points away from bin edges
        let values: Vec<f64> = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0).collect();
        let spec = HistogramSpec {
            bin_count: 10,
            range: Some((0.0, 1.0)),
            normalization: Normalization::Counts,
        };
        let h = histogram(&values, &spec).unwrap();
        for b in &h.bins {
            assert_eq!(b.value, 1000.0);
        }
        assert_eq!(h.underflow + h.overflow, 0);
    }

    #[test]
    fn histogram_conservation_with_overflow() {
        let values = vec![-5.0, 0.1, 0.2, 0.9, 3.0, 7.0];
        let spec = HistogramSpec {
            bin_count: 4,
            range: Some((0.0, 1.0)),
            normalization: Normalization::Counts,
        };
        let h = histogram(&values, &spec).unwrap();
        let in_bins: f64 = h.bins.iter().map(|b| b.value).sum();
        assert_eq!(in_bins as usize + h.underflow + h.overflow, values.len());
        assert_eq!(h.underflow, 1);
        assert_eq!(h.overflow, 2);
    }

    #[test]
    fn histogram_density_integrates_to_coverage() {
        let spec = DistributionSpec::Normal {
            mean: 0.0,
            variance: 1.0,
        };
        let draws = spec.sample(20_000, &RandomStream::root(5)).unwrap();
        let hspec = HistogramSpec {
            bin_count: 50,
            range: Some((-4.0, 4.0)),
            normalization: Normalization::Density,
        };
        let h = histogram(&draws, &hspec).unwrap();
        let width = 8.0 / 50.0;
        let mass: f64 = h.bins.iter().map(|b| b.value * width).sum();
        let covered = 1.0 - (h.underflow + h.overflow) as f64 / h.total as f64;
        assert!((mass - covered).abs() < 1e-9);
        assert!(mass <= 1.0 + 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn histogram_always_conserves_mass(
            values in proptest::collection::vec(-50.0f64..50.0, 1..200),
            bin_count in 1usize..20,
            lo in -10.0f64..0.0,
            width in 0.1f64..20.0,
        ) {
            let spec = HistogramSpec {
                bin_count,
                range: Some((lo, lo + width)),
                normalization: Normalization::Counts,
            };
            let h = histogram(&values, &spec).unwrap();
            let in_bins: f64 = h.bins.iter().map(|b| b.value).sum();
            proptest::prop_assert_eq!(
                in_bins as usize + h.underflow + h.overflow,
                values.len()
            );
        }

        #[test]
        fn ks_statistic_symmetric_and_bounded(
            a in proptest::collection::vec(-5.0f64..5.0, 1..60),
            b in proptest::collection::vec(-5.0f64..5.0, 1..60),
        ) {
            let ab = ks_two_sample(&a, &b).unwrap();
            let ba = ks_two_sample(&b, &a).unwrap();
            proptest::prop_assert_eq!(ab.statistic, ba.statistic);
            proptest::prop_assert!((0.0..=1.0).contains(&ab.statistic));
        }

        #[test]
        fn empirical_cf_modulus_bounded(
            values in proptest::collection::vec(-100.0f64..100.0, 1..50),
            s in -20.0f64..20.0,
        ) {
            let g = empirical_cf(&values, &[0.0, s]).unwrap();
            proptest::prop_assert_eq!(g.values[0], Complex64::new(1.0, 0.0));
            proptest::prop_assert!(g.values[1].norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn histogram_error_paths() {
        let spec = HistogramSpec {
            bin_count: 0,
            range: None,
            normalization: Normalization::Counts,
        };
        assert!(histogram(&[1.0], &spec).is_err());
        let spec = HistogramSpec {
            bin_count: 2,
            range: Some((1.0, 1.0)),
            normalization: Normalization::Counts,
        };
        assert!(histogram(&[1.0], &spec).is_err());
    }
}
