//! Replication of the three published simulation experiments: population
//! propagation histograms and the two truncated-approximation runs, with
//! sample means checked against the published caption values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{histogram, summarize, HistogramSpec, Normalization};
use crate::distributions::DistributionSpec;
use crate::error::Result;
use crate::io;
use crate::rng::RandomStream;
use crate::samplers::{
    draw_approx, draw_approx_collapsed, evolve_population, LogBase, PopulationOptions,
    TruncationBudget,
};

const ITERATIONS: [u32; 3] = [1, 100, 500];
const BIN_COUNT: usize = 60;

/// Published sample means, top row (exponential seed) then bottom row
/// (standard normal seed), one triple per iteration count 1/100/500.
const FIG1_MEANS: [[f64; 3]; 2] = [[1.001, 1.032, 1.156], [0.004, -0.009, 0.057]];
const FIG2_MEANS: [[f64; 3]; 2] = [[0.989, 1.018, 0.999], [-0.004, -0.013, 0.014]];
const FIG3_MEANS: [[f64; 3]; 2] = [[0.980, 0.979, 1.003], [0.010, 0.017, 0.007]];

#[derive(Debug, Clone)]
pub struct FigureOptions {
    pub population: usize,
    /// Use the explicit level-by-level sampler for the Bonferroni run
    /// instead of the collapsed one (same law, vastly slower).
    pub no_collapse: bool,
    /// Which of the three experiments to run; empty means all.
    pub figures: Vec<u8>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            population: 10_000,
            no_collapse: false,
            figures: vec![],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PanelReport {
    pub figure: u8,
    pub seed_row: String,
    pub iterations: u32,
    pub sample_mean: f64,
    pub sample_variance: f64,
    /// Mean reported in the published caption for this panel.
    pub published_mean: f64,
    /// Value the sample mean is checked against: the preserved mean for the
    /// population run (whose published means themselves drift), the caption
    /// mean for the approximate runs.
    pub reference_mean: f64,
    pub tolerance: f64,
    pub mean_within_tolerance: bool,
    /// The approximate sampler only sees the seed's mean, so its output law
    /// at small n cannot match the exponential-seed iterate; the mean still
    /// agrees but the histogram shape is knowingly wrong.
    pub shape_expected_mismatch: bool,
    pub histogram_csv: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureSummary {
    pub panels: Vec<PanelReport>,
    pub all_means_ok: bool,
}

struct SeedRow {
    label: &'static str,
    dist: DistributionSpec,
}

fn seed_rows() -> [SeedRow; 2] {
    [
        SeedRow {
            label: "exponential",
            dist: DistributionSpec::Exponential { rate: 1.0 },
        },
        SeedRow {
            label: "normal",
            dist: DistributionSpec::Normal {
                mean: 0.0,
                variance: 1.0,
            },
        },
    ]
}

fn kernel() -> DistributionSpec {
    DistributionSpec::Normal {
        mean: 0.0,
        variance: 0.5,
    }
}

fn write_panel(
    out_dir: &Path,
    figure: u8,
    row: &SeedRow,
    n: u32,
    values: &[f64],
    published_mean: f64,
    reference_mean: f64,
    tolerance: f64,
    shape_expected_mismatch: bool,
) -> Result<PanelReport> {
    let spec = HistogramSpec {
        bin_count: BIN_COUNT,
        range: None,
        normalization: Normalization::Density,
    };
    let hist = histogram(values, &spec)?;
    let name = format!("fig{figure}_{}_n{n}.csv", row.label);
    io::write_text(&out_dir.join(&name), &io::histogram_csv(&hist))?;
    let summary = summarize(values)?;
    Ok(PanelReport {
        figure,
        seed_row: row.label.to_string(),
        iterations: n,
        sample_mean: summary.mean,
        sample_variance: summary.variance,
        published_mean,
        reference_mean,
        tolerance,
        mean_within_tolerance: (summary.mean - reference_mean).abs() < tolerance,
        shape_expected_mismatch,
        histogram_csv: name,
    })
}

fn approx_budget(seed: &DistributionSpec, n: u32, bonferroni_k: Option<u64>) -> TruncationBudget {
    TruncationBudget {
        alpha: 0.05,
        delta: 0.01,
        iterations: Some(n),
        seed_variance: seed.moments().variance.finite().unwrap_or(f64::INFINITY),
        kernel_variance: 0.5,
        log_base: LogBase::Natural,
        bonferroni_k,
    }
}

/// Run the requested experiments and write 6 histogram CSVs per figure plus
/// a summary JSON comparing every panel mean against its published value.
pub fn replicate_figures(
    out_dir: &Path,
    stream: &RandomStream,
    options: &FigureOptions,
) -> Result<FigureSummary> {
    let wanted = |f: u8| options.figures.is_empty() || options.figures.contains(&f);
    let k = options.population;
    let mut panels = Vec::new();

    if wanted(1) {
        // Population propagation: one 500-generation run per seed row; the
        // published means drift with generation (finite-population effect),
        // so the check is drift relative to the preserved mean.
        for (r, row) in seed_rows().iter().enumerate() {
            let states = evolve_population(
                &row.dist,
                &kernel(),
                k,
                *ITERATIONS.last().unwrap(),
                &stream.substream(0x0100 + r as u64),
                &PopulationOptions::default(),
            )?;
            let preserved = row.dist.moments().mean;
            for (c, &n) in ITERATIONS.iter().enumerate() {
                let values = &states[n as usize].values;
                panels.push(write_panel(
                    out_dir,
                    1,
                    row,
                    n,
                    values,
                    FIG1_MEANS[r][c],
                    preserved,
                    0.25,
                    false,
                )?);
            }
        }
    }

    for (figure, bonferroni, means) in [
        (2u8, None, &FIG2_MEANS),
        (3u8, Some(k as u64), &FIG3_MEANS),
    ] {
        if !wanted(figure) {
            continue;
        }
        for (r, row) in seed_rows().iter().enumerate() {
            let seed_mean = row.dist.moments().mean;
            for (c, &n) in ITERATIONS.iter().enumerate() {
                let budget = approx_budget(&row.dist, n, bonferroni);
                let panel_stream = stream.substream((figure as u64) << 16 | (r as u64) << 8 | c as u64);
                let values = if figure == 3 && !options.no_collapse {
                    draw_approx_collapsed(seed_mean, &kernel(), &budget, k, &panel_stream)?
                } else {
                    draw_approx(seed_mean, &kernel(), &budget, k, &panel_stream)?
                };
                let expected_mismatch = row.label == "exponential" && n == 1;
                panels.push(write_panel(
                    out_dir,
                    figure,
                    row,
                    n,
                    &values,
                    means[r][c],
                    means[r][c],
                    0.1,
                    expected_mismatch,
                )?);
            }
        }
    }

    let all_means_ok = panels.iter().all(|p| p.mean_within_tolerance);
    let summary = FigureSummary {
        panels,
        all_means_ok,
    };
    io::write_text(
        &out_dir.join("figures_summary.json"),
        &io::to_json_pretty(&summary)?,
    )?;
    Ok(summary)
}
