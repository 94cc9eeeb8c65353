//! Compiled samplers. `Sampler::compile` does any table building once so
//! repeated draws are cheap; the sampler itself is immutable and shareable.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};

use super::cauchy_like::CauchyLikeTable;
use super::power_law::PowerLawSampler;
use super::stable;
use super::DistributionSpec;
use crate::error::{QsoError, Result};

#[derive(Debug, Clone)]
pub enum Sampler {
    Const(f64),
    Normal(Normal<f64>),
    Exponential(Exp<f64>),
    CauchyLike(CauchyLikeTable),
    PowerLaw(PowerLawSampler),
    Stable { exponent: f64 },
    Empirical(Vec<f64>),
}

impl Sampler {
    pub fn compile(spec: &DistributionSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec {
            DistributionSpec::PointMass { value } => Sampler::Const(*value),
            DistributionSpec::Normal { mean, variance } => {
                if *variance == 0.0 {
                    Sampler::Const(*mean)
                } else {
                    Sampler::Normal(
                        Normal::new(*mean, variance.sqrt())
                            .map_err(|e| QsoError::InvalidSpec(e.to_string()))?,
                    )
                }
            }
            DistributionSpec::Exponential { rate } => Sampler::Exponential(
                Exp::new(*rate).map_err(|e| QsoError::InvalidSpec(e.to_string()))?,
            ),
            DistributionSpec::CauchyLike { mu, a, alpha } => {
                Sampler::CauchyLike(CauchyLikeTable::build(*mu, *a, *alpha)?)
            }
            DistributionSpec::DiscretePowerLaw { epsilon } => {
                Sampler::PowerLaw(PowerLawSampler::build(*epsilon))
            }
            DistributionSpec::SymmetricStable { exponent } => Sampler::Stable {
                exponent: *exponent,
            },
            DistributionSpec::Empirical { values } => Sampler::Empirical(values.clone()),
        })
    }

    #[inline]
    pub fn draw(&self, rng: &mut impl Rng) -> f64 {
        match self {
            Sampler::Const(v) => *v,
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Exponential(d) => d.sample(rng),
            Sampler::CauchyLike(table) => table.inverse(rng.gen()),
            Sampler::PowerLaw(s) => s.draw(rng),
            Sampler::Stable { exponent } => stable::draw(*exponent, rng),
            Sampler::Empirical(values) => values[rng.gen_range(0..values.len())],
        }
    }
}
