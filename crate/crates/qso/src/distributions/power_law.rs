//! Discrete symmetric power law `P(X = k) = C |k|^-(2+eps)` on the nonzero
//! integers, `C = 1/(2 zeta(2+eps))`.

use rand::Rng;

use crate::numeric::zeta;

/// Magnitudes covered exactly by the alias table; beyond that a Pareto
/// proposal with exact rejection handles the (tiny) remaining tail mass.
const ALIAS_RANGE: u64 = 1_000_000;

/// `C = 1/(2 zeta(2+eps))`.
pub fn mass_constant(epsilon: f64) -> f64 {
    1.0 / (2.0 * zeta(2.0 + epsilon))
}

/// Partial sum `sum_{k=k0..} k^-s` with an Euler-Maclaurin tail correction.
fn tail_power_sum(s: f64, k0: u64) -> f64 {
    let cut = k0 + 20_000;
    let mut acc = 0.0;
    for k in (k0..cut).rev() {
        acc += (k as f64).powf(-s);
    }
    let m = cut as f64;
    acc + m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s) + s * m.powf(-s - 1.0) / 12.0
}

/// One-sided tail `P(X >= x) = C sum_{k >= ceil(x)} k^-(2+eps)` for `x > 0`.
pub fn upper_tail(epsilon: f64, x: f64) -> f64 {
    let k0 = x.ceil().max(1.0) as u64;
    mass_constant(epsilon) * tail_power_sum(2.0 + epsilon, k0)
}

/// Characteristic function `phi(s) = 2C sum_{k>=1} cos(k s) k^-(2+eps)`.
///
/// The cosine sequence is advanced by the two-term recurrence, refreshed
/// periodically, so the partial sum costs one multiply-add per term.
pub fn cf(epsilon: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    let c = mass_constant(epsilon);
    let p = 2.0 + epsilon;
    // truncation error <= 2C m^-(1+eps) / (1+eps); aim for 1e-9, cap the work
    let m_f = (2.0 * c / ((1.0 + epsilon) * 1e-9)).powf(1.0 / (1.0 + epsilon));
    let m = (m_f.ceil() as u64).clamp(1000, 2_000_000);
    let two_cos = 2.0 * s.cos();
    let mut prev = 1.0; // cos(0 s)
    let mut cur = s.cos(); // cos(1 s)
    let mut sum = cur; // k = 1, weight 1
    for k in 2..=m {
        if k % 4096 == 0 {
            // refresh the recurrence from exact values
            prev = (s * (k as f64 - 1.0)).cos();
            cur = (s * k as f64).cos();
        } else {
            let next = two_cos * cur - prev;
            prev = cur;
            cur = next;
        }
        sum += cur * (k as f64).powf(-p);
    }
    2.0 * c * sum
}

/// Alias-table sampler over `|k| <= ALIAS_RANGE` plus Pareto-tail rejection
/// beyond; the sign is flipped with a fair coin.
#[derive(Debug, Clone)]
pub struct PowerLawSampler {
    epsilon: f64,
    prob: Vec<f64>,
    alias: Vec<u32>,
    in_range_mass: f64, // P(|X| <= ALIAS_RANGE), per side normalized below
}

impl PowerLawSampler {
    pub fn build(epsilon: f64) -> Self {
        let p = 2.0 + epsilon;
        let n = ALIAS_RANGE as usize;
        let weights: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-p)).collect();
        let total: f64 = {
            let mut acc = 0.0;
            for w in weights.iter().rev() {
                acc += w;
            }
            acc
        };
        // Vose alias construction
        let mut prob = vec![0.0f64; n];
        let mut alias = vec![0u32; n];
        let scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut small: Vec<u32> = Vec::new();
        let mut large: Vec<u32> = Vec::new();
        for (i, w) in scaled.iter().enumerate() {
            if *w < 1.0 {
                small.push(i as u32);
            } else {
                large.push(i as u32);
            }
        }
        let mut scaled = scaled;
        while let (Some(s), Some(l)) = (small.pop(), large.pop()) {
            prob[s as usize] = scaled[s as usize];
            alias[s as usize] = l;
            scaled[l as usize] -= 1.0 - scaled[s as usize];
            if scaled[l as usize] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        for i in large {
            prob[i as usize] = 1.0;
        }
        for i in small {
            prob[i as usize] = 1.0;
        }
        let zeta_full = zeta(p);
        let in_range_mass = total / zeta_full;
        Self {
            epsilon,
            prob,
            alias,
            in_range_mass,
        }
    }

    fn draw_tail_magnitude(&self, rng: &mut impl Rng) -> u64 {
        let p1 = 1.0 + self.epsilon;
        let edge = ALIAS_RANGE as f64 + 0.5;
        loop {
            // continuous Pareto proposal on [edge, inf), rounded to an integer;
            // the implied proposal mass of k dominates the target mass exactly
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let y = edge * u.powf(-1.0 / p1);
            let k = (y + 0.5).floor() as u64;
            let target = (k as f64).powf(-(2.0 + self.epsilon));
            let proposal = ((k as f64 - 0.5).powf(-p1) - (k as f64 + 0.5).powf(-p1)) / p1;
            let v: f64 = rng.gen();
            if v * proposal <= target {
                return k;
            }
        }
    }

    pub fn draw(&self, rng: &mut impl Rng) -> f64 {
        let u: f64 = rng.gen();
        let magnitude = if u < self.in_range_mass {
            let i = rng.gen_range(0..self.prob.len());
            let v: f64 = rng.gen();
            if v < self.prob[i] {
                (i + 1) as u64
            } else {
                (self.alias[i] + 1) as u64
            }
        } else {
            self.draw_tail_magnitude(rng)
        };
        if rng.gen::<bool>() {
            magnitude as f64
        } else {
            -(magnitude as f64)
        }
    }
}
