//! Seeded synthetic "cross-planes" datasets: each class scatters around its
//! own generating hyperplane.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::classical::Dataset;
use crate::error::{Error, Result};
use crate::numerics::RealMatrix;
use crate::rng;

/// Hyperplane `normal . x + offset = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingPlane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl GeneratingPlane {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Signed residual `normal . x + offset`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.offset
    }

    /// Orthogonal projection of `x` onto the plane.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let nn: f64 = self.normal.iter().map(|v| v * v).sum();
        let t = self.residual(x) / nn;
        x.iter().zip(&self.normal).map(|(xi, ni)| xi - t * ni).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub plane1: GeneratingPlane,
    pub plane2: GeneratingPlane,
    pub noise_sigma: f64,
    /// Half-width of the box whose uniform points are projected onto the planes.
    pub spread: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Two classes of `m` points in the plane around `y = x + 1` and
    /// `y = -x - 1`, which cross at the edge of the sampling box.
    pub fn crossplanes(m: usize, noise_sigma: f64, seed: u64) -> Self {
        Self {
            n: 2,
            m1: m,
            m2: m,
            plane1: GeneratingPlane::new(vec![1.0, -1.0], 1.0),
            plane2: GeneratingPlane::new(vec![1.0, 1.0], 1.0),
            noise_sigma,
            spread: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        if self.m1 == 0 || self.m2 == 0 {
            return Err(Error::InvalidSpec("class sizes must be at least 1".into()));
        }
        for (i, plane) in [&self.plane1, &self.plane2].into_iter().enumerate() {
            if plane.normal.len() != self.n {
                return Err(Error::InvalidSpec(format!(
                    "plane {} has {} normal components, expected {}",
                    i + 1,
                    plane.normal.len(),
                    self.n
                )));
            }
            let nn: f64 = plane.normal.iter().map(|v| v * v).sum();
            if !(nn > 0.0) || !nn.is_finite() || !plane.offset.is_finite() {
                return Err(Error::InvalidSpec(format!("plane {} needs a finite nonzero normal", i + 1)));
            }
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidSpec(format!("noise sigma must be nonnegative, got {}", self.noise_sigma)));
        }
        if !(self.spread > 0.0) || !self.spread.is_finite() {
            return Err(Error::InvalidSpec(format!("spread must be positive, got {}", self.spread)));
        }
        Ok(())
    }
}

fn sample_class(spec: &SynthSpec, plane: &GeneratingPlane, count: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let noise = Normal::new(0.0, spec.noise_sigma).expect("validated sigma");
    (0..count)
        .map(|_| {
            let raw: Vec<f64> = (0..spec.n).map(|_| rng.random_range(-spec.spread..=spec.spread)).collect();
            let on_plane = plane.project(&raw);
            if spec.noise_sigma == 0.0 {
                on_plane
            } else {
                on_plane.into_iter().map(|v| v + noise.sample(rng)).collect()
            }
        })
        .collect()
}

/// Deterministic in `spec.seed`; each class draws from its own stream.
pub fn generate_crossplanes(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let positive = sample_class(spec, &spec.plane1, spec.m1, &mut rng::stream(spec.seed, 11));
    let negative = sample_class(spec, &spec.plane2, spec.m2, &mut rng::stream(spec.seed, 12));
    Dataset::new(RealMatrix::from_rows(&positive)?, RealMatrix::from_rows(&negative)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::train_classical;

    fn lines_spec(sigma: f64, seed: u64) -> SynthSpec {
        SynthSpec {
            n: 2,
            m1: 10,
            m2: 7,
            plane1: GeneratingPlane::new(vec![0.0, 1.0], 0.0),
            plane2: GeneratingPlane::new(vec![0.0, 1.0], -1.0),
            noise_sigma: sigma,
            spread: 2.0,
            seed,
        }
    }

    #[test]
    fn noiseless_points_lie_on_generators() {
        let data = generate_crossplanes(&lines_spec(0.0, 4)).unwrap();
        assert_eq!((data.m1(), data.m2(), data.n()), (10, 7, 2));
        assert!(data.positive().rows().iter().all(|r| r[1] == 0.0));
        assert!(data.negative().rows().iter().all(|r| (r[1] - 1.0).abs() < 1e-12));

        let spec = SynthSpec::crossplanes(20, 0.0, 9);
        let data = generate_crossplanes(&spec).unwrap();
        assert!(data.positive().rows().iter().all(|r| spec.plane1.residual(r).abs() < 1e-12));
        assert!(data.negative().rows().iter().all(|r| spec.plane2.residual(r).abs() < 1e-12));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_crossplanes(&lines_spec(0.1, 5)).unwrap();
        let b = generate_crossplanes(&lines_spec(0.1, 5)).unwrap();
        let c = generate_crossplanes(&lines_spec(0.1, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = lines_spec(0.0, 0);
        spec.plane1.normal = vec![0.0, 0.0];
        assert!(matches!(generate_crossplanes(&spec), Err(Error::InvalidSpec(_))));
        let mut spec = lines_spec(0.0, 0);
        spec.m2 = 0;
        assert!(generate_crossplanes(&spec).is_err());
        let mut spec = lines_spec(-1.0, 0);
        spec.noise_sigma = -1.0;
        assert!(generate_crossplanes(&spec).is_err());
        let mut spec = lines_spec(0.0, 0);
        spec.plane2.normal = vec![1.0];
        assert!(generate_crossplanes(&spec).is_err());
    }

    fn angle_degrees(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        (dot.abs() / (na * nb)).min(1.0).acos().to_degrees()
    }

    #[test]
    fn classical_training_recovers_generators() {
        for seed in 0..10 {
            let spec = SynthSpec::crossplanes(32, 0.05, seed);
            let model = train_classical(&generate_crossplanes(&spec).unwrap(), 0.01, 0.01, 0.0).unwrap();
            let a1 = angle_degrees(&model.plane1.w, &spec.plane1.normal);
            let a2 = angle_degrees(&model.plane2.w, &spec.plane2.normal);
            assert!(a1 < 5.0 && a2 < 5.0, "seed {seed}: {a1} {a2}");
        }
    }
}
