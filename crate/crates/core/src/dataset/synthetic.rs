//! Synthetic two-class generator: random polynomial images of a parameter
//! cube, with the polynomial degree acting as the intrinsic-dimension knob.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Label, LabeledDataset, Point};

fn default_param_dim() -> usize {
    3
}

/// Recipe for one class manifold: a full multivariate polynomial map of
/// total degree `intrinsic_degree` from `[-1,1]^param_dim` into
/// `R^ambient_dim`, plus isotropic Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub ambient_dim: usize,
    pub intrinsic_degree: usize,
    #[serde(default = "default_param_dim")]
    pub param_dim: usize,
    pub coeff_seed: u64,
    pub noise_sigma: f64,
}

impl ManifoldSpec {
    pub fn validate(&self) -> Result<()> {
        if self.param_dim < 1 {
            return Err(Error::InvalidParam("param_dim must be >= 1".into()));
        }
        if self.ambient_dim < self.param_dim {
            return Err(Error::InvalidParam(
                "ambient_dim must be >= param_dim".into(),
            ));
        }
        if self.intrinsic_degree < 1 {
            return Err(Error::InvalidParam("intrinsic_degree must be >= 1".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidParam(
                "noise_sigma must be finite and >= 0".into(),
            ));
        }
        if monomial_count(self.param_dim, self.intrinsic_degree) > 2_000_000 {
            return Err(Error::InvalidParam(
                "polynomial has more than 2e6 monomials; lower param_dim or degree".into(),
            ));
        }
        Ok(())
    }
}

fn monomial_count(param_dim: usize, degree: usize) -> usize {
    // C(degree + param_dim, param_dim), saturating.
    let mut c: usize = 1;
    for i in 1..=param_dim {
        c = c.saturating_mul(degree + i) / i;
    }
    c
}

/// All exponent vectors of total degree <= `degree`, in a fixed
/// lexicographic order.
fn monomial_exponents(param_dim: usize, degree: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(monomial_count(param_dim, degree));
    let mut current = vec![0u32; param_dim];
    fn rec(pos: usize, budget: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for e in 0..=budget {
            current[pos] = e;
            rec(pos + 1, budget - e, current, out);
        }
        current[pos] = 0;
    }
    rec(0, degree as u32, &mut current, &mut out);
    out
}

struct PolynomialMap {
    exponents: Vec<Vec<u32>>,
    /// Flat `[n_monomials][ambient_dim]` coefficient table.
    coeffs: Vec<f64>,
    ambient_dim: usize,
    param_dim: usize,
    degree: usize,
}

impl PolynomialMap {
    fn from_spec(spec: &ManifoldSpec) -> Self {
        let exponents = monomial_exponents(spec.param_dim, spec.intrinsic_degree);
        let mut rng = ChaCha8Rng::seed_from_u64(spec.coeff_seed);
        let scale = 1.0 / spec.intrinsic_degree as f64;
        let coeffs = (0..exponents.len() * spec.ambient_dim)
            .map(|_| rng.random_range(-1.0..=1.0) * scale)
            .collect();
        PolynomialMap {
            exponents,
            coeffs,
            ambient_dim: spec.ambient_dim,
            param_dim: spec.param_dim,
            degree: spec.intrinsic_degree,
        }
    }

    fn eval(&self, params: &[f64], out: &mut [f64]) {
        debug_assert_eq!(params.len(), self.param_dim);
        debug_assert_eq!(out.len(), self.ambient_dim);
        out.fill(0.0);
        // Power table: powers[i][e] = params[i]^e.
        let mut powers = vec![1.0f64; self.param_dim * (self.degree + 1)];
        for i in 0..self.param_dim {
            for e in 1..=self.degree {
                powers[i * (self.degree + 1) + e] =
                    powers[i * (self.degree + 1) + e - 1] * params[i];
            }
        }
        for (m, exps) in self.exponents.iter().enumerate() {
            let mut val = 1.0;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    val *= powers[i * (self.degree + 1) + e as usize];
                }
            }
            let row = &self.coeffs[m * self.ambient_dim..(m + 1) * self.ambient_dim];
            for (o, &c) in out.iter_mut().zip(row) {
                *o += c * val;
            }
        }
    }
}

/// Draws `n_per_class` points per class through each class's polynomial map,
/// then translates the positive class so the two class centroids sit
/// `2 * max(empirical class radius)` apart along a random direction. The
/// clean output is linearly separable with positive margin for data in
/// general position. Everything is a pure function of the seeds.
pub fn generate_synthetic(
    spec_pos: &ManifoldSpec,
    spec_neg: &ManifoldSpec,
    n_per_class: usize,
    seed: u64,
) -> Result<LabeledDataset> {
    spec_pos.validate()?;
    spec_neg.validate()?;
    if n_per_class < 1 {
        return Err(Error::InvalidParam("n_per_class must be >= 1".into()));
    }
    if spec_pos.ambient_dim != spec_neg.ambient_dim {
        return Err(Error::InvalidParam(
            "class specs must share ambient_dim".into(),
        ));
    }
    let dim = spec_pos.ambient_dim;
    let map_pos = PolynomialMap::from_spec(spec_pos);
    let map_neg = PolynomialMap::from_spec(spec_neg);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample_class = |map: &PolynomialMap, sigma: f64, rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        let noise = Normal::new(0.0, sigma).expect("validated sigma");
        let mut pts = Vec::with_capacity(n_per_class);
        let mut params = vec![0.0; map.param_dim];
        for _ in 0..n_per_class {
            for p in params.iter_mut() {
                *p = rng.random_range(-1.0..=1.0);
            }
            let mut out = vec![0.0; dim];
            map.eval(&params, &mut out);
            for o in out.iter_mut() {
                *o += noise.sample(rng);
            }
            pts.push(out);
        }
        pts
    };

    let mut pos = sample_class(&map_pos, spec_pos.noise_sigma, &mut rng);
    let neg = sample_class(&map_neg, spec_neg.noise_sigma, &mut rng);

    // Random separation direction.
    let mut u = vec![0.0f64; dim];
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    loop {
        for v in u.iter_mut() {
            *v = std_normal.sample(&mut rng);
        }
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for v in u.iter_mut() {
                *v /= norm;
            }
            break;
        }
    }

    let centroid = |pts: &[Vec<f64>]| -> Vec<f64> {
        let mut c = vec![0.0; dim];
        for p in pts {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        for ci in c.iter_mut() {
            *ci /= pts.len() as f64;
        }
        c
    };
    let radius = |pts: &[Vec<f64>], c: &[f64]| -> f64 {
        pts.iter()
            .map(|p| super::squared_distance(p, c))
            .fold(0.0f64, f64::max)
            .sqrt()
    };

    let mu_pos = centroid(&pos);
    let mu_neg = centroid(&neg);
    let r = radius(&pos, &mu_pos).max(radius(&neg, &mu_neg));

    // Shift the positive class so mu_pos - mu_neg = 2r * u exactly.
    let shift: Vec<f64> = (0..dim)
        .map(|j| 2.0 * r * u[j] + mu_neg[j] - mu_pos[j])
        .collect();
    for p in pos.iter_mut() {
        for (pi, si) in p.iter_mut().zip(&shift) {
            *pi += si;
        }
    }

    let n = 2 * n_per_class;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for p in pos {
        points.push(Point::new(p)?);
        labels.push(Label::Plus);
    }
    for p in neg {
        points.push(Point::new(p)?);
        labels.push(Label::Minus);
    }
    LabeledDataset::new(
        points,
        labels,
        Some(vec![false; n]),
        format!("synthetic-d{}-deg{}", dim, spec_pos.intrinsic_degree),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64) -> ManifoldSpec {
        ManifoldSpec {
            ambient_dim: 4,
            intrinsic_degree: 2,
            param_dim: 2,
            coeff_seed: seed,
            noise_sigma: 0.05,
        }
    }

    #[test]
    fn monomial_count_matches_enumeration() {
        for (k, d) in [(1usize, 3usize), (2, 4), (3, 5), (3, 1)] {
            assert_eq!(monomial_exponents(k, d).len(), monomial_count(k, d));
        }
    }

    #[test]
    fn deterministic_under_same_seeds() {
        let a = generate_synthetic(&spec(7), &spec(8), 50, 42).unwrap();
        let b = generate_synthetic(&spec(7), &spec(8), 50, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seed_changes_data() {
        let a = generate_synthetic(&spec(7), &spec(8), 50, 42).unwrap();
        let b = generate_synthetic(&spec(7), &spec(8), 50, 43).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn single_point_degree_one_no_noise() {
        let mut s = spec(3);
        s.intrinsic_degree = 1;
        s.noise_sigma = 0.0;
        let data = generate_synthetic(&s, &s, 1, 0).unwrap();
        assert_eq!(data.n(), 2);
        assert_eq!(data.dim(), 4);
        assert!(data.points()[0].coords().iter().all(|c| c.is_finite()));
    }

    #[test]
    fn centroid_separation_is_twice_radius() {
        let data = generate_synthetic(&spec(1), &spec(2), 200, 5).unwrap();
        let plus = data.class_indices(Label::Plus);
        let minus = data.class_indices(Label::Minus);
        let centroid = |idx: &[usize]| -> Vec<f64> {
            let mut c = vec![0.0; data.dim()];
            for &i in idx {
                for (cj, pj) in c.iter_mut().zip(data.point(i).coords()) {
                    *cj += pj;
                }
            }
            c.iter().map(|v| v / idx.len() as f64).collect()
        };
        let cp = centroid(&plus);
        let cn = centroid(&minus);
        let rad = |idx: &[usize], c: &[f64]| -> f64 {
            idx.iter()
                .map(|&i| super::super::squared_distance(data.point(i).coords(), c))
                .fold(0.0f64, f64::max)
                .sqrt()
        };
        let r = rad(&plus, &cp).max(rad(&minus, &cn));
        let sep = super::super::squared_distance(&cp, &cn).sqrt();
        assert!((sep - 2.0 * r).abs() < 1e-9, "sep {sep} vs 2r {}", 2.0 * r);
    }

    #[test]
    fn rejects_bad_params() {
        let mut s = spec(1);
        s.intrinsic_degree = 0;
        assert!(generate_synthetic(&s, &spec(2), 10, 0).is_err());
        assert!(generate_synthetic(&spec(1), &spec(2), 0, 0).is_err());
        let mut t = spec(1);
        t.param_dim = 9;
        assert!(generate_synthetic(&t, &spec(2), 10, 0).is_err());
    }
}
