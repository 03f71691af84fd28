//! Monte Carlo statistics over sample batches.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{JeModel, Region, SampleBatch};

/// Default Monte Carlo size for the model-level estimators.
pub const DEFAULT_MC_COUNT: usize = 1_000_000;

impl SampleBatch {
    /// Rows whose zero pattern disagrees with their region tag, plus rows
    /// with every coordinate strictly positive. `Free` rows are only checked
    /// for non-negativity.
    pub fn exclusivity_violations(&self) -> usize {
        self.rows()
            .zip(self.regions())
            .filter(|(row, &r)| {
                if row.iter().any(|&x| !(x >= 0.0)) {
                    return true;
                }
                if r == Region::Free {
                    return false;
                }
                row.iter().all(|&x| x > 0.0)
                    || row.iter().enumerate().any(|(i, &x)| (x > 0.0) != r.is_active(i))
            })
            .count()
    }

    /// Fraction of rows with every coordinate strictly positive.
    pub fn fraction_all_positive(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let hits = self.rows().filter(|r| r.iter().all(|&x| x > 0.0)).count();
        hits as f64 / self.len() as f64
    }

    /// Fraction of rows with `X_i > 0` and `X_j > 0`.
    pub fn fraction_pair_positive(&self, i: usize, j: usize) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let hits = self.rows().filter(|r| r[i] > 0.0 && r[j] > 0.0).count();
        hits as f64 / self.len() as f64
    }

    /// Empirical `P(X ≤ x)`.
    pub fn empirical_cdf(&self, x: &[f64]) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let hits = self.rows().filter(|r| r.iter().zip(x).all(|(a, b)| a <= b)).count();
        hits as f64 / self.len() as f64
    }

    /// Empirical `P(X_i > x)`.
    pub fn empirical_survival(&self, i: usize, x: f64) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let hits = self.rows().filter(|r| r[i] > x).count();
        hits as f64 / self.len() as f64
    }

    /// Empirical `P(X_i > x_i for all i in indices)`.
    pub fn joint_survival(&self, indices: &[usize], x: &[f64]) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let hits = self.rows().filter(|r| indices.iter().zip(x).all(|(&i, &xi)| r[i] > xi)).count();
        hits as f64 / self.len() as f64
    }

    /// Pearson correlation matrix, computed in two passes.
    pub fn pearson_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.n();
        let count = self.len() as f64;
        let mut mean = vec![0.0; n];
        for row in self.rows() {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in mean.iter_mut() {
            *m /= count;
        }
        let mut cov = vec![vec![0.0; n]; n];
        let mut d = vec![0.0; n];
        for row in self.rows() {
            for i in 0..n {
                d[i] = row[i] - mean[i];
            }
            for i in 0..n {
                for j in i..n {
                    cov[i][j] += d[i] * d[j];
                }
            }
        }
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                if i == j {
                    if !(cov[i][i] > 0.0) {
                        return Err(Error::UndefinedCorrelation { i, j });
                    }
                    out[i][i] = 1.0;
                    continue;
                }
                let denom = math::sqrt(cov[i][i] * cov[j][j]);
                if !(denom > 0.0) {
                    return Err(Error::UndefinedCorrelation { i, j });
                }
                let r = (cov[i][j] / denom).clamp(-1.0, 1.0);
                out[i][j] = r;
                out[j][i] = r;
            }
        }
        Ok(out)
    }

    /// `|mean over rows of Π_i (e^{i t_i x_i} − 1)|`.
    pub fn cf_product_magnitude(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.n() {
            return Err(Error::Shape { expected: self.n(), found: t.len() });
        }
        if self.is_empty() {
            return Ok(0.0);
        }
        let (mut re, mut im) = (0.0, 0.0);
        for row in self.rows() {
            let (mut pr, mut pi) = (1.0, 0.0);
            for (&ti, &x) in t.iter().zip(row) {
                let (c, s) = (math::cos(ti * x) - 1.0, math::sin(ti * x));
                let next = (pr * c - pi * s, pr * s + pi * c);
                pr = next.0;
                pi = next.1;
            }
            re += pr;
            im += pi;
        }
        let k = self.len() as f64;
        Ok(math::sqrt((re / k) * (re / k) + (im / k) * (im / k)))
    }
}

/// Monte Carlo estimate of `P(X_i > 0 for all i)`.
pub fn survival_all_positive<R: Rng + ?Sized>(
    model: &JeModel,
    rng: &mut R,
    mc_count: usize,
) -> f64 {
    model.sample(rng, mc_count).fraction_all_positive()
}

/// Monte Carlo Pearson correlation matrix.
pub fn pearson_matrix<R: Rng + ?Sized>(
    model: &JeModel,
    rng: &mut R,
    mc_count: usize,
) -> Result<Vec<Vec<f64>>> {
    model.sample(rng, mc_count).pearson_matrix()
}

/// Monte Carlo estimate of `|E[Π_i (e^{i t_i X_i} − 1)]|`, which vanishes
/// for a jointly exclusive vector.
pub fn cf_product_identity<R: Rng + ?Sized>(
    model: &JeModel,
    rng: &mut R,
    t: &[f64],
    mc_count: usize,
) -> Result<f64> {
    if t.len() != model.n() {
        return Err(Error::Shape { expected: model.n(), found: t.len() });
    }
    model.sample(rng, mc_count).cf_product_magnitude(t)
}

/// Half-width of the two-sided DKW band `sqrt(ln(2/α) / (2 count))`.
pub fn dkw_epsilon(count: usize, alpha: f64) -> f64 {
    math::sqrt(math::ln(2.0 / alpha) / (2.0 * count as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::trivariate_allocation;
    use crate::copulas::CopulaSpec;
    use crate::marginals::MarginalSpec;
    use crate::model::sample_independent;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example(lambda: f64) -> JeModel {
        let m = MarginalSpec::scaled_uniform(0.5, 1.0).unwrap();
        let q0 = [0.5; 3];
        JeModel::build(
            vec![m.clone(), m.clone(), m],
            trivariate_allocation(&q0, &q0, lambda).unwrap(),
            vec![
                CopulaSpec::independence(2).unwrap(),
                CopulaSpec::comonotone(2).unwrap(),
                CopulaSpec::countermonotone(),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn batch_helpers() {
        let b = SampleBatch::from_rows(
            2,
            vec![0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 1.0, 1.0],
            vec![Region::Axis(1), Region::Axis(0), Region::Origin, Region::Free],
        )
        .unwrap();
        assert_eq!(b.fraction_all_positive(), 0.25);
        assert_eq!(b.empirical_cdf(&[1.0, 1.0]), 0.75);
        assert_eq!(b.empirical_survival(0, 0.5), 0.5);
        assert_eq!(b.joint_survival(&[0, 1], &[0.0, 0.0]), 0.25);
        assert_eq!(b.exclusivity_violations(), 0);
        let bad = SampleBatch::from_rows(2, vec![1.0, 0.0], vec![Region::Axis(1)]).unwrap();
        assert_eq!(bad.exclusivity_violations(), 1);
    }

    #[test]
    fn pearson_on_known_data() {
        let b =
            SampleBatch::from_rows(2, vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0], vec![Region::Free; 3])
                .unwrap();
        let r = b.pearson_matrix().unwrap();
        assert!((r[0][1] - 1.0).abs() < 1e-12);
        let flat =
            SampleBatch::from_rows(2, vec![1.0, 2.0, 1.0, 4.0], vec![Region::Free; 2]).unwrap();
        assert!(matches!(flat.pearson_matrix(), Err(Error::UndefinedCorrelation { i: 0, j: 0 })));
    }

    #[test]
    fn correlations_at_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let r = pearson_matrix(&example(1.0 / 3.0), &mut rng, 200_000).unwrap();
        for (got, want) in [(r[0][1], -0.2), (r[0][2], -1.0 / 15.0), (r[1][2], -1.0 / 3.0)] {
            assert!((got - want).abs() < 0.02, "{got} vs {want}");
        }
        for i in 0..3 {
            assert_eq!(r[i][i], 1.0);
        }
    }

    #[test]
    fn cf_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let m = example(0.4);
        assert!(cf_product_identity(&m, &mut rng, &[1.0, 2.0, 3.0], 100_000).unwrap() < 0.02);
        assert_eq!(cf_product_identity(&m, &mut rng, &[0.0; 3], 1000).unwrap(), 0.0);
        let control = sample_independent(m.marginals(), &mut rng, 100_000);
        assert!(control.cf_product_magnitude(&[1.0, 1.0, 1.0]).unwrap() > 0.005);
        assert!(cf_product_identity(&m, &mut rng, &[1.0], 10).is_err());
    }

    #[test]
    fn no_positive_orthant_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        assert_eq!(survival_all_positive(&example(0.5), &mut rng, 50_000), 0.0);
    }

    #[test]
    fn dkw_width() {
        assert!((dkw_epsilon(100_000, 1e-3) - 0.0062).abs() < 1e-4);
    }
}
