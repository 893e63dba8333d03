//! Simulated quadrature measurements on zero-mean Gaussian states and
//! plug-in estimation of the variance matrix.
//!
//! Phase-space points are drawn from the Wigner distribution, a normal law
//! with covariance `V/2` (the vacuum has `V = I` and quadrature variance 1/2).
//! Sampling is split into fixed-size chunks; chunk `c` draws from a ChaCha8
//! stream `c` keyed by the seed, so output is bit-identical for any number of
//! worker threads.

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::complementarity::iconcurrence_from_vm;
use crate::error::{Error, Result};
use crate::gaussian::VarianceMatrix;
use crate::scalar::Real;

/// Generator identification written into output metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha8Rng (rand_chacha 0.9) seeded by seed_from_u64(seed), stream = chunk index";

/// Draws per chunk.
pub const CHUNK_SHOTS: usize = 1 << 16;

/// Width of the reported confidence interval, in standard errors.
pub const COVERAGE_SIGMAS: f64 = 3.0;

/// Joint draws of `(x_a, p_a, x_b, p_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch<T> {
    seed: u64,
    samples: Vec<[T; 4]>,
}

impl<T: Real> SampleBatch<T> {
    pub fn shots(&self) -> usize {
        self.samples.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> &[[T; 4]] {
        &self.samples
    }

    /// Wraps an externally produced measurement record.
    pub fn from_samples(seed: u64, samples: Vec<[T; 4]>) -> Self {
        Self { seed, samples }
    }
}

/// Lower Cholesky factor of `V/2`.
fn sampling_factor<T: Real>(v: &VarianceMatrix<T>) -> Result<[[T; 4]; 4]> {
    if !v.is_physical() {
        return Err(Error::NonPhysical(
            "sampling requires a physical variance matrix".into(),
        ));
    }
    let half = Matrix4::from_fn(|j, k| 0.5 * v.get(j, k).as_f64());
    let chol = half
        .cholesky()
        .ok_or_else(|| Error::NonPhysical("V/2 is not positive definite".into()))?;
    let l = chol.l();
    let mut out = [[T::zero(); 4]; 4];
    for (j, row) in out.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            *entry = T::lit(l[(j, k)]);
        }
    }
    Ok(out)
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Draws `shots` i.i.d. zero-mean normal vectors with covariance `V/2`.
pub fn sample<T: Real>(v: &VarianceMatrix<T>, shots: usize, seed: u64) -> Result<SampleBatch<T>>
where
    StandardNormal: Distribution<T>,
{
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be positive".into()));
    }
    let l = sampling_factor(v)?;
    let chunks = shots.div_ceil(CHUNK_SHOTS);
    let samples = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let len = CHUNK_SHOTS.min(shots - c * CHUNK_SHOTS);
            (0..len)
                .map(|_| {
                    let z: [T; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
                    std::array::from_fn(|j| (0..=j).map(|k| l[j][k] * z[k]).sum())
                })
                .collect::<Vec<[T; 4]>>()
        })
        .collect::<Vec<_>>()
        .concat();
    Ok(SampleBatch { seed, samples })
}

/// Sample-moment estimate of a variance matrix with entrywise standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct VmEstimate<T> {
    pub v_hat: VarianceMatrix<T>,
    pub standard_errors: [[T; 4]; 4],
    pub shots: usize,
}

impl<T: Real> VmEstimate<T> {
    /// A noise-free "estimate" equal to `v`.
    pub fn exact(v: VarianceMatrix<T>) -> Self {
        Self {
            v_hat: v,
            standard_errors: [[T::zero(); 4]; 4],
            shots: usize::MAX,
        }
    }

    /// `|v_hat_jk - truth_jk| <= k SE_jk`.
    pub fn covers(&self, truth: &VarianceMatrix<T>, j: usize, k: usize, sigmas: T) -> bool {
        (self.v_hat.get(j, k) - truth.get(j, k)).abs() <= sigmas * self.standard_errors[j][k]
    }
}

/// `V_jk = 2 mean(q_j q_k) - 2 mean(q_j) mean(q_k)`, with Gaussian
/// fourth-moment standard errors `SE_jk = sqrt((V_jj V_kk + V_jk^2) / n)`
/// (so `SE_jj = V_jj sqrt(2/n)`). Accumulates in `f64`.
pub fn estimate_vm<T: Real>(batch: &SampleBatch<T>) -> Result<VmEstimate<T>> {
    let n = batch.shots();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "estimation needs at least 2 shots, got {n}"
        )));
    }
    let mut sum = [0.0_f64; 4];
    let mut prod = [[0.0_f64; 4]; 4];
    for q in batch.samples() {
        let q = q.map(Real::as_f64);
        for j in 0..4 {
            sum[j] += q[j];
            for k in j..4 {
                prod[j][k] += q[j] * q[k];
            }
        }
    }
    let nf = n as f64;
    let mean = sum.map(|s| s / nf);
    let mut v = [[0.0_f64; 4]; 4];
    for j in 0..4 {
        for k in j..4 {
            let value = 2.0 * prod[j][k] / nf - 2.0 * mean[j] * mean[k];
            v[j][k] = value;
            v[k][j] = value;
        }
    }
    let mut v_hat = [[T::zero(); 4]; 4];
    let mut se = [[T::zero(); 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            v_hat[j][k] = T::lit(v[j][k]);
            se[j][k] = T::lit(((v[j][j] * v[k][k] + v[j][k] * v[j][k]) / nf).sqrt());
        }
    }
    Ok(VmEstimate {
        v_hat: VarianceMatrix::from_array_unchecked(v_hat),
        standard_errors: se,
        shots: n,
    })
}

/// I-concurrence read off a single quadrature variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementarityEstimate<T> {
    /// `2 (1 - 1/v_hat_11)`.
    pub c_i_sq: T,
    /// `2 - c_i_sq`: the predictability that would fill the untruncated budget.
    pub p_context: T,
    /// First-order propagated standard error `2 SE(v_11) / v_11^2`.
    pub std_error: T,
    /// `COVERAGE_SIGMAS * std_error`.
    pub ci_halfwidth: T,
    /// `v_hat_11 < 1` was clamped to 1.
    pub clamped: bool,
}

impl<T: Real> ComplementarityEstimate<T> {
    pub fn interval(&self) -> (T, T) {
        (
            self.c_i_sq - self.ci_halfwidth,
            self.c_i_sq + self.ci_halfwidth,
        )
    }

    pub fn covers(&self, truth: T) -> bool {
        let (lo, hi) = self.interval();
        lo <= truth && truth <= hi
    }
}

pub fn estimate_complementarity<T: Real>(estimate: &VmEstimate<T>) -> ComplementarityEstimate<T> {
    let raw = estimate.v_hat.get(0, 0);
    let clamped = raw < T::one();
    let v11 = raw.max(T::one());
    let c_i_sq = iconcurrence_from_vm(v11).expect("clamped to the physical range");
    let std_error = T::lit(2.0) / (v11 * v11) * estimate.standard_errors[0][0];
    ComplementarityEstimate {
        c_i_sq,
        p_context: T::lit(2.0) - c_i_sq,
        std_error,
        ci_halfwidth: T::lit(COVERAGE_SIGMAS) * std_error,
        clamped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::vm_tmss;

    #[test]
    fn vacuum_quadrature_variance_is_half() {
        let batch = sample(&VarianceMatrix::<f64>::identity(), 1_000_000, 11).unwrap();
        let est = estimate_vm(&batch).unwrap();
        for j in 0..4 {
            let var = 0.5 * est.v_hat.get(j, j);
            let se = 0.5 * est.standard_errors[j][j];
            assert!((var - 0.5).abs() < 3.0 * se, "coordinate {j}: {var}");
        }
    }

    #[test]
    fn tmss_variance_matches_v11_over_two() {
        let v = vm_tmss(1.0_f64);
        let est = estimate_vm(&sample(&v, 1_000_000, 5).unwrap()).unwrap();
        assert!(est.covers(&v, 0, 0, 3.0));
        assert!(est.covers(&v, 0, 2, 3.0));
        let var = 0.5 * est.v_hat.get(0, 0);
        assert!((var - 2.0_f64.cosh() / 2.0).abs() < 3.0 * 0.5 * est.standard_errors[0][0]);
    }

    #[test]
    fn same_seed_same_batch() {
        let v = vm_tmss(0.4_f64);
        let a = sample(&v, 200_000, 99).unwrap();
        let b = sample(&v, 200_000, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample(&v, 200_000, 100).unwrap());
        // A shorter run is a prefix of a longer one.
        let c = sample(&v, 70_000, 99).unwrap();
        assert_eq!(c.samples(), &a.samples()[..70_000]);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let v = vm_tmss(0.4_f64);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let a = single.install(|| sample(&v, 150_000, 3).unwrap());
        let b = sample(&v, 150_000, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn two_shot_batch_is_finite() {
        let est = estimate_vm(&sample(&vm_tmss(1.0_f64), 2, 1).unwrap()).unwrap();
        assert!(est.v_hat.as_array().iter().flatten().all(|x| x.is_finite()));
        assert!(est.standard_errors[0][0] > 0.1 * est.v_hat.get(0, 0));
        assert!(estimate_vm(&sample(&vm_tmss(1.0_f64), 1, 1).unwrap()).is_err());
    }

    #[test]
    fn sample_rejects_bad_input() {
        let v = VarianceMatrix::<f64>::identity();
        assert!(sample(&v, 0, 1).is_err());
        let unphysical = VarianceMatrix::from_diagonal([0.5_f64; 4]);
        assert!(matches!(
            sample(&unphysical, 10, 1),
            Err(Error::NonPhysical(_))
        ));
    }

    #[test]
    fn complementarity_from_exact_vm() {
        let e = estimate_complementarity(&VmEstimate::exact(VarianceMatrix::<f64>::identity()));
        assert_eq!((e.c_i_sq, e.p_context, e.ci_halfwidth), (0.0, 2.0, 0.0));
        assert!(!e.clamped);

        let v = vm_tmss(1.0_f64);
        let e = estimate_complementarity(&VmEstimate::exact(v));
        assert_eq!(e.c_i_sq, iconcurrence_from_vm(v.get(0, 0)).unwrap());
        assert!((e.c_i_sq - 1.4683955423318406).abs() < 1e-14);
    }

    #[test]
    fn sub_vacuum_estimate_is_clamped() {
        let mut est = VmEstimate::exact(VarianceMatrix::<f64>::identity());
        est.v_hat = VarianceMatrix::from_diagonal([0.999, 1.0, 1.0, 1.0]);
        let e = estimate_complementarity(&est);
        assert!(e.clamped);
        assert_eq!(e.c_i_sq, 0.0);
    }

    #[test]
    fn single_precision_sampling() {
        let est = estimate_vm(&sample(&vm_tmss(0.5_f32), 100_000, 8).unwrap()).unwrap();
        assert!(est.covers(&vm_tmss(0.5_f32), 0, 0, 4.0));
    }
}
