//! Exact sampling of stationary Gaussian sequences.
//!
//! A Toeplitz covariance is embedded in a circulant (or, for a pair of
//! jointly stationary sequences, block-circulant) matrix whose spectral
//! factorization is read off with the FFT. When the embedding is not
//! positive semidefinite even after padding, small grids fall back to a
//! dense Cholesky factorization.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Largest grid for the dense fallback.
pub const DENSE_LIMIT: usize = 4096;

/// Relative size below which negative embedding eigenvalues are clipped.
pub const CLIP_TOLERANCE: f64 = 1e-9;

const MAX_PAD_DOUBLINGS: u32 = 3;

enum ScalarMethod {
    Circulant {
        sqrt_eig: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Dense(DMatrix<f64>),
}

/// Sampler for `n` consecutive values of a zero-mean stationary sequence.
pub struct StationarySampler {
    n: usize,
    method: ScalarMethod,
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn minimal_embedding(n: usize) -> usize {
    (2 * (n - 1)).max(2)
}

impl StationarySampler {
    /// `acov(k)` is the covariance at lag `k`; it is queried for lags up to
    /// half the embedding size, which may exceed `n - 1` when padding.
    pub fn new<F: Fn(usize) -> f64>(n: usize, acov: F) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("sample count must be at least 1".into()));
        }
        if n == 1 {
            let v = acov(0);
            if !(v >= 0.0) {
                return Err(Error::InfeasibleGrid("negative variance".into()));
            }
            return Ok(StationarySampler {
                n,
                method: ScalarMethod::Dense(DMatrix::from_element(1, 1, v.sqrt())),
            });
        }
        let mut cache: Vec<f64> = Vec::new();
        let mut m = minimal_embedding(n);
        for _ in 0..=MAX_PAD_DOUBLINGS {
            while cache.len() <= m / 2 {
                cache.push(acov(cache.len()));
            }
            if let Some(method) = Self::circulant(&cache, m) {
                return Ok(StationarySampler { n, method });
            }
            m = (2 * m).next_power_of_two();
        }
        if n <= DENSE_LIMIT {
            while cache.len() < n {
                cache.push(acov(cache.len()));
            }
            let cov = DMatrix::from_fn(n, n, |i, j| cache[i.abs_diff(j)]);
            let chol = cov.cholesky().ok_or_else(|| {
                Error::InfeasibleGrid(
                    "covariance matrix is not positive definite on this grid".into(),
                )
            })?;
            return Ok(StationarySampler {
                n,
                method: ScalarMethod::Dense(chol.l()),
            });
        }
        Err(Error::InfeasibleGrid(format!(
            "circulant embedding of {n} points is not positive semidefinite and the grid exceeds the dense limit {DENSE_LIMIT}; reduce n*dt"
        )))
    }

    fn circulant(cache: &[f64], m: usize) -> Option<ScalarMethod> {
        let mut row: Vec<Complex64> = (0..m)
            .map(|j| Complex64::new(cache[j.min(m - j)], 0.0))
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re).fold(0.0, f64::max);
        if !(max > 0.0) {
            return None;
        }
        let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min < -CLIP_TOLERANCE * max {
            return None;
        }
        let sqrt_eig = row
            .iter()
            .map(|c| (c.re.max(0.0) / m as f64).sqrt())
            .collect();
        Some(ScalarMethod::Circulant { sqrt_eig, fft })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Size of the circulant embedding, or `None` on the dense path.
    pub fn embedding_size(&self) -> Option<usize> {
        match &self.method {
            ScalarMethod::Circulant { sqrt_eig, .. } => Some(sqrt_eig.len()),
            ScalarMethod::Dense(_) => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.method {
            ScalarMethod::Circulant { sqrt_eig, fft } => {
                let mut buf: Vec<Complex64> =
                    sqrt_eig.iter().map(|s| complex_normal(rng) * *s).collect();
                fft.process(&mut buf);
                buf[..self.n].iter().map(|c| c.re).collect()
            }
            ScalarMethod::Dense(l) => {
                let z = DVector::from_fn(self.n, |_, _| rng.sample::<f64, _>(StandardNormal));
                (l * z).iter().copied().collect()
            }
        }
    }
}

/// 2x2 lag covariance `R(k) = E[X_{j+k} X_j^T]` of a bivariate sequence,
/// stored row-major as `[r00, r01, r10, r11]`.
pub type Block = [f64; 4];

enum PairMethod {
    Circulant {
        factors: Vec<[Complex64; 4]>,
        ifft: Arc<dyn Fft<f64>>,
    },
    Dense(DMatrix<f64>),
}

/// Joint sampler for two jointly stationary sequences.
pub struct PairSampler {
    n: usize,
    method: PairMethod,
}

/// Hermitian PSD square root of `[[a, b], [conj b, d]]` with tiny negative
/// eigenvalues clipped; `None` if an eigenvalue is negative beyond `floor`.
fn hermitian_sqrt(a: f64, b: Complex64, d: f64, floor: f64) -> Option<[Complex64; 4]> {
    let half_tr = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let (lo, hi) = (half_tr - rad, half_tr + rad);
    if lo < -floor || hi < -floor {
        return None;
    }
    let (lo, hi) = (lo.max(0.0), hi.max(0.0));
    let zero = Complex64::new(0.0, 0.0);
    if hi == 0.0 {
        return Some([zero; 4]);
    }
    if rad == 0.0 {
        let s = Complex64::new(hi.sqrt(), 0.0);
        return Some([s, zero, zero, s]);
    }
    // sqrt(M) = sqrt(lo) P_lo + sqrt(hi) P_hi with P_hi = (M - lo I)/(hi - lo).
    let (sl, sh) = (lo.sqrt(), hi.sqrt());
    let span = hi - lo;
    let p00 = (a - lo) / span;
    let p11 = (d - lo) / span;
    let p01 = b / span;
    let c = |p: Complex64, diag: bool| -> Complex64 {
        let q = if diag {
            Complex64::new(1.0, 0.0) - p
        } else {
            -p
        };
        p * sh + q * sl
    };
    Some([
        c(Complex64::new(p00, 0.0), true),
        c(p01, false),
        c(p01.conj(), false),
        c(Complex64::new(p11, 0.0), true),
    ])
}

impl PairSampler {
    /// `lag(k)` returns `R(k)` for `k >= 0`; `R(-k) = R(k)^T` is implied.
    pub fn new<F: Fn(usize) -> Block>(n: usize, lag: F, dense_limit: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("sample count must be at least 1".into()));
        }
        let mut cache: Vec<Block> = Vec::new();
        let mut m = minimal_embedding(n.max(2));
        for _ in 0..=MAX_PAD_DOUBLINGS {
            while cache.len() <= m / 2 {
                cache.push(lag(cache.len()));
            }
            if let Some(method) = Self::circulant(&cache, m) {
                return Ok(PairSampler { n, method });
            }
            m = (2 * m).next_power_of_two();
        }
        if n <= dense_limit {
            while cache.len() < n {
                cache.push(lag(cache.len()));
            }
            // Interleaved ordering (x_0, v_0, x_1, v_1, ...).
            let cov = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
                let (ti, ci) = (i / 2, i % 2);
                let (tj, cj) = (j / 2, j % 2);
                if ti >= tj {
                    cache[ti - tj][2 * ci + cj]
                } else {
                    cache[tj - ti][2 * cj + ci]
                }
            });
            let chol = cov.cholesky().ok_or_else(|| {
                Error::InfeasibleGrid(
                    "joint covariance matrix is not positive definite on this grid".into(),
                )
            })?;
            return Ok(PairSampler {
                n,
                method: PairMethod::Dense(chol.l()),
            });
        }
        Err(Error::InfeasibleGrid(format!(
            "block-circulant embedding of {n} points is not positive semidefinite; reduce n*dt"
        )))
    }

    fn circulant(cache: &[Block], m: usize) -> Option<PairMethod> {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        let half = m / 2;
        let mut comps: Vec<Vec<Complex64>> = (0..4)
            .map(|c| {
                (0..m)
                    .map(|j| {
                        let v = if j < half || (j == half && m % 2 == 1) {
                            cache[j][c]
                        } else if j == half {
                            // R(m/2) must equal its own transpose in the embedding.
                            let t = [0, 2, 1, 3][c];
                            0.5 * (cache[j][c] + cache[j][t])
                        } else {
                            let t = [0, 2, 1, 3][c];
                            cache[m - j][t]
                        };
                        Complex64::new(v, 0.0)
                    })
                    .collect()
            })
            .collect();
        for c in comps.iter_mut() {
            fft.process(c);
        }
        let max = (0..m)
            .map(|l| comps[0][l].re.abs().max(comps[3][l].re.abs()))
            .fold(0.0, f64::max);
        if !(max > 0.0) {
            return None;
        }
        let floor = CLIP_TOLERANCE * max;
        let mut factors = Vec::with_capacity(m);
        #[allow(clippy::needless_range_loop)]
        for l in 0..m {
            let a = comps[0][l].re;
            let d = comps[3][l].re;
            let b = 0.5 * (comps[1][l] + comps[2][l].conj());
            factors.push(hermitian_sqrt(a, b, d, floor)?);
        }
        let ifft = planner.plan_fft_inverse(m);
        Some(PairMethod::Circulant { factors, ifft })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.method, PairMethod::Dense(_))
    }

    /// One joint draw of both sequences.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        match &self.method {
            PairMethod::Circulant { factors, ifft } => {
                let m = factors.len();
                let mut y0 = Vec::with_capacity(m);
                let mut y1 = Vec::with_capacity(m);
                for f in factors {
                    let z0 = complex_normal(rng);
                    let z1 = complex_normal(rng);
                    y0.push(f[0] * z0 + f[1] * z1);
                    y1.push(f[2] * z0 + f[3] * z1);
                }
                ifft.process(&mut y0);
                ifft.process(&mut y1);
                let scale = 1.0 / (m as f64).sqrt();
                (
                    y0[..self.n].iter().map(|c| c.re * scale).collect(),
                    y1[..self.n].iter().map(|c| c.re * scale).collect(),
                )
            }
            PairMethod::Dense(l) => {
                let z = DVector::from_fn(2 * self.n, |_, _| rng.sample::<f64, _>(StandardNormal));
                let y = l * z;
                (
                    (0..self.n).map(|j| y[2 * j]).collect(),
                    (0..self.n).map(|j| y[2 * j + 1]).collect(),
                )
            }
        }
    }
}
