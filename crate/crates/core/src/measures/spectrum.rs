use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{diag, ComplexMatrix};

/// Eigenvalues of the local observable class `U Λ U^dagger`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::param("spectrum", "need at least two eigenvalues"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("spectrum", "eigenvalues must be finite"));
        }
        Ok(Spectrum { values })
    }

    pub fn sigma_z() -> Self {
        Spectrum {
            values: vec![1.0, -1.0],
        }
    }

    /// Equally spaced, traceless: `{(n-1)/2, (n-3)/2, ..., -(n-1)/2}`.
    pub fn harmonic(n: usize) -> Result<Self> {
        let mid = (n as f64 - 1.0) / 2.0;
        Spectrum::new((0..n).map(|k| mid - k as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Copy shifted to zero trace.
    pub fn traceless(&self) -> Vec<f64> {
        let mean = self.trace() / self.dim() as f64;
        self.values.iter().map(|v| v - mean).collect()
    }

    /// `Σ λ^k` of the traceless form.
    pub fn traceless_power_sum(&self, k: i32) -> f64 {
        self.traceless().iter().map(|v| v.powi(k)).sum()
    }

    /// `(N Tr[Λ²] - Tr[Λ]²) / (N (N² - 1))`, evaluated on the traceless form
    /// where it reduces to `Tr[Λ₀²] / (N² - 1)`.
    pub fn prefactor(&self) -> f64 {
        let n = self.dim() as f64;
        self.traceless_power_sum(2) / (n * n - 1.0)
    }

    /// Same quantity from raw traces, without shifting first.
    pub fn prefactor_raw(&self) -> f64 {
        let n = self.dim() as f64;
        let t1 = self.trace();
        let t2: f64 = self.values.iter().map(|v| v * v).sum();
        (n * t2 - t1 * t1) / (n * (n * n - 1.0))
    }

    pub fn shifted(&self, eta: f64) -> Self {
        Spectrum {
            values: self.values.iter().map(|v| v + eta).collect(),
        }
    }

    pub fn scaled(&self, eta: f64) -> Self {
        Spectrum {
            values: self.values.iter().map(|v| v * eta).collect(),
        }
    }

    /// Shifted to be nonnegative and scaled to unit trace, i.e. read as the
    /// eigenvalues of a density matrix. `None` for a fully degenerate
    /// spectrum, which has no such image.
    pub fn as_probabilities(&self) -> Option<Vec<f64>> {
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let shifted: Vec<f64> = self.values.iter().map(|v| v - min).collect();
        let total: f64 = shifted.iter().sum();
        if total <= 0.0 {
            return None;
        }
        Some(shifted.into_iter().map(|v| v / total).collect())
    }

    /// Prefactor after mapping the spectrum to a unit-trace nonnegative one.
    pub fn normalized_prefactor(&self) -> f64 {
        match self.as_probabilities() {
            Some(p) => Spectrum { values: p }.prefactor(),
            None => 0.0,
        }
    }

    pub fn is_degenerate(&self, tol: f64) -> bool {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v.windows(2).any(|w| (w[1] - w[0]).abs() <= tol)
    }

    pub fn diag_matrix(&self) -> ComplexMatrix {
        diag(&self.values)
    }
}

/// `{(N-1)/N, -1/N, ..., -1/N}`: `N - 1` degenerate eigenvalues, traceless.
pub fn optimal_spectrum(n: usize) -> Result<Spectrum> {
    if n < 2 {
        return Err(Error::param("n", "needs n >= 2"));
    }
    let nf = n as f64;
    let mut values = vec![-1.0 / nf; n];
    values[0] = (nf - 1.0) / nf;
    Spectrum::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_small_cases() {
        assert_eq!(optimal_spectrum(2).unwrap().values(), &[0.5, -0.5]);
        let s3 = optimal_spectrum(3).unwrap();
        let expect = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (a, b) in s3.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(optimal_spectrum(1).is_err());
    }

    #[test]
    fn prefactor_forms_agree() {
        let s = Spectrum::new(vec![0.3, 2.0, -1.1, 5.0]).unwrap();
        assert!((s.prefactor() - s.prefactor_raw()).abs() < 1e-12);
        assert!((Spectrum::sigma_z().prefactor() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn prefactor_zero_iff_degenerate() {
        let flat = Spectrum::new(vec![1.5; 3]).unwrap();
        assert!(flat.prefactor().abs() < 1e-15);
        assert!(flat.as_probabilities().is_none());
        assert!(Spectrum::new(vec![1.5, 1.5, 1.6]).unwrap().prefactor() > 0.0);
    }

    #[test]
    fn optimal_beats_harmonic_after_normalization() {
        for n in 2..=6 {
            let opt = optimal_spectrum(n).unwrap().normalized_prefactor();
            let harm = Spectrum::harmonic(n).unwrap().normalized_prefactor();
            assert!(opt >= harm - 1e-15, "n={n}: {opt} < {harm}");
            if n > 2 {
                assert!(opt > harm);
            }
        }
    }

    #[test]
    fn degeneracy_detection() {
        assert!(!Spectrum::sigma_z().is_degenerate(1e-12));
        assert!(optimal_spectrum(3).unwrap().is_degenerate(1e-12));
        assert!(Spectrum::new(vec![1.0]).is_err());
    }
}
