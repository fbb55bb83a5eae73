use serde::Serialize;

use super::{avsk, entanglement_witness, lqu_minimize, lqu_two_qubit_scaled, Spectrum, DEFAULT_RESTARTS};
use crate::error::Result;
use crate::linalg::DensityMatrix;
use crate::moments::variance;
use crate::states::RandomSeed;

#[derive(Debug, Clone, Copy)]
pub struct MeasureOptions {
    pub with_variance: bool,
    pub restarts: usize,
    pub seed: RandomSeed,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            with_variance: false,
            restarts: DEFAULT_RESTARTS,
            seed: RandomSeed::new(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub avsk: f64,
    /// `None` when the spectrum is degenerate and no minimum is defined.
    pub lqu: Option<f64>,
    pub variance: Option<f64>,
    pub purity_a: f64,
    pub purity_b: f64,
    /// Only reported for pure states.
    pub concurrence: Option<f64>,
    pub witness_entangled: bool,
    pub family_tag: Option<String>,
}

impl MeasureReport {
    /// Residuals of the report's own invariants; empty when consistent.
    pub fn violations(&self, spec: &Spectrum) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(lqu) = self.lqu {
            if self.avsk < lqu - 1e-9 {
                out.push(format!("avsk {} < lqu {}", self.avsk, lqu));
            }
        }
        if self.witness_entangled && self.avsk <= super::separable_cap(spec) {
            out.push("witness fired below the separable cap".to_string());
        }
        if self.avsk < 0.0 || self.variance.is_some_and(|v| v < 0.0) {
            out.push("negative average or variance".to_string());
        }
        out
    }
}

pub fn measure(rho: &DensityMatrix, spec: &Spectrum, opts: &MeasureOptions) -> Result<MeasureReport> {
    let av = avsk(rho, spec)?;
    let lqu = if rho.dim_a() == 2 && rho.dim_b() == 2 {
        Some(lqu_two_qubit_scaled(rho, spec)?)
    } else if spec.is_degenerate(1e-12) {
        None
    } else {
        Some(lqu_minimize(rho, spec, opts.restarts, opts.seed)?)
    };
    let variance = if opts.with_variance {
        Some(variance(rho, spec)?)
    } else {
        None
    };
    let purity_b = rho.marginal_b().purity();
    let concurrence = if (rho.purity() - 1.0).abs() < 1e-10 {
        Some((2.0 - 2.0 * purity_b).max(0.0).sqrt())
    } else {
        None
    };
    Ok(MeasureReport {
        avsk: av,
        lqu,
        variance,
        purity_a: rho.marginal_a().purity(),
        purity_b,
        concurrence,
        witness_entangled: entanglement_witness(rho, spec)?,
        family_tag: None,
    })
}
