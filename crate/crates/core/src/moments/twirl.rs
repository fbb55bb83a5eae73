use crate::error::{Error, Result};
use crate::linalg::{identity, swap_operator, trace, trace_product, ComplexMatrix};

/// `∫ dU (U ⊗ U) Θ (U ⊗ U)^dagger` on `C^n ⊗ C^n`, which lands on
/// `span{1, S}`.
pub fn twirl2(theta: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let d = n * n;
    if theta.nrows() != d || theta.ncols() != d {
        return Err(Error::dims(format!(
            "operator is {}x{}, expected {d}x{d}",
            theta.nrows(),
            theta.ncols()
        )));
    }
    if n < 2 {
        return Ok(theta.clone());
    }
    let s = swap_operator(n).into_matrix();
    let tr = trace(theta);
    let tr_s = trace_product(&s, theta);
    let nf = n as f64;
    let den = nf * (nf * nf - 1.0);
    let a = (tr * nf - tr_s) / den;
    let b = (tr_s * nf - tr) / den;
    Ok(identity(d) * a + s * b)
}
