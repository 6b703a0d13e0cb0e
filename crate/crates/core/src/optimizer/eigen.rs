use crate::linalg::hermitian_asymmetry;
use crate::{CMat, CVec, Error, Result, C64};

/// Iteration cap for the power method.
pub const MAX_POWER_ITERATIONS: usize = 100_000;

/// Fixed, generic start vector (nonzero overlap with any eigenvector in practice).
fn start_vector(n: usize) -> CVec {
    let x = CVec::from_iterator(
        n,
        (0..n).map(|i| {
            let t = i as f64;
            C64::new(
                1.0 + 0.5 * (1.7 * t + 0.3).cos(),
                0.25 + 0.5 * (0.9 * t + 1.1).sin(),
            )
        }),
    );
    x.normalize()
}

/// Result of a power iteration: Rayleigh quotient and its residual norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Power iteration for the top eigenvalue of a Hermitian operator whose
/// spectrum lies in `[-shift, ∞)`. Stops once `‖Hx − λx‖ ≤ tol·scale`.
pub(crate) fn power_iteration(
    n: usize,
    apply: impl Fn(&CVec) -> CVec,
    shift: f64,
    scale: impl Fn(f64) -> f64,
    tol: f64,
) -> Result<Eigenpair> {
    let mut x = start_vector(n);
    let mut last = f64::NAN;
    for it in 1..=MAX_POWER_ITERATIONS {
        let hx = apply(&x);
        let lambda = x.dotc(&hx).re;
        let residual = (&hx - &x * C64::new(lambda, 0.0)).norm();
        last = residual;
        if residual <= tol * scale(lambda) {
            return Ok(Eigenpair {
                value: lambda,
                residual,
                iterations: it,
            });
        }
        let y = hx + &x * C64::new(shift, 0.0);
        let norm = y.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate(
                "power iteration collapsed to zero".into(),
            ));
        }
        x = y / C64::new(norm, 0.0);
    }
    Err(Error::NotConverged {
        iterations: MAX_POWER_ITERATIONS,
        residual: last,
    })
}

/// Largest eigenvalue of a Hermitian matrix, certified by
/// `‖Hx − λx‖ ≤ tol·‖H‖_F`.
pub fn lambda_max(h: &CMat, tol: f64) -> Result<f64> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let asym = hermitian_asymmetry(h);
    if asym > 1e-8 {
        return Err(Error::NotHermitian(asym));
    }
    let n = h.nrows();
    let norm = h.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    // Gershgorin bound on the spectral radius makes H + shift·I positive semidefinite.
    let shift = (0..n)
        .map(|i| h.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(power_iteration(n, |x| h * x, shift, |_| norm, tol)?.value)
}
