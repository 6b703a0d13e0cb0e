//! Small dense helpers on top of nalgebra.

use nalgebra::Cholesky;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{CMat, CVec, Error, Result, C64};

/// One CN(0, 1) draw: real and imaginary parts i.i.d. N(0, 1/2).
pub fn cn01<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of i.i.d. CN(0, 1) entries, filled column-major.
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    let data: Vec<C64> = (0..rows * cols).map(|_| cn01(rng)).collect();
    CMat::from_vec(rows, cols, data)
}

/// Relative deviation from Hermitian symmetry, `‖H − Hᴴ‖_F / ‖H‖_F`.
pub fn hermitian_asymmetry(h: &CMat) -> f64 {
    let norm = h.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (h - h.adjoint()).norm() / norm
}

/// Cholesky factor of a Hermitian positive-definite matrix.
///
/// Every squared pivot must exceed `1e-14` times the largest diagonal entry;
/// nalgebra alone would happily take complex square roots of negative pivots.
pub fn cholesky(h: &CMat, what: &str) -> Result<Cholesky<C64, nalgebra::Dyn>> {
    cholesky_with_floor(h, 1e-14).ok_or_else(|| Error::NotPositiveDefinite(what.to_string()))
}

/// Cholesky factor, or `None` when a squared pivot falls below
/// `rel_floor · max_i H_ii` or is not real and positive.
pub fn cholesky_with_floor(h: &CMat, rel_floor: f64) -> Option<Cholesky<C64, nalgebra::Dyn>> {
    let scale = h.diagonal().iter().map(|z| z.re).fold(0.0, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return None;
    }
    let chol = Cholesky::new(h.clone())?;
    let l = chol.l_dirty();
    let ok = (0..h.nrows()).all(|i| {
        let d = l[(i, i)];
        d.re.is_finite()
            && d.re > 0.0
            && d.im.abs() <= 1e-10 * d.re
            && d.re * d.re >= rel_floor * scale
    });
    ok.then_some(chol)
}

/// Inverse of a Hermitian positive-definite matrix via Cholesky.
pub fn hpd_inverse(h: &CMat, what: &str) -> Result<CMat> {
    Ok(cholesky(h, what)?.inverse())
}

/// `xᴴ H x`, real part only (H assumed Hermitian).
pub fn quad_form(h: &CMat, x: &CVec) -> f64 {
    x.dotc(&(h * x)).re
}
