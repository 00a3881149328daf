//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant.

use super::lu::Lu;
use super::matrix::DenseMatrix;
use crate::error::{dim_err, input_err, Result};

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the degree-13 approximant is accurate to unit roundoff.
const THETA13: f64 = 5.371_920_351_148_152;

/// Computes `exp(A t)`.
pub fn mat_exp(a: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(dim_err(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !t.is_finite() {
        return Err(input_err("time argument is not finite"));
    }
    let n = a.rows();
    let at = a.scaled(t);
    let norm = at.norm_1();
    if norm == 0.0 {
        return Ok(DenseMatrix::identity(n));
    }

    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let x = at.scaled(0.5f64.powi(squarings));

    let eye = DenseMatrix::identity(n);
    let x2 = x.mul_unchecked(&x);
    let x4 = x2.mul_unchecked(&x2);
    let x6 = x4.mul_unchecked(&x2);
    let b = &PADE13;

    let mut u_inner = x6.scaled(b[13]);
    u_inner.axpy(b[11], &x4);
    u_inner.axpy(b[9], &x2);
    let mut u_outer = x6.mul_unchecked(&u_inner);
    u_outer.axpy(b[7], &x6);
    u_outer.axpy(b[5], &x4);
    u_outer.axpy(b[3], &x2);
    u_outer.axpy(b[1], &eye);
    let u = x.mul_unchecked(&u_outer);

    let mut v_inner = x6.scaled(b[12]);
    v_inner.axpy(b[10], &x4);
    v_inner.axpy(b[8], &x2);
    let mut v = x6.mul_unchecked(&v_inner);
    v.axpy(b[6], &x6);
    v.axpy(b[4], &x4);
    v.axpy(b[2], &x2);
    v.axpy(b[0], &eye);

    let mut numer = v.clone();
    numer.axpy(1.0, &u);
    let mut denom = v;
    denom.axpy(-1.0, &u);

    let mut r = Lu::factor(&denom)?.solve(&numer)?;
    for _ in 0..squarings {
        r = r.mul_unchecked(&r);
    }
    Ok(r)
}
