//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants (degrees 3, 5, 7, 9, 13).

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];

/// Scaling threshold for the degree-13 approximant.
pub const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest number of squarings accepted before declaring overflow.
const MAX_SQUARINGS: i32 = 1000;

fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^{tA}`. Returns the identity exactly for `t = 0`.
pub fn expm(a: &CMatrix, t: f64) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expm needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if t == 0.0 {
        return Ok(linalg::identity(n));
    }
    if !t.is_finite() {
        return Err(Error::Numeric(format!("non-finite time {t}")));
    }
    let scaled = a * c(t);
    let norm = one_norm(&scaled);
    if !norm.is_finite() {
        return Err(Error::Numeric("overflow: ‖tA‖ is not finite".into()));
    }

    for &(m, theta) in &THETA {
        if norm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return finish(pade_low(&scaled, b), 0);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    if s > MAX_SQUARINGS {
        return Err(Error::Numeric(format!("overflow: ‖tA‖₁ = {norm:.3e} needs {s} squarings")));
    }
    let reduced = scaled * c(0.5f64.powi(s));
    finish(pade13(&reduced), s)
}

fn finish(pq: (CMatrix, CMatrix), squarings: i32) -> Result<CMatrix> {
    let (u, v) = pq;
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Numeric("Padé denominator is singular".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("overflow in matrix exponential".into()));
    }
    Ok(r)
}

/// Odd part `U` and even part `V` of the degree-`m` numerator for `m ≤ 9`.
fn pade_low(a: &CMatrix, b: &[f64]) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let a2 = a * a;
    let mut power = linalg::identity(n);
    let mut u_inner = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    for j in 0..b.len() / 2 {
        v += &power * c(b[2 * j]);
        u_inner += &power * c(b[2 * j + 1]);
        power = &power * &a2;
    }
    (a * u_inner, v)
}

fn pade13(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let id = linalg::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| c(B13[k]);

    let u_high = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = a * (u_high + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let v_high = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = v_high + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    (u, v)
}
