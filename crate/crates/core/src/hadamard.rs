//! Hadamard vectors, the fast normalized Walsh-Hadamard transform, and
//! conjugation by the unitary transform (`P = Hbar Q Hbar`).

use crate::cube_core::{validate_mask, weight, CubeSignal, SubsetMask};
use crate::error::Result;

/// Materializes the character `H_S(R) = (-1)^{|R and S|}` as a cube signal.
pub fn hadamard_vector(n: usize, s: SubsetMask) -> Result<CubeSignal> {
    validate_mask(n, s)?;
    let mut x = CubeSignal::zeros(n)?;
    for (r, v) in x.values_mut().iter_mut().enumerate() {
        *v = if weight(r as u32 & s) % 2 == 0 { 1.0 } else { -1.0 };
    }
    Ok(x)
}

/// Normalized Walsh-Hadamard transform `Hbar x = H x / 2^{n/2}`.
///
/// In-place butterfly over natural binary order, one final scaling pass.
/// Self-inverse: `wht(wht(x)) = x` up to floating tolerance.
pub fn wht(x: &CubeSignal) -> CubeSignal {
    let mut out = x.clone();
    wht_in_place(out.values_mut());
    let scale = 2f64.powi(-(x.n() as i32) / 2)
        * if x.n() % 2 == 1 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
    out.scale(scale);
    out
}

fn wht_in_place(v: &mut [f64]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        let mut i = 0;
        while i < len {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
            i += h * 2;
        }
        h *= 2;
    }
}

/// Conjugates an operator by the unitary transform: `wht(op(wht(x)))`.
pub fn conjugate_by_hbar<F>(op: F, x: &CubeSignal) -> CubeSignal
where
    F: FnOnce(&CubeSignal) -> CubeSignal,
{
    wht(&op(&wht(x)))
}
