//! The harmonic spaces `W_r` and the ladder spaces `V_r`.
//!
//! `W_r` is the orthogonal complement of `A_+ l2(Sigma_{r-1})` inside
//! `l2(Sigma_r)`, equivalently the kernel of `A_-` on the sphere. Its
//! dimension is `C(N,r) - C(N,r-1)`. The ladder identity
//! `A_- A_+^{k+1} W = m(r,k) A_+^k W` with `m(r,k) = (k+1)(N - 2r - k)`
//! drives everything here: the iterative projection onto `W_r`, the word
//! calculus for compositions of `A_+` and `A_-`, and the norm propagation
//! `||A_+^k w||^2 = ||w||^2 * prod_{j<k} m(r,j)`.

use crate::cube_core::{
    apply_inner, apply_outer, binomial, validate_dim, CubeSignal, SphereSlice,
};
use crate::error::{CubeError, Result};
use nalgebra::DMatrix;

/// Relative tolerance for membership `w in W_r` (`||A_- w|| <= MEMBERSHIP_TOL ||w||`).
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Singular-value cutoff factor for rank extraction in [`wr_basis`].
const RANK_CUTOFF: f64 = 1e-8;

/// The ladder multiplier `m(r,k) = (k+1)(N - 2r - k)`.
///
/// May be zero or negative outside the admissible window `k < N - 2r`;
/// callers guard.
pub fn multiplier(n: usize, r: usize, k: usize) -> f64 {
    (k as f64 + 1.0) * (n as f64 - 2.0 * r as f64 - k as f64)
}

/// Squared norm growth of the ladder: `prod_{j<k} m(r,j)`.
pub fn norm_weight_sq(n: usize, r: usize, k: usize) -> f64 {
    (0..k).map(|j| multiplier(n, r, j)).product()
}

/// Commutator `C = A_- A_+ - A_+ A_-`; acts on `Sigma_r` as `(N - 2r) I`.
pub fn commutator_apply(x: &CubeSignal) -> CubeSignal {
    let mut out = apply_inner(&apply_outer(x));
    out.axpy(-1.0, &apply_outer(&apply_inner(x)));
    out
}

/// `A_+^k x` by repeated application.
pub fn outer_power(x: &CubeSignal, k: usize) -> CubeSignal {
    let mut cur = x.clone();
    for _ in 0..k {
        cur = apply_outer(&cur);
    }
    cur
}

fn inner_power(x: &CubeSignal, k: usize) -> CubeSignal {
    let mut cur = x.clone();
    for _ in 0..k {
        cur = apply_inner(&cur);
    }
    cur
}

/// Orthogonal projection of a sphere function onto `W_r`, computed by the
/// iterative peel-off scheme: extract the `W_k` component for k = 0, 1, ...
/// starting with the innermost sphere, then subtract the lifted components.
///
/// A zero multiplier in a denominator product means the corresponding ladder
/// image has zero norm, so that component is vacuous and is set to zero.
pub fn project_onto_wr(v: &SphereSlice) -> Result<SphereSlice> {
    let (n, r) = (v.n(), v.r());
    if r == 0 {
        // W_0 is the constants at the origin: the whole singleton sphere.
        return Ok(v.clone());
    }
    let mut residual = v.embed()?;
    for k in 0..r {
        // W_k component of the residual: A_-^{r-k} residual / prod of multipliers
        let p = r - k;
        let denom: f64 = (0..p).map(|j| multiplier(n, k, j)).product();
        if denom == 0.0 {
            continue;
        }
        let mut wk = inner_power(&residual, p);
        wk.scale(1.0 / denom);
        // subtract the lift A_+^{r-k} W_k
        residual.axpy(-1.0, &outer_power(&wk, p));
    }
    SphereSlice::extract(&residual, r)
}

/// Orthonormal basis of `W_r`.
pub struct WrBasis {
    n: usize,
    r: usize,
    vectors: Vec<SphereSlice>,
}

impl WrBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// True when `C(N,r) - C(N,r-1) <= 0` and the space is trivial.
    pub fn is_trivial(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[SphereSlice] {
        &self.vectors
    }
}

/// Expected dimension `C(N,r) - C(N,r-1)` (clamped at zero).
pub fn wr_dim(n: usize, r: usize) -> usize {
    let c = binomial(n, r);
    let p = if r == 0 { 0 } else { binomial(n, r - 1) };
    c.saturating_sub(p)
}

/// Builds an orthonormal basis of `W_r` by projecting the delta slices onto
/// `W_r` and extracting a spanning set with a rank-revealing SVD.
///
/// The projected columns form a redundant Parseval-style frame, so the rank
/// cut (singular values above `1e-8 * sigma_max`) separates the span cleanly
/// at desk scale.
pub fn wr_basis(n: usize, r: usize) -> Result<WrBasis> {
    validate_dim(n)?;
    if r > n {
        return Err(CubeError::RadiusOutOfRange { r, n });
    }
    if r == 0 {
        let mut w = SphereSlice::zeros(n, 0)?;
        w.values_mut()[0] = 1.0;
        return Ok(WrBasis { n, r, vectors: vec![w] });
    }
    let dim_expected = wr_dim(n, r);
    if dim_expected == 0 {
        return Ok(WrBasis { n, r, vectors: Vec::new() });
    }
    let size = binomial(n, r);
    let mut cols = DMatrix::<f64>::zeros(size, size);
    for j in 0..size {
        let mut delta = SphereSlice::zeros(n, r)?;
        delta.values_mut()[j] = 1.0;
        let proj = project_onto_wr(&delta)?;
        for (i, &v) in proj.values().iter().enumerate() {
            cols[(i, j)] = v;
        }
    }
    let svd = cols.svd(true, false);
    let u = svd.u.as_ref().expect("svd with u");
    let smax = svd.singular_values.max();
    let mut vectors = Vec::new();
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s > RANK_CUTOFF * smax {
            let col: Vec<f64> = u.column(j).iter().copied().collect();
            vectors.push(SphereSlice::from_values(n, r, col)?);
        }
    }
    Ok(WrBasis { n, r, vectors })
}

/// Checks membership `w in W_r` within [`MEMBERSHIP_TOL`].
pub fn check_membership(w: &SphereSlice) -> Result<()> {
    let full = w.embed()?;
    let ratio = apply_inner(&full).norm() / full.norm();
    if ratio > MEMBERSHIP_TOL {
        return Err(CubeError::NotInWr { r: w.r(), ratio, tol: MEMBERSHIP_TOL });
    }
    Ok(())
}

/// Relative residual of the ladder identity
/// `||A_- A_+^{k+1} w - m(r,k) A_+^k w|| / ||A_+^k w||`.
///
/// When the ladder has already terminated (`A_+^k w = 0`) the absolute
/// residual is returned instead.
pub fn theorem1_check(w: &SphereSlice, k: usize) -> Result<f64> {
    check_membership(w)?;
    let (n, r) = (w.n(), w.r());
    let base = outer_power(&w.embed()?, k);
    let mut resid = apply_inner(&apply_outer(&base));
    resid.axpy(-multiplier(n, r, k), &base);
    let denom = base.norm();
    if denom == 0.0 {
        Ok(resid.norm())
    } else {
        Ok(resid.norm() / denom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderStep {
    Raise,
    Lower,
}

/// Outcome of a word `B = A_-^{t_p} A_+^{s_p} ... A_-^{t_1} A_+^{s_1}` acting
/// on `W_r`: either identically zero, or a scalar multiple of `A_+^e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WordOutcome {
    Zero,
    Multiple { scale: f64, power: usize },
}

/// Evaluates a word of raising/lowering steps purely arithmetically over the
/// multipliers. Steps are applied left to right (first entry acts first).
///
/// The word collapses to zero when a partial composition lowers below `W_r`
/// or raises past power `N - r`. Raising past `N - 2r` yields a vector that
/// is already zero; the arithmetic reflects this through the vanishing
/// multiplier `m(r, N - 2r)` on the way back down.
pub fn word_action(n: usize, r: usize, word: &[(LadderStep, usize)]) -> WordOutcome {
    let cap = n - r;
    let mut power: usize = 0;
    let mut scale: f64 = 1.0;
    for &(step, count) in word {
        for _ in 0..count {
            match step {
                LadderStep::Raise => {
                    if power + 1 > cap {
                        return WordOutcome::Zero;
                    }
                    power += 1;
                }
                LadderStep::Lower => {
                    if power == 0 {
                        return WordOutcome::Zero;
                    }
                    scale *= multiplier(n, r, power - 1);
                    power -= 1;
                }
            }
        }
    }
    WordOutcome::Multiple { scale, power }
}
