//! Eigensolvers for the small coefficient matrices, and assembly of the
//! structured eigenspace reports for `QPQ`, `PQP`, and `HBDO`.
//!
//! Every eigenvector found here is a coefficient vector `c` over the ladder
//! basis `{A_+^k w}`; [`lift`] materializes the corresponding cube signal.
//! Because `||A_+^k w||^2 = prod_{j<k} m(r,j)` for unit `w in W_r`, the
//! similarity weights `d_k` convert between coefficient vectors and
//! orthonormal coordinates, so eigenvectors computed through the symmetrized
//! matrix lift to unit-norm cube signals for free.

use crate::coeff_matrices::{
    coeff_p, hbdo_matrix, principal_minor, CoeffMatrix, HbdoParams, Route,
};
use crate::cube_core::{binomial, validate_dim, CubeSignal, SphereSlice};
use crate::error::{CubeError, Result};
use crate::hadamard::wht;
use crate::sphere_harmonics::{norm_weight_sq, outer_power, wr_basis, wr_dim};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// Eigenvalues closer than this relative gap are flagged as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;

const SYMMETRY_TOL: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-9;

/// One eigenpair of a coefficient matrix: `M c = lambda c` with the
/// verification residual `||M c - lambda c|| / ||c||`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    pub coeffs: Vec<f64>,
    pub residual: f64,
}

fn residual_of(m: &DMatrix<f64>, lambda: f64, c: &DVector<f64>) -> f64 {
    let r = m * c - lambda * c;
    r.norm() / c.norm()
}

fn sort_desc(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| b.lambda.partial_cmp(&a.lambda).unwrap());
}

/// Eigenpairs of a small dense matrix, descending by eigenvalue.
///
/// Symmetric input goes straight to the symmetric solver. Tridiagonal input
/// with positive (or jointly vanishing) off-diagonal products is solved
/// through its diagonal symmetrization, which both guarantees real
/// eigenvalues and recovers well-scaled eigenvectors. Anything else falls
/// back to a general dense solve; a genuinely complex eigenvalue is an error.
pub fn eig_small(m: &CoeffMatrix) -> Result<Vec<EigenPair>> {
    let a = &m.entries;
    let asym = (a - a.transpose()).amax();
    if asym <= SYMMETRY_TOL * a.amax().max(1.0) {
        let eig = SymmetricEigen::new(a.clone());
        let mut pairs: Vec<EigenPair> = (0..a.nrows())
            .map(|i| {
                let c = eig.eigenvectors.column(i).into_owned();
                EigenPair {
                    lambda: eig.eigenvalues[i],
                    residual: residual_of(a, eig.eigenvalues[i], &c),
                    coeffs: c.iter().copied().collect(),
                }
            })
            .collect();
        sort_desc(&mut pairs);
        return Ok(pairs);
    }
    if let Ok((j, d)) = crate::coeff_matrices::symmetrize(m) {
        let eig = SymmetricEigen::new(j.entries);
        let mut pairs: Vec<EigenPair> = (0..a.nrows())
            .map(|i| {
                let c = DVector::from_fn(a.nrows(), |k, _| eig.eigenvectors[(k, i)] / d[k]);
                EigenPair {
                    lambda: eig.eigenvalues[i],
                    residual: residual_of(a, eig.eigenvalues[i], &c),
                    coeffs: c.iter().copied().collect(),
                }
            })
            .collect();
        sort_desc(&mut pairs);
        return Ok(pairs);
    }
    eig_general(a)
}

/// General dense fallback: Schur eigenvalues, then an SVD nullspace per
/// eigenvalue cluster. Complex eigenvalues beyond tolerance are rejected.
fn eig_general(a: &DMatrix<f64>) -> Result<Vec<EigenPair>> {
    let scale = a.amax().max(1.0);
    let complex = a.clone().complex_eigenvalues();
    let mut lambdas: Vec<f64> = Vec::with_capacity(complex.len());
    for z in complex.iter() {
        if z.im.abs() > IMAG_TOL * scale {
            return Err(CubeError::ComplexEigenvalue { value: z.re, imag: z.im });
        }
        lambdas.push(z.re);
    }
    lambdas.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // cluster nearby eigenvalues, then pull one nullspace vector per member
    let mut pairs = Vec::with_capacity(lambdas.len());
    let mut i = 0;
    while i < lambdas.len() {
        let mut j = i + 1;
        while j < lambdas.len() && (lambdas[j] - lambdas[j - 1]).abs() <= 1e-9 * scale {
            j += 1;
        }
        let count = j - i;
        let lam: f64 = lambdas[i..j].iter().sum::<f64>() / count as f64;
        let shifted = a - lam * DMatrix::<f64>::identity(a.nrows(), a.nrows());
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.as_ref().expect("svd v_t");
        // rows of V^T with the smallest singular values span the nullspace
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&x, &y| {
            svd.singular_values[x]
                .partial_cmp(&svd.singular_values[y])
                .unwrap()
        });
        for &row in order.iter().take(count) {
            let c = vt.row(row).transpose().into_owned();
            pairs.push(EigenPair {
                lambda: lam,
                residual: residual_of(a, lam, &c),
                coeffs: c.iter().copied().collect(),
            });
        }
        i = j;
    }
    sort_desc(&mut pairs);
    Ok(pairs)
}

/// Eigenpairs of a matrix known to be symmetrized by the explicit diagonal
/// `d`: solves `J = D M D^{-1}` symmetrically and maps eigenvectors back
/// through `D^{-1}`, so unit eigenvectors of `J` become coefficient vectors
/// with unit-norm ladder lifts.
pub fn eig_small_with_similarity(m: &CoeffMatrix, d: &[f64]) -> Result<Vec<EigenPair>> {
    let size = m.dim();
    if d.len() != size {
        return Err(CubeError::Config(format!(
            "similarity weights have length {} for matrix of dimension {size}",
            d.len()
        )));
    }
    let a = &m.entries;
    let j = DMatrix::from_fn(size, size, |i, k| a[(i, k)] * d[i] / d[k]);
    let asym = (&j - j.transpose()).amax();
    if asym > 1e-8 * j.amax().max(1.0) {
        return Err(CubeError::NotSymmetric(asym));
    }
    let j = (&j + j.transpose()) * 0.5;
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<EigenPair> = (0..size)
        .map(|i| {
            let c = DVector::from_fn(size, |k, _| eig.eigenvectors[(k, i)] / d[k]);
            EigenPair {
                lambda: eig.eigenvalues[i],
                residual: residual_of(a, eig.eigenvalues[i], &c),
                coeffs: c.iter().copied().collect(),
            }
        })
        .collect();
    sort_desc(&mut pairs);
    Ok(pairs)
}

/// Ladder lift `sum_k c_k A_+^k w`.
pub fn lift(w: &SphereSlice, coeffs: &[f64]) -> Result<CubeSignal> {
    let mut out = CubeSignal::zeros(w.n())?;
    let mut cur = w.embed()?;
    for (k, &c) in coeffs.iter().enumerate() {
        if k > 0 {
            cur = outer_power(&cur, 1);
        }
        out.axpy(c, &cur);
    }
    Ok(out)
}

/// Eigenpairs of one level of a QPQ or HBDO eigenspace report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelReport {
    pub r: usize,
    pub multiplicity: usize,
    pub eigenvalues: Vec<f64>,
    pub coeff_vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Identities {
    pub dim_k: usize,
    pub counted: usize,
}

/// Full structured eigendecomposition of `QPQ` on the Hamming ball:
/// per-level eigenvalues with multiplicity `dim W_r` and coefficient vectors,
/// plus the counting identity `sum_r s_r dim W_r = dim(K)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenspaceReport {
    pub n: usize,
    pub k: usize,
    pub levels: Vec<LevelReport>,
    pub identities: Identities,
}

/// Number of ladder coefficients of a QPQ eigenvector at level `r`:
/// the ball caps the ladder at `K - r`, the cube itself at `N - 2r`.
pub fn qpq_minor_size(n: usize, k_band: usize, r: usize) -> usize {
    (k_band - r).min(n - 2 * r) + 1
}

/// Structured eigendecomposition of `QPQ` for the ball of radius `k_band`.
pub fn qpq_eigenspaces(n: usize, k_band: usize) -> Result<EigenspaceReport> {
    validate_dim(n)?;
    if k_band > n {
        return Err(CubeError::RadiusOutOfRange { r: k_band, n });
    }
    let dim_k: usize = (0..=k_band).map(|j| binomial(n, j)).sum();
    let mut levels = Vec::new();
    let mut counted = 0usize;
    for r in 0..=k_band.min(n / 2) {
        let mult = wr_dim(n, r);
        if mult == 0 {
            continue;
        }
        let p = coeff_p(n, k_band, r, Route::Spectral)?;
        let s = qpq_minor_size(n, k_band, r);
        let minor = principal_minor(&p.matrix, s)?;
        let d: Vec<f64> = (0..s).map(|k| norm_weight_sq(n, r, k).sqrt()).collect();
        let pairs = eig_small_with_similarity(&minor, &d)?;
        counted += pairs.len() * mult;
        levels.push(LevelReport {
            r,
            multiplicity: mult,
            eigenvalues: pairs.iter().map(|p| p.lambda).collect(),
            coeff_vectors: pairs.iter().map(|p| p.coeffs.clone()).collect(),
        });
    }
    Ok(EigenspaceReport {
        n,
        k: k_band,
        levels,
        identities: Identities { dim_k, counted },
    })
}

/// A QPQ eigenvector lifted to the cube, together with its image under the
/// unnormalized Hadamard transform, which is a PQP eigenvector at the same
/// eigenvalue.
#[derive(Debug, Clone)]
pub struct LiftedEigenvector {
    pub r: usize,
    pub lambda: f64,
    pub qpq_vector: CubeSignal,
    pub pqp_vector: CubeSignal,
}

/// Materializes every eigenvector of the report: one lift per harmonic basis
/// vector per eigenvalue. `2^{n/2} Hbar v` gives the PQP partner.
pub fn pqp_eigenvectors(report: &EigenspaceReport) -> Result<Vec<LiftedEigenvector>> {
    let n = report.n;
    let amp = 2f64.powf(n as f64 / 2.0);
    let mut out = Vec::new();
    for level in &report.levels {
        let basis = wr_basis(n, level.r)?;
        for (lam, coeffs) in level.eigenvalues.iter().zip(&level.coeff_vectors) {
            for w in basis.vectors() {
                let v = lift(w, coeffs)?;
                let mut hv = wht(&v);
                hv.scale(amp);
                out.push(LiftedEigenvector {
                    r: level.r,
                    lambda: *lam,
                    qpq_vector: v,
                    pqp_vector: hv,
                });
            }
        }
    }
    Ok(out)
}

/// Eigenpairs of `HBDO` restricted to the ladder over `W_r`, solved on the
/// genuine block, with a degeneracy flag for near-coincident eigenvalues.
#[derive(Debug, Clone)]
pub struct HbdoLevel {
    pub r: usize,
    pub multiplicity: usize,
    pub pairs: Vec<EigenPair>,
    pub degenerate: bool,
}

pub fn hbdo_eigenspaces(n: usize, r: usize, params: HbdoParams) -> Result<HbdoLevel> {
    validate_dim(n)?;
    if r > n {
        return Err(CubeError::RadiusOutOfRange { r, n });
    }
    let mult = wr_dim(n, r);
    let m = hbdo_matrix(n, r, params)?;
    let g = m.genuine_dim();
    if mult == 0 || g == 0 {
        return Ok(HbdoLevel { r, multiplicity: mult, pairs: Vec::new(), degenerate: false });
    }
    let block = principal_minor(&m, g)?;
    let pairs = eig_small(&block)?;
    let scale = pairs
        .iter()
        .map(|p| p.lambda.abs())
        .fold(1.0f64, f64::max);
    let degenerate = pairs
        .windows(2)
        .any(|w| (w[0].lambda - w[1].lambda).abs() < DEGENERACY_GAP * scale);
    Ok(HbdoLevel { r, multiplicity: mult, pairs, degenerate })
}
