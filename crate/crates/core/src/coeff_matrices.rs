//! Small dense coefficient matrices representing `A`, `HBDO`, and `P` on the
//! ladder spaces `V_r = { sum_k c_k A_+^k W : W in W_r }`.
//!
//! On coefficient vectors `[c_0, .., c_{N-r}]`, `A_+` is the down-shift with
//! ones on the first subdiagonal and `A_-` is the weighted up-shift with
//! `m(r,k)` on the first superdiagonal. The bandlimiter `P` is the Lagrange
//! polynomial `p` (which is 1 on eigenvalues `N - 2l`, `l <= K`, and 0 above)
//! evaluated in `M_A`.
//!
//! Since `A_+^k W = 0 once k > N - 2r`, only the leading block of size
//! `N - 2r + 1` (the "genuine" block) acts on nonzero vectors; trailing
//! coefficients multiply vanishing ladder vectors. The genuine block of `M_A`
//! is symmetrized by the diagonal similarity `d_k = sqrt(prod_{j<k} m(r,j))`,
//! which turns the polynomial evaluation into an exact 0/1 spectral filter
//! (the SPECTRAL route). The literal product route (POLYNOMIAL) is retained
//! for cross-checks at desk scale.

use crate::cube_core::validate_dim;
use crate::error::{CubeError, Result};
use crate::sphere_harmonics::{multiplier, norm_weight_sq};
use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorLabel {
    APlus,
    AMinus,
    A,
    Hbdo,
    P,
    QpqMinor,
    HbdoReduced,
}

impl std::fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OperatorLabel::APlus => "A+",
            OperatorLabel::AMinus => "A-",
            OperatorLabel::A => "A",
            OperatorLabel::Hbdo => "HBDO",
            OperatorLabel::P => "P",
            OperatorLabel::QpqMinor => "QPQ-minor",
            OperatorLabel::HbdoReduced => "HBDO-reduced",
        };
        f.write_str(s)
    }
}

/// Dense real square matrix acting on coefficient vectors over `W_r`.
///
/// The action convention is `d = M c`: column `k` expands the image of
/// `A_+^k W` in the ladder basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    pub n: usize,
    pub r: usize,
    pub label: OperatorLabel,
    pub entries: DMatrix<f64>,
}

impl CoeffMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Size of the leading block whose columns act on nonvanishing ladder
    /// vectors: `N - 2r + 1`, or 0 past the equator.
    pub fn genuine_dim(&self) -> usize {
        if 2 * self.r > self.n {
            0
        } else {
            self.n - 2 * self.r + 1
        }
    }

    /// Row-major CSV, `precision` significant digits, no header.
    pub fn to_csv(&self, precision: usize) -> String {
        matrix_to_csv(&self.entries, precision)
    }
}

pub fn matrix_to_csv(m: &DMatrix<f64>, precision: usize) -> String {
    let digits = precision.clamp(1, 17) - 1;
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.*e}", digits, m[(i, j)]));
        }
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(s: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in s.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|e| CubeError::Parse(e.to_string()))?);
    }
    if rows.is_empty() {
        return Err(CubeError::Parse("empty csv".into()));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(CubeError::Parse("ragged csv".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Shift matrix of `A_+`: ones on the first subdiagonal.
pub fn coeff_aplus(n: usize, r: usize) -> Result<CoeffMatrix> {
    validate_dim(n)?;
    if r > n {
        return Err(CubeError::RadiusOutOfRange { r, n });
    }
    let size = n - r + 1;
    let mut m = DMatrix::zeros(size, size);
    for k in 0..size - 1 {
        m[(k + 1, k)] = 1.0;
    }
    Ok(CoeffMatrix { n, r, label: OperatorLabel::APlus, entries: m })
}

/// Weighted up-shift of `A_-`: `m(r,k)` at `(k, k+1)`.
pub fn coeff_aminus(n: usize, r: usize) -> Result<CoeffMatrix> {
    validate_dim(n)?;
    if r > n {
        return Err(CubeError::RadiusOutOfRange { r, n });
    }
    let size = n - r + 1;
    let mut m = DMatrix::zeros(size, size);
    for k in 0..size - 1 {
        m[(k, k + 1)] = multiplier(n, r, k);
    }
    Ok(CoeffMatrix { n, r, label: OperatorLabel::AMinus, entries: m })
}

/// `M_A = M_{A_+} + M_{A_-}`.
pub fn coeff_a(n: usize, r: usize) -> Result<CoeffMatrix> {
    let plus = coeff_aplus(n, r)?;
    let minus = coeff_aminus(n, r)?;
    Ok(CoeffMatrix {
        n,
        r,
        label: OperatorLabel::A,
        entries: plus.entries + minus.entries,
    })
}

/// Normalizing constants of the Boolean difference operator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HbdoParams {
    pub alpha: f64,
    pub beta: f64,
}

impl HbdoParams {
    /// The parameter choice that makes `HBDO` commute with `Q_K`:
    /// `alpha = beta = 2 sqrt(K(K+1))`.
    ///
    /// This value both reproduces the reference entries of the HBDO
    /// coefficient matrix and zeroes the couplings between ladder indices
    /// `K` and `K+1`, block-diagonalizing `HBDO` with respect to `Q_K`.
    pub fn commuting(k_band: usize) -> Self {
        let v = 2.0 * ((k_band * (k_band + 1)) as f64).sqrt();
        HbdoParams { alpha: v, beta: v }
    }
}

/// Tridiagonal coefficient matrix of `HBDO = T(alpha - L)T + beta L` on `V_r`:
/// the lower-right minor, re-based to 0, of the size-(N+1) matrix with
/// diagonal `2l(alpha - N) + beta N`, superdiagonal
/// `(2 sqrt(l(l-1)) - beta) m(r, l-1-r)`, and subdiagonal
/// `2 sqrt(l(l+1)) - beta`.
pub fn hbdo_matrix(n: usize, r: usize, params: HbdoParams) -> Result<CoeffMatrix> {
    validate_dim(n)?;
    if r > n {
        return Err(CubeError::RadiusOutOfRange { r, n });
    }
    let (alpha, beta) = (params.alpha, params.beta);
    let size = n - r + 1;
    let nf = n as f64;
    let mut m = DMatrix::zeros(size, size);
    for i in 0..size {
        let l = (i + r) as f64;
        m[(i, i)] = 2.0 * l * (alpha - nf) + beta * nf;
        if i + 1 < size {
            // row k = l - 1, column l: entry (2 sqrt(l(l-1)) - beta) m(r, l-1-r)
            let lc = l + 1.0;
            m[(i, i + 1)] = (2.0 * (lc * (lc - 1.0)).sqrt() - beta) * multiplier(n, r, i);
        }
        if i > 0 {
            // row k = l + 1, column l
            let lc = l - 1.0;
            m[(i, i - 1)] = 2.0 * (lc * (lc + 1.0)).sqrt() - beta;
        }
    }
    Ok(CoeffMatrix { n, r, label: OperatorLabel::Hbdo, entries: m })
}

/// Lagrange interpolating polynomial on the adjacency spectrum:
/// `p(N - 2j) = 1` for `j <= k_band`, `0` for `k_band < j <= n`.
///
/// Each product is accumulated over nodes in ascending distance from the
/// evaluation point's anchor node.
pub fn lagrange_p(n: usize, k_band: usize, x: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..=k_band {
        let mut js: Vec<usize> = (0..=n).filter(|&j| j != k).collect();
        js.sort_by_key(|&j| j.abs_diff(k));
        let mut prod = 1.0;
        for j in js {
            prod *= (x - (n as f64 - 2.0 * j as f64)) / (2.0 * (j as f64 - k as f64));
        }
        total += prod;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Route {
    Spectral,
    Polynomial,
}

/// Result of computing `M_{P,r}`, with any conditioning warnings raised
/// along the way.
#[derive(Debug, Clone)]
pub struct CoeffP {
    pub matrix: CoeffMatrix,
    pub route: Route,
    pub warnings: Vec<String>,
}

/// The coefficient matrix `M_{P,r}` of the bandlimiter on `V_r`.
///
/// POLYNOMIAL substitutes `M_A` into the Lagrange polynomial literally, one
/// product per interpolation node, factors ordered by ascending node
/// distance. SPECTRAL diagonalizes the symmetrized genuine block, snaps each
/// eigenvalue to the known grid `N - 2l`, applies the exact 0/1 filter, and
/// maps back; the trailing block (columns acting on vanishing ladder vectors)
/// is filled from the literal product so both routes represent the same
/// matrix function of `M_A`.
pub fn coeff_p(n: usize, k_band: usize, r: usize, route: Route) -> Result<CoeffP> {
    validate_dim(n)?;
    if r > n {
        return Err(CubeError::RadiusOutOfRange { r, n });
    }
    if k_band > n {
        return Err(CubeError::RadiusOutOfRange { r: k_band, n });
    }
    match route {
        Route::Polynomial => {
            let entries = polynomial_route(n, k_band, r)?;
            Ok(CoeffP {
                matrix: CoeffMatrix { n, r, label: OperatorLabel::P, entries },
                route: Route::Polynomial,
                warnings: Vec::new(),
            })
        }
        Route::Spectral => {
            let mut warnings = Vec::new();
            if 2 * r > n {
                // no genuine block to symmetrize: every m(r,j) <= 0
                warnings.push(format!(
                    "symmetrization inadmissible for r = {r} > n/2; \
                     falling back to the literal polynomial route (poorly conditioned)"
                ));
                let entries = polynomial_route(n, k_band, r)?;
                return Ok(CoeffP {
                    matrix: CoeffMatrix { n, r, label: OperatorLabel::P, entries },
                    route: Route::Polynomial,
                    warnings,
                });
            }
            let size = n - r + 1;
            let g = n - 2 * r + 1;
            let (pj, d) = spectral_filter(n, k_band, r)?;
            let mut entries = if g < size {
                // trailing block from the literal product; the genuine block
                // is overwritten below
                polynomial_route(n, k_band, r)?
            } else {
                DMatrix::zeros(size, size)
            };
            for i in 0..g {
                for j in 0..g {
                    entries[(i, j)] = pj[(i, j)] * d[j] / d[i];
                }
                for j in g..size {
                    // exact zeros: M_A is block-triangular across the split
                    entries[(i, j)] = 0.0;
                }
            }
            Ok(CoeffP {
                matrix: CoeffMatrix { n, r, label: OperatorLabel::P, entries },
                route: Route::Spectral,
                warnings,
            })
        }
    }
}

/// `p(J)` for the symmetrized genuine block, plus the similarity weights
/// `d_k = sqrt(prod_{j<k} m(r,j))`.
fn spectral_filter(n: usize, k_band: usize, r: usize) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let g = n - 2 * r + 1;
    let mut j_mat = DMatrix::zeros(g, g);
    for k in 0..g - 1 {
        let off = multiplier(n, r, k).sqrt();
        j_mat[(k, k + 1)] = off;
        j_mat[(k + 1, k)] = off;
    }
    let eig = SymmetricEigen::new(j_mat);
    let mut filtered = vec![0.0; g];
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        // spectrum is exactly {N - 2l : l = r..N-r}; snap and filter
        let l = ((n as f64 - lam) / 2.0).round();
        let dist = (lam - (n as f64 - 2.0 * l)).abs();
        if dist > 0.5 {
            return Err(CubeError::SnapFailure { value: lam, dist });
        }
        filtered[i] = if (l as usize) <= k_band { 1.0 } else { 0.0 };
    }
    let u = &eig.eigenvectors;
    let mut pj = DMatrix::zeros(g, g);
    for a in 0..g {
        for b in 0..g {
            let mut acc = 0.0;
            for (i, &f) in filtered.iter().enumerate() {
                acc += f * u[(a, i)] * u[(b, i)];
            }
            pj[(a, b)] = acc;
        }
    }
    let d: Vec<f64> = (0..g).map(|k| norm_weight_sq(n, r, k).sqrt()).collect();
    Ok((pj, d))
}

fn polynomial_route(n: usize, k_band: usize, r: usize) -> Result<DMatrix<f64>> {
    let size = n - r + 1;
    let ma = coeff_a(n, r)?.entries;
    let eye = DMatrix::<f64>::identity(size, size);
    let mut total = DMatrix::<f64>::zeros(size, size);
    for k in 0..=k_band {
        let mut js: Vec<usize> = (0..=n).filter(|&j| j != k).collect();
        js.sort_by_key(|&j| j.abs_diff(k));
        let mut prod = eye.clone();
        for j in js {
            let node = n as f64 - 2.0 * j as f64;
            let factor = (&ma - node * &eye) / (2.0 * (j as f64 - k as f64));
            prod *= factor;
        }
        total += prod;
    }
    Ok(total)
}

/// Diagonal similarity turning a tridiagonal matrix with positive
/// off-diagonal products into a symmetric one. For `M_A`-shaped input
/// (unit subdiagonal, `m(r,k)` superdiagonal) this is
/// `d_k = sqrt(prod_{j<k} m(r,j))` and the result has `sqrt(m(r,k))` on both
/// off-diagonals. Couplings where both entries vanish simply decouple.
pub fn symmetrize(m: &CoeffMatrix) -> Result<(CoeffMatrix, Vec<f64>)> {
    let size = m.dim();
    let a = &m.entries;
    // require tridiagonal input
    for i in 0..size {
        for j in 0..size {
            if i.abs_diff(j) > 1 && a[(i, j)] != 0.0 {
                return Err(CubeError::NotSymmetrizable);
            }
        }
    }
    let scale = a.amax().max(1.0);
    let mut d = vec![1.0; size];
    let mut out = DMatrix::zeros(size, size);
    for i in 0..size {
        out[(i, i)] = a[(i, i)];
    }
    for k in 0..size.saturating_sub(1) {
        let sub = a[(k + 1, k)];
        let sup = a[(k, k + 1)];
        let tiny = 1e-14 * scale;
        if sub.abs() <= tiny && sup.abs() <= tiny {
            d[k + 1] = d[k];
            continue;
        }
        let prod = sub * sup;
        if prod <= 0.0 {
            return Err(CubeError::SymmetrizeInadmissible { r: m.r, k, value: sup });
        }
        d[k + 1] = d[k] * (sup / sub).sqrt();
        let off = sub.signum() * prod.sqrt();
        out[(k, k + 1)] = off;
        out[(k + 1, k)] = off;
    }
    Ok((
        CoeffMatrix { n: m.n, r: m.r, label: m.label, entries: out },
        d,
    ))
}

/// Top-left `size x size` block; bandlimiter minors become QPQ coefficient
/// matrices, HBDO minors become the reduced commuting-case matrix.
pub fn principal_minor(m: &CoeffMatrix, size: usize) -> Result<CoeffMatrix> {
    if size == 0 || size > m.dim() {
        return Err(CubeError::MinorOutOfRange { size, dim: m.dim() });
    }
    let label = match m.label {
        OperatorLabel::P => OperatorLabel::QpqMinor,
        OperatorLabel::Hbdo => OperatorLabel::HbdoReduced,
        other => other,
    };
    Ok(CoeffMatrix {
        n: m.n,
        r: m.r,
        label,
        entries: m.entries.view((0, 0), (size, size)).into_owned(),
    })
}
