//! Dense brute-force oracle: every operator materialized literally from its
//! definition on the full `2^n`-dimensional vertex space, with no shared code
//! paths with the structured computations it checks.

use crate::cube_core::{distance, validate_dim, weight, CubeSignal};
use crate::eigensolve::{pqp_eigenvectors, EigenspaceReport};
use crate::error::{CubeError, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Hard cap for dense materialization (`4^n` doubles per operator).
pub const ORACLE_MAX_DIMENSION: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DenseLabel {
    A,
    L,
    Q,
    P,
    Qpq,
    Pqp,
    Hbdo,
    Bdo,
}

#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub n: usize,
    pub label: DenseLabel,
    pub matrix: DMatrix<f64>,
}

fn validate_oracle_dim(n: usize) -> Result<()> {
    validate_dim(n)?;
    if n > ORACLE_MAX_DIMENSION {
        return Err(CubeError::OracleDimensionTooLarge(n));
    }
    Ok(())
}

/// `A(R,S) = 1` iff Hamming distance 1, from the literal definition.
fn dense_a(n: usize) -> DMatrix<f64> {
    let size = 1usize << n;
    DMatrix::from_fn(size, size, |i, j| {
        if distance(i as u32, j as u32) == 1 { 1.0 } else { 0.0 }
    })
}

fn dense_q(n: usize, k_band: usize) -> DMatrix<f64> {
    let size = 1usize << n;
    DMatrix::from_fn(size, size, |i, j| {
        if i == j && weight(i as u32) <= k_band { 1.0 } else { 0.0 }
    })
}

/// Normalized Hadamard matrix `Hbar(R,S) = (-1)^{|R and S|} / 2^{n/2}`.
fn dense_hbar(n: usize) -> DMatrix<f64> {
    let size = 1usize << n;
    let scale = 2f64.powf(-(n as f64) / 2.0);
    DMatrix::from_fn(size, size, |i, j| {
        let sign = if weight((i & j) as u32) % 2 == 0 { 1.0 } else { -1.0 };
        sign * scale
    })
}

fn dense_t(n: usize) -> DMatrix<f64> {
    let size = 1usize << n;
    DMatrix::from_fn(size, size, |i, j| {
        if i == j { (2.0 * weight(i as u32) as f64).sqrt() } else { 0.0 }
    })
}

fn dense_l(n: usize) -> DMatrix<f64> {
    let size = 1usize << n;
    DMatrix::<f64>::identity(size, size) * n as f64 - dense_a(n)
}

/// Parameters mirrored from the structured side; re-declared locally so the
/// oracle depends only on operator definitions.
pub use crate::coeff_matrices::HbdoParams;

/// Builds a dense operator from its definition.
pub fn build(label: DenseLabel, n: usize, k_band: usize, params: HbdoParams) -> Result<DenseOperator> {
    validate_oracle_dim(n)?;
    if k_band > n {
        return Err(CubeError::RadiusOutOfRange { r: k_band, n });
    }
    let matrix = match label {
        DenseLabel::A => dense_a(n),
        DenseLabel::L => dense_l(n),
        DenseLabel::Q => dense_q(n, k_band),
        DenseLabel::P => {
            let h = dense_hbar(n);
            &h * dense_q(n, k_band) * &h
        }
        DenseLabel::Qpq => {
            let h = dense_hbar(n);
            let q = dense_q(n, k_band);
            let p = &h * &q * &h;
            &q * p * &q
        }
        DenseLabel::Pqp => {
            let h = dense_hbar(n);
            let q = dense_q(n, k_band);
            let p = &h * &q * &h;
            &p * &q * &p
        }
        DenseLabel::Hbdo => {
            let t = dense_t(n);
            let l = dense_l(n);
            let size = 1usize << n;
            let inner = DMatrix::<f64>::identity(size, size) * params.alpha - &l;
            &t * inner * &t + l * params.beta
        }
        DenseLabel::Bdo => {
            let h = dense_hbar(n);
            let t = dense_t(n);
            let d = &h * &t * &h;
            let t2 = &t * &t;
            let size = 1usize << n;
            let inner = DMatrix::<f64>::identity(size, size) * params.alpha - &t2;
            &d * inner * &d + t2 * params.beta
        }
    };
    Ok(DenseOperator { n, label, matrix })
}

/// Ascending eigenvalues of a symmetric dense operator.
///
/// Uses an in-house Householder tridiagonalization + implicit-shift QL
/// solver: the general-purpose symmetric solver in the linear-algebra crate
/// fails to converge on large projection-like operators with massively
/// repeated eigenvalues (for example dense QPQ at n = 8), which are exactly
/// the oracle's targets.
pub fn dense_spectrum(op: &DenseOperator) -> Result<Vec<f64>> {
    let a = &op.matrix;
    let asym = (a - a.transpose()).amax();
    if asym > 1e-9 * a.amax().max(1.0) {
        return Err(CubeError::NotSymmetric(asym));
    }
    let sym = (a + a.transpose()) * 0.5;
    let (d, e) = householder_tridiagonalize(&sym);
    let mut eigs = ql_implicit_eigenvalues(d, e)?;
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eigs)
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// eigenvalues-only variant: returns the diagonal `d` and subdiagonal `e`
/// (with `e[0] = 0`).
fn householder_tridiagonalize(m: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    for i in (1..n).rev() {
        let l = i; // the row prefix a[i][0..l] is eliminated
        let mut h = 0.0;
        if l > 1 {
            let scale: f64 = (0..l).map(|k| a[(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[(i, l - 1)];
            } else {
                for k in 0..l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let mut f = a[(i, l - 1)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l - 1)] = f - g;
                f = 0.0;
                for j in 0..l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in j + 1..l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let delta = f * e[k] + g * a[(i, k)];
                        a[(j, k)] -= delta;
                    }
                }
            }
        } else {
            e[i] = a[(i, l - 1)];
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[(i, i)];
    }
    (d, e)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix; consumes
/// the diagonal/subdiagonal from [`householder_tridiagonalize`].
fn ql_implicit_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    // shift the subdiagonal so e[i] couples d[i] and d[i+1]
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(CubeError::Config(
                    "tridiagonal QL iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // deflate: an eigenvalue has converged in the middle
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplicityMismatch {
    pub lambda: f64,
    pub structured: usize,
    pub dense: usize,
}

/// Outcome of checking a structured eigenspace report against the dense
/// operator: spectrum deviation as sorted multisets (structured padded with
/// structural zeros to `2^n`), per-cluster multiplicity comparison, and the
/// worst residual of a lifted eigenvector under the dense matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub k: usize,
    pub dim_k: usize,
    pub counted: usize,
    pub max_spectrum_deviation: f64,
    pub multiplicity_mismatches: Vec<MultiplicityMismatch>,
    pub max_lift_residual: f64,
}

const CLUSTER_TOL: f64 = 1e-7;

pub fn compare(report: &EigenspaceReport, dense: &DenseOperator) -> Result<ComparisonReport> {
    let n = report.n;
    if dense.n != n {
        return Err(CubeError::Config(format!(
            "report is for n = {n}, dense operator for n = {}",
            dense.n
        )));
    }
    let size = 1usize << n;
    let mut structured: Vec<f64> = Vec::with_capacity(size);
    for level in &report.levels {
        for &lam in &level.eigenvalues {
            for _ in 0..level.multiplicity {
                structured.push(lam);
            }
        }
    }
    structured.resize(size, 0.0); // structural zeros outside the ball
    structured.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let dense_eigs = dense_spectrum(dense)?;

    let max_spectrum_deviation = structured
        .iter()
        .zip(&dense_eigs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    // cluster the structured multiset and count dense eigenvalues per window
    let mut multiplicity_mismatches = Vec::new();
    let mut i = 0;
    while i < structured.len() {
        let mut j = i + 1;
        while j < structured.len() && structured[j] - structured[j - 1] <= CLUSTER_TOL {
            j += 1;
        }
        let lo = structured[i] - CLUSTER_TOL;
        let hi = structured[j - 1] + CLUSTER_TOL;
        let dense_count = dense_eigs.iter().filter(|&&e| e >= lo && e <= hi).count();
        if dense_count != j - i {
            multiplicity_mismatches.push(MultiplicityMismatch {
                lambda: structured[i..j].iter().sum::<f64>() / (j - i) as f64,
                structured: j - i,
                dense: dense_count,
            });
        }
        i = j;
    }

    let mut max_lift_residual = 0.0f64;
    for le in pqp_eigenvectors(report)? {
        let v = DVector::from_column_slice(le.qpq_vector.values());
        let resid = (&dense.matrix * &v - le.lambda * &v).norm() / v.norm();
        max_lift_residual = max_lift_residual.max(resid);
    }

    Ok(ComparisonReport {
        n,
        k: report.k,
        dim_k: report.identities.dim_k,
        counted: report.identities.counted,
        max_spectrum_deviation,
        multiplicity_mismatches,
        max_lift_residual,
    })
}

fn commutator_norm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a * b - b * a).norm()
}

/// Frobenius norms of the two headline commutators: `[HBDO, Q]` with the
/// commuting parameter choice (should vanish), and `[BDO, PQP]` (should not).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoncommutationWitness {
    pub hbdo_q_commuting: f64,
    pub bdo_pqp: f64,
}

pub fn noncommutation_witness(n: usize, k_band: usize) -> Result<NoncommutationWitness> {
    let params = HbdoParams::commuting(k_band);
    let hbdo = build(DenseLabel::Hbdo, n, k_band, params)?;
    let q = build(DenseLabel::Q, n, k_band, params)?;
    let bdo = build(DenseLabel::Bdo, n, k_band, params)?;
    let pqp = build(DenseLabel::Pqp, n, k_band, params)?;
    Ok(NoncommutationWitness {
        hbdo_q_commuting: commutator_norm(&hbdo.matrix, &q.matrix),
        bdo_pqp: commutator_norm(&bdo.matrix, &pqp.matrix),
    })
}

/// Applies a dense operator to a cube signal (convenience for tests and the
/// verification command).
pub fn apply(op: &DenseOperator, x: &CubeSignal) -> Result<CubeSignal> {
    let v = DVector::from_column_slice(x.values());
    let out = &op.matrix * v;
    CubeSignal::from_values(x.n(), out.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_matrices::lagrange_p;
    use crate::cube_core::{binomial, DyadicOrder};
    use crate::eigensolve::qpq_eigenspaces;
    use nalgebra::SymmetricEigen;

    const P0: HbdoParams = HbdoParams { alpha: 0.0, beta: 0.0 };

    #[test]
    fn bandlimiter_trace_counts_ball() {
        let p = build(DenseLabel::P, 8, 3, P0).unwrap();
        let dim_k: usize = (0..=3).map(|j| binomial(8, j)).sum();
        assert_eq!(dim_k, 93);
        assert!((p.matrix.trace() - 93.0).abs() < 1e-8);
    }

    #[test]
    fn bandlimiter_spectrum_is_zero_one() {
        let p = build(DenseLabel::P, 6, 2, P0).unwrap();
        let eigs = dense_spectrum(&p).unwrap();
        let ones = eigs.iter().filter(|&&e| (e - 1.0).abs() < 1e-9).count();
        let zeros = eigs.iter().filter(|&&e| e.abs() < 1e-9).count();
        assert_eq!(ones + zeros, eigs.len());
        let dim_k: usize = (0..=2).map(|j| binomial(6, j)).sum();
        assert_eq!(ones, dim_k);
    }

    #[test]
    fn bandlimiter_two_constructions_agree() {
        // conjugated cutoff vs spectral filter of the adjacency operator
        let n = 6;
        let k = 2;
        let p1 = build(DenseLabel::P, n, k, P0).unwrap().matrix;
        let a = dense_a(n);
        let eig = SymmetricEigen::new(a);
        let size = 1usize << n;
        let mut p2 = DMatrix::<f64>::zeros(size, size);
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            let f = lagrange_p(n, k, lam).round(); // snaps to the 0/1 filter
            if f != 0.0 {
                let u = eig.eigenvectors.column(i);
                p2 += f * &u * u.transpose();
            }
        }
        assert!((p1 - p2).amax() < 1e-8);
    }

    #[test]
    fn laplacian_spectrum_n3() {
        let l = build(DenseLabel::L, 3, 0, P0).unwrap();
        let eigs = dense_spectrum(&l).unwrap();
        let want = [0.0, 2.0, 2.0, 2.0, 4.0, 4.0, 4.0, 6.0];
        for (a, b) in eigs.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn adjacency_block_structure_in_dyadic_order() {
        // permuted to dyadic order, A is block-bidiagonal over spheres; the
        // (r, r+1) block has (r+1) C(n, r+1) ones
        let n = 6;
        let a = dense_a(n);
        let order = DyadicOrder::new(n).unwrap();
        let size = 1usize << n;
        let pa = DMatrix::from_fn(size, size, |i, j| {
            a[(order.mask_of(i) as usize, order.mask_of(j) as usize)]
        });
        let sphere_start = |r: usize| -> usize { (0..r).map(|k| binomial(n, k)).sum() };
        for r in 0..n {
            let (r0, r1, r2) = (sphere_start(r), sphere_start(r + 1), sphere_start(r + 2));
            let mut count = 0;
            for i in r0..r1 {
                for j in r1..r2 {
                    if pa[(i, j)] != 0.0 {
                        count += 1;
                    }
                }
            }
            assert_eq!(count, (r + 1) * binomial(n, r + 1), "block ({r},{})", r + 1);
            // nothing two or more spheres away
            for i in r0..r1 {
                for j in r2..size {
                    assert_eq!(pa[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn bdo_is_hadamard_conjugate_of_hbdo() {
        let n = 6;
        let params = HbdoParams { alpha: 3.5, beta: 1.25 };
        let hbdo = build(DenseLabel::Hbdo, n, 0, params).unwrap().matrix;
        let bdo = build(DenseLabel::Bdo, n, 0, params).unwrap().matrix;
        let h = dense_hbar(n);
        let conj = &h * bdo * &h;
        assert!((conj - hbdo).amax() < 1e-9);
    }

    #[test]
    fn structured_qpq_matches_dense() {
        for (n, k) in [(6usize, 2usize), (8, 3), (5, 4)] {
            let report = qpq_eigenspaces(n, k).unwrap();
            let dense = build(DenseLabel::Qpq, n, k, P0).unwrap();
            let cmp = compare(&report, &dense).unwrap();
            assert!(cmp.max_spectrum_deviation <= 1e-7, "n={n} K={k}: {}", cmp.max_spectrum_deviation);
            assert!(cmp.multiplicity_mismatches.is_empty(), "n={n} K={k}");
            assert!(cmp.max_lift_residual <= 1e-8, "n={n} K={k}: {}", cmp.max_lift_residual);
            assert_eq!(cmp.counted, cmp.dim_k);
        }
    }

    #[test]
    fn commutation_witness_separates_the_two_operators() {
        let w = noncommutation_witness(6, 2).unwrap();
        assert!(w.hbdo_q_commuting <= 1e-9, "{}", w.hbdo_q_commuting);
        assert!(w.bdo_pqp > 1e-3, "{}", w.bdo_pqp);
    }

    #[test]
    fn oracle_cap_enforced() {
        assert!(matches!(
            build(DenseLabel::A, 13, 0, P0),
            Err(CubeError::OracleDimensionTooLarge(13))
        ));
    }

    #[test]
    fn tridiagonal_ql_matches_reference_solver() {
        // deterministic pseudo-random symmetric matrices, cross-checked
        // against the generic solver where it converges
        let mut state = 0x1234_5678u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for size in [1usize, 2, 3, 8, 17, 40] {
            let raw = DMatrix::from_fn(size, size, |_, _| next());
            let sym = (&raw + raw.transpose()) * 0.5;
            let (d, e) = householder_tridiagonalize(&sym);
            let mut ours = ql_implicit_eigenvalues(d, e).unwrap();
            ours.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mut reference: Vec<f64> =
                SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
            reference.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (a, b) in ours.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-10, "size {size}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn dense_spectrum_handles_degenerate_projections() {
        // dense QPQ at (8,2) has massively repeated eigenvalues and defeats
        // generic iterative solvers; the spectrum must still come out clean
        let qpq = build(DenseLabel::Qpq, 8, 2, P0).unwrap();
        let eigs = dense_spectrum(&qpq).unwrap();
        assert_eq!(eigs.len(), 256);
        assert!(eigs.iter().all(|v| v.is_finite()));
        assert!(eigs.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v)));
    }

    #[test]
    fn spectrum_rejects_asymmetric_input() {
        let mut op = build(DenseLabel::A, 3, 0, P0).unwrap();
        op.matrix[(0, 1)] += 0.5;
        assert!(matches!(dense_spectrum(&op), Err(CubeError::NotSymmetric(_))));
    }
}
