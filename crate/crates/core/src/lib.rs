//! Spatio-spectral limiting on Boolean hypercubes.
//!
//! The Boolean cube `B_N = {0,1}^N` carries two natural truncations: spatial
//! limiting `Q_K` (restriction to the Hamming ball of radius `K`) and spectral
//! limiting `P_K` (projection onto Hadamard characters of weight at most `K`).
//! This crate computes the eigenspaces of the compressed operators `QPQ` and
//! `PQP`, and of the Boolean difference operator `HBDO = T(alpha - L)T + beta L`,
//! by reducing the `2^N`-dimensional eigenproblems to dense matrices of size
//! `N - r + 1` acting on spherical coefficients.
//!
//! The reduction rests on the decomposition of each Hamming-sphere space
//! `l2(Sigma_r)` into ladders `A_+^k W` over the harmonic spaces `W_r`
//! (kernel of the inner adjacency map), where the inner/outer adjacency maps
//! satisfy `A_- A_+^{k+1} W = m(r,k) A_+^k W` with scalar multipliers
//! `m(r,k) = (k+1)(N - 2r - k)`.
//!
//! Everything structured is cross-checked against a dense brute-force oracle
//! (module [`oracle`]) for cube dimensions up to 12.

pub mod cli;
pub mod coeff_matrices;
pub mod cube_core;
pub mod eigensolve;
pub mod error;
pub mod hadamard;
pub mod oracle;
pub mod sphere_harmonics;

pub use cube_core::{CubeSignal, DyadicOrder, SphereSlice, SubsetMask};
pub use error::CubeError;
