//! Vertex indexing, dyadic lexicographic order, Hamming spheres, and
//! matrix-free application of the adjacency operators `A`, `A_+`, `A_-`,
//! the Laplacian `L = NI - A`, and the diagonal weight `T`.
//!
//! Vertices are stored in natural binary index order: bit `i` of a mask
//! corresponds to element `i + 1` of the subset (the cube's bit indices run
//! 1..=N when presented to the user). The dyadic lexicographic order is a
//! presentation-layer permutation applied only at serialization boundaries.
//!
//! All sums run over bit positions in ascending order, so results are
//! bitwise deterministic.

use crate::error::{CubeError, Result};

/// Hard cap on cube dimension: full-cube signals take `2^n` doubles.
pub const MAX_DIMENSION: usize = 24;

/// A vertex of the cube as an N-bit subset of `{1,..,N}`.
pub type SubsetMask = u32;

pub fn validate_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(CubeError::DimensionZero);
    }
    if n > MAX_DIMENSION {
        return Err(CubeError::DimensionTooLarge(n));
    }
    Ok(())
}

pub fn validate_mask(n: usize, s: SubsetMask) -> Result<()> {
    validate_dim(n)?;
    if (s as u64) >> n != 0 {
        return Err(CubeError::MaskOutOfRange { mask: s, n });
    }
    Ok(())
}

/// Hamming weight `|S|`.
#[inline]
pub fn weight(s: SubsetMask) -> usize {
    s.count_ones() as usize
}

/// Hamming distance `|R xor S|`.
#[inline]
pub fn distance(r: SubsetMask, s: SubsetMask) -> usize {
    (r ^ s).count_ones() as usize
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Compares two masks of equal weight by the dyadic rule: `R` precedes `S`
/// when the smallest bit index at which they differ belongs to `S`.
#[inline]
fn dyadic_lt_same_weight(r: SubsetMask, s: SubsetMask) -> bool {
    let d = r ^ s;
    if d == 0 {
        return false;
    }
    let b = d.trailing_zeros();
    (s >> b) & 1 == 1
}

/// Total order: first by Hamming weight, then the same-weight rule.
pub fn dyadic_lt(r: SubsetMask, s: SubsetMask) -> bool {
    let (wr, ws) = (weight(r), weight(s));
    if wr != ws {
        return wr < ws;
    }
    dyadic_lt_same_weight(r, s)
}

/// Rank of `s` in the dyadic lexicographic order over all `2^n` masks.
///
/// Masks of weight below `|s|` all precede `s`; within the sphere the rank is
/// counted by the same-weight comparator.
pub fn dyadic_rank(n: usize, s: SubsetMask) -> Result<usize> {
    validate_mask(n, s)?;
    let r = weight(s);
    let mut rank: usize = (0..r).map(|k| binomial(n, k)).sum();
    // Count same-weight masks preceding s. A mask P of the same weight
    // precedes S iff at the smallest differing bit b, b is in S. Enumerate
    // over the lowest set bit of S that P lacks: P agrees with S below bit b,
    // omits b, and completes its weight freely above b.
    let mut below = 0usize; // elements of S strictly below current bit
    for b in 0..n {
        if (s >> b) & 1 == 1 {
            // choose the remaining r - below - 1 elements among bits above b
            // P matches S below b, excludes b, and takes its remaining
            // r - below elements among the n - b - 1 bits above b.
            rank += binomial(n - b - 1, r - below);
            below += 1;
        }
    }
    Ok(rank)
}

/// Precomputed bijection between masks and dyadic ranks.
pub struct DyadicOrder {
    n: usize,
    rank_of: Vec<u32>,
    mask_of: Vec<u32>,
}

impl DyadicOrder {
    pub fn new(n: usize) -> Result<Self> {
        validate_dim(n)?;
        let size = 1usize << n;
        let mut masks: Vec<u32> = (0..size as u32).collect();
        masks.sort_by(|&a, &b| {
            weight(a)
                .cmp(&weight(b))
                .then_with(|| {
                    if dyadic_lt_same_weight(a, b) {
                        std::cmp::Ordering::Less
                    } else if a == b {
                        std::cmp::Ordering::Equal
                    } else {
                        std::cmp::Ordering::Greater
                    }
                })
        });
        let mut rank_of = vec![0u32; size];
        for (rank, &m) in masks.iter().enumerate() {
            rank_of[m as usize] = rank as u32;
        }
        Ok(DyadicOrder { n, rank_of, mask_of: masks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank_of(&self, s: SubsetMask) -> usize {
        self.rank_of[s as usize] as usize
    }

    pub fn mask_of(&self, rank: usize) -> SubsetMask {
        self.mask_of[rank]
    }
}

/// All masks of weight `r`, sorted by dyadic rank.
pub fn sphere_indices(n: usize, r: usize) -> Result<Vec<SubsetMask>> {
    validate_dim(n)?;
    if r > n {
        return Err(CubeError::RadiusOutOfRange { r, n });
    }
    let mut out = Vec::with_capacity(binomial(n, r));
    if r == 0 {
        out.push(0);
        return Ok(out);
    }
    // Gosper's hack over masks of fixed weight, then sort by the dyadic rule.
    let mut v: u64 = (1u64 << r) - 1;
    let limit: u64 = 1u64 << n;
    while v < limit {
        out.push(v as SubsetMask);
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out.sort_by(|&a, &b| {
        if dyadic_lt_same_weight(a, b) {
            std::cmp::Ordering::Less
        } else if a == b {
            std::cmp::Ordering::Equal
        } else {
            std::cmp::Ordering::Greater
        }
    });
    Ok(out)
}

/// A real-valued function on all `2^n` vertices, natural binary index order.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeSignal {
    n: usize,
    values: Vec<f64>,
}

impl CubeSignal {
    pub fn zeros(n: usize) -> Result<Self> {
        validate_dim(n)?;
        Ok(CubeSignal { n, values: vec![0.0; 1 << n] })
    }

    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        validate_dim(n)?;
        if values.len() != 1 << n {
            return Err(CubeError::BadSignalLength { len: values.len(), n });
        }
        Ok(CubeSignal { n, values })
    }

    /// Point mass at vertex `s`.
    pub fn delta(n: usize, s: SubsetMask) -> Result<Self> {
        validate_mask(n, s)?;
        let mut x = Self::zeros(n)?;
        x.values[s as usize] = 1.0;
        Ok(x)
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        validate_dim(n)?;
        Ok(CubeSignal { n, values: vec![c; 1 << n] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn dot(&self, other: &CubeSignal) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn axpy(&mut self, a: f64, x: &CubeSignal) {
        for (v, xv) in self.values.iter_mut().zip(&x.values) {
            *v += a * xv;
        }
    }
}

/// A signal restricted to the Hamming sphere `Sigma_r`, indexed by the
/// dyadic-lex rank within the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSlice {
    n: usize,
    r: usize,
    values: Vec<f64>,
}

impl SphereSlice {
    pub fn zeros(n: usize, r: usize) -> Result<Self> {
        validate_dim(n)?;
        if r > n {
            return Err(CubeError::RadiusOutOfRange { r, n });
        }
        Ok(SphereSlice { n, r, values: vec![0.0; binomial(n, r)] })
    }

    pub fn from_values(n: usize, r: usize, values: Vec<f64>) -> Result<Self> {
        let mut s = Self::zeros(n, r)?;
        if values.len() != s.values.len() {
            return Err(CubeError::BadSignalLength { len: values.len(), n });
        }
        s.values = values;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn dot(&self, other: &SphereSlice) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn axpy(&mut self, a: f64, x: &SphereSlice) {
        for (v, xv) in self.values.iter_mut().zip(&x.values) {
            *v += a * xv;
        }
    }

    /// Embeds into a full cube signal supported on `Sigma_r`.
    pub fn embed(&self) -> Result<CubeSignal> {
        let mut x = CubeSignal::zeros(self.n)?;
        for (i, &m) in sphere_indices(self.n, self.r)?.iter().enumerate() {
            x.values[m as usize] = self.values[i];
        }
        Ok(x)
    }

    /// Restriction of a cube signal to `Sigma_r`.
    pub fn extract(x: &CubeSignal, r: usize) -> Result<Self> {
        let mut s = Self::zeros(x.n, r)?;
        for (i, &m) in sphere_indices(x.n, r)?.iter().enumerate() {
            s.values[i] = x.values[m as usize];
        }
        Ok(s)
    }
}

/// `(Ax)(R) = sum_i x(R xor {i})`.
pub fn apply_adjacency(x: &CubeSignal) -> CubeSignal {
    let n = x.n;
    let mut out = CubeSignal { n, values: vec![0.0; x.values.len()] };
    for s in 0..x.values.len() {
        let mut acc = 0.0;
        for i in 0..n {
            acc += x.values[s ^ (1 << i)];
        }
        out.values[s] = acc;
    }
    out
}

/// Outer adjacency `A_+`: `(A_+ x)(S) = sum over one-element deletions of S`.
pub fn apply_outer(x: &CubeSignal) -> CubeSignal {
    let n = x.n;
    let mut out = CubeSignal { n, values: vec![0.0; x.values.len()] };
    for s in 0..x.values.len() {
        let mut acc = 0.0;
        for i in 0..n {
            if (s >> i) & 1 == 1 {
                acc += x.values[s ^ (1 << i)];
            }
        }
        out.values[s] = acc;
    }
    out
}

/// Inner adjacency `A_- = A_+^T`: `(A_- x)(R) = sum over one-element insertions`.
pub fn apply_inner(x: &CubeSignal) -> CubeSignal {
    let n = x.n;
    let mut out = CubeSignal { n, values: vec![0.0; x.values.len()] };
    for s in 0..x.values.len() {
        let mut acc = 0.0;
        for i in 0..n {
            if (s >> i) & 1 == 0 {
                acc += x.values[s ^ (1 << i)];
            }
        }
        out.values[s] = acc;
    }
    out
}

/// Laplacian `L = NI - A`.
pub fn apply_laplacian(x: &CubeSignal) -> CubeSignal {
    let mut out = apply_adjacency(x);
    let n = x.n as f64;
    for (o, v) in out.values.iter_mut().zip(&x.values) {
        *o = n * v - *o;
    }
    out
}

/// Diagonal weight `(Tx)(R) = sqrt(2|R|) x(R)`.
pub fn apply_t(x: &CubeSignal) -> CubeSignal {
    let mut out = x.clone();
    for (s, v) in out.values.iter_mut().enumerate() {
        *v *= (2.0 * weight(s as SubsetMask) as f64).sqrt();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_order_n3_full_listing() {
        // Independent oracle: literal pairwise comparator over all 8 masks.
        let order = DyadicOrder::new(3).unwrap();
        // bit index i (1-based) <-> bit position i-1
        let expect: Vec<SubsetMask> = vec![
            0b000, // {}
            0b100, // {3}
            0b010, // {2}
            0b001, // {1}
            0b110, // {2,3}
            0b101, // {1,3}
            0b011, // {1,2}
            0b111, // {1,2,3}
        ];
        for (rank, &m) in expect.iter().enumerate() {
            assert_eq!(order.mask_of(rank), m, "rank {rank}");
            assert_eq!(order.rank_of(m), rank);
            assert_eq!(dyadic_rank(3, m).unwrap(), rank);
        }
        assert_eq!(dyadic_rank(3, 0).unwrap(), 0);
        assert_eq!(dyadic_rank(3, 0b111).unwrap(), 7);
    }

    #[test]
    fn dyadic_rank_matches_sorted_enumeration() {
        for n in 1..=8 {
            let order = DyadicOrder::new(n).unwrap();
            for s in 0..(1u32 << n) {
                assert_eq!(dyadic_rank(n, s).unwrap(), order.rank_of(s));
            }
        }
    }

    #[test]
    fn dyadic_rank_rejects_out_of_range_mask() {
        assert!(matches!(
            dyadic_rank(3, 0b1000),
            Err(CubeError::MaskOutOfRange { .. })
        ));
    }

    #[test]
    fn sphere_block_is_contiguous() {
        let n = 8;
        for r in 0..=n {
            let start: usize = (0..r).map(|k| binomial(n, k)).sum();
            let idx = sphere_indices(n, r).unwrap();
            assert_eq!(idx.len(), binomial(n, r));
            for (i, &m) in idx.iter().enumerate() {
                assert_eq!(dyadic_rank(n, m).unwrap(), start + i);
            }
        }
    }

    #[test]
    fn ball_size_n8_r3() {
        let total: usize = (0..=3).map(|k| binomial(8, k)).sum();
        assert_eq!(total, 93);
        assert_eq!(sphere_indices(8, 3).unwrap().len(), 56);
        assert_eq!(sphere_indices(8, 0).unwrap(), vec![0]);
    }

    #[test]
    fn adjacency_splits_into_outer_and_inner() {
        let n = 6;
        let x = CubeSignal::from_values(
            n,
            (0..1 << n).map(|i| ((i * 37 + 11) % 101) as f64 - 50.0).collect(),
        )
        .unwrap();
        let a = apply_adjacency(&x);
        let mut sum = apply_outer(&x);
        sum.axpy(1.0, &apply_inner(&x));
        // integer-weight sums: exact equality
        assert_eq!(a.values(), sum.values());
    }

    #[test]
    fn adjacency_on_delta_and_constant() {
        let n = 2;
        let a = apply_adjacency(&CubeSignal::delta(n, 0).unwrap());
        assert_eq!(a.values(), &[0.0, 1.0, 1.0, 0.0]);
        let ones = CubeSignal::constant(n, 1.0).unwrap();
        let a = apply_adjacency(&ones);
        assert!(a.values().iter().all(|&v| v == n as f64));
    }

    #[test]
    fn outer_inner_edge_cases() {
        let n = 4;
        // A_+ delta_full = 0
        let top = CubeSignal::delta(n, 0b1111).unwrap();
        assert!(apply_outer(&top).values().iter().all(|&v| v == 0.0));
        // A_- delta_origin = 0
        let origin = CubeSignal::delta(n, 0).unwrap();
        assert!(apply_inner(&origin).values().iter().all(|&v| v == 0.0));
        // A_- (indicator of Sigma_1) = N delta_origin
        let mut ind = CubeSignal::zeros(n).unwrap();
        for i in 0..n {
            ind.values_mut()[1 << i] = 1.0;
        }
        let down = apply_inner(&ind);
        assert_eq!(down.values()[0], n as f64);
    }

    #[test]
    fn outer_nilpotency_on_sphere() {
        // x supported on Sigma_r: A_+^{n-r+1} x = 0
        for n in 2..=8usize {
            let r = n / 2;
            let mut x = SphereSlice::zeros(n, r).unwrap();
            for (i, v) in x.values_mut().iter_mut().enumerate() {
                *v = (i as f64).sin() + 1.0;
            }
            let mut cur = x.embed().unwrap();
            for _ in 0..(n - r + 1) {
                cur = apply_outer(&cur);
            }
            assert!(cur.norm() == 0.0, "n={n}");
        }
    }

    #[test]
    fn outer_inner_are_adjoint() {
        let n = 7;
        let u = CubeSignal::from_values(
            n,
            (0..1 << n).map(|i| ((i * 13 + 5) % 97) as f64 / 97.0).collect(),
        )
        .unwrap();
        let v = CubeSignal::from_values(
            n,
            (0..1 << n).map(|i| ((i * 29 + 3) % 89) as f64 / 89.0).collect(),
        )
        .unwrap();
        let lhs = apply_outer(&u).dot(&v);
        let rhs = u.dot(&apply_inner(&v));
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn t_weights() {
        let n = 4;
        assert!(apply_t(&CubeSignal::delta(n, 0).unwrap())
            .values()
            .iter()
            .all(|&v| v == 0.0));
        let d = CubeSignal::delta(n, 0b0011).unwrap();
        let t = apply_t(&d);
        assert_eq!(t.values()[0b0011], 2.0);
    }

    #[test]
    fn slice_embed_extract_roundtrip() {
        let n = 5;
        for r in 0..=n {
            let s = SphereSlice::from_values(
                n,
                r,
                (0..binomial(n, r)).map(|i| i as f64 + 0.5).collect(),
            )
            .unwrap();
            let back = SphereSlice::extract(&s.embed().unwrap(), r).unwrap();
            assert_eq!(s, back);
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        assert!(matches!(validate_dim(0), Err(CubeError::DimensionZero)));
        assert!(matches!(
            validate_dim(MAX_DIMENSION + 1),
            Err(CubeError::DimensionTooLarge(_))
        ));
    }
}
