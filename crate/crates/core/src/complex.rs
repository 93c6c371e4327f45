//! Chain complexes, homology with explicit bases and sections, and the
//! splitting of a complex into an exact part and a part with zero boundary.

use num::{One, Zero};
use thiserror::Error;

use crate::linalg::{
    change_of_basis_det, column_space_basis, kernel_basis, solve_linear, LinalgError, Matrix,
    Rational,
};

/// A failed chain-complex axiom, reported as data by [`ChainComplex::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexViolation {
    #[error("complex has no degrees")]
    Empty,
    #[error("expected {expected} boundary maps, found {found}")]
    BoundaryCount { expected: usize, found: usize },
    #[error("boundary {degree} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        degree: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("boundary {degree} composed with boundary {} is nonzero", degree + 1)]
    BoundarySquareNonzero { degree: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("invalid complex: {0}")]
    Invalid(#[from] ComplexViolation),
    #[error("degree {degree} out of range 0..={top}")]
    DegreeOutOfRange { degree: usize, top: usize },
    #[error("degree {degree}: vector is not a cycle")]
    NotACycle { degree: usize },
    #[error("degree {degree}: {source}")]
    Linalg {
        degree: usize,
        #[source]
        source: LinalgError,
    },
}

/// Finite chain complex `0 -> C_n -> ... -> C_0 -> 0` over the rationals.
///
/// `boundaries[i]` is the matrix of the boundary map `C_{i+1} -> C_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainComplex {
    dims: Vec<usize>,
    boundaries: Vec<Matrix>,
}

impl ChainComplex {
    /// Builds a complex without checking any axiom; call [`validate`](Self::validate) before use.
    pub fn new(dims: Vec<usize>, boundaries: Vec<Matrix>) -> Self {
        ChainComplex { dims, boundaries }
    }

    /// Builds a complex and validates it.
    pub fn try_new(dims: Vec<usize>, boundaries: Vec<Matrix>) -> Result<Self, ComplexViolation> {
        let c = ChainComplex::new(dims, boundaries);
        c.validate()?;
        Ok(c)
    }

    /// The complex with the given dimensions and every boundary zero.
    pub fn zero_boundaries(dims: Vec<usize>) -> Self {
        let boundaries = (1..dims.len())
            .map(|p| Matrix::zeros(dims[p - 1], dims[p]))
            .collect();
        ChainComplex { dims, boundaries }
    }

    /// Top degree.
    pub fn n(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, p: usize) -> usize {
        self.dims.get(p).copied().unwrap_or(0)
    }

    /// Raw boundary list, `boundaries()[i] = ∂_{i+1}`.
    pub fn boundaries(&self) -> &[Matrix] {
        &self.boundaries
    }

    /// `∂_p : C_p -> C_{p-1}` for any `p`; outside `1..=n` it is the zero map
    /// of the appropriate (possibly empty) shape.
    pub fn boundary(&self, p: usize) -> Matrix {
        if p >= 1 && p <= self.boundaries.len() {
            self.boundaries[p - 1].clone()
        } else {
            let rows = if p == 0 { 0 } else { self.dim(p - 1) };
            Matrix::zeros(rows, self.dim(p))
        }
    }

    fn boundary_ref(&self, p: usize) -> Option<&Matrix> {
        if p >= 1 {
            self.boundaries.get(p - 1)
        } else {
            None
        }
    }

    /// Checks shapes, then `∂_p ∂_{p+1} = 0`, reporting the first failing degree.
    pub fn validate(&self) -> Result<(), ComplexViolation> {
        if self.dims.is_empty() {
            return Err(ComplexViolation::Empty);
        }
        if self.boundaries.len() != self.n() {
            return Err(ComplexViolation::BoundaryCount {
                expected: self.n(),
                found: self.boundaries.len(),
            });
        }
        for (i, d) in self.boundaries.iter().enumerate() {
            let expected = (self.dims[i], self.dims[i + 1]);
            if d.shape() != expected {
                return Err(ComplexViolation::ShapeMismatch {
                    degree: i + 1,
                    expected,
                    found: d.shape(),
                });
            }
        }
        for p in 1..self.n() {
            if !(&self.boundaries[p - 1] * &self.boundaries[p]).is_zero() {
                return Err(ComplexViolation::BoundarySquareNonzero { degree: p });
            }
        }
        Ok(())
    }

    pub fn is_boundary_zero(&self) -> bool {
        self.boundaries.iter().all(Matrix::is_zero)
    }

    /// Direct sum, degree by degree, with block-diagonal boundaries.
    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        assert_eq!(self.n(), other.n(), "direct sum of complexes of different length");
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let boundaries = self
            .boundaries
            .iter()
            .zip(&other.boundaries)
            .map(|(a, b)| Matrix::block_diag(a, b))
            .collect();
        ChainComplex { dims, boundaries }
    }

    /// Standard basis in every degree.
    pub fn standard_bases(&self) -> BasisFamily {
        BasisFamily(self.dims.iter().map(|&d| Matrix::identity(d)).collect())
    }

    /// The complex in new coordinates: with `t[p]` invertible, chains `x` become
    /// `t[p]^{-1} x` and `∂_p` becomes `t[p-1]^{-1} ∂_p t[p]`.
    pub fn conjugate(&self, t: &[Matrix], t_inv: &[Matrix]) -> ChainComplex {
        let boundaries = self
            .boundaries
            .iter()
            .enumerate()
            .map(|(i, d)| &(&t_inv[i] * d) * &t[i + 1])
            .collect();
        ChainComplex {
            dims: self.dims.clone(),
            boundaries,
        }
    }
}

/// Per-degree column families. For chain bases the columns of degree `p` form
/// a basis of `C_p`; for homology bases they are cycles whose classes form a basis of `H_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisFamily(pub Vec<Matrix>);

impl BasisFamily {
    pub fn degree(&self, p: usize) -> &Matrix {
        &self.0[p]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Degreewise empty families (`dims[p] x 0`), the homology basis of an acyclic complex.
    pub fn empty_for(c: &ChainComplex) -> BasisFamily {
        BasisFamily(c.dims().iter().map(|&d| Matrix::zeros(d, 0)).collect())
    }
}

/// Homology of one degree, in ambient coordinates of `C_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHomology {
    /// Basis of `ker ∂_p`.
    pub cycles: Matrix,
    /// Basis of `im ∂_{p+1}`: the pivot columns of `∂_{p+1}`.
    pub boundaries: Matrix,
    /// Cycles completing `boundaries` to a basis of `ker ∂_p`; their classes are a basis of `H_p`.
    pub reps: Matrix,
    /// Canonical preimages under `∂_p` of the boundary basis of degree `p-1`.
    pub lifts: Matrix,
}

impl DegreeHomology {
    pub fn betti(&self) -> usize {
        self.reps.cols()
    }

    /// `[boundaries | reps | lifts]`, a basis of `C_p`.
    pub fn adapted_basis(&self) -> Matrix {
        Matrix::hcat(
            self.cycles.rows(),
            &[&self.boundaries, &self.reps, &self.lifts],
        )
        .expect("homology blocks share the ambient dimension")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyData {
    pub degrees: Vec<DegreeHomology>,
}

impl HomologyData {
    pub fn degree(&self, p: usize) -> &DegreeHomology {
        &self.degrees[p]
    }

    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(DegreeHomology::betti).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees.iter().all(|d| d.betti() == 0)
    }

    /// The representatives as a homology basis family.
    pub fn rep_bases(&self) -> BasisFamily {
        BasisFamily(self.degrees.iter().map(|d| d.reps.clone()).collect())
    }
}

/// Computes cycles, boundaries, homology representatives and canonical lifts in every degree.
pub fn compute_homology(c: &ChainComplex) -> Result<HomologyData, ComplexError> {
    c.validate()?;
    let images: Vec<Matrix> = (0..=c.n() + 1)
        .map(|p| column_space_basis(&c.boundary(p)))
        .collect();
    let mut degrees = Vec::with_capacity(c.n() + 1);
    for p in 0..=c.n() {
        let d = c.dim(p);
        let cycles = kernel_basis(&c.boundary(p));
        let boundaries = images[p + 1].clone();
        // pivot columns of [B | Z] that fall in the Z block complete B to a basis of Z
        let stacked = Matrix::hcat(d, &[&boundaries, &cycles]).expect("same ambient dimension");
        let pivots = crate::linalg::rref_decompose(&stacked).pivots;
        let rep_idx: Vec<usize> = pivots.iter().copied().filter(|&j| j >= boundaries.cols()).collect();
        let reps = stacked.select_columns(&rep_idx);
        let lifts = match c.boundary_ref(p) {
            Some(dp) => solve_linear(dp, &images[p])
                .map_err(|source| ComplexError::Linalg { degree: p, source })?,
            None => Matrix::zeros(d, 0),
        };
        degrees.push(DegreeHomology {
            cycles,
            boundaries,
            reps,
            lifts,
        });
    }
    Ok(HomologyData { degrees })
}

/// Coordinates of the class of `cycle` (a column) in the `reps` basis of `H_p`.
pub fn class_reduce(
    c: &ChainComplex,
    h: &HomologyData,
    p: usize,
    cycle: &Matrix,
) -> Result<Matrix, ComplexError> {
    let basis = &h.degree(p).reps;
    class_coordinates(c, h, p, basis, cycle)
}

/// Coordinates of the classes of the columns of `cycles` with respect to the
/// classes of the columns of `basis`, which must be cycles whose classes form a basis of `H_p`.
pub fn class_coordinates(
    c: &ChainComplex,
    h: &HomologyData,
    p: usize,
    basis: &Matrix,
    cycles: &Matrix,
) -> Result<Matrix, ComplexError> {
    if p > c.n() {
        return Err(ComplexError::DegreeOutOfRange {
            degree: p,
            top: c.n(),
        });
    }
    if !(&c.boundary(p) * cycles).is_zero() {
        return Err(ComplexError::NotACycle { degree: p });
    }
    let b = &h.degree(p).boundaries;
    let stacked = Matrix::hcat(c.dim(p), &[b, basis])
        .map_err(|source| ComplexError::Linalg { degree: p, source })?;
    let x = solve_linear(&stacked, cycles).map_err(|source| ComplexError::Linalg { degree: p, source })?;
    let rows: Vec<usize> = (b.cols()..stacked.cols()).collect();
    Ok(x.select_rows(&rows))
}

/// Checks that the columns of `basis` are cycles of degree `p` whose classes are a basis of `H_p`.
pub fn is_homology_basis(c: &ChainComplex, h: &HomologyData, p: usize, basis: &Matrix) -> bool {
    basis.rows() == c.dim(p)
        && basis.cols() == h.degree(p).betti()
        && class_coordinates(c, h, p, &h.degree(p).reps, basis)
            .ok()
            .is_some_and(|x| x.has_independent_columns())
}

/// Determinant of the change from the classes of `old` to the classes of `new`
/// in `H_p`, in the sense `new = old * T`.
pub fn class_change_det(
    c: &ChainComplex,
    h: &HomologyData,
    p: usize,
    new: &Matrix,
    old: &Matrix,
) -> Result<Rational, ComplexError> {
    let reps = &h.degree(p).reps;
    let xn = class_coordinates(c, h, p, reps, new)?;
    let xo = class_coordinates(c, h, p, reps, old)?;
    change_of_basis_det(&xn, &xo).map_err(|source| ComplexError::Linalg { degree: p, source })
}

/// A subcomplex summand together with its embedding into the ambient complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub complex: ChainComplex,
    /// `embedding[p]` has `dims[p]` rows; its columns span the summand in degree `p`.
    pub embedding: Vec<Matrix>,
}

/// `C = C' ⊕ C''` with `C'` exact and `C''` carrying the zero boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralSplit {
    pub exact: Summand,
    pub dzero: Summand,
}

/// Splits a complex using the homology blocks: `C'_p = span(boundaries ∪ lifts)`, `C''_p = span(reps)`.
pub fn split_general(c: &ChainComplex) -> Result<GeneralSplit, ComplexError> {
    let h = compute_homology(c)?;
    let exact_emb: Vec<Matrix> = h
        .degrees
        .iter()
        .map(|d| Matrix::hcat(d.cycles.rows(), &[&d.boundaries, &d.lifts]).expect("same rows"))
        .collect();
    let dzero_emb: Vec<Matrix> = h.degrees.iter().map(|d| d.reps.clone()).collect();
    Ok(GeneralSplit {
        exact: restrict(c, exact_emb)?,
        dzero: restrict(c, dzero_emb)?,
    })
}

/// Restricts `c` to the subcomplex spanned degreewise by `embedding`, which must be closed under ∂.
pub fn restrict(c: &ChainComplex, embedding: Vec<Matrix>) -> Result<Summand, ComplexError> {
    let dims: Vec<usize> = embedding.iter().map(Matrix::cols).collect();
    let mut boundaries = Vec::with_capacity(c.n());
    for p in 1..=c.n() {
        let image = &c.boundary(p) * &embedding[p];
        let d = solve_linear(&embedding[p - 1], &image)
            .map_err(|source| ComplexError::Linalg { degree: p, source })?;
        boundaries.push(d);
    }
    Ok(Summand {
        complex: ChainComplex::new(dims, boundaries),
        embedding,
    })
}

/// Rebuilds the ambient boundary from two complementary summands:
/// `∂_p = [E'_{p-1} ∂'_p | E''_{p-1} ∂''_p] [E'_p | E''_p]^{-1}`.
pub fn reassemble(split: &GeneralSplit) -> Result<ChainComplex, LinalgError> {
    let a = &split.exact;
    let b = &split.dzero;
    let n = a.complex.n();
    let dims: Vec<usize> = a.embedding.iter().map(Matrix::rows).collect();
    let mut boundaries = Vec::with_capacity(n);
    for p in 1..=n {
        let basis = Matrix::hcat(dims[p], &[&a.embedding[p], &b.embedding[p]])?;
        let img_a = &a.embedding[p - 1] * &a.complex.boundary(p);
        let img_b = &b.embedding[p - 1] * &b.complex.boundary(p);
        let images = Matrix::hcat(dims[p - 1], &[&img_a, &img_b])?;
        boundaries.push(&images * &crate::linalg::inverse(&basis)?);
    }
    Ok(ChainComplex::new(dims, boundaries))
}

/// Unit vector `e_i` of length `d` as a column.
pub fn unit(d: usize, i: usize) -> Matrix {
    let mut v = Matrix::zeros(d, 1);
    v[(i, 0)] = Rational::one();
    v
}

/// `true` iff every column of `m` is zero under `∂_p`.
pub fn are_cycles(c: &ChainComplex, p: usize, m: &Matrix) -> bool {
    (&c.boundary(p) * m).entries().iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frac, int};

    fn scalar(v: i64) -> Matrix {
        Matrix::from_i64(&[&[v]])
    }

    #[test]
    fn validate_examples() {
        assert!(ChainComplex::new(vec![1, 1], vec![scalar(1)]).validate().is_ok());
        assert_eq!(
            ChainComplex::new(vec![1, 1, 1], vec![scalar(1), scalar(1)]).validate(),
            Err(ComplexViolation::BoundarySquareNonzero { degree: 1 })
        );
        assert!(ChainComplex::zero_boundaries(vec![2, 3, 1]).validate().is_ok());
        assert!(matches!(
            ChainComplex::new(vec![1, 2], vec![scalar(1)]).validate(),
            Err(ComplexViolation::ShapeMismatch { degree: 1, .. })
        ));
    }

    #[test]
    fn homology_examples() {
        let z = ChainComplex::zero_boundaries(vec![2, 1, 3]);
        let h = compute_homology(&z).unwrap();
        assert_eq!(h.betti(), vec![2, 1, 3]);
        for (p, d) in h.degrees.iter().enumerate() {
            assert_eq!(d.cycles, Matrix::identity(z.dim(p)));
            assert_eq!(d.boundaries.cols(), 0);
        }

        let id = ChainComplex::new(vec![1, 1], vec![scalar(1)]);
        assert_eq!(compute_homology(&id).unwrap().betti(), vec![0, 0]);

        let two = ChainComplex::new(vec![1, 1], vec![scalar(2)]);
        let h = compute_homology(&two).unwrap();
        assert_eq!(h.betti(), vec![0, 0]);
        assert_eq!(h.degree(0).boundaries, scalar(2));
        assert_eq!(h.degree(1).lifts, scalar(1));
    }

    #[test]
    fn dimension_count_per_degree() {
        let c = ChainComplex::new(
            vec![2, 3, 1],
            vec![
                Matrix::from_i64(&[&[1, 0, 1], &[0, 1, 1]]),
                Matrix::from_i64(&[&[1], &[1], &[-1]]),
            ],
        );
        let h = compute_homology(&c).unwrap();
        for p in 0..=c.n() {
            let d = h.degree(p);
            assert_eq!(c.dim(p), d.boundaries.cols() + d.betti() + d.lifts.cols());
            assert!(d.adapted_basis().has_independent_columns());
        }
    }

    #[test]
    fn split_examples() {
        let c = ChainComplex::new(vec![1, 2], vec![Matrix::from_i64(&[&[1, 0]])]);
        let s = split_general(&c).unwrap();
        assert_eq!(s.exact.complex.dims(), &[1, 1]);
        assert_eq!(s.dzero.complex.dims(), &[0, 1]);
        assert_eq!(reassemble(&s).unwrap(), c);

        let exact = ChainComplex::new(vec![1, 1], vec![scalar(3)]);
        let s = split_general(&exact).unwrap();
        assert_eq!(s.dzero.complex.dims(), &[0, 0]);
        assert!(compute_homology(&s.exact.complex).unwrap().is_acyclic());

        let z = ChainComplex::zero_boundaries(vec![1, 2]);
        let s = split_general(&z).unwrap();
        assert_eq!(s.exact.complex.dims(), &[0, 0]);
        assert!(s.dzero.complex.is_boundary_zero());
    }

    #[test]
    fn class_reduce_examples() {
        // C_1 = Q^2 -> C_0 = Q^2 with image spanned by e_1; H_0 spanned by e_2
        let c = ChainComplex::new(vec![2, 2], vec![Matrix::from_i64(&[&[1, 1], &[0, 0]])]);
        let h = compute_homology(&c).unwrap();
        let rep = h.degree(0).reps.col(0);
        assert_eq!(class_reduce(&c, &h, 0, &Matrix::from_i64(&[&[5], &[0]])).unwrap(), scalar(0));
        assert_eq!(class_reduce(&c, &h, 0, &rep).unwrap(), scalar(1));
        let shifted = &rep + &Matrix::from_i64(&[&[-4], &[0]]);
        assert_eq!(class_reduce(&c, &h, 0, &shifted).unwrap(), scalar(1));
        let half = Matrix::column(vec![int(0), frac(1, 2)]);
        let x = class_reduce(&c, &h, 0, &half).unwrap();
        assert_eq!(&rep.scale(&x[(0, 0)]) - &half, Matrix::zeros(2, 1));
        assert!(matches!(
            class_reduce(&c, &h, 1, &Matrix::from_i64(&[&[1], &[0]])),
            Err(ComplexError::NotACycle { degree: 1 })
        ));
    }
}
