//! Symplectic chain complexes: pairings `ω_p : C_p × C_{n-p} -> Q` that are
//! non-degenerate, antisymmetric and compatible with the boundary, together with
//! compatible bases, the orthogonal splitting, Pfaffians and the torsion formula
//! in terms of the induced homology pairings.
//!
//! `ω_p(a, b) = aᵀ Ω_p b`. The top degree `n` must satisfy `n ≡ 2 (mod 4)`.

use std::collections::HashMap;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::complex::{
    class_change_det, compute_homology, is_homology_basis, restrict, BasisFamily, ChainComplex,
    ComplexError, ComplexViolation, HomologyData,
};
use crate::linalg::{
    determinant, in_column_span, inverse, is_skew_symmetric, kernel_basis, signed_power,
    LinalgError, Matrix, Rational,
};
use crate::torsion::{base_change_factor, torsion, TorsionError, TorsionReport};

/// A failed symplectic axiom, reported as data by [`SymplecticComplex::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticViolation {
    #[error("underlying complex: {0}")]
    Complex(#[from] ComplexViolation),
    #[error("top degree {n} is not congruent to 2 mod 4")]
    TopDegree { n: usize },
    #[error("expected {expected} pairing matrices, found {found}")]
    PairingCount { expected: usize, found: usize },
    #[error("pairing {degree} has shape {found:?}, expected {expected:?}")]
    PairingShape {
        degree: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("pairing {degree} is not the signed transpose of pairing {}", .other)]
    Antisymmetry { degree: usize, other: usize },
    #[error("pairing {degree} is degenerate")]
    Degenerate { degree: usize },
    #[error("pairings {degree} and {} are not compatible with the boundary", degree + 1)]
    BoundaryCompatibility { degree: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("invalid symplectic complex: {0}")]
    Invalid(#[from] SymplecticViolation),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Torsion(#[from] TorsionError),
    #[error("degree {degree}: homology basis is not a basis of H_{degree}")]
    HomologyBasis { degree: usize },
    #[error("induced pairing in degree {degree} is degenerate")]
    InducedDegenerate { degree: usize },
    #[error("induced pairing in degree {degree} depends on the representatives")]
    InducedNotWellDefined { degree: usize },
    #[error("degree {degree}: a cycle annihilating all cycles is not a boundary")]
    AnnihilatorNotBoundary { degree: usize },
    #[error("middle degree has odd dimension {dim}")]
    OddMiddle { dim: usize },
    #[error("bases are not block-aligned with the homology splitting in degree {degree}")]
    NotAligned { degree: usize },
    #[error("bases are not compatible with the pairings in degree {degree}")]
    NotCompatible { degree: usize },
    #[error(transparent)]
    Pfaffian(#[from] PfaffianError),
    #[error("degree {degree}: {source}")]
    Linalg {
        degree: usize,
        #[source]
        source: LinalgError,
    },
}

fn linalg_at(degree: usize) -> impl Fn(LinalgError) -> SymplecticError {
    move |source| SymplecticError::Linalg { degree, source }
}

fn sign(p: usize) -> Rational {
    if p.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymplecticComplex {
    pub base: ChainComplex,
    /// `pairings[p] = Ω_p`, of shape `dims[p] x dims[n-p]`.
    pub pairings: Vec<Matrix>,
}

impl SymplecticComplex {
    pub fn new(base: ChainComplex, pairings: Vec<Matrix>) -> Self {
        SymplecticComplex { base, pairings }
    }

    /// Builds the full pairing family from `Ω_0, ..., Ω_{n/2}` using `Ω_{n-p} = (-1)^p Ω_pᵀ`.
    pub fn from_lower_pairings(base: ChainComplex, lower: Vec<Matrix>) -> Self {
        let n = base.n();
        let mut pairings = lower;
        for q in (n / 2 + 1)..=n {
            let p = n - q;
            let derived = pairings.get(p).map(|m| m.transpose().scale(&sign(p)));
            if let Some(m) = derived {
                pairings.push(m);
            }
        }
        SymplecticComplex { base, pairings }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn middle(&self) -> usize {
        self.n() / 2
    }

    pub fn pairing(&self, p: usize) -> &Matrix {
        &self.pairings[p]
    }

    /// `ω_p(a, b)` for columns `a ∈ C_p`, `b ∈ C_{n-p}` as a Gram matrix `aᵀ Ω_p b`.
    pub fn gram(&self, p: usize, a: &Matrix, b: &Matrix) -> Matrix {
        &(&a.transpose() * &self.pairings[p]) * b
    }

    pub fn validate(&self) -> Result<(), SymplecticViolation> {
        self.base.validate()?;
        let n = self.n();
        let dims = self.base.dims();
        if n % 4 != 2 {
            return Err(SymplecticViolation::TopDegree { n });
        }
        if self.pairings.len() != n + 1 {
            return Err(SymplecticViolation::PairingCount {
                expected: n + 1,
                found: self.pairings.len(),
            });
        }
        for p in 0..=n {
            let expected = (dims[p], dims[n - p]);
            if self.pairings[p].shape() != expected {
                return Err(SymplecticViolation::PairingShape {
                    degree: p,
                    expected,
                    found: self.pairings[p].shape(),
                });
            }
        }
        for p in 0..=n {
            if self.pairings[n - p] != self.pairings[p].transpose().scale(&sign(p)) {
                return Err(SymplecticViolation::Antisymmetry {
                    degree: p,
                    other: n - p,
                });
            }
        }
        for p in 0..=n {
            let d = determinant(&self.pairings[p]).map_err(|_| SymplecticViolation::Degenerate { degree: p })?;
            if d.is_zero() {
                return Err(SymplecticViolation::Degenerate { degree: p });
            }
        }
        for p in 0..n {
            let lhs = &self.base.boundary(p + 1).transpose() * &self.pairings[p];
            let rhs = (&self.pairings[p + 1] * &self.base.boundary(n - p)).scale(&sign(p + 1));
            if lhs != rhs {
                return Err(SymplecticViolation::BoundaryCompatibility { degree: p });
            }
        }
        Ok(())
    }

    /// The complex in new coordinates `x ↦ t[p]^{-1} x`, with pairings transported to `t_pᵀ Ω_p t_{n-p}`.
    pub fn conjugate(&self, t: &[Matrix], t_inv: &[Matrix]) -> SymplecticComplex {
        let n = self.n();
        let pairings = (0..=n)
            .map(|p| &(&t[p].transpose() * &self.pairings[p]) * &t[n - p])
            .collect();
        SymplecticComplex {
            base: self.base.conjugate(t, t_inv),
            pairings,
        }
    }

    /// Direct sum of two symplectic complexes with the same top degree.
    pub fn direct_sum(&self, other: &SymplecticComplex) -> SymplecticComplex {
        SymplecticComplex {
            base: self.base.direct_sum(&other.base),
            pairings: self
                .pairings
                .iter()
                .zip(&other.pairings)
                .map(|(a, b)| Matrix::block_diag(a, b))
                .collect(),
        }
    }
}

/// The standard symplectic block `[[0, I_k], [-I_k, 0]]`.
pub fn standard_symplectic(k: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        j[(i, k + i)] = Rational::one();
        j[(k + i, i)] = -Rational::one();
    }
    j
}

/// Matrices of the pairings induced on homology, in given homology bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyPairing {
    /// `matrices[p] = h_pᵀ Ω_p h_{n-p}`.
    pub matrices: Vec<Matrix>,
}

impl HomologyPairing {
    pub fn n(&self) -> usize {
        self.matrices.len() - 1
    }
}

fn check_homology_bases(
    s: &SymplecticComplex,
    h: &HomologyData,
    homology_bases: &BasisFamily,
) -> Result<(), SymplecticError> {
    if homology_bases.len() != s.n() + 1 {
        return Err(SymplecticError::HomologyBasis { degree: homology_bases.len().min(s.n()) });
    }
    for p in 0..=s.n() {
        if !is_homology_basis(&s.base, h, p, homology_bases.degree(p)) {
            return Err(SymplecticError::HomologyBasis { degree: p });
        }
    }
    Ok(())
}

/// Evaluates the pairings on homology representatives, after checking that the
/// result does not depend on representatives and that only boundaries annihilate all cycles.
pub fn induced_pairing(
    s: &SymplecticComplex,
    h: &HomologyData,
    homology_bases: &BasisFamily,
) -> Result<HomologyPairing, SymplecticError> {
    check_homology_bases(s, h, homology_bases)?;
    let n = s.n();
    let mut matrices = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let q = n - p;
        let (hp, hq) = (h.degree(p), h.degree(q));
        // cycles pair to zero with boundaries, so the pairing descends to classes
        if !s.gram(p, &hp.cycles, &hq.boundaries).is_zero() {
            return Err(SymplecticError::InducedNotWellDefined { degree: p });
        }
        // a cycle of degree q pairing to zero with every cycle of degree p is a boundary
        let k = kernel_basis(&s.gram(p, &hp.cycles, &hq.cycles));
        let annihilators = &hq.cycles * &k;
        if !in_column_span(&hq.boundaries, &annihilators) {
            return Err(SymplecticError::AnnihilatorNotBoundary { degree: q });
        }
        let m = s.gram(p, homology_bases.degree(p), homology_bases.degree(q));
        let d = determinant(&m).map_err(|_| SymplecticError::InducedDegenerate { degree: p })?;
        if d.is_zero() {
            return Err(SymplecticError::InducedDegenerate { degree: p });
        }
        matrices.push(m);
    }
    if !is_skew_symmetric(&matrices[s.middle()]) {
        return Err(SymplecticError::InducedNotWellDefined { degree: s.middle() });
    }
    Ok(HomologyPairing { matrices })
}

/// Role of a group of basis vectors relative to the homology splitting of its degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// Spans the boundaries.
    Boundary,
    /// Cycles whose classes form a basis of homology.
    Homology,
    /// Completes cycles to the whole space.
    Lift,
}

/// Compatible chain bases together with the block structure of each degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibleBases {
    pub bases: BasisFamily,
    /// Consecutive column groups of each degree, in order.
    pub layout: Vec<Vec<(BlockKind, usize)>>,
    /// Set when the first hyperbolic pair of homology vectors in the middle degree was swapped.
    pub flipped: bool,
}

impl CompatibleBases {
    /// Column indices of degree `p` carrying the given block kind.
    pub fn columns(&self, p: usize, kind: BlockKind) -> Vec<usize> {
        let mut out = Vec::new();
        let mut offset = 0;
        for &(k, len) in &self.layout[p] {
            if k == kind {
                out.extend(offset..offset + len);
            }
            offset += len;
        }
        out
    }

    /// Columns of degree `p` lying in the exact summand.
    pub fn exact_columns(&self, p: usize) -> Vec<usize> {
        let mut cols: Vec<usize> = self
            .columns(p, BlockKind::Boundary)
            .into_iter()
            .chain(self.columns(p, BlockKind::Lift))
            .collect();
        cols.sort_unstable();
        cols
    }

    pub fn homology_columns(&self, p: usize) -> Vec<usize> {
        self.columns(p, BlockKind::Homology)
    }
}

/// Expected Gram matrix of compatible bases in degree `p`.
fn target_gram(n: usize, p: usize, dim: usize) -> Matrix {
    if 2 * p == n {
        standard_symplectic(dim / 2)
    } else if p < n / 2 {
        Matrix::identity(dim)
    } else {
        Matrix::identity(dim).scale(&sign(n - p))
    }
}

/// `true` iff `bases[p]ᵀ Ω_p bases[n-p]` is the identity below the middle and the
/// standard symplectic block in the middle (the upper degrees then follow by antisymmetry).
pub fn is_omega_compatible(s: &SymplecticComplex, bases: &BasisFamily) -> bool {
    let n = s.n();
    (0..=n).all(|p| {
        let (a, b) = (bases.degree(p), bases.degree(n - p));
        a.shape() == (s.base.dim(p), s.base.dim(p))
            && b.shape() == (s.base.dim(n - p), s.base.dim(n - p))
            && s.gram(p, a, b) == target_gram(n, p, s.base.dim(p))
    })
}

/// Builds compatible chain bases adapted to the homology splitting.
///
/// Below the middle, `o_p = [boundaries | reps | lifts]` and `o_{n-p}` is its dual basis
/// under `Ω_p`. In the middle, the boundaries `e` are paired with isotropic lifts `f`,
/// and the homology representatives are made orthogonal to `e` and `f` and then
/// run through symplectic Gram-Schmidt into pairs `(u, v)`; the result is `[e | u | f | v]`.
pub fn make_omega_compatible_bases(s: &SymplecticComplex) -> Result<CompatibleBases, SymplecticError> {
    s.validate()?;
    let h = compute_homology(&s.base)?;
    compatible_from_homology(s, &h)
}

fn compatible_from_homology(s: &SymplecticComplex, h: &HomologyData) -> Result<CompatibleBases, SymplecticError> {
    let n = s.n();
    let c = s.middle();
    let mut bases = vec![Matrix::zeros(0, 0); n + 1];
    let mut layout = vec![Vec::new(); n + 1];
    for p in 0..c {
        let d = h.degree(p);
        let o = d.adapted_basis();
        let dual = inverse(&(&o.transpose() * s.pairing(p))).map_err(linalg_at(p))?;
        layout[p] = vec![
            (BlockKind::Boundary, d.boundaries.cols()),
            (BlockKind::Homology, d.betti()),
            (BlockKind::Lift, d.lifts.cols()),
        ];
        layout[n - p] = vec![
            (BlockKind::Lift, d.boundaries.cols()),
            (BlockKind::Homology, d.betti()),
            (BlockKind::Boundary, d.lifts.cols()),
        ];
        bases[p] = o;
        bases[n - p] = dual;
    }

    let mid = h.degree(c);
    let dim = s.base.dim(c);
    if dim % 2 == 1 {
        return Err(SymplecticError::OddMiddle { dim });
    }
    let omega = s.pairing(c);
    let form = |a: &Matrix, b: &Matrix| &(&a.transpose() * omega) * b;
    let e = mid.boundaries.clone();
    let g = form(&e, &mid.lifts);
    let mut f = &mid.lifts * &inverse(&g).map_err(linalg_at(c))?;
    let half = Rational::new(1.into(), 2.into());
    let skew = form(&f, &f);
    f = &f + &(&e * &skew).scale(&half);

    let reps = &mid.reps;
    let mut pending: Vec<Matrix> = reps
        .columns()
        .map(|z| {
            let coeffs = form(&z, &f);
            &z - &(&e * &coeffs.transpose())
        })
        .collect();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    while !pending.is_empty() {
        let a = pending.remove(0);
        let partner = pending
            .iter()
            .position(|b| !form(&a, b)[(0, 0)].is_zero())
            .ok_or(SymplecticError::InducedDegenerate { degree: c })?;
        let b = pending.remove(partner);
        let u = a.scale(&form(&a, &b)[(0, 0)].recip());
        pending = pending
            .into_iter()
            .map(|x| {
                let xv = form(&x, &b)[(0, 0)].clone();
                let xu = form(&x, &u)[(0, 0)].clone();
                &(&x - &u.scale(&xv)) + &b.scale(&xu)
            })
            .collect();
        us.push(u);
        vs.push(b);
    }
    let mut cols: Vec<&Matrix> = vec![&e];
    cols.extend(us.iter());
    cols.push(&f);
    cols.extend(vs.iter());
    bases[c] = Matrix::hcat(dim, &cols).map_err(linalg_at(c))?;
    layout[c] = vec![
        (BlockKind::Boundary, e.cols()),
        (BlockKind::Homology, us.len()),
        (BlockKind::Lift, f.cols()),
        (BlockKind::Homology, vs.len()),
    ];
    let out = CompatibleBases {
        bases: BasisFamily(bases),
        layout,
        flipped: false,
    };
    if !is_omega_compatible(s, &out.bases) {
        let bad = (0..=n)
            .find(|&p| s.gram(p, out.bases.degree(p), out.bases.degree(n - p)) != target_gram(n, p, s.base.dim(p)))
            .unwrap_or(c);
        return Err(SymplecticError::NotCompatible { degree: bad });
    }
    Ok(out)
}

/// Makes the middle-degree homology vectors of `compat` define the same orientation
/// of `H_{n/2}` as `homology_bases`, swapping the first hyperbolic pair `(u_1, v_1)` if needed.
///
/// The swap negates that pair's entry in the Gram matrix, so a flipped family is
/// compatible with the pairing up to the sign of one hyperbolic pair.
pub fn align_orientation(
    s: &SymplecticComplex,
    compat: &CompatibleBases,
    homology_bases: &BasisFamily,
) -> Result<CompatibleBases, SymplecticError> {
    let h = compute_homology(&s.base)?;
    align_with_homology(s, &h, compat, homology_bases)
}

fn align_with_homology(
    s: &SymplecticComplex,
    h: &HomologyData,
    compat: &CompatibleBases,
    homology_bases: &BasisFamily,
) -> Result<CompatibleBases, SymplecticError> {
    let c = s.middle();
    check_homology_bases(s, h, homology_bases)?;
    let cols = compat.homology_columns(c);
    if cols.is_empty() {
        return Ok(compat.clone());
    }
    let mid = compat.bases.degree(c);
    let ours = mid.select_columns(&cols);
    let det = class_change_det(&s.base, h, c, homology_bases.degree(c), &ours)?;
    if det.is_positive() {
        return Ok(compat.clone());
    }
    let k = cols.len() / 2;
    let mut swapped = mid.clone();
    swapped.swap_columns(cols[0], cols[k]);
    let mut bases = compat.bases.clone();
    bases.0[c] = swapped;
    Ok(CompatibleBases {
        bases,
        layout: compat.layout.clone(),
        flipped: !compat.flipped,
    })
}

/// A summand of a symplectic complex with its embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticSummand {
    pub complex: SymplecticComplex,
    pub embedding: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticSplit {
    pub exact: SymplecticSummand,
    pub dzero: SymplecticSummand,
    /// Per degree `p`: `(ω_p(C'_p, C''_{n-p}), ω_p(C''_p, C'_{n-p}))`.
    pub cross_blocks: Vec<(Matrix, Matrix)>,
}

impl SymplecticSplit {
    pub fn is_orthogonal(&self) -> bool {
        self.cross_blocks.iter().all(|(a, b)| a.is_zero() && b.is_zero())
    }
}

/// Splits along the block structure of block-aligned bases: the boundary and lift
/// columns span the exact summand, the homology columns the summand with zero boundary.
pub fn split_symplectic(s: &SymplecticComplex, compat: &CompatibleBases) -> Result<SymplecticSplit, SymplecticError> {
    s.validate()?;
    let n = s.n();
    let h = compute_homology(&s.base)?;
    let mut exact_emb = Vec::with_capacity(n + 1);
    let mut dzero_emb = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let o = compat.bases.degree(p);
        if compat.layout.len() != n + 1
            || o.shape() != (s.base.dim(p), s.base.dim(p))
            || !o.has_independent_columns()
        {
            return Err(SymplecticError::NotAligned { degree: p });
        }
        let e = o.select_columns(&compat.exact_columns(p));
        let z = o.select_columns(&compat.homology_columns(p));
        let d = h.degree(p);
        let aligned = e.cols() == d.boundaries.cols() + d.lifts.cols()
            && in_column_span(&e, &d.boundaries)
            && z.cols() == d.betti()
            && (&s.base.boundary(p) * &z).is_zero();
        if !aligned {
            return Err(SymplecticError::NotAligned { degree: p });
        }
        exact_emb.push(e);
        dzero_emb.push(z);
    }
    let exact = restrict(&s.base, exact_emb).map_err(|e| match e {
        ComplexError::Linalg { degree, .. } => SymplecticError::NotAligned { degree },
        other => other.into(),
    })?;
    let dzero = restrict(&s.base, dzero_emb)?;
    let restricted = |emb: &[Matrix]| -> Vec<Matrix> { (0..=n).map(|p| s.gram(p, &emb[p], &emb[n - p])).collect() };
    let cross_blocks = (0..=n)
        .map(|p| {
            (
                s.gram(p, &exact.embedding[p], &dzero.embedding[n - p]),
                s.gram(p, &dzero.embedding[p], &exact.embedding[n - p]),
            )
        })
        .collect();
    Ok(SymplecticSplit {
        exact: SymplecticSummand {
            complex: SymplecticComplex::new(exact.complex, restricted(&exact.embedding)),
            embedding: exact.embedding,
        },
        dzero: SymplecticSummand {
            complex: SymplecticComplex::new(dzero.complex, restricted(&dzero.embedding)),
            embedding: dzero.embedding,
        },
        cross_blocks,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PfaffianError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has odd side {0}")]
    OddSide(usize),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
}

/// Exact Pfaffian by expansion along the first row, memoized over index subsets.
pub fn pfaffian(a: &Matrix) -> Result<Rational, PfaffianError> {
    if !a.is_square() {
        return Err(PfaffianError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let k = a.rows();
    if k % 2 == 1 {
        return Err(PfaffianError::OddSide(k));
    }
    if !is_skew_symmetric(a) {
        return Err(PfaffianError::NotSkew);
    }
    assert!(k <= 64, "Pfaffian expansion supports at most 64 rows");
    let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut memo = HashMap::new();
    Ok(pfaffian_subset(a, full, &mut memo))
}

fn pfaffian_subset(a: &Matrix, set: u64, memo: &mut HashMap<u64, Rational>) -> Rational {
    if set == 0 {
        return Rational::one();
    }
    if let Some(v) = memo.get(&set) {
        return v.clone();
    }
    let first = set.trailing_zeros() as usize;
    let rest = set & !(1u64 << first);
    let mut total = Rational::zero();
    let mut position = 0;
    let mut remaining = rest;
    while remaining != 0 {
        let j = remaining.trailing_zeros() as usize;
        remaining &= remaining - 1;
        let entry = &a[(first, j)];
        if !entry.is_zero() {
            let minor = pfaffian_subset(a, rest & !(1u64 << j), memo);
            let term = entry * minor;
            if position % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        position += 1;
    }
    memo.insert(set, total.clone());
    total
}

/// `Π_{p < n/2} det(M_p)^{(-1)^p} · |Pf(M_{n/2})|^{-1}` for the induced pairing matrices `M_p`.
pub fn rhs_pairing_formula(hp: &HomologyPairing) -> Result<Rational, SymplecticError> {
    let n = hp.n();
    let c = n / 2;
    let mut value = Rational::one();
    for p in 0..c {
        let d = determinant(&hp.matrices[p]).map_err(linalg_at(p))?;
        if d.is_zero() {
            return Err(SymplecticError::InducedDegenerate { degree: p });
        }
        value *= signed_power(&d, p % 2 == 1);
    }
    let pf = pfaffian(&hp.matrices[c])?;
    if pf.is_zero() {
        return Err(SymplecticError::InducedDegenerate { degree: c });
    }
    // n/2 is odd, so the middle factor enters inverted
    Ok(value / pf.abs())
}

/// The sign `ε` with `Tor(o) = ε · rhs` for aligned compatible bases `o`, observed to be
/// `(-1)^N` with
///
/// ```text
/// N = Σ_{p<n/2} [h_p (b_p + b_{p-1}) + b_p b_{p-1}] + Σ_{j even, j+1<n/2} b_j + b_{n/2} h_{n/2} / 2
/// ```
///
/// where `b_p = rank ∂_{p+1}` and `h_p = dim H_p`. The first sum counts the transpositions
/// needed to bring the dual bases above the middle into the block order of the torsion
/// formula; the last term does the same for the middle degree.
pub fn compatible_torsion_sign(h: &HomologyData) -> Rational {
    let n = h.degrees.len() - 1;
    let c = n / 2;
    let b: Vec<usize> = h.degrees.iter().map(|d| d.boundaries.cols()).collect();
    let betti = h.betti();
    let below = |p: usize| if p == 0 { 0 } else { b[p - 1] };
    let mut exponent = b[c] * betti[c] / 2;
    for p in 0..c {
        exponent += betti[p] * (b[p] + below(p)) + b[p] * below(p);
        if p % 2 == 0 && p + 1 < c {
            exponent += b[p];
        }
    }
    sign(exponent)
}

/// Both sides of the torsion formula for a symplectic complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MainTheoremCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
    /// `compatible_torsion_sign` of the instance.
    pub predicted_sign: Rational,
    pub torsion: TorsionReport,
    pub pairing: HomologyPairing,
    pub compatible_bases: CompatibleBases,
}

impl MainTheoremCheck {
    pub fn equal_up_to_sign(&self) -> bool {
        self.lhs.abs() == self.rhs.abs()
    }
}

/// Torsion in orientation-aligned compatible bases against the pairing formula.
pub fn verify_main_theorem(
    s: &SymplecticComplex,
    homology_bases: &BasisFamily,
) -> Result<MainTheoremCheck, SymplecticError> {
    s.validate()?;
    let h = compute_homology(&s.base)?;
    let compat = compatible_from_homology(s, &h)?;
    let aligned = align_with_homology(s, &h, &compat, homology_bases)?;
    let report = torsion(&s.base, &aligned.bases, homology_bases)?;
    let pairing = induced_pairing(s, &h, homology_bases)?;
    let rhs = rhs_pairing_formula(&pairing)?;
    Ok(MainTheoremCheck {
        equal: report.value == rhs,
        predicted_sign: compatible_torsion_sign(&h),
        lhs: report.value.clone(),
        rhs,
        torsion: report,
        pairing,
        compatible_bases: aligned,
    })
}

/// Torsion in arbitrary chain bases compared with the pairing formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    /// Torsion in the supplied chain bases.
    pub torsion: Rational,
    /// Torsion in the aligned compatible bases.
    pub compatible_torsion: Rational,
    pub rhs: Rational,
    /// `Π_p [c_p, o_p]^{(-1)^p}`, the ratio of the two torsions.
    pub discrepancy: Rational,
    /// Whether the supplied bases already satisfy the formula.
    pub equal: bool,
}

pub fn probe(
    s: &SymplecticComplex,
    chain_bases: &BasisFamily,
    homology_bases: &BasisFamily,
) -> Result<ProbeReport, SymplecticError> {
    let check = verify_main_theorem(s, homology_bases)?;
    let given = torsion(&s.base, chain_bases, homology_bases)?.value;
    let compat = &check.compatible_bases.bases;
    let discrepancy = base_change_factor(&s.base, compat, chain_bases, homology_bases, homology_bases)?;
    Ok(ProbeReport {
        equal: given == check.rhs,
        torsion: given,
        compatible_torsion: check.lhs,
        rhs: check.rhs,
        discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frac, int};

    fn scalar(v: i64) -> Matrix {
        Matrix::from_i64(&[&[v]])
    }

    fn middle_only(omega: Matrix) -> SymplecticComplex {
        let d = omega.rows();
        SymplecticComplex::new(
            ChainComplex::zero_boundaries(vec![0, d, 0]),
            vec![Matrix::zeros(0, 0), omega, Matrix::zeros(0, 0)],
        )
    }

    #[test]
    fn validate_examples() {
        assert!(middle_only(standard_symplectic(1)).validate().is_ok());
        assert_eq!(
            middle_only(Matrix::identity(2)).validate(),
            Err(SymplecticViolation::Antisymmetry { degree: 1, other: 1 })
        );
        let four = SymplecticComplex::new(
            ChainComplex::zero_boundaries(vec![0; 5]),
            vec![Matrix::zeros(0, 0); 5],
        );
        assert_eq!(four.validate(), Err(SymplecticViolation::TopDegree { n: 4 }));
        let degenerate = middle_only(Matrix::zeros(2, 2));
        assert_eq!(degenerate.validate(), Err(SymplecticViolation::Degenerate { degree: 1 }));
    }

    #[test]
    fn compatible_bases_examples() {
        let s = middle_only(standard_symplectic(1));
        let o = make_omega_compatible_bases(&s).unwrap();
        assert_eq!(o.bases.degree(1), &Matrix::identity(2));

        let s = SymplecticComplex::from_lower_pairings(
            ChainComplex::zero_boundaries(vec![1, 2, 1]),
            vec![scalar(7), standard_symplectic(1)],
        );
        s.validate().unwrap();
        let o = make_omega_compatible_bases(&s).unwrap();
        assert_eq!(o.bases.degree(0), &scalar(1));
        assert_eq!(o.bases.degree(2)[(0, 0)], frac(1, 7));

        let s = middle_only(standard_symplectic(1).scale(&int(2)));
        let o = make_omega_compatible_bases(&s).unwrap();
        assert_eq!(s.gram(1, o.bases.degree(1), o.bases.degree(1)), standard_symplectic(1));
        let expected = Matrix::from_rows(vec![vec![frac(1, 2), int(0)], vec![int(0), int(1)]], 2).unwrap();
        assert_eq!(o.bases.degree(1), &expected);
    }

    #[test]
    fn pfaffian_examples() {
        assert_eq!(pfaffian(&standard_symplectic(1)).unwrap(), int(1));
        let blocks = Matrix::block_diag(
            &standard_symplectic(1).scale(&int(2)),
            &standard_symplectic(1).scale(&int(3)),
        );
        assert_eq!(pfaffian(&blocks).unwrap(), int(6));
        assert_eq!(pfaffian(&Matrix::zeros(0, 0)).unwrap(), int(1));
        assert_eq!(pfaffian(&Matrix::zeros(3, 3)), Err(PfaffianError::OddSide(3)));
        assert_eq!(pfaffian(&Matrix::identity(2)), Err(PfaffianError::NotSkew));
        // 4x4 closed form: af - be + cd
        let m = Matrix::from_i64(&[&[0, 1, 2, 3], &[-1, 0, 4, 5], &[-2, -4, 0, 6], &[-3, -5, -6, 0]]);
        assert_eq!(pfaffian(&m).unwrap(), int(6 - 2 * 5 + 3 * 4));
    }

    #[test]
    fn rhs_formula_examples() {
        let empty = HomologyPairing {
            matrices: vec![Matrix::zeros(0, 0); 3],
        };
        assert_eq!(rhs_pairing_formula(&empty).unwrap(), int(1));
        let std = HomologyPairing {
            matrices: vec![Matrix::zeros(0, 0), standard_symplectic(1), Matrix::zeros(0, 0)],
        };
        assert_eq!(rhs_pairing_formula(&std).unwrap(), int(1));
        let mixed = HomologyPairing {
            matrices: vec![scalar(3), standard_symplectic(1).scale(&int(2)), scalar(-3)],
        };
        assert_eq!(rhs_pairing_formula(&mixed).unwrap(), frac(3, 2));
    }

    #[test]
    fn align_orientation_swaps_first_pair() {
        let s = middle_only(standard_symplectic(2));
        let o = make_omega_compatible_bases(&s).unwrap();
        let same = BasisFamily(vec![Matrix::zeros(0, 0), Matrix::identity(4), Matrix::zeros(0, 0)]);
        assert_eq!(align_orientation(&s, &o, &same).unwrap(), o);
        let mut neg = Matrix::identity(4);
        neg[(0, 0)] = int(-1);
        let opposite = BasisFamily(vec![Matrix::zeros(0, 0), neg, Matrix::zeros(0, 0)]);
        let a = align_orientation(&s, &o, &opposite).unwrap();
        assert!(a.flipped);
        let gram = s.gram(1, a.bases.degree(1), a.bases.degree(1));
        let mut expected = standard_symplectic(2);
        expected[(0, 2)] = int(-1);
        expected[(2, 0)] = int(1);
        assert_eq!(gram, expected);
    }

    #[test]
    fn dzero_instance_satisfies_formula() {
        let s = SymplecticComplex::from_lower_pairings(
            ChainComplex::zero_boundaries(vec![1, 2, 1]),
            vec![scalar(3), standard_symplectic(1).scale(&int(2))],
        );
        let h = BasisFamily(vec![scalar(1), Matrix::identity(2), scalar(1)]);
        let check = verify_main_theorem(&s, &h).unwrap();
        assert_eq!(check.rhs, frac(3, 2));
        assert!(check.equal, "lhs {} rhs {}", check.lhs, check.rhs);
    }

    #[test]
    fn split_of_dzero_input_has_empty_exact_part() {
        let s = middle_only(standard_symplectic(1));
        let o = make_omega_compatible_bases(&s).unwrap();
        let split = split_symplectic(&s, &o).unwrap();
        assert_eq!(split.exact.complex.base.dims(), &[0, 0, 0]);
        assert!(split.is_orthogonal());
        split.dzero.complex.validate().unwrap();
    }
}
