//! Reidemeister torsion of based chain complexes.
//!
//! Bracket convention: for two bases `f`, `e` of one space, `[f, e] = det T`
//! where `e = f T`, i.e. `T` expresses the vectors of `e` in the basis `f`.
//! The torsion of a complex with chain bases `c_p` and homology bases `h_p` is
//!
//! ```text
//! Tor = Π_p [b_p ⊕ h_p ⊕ s(b_{p-1}), c_p]^{(-1)^{p+1}}
//! ```
//!
//! where `b_p` is a basis of the boundaries in degree `p` and `s` is a section of `∂_p`.

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::complex::{
    class_change_det, class_coordinates, compute_homology, is_homology_basis, BasisFamily,
    ChainComplex, ComplexError, ComplexViolation, HomologyData,
};
use crate::linalg::{
    change_of_basis_det, determinant, in_column_span, inverse, kernel_basis, signed_power,
    solve_linear, LinalgError, Matrix, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorsionError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("{what}: expected {expected} degrees, found {found}")]
    FamilyLength {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("degree {degree}: chain basis is not a basis of C_{degree}")]
    ChainBasis { degree: usize },
    #[error("degree {degree}: homology basis columns are not cycles with independent classes spanning H_{degree}")]
    HomologyBasis { degree: usize },
    #[error("degree {degree}: sections are inconsistent with the boundary map")]
    Sections { degree: usize },
    #[error("complex is not acyclic")]
    NotAcyclic,
    #[error("short exact sequence: {0}")]
    Ses(#[from] SesViolation),
    #[error("degree {degree}: {source}")]
    Linalg {
        degree: usize,
        #[source]
        source: LinalgError,
    },
}

fn linalg_at(degree: usize) -> impl Fn(LinalgError) -> TorsionError {
    move |source| TorsionError::Linalg { degree, source }
}

/// `[f, e] = det T` with `e = f T`.
pub fn bracket(f: &Matrix, e: &Matrix) -> Result<Rational, LinalgError> {
    change_of_basis_det(e, f)
}

/// The auxiliary choices entering the torsion formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sections {
    /// `boundary_bases[p]` is a basis of `im ∂_{p+1}` inside `C_p`.
    pub boundary_bases: Vec<Matrix>,
    /// `lifts[p]` satisfies `∂_p lifts[p] = boundary_bases[p-1]`; `lifts[0]` is empty.
    pub lifts: Vec<Matrix>,
}

impl Sections {
    /// Pivot-column boundary bases with their zero-free-variable preimages.
    pub fn canonical(h: &HomologyData) -> Sections {
        Sections {
            boundary_bases: h.degrees.iter().map(|d| d.boundaries.clone()).collect(),
            lifts: h.degrees.iter().map(|d| d.lifts.clone()).collect(),
        }
    }

    /// Checks that the boundary bases are bases of the boundary spaces and the lifts are preimages.
    pub fn validate(&self, c: &ChainComplex, h: &HomologyData) -> Result<(), TorsionError> {
        let len = c.n() + 1;
        for (what, fam) in [("boundary bases", &self.boundary_bases), ("lifts", &self.lifts)] {
            if fam.len() != len {
                return Err(TorsionError::FamilyLength {
                    what,
                    expected: len,
                    found: fam.len(),
                });
            }
        }
        for p in 0..len {
            let b = &self.boundary_bases[p];
            let reference = &h.degree(p).boundaries;
            let ok = b.shape() == reference.shape()
                && change_of_basis_det(b, reference).is_ok();
            if !ok {
                return Err(TorsionError::Sections { degree: p });
            }
            let l = &self.lifts[p];
            let target = if p == 0 {
                Matrix::zeros(0, 0)
            } else {
                self.boundary_bases[p - 1].clone()
            };
            if l.rows() != c.dim(p) || l.cols() != target.cols() || c.boundary(p).try_mul(l).ok() != Some(target) {
                return Err(TorsionError::Sections { degree: p });
            }
        }
        Ok(())
    }
}

/// A torsion value with every ingredient used to compute it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionReport {
    pub value: Rational,
    /// `factors[p] = [b_p ⊕ h_p ⊕ s(b_{p-1}), c_p]^{(-1)^{p+1}}`; their product is `value`.
    pub factors: Vec<Rational>,
    pub chain_bases: BasisFamily,
    pub homology_bases: BasisFamily,
    pub sections: Sections,
}

fn check_family_len(what: &'static str, fam: &BasisFamily, c: &ChainComplex) -> Result<(), TorsionError> {
    if fam.len() != c.n() + 1 {
        return Err(TorsionError::FamilyLength {
            what,
            expected: c.n() + 1,
            found: fam.len(),
        });
    }
    Ok(())
}

/// Checks that `chain` is a chain basis family and `homology` a homology basis family of `c`.
pub fn validate_bases(
    c: &ChainComplex,
    h: &HomologyData,
    chain: &BasisFamily,
    homology: &BasisFamily,
) -> Result<(), TorsionError> {
    check_family_len("chain bases", chain, c)?;
    check_family_len("homology bases", homology, c)?;
    for p in 0..=c.n() {
        let m = chain.degree(p);
        if m.shape() != (c.dim(p), c.dim(p)) || !m.has_independent_columns() {
            return Err(TorsionError::ChainBasis { degree: p });
        }
        if !is_homology_basis(c, h, p, homology.degree(p)) {
            return Err(TorsionError::HomologyBasis { degree: p });
        }
    }
    Ok(())
}

/// Torsion with canonical boundary bases and sections.
pub fn torsion(
    c: &ChainComplex,
    chain_bases: &BasisFamily,
    homology_bases: &BasisFamily,
) -> Result<TorsionReport, TorsionError> {
    let h = compute_homology(c)?;
    let sections = Sections::canonical(&h);
    torsion_inner(c, &h, chain_bases, homology_bases, sections)
}

/// Torsion with caller-supplied boundary bases and sections.
pub fn torsion_with_sections(
    c: &ChainComplex,
    chain_bases: &BasisFamily,
    homology_bases: &BasisFamily,
    sections: &Sections,
) -> Result<TorsionReport, TorsionError> {
    let h = compute_homology(c)?;
    sections.validate(c, &h)?;
    torsion_inner(c, &h, chain_bases, homology_bases, sections.clone())
}

fn torsion_inner(
    c: &ChainComplex,
    h: &HomologyData,
    chain_bases: &BasisFamily,
    homology_bases: &BasisFamily,
    sections: Sections,
) -> Result<TorsionReport, TorsionError> {
    validate_bases(c, h, chain_bases, homology_bases)?;
    let mut factors = Vec::with_capacity(c.n() + 1);
    for p in 0..=c.n() {
        let assembled = Matrix::hcat(
            c.dim(p),
            &[&sections.boundary_bases[p], homology_bases.degree(p), &sections.lifts[p]],
        )
        .map_err(linalg_at(p))?;
        let raw = bracket(&assembled, chain_bases.degree(p)).map_err(linalg_at(p))?;
        factors.push(signed_power(&raw, p % 2 == 0));
    }
    let value = factors.iter().fold(Rational::one(), |acc, f| acc * f);
    Ok(TorsionReport {
        value,
        factors,
        chain_bases: chain_bases.clone(),
        homology_bases: homology_bases.clone(),
        sections,
    })
}

/// `Π_p ([c'_p, c_p] / [h'_p, h_p])^{(-1)^p}`: the ratio `torsion(new) / torsion(old)`.
pub fn base_change_factor(
    c: &ChainComplex,
    old_chain: &BasisFamily,
    new_chain: &BasisFamily,
    old_homology: &BasisFamily,
    new_homology: &BasisFamily,
) -> Result<Rational, TorsionError> {
    let h = compute_homology(c)?;
    validate_bases(c, &h, old_chain, old_homology)?;
    validate_bases(c, &h, new_chain, new_homology)?;
    let mut factor = Rational::one();
    for p in 0..=c.n() {
        let chain = bracket(new_chain.degree(p), old_chain.degree(p)).map_err(linalg_at(p))?;
        // [h', h] = det T with h = h' T, on classes
        let hom = class_change_det(c, &h, p, old_homology.degree(p), new_homology.degree(p))?;
        factor *= signed_power(&(chain / hom), p % 2 == 1);
    }
    Ok(factor)
}

/// Torsion of an acyclic complex as an alternating product of determinant pairings
/// `⟨u_p, α_p⟩`, where `u_p` is the top vector built from a boundary basis and its lift
/// and `α_p` is the dual top form of the volume basis `volumes[p]`.
pub fn torsion_acyclic_witten(c: &ChainComplex, volumes: &BasisFamily) -> Result<Rational, TorsionError> {
    let h = compute_homology(c)?;
    if !h.is_acyclic() {
        return Err(TorsionError::NotAcyclic);
    }
    check_family_len("volumes", volumes, c)?;
    // for an acyclic complex the cycles are the boundaries, so kernels give boundary bases
    let kernels: Vec<Matrix> = (0..=c.n()).map(|p| kernel_basis(&c.boundary(p))).collect();
    let mut value = Rational::one();
    for p in 0..=c.n() {
        let lift = if p == 0 {
            Matrix::zeros(c.dim(0), 0)
        } else {
            solve_linear(&c.boundary(p), &kernels[p - 1]).map_err(linalg_at(p))?
        };
        let u = Matrix::hcat(c.dim(p), &[&kernels[p], &lift]).map_err(linalg_at(p))?;
        let vol = volumes.degree(p);
        if vol.shape() != (c.dim(p), c.dim(p)) {
            return Err(TorsionError::ChainBasis { degree: p });
        }
        // rows of vol^{-1} are the dual functionals c*_i; the pairing is det[c*_i(u_j)]
        let dual = inverse(vol).map_err(|_| TorsionError::ChainBasis { degree: p })?;
        let pairing = determinant(&(&dual * &u)).map_err(linalg_at(p))?;
        if pairing.is_zero() {
            return Err(TorsionError::ChainBasis { degree: p });
        }
        value *= signed_power(&pairing, p % 2 == 1);
    }
    Ok(value)
}

/// A failed short-exact-sequence axiom.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SesViolation {
    #[error("complex {which}: {violation}")]
    Complex {
        which: &'static str,
        violation: ComplexViolation,
    },
    #[error("complexes have different top degrees")]
    LengthMismatch,
    #[error("{map} has {found} degrees, expected {expected}")]
    MapCount {
        map: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{map} in degree {degree} has the wrong shape")]
    MapShape { map: &'static str, degree: usize },
    #[error("inclusion is not injective in degree {degree}")]
    NotInjective { degree: usize },
    #[error("projection is not surjective in degree {degree}")]
    NotSurjective { degree: usize },
    #[error("image of inclusion differs from kernel of projection in degree {degree}")]
    NotExact { degree: usize },
    #[error("{map} does not commute with the boundary in degree {degree}")]
    NotChainMap { map: &'static str, degree: usize },
}

/// `0 -> A -> B -> D -> 0`, degreewise exact, with chain maps `inclusion` and `projection`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortExactSequence {
    pub a: ChainComplex,
    pub b: ChainComplex,
    pub d: ChainComplex,
    pub inclusion: Vec<Matrix>,
    pub projection: Vec<Matrix>,
}

impl ShortExactSequence {
    pub fn validate(&self) -> Result<(), SesViolation> {
        for (which, c) in [("A", &self.a), ("B", &self.b), ("D", &self.d)] {
            c.validate()
                .map_err(|violation| SesViolation::Complex { which, violation })?;
        }
        let n = self.b.n();
        if self.a.n() != n || self.d.n() != n {
            return Err(SesViolation::LengthMismatch);
        }
        for (map, maps) in [("inclusion", &self.inclusion), ("projection", &self.projection)] {
            if maps.len() != n + 1 {
                return Err(SesViolation::MapCount {
                    map,
                    expected: n + 1,
                    found: maps.len(),
                });
            }
        }
        for p in 0..=n {
            let (i, q) = (&self.inclusion[p], &self.projection[p]);
            if i.shape() != (self.b.dim(p), self.a.dim(p)) {
                return Err(SesViolation::MapShape { map: "inclusion", degree: p });
            }
            if q.shape() != (self.d.dim(p), self.b.dim(p)) {
                return Err(SesViolation::MapShape { map: "projection", degree: p });
            }
            if i.rank() != self.a.dim(p) {
                return Err(SesViolation::NotInjective { degree: p });
            }
            if q.rank() != self.d.dim(p) {
                return Err(SesViolation::NotSurjective { degree: p });
            }
            if !(q * i).is_zero() || self.a.dim(p) + self.d.dim(p) != self.b.dim(p) {
                return Err(SesViolation::NotExact { degree: p });
            }
        }
        for p in 1..=n {
            if &self.b.boundary(p) * &self.inclusion[p] != &self.inclusion[p - 1] * &self.a.boundary(p) {
                return Err(SesViolation::NotChainMap { map: "inclusion", degree: p });
            }
            if &self.d.boundary(p) * &self.projection[p] != &self.projection[p - 1] * &self.b.boundary(p) {
                return Err(SesViolation::NotChainMap { map: "projection", degree: p });
            }
        }
        Ok(())
    }
}

/// Chain and homology bases for the three complexes of a short exact sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SesBases {
    pub chain_a: BasisFamily,
    pub chain_b: BasisFamily,
    pub chain_d: BasisFamily,
    pub homology_a: BasisFamily,
    pub homology_b: BasisFamily,
    pub homology_d: BasisFamily,
}

/// The homology long exact sequence as an acyclic based complex of top degree `3n+2`.
///
/// Slots: `C_{3p} = H_p(D)`, `C_{3p+1} = H_p(B)`, `C_{3p+2} = H_p(A)`, each in the
/// coordinates of the given homology bases, so the distinguished chain bases are the
/// standard ones. Boundaries: `∂_{3p+2} = ι_*`, `∂_{3p+1} = π_*`, `∂_{3p} = Δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongExactSequence {
    pub complex: ChainComplex,
    pub bases: BasisFamily,
}

impl LongExactSequence {
    /// Slots where the sequence fails to be exact (nonzero homology or `∂∂ ≠ 0`).
    pub fn exactness_defects(&self) -> Vec<usize> {
        if let Err(ComplexViolation::BoundarySquareNonzero { degree }) = self.complex.validate() {
            return vec![degree];
        }
        match compute_homology(&self.complex) {
            Ok(h) => h
                .betti()
                .iter()
                .enumerate()
                .filter(|(_, &b)| b > 0)
                .map(|(p, _)| p)
                .collect(),
            Err(_) => (0..=self.complex.n()).collect(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exactness_defects().is_empty()
    }
}

struct SesHomology {
    a: HomologyData,
    b: HomologyData,
    d: HomologyData,
}

fn ses_homology(
    s: &ShortExactSequence,
    bases: (&BasisFamily, &BasisFamily, &BasisFamily),
) -> Result<SesHomology, TorsionError> {
    s.validate()?;
    let out = SesHomology {
        a: compute_homology(&s.a)?,
        b: compute_homology(&s.b)?,
        d: compute_homology(&s.d)?,
    };
    for (c, h, fam) in [(&s.a, &out.a, bases.0), (&s.b, &out.b, bases.1), (&s.d, &out.d, bases.2)] {
        check_family_len("homology bases", fam, c)?;
        for p in 0..=c.n() {
            if !is_homology_basis(c, h, p, fam.degree(p)) {
                return Err(TorsionError::HomologyBasis { degree: p });
            }
        }
    }
    Ok(out)
}

pub fn long_exact_sequence(
    s: &ShortExactSequence,
    homology_a: &BasisFamily,
    homology_b: &BasisFamily,
    homology_d: &BasisFamily,
) -> Result<LongExactSequence, TorsionError> {
    let hs = ses_homology(s, (homology_a, homology_b, homology_d))?;
    let n = s.b.n();
    let mut dims = Vec::with_capacity(3 * n + 3);
    for p in 0..=n {
        dims.push(homology_d.degree(p).cols());
        dims.push(homology_b.degree(p).cols());
        dims.push(homology_a.degree(p).cols());
    }
    let mut boundaries = Vec::with_capacity(3 * n + 2);
    for slot in 1..=3 * n + 2 {
        let p = slot / 3;
        let m = match slot % 3 {
            // Δ : H_p(D) -> H_{p-1}(A)
            0 => {
                let z = homology_d.degree(p);
                let lifted = solve_linear(&s.projection[p], z).map_err(linalg_at(p))?;
                let bd = &s.b.boundary(p) * &lifted;
                let pulled = solve_linear(&s.inclusion[p - 1], &bd).map_err(linalg_at(p - 1))?;
                class_coordinates(&s.a, &hs.a, p - 1, homology_a.degree(p - 1), &pulled)?
            }
            // π_* : H_p(B) -> H_p(D)
            1 => {
                let img = &s.projection[p] * homology_b.degree(p);
                class_coordinates(&s.d, &hs.d, p, homology_d.degree(p), &img)?
            }
            // ι_* : H_p(A) -> H_p(B)
            _ => {
                let img = &s.inclusion[p] * homology_a.degree(p);
                class_coordinates(&s.b, &hs.b, p, homology_b.degree(p), &img)?
            }
        };
        boundaries.push(m);
    }
    let complex = ChainComplex::new(dims, boundaries);
    let bases = complex.standard_bases();
    Ok(LongExactSequence { complex, bases })
}

/// Both sides of the multiplicativity identity `Tor(B) = Tor(A) Tor(D) Tor(H)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilnorCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    pub tor_a: Rational,
    pub tor_b: Rational,
    pub tor_d: Rational,
    pub tor_les: Rational,
    /// Per degree, `[c^B_p, c^A_p ⊕ lift(c^D_p)]`.
    pub compatibility: Vec<Rational>,
    /// Every compatibility determinant is `±1`.
    pub compatible: bool,
    pub equal: bool,
    pub equal_up_to_sign: bool,
    pub les_exact: bool,
}

pub fn milnor_product_check(s: &ShortExactSequence, bases: &SesBases) -> Result<MilnorCheck, TorsionError> {
    let les = long_exact_sequence(s, &bases.homology_a, &bases.homology_b, &bases.homology_d)?;
    let tor_a = torsion(&s.a, &bases.chain_a, &bases.homology_a)?.value;
    let tor_b = torsion(&s.b, &bases.chain_b, &bases.homology_b)?.value;
    let tor_d = torsion(&s.d, &bases.chain_d, &bases.homology_d)?.value;
    let les_exact = les.is_exact();
    let tor_les = torsion(&les.complex, &les.bases, &BasisFamily::empty_for(&les.complex))?.value;
    let mut compatibility = Vec::with_capacity(s.b.n() + 1);
    for p in 0..=s.b.n() {
        let lifted = solve_linear(&s.projection[p], bases.chain_d.degree(p)).map_err(linalg_at(p))?;
        let included = &s.inclusion[p] * bases.chain_a.degree(p);
        let combined = Matrix::hcat(s.b.dim(p), &[&included, &lifted]).map_err(linalg_at(p))?;
        compatibility.push(bracket(bases.chain_b.degree(p), &combined).map_err(linalg_at(p))?);
    }
    let compatible = compatibility.iter().all(|d| d.abs().is_one());
    let rhs = &tor_a * &tor_d * &tor_les;
    Ok(MilnorCheck {
        equal: tor_b == rhs,
        equal_up_to_sign: tor_b.abs() == rhs.abs(),
        lhs: tor_b.clone(),
        rhs,
        tor_a,
        tor_b,
        tor_d,
        tor_les,
        compatibility,
        compatible,
        les_exact,
    })
}

/// `true` iff the columns of `m` lie in the boundary space of degree `p`.
pub fn is_boundary(h: &HomologyData, p: usize, m: &Matrix) -> bool {
    in_column_span(&h.degree(p).boundaries, m)
}
