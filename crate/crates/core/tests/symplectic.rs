use num::{One, Zero};
use proptest::prelude::*;

use rtorsion::complex::{compute_homology, BasisFamily, ChainComplex};
use rtorsion::generators::{gen_homology_bases, gen_symplectic, GenConfig, Generator, SymplecticKind};
use rtorsion::linalg::{determinant, frac, int, Matrix, Rational};
use rtorsion::symplectic::{
    compatible_torsion_sign, induced_pairing, is_omega_compatible, make_omega_compatible_bases, pfaffian,
    split_symplectic, standard_symplectic, verify_main_theorem, PfaffianError, SymplecticComplex,
    SymplecticViolation,
};
use rtorsion::torsion::torsion;

/// `Pf(A) = Σ_σ sgn(σ) Π a_{σ(2i) σ(2i+1)} / (2^m m!)` over all permutations.
fn pfaffian_by_permutations(a: &Matrix) -> Rational {
    let n = a.rows();
    let m = n / 2;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Rational::zero();
    all_perms(&mut perm, 0, &mut |p| {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        let mut term = Rational::one();
        for i in 0..m {
            term *= &a[(p[2 * i], p[2 * i + 1])];
        }
        if inversions % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    });
    let norm: u64 = (1..=m as u64).product::<u64>() << m;
    total / int(norm as i64)
}

fn all_perms(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        all_perms(perm, k + 1, f);
        perm.swap(k, i);
    }
}

fn skew(g: &mut Generator, k: usize) -> Matrix {
    let mut a = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let v = g.rational();
            a[(j, i)] = -v.clone();
            a[(i, j)] = v;
        }
    }
    a
}

fn symplectic_instance(seed: u64, n: usize, max_dim: usize, kind: SymplecticKind) -> (SymplecticComplex, BasisFamily) {
    let cfg = GenConfig::new(seed, n, max_dim);
    let s = gen_symplectic(&cfg, kind).unwrap();
    let hom = gen_homology_bases(&cfg, &s.base).unwrap();
    (s, hom)
}

#[test]
fn pfaffian_examples() {
    assert_eq!(pfaffian(&Matrix::zeros(0, 0)).unwrap(), int(1));
    assert_eq!(pfaffian(&standard_symplectic(1)).unwrap(), int(1));
    assert_eq!(pfaffian(&standard_symplectic(3)).unwrap(), int(-1));
    assert_eq!(pfaffian(&Matrix::zeros(3, 3)), Err(PfaffianError::OddSide(3)));
    assert_eq!(pfaffian(&Matrix::identity(2)), Err(PfaffianError::NotSkew));
    let blocks: Vec<i64> = vec![2, -3, 5];
    let mut a = Matrix::zeros(6, 6);
    for (i, &v) in blocks.iter().enumerate() {
        a[(2 * i, 2 * i + 1)] = int(v);
        a[(2 * i + 1, 2 * i)] = int(-v);
    }
    assert_eq!(pfaffian(&a).unwrap(), int(-30));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfaffian_matches_permutation_formula(seed in any::<u64>(), m in 0usize..=3) {
        let mut g = Generator::new(seed, 5);
        let a = skew(&mut g, 2 * m);
        prop_assert_eq!(pfaffian(&a).unwrap(), pfaffian_by_permutations(&a));
    }

    #[test]
    fn pfaffian_squares_to_determinant(seed in any::<u64>(), k in 0usize..=8) {
        let mut g = Generator::new(seed, 5);
        let a = skew(&mut g, k);
        if k % 2 == 1 {
            prop_assert_eq!(pfaffian(&a), Err(PfaffianError::OddSide(k)));
            prop_assert!(determinant(&a).unwrap().is_zero());
            return Ok(());
        }
        let pf = pfaffian(&a).unwrap();
        prop_assert_eq!(&pf * &pf, determinant(&a).unwrap());
        let y = g.matrix(k, k);
        let moved = &(&y * &a) * &y.transpose();
        prop_assert_eq!(pfaffian(&moved).unwrap(), determinant(&y).unwrap() * pf);
    }

    #[test]
    fn induced_pairing_ignores_representatives(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 6])) {
        let (s, hom) = symplectic_instance(seed, n, if n == 2 { 6 } else { 3 }, SymplecticKind::Mixed);
        let h = compute_homology(&s.base).unwrap();
        let pairing = induced_pairing(&s, &h, &hom).unwrap();
        let mut g = Generator::new(seed ^ 0xabcdef, 5);
        let shifted = g.shift_by_boundaries(&h, &hom);
        prop_assert_eq!(&induced_pairing(&s, &h, &shifted).unwrap(), &pairing);
        for (p, m) in pairing.matrices.iter().enumerate() {
            prop_assert!(!determinant(m).unwrap().is_zero(), "degree {}", p);
            prop_assert_eq!(m, &s.gram(p, hom.degree(p), hom.degree(n - p)));
        }
        prop_assert!(!pfaffian(&pairing.matrices[n / 2]).unwrap().is_zero());
    }

    #[test]
    fn compatible_bases_and_split(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 6])) {
        let (s, _) = symplectic_instance(seed, n, if n == 2 { 6 } else { 3 }, SymplecticKind::Mixed);
        let compat = make_omega_compatible_bases(&s).unwrap();
        prop_assert!(is_omega_compatible(&s, &compat.bases));
        let split = split_symplectic(&s, &compat).unwrap();
        prop_assert!(split.is_orthogonal());
        prop_assert!(split.exact.complex.validate().is_ok());
        prop_assert!(split.dzero.complex.validate().is_ok());
        prop_assert!(split.dzero.complex.base.is_boundary_zero());
        prop_assert!(compute_homology(&split.exact.complex.base).unwrap().is_acyclic());
        let betti = compute_homology(&s.base).unwrap().betti();
        prop_assert_eq!(split.dzero.complex.base.dims().to_vec(), betti);
    }

    #[test]
    fn zero_boundary_theorem(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 6])) {
        let (s, hom) = symplectic_instance(seed, n, if n == 2 { 8 } else { 4 }, SymplecticKind::DZero);
        let check = verify_main_theorem(&s, &hom).unwrap();
        prop_assert_eq!(&check.lhs, &check.rhs);
    }

    #[test]
    fn sign_term_predicts_the_ratio(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 6])) {
        let kind = [SymplecticKind::Mixed, SymplecticKind::Exact, SymplecticKind::DZero][seed as usize % 3];
        let (s, hom) = symplectic_instance(seed, n, if n == 2 { 6 } else { 3 }, kind);
        let check = verify_main_theorem(&s, &hom).unwrap();
        let h = compute_homology(&s.base).unwrap();
        prop_assert_eq!(&check.predicted_sign, &compatible_torsion_sign(&h));
        prop_assert_eq!(&check.lhs, &(&check.predicted_sign * &check.rhs));
    }

    #[test]
    fn compatible_torsion_does_not_depend_on_the_compatible_bases(seed in any::<u64>()) {
        // o_p -> o_p M below the middle with o_{n-p} -> o_{n-p} M^{-T} keeps compatibility
        let (s, hom) = symplectic_instance(seed, 2, 6, SymplecticKind::Mixed);
        let check = verify_main_theorem(&s, &hom).unwrap();
        let mut bases = check.compatible_bases.bases.clone();
        let mut g = Generator::new(seed.wrapping_add(99), 5);
        let (m, m_inv) = g.invertible(s.base.dim(0));
        bases.0[0] = &bases.0[0] * &m;
        bases.0[2] = &bases.0[2] * &m_inv.transpose();
        prop_assert!(is_omega_compatible(&s, &bases) == is_omega_compatible(&s, &check.compatible_bases.bases));
        prop_assert_eq!(torsion(&s.base, &bases, &hom).unwrap().value, check.lhs);
    }
}

#[test]
fn exact_instances_at_top_degree_two_have_unit_torsion() {
    for seed in 0..40 {
        let (s, hom) = symplectic_instance(seed, 2, 8, SymplecticKind::Exact);
        let check = verify_main_theorem(&s, &hom).unwrap();
        assert_eq!(check.lhs, int(1), "seed {seed}");
        assert_eq!(check.rhs, int(1));
    }
}

#[test]
fn smallest_sign_counterexample() {
    // C_0 = <h, y>, C_1 = <x, y*>, C_2 = <h*, x*> with ∂x = y, ∂x* = y*
    let d1 = Matrix::from_i64(&[&[0, 0], &[1, 0]]);
    let d2 = Matrix::from_i64(&[&[0, 0], &[0, 1]]);
    let omega0 = Matrix::from_i64(&[&[1, 0], &[0, 1]]);
    let omega1 = Matrix::from_i64(&[&[0, -1], &[1, 0]]);
    let s = SymplecticComplex::from_lower_pairings(ChainComplex::new(vec![2, 2, 2], vec![d1, d2]), vec![omega0, omega1]);
    assert!(s.validate().is_ok());
    let hom = BasisFamily(vec![
        Matrix::from_i64(&[&[1], &[0]]),
        Matrix::zeros(2, 0),
        Matrix::from_i64(&[&[1], &[0]]),
    ]);
    let check = verify_main_theorem(&s, &hom).unwrap();
    assert_eq!(check.rhs, int(1));
    assert_eq!(check.lhs, int(-1));
    assert_eq!(check.predicted_sign, int(-1));
}

#[test]
fn validation_names_the_violation() {
    let base = ChainComplex::zero_boundaries(vec![0, 2, 0]);
    let empty = Matrix::zeros(0, 0);
    let s = SymplecticComplex::new(base.clone(), vec![empty.clone(), Matrix::zeros(2, 2), empty.clone()]);
    assert_eq!(s.validate(), Err(SymplecticViolation::Degenerate { degree: 1 }));
    let mut j = standard_symplectic(1);
    j[(0, 1)] = frac(1, 2);
    let s = SymplecticComplex::new(base, vec![empty.clone(), j, empty]);
    assert!(matches!(s.validate(), Err(SymplecticViolation::Antisymmetry { .. })));
}

#[test]
fn flips_occur_and_keep_the_zero_boundary_identity() {
    let mut flipped = 0;
    for seed in 0..60 {
        let (s, hom) = symplectic_instance(seed, 2, 6, SymplecticKind::DZero);
        let check = verify_main_theorem(&s, &hom).unwrap();
        assert_eq!(check.lhs, check.rhs);
        assert!(!check.rhs.is_zero());
        flipped += usize::from(check.compatible_bases.flipped);
    }
    assert!(flipped > 0);
}
