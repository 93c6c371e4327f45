use num::{One, Zero};
use proptest::prelude::*;

use rtorsion::linalg::{
    change_of_basis_det, column_space_basis, determinant, frac, in_column_span, inverse, kernel_basis,
    rref_decompose, solve_linear, Matrix, Rational,
};

/// Determinant by the permutation expansion.
fn leibniz(m: &Matrix) -> Rational {
    let n = m.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Rational::zero();
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, m: &Matrix, total: &mut Rational) {
    if k == perm.len() {
        let mut term = Rational::one();
        for (i, &j) in perm.iter().enumerate() {
            term *= &m[(i, j)];
        }
        let inversions = (0..perm.len())
            .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        if inversions % 2 == 0 {
            *total += term;
        } else {
            *total -= term;
        }
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, m, total);
        perm.swap(k, i);
    }
}

fn entry() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=5).prop_map(|(a, b)| frac(a, b))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(entry(), rows * cols).prop_map(move |d| Matrix::from_vec(rows, cols, d).unwrap())
}

fn any_matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (0..=max, 0..=max).prop_flat_map(|(r, c)| matrix(r, c))
}

fn square(max: usize) -> impl Strategy<Value = Matrix> {
    (0..=max).prop_flat_map(|n| matrix(n, n))
}

/// Sparse integer entries, so that singular matrices show up regularly.
fn sparse_square(max: usize) -> impl Strategy<Value = Matrix> {
    (0..=max).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![3 => Just(0i64), 1 => -2i64..=2], n * n)
            .prop_map(move |d| Matrix::from_vec(n, n, d.into_iter().map(|v| frac(v, 1)).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rank_plus_nullity_is_column_count(m in any_matrix(8)) {
        let k = kernel_basis(&m);
        prop_assert_eq!(m.rank() + k.cols(), m.cols());
        prop_assert!((&m * &k).is_zero());
        prop_assert_eq!(k.rank(), k.cols());
        let image = column_space_basis(&m);
        prop_assert_eq!(image.cols(), m.rank());
        prop_assert!(in_column_span(&image, &m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn determinant_matches_permutation_expansion(m in square(6)) {
        prop_assert_eq!(determinant(&m).unwrap(), leibniz(&m));
    }

    #[test]
    fn singular_matrices_have_zero_determinant(m in sparse_square(5)) {
        let d = determinant(&m).unwrap();
        prop_assert_eq!(d.is_zero(), m.rank() < m.rows());
        prop_assert_eq!(inverse(&m).is_ok(), !d.is_zero());
    }

    #[test]
    fn inverse_determinant_is_reciprocal(m in square(7)) {
        let d = determinant(&m).unwrap();
        prop_assume!(!d.is_zero());
        let inv = inverse(&m).unwrap();
        prop_assert_eq!(&m * &inv, Matrix::identity(m.rows()));
        prop_assert_eq!(determinant(&inv).unwrap(), d.recip());
    }

    #[test]
    fn determinant_is_multiplicative(a in square(5), seed in any::<u64>()) {
        let n = a.rows();
        let mut g = rtorsion::generators::Generator::new(seed, 5);
        let b = g.matrix(n, n);
        prop_assert_eq!(determinant(&(&a * &b)).unwrap(), determinant(&a).unwrap() * determinant(&b).unwrap());
    }

    #[test]
    fn change_of_basis_is_reciprocal(seed in any::<u64>(), n in 0usize..=6) {
        let mut g = rtorsion::generators::Generator::new(seed, 5);
        let (old, _) = g.invertible(n);
        let (t, _) = g.invertible(n);
        let new = &old * &t;
        let forward = change_of_basis_det(&new, &old).unwrap();
        prop_assert_eq!(&forward, &determinant(&t).unwrap());
        prop_assert_eq!(change_of_basis_det(&old, &new).unwrap(), forward.recip());
        let (s, _) = g.invertible(n);
        let third = &new * &s;
        let chained = change_of_basis_det(&third, &new).unwrap() * &forward;
        prop_assert_eq!(change_of_basis_det(&third, &old).unwrap(), chained);
    }

    #[test]
    fn solve_is_canonical(a in any_matrix(6), seed in any::<u64>()) {
        let mut g = rtorsion::generators::Generator::new(seed, 5);
        let y = g.matrix(a.cols(), 2);
        let b = &a * &y;
        let x = solve_linear(&a, &b).unwrap();
        prop_assert_eq!(&a * &x, b.clone());
        prop_assert_eq!(&solve_linear(&a, &b).unwrap(), &x);
        let pivots = rref_decompose(&a).pivots;
        for j in (0..a.cols()).filter(|j| !pivots.contains(j)) {
            prop_assert!(x.row(j).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn rref_is_idempotent_with_leftmost_pivots(m in any_matrix(6)) {
        let r = rref_decompose(&m);
        prop_assert_eq!(&r.transform * &m, r.rref.clone());
        let again = rref_decompose(&r.rref);
        prop_assert_eq!(&again.rref, &r.rref);
        prop_assert_eq!(&again.pivots, &r.pivots);
        for (i, &p) in r.pivots.iter().enumerate() {
            prop_assert!(r.rref.row(i)[..p].iter().all(Zero::is_zero));
            prop_assert!(r.rref[(i, p)].is_one());
        }
        prop_assert_eq!(r.pivots.len(), m.transpose().rank());
    }
}

#[test]
fn inconsistent_system_has_no_solution() {
    let a = Matrix::from_i64(&[&[1, 0], &[0, 0]]);
    let b = Matrix::from_i64(&[&[1], &[1]]);
    assert!(solve_linear(&a, &b).is_err());
    assert!(!in_column_span(&a, &b));
}

#[test]
fn empty_matrices() {
    let e = Matrix::zeros(0, 0);
    assert_eq!(determinant(&e).unwrap(), Rational::one());
    assert_eq!(kernel_basis(&Matrix::zeros(3, 0)).shape(), (0, 0));
    assert_eq!(kernel_basis(&Matrix::zeros(0, 3)), Matrix::identity(3));
    assert_eq!(solve_linear(&Matrix::zeros(2, 0), &Matrix::zeros(2, 1)).unwrap().shape(), (0, 1));
}
