mod common;

use common::{gcd, naive_invariant_factors};
use kcocycle::{
    adjacency_matrix, cokernel, kernel_basis, ktheory_2graph, smith_normal_form, AbelianGroup,
    Error, IntMatrix, Skeleton,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn loops(m: usize, n: usize) -> (IntMatrix, IntMatrix) {
    let s = Skeleton::bouquet(&[m, n]);
    (adjacency_matrix(&s, 1).unwrap(), adjacency_matrix(&s, 2).unwrap())
}

fn cyclic(d: usize) -> AbelianGroup {
    AbelianGroup::from_cyclic_orders(0, &[BigInt::from(d)])
}

#[test]
fn kunneth_grid() {
    for m in 2..=6 {
        for n in 2..=6 {
            let (a, b) = loops(m, n);
            let k = ktheory_2graph(&a, &b).unwrap();
            let expected = cyclic(gcd(m - 1, n - 1));
            assert_eq!(k.k0, expected, "K0 for ({m}, {n})");
            assert_eq!(k.k1, expected, "K1 for ({m}, {n})");
        }
    }
}

#[test]
fn torus() {
    let (a, b) = loops(1, 1);
    let k = ktheory_2graph(&a, &b).unwrap();
    assert_eq!(k.k0, AbelianGroup::free(2));
    assert_eq!(k.k1, AbelianGroup::free(2));
}

#[test]
fn one_trivial_color() {
    // With M1 = 1 the row map is (0, 1 - n) and the column map (n - 1 ; 0).
    for n in 2..=5 {
        let (a, b) = loops(1, n);
        let k = ktheory_2graph(&a, &b).unwrap();
        assert_eq!(k.k0, cyclic(n - 1));
        assert_eq!(k.k1, cyclic(n - 1));
    }
}

#[test]
fn non_commuting_pair_is_rejected() {
    let a = IntMatrix::from_rows(&[vec![1i64, 1], vec![0, 1]]).unwrap();
    let b = IntMatrix::from_rows(&[vec![1i64, 0], vec![1, 1]]).unwrap();
    assert!(matches!(ktheory_2graph(&a, &b), Err(Error::NonCommuting)));
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let r = rng.random_range(1..=6);
    let c = rng.random_range(1..=6);
    (0..r).map(|_| (0..c).map(|_| rng.random_range(-9..=9)).collect()).collect()
}

#[test]
fn smith_form_matches_naive_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for _ in 0..200 {
        let rows = random_matrix(&mut rng);
        let a = IntMatrix::from_rows(&rows).unwrap();
        let snf = smith_normal_form(&a);
        assert_eq!(snf.left.mul(&a).unwrap().mul(&snf.right).unwrap(), snf.diagonal);
        assert_eq!(snf.invariant_factors(), naive_invariant_factors(&rows), "{rows:?}");
    }
}

proptest! {
    #[test]
    fn smith_form_properties(rows in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-9i64..=9, c), r)
    })) {
        let a = IntMatrix::from_rows(&rows).unwrap();
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.left.mul(&a).unwrap().mul(&snf.right).unwrap(), snf.diagonal.clone());
        prop_assert_eq!(snf.right.mul(&snf.right_inverse).unwrap(), IntMatrix::identity(a.cols()));
        let d = snf.invariant_factors();
        for w in d.windows(2) {
            if w[1] != BigInt::from(0) {
                prop_assert!(&w[1] % &w[0] == BigInt::from(0));
            }
        }
        let rank = d.iter().filter(|x| **x != BigInt::from(0)).count();
        prop_assert_eq!(rank, snf.rank());
        for v in kernel_basis(&a) {
            let col = IntMatrix::from_vec(a.cols(), 1, v).unwrap();
            prop_assert!(a.mul(&col).unwrap().is_zero());
        }
        prop_assert_eq!(kernel_basis(&a).len(), a.cols() - rank);
        prop_assert_eq!(cokernel(&a).free_rank(), a.rows() - rank);
        prop_assert_eq!(d, naive_invariant_factors(&rows));
    }

    /// `M2 = 1 + x M1 + y M1^2` commutes with `M1`.
    #[test]
    fn color_swap_symmetry(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=4);
        let m1: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(0..=3)).collect()).collect();
        let a = IntMatrix::from_rows(&m1).unwrap();
        let (x, y) = (rng.random_range(0..=2), rng.random_range(0..=2));
        let a2 = a.mul(&a).unwrap();
        let mut m2 = IntMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m2[(r, c)] = BigInt::from(x) * &a[(r, c)] + &a2[(r, c)] * BigInt::from(y);
            }
            m2[(r, r)] += BigInt::from(1);
        }
        let k12 = ktheory_2graph(&a, &m2).unwrap();
        let k21 = ktheory_2graph(&m2, &a).unwrap();
        prop_assert_eq!(k12, k21);
    }
}
