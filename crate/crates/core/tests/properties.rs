use proptest::prelude::*;

use qgroupoid::dcx::{assemble, total_cohomology, verify_double_complex};
use qgroupoid::exactla::{kernel, rank, rat, SparseMatrix};
use qgroupoid::liealg::{ce_cohomology_dims, validate_lie, LieAlgebra, StructureConstants};
use qgroupoid::oracle::{self, Table};
use qgroupoid::superalg::is_homological;
use qgroupoid::{builders, oracle::dense_rank};

fn constants() -> impl Strategy<Value = (usize, Vec<(usize, usize, usize, i64)>)> {
    (1usize..=4).prop_flat_map(|dim| {
        let slots: Vec<(usize, usize, usize)> =
            (0..dim).flat_map(|i| (i + 1..dim).flat_map(move |j| (0..dim).map(move |k| (i, j, k)))).collect();
        let n = slots.len();
        (Just(dim), proptest::collection::vec(prop_oneof![3 => Just(0i64), 1 => -2i64..=2], n)).prop_map(move |(d, cs)| {
            (d, slots.iter().zip(cs).filter(|(_, c)| *c != 0).map(|(&(i, j, k), c)| (i, j, k, c)).collect())
        })
    })
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homological_iff_jacobi((dim, entries) in constants()) {
        let c = StructureConstants::from_i64(dim, &entries);
        let homological = is_homological(&c.ce_derivation()).unwrap().holds();
        prop_assert_eq!(homological, oracle::jacobi_holds(&Table::from_i64(dim, &entries)));
        prop_assert_eq!(homological, validate_lie(&c).is_ok());
    }

    #[test]
    fn ce_dims_match_brute_force((dim, entries) in constants()) {
        let t = Table::from_i64(dim, &entries);
        prop_assume!(oracle::jacobi_holds(&t));
        let g = LieAlgebra::new(StructureConstants::from_i64(dim, &entries)).unwrap();
        prop_assert_eq!(ce_cohomology_dims(&g, dim), oracle::ce_dims(&t, dim));
    }

    #[test]
    fn trivial_squares_collapse((dim, entries) in constants()) {
        let t = Table::from_i64(dim, &entries);
        prop_assume!(oracle::jacobi_holds(&t) && dim <= 3);
        let g = LieAlgebra::new(StructureConstants::from_i64(dim, &entries)).unwrap();
        let l = builders::trivial_algebroid(&builders::constant_bundle(&["*"], &g));
        let c = assemble(&l, dim + 1, dim + 1).unwrap();
        prop_assert!(verify_double_complex(&c).is_ok());
        prop_assert_eq!(total_cohomology(&c, dim).unwrap().dims, oracle::ce_dims(&t, dim));
    }

    #[test]
    fn rank_nullity(m in small_matrix()) {
        let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
        let a = SparseMatrix::from_i64(&rows);
        let dense = oracle::dense_from_i64(&rows);
        prop_assert_eq!(rank(&a), dense_rank(&dense));
        let k = kernel(&a);
        prop_assert_eq!(rank(&a) + k.dim(), a.cols());
        for v in k.basis() {
            prop_assert!(a.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn scaling_preserves_rank(m in small_matrix(), s in prop_oneof![-5i64..=-1, 1i64..=5]) {
        let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
        let a = SparseMatrix::from_i64(&rows);
        prop_assert_eq!(rank(&a.scale(&rat(s))), rank(&a));
        prop_assert_eq!(rank(&a.transpose()), rank(&a));
    }
}
