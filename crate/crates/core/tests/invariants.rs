use proptest::prelude::*;
use qsymx::braiding::{self, CoboundaryPath};
use qsymx::cartan::{CartanType, RootSystem, Weight};
use qsymx::groth::{self, GrothElement};
use qsymx::linalg;
use qsymx::symext::{self, Kind};
use qsymx::uqg;

fn small_weight(ct: CartanType) -> impl Strategy<Value = Weight> {
    let rank = RootSystem::new(ct).rank();
    prop::collection::vec(0..3i32, rank).prop_map(Weight::new)
}

fn any_type() -> impl Strategy<Value = CartanType> {
    prop::sample::select(CartanType::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn characters_sum_to_weyl_dimension(
        (ct, lam) in any_type().prop_flat_map(|ct| (Just(ct), small_weight(ct)))
    ) {
        let rs = RootSystem::new(ct);
        let ch = groth::character(&rs, &lam).unwrap();
        let total: i64 = ch.values().sum();
        prop_assert_eq!(total, rs.weyl_dim(&lam).unwrap() as i64);
        // Weyl-group invariance of the character.
        for i in 0..rs.rank() {
            for (mu, m) in &ch {
                prop_assert_eq!(ch.get(&rs.reflect(i, mu)), Some(m));
            }
        }
    }

    #[test]
    fn classical_cube_totals(
        (ct, a, b) in any_type().prop_flat_map(|ct| (Just(ct), small_weight(ct), small_weight(ct)))
    ) {
        let rs = RootSystem::new(ct);
        let mut weights = Vec::new();
        for lam in [&a, &b] {
            for (mu, m) in groth::character(&rs, lam).unwrap() {
                weights.extend(std::iter::repeat(mu).take(m as usize));
            }
        }
        prop_assume!(weights.len() <= 12);
        let d = weights.len();
        let s = groth::classical_cube(&rs, &weights, Kind::Sym).unwrap();
        let l = groth::classical_cube(&rs, &weights, Kind::Ext).unwrap();
        prop_assert!(s.is_nonnegative() && l.is_nonnegative());
        prop_assert_eq!(s.total_dim(&rs).unwrap() as u64, symext::classical_sym_dim(d, 3));
        prop_assert_eq!(l.total_dim(&rs).unwrap() as u64, symext::classical_ext_dim(d, 3));
    }

    #[test]
    fn fusion_is_symmetric(
        (ct, a, b) in any_type().prop_flat_map(|ct| (Just(ct), small_weight(ct), small_weight(ct))),
        q in 1.05f64..1.5,
    ) {
        let rs = RootSystem::new(ct);
        prop_assume!(rs.weyl_dim(&a).unwrap() * rs.weyl_dim(&b).unwrap() <= 100);
        let v = uqg::build_simple(&rs, &a, q).unwrap();
        let w = uqg::build_simple(&rs, &b, q).unwrap();
        let vw = groth::decompose(&uqg::tensor(&v, &w), 1e-9).unwrap();
        let wv = groth::decompose(&uqg::tensor(&w, &v), 1e-9).unwrap();
        prop_assert_eq!(&vw, &wv);
        let peeled = groth::peel(&rs, &uqg::tensor(&v, &w).weight_multiset()).unwrap();
        prop_assert_eq!(vw, peeled);
    }

    #[test]
    fn coboundary_squares_to_identity(
        (ct, a, b) in any_type().prop_flat_map(|ct| (Just(ct), small_weight(ct), small_weight(ct))),
        q in 1.05f64..1.5,
    ) {
        let rs = RootSystem::new(ct);
        prop_assume!(rs.weyl_dim(&a).unwrap() * rs.weyl_dim(&b).unwrap() <= 64);
        let v = uqg::build_simple(&rs, &a, q).unwrap();
        let w = uqg::build_simple(&rs, &b, q).unwrap();
        let s_vw = braiding::coboundary(&v, &w, CoboundaryPath::Scalar).unwrap();
        let s_wv = braiding::coboundary(&w, &v, CoboundaryPath::Scalar).unwrap();
        let n = v.dim() * w.dim();
        let prod = s_wv.matrix() * s_vw.matrix();
        prop_assert!(linalg::max_diff(&prod, &linalg::Matrix::identity(n, n)) < 1e-8);
        prop_assert!(braiding::module_map_residual(&v, &w, s_vw.matrix()) < 1e-8);
    }

    #[test]
    fn grothendieck_group_laws(
        xs in prop::collection::vec((0..4i32, -3..4i64), 0..6),
        ys in prop::collection::vec((0..4i32, -3..4i64), 0..6),
    ) {
        let mk = |v: &[(i32, i64)]| {
            GrothElement::from_terms(v.iter().map(|&(w, m)| (Weight::new([w]), m))).unwrap()
        };
        let (x, y) = (mk(&xs), mk(&ys));
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert!((&x - &x).is_zero());
        prop_assert!(x.terms().values().all(|&m| m != 0));
    }
}

#[test]
fn quantum_cubes_do_not_depend_on_q() {
    let rs = RootSystem::new(CartanType::A1);
    for lam in [1, 2, 3] {
        let lam = Weight::new([lam]);
        let at = |q| {
            let v = uqg::build_simple(&rs, &lam, q).unwrap();
            let s = groth::quantum_cube(&v, Kind::Sym, 1e-9).unwrap();
            let l = groth::quantum_cube(&v, Kind::Ext, 1e-9).unwrap();
            assert!(s.cross_check_holds && l.cross_check_holds);
            (s.element, l.element)
        };
        assert_eq!(at(1.2), at(1.3), "{lam}");
    }
}

#[test]
fn b2_cube_identity() {
    let rs = RootSystem::new(CartanType::B2);
    for lam in [[0, 1], [1, 0]] {
        let rep = groth::verify_cube_identity(&rs, &[(Weight::new(lam), 1)], 1.2, 1e-9).unwrap();
        assert!(
            rep.identity_holds && rep.lifted_holds,
            "{:?}",
            rep.differing
        );
        assert!(rep.common_part.holds);
    }
}

#[test]
fn non_flat_module_dimensions() {
    let rs = RootSystem::new(CartanType::A1);
    let v = uqg::build_simple(&rs, &Weight::new([3]), 1.2).unwrap();
    let rep = symext::hilbert_and_koszul(&v, 1e-9).unwrap();
    assert_eq!(rep.sym.dims, vec![1, 4, 10, 16]);
    assert_eq!(rep.ext.dims, vec![1, 4, 6, 0]);
    assert_eq!(rep.difference, 16);
}
