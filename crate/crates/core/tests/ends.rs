use projends::constructors::{complete_affine_two_norm, cusp_group, quasi_join_group, CuspSpec, QuasiJoinSpec};
use projends::convex::ConeBody;
use projends::ends::{
    check_mec, classify_link, eigsi_chain, fiber_data, is_horospherical, link_domain, quasi_join_diagnostics, revertex,
    LinkClass, MecContext, MecVariant, RadialEnd, Verdict, C_SEARCH,
};
use projends::projcore::{Matrix, ProjMap, Vector};
use projends::Tol;
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(3usize, 1usize), (4, 1), (5, 2)])
}

fn qj(n: usize, i0: usize, kappa: f64) -> RadialEnd {
    quasi_join_group(&QuasiJoinSpec::standard(n, i0, kappa).unwrap(), &Tol::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn trichotomy_follows_lineality(
        n in 3usize..6,
        l_frac in 0.0..1.0f64,
        pts in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 6), 6..10),
        twist in prop::collection::vec(-0.3..0.3f64, 36),
    ) {
        let tol = Tol::default();
        let l = ((n as f64) * l_frac) as usize;
        let basis = Matrix::identity(n, n) + Matrix::from_fn(n, n, |r, c| twist[r * 6 + c]);
        let mut gens: Vec<Vector> = pts
            .iter()
            .map(|p| {
                let mut x = basis.column(n - 1).into_owned();
                for j in l..n - 1 {
                    x.axpy(0.4 * p[j], &basis.column(j).into_owned(), 1.0);
                }
                x
            })
            .collect();
        for j in 0..l {
            gens.push(basis.column(j).into_owned());
            gens.push(-basis.column(j).into_owned());
        }
        let body = ConeBody::polyhedral(gens, &tol).unwrap();
        prop_assume!(body.is_full_dim());
        let class = classify_link(&body);
        let expected = match l {
            0 => LinkClass::ProperlyConvex,
            l if l + 1 == n => LinkClass::CompleteAffine,
            _ => LinkClass::Npcc,
        };
        prop_assert_eq!(class, expected);
    }

    #[test]
    fn eigenvalue_chain_holds_on_quasi_joins((n, i0) in shape(), kappa in 0.0..2.0f64) {
        let tol = Tol::default();
        let end = qj(n, i0, kappa);
        let link = link_domain(&end, 3, &tol).unwrap();
        let f = fiber_data(&end, &link, 3, &tol).unwrap();
        prop_assert_eq!(f.i0, i0);
        prop_assert_eq!(eigsi_chain(&end, &f, 4, &tol).unwrap(), None);
        let ctx = MecContext { link: Some(&link), fiber: Some(&f) };
        let flag = check_mec(&end, MecVariant::WeakNpcc, 4, C_SEARCH, &ctx, &tol).unwrap();
        prop_assert_eq!(flag.verdict, Verdict::Pass);
    }

    #[test]
    fn quasi_join_blocks_satisfy_the_identities((n, i0) in shape(), kappa in -1.0..1.0f64) {
        let tol = Tol::default();
        let end = qj(n, i0, kappa);
        let link = link_domain(&end, 3, &tol).unwrap();
        let f = fiber_data(&end, &link, 3, &tol).unwrap();
        let q = quasi_join_diagnostics(&end, &f, 3, &tol).unwrap();
        prop_assert!(q.max_similarity_residual < 1e-8);
        prop_assert!(q.max_orthogonality_residual < 1e-7);
        prop_assert!(q.max_conjugation_residual < 1e-10);
        prop_assert!(q.additivity_residual < 1e-8);
        prop_assert!(q.square_residual < 1e-8);
        // The generator carries α₇ = κ.
        let g0 = q.elements.iter().find(|e| e.word == "g0").unwrap();
        prop_assert!((g0.alpha7 - kappa).abs() < 1e-8);
    }

    #[test]
    fn horospherical_and_strict_middle_exclude_each_other(
        lattice in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 2), 2),
        eps in prop::sample::select(vec![0.0, 1e-3, 0.2]),
    ) {
        let tol = Tol::default();
        let lattice: Vec<Vector> = lattice.iter().map(|v| Vector::from_column_slice(v)).collect();
        prop_assume!((lattice[0][0] * lattice[1][1] - lattice[0][1] * lattice[1][0]).abs() > 0.1);
        let end = cusp_group(&CuspSpec { n: 3, lattice }, &tol).unwrap();
        let end = if eps == 0.0 {
            end
        } else {
            let mut gens = end.gens.clone();
            gens.push(ProjMap::from_diag(&[1.0 + eps, 1.0, 1.0, 1.0 / (1.0 + eps)]).unwrap());
            match RadialEnd::new(end.vertex.clone(), gens, end.samples.clone(), &tol) {
                Ok(e) => e,
                Err(_) => return Ok(()),
            }
        };
        let h = is_horospherical(&end, 3, &tol).unwrap();
        let m = check_mec(&end, MecVariant::Middle, 3, C_SEARCH, &MecContext::default(), &tol).unwrap();
        prop_assert!(!(h.flag && m.verdict == Verdict::Pass));
        if eps == 0.0 {
            prop_assert!(h.max_deviation < 1e-9);
        }
    }

    #[test]
    fn revertex_gives_fiber_dimension_n_minus_2(n in 3usize..5, beta in 0.1..1.0f64, t in 0.5..2.0f64) {
        let tol = Tol::default();
        let end = complete_affine_two_norm(n, beta, t, &tol).unwrap();
        let re = revertex(&end, 3, &tol).unwrap();
        let link = link_domain(&re, 3, &tol).unwrap();
        prop_assert_eq!(classify_link(&link.hull), LinkClass::Npcc);
        prop_assert_eq!(fiber_data(&re, &link, 3, &tol).unwrap().i0, n - 2);
    }

    #[test]
    fn fiber_sphere_is_invariant((n, i0) in shape(), kappa in 0.0..1.0f64) {
        let tol = Tol::default();
        let end = qj(n, i0, kappa);
        let link = link_domain(&end, 3, &tol).unwrap();
        let f = fiber_data(&end, &link, 3, &tol).unwrap();
        prop_assert_eq!(f.s_inf.dim(), i0);
        for g in &link.gens {
            prop_assert!(f.s_inf.invariance_residual(g.matrix()) < 1e-8);
        }
        prop_assert!(f.k.is_properly_convex());
        prop_assert!(f.v_inf.contains(end.vertex.coords(), 1e-9));
    }
}
