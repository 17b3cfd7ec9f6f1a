//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use projends::constructors::{
    bend_matrix, bending, complete_affine_two_norm, cusp_group, g_c, hyperideal_end, quasi_join_group,
    violating_quasi_join, BendKind, BendMode, BendSpec, CuspSpec, QuasiJoinSpec,
};
use projends::convex::{body_hausdorff, hilbert_distance, klein_hyperbolic_distance, klein_point, strict_join, ConeBody};
use projends::duality::{cone_contains, dual_cone, dual_in_join};
use projends::ends::{
    check_mec, classify_end, eigsi_chain, fiber_data, is_horospherical, link_domain, revertex, LinkClass,
    MecContext, MecVariant, QuasiJoinVerdict, ShapeLabel, Verdict, C_SEARCH,
};
use projends::projcore::{cross_ratio, Matrix, ProjMap, ProjPoint, Vector};
use projends::spectra::{enumerate_words, invariant_subspaces};
use projends::Tol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lib<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn klein_constant() -> Outcome {
    let tol = Tol::default();
    let ball = ConeBody::klein_ball(2, &tol).map_err(lib)?;
    let seg = ConeBody::polyhedral(vec![Vector::from_column_slice(&[1., 1.]), Vector::from_column_slice(&[1., -1.])], &tol)
        .map_err(lib)?;
    let d = hilbert_distance(&seg, &klein_point(&[0.0]), &klein_point(&[0.5]), &tol).map_err(lib)?;
    check((d - 3f64.ln()).abs() < 1e-12, format!("interval d(0, 1/2) = {d}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut point = || loop {
        let (x, y) = (rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
        if x * x + y * y < 0.81 {
            return [x, y];
        }
    };
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (p, q) = (point(), point());
        let h = hilbert_distance(&ball, &klein_point(&p), &klein_point(&q), &tol).map_err(lib)?;
        worst = worst.max((h - 2.0 * klein_hyperbolic_distance(&p, &q)).abs());
    }
    check(worst < 1e-9, format!("max |d_H - 2 d_hyp| = {worst:e}"))?;
    Ok(format!("200 pairs, max |d_H - 2 d_hyp| = {worst:.1e}"))
}

fn random_cone(rng: &mut ChaCha8Rng, tol: &Tol) -> Result<ConeBody, String> {
    let k = rng.random_range(5..=12);
    let gens = (0..k)
        .map(|_| Vector::from_fn(4, |i, _| if i == 0 { 1.0 } else { rng.random::<f64>() * 2.0 - 1.0 }))
        .collect();
    ConeBody::polyhedral(gens, tol).map_err(lib)
}

fn duality_involution() -> Outcome {
    let tol = Tol::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let c = random_cone(&mut rng, &tol)?;
        let dd = dual_cone(&dual_cone(&c, &tol).map_err(lib)?, &tol).map_err(lib)?;
        worst = worst.max(body_hausdorff(&c, &dd).map_err(lib)?);
    }
    check(worst < 1e-8, format!("hausdorff(dual², id) = {worst:e}"))?;
    for i in 0..100 {
        let outer = random_cone(&mut rng, &tol)?;
        // Inner: positive combinations of the outer generators.
        let g = outer.generators();
        let inner_gens = (0..4)
            .map(|_| {
                let mut x = Vector::zeros(4);
                for v in g {
                    x.axpy(rng.random::<f64>(), v, 1.0);
                }
                x
            })
            .collect();
        let inner = ConeBody::polyhedral(inner_gens, &tol).map_err(lib)?;
        let (di, dout) = (dual_cone(&inner, &tol).map_err(lib)?, dual_cone(&outer, &tol).map_err(lib)?);
        check(cone_contains(&outer, &inner, 1e-9), format!("nested pair {i} not nested"))?;
        check(cone_contains(&di, &dout, 1e-8), format!("inclusion not reversed on pair {i}"))?;
    }
    let mut join_worst = 0.0f64;
    for _ in 0..50 {
        let basis = Matrix::from_fn(4, 4, |_, _| rng.random::<f64>() * 2.0 - 1.0) + Matrix::identity(4, 4) * 2.0;
        let ka = rng.random_range(1..=3);
        let pick = |rng: &mut ChaCha8Rng, cols: std::ops::Range<usize>, count: usize| -> Vec<Vector> {
            (0..count)
                .map(|_| {
                    let mut x = Vector::zeros(4);
                    for (j, c) in cols.clone().enumerate() {
                        let w = if j == 0 { 1.0 } else { 0.8 * (rng.random::<f64>() * 2.0 - 1.0) };
                        x.axpy(w, &basis.column(c).into_owned(), 1.0);
                    }
                    x
                })
                .collect()
        };
        let a_gens = pick(&mut rng, 0..ka, ka + 2);
        let b_gens = pick(&mut rng, ka..4, 4 - ka + 2);
        let a = ConeBody::polyhedral(a_gens, &tol).map_err(lib)?;
        let b = ConeBody::polyhedral(b_gens, &tol).map_err(lib)?;
        let joined = strict_join(&[a.clone(), b.clone()], &tol).map_err(lib)?;
        let lhs = dual_cone(&joined, &tol).map_err(lib)?;
        let rhs = strict_join(&[dual_in_join(&a, &b, &tol).map_err(lib)?, dual_in_join(&b, &a, &tol).map_err(lib)?], &tol)
            .map_err(lib)?;
        join_worst = join_worst.max(body_hausdorff(&lhs, &rhs).map_err(lib)?);
    }
    check(join_worst < 1e-8, format!("join duality residual {join_worst:e}"))?;
    Ok(format!("involution {worst:.1e}, 100 nested pairs reversed, join residual {join_worst:.1e}"))
}

fn cross_ratio_invariance() -> Outcome {
    let tol = Tol::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = Vector::from_fn(3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let b = Vector::from_fn(3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let mut ts: Vec<f64> = (0..4).map(|i| i as f64 + 0.2 + 0.6 * rng.random::<f64>()).collect();
        ts.iter_mut().for_each(|t| *t *= 0.35);
        let pts: Vec<Vector> = ts.iter().map(|t| &a * t.cos() + &b * t.sin()).collect();
        let pp = |v: &Vector| ProjPoint::new(v.clone()).map_err(lib);
        let base = cross_ratio(&pp(&pts[0])?, &pp(&pts[1])?, &pp(&pts[2])?, &pp(&pts[3])?, &tol).map_err(lib)?;
        for _ in 0..100 {
            let m = Matrix::identity(3, 3) + Matrix::from_fn(3, 3, |_, _| 0.6 * (rng.random::<f64>() * 2.0 - 1.0));
            let g = ProjMap::new(m).map_err(lib)?;
            let im: Vec<ProjPoint> = pts.iter().map(|p| pp(&g.apply(p))).collect::<Result<_, _>>()?;
            let cr = cross_ratio(&im[0], &im[1], &im[2], &im[3], &tol).map_err(lib)?;
            worst = worst.max((cr - base).abs() / base.abs().max(1.0));
        }
    }
    check(worst < 1e-9, format!("max deviation {worst:e}"))?;
    Ok(format!("10000 quadruple-map pairs, max deviation {worst:.1e}"))
}

fn horosphere_suite() -> Outcome {
    let tol = Tol::default();
    let end = cusp_group(&CuspSpec::standard(3), &tol).map_err(lib)?;
    let words = enumerate_words(&end.gens, 8).count();
    let h = is_horospherical(&end, 8, &tol).map_err(lib)?;
    check(h.max_deviation < 1e-9, format!("max | |λ|-1 | = {:e}", h.max_deviation))?;
    let r = classify_end(&end, 8, &tol);
    check(r.trichotomy == LinkClass::CompleteAffine, format!("trichotomy {}", r.trichotomy.label()))?;
    check(r.shape.label == ShapeLabel::Cusp, format!("shape {}", r.shape.label.as_str()))?;
    Ok(format!("{words} words, max | |λ|-1 | = {:.1e}, CA + cusp", h.max_deviation))
}

fn quasi_join_suite() -> Outcome {
    let tol = Tol::default();
    let mut parts = Vec::new();
    for (n, i0) in [(4, 1), (5, 2)] {
        for kappa in [0.5, 0.0] {
            let end = quasi_join_group(&QuasiJoinSpec::standard(n, i0, kappa).map_err(lib)?, &tol).map_err(lib)?;
            let r = classify_end(&end, 5, &tol);
            let tag = format!("({n},{i0}) κ={kappa}");
            check(r.trichotomy == LinkClass::Npcc, format!("{tag}: trichotomy {}", r.trichotomy.label()))?;
            let i = r.fiber.as_ref().map(|f| f.i0);
            check(i == Some(i0), format!("{tag}: fiber dimension {i:?}"))?;
            let q = r.quasi_join.as_ref().ok_or(format!("{tag}: no quasi-join diagnostics"))?;
            check(q.max_similarity_residual < 1e-8, format!("{tag}: a5²-a1a9 residual {:e}", q.max_similarity_residual))?;
            check(q.max_conjugation_residual < 1e-10, format!("{tag}: conjugation residual {:e}", q.max_conjugation_residual))?;
            check(q.additivity_residual < 1e-8, format!("{tag}: α₇ additivity {:e}", q.additivity_residual))?;
            check(q.square_residual < 1e-8, format!("{tag}: α₇(g²) residual {:e}", q.square_residual))?;
            let zero = q.elements.iter().all(|e| e.alpha7.abs() <= 1e-8);
            let joined = q.verdict == QuasiJoinVerdict::Joined;
            check(zero == joined, format!("{tag}: α₇ ≡ 0 is {zero} but verdict {}", q.verdict.label()))?;
            check(zero == (kappa == 0.0), format!("{tag}: α₇ ≡ 0 is {zero}"))?;
            parts.push(format!("{tag} {}", q.verdict.label()));
        }
    }
    Ok(parts.join(", "))
}

fn eigsi_suite() -> Outcome {
    let tol = Tol::default();
    let mut count = 0;
    for (n, i0) in [(3, 1), (4, 1), (5, 2)] {
        for kappa in [0.5, 0.0] {
            let end = quasi_join_group(&QuasiJoinSpec::standard(n, i0, kappa).map_err(lib)?, &tol).map_err(lib)?;
            let link = link_domain(&end, 3, &tol).map_err(lib)?;
            let f = fiber_data(&end, &link, 3, &tol).map_err(lib)?;
            let ctx = MecContext { link: Some(&link), fiber: Some(&f) };
            let weak = check_mec(&end, MecVariant::WeakNpcc, 4, C_SEARCH, &ctx, &tol).map_err(lib)?;
            check(weak.verdict == Verdict::Pass, format!("({n},{i0}) κ={kappa}: weak NPCC MEC {}", weak.verdict.label()))?;
            let broken = eigsi_chain(&end, &f, 4, &tol).map_err(lib)?;
            check(broken.is_none(), format!("({n},{i0}) κ={kappa}: chain broken at {broken:?}"))?;
            count += 1;
        }
    }
    let end = violating_quasi_join(4, 1, &tol).map_err(lib)?;
    let link = link_domain(&end, 3, &tol).map_err(lib)?;
    let f = fiber_data(&end, &link, 3, &tol).map_err(lib)?;
    let ctx = MecContext { link: Some(&link), fiber: Some(&f) };
    let flag = check_mec(&end, MecVariant::WeakNpcc, 4, C_SEARCH, &ctx, &tol).map_err(lib)?;
    check(flag.verdict == Verdict::Fail, format!("violating block: {}", flag.verdict.label()))?;
    let w = flag.witness.clone().ok_or("violating block: no witness")?;
    Ok(format!("chain holds on {count} constructions, violating block fails at {w}"))
}

fn bending_suite() -> Outcome {
    let tol = Tol::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let lambda = 1.0 + 4.0 * rng.random::<f64>() + 1e-3;
        let b = 4.0 * rng.random::<f64>() - 2.0;
        let (k, g) = (bend_matrix(BendKind::Shear(b)).map_err(lib)?, g_c(lambda));
        check(k.matrix() * g.matrix() == g.matrix() * k.matrix(), format!("k_b g_c ≠ g_c k_b at λ={lambda}, b={b}"))?;
    }
    let end = hyperideal_end(2.0, 3.0, &tol).map_err(lib)?;
    for kind in [BendKind::Shear(0.0), BendKind::Scale(1.0)] {
        for mode in [BendMode::Conjugate, BendMode::StableLetter] {
            let spec = BendSpec { lambda: 2.0, kind, partition: vec![0, 1], mode };
            let (_, bent) = bending(&spec, &end, &tol).map_err(lib)?;
            let same = bent.gens.iter().zip(&end.gens).all(|(a, b)| a.matrix().as_slice() == b.matrix().as_slice())
                && bent.samples == end.samples;
            check(same, format!("{kind:?} {mode:?} is not the identity"))?;
        }
    }
    let lam = 2f64.exp();
    let end = hyperideal_end(lam, lam, &tol).map_err(lib)?;
    let spec = BendSpec { lambda: lam, kind: BendKind::Scale(0.1), partition: vec![1], mode: BendMode::StableLetter };
    let (_, bent) = bending(&spec, &end, &tol).map_err(lib)?;
    let f = check_mec(&bent, MecVariant::Middle, 3, C_SEARCH, &MecContext::default(), &tol).map_err(lib)?;
    check(f.verdict == Verdict::Fail, format!("bent middle MEC {}", f.verdict.label()))?;
    check(f.witness.as_deref() == Some("g1"), format!("witness {:?}, expected g1", f.witness))?;
    Ok("20 commuting pairs, identity bends bitwise, s·λ < 1 fails at g1".into())
}

fn revertex_suite() -> Outcome {
    let tol = Tol::default();
    for n in [3, 4] {
        let end = complete_affine_two_norm(n, 0.3, 1.0, &tol).map_err(lib)?;
        let re = revertex(&end, 3, &tol).map_err(lib)?;
        let r = classify_end(&re, 3, &tol);
        check(r.trichotomy == LinkClass::Npcc, format!("n={n}: trichotomy {}", r.trichotomy.label()))?;
        let i = r.fiber.as_ref().map(|f| f.i0);
        check(i == Some(n - 2), format!("n={n}: fiber dimension {i:?}"))?;
    }
    Ok("n = 3, 4 re-vertex to NPCC with fiber dimension n-2".into())
}

fn invariant_detector() -> Outcome {
    let tol = Tol::default();
    let gens = vec![ProjMap::from_diag(&[2.0, 1.0, 0.5, 1.0]).map_err(lib)?, ProjMap::from_diag(&[1.0, 3.0, 0.25, 4.0 / 3.0]).map_err(lib)?];
    let rep = invariant_subspaces(&gens, &tol).map_err(lib)?;
    let n = 4;
    for mask in 1u32..(1 << n) - 1 {
        let cols: Vec<Vector> =
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| Vector::from_fn(n, |j, _| (i == j) as u8 as f64)).collect();
        let sub = projends::projcore::Subspace::span(&cols, n, tol.subspace);
        check(rep.subspaces.iter().any(|s| s.approx_eq(&sub, 1e-8)), format!("coordinate subspace {mask:04b} missing"))?;
    }
    let found = rep.subspaces.len();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p = Matrix::identity(3, 3) + Matrix::from_fn(3, 3, |_, _| 0.5 * (rng.random::<f64>() * 2.0 - 1.0));
    let pi = p.clone().try_inverse().ok_or("singular conjugator")?;
    let a = Matrix::from_diagonal(&Vector::from_column_slice(&[2.0, 1.0, 0.5]));
    let mut b = Matrix::identity(3, 3);
    b[(0, 1)] = 1.0;
    b[(1, 2)] = 1.0;
    b[(2, 0)] = 1.0;
    let pair = [ProjMap::new(&p * a * &pi).map_err(lib)?, ProjMap::new(&p * b * &pi).map_err(lib)?];
    let rep = invariant_subspaces(&pair, &tol).map_err(lib)?;
    check(rep.subspaces.is_empty(), format!("irreducible pair: {} subspaces", rep.subspaces.len()))?;
    check(rep.burnside_full, format!("algebra dimension {} of 9", rep.algebra_dim))?;
    Ok(format!("diagonal: {found} subspaces incl. all 14 coordinate ones; irreducible pair: none, algebra 9 of 9"))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_projends")).args(args).output().map_err(lib)?;
    if !out.status.success() {
        return Err(format!("projends {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(())
}

fn cli_round(dir: &Path) -> Result<Vec<Vec<u8>>, String> {
    std::fs::create_dir_all(dir).map_err(lib)?;
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    std::fs::write(p("qj.params"), "n: 3\ni0: 1\nkappa: 0.5\n").map_err(lib)?;
    std::fs::write(p("cusp.params"), "n: 3\n").map_err(lib)?;
    let t = ["--threads", "1"];
    run_cli(&[&t[..], &["construct", "--family", "quasijoin", "--params", &p("qj.params"), "--out", &p("qj.scene"), "--seed", "0"]].concat())?;
    run_cli(&[&t[..], &["construct", "--family", "cusp", "--params", &p("cusp.params"), "--out", &p("cusp.scene"), "--seed", "0"]].concat())?;
    run_cli(&[&t[..], &["classify", &p("qj.scene"), "--report", &p("qj.report")]].concat())?;
    run_cli(&[&t[..], &["classify", &p("cusp.scene"), "--report", &p("cusp.report")]].concat())?;
    run_cli(&[&t[..], &["render", &p("qj.scene"), "--mode", "link", "--out", &p("qj.svg")]].concat())?;
    ["qj.scene", "cusp.scene", "qj.report", "cusp.report", "qj.svg"]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).map_err(lib))
        .collect()
}

fn cli_determinism() -> Outcome {
    let base = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-cli");
    let a = cli_round(&base.join("a"))?;
    let b = cli_round(&base.join("b"))?;
    check(a == b, "outputs differ between runs")?;
    let bytes: usize = a.iter().map(Vec::len).sum();
    Ok(format!("construct, classify, render: 5 files, {bytes} bytes identical"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Hilbert metric on the Klein ball is twice the hyperbolic metric", klein_constant),
        ("duality involution, inclusion reversal, join duality", duality_involution),
        ("cross-ratio projective invariance", cross_ratio_invariance),
        ("horosphere suite on the n=3 cusp group", horosphere_suite),
        ("quasi-join suite", quasi_join_suite),
        ("eigenvalue chain and weak NPCC violation", eigsi_suite),
        ("bending", bending_suite),
        ("re-vertexing two-norm complete affine ends", revertex_suite),
        ("invariant-subspace detector", invariant_detector),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
