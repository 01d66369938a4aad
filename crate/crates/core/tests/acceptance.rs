//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use qsymx::braiding::{self, CoboundaryPath};
use qsymx::cactus::{self, CactusAction, Parity};
use qsymx::cartan::{CartanType, RootSystem, Weight};
use qsymx::error::Result;
use qsymx::groth::{self, GrothElement};
use qsymx::linalg::{self, Matrix};
use qsymx::symext::{self, Kind};
use qsymx::uqg::{self, ModuleRep};

const TOL: f64 = 1e-9;

struct Case {
    name: &'static str,
    ct: CartanType,
    highest: Vec<Vec<i32>>,
}

fn cases() -> Vec<Case> {
    let c = |name, ct, highest: &[&[i32]]| Case {
        name,
        ct,
        highest: highest.iter().map(|h| h.to_vec()).collect(),
    };
    vec![
        c("A1 V(1)", CartanType::A1, &[&[1]]),
        c("A1 V(2)", CartanType::A1, &[&[2]]),
        c("A1 V(3)", CartanType::A1, &[&[3]]),
        c("A1 V(1)+V(2)", CartanType::A1, &[&[1], &[2]]),
        c("A2 V(1,0)", CartanType::A2, &[&[1, 0]]),
        c("A2 V(0,1)", CartanType::A2, &[&[0, 1]]),
        c("A2 V(1,0)+V(0,1)", CartanType::A2, &[&[1, 0], &[0, 1]]),
    ]
}

fn build(case: &Case, q: f64) -> Result<ModuleRep> {
    let rs = RootSystem::new(case.ct);
    let hw: Vec<Weight> = case
        .highest
        .iter()
        .map(|h| Weight::new(h.clone()))
        .collect();
    uqg::build_sum(&rs, &hw, q)
}

/// A1 and A2 fundamentals.
fn fundamentals(q: f64) -> Result<Vec<ModuleRep>> {
    let a1 = RootSystem::new(CartanType::A1);
    let a2 = RootSystem::new(CartanType::A2);
    Ok(vec![
        uqg::build_fundamental(&a1, 0, q)?,
        uqg::build_fundamental(&a2, 0, q)?,
        uqg::build_fundamental(&a2, 1, q)?,
    ])
}

/// Pairs of simple modules of a common type used for the two-module checks.
fn simple_pairs(q: f64) -> Result<Vec<(String, ModuleRep, ModuleRep)>> {
    let mut out = Vec::new();
    for (ct, hws) in [
        (CartanType::A1, vec![vec![1], vec![2], vec![3]]),
        (CartanType::A2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]),
        (CartanType::B2, vec![vec![1, 0], vec![0, 1]]),
    ] {
        let rs = RootSystem::new(ct);
        let mods = hws
            .iter()
            .map(|h| uqg::build_simple(&rs, &Weight::new(h.clone()), q))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..mods.len() {
            for j in 0..mods.len() {
                let name = format!(
                    "{ct} {}⊗{}",
                    Weight::new(hws[i].clone()),
                    Weight::new(hws[j].clone())
                );
                out.push((name, mods[i].clone(), mods[j].clone()));
            }
        }
    }
    Ok(out)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn cube_identity() -> Result<Outcome> {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for case in cases() {
        for q in [1.2, 1.3] {
            let rep = groth::verify_cube_identity_for(&build(&case, q)?, TOL)?;
            checked += 1;
            if !rep.identity_holds || !rep.lifted_holds {
                failures.push(format!("{} q={q}: {:?}", case.name, rep.differing));
            }
        }
    }
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(120);
    outcome(
        failures.is_empty() && fast,
        format!(
            "{checked} (module, q) pairs, {:.1}s{}",
            elapsed.as_secs_f64(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failures.join(", "))
            }
        ),
    )
}

fn koszul() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut a1_3 = None;
    for case in cases() {
        let rep = symext::hilbert_and_koszul(&build(&case, 1.2)?, TOL)?;
        if case.name == "A1 V(3)" {
            a1_3 = Some(rep.difference);
        }
        if !rep.holds {
            bad.push(format!(
                "{}: {} vs {}",
                case.name, rep.difference, rep.expected
            ));
        }
    }
    outcome(
        bad.is_empty() && a1_3 == Some(16),
        format!(
            "dim S³_q − dim Λ³_q for A1 V(3) = {:?}; mismatches: {}",
            a1_3,
            bad.len()
        ),
    )
}

fn flatness() -> Result<Outcome> {
    let a1 = RootSystem::new(CartanType::A1);
    let v3 = uqg::build_simple(&a1, &Weight::new([3]), 1.2)?;
    let s3 = symext::sym_subspace(&v3, 3, TOL)?.dim();
    let v1 = uqg::build_fundamental(&a1, 0, 1.2)?;
    let flat = symext::flatness(&v1, 4, TOL)?
        .iter()
        .all(|d| d.sym_flat && d.ext_flat);
    outcome(
        s3 < 20 && flat,
        format!("dim S³_q V(3) = {s3} (classical 20); V(1) flat through degree 4: {flat}"),
    )
}

fn squares() -> Result<Outcome> {
    let mut bad = Vec::new();
    for case in cases() {
        for q in [1.0, 1.2, 1.3] {
            let v = build(&case, q)?;
            let d = v.dim();
            let action = CactusAction::new(&v, 2)?;
            let s = symext::power_subspace(&action, Kind::Sym, TOL)?.dim();
            let l = symext::power_subspace(&action, Kind::Ext, TOL)?.dim();
            if s != d * (d + 1) / 2 || l != d * (d - 1) / 2 {
                bad.push(format!("{} q={q}: ({s},{l})", case.name));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("21 (module, q) pairs; mismatches: {bad:?}"),
    )
}

fn embedding() -> Result<Outcome> {
    let mut bad = Vec::new();
    for case in cases() {
        let v = build(&case, 1.2)?;
        for n in [2, 3] {
            let c = symext::quotient_component(&v, n, Kind::Sym, TOL)?;
            if !c.embedding_holds {
                bad.push(format!(
                    "{} n={n}: ideal {} + sub {} ∩ {}",
                    case.name, c.dim_ideal, c.dim_subspace, c.dim_intersection
                ));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("14 (module, n) pairs; failures: {bad:?}"),
    )
}

fn commutativity() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for v in fundamentals(1.2)? {
        for n in [3, 4] {
            for sup in [false, true] {
                worst = worst.max(symext::commutativity_check(&v, n, sup, TOL)?.residual);
            }
        }
    }
    outcome(worst < 1e-8, format!("worst ‖π∘ρ_q(x) − π‖ = {worst:.2e}"))
}

fn coboundary_axioms() -> Result<Outcome> {
    let mut relations = 0.0_f64;
    for v in fundamentals(1.2)? {
        for n in 2..=4 {
            for parity in [Parity::Even, Parity::Odd] {
                let action =
                    CactusAction::with_options(&v, n, parity, CoboundaryPath::Scalar, TOL)?;
                relations = relations.max(cactus::relation_residuals(&action)?.max());
            }
        }
    }
    let path = CoboundaryPath::Scalar;
    let mut hexagon = 0.0_f64;
    let mut unitary = 0.0_f64;
    let funds = fundamentals(1.2)?;
    let groups = [vec![&funds[0]], vec![&funds[1], &funds[2]]];
    for group in &groups {
        for x in group {
            for y in group {
                let s_xy = braiding::coboundary(x, y, path)?;
                let s_yx = braiding::coboundary(y, x, path)?;
                unitary = unitary
                    .max(braiding::unitarity_residual(x, y, s_xy.matrix()))
                    .max(braiding::adjoint_pair_residual(
                        x,
                        y,
                        s_xy.matrix(),
                        s_yx.matrix(),
                    ));
                for z in group {
                    let yz = uqg::tensor(y, z);
                    let xy = uqg::tensor(x, y);
                    let lhs = linalg::embed(braiding::coboundary(y, z, path)?.matrix(), 1, x.dim())
                        * braiding::coboundary(x, &yz, path)?.matrix();
                    let rhs = linalg::embed(s_xy.matrix(), z.dim(), 1)
                        * braiding::coboundary(&xy, z, path)?.matrix();
                    hexagon = hexagon.max(linalg::max_diff(&lhs, &rhs));
                }
            }
        }
    }
    outcome(
        relations < 1e-8 && hexagon < 1e-8 && unitary < 1e-9,
        format!("cactus relations {relations:.2e}, hexagon {hexagon:.2e}, unitarity/adjoint {unitary:.2e}"),
    )
}

fn two_paths() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (_, v, w) in simple_pairs(1.2)? {
        let a = braiding::coboundary(&v, &w, CoboundaryPath::Scalar)?;
        let b = braiding::coboundary(&v, &w, CoboundaryPath::Spectral)?;
        worst = worst.max(linalg::max_diff(a.matrix(), b.matrix()));
        count += 1;
    }
    outcome(
        worst < 1e-9,
        format!("{count} pairs, worst difference {worst:.2e}"),
    )
}

fn r_matrix_contract() -> Result<Outcome> {
    let mut intertwiner = 0.0_f64;
    let mut top = 0.0_f64;
    for (_, v, w) in simple_pairs(1.2)? {
        let r = braiding::r_matrix(&v, &w)?;
        intertwiner = intertwiner.max(r.residual);
        let (lv, lw) = (
            v.summands().unwrap()[0].highest.clone(),
            w.summands().unwrap()[0].highest.clone(),
        );
        let rs = v.root_system();
        let expected = 1.2_f64.powf(rs.weight_inner(&lv, &lw)?.to_f64().unwrap());
        let vw = uqg::tensor(&v, &w);
        let idx = vw.weight_indices(&(&lv + &lw));
        assert_eq!(idx.len(), 1);
        let mut e = Matrix::zeros(vw.dim(), 1);
        e[(idx[0], 0)] = 1.0;
        top = top.max((r.op.matrix() * &e - &e * expected).amax());
    }
    let mut near = 0.0_f64;
    for (_, v, w) in simple_pairs(1.001)? {
        let r = braiding::r_matrix(&v, &w)?;
        let n = r.op.dim();
        near = near.max(linalg::max_diff(r.op.matrix(), &Matrix::identity(n, n)));
    }
    outcome(
        intertwiner < 1e-8 && top < 1e-10 && near < 0.05,
        format!("intertwiner {intertwiner:.2e}, highest-weight eigenvalue {top:.2e}, ‖R_1.001 − id‖ {near:.2e}"),
    )
}

fn psi_spectrum() -> Result<Outcome> {
    let mut smin = f64::INFINITY;
    let mut pairing = 0.0_f64;
    let mut cube = 0.0_f64;
    for case in cases() {
        let rep = groth::psi_spectrum_check(&build(&case, 1.2)?, TOL)?;
        smin = smin.min(rep.min_singular);
        pairing = pairing.max(rep.pairing_residual);
        let rep1 = groth::psi_spectrum_check(&build(&case, 1.0)?, TOL)?;
        cube = cube.max(rep1.psi_cube_residual.unwrap_or(f64::INFINITY));
    }
    outcome(
        smin > groth::PSI_MARGIN && cube == 0.0,
        format!(
            "min σ(ψ_q^λ + id) = {smin:.4}, pairing residual {pairing:.2e}, ‖ψ_1³ − id‖ = {cube:e}"
        ),
    )
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut count = 0;
    for (name, v, w) in simple_pairs(1.2)? {
        let vw = uqg::tensor(&v, &w);
        let quantum = groth::decompose(&vw, TOL)?;
        let classical: GrothElement = groth::peel(v.root_system(), &vw.weight_multiset())?;
        count += 1;
        if quantum != classical {
            bad.push(name);
        }
    }
    outcome(
        bad.is_empty(),
        format!("{count} tensor products; disagreements: {bad:?}"),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("cube identity S³_q − Λ³_q = S³ − Λ³", cube_identity),
        ("Koszul dimension count (dim V)²", koszul),
        ("non-flat V(3), flat A1 fundamental", flatness),
        ("quantum squares are classical", squares),
        ("embedding J^n ∩ S^n_q = 0", embedding),
        ("commutativity on S^n_q and Λ^n_q", commutativity),
        ("coboundary and cactus axioms", coboundary_axioms),
        ("scalar and spectral paths agree", two_paths),
        ("R-matrix contract", r_matrix_contract),
        ("ψ spectrum avoids −1", psi_spectrum),
        (
            "decompose agrees with character peeling",
            oracle_equivalence,
        ),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name} — {detail}",
            if pass { "PASS" } else { "FAIL" },
            k + 1
        );
    }
    println!(
        "{}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
