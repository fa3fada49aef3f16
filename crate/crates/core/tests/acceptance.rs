//! Acceptance suite. Prints one line per criterion; exits nonzero if any
//! gating criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use sparseres::bridge::{am_to_res, build_from_hint, check_equivalence, res_to_am};
use sparseres::geom::{convex_hull, lattice_points, minkowski_sum, Displacement};
use sparseres::library;
use sparseres::linalg::{det, eig, RMatrix};
use sparseres::oracle::system_roots;
use sparseres::poly::{CoefficientAssignment, MonomialOrder, SystemTemplate};
use sparseres::resgen::{
    augment, emit_plan, generate, reduce_rowcol, search_candidates, squarify, test_partition, GenConfig,
    RankProtocol, SolverPlan, Variant, Verdict,
};
use sparseres::runtime::{benchmark, fill, solve_instance, InstanceGenerator, UnitNormal, REAL_TOL};

struct Outcome {
    pass: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: false,
        detail: detail.into(),
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn sys(name: &str) -> SystemTemplate {
    library::get(name).unwrap_or_else(|| panic!("library system {name}"))
}

fn plan(name: &str, variants: &str) -> SolverPlan {
    let cfg = GenConfig {
        variants: Variant::parse_list(variants).unwrap(),
        ..GenConfig::default()
    };
    generate(&sys(name), &cfg).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn lattice_fidelity() -> Outcome {
    let t = Instant::now();
    let s = sys("example1");
    let hulls: Vec<_> = s
        .polys
        .iter()
        .map(|f| convex_hull(&f.support().iter().map(|m| m.to_i64()).collect::<Vec<_>>()))
        .collect();
    let pts = lattice_points(&minkowski_sum(&hulls), &Displacement::new(vec![-1, -1], 0.1));
    let elapsed = t.elapsed();
    let got: BTreeSet<Vec<i64>> = pts.into_iter().collect();
    let want: BTreeSet<Vec<i64>> = [
        [0, 1], [0, 2], [0, 3], [2, 0], [3, 0], [1, 1], [1, 2], [1, 3], [2, 1],
        [2, 2], [2, 3], [3, 1], [3, 2], [3, 3], [4, 1], [4, 2], [4, 3],
    ]
    .iter()
    .map(|p| p.to_vec())
    .collect();
    check(
        got == want && elapsed < Duration::from_secs(1),
        format!("{} points, {} expected, set equal {}, {}", got.len(), want.len(), got == want, secs(elapsed)),
    )
}

fn univariate_end_to_end() -> Outcome {
    let p = plan("univariate", "both");
    let sol = match solve_instance(&p, &CoefficientAssignment::from_pairs([("a", 1.0), ("b", -5.0), ("c", 6.0)]), REAL_TOL) {
        Ok(s) => s,
        Err(e) => return fail(format!("quadratic: {e}")),
    };
    let mut xs: Vec<Complex64> = sol.roots.iter().map(|r| r.point[0]).collect();
    xs.sort_by(|a, b| a.re.total_cmp(&b.re));
    let quad_err = if xs.len() == 2 {
        (xs[0] - 2.0).norm().max((xs[1] - 3.0).norm())
    } else {
        f64::INFINITY
    };

    let lin = plan("linear", "v1");
    let inst = match fill(&lin, &CoefficientAssignment::from_pairs([("a", 1.0), ("b", -2.0)])) {
        Ok(i) => i,
        Err(e) => return fail(format!("linear: {e}")),
    };
    let x = match inst.schur() {
        Ok((x, _)) => x,
        Err(e) => return fail(format!("linear: {e}")),
    };
    let lin_err = if (x.rows(), x.cols()) == (1, 1) {
        (x[(0, 0)] - 2.0).abs()
    } else {
        f64::INFINITY
    };
    check(
        quad_err <= 1e-10 && lin_err <= 1e-12,
        format!("x^2-5x+6 roots {:?} max err {quad_err:.1e}; x-2 Schur err {lin_err:.1e}", xs.len()),
    )
}

/// Max coordinate distance from each oracle root to its nearest solver root.
fn worst_match(p: &SolverPlan, sys: &SystemTemplate, c: &CoefficientAssignment, expect: usize) -> Result<f64, String> {
    let oracle = system_roots(sys, c).map_err(|e| e.to_string())?;
    if oracle.points.len() != expect {
        return Err(format!("oracle found {} roots, expected {expect}", oracle.points.len()));
    }
    let sol = solve_instance(p, c, REAL_TOL).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for o in &oracle.points {
        let best = sol
            .roots
            .iter()
            .map(|r| r.point.iter().zip(o).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    Ok(worst)
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, roots) in [("two_conics", 4), ("three_quadrics", 8)] {
        let s = sys(name);
        let p = plan(name, "both");
        let g = UnitNormal::for_plan(&p, 3);
        let mut worst: f64 = 0.0;
        for trial in 0..100 {
            match worst_match(&p, &s, &g.instance(trial), roots) {
                Ok(w) => worst = worst.max(w),
                Err(e) => {
                    ok = false;
                    notes.push(format!("{name} trial {trial}: {e}"));
                    break;
                }
            }
        }
        ok &= worst <= 1e-6;
        notes.push(format!("{name} worst {worst:.1e}"));
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    check(ok, format!("{}, {}", notes.join("; "), secs(elapsed)))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn resultant_vanishing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut notes = Vec::new();
    let mut ok = true;
    for name in ["univariate", "two_conics", "three_quadrics"] {
        let s = sys(name);
        let p = plan(name, "both");
        let g = UnitNormal::for_plan(&p, 4);
        let mut worst: f64 = 0.0;
        for trial in 0..20 {
            let c = g.instance(trial);
            let inst = match fill(&p, &c) {
                Ok(i) => i,
                Err(e) => return fail(format!("{name}: {e}")),
            };
            let roots = match system_roots(&s, &c) {
                Ok(r) => r,
                Err(e) => return fail(format!("{name}: oracle {e}")),
            };
            for r in &roots.points {
                let xk = r[p.hidden];
                // Reference draws on the same scale as the root.
                let scale = 1.0 + xk.norm();
                let base = median(
                    (0..21)
                        .map(|_| {
                            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                            det(&inst.matrix_at(z * scale)).norm()
                        })
                        .collect(),
                );
                worst = worst.max(det(&inst.matrix_at(xk)).norm() / base);
            }
        }
        ok &= worst <= 1e-6;
        notes.push(format!("{name} {worst:.1e}"));
    }
    check(ok, format!("max ratio: {}", notes.join(", ")))
}

fn bridge_equivalence() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for name in ["univariate", "two_conics", "three_quadrics"] {
        let s = sys(name);
        let am = match build_from_hint(&s, 1) {
            Ok(a) => a,
            Err(e) => return fail(format!("{name}: {e}")),
        };
        let fwd = match am_to_res(&am) {
            Ok(r) => check_equivalence(&am, &r, 100, 5),
            Err(e) => return fail(format!("{name} am->res: {e}")),
        };
        let res = plan(name, "v1");
        let back = match res_to_am(&res) {
            Ok(a) => check_equivalence(&a, &res, 100, 5),
            Err(e) => return fail(format!("{name} res->am: {e}")),
        };
        for (dir, rep) in [("am->res", &fwd), ("res->am", &back)] {
            ok &= rep.equivalent && rep.size_match;
            notes.push(format!(
                "{name} {dir} {:.1e}{}",
                rep.max_rel_diff,
                if rep.size_match { "" } else { " size mismatch" }
            ));
        }
    }
    check(ok, notes.join(", "))
}

fn reduction_safety() -> Outcome {
    let fresh = RankProtocol::fresh(11);
    let mut checked = 0;
    let mut notes = Vec::new();
    for name in library::names() {
        let s = sys(name);
        for v in [Variant::V1, Variant::V2] {
            let cfg = GenConfig {
                variants: vec![v],
                ..GenConfig::default()
            };
            let Ok(p) = generate(&s, &cfg) else { continue };
            if !p.revalidate(&fresh) {
                notes.push(format!("{name} {v:?}: revalidation failed"));
            }
            checked += 1;
            // B1 before and after the reductions, starting from the selected candidate.
            let order = MonomialOrder::new(cfg.order, s.n_vars());
            let protocol = RankProtocol::standard(cfg.seed);
            let mut cands = search_candidates(&s, &cfg, &order);
            cands.sort_by_key(|c| c.key());
            let Some((aug, best)) = cands.into_iter().find_map(|c| {
                let aug = augment(&s, c.hidden).ok()?;
                if c.upper_rows() < c.eps() - c.n_solutions() {
                    return None;
                }
                matches!(test_partition(&aug, &c, &protocol), Verdict::Accepted(_)).then_some((aug, c))
            }) else {
                notes.push(format!("{name} {v:?}: no valid candidate"));
                continue;
            };
            let before = best.n_solutions();
            let r = reduce_rowcol(&aug, best, &protocol, cfg.seed);
            let mid = r.candidate.n_solutions();
            match squarify(&aug, r.candidate, &protocol, cfg.seed, cfg.retry_cap) {
                Ok(sq) if mid <= before && sq.candidate.n_solutions() <= mid => {}
                Ok(sq) => notes.push(format!(
                    "{name} {v:?}: |B1| {before} -> {mid} -> {}",
                    sq.candidate.n_solutions()
                )),
                Err(e) => notes.push(format!("{name} {v:?}: {e}")),
            }
        }
    }
    if checked == 0 {
        notes.push("no plans generated".into());
    }
    check(
        notes.is_empty(),
        if notes.is_empty() {
            format!("{checked} plans revalidated over primes {:?}", fresh.primes)
        } else {
            notes.join("; ")
        },
    )
}

fn stability() -> Outcome {
    let t = Instant::now();
    let p = plan("two_conics", "both");
    let rep = benchmark(&p, &UnitNormal::for_plan(&p, 7), 5000, 1e-3, false);
    let elapsed = t.elapsed();
    check(
        rep.fail_pct <= 1.0 && rep.mean_log10 <= -10.0 && elapsed < Duration::from_secs(120),
        format!(
            "fail {:.2}%, mean log10 {:.2}, median log10 {:.2}, {}",
            rep.fail_pct,
            rep.mean_log10,
            rep.median_log10,
            secs(elapsed)
        ),
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sparseres"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).trim().to_string())
    }
}

fn determinism() -> Outcome {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return fail(e.to_string()),
    };
    let system = Path::new(env!("CARGO_MANIFEST_DIR")).join("systems/three_quadrics.sys");
    let mut files = Vec::new();
    for run in 0..2 {
        let plan = dir.path().join(format!("plan{run}.json"));
        let report = dir.path().join(format!("report{run}.json"));
        let (ps, rs) = (plan.to_str().unwrap(), report.to_str().unwrap());
        if let Err(e) = run_cli(&["generate", "--system", system.to_str().unwrap(), "--out", ps, "--seed", "9"]) {
            return fail(format!("generate: {e}"));
        }
        if let Err(e) = run_cli(&["bench", "--plan", ps, "--trials", "300", "--seed", "9", "--report", rs]) {
            return fail(format!("bench: {e}"));
        }
        files.push((std::fs::read(&plan).unwrap(), std::fs::read(&report).unwrap()));
    }
    let same_plan = files[0].0 == files[1].0;
    let same_report = files[0].1 == files[1].1;
    let in_process = emit_plan(&plan("two_conics", "both")) == emit_plan(&plan("two_conics", "both"));
    check(
        same_plan && same_report && in_process,
        format!("plan identical {same_plan}, report identical {same_report}, in-process plan identical {in_process}"),
    )
}

fn eigen_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let data: Vec<f64> = (0..400).map(|_| rng.sample(StandardNormal)).collect();
        let a = RMatrix::from_vec(20, 20, data);
        let e = match eig(&a) {
            Ok(e) => e,
            Err(err) => return fail(err.to_string()),
        };
        let ac = a.to_complex();
        let fro = a.frobenius();
        for (j, &lambda) in e.values.iter().enumerate() {
            let v = e.vector(j);
            let av = ac.matvec(&v);
            let r = av.iter().zip(&v).map(|(x, y)| (x - lambda * y).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(r / fro);
        }
    }
    check(worst <= 1e-8, format!("max ||Av - lv|| / ||A||_F = {worst:.1e}"))
}

fn stretch_fundamental_lambda() -> Outcome {
    fail("not attempted: the F+lambda 8pt formulation has dependent coefficients outside the slot model")
}

type Criterion = (&'static str, bool, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("lattice fidelity", true, lattice_fidelity),
        ("univariate end to end", true, univariate_end_to_end),
        ("oracle equivalence", true, oracle_equivalence),
        ("resultant constraint vanishing", true, resultant_vanishing),
        ("action matrix equivalence", true, bridge_equivalence),
        ("reduction safety", true, reduction_safety),
        ("stability harness", true, stability),
        ("determinism", true, determinism),
        ("eigen kernel", true, eigen_kernel),
        ("stretch: F+lambda 8pt", false, stretch_fundamental_lambda),
    ];
    let mut gating_failures = 0;
    for (i, (name, gating, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if *gating { "" } else { " (non-gating)" };
        println!("criterion {:>2} {tag}{note}: {name}: {}", i + 1, o.detail);
        if *gating && !o.pass {
            gating_failures += 1;
        }
    }
    if gating_failures > 0 {
        println!("{gating_failures} gating criteria failed");
        std::process::exit(1);
    }
    println!("all gating criteria passed");
}
