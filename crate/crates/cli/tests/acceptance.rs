#![allow(clippy::needless_range_loop)]

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use mgl::bundle::{check_paired, pair, symmetrize, HermitianBundle};
use mgl::cone::{domination_set_excess, moreau_decompose, positive_part, project_c, ConeContext};
use mgl::domination::{diamagnetic_report, domination_report, DominationReport, SamplingConfig};
use mgl::fixtures::{
    doubled_weights, exhaustion_bundle, exhaustion_prefixes, p2, p2_flux_pi, perturbed_p3, random_diamagnetic,
    random_diamagnetic_with, random_doubled_weights, random_graph, scalar_fixtures,
};
use mgl::form::{assemble_magnetic_form, assemble_scalar_form, FormOperator};
use mgl::metric::{check_intrinsic, path_metric, strongly_intrinsic_check, EdgeLengths};
use mgl::random::{self, seeded};
use mgl::section::{ScalarFunction, Section};
use mgl::spectral::{identity_suite, markov_check, positivity_check, EULER_POWERS};
use mgl::uniqueness::exhaustion_uniqueness_experiment;
use mgl::WeightedGraph;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn real(v: &[f64]) -> ScalarFunction {
    ScalarFunction::real(v.iter().copied())
}

fn positive_measure<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.1..10.0)).collect()
}

fn moreau() -> Outcome {
    let mut rng = seeded(101);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=50);
        let ctx = ConeContext::from_measure(positive_measure(&mut rng, n));
        let g = random::real_vector(&mut rng, n);
        let (h1, h2) = moreau_decompose(&real(&g), &ctx).unwrap();
        let (h1, h2) = (h1.real_parts(), h2.real_parts());
        let exact = (0..n).all(|i| h1[i] - h2[i] == g[i]);
        let orthogonal = ctx.inner(&h1, &h2) == 0.0;
        let oracle = common::clamp(&g);
        let clamp = h1.iter().zip(&oracle).all(|(a, b)| a.to_bits() == b.to_bits())
            && positive_part(&real(&g)).unwrap().real_parts() == h1;
        if !(exact && orthogonal && clamp) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("1000 vectors, {bad} inexact"))
}

fn projection() -> Outcome {
    let mut rng = seeded(102);
    let mut oracle_gap = 0.0f64;
    let mut idempotence = 0.0f64;
    let mut vi_slack = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let rank = rng.random_range(1..=2);
        let graph = Arc::new(
            WeightedGraph::new(n, [], vec![0.0; n], positive_measure(&mut rng, n)).unwrap(),
        );
        let bundle = HermitianBundle::trivial(graph.clone(), rank);
        let ctx = ConeContext::new(&graph);
        let m = graph.measure();
        let f1 = random::sparse_section(&mut rng, n, rank);
        let g: Vec<f64> = random::real_vector(&mut rng, n).iter().map(|x| 1.5 * x).collect();

        let (u, v) = project_c(&f1, &real(&g), &bundle, &ctx).unwrap();
        let v = v.real_parts();
        let (ou, ov) = common::project_c_oracle(&f1, &g);
        oracle_gap = oracle_gap
            .max(common::max_abs_diff(u.values(), ou.values()))
            .max(v.iter().zip(&ov).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));

        let (uu, vv) = project_c(&u, &real(&v), &bundle, &ctx).unwrap();
        idempotence = idempotence
            .max(common::max_abs_diff(uu.values(), u.values()))
            .max(vv.real_parts().iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));

        let ru = f1.sub(&u);
        let rv: Vec<f64> = g.iter().zip(&v).map(|(a, b)| a - b).collect();
        for _ in 0..100 {
            let w = random::sparse_section(&mut rng, n, rank);
            let z: Vec<f64> = w
                .pointwise_norms()
                .iter()
                .map(|s| s + rng.random::<f64>() * rng.random_range(0.0..2.0))
                .collect();
            assert!(domination_set_excess(&w, &z) <= 0.0);
            let du = w.sub(&u);
            let dv: Vec<f64> = z.iter().zip(&v).map(|(a, b)| a - b).collect();
            let pairing = ru.inner(&du, m).re + ctx.inner(&rv, &dv);
            vi_slack = vi_slack.min(-pairing);
        }
    }
    let pass = oracle_gap <= 1e-8 && idempotence <= 1e-12 && vi_slack >= -1e-9;
    outcome(
        pass,
        format!("oracle gap {oracle_gap:.2e}, idempotence {idempotence:.2e}, variational slack {vi_slack:.2e}"),
    )
}

/// The 100 seeded diamagnetic instances shared by criteria 3 and 4.
fn diamagnetic_reports() -> Vec<DominationReport> {
    let mut rng = seeded(103);
    let bundles: Vec<_> = (0..100).map(|_| random_diamagnetic(&mut rng)).collect();
    let config = SamplingConfig::default();
    std::thread::scope(|s| {
        let handles: Vec<_> = bundles
            .chunks(25)
            .map(|chunk| {
                let config = &config;
                s.spawn(move || {
                    chunk
                        .iter()
                        .map(|b| diamagnetic_report(b, config).unwrap())
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    })
}

fn diamagnetic(reports: &[DominationReport]) -> Outcome {
    let hypothesis = reports.iter().all(|r| r.hypothesis.passed);
    let min_slack = reports
        .iter()
        .flat_map(|r| [r.semigroup.slack, r.resolvent.slack, r.form.verdict.slack])
        .fold(f64::INFINITY, f64::min);
    let all = reports.iter().all(|r| r.all_pass());
    outcome(
        hypothesis && all && min_slack >= -1e-9,
        format!("100 bundles, min slack {min_slack:.2e}"),
    )
}

fn consistency(reports: &[DominationReport]) -> Outcome {
    let mut agree = reports.iter().all(|r| r.verdicts_agree());
    let mut rng = seeded(104);
    let config = SamplingConfig::default();
    let mut min_violation = f64::INFINITY;
    for _ in 0..20 {
        let pair = random_doubled_weights(&mut rng);
        let r = domination_report(&pair.bundle, &pair.dominating, &config).unwrap();
        agree &= r.verdicts_agree() && !r.semigroup.pass;
        for v in [&r.semigroup, &r.resolvent, &r.form.verdict] {
            min_violation = min_violation.min(v.violation());
        }
    }

    // derived witness on P2: Re a(δ0, δ1) = −2 against b(δ0, δ1) = −1
    let d = doubled_weights(&p2());
    let a = assemble_magnetic_form(&d.bundle).unwrap();
    let b = assemble_scalar_form(&d.dominating).unwrap();
    let f1 = common::as_complex(&[1.0, 0.0]);
    let f2 = common::as_complex(&[0.0, 1.0]);
    let qa = a.evaluate(&f1, &f2).unwrap().re;
    let qb = b.evaluate(&f1, &f2).unwrap().re;
    let r = domination_report(&d.bundle, &d.dominating, &config).unwrap();
    let witness = qa == -2.0 && qb == -1.0 && r.form.verdict.slack <= qa - qb;

    outcome(
        agree && witness && min_violation >= 1e-2,
        format!("120 instances agree: {agree}, min counterexample violation {min_violation:.3}, P2 witness a = {qa}, b = {qb}"),
    )
}

fn identity_fixtures() -> Vec<(String, FormOperator)> {
    let mut forms: Vec<_> = scalar_fixtures()
        .into_iter()
        .map(|(name, g)| (name, assemble_scalar_form(&g).unwrap()))
        .collect();
    forms.push(("p2 flux".into(), assemble_magnetic_form(&p2_flux_pi()).unwrap()));
    let mut rng = seeded(105);
    for i in 0..3 {
        let b = random_diamagnetic_with(&mut rng, 8 + 4 * i, 1 + i);
        forms.push((format!("diamagnetic {i}"), assemble_magnetic_form(&b).unwrap()));
    }
    forms
}

fn identities() -> Outcome {
    let mut rng = seeded(106);
    let mut failures = Vec::new();
    let (mut worst_laplace, mut worst_ratio, mut worst_abs) = (0.0f64, 0.0f64, 0.0f64);
    let mut form_ratios = (f64::INFINITY, 0.0f64);
    for (name, form) in identity_fixtures() {
        let u = random::complex_vector(&mut rng, form.dim());
        let rho = form.spectral_radius();
        let mut t_list = vec![0.1, 1.0];
        if rho > 0.0 {
            t_list.push(10.0 / rho);
        }
        let r = identity_suite(&form, u.as_slice(), &[0.5, 2.0], &t_list).unwrap();
        let mut ok = true;
        for c in &r.laplace {
            worst_laplace = worst_laplace.max(c.residual / c.input_norm);
            ok &= c.residual <= 1e-6 * c.input_norm;
        }
        for e in &r.euler {
            assert!(EULER_POWERS[0] >= 256);
            for &q in &e.ratios {
                worst_ratio = worst_ratio.max(q);
                ok &= q <= 0.75;
            }
            if e.t * rho <= 10.0 {
                let last = *e.errors.last().unwrap();
                worst_abs = worst_abs.max(last / form.norm(u.as_slice()));
                ok &= last <= 1e-3 * form.norm(u.as_slice());
            }
        }
        if let Some(f) = &r.form_limit {
            form_ratios = (form_ratios.0.min(f.ratio), form_ratios.1.max(f.ratio));
            ok &= (0.35..=0.65).contains(&f.ratio);
        }
        if !ok {
            failures.push(name);
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "laplace {worst_laplace:.1e}·|u|, euler ratio ≤ {worst_ratio:.3}, euler error ≤ {worst_abs:.1e}·|u|, \
             quotient ratios [{:.3}, {:.3}]{}",
            form_ratios.0,
            form_ratios.1,
            if failures.is_empty() { String::new() } else { format!(", failing: {failures:?}") }
        ),
    )
}

fn beurling_deny() -> Outcome {
    let mut rng = seeded(107);
    let t_list = [0.01, 0.1, 1.0, 10.0];
    let mut failing = Vec::new();
    for (name, g) in scalar_fixtures() {
        let form = assemble_scalar_form(&g).unwrap();
        let p = positivity_check(&form, &t_list, 100, &mut rng).unwrap();
        let m = markov_check(&form, &t_list, 100, &mut rng).unwrap();
        let ok = p.semigroup_pass
            && p.form_pass
            && p.semigroup_min_entry >= -1e-10
            && m.passed
            && m.min_entry >= -1e-10
            && m.max_entry <= 1.0 + 1e-10;
        if !ok {
            failing.push(name);
        }
    }
    let p = positivity_check(&perturbed_p3(), &t_list, 100, &mut rng).unwrap();
    let detected = !p.semigroup_pass && !p.form_pass && p.agree;
    outcome(
        failing.is_empty() && detected,
        format!(
            "{} fixtures clean, perturbation min entry {:.3e} and form excess {:.3e}",
            scalar_fixtures().len() - failing.len(),
            p.semigroup_min_entry,
            p.form_max_excess
        ),
    )
}

fn metric_fixtures() -> Vec<WeightedGraph> {
    let mut graphs: Vec<_> = scalar_fixtures().into_iter().map(|(_, g)| g).collect();
    let mut rng = seeded(108);
    for _ in 0..40 {
        let n = rng.random_range(2..=8);
        let killing = rng.random::<bool>();
        graphs.push(random_graph(&mut rng, n, 0.5, killing));
    }
    graphs
}

fn intrinsic() -> Outcome {
    let mut rng = seeded(109);
    let (mut strong_fail, mut implication_fail, mut enumeration_fail) = (0, 0, 0);
    let mut checked = (0, 0);
    for g in metric_fixtures() {
        let degree = EdgeLengths::degree_adapted(&g);
        if g.killing().iter().all(|&c| c == 0.0) {
            checked.0 += 1;
            if !strongly_intrinsic_check(&g, &degree).passed {
                strong_fail += 1;
            }
        }
        let scaled = rng.random_range(0.3..2.0);
        let random_lengths = EdgeLengths::new(
            &g,
            degree.lengths().iter().map(|s| s * scaled * rng.random_range(0.5..1.5)).collect(),
        )
        .unwrap();
        for sigma in [&degree, &random_lengths] {
            let d = path_metric(&g, sigma);
            if strongly_intrinsic_check(&g, sigma).passed && !check_intrinsic(&g, &d).unwrap().passed {
                implication_fail += 1;
            }
            if g.n() <= 8 {
                checked.1 += 1;
                let oracle = common::enumerate_path_lengths(&g, sigma.lengths());
                for x in 0..g.n() {
                    for y in 0..g.n() {
                        let same = match (d.get(x, y).finite(), oracle[x][y]) {
                            (Some(a), Some(b)) => (a - b).abs() <= 1e-12 * b.max(1.0),
                            (None, None) => true,
                            _ => false,
                        };
                        if !same {
                            enumeration_fail += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(
        strong_fail + implication_fail + enumeration_fail == 0,
        format!(
            "strongly intrinsic on {}/{} c≡0 graphs, {implication_fail} implication failures, \
             {} metrics enumerated with {enumeration_fail} mismatches",
            checked.0 - strong_fail,
            checked.0,
            checked.1
        ),
    )
}

fn exhaustion() -> Outcome {
    let bundle = exhaustion_bundle();
    let subsets = exhaustion_prefixes(bundle.graph());
    let first = exhaustion_uniqueness_experiment(&bundle, &subsets).unwrap();
    let again = exhaustion_uniqueness_experiment(&exhaustion_bundle(), &subsets).unwrap();
    let stable = serde_json::to_string(&first).unwrap() == serde_json::to_string(&again).unwrap();
    let last = first.gaps.last().unwrap();
    let pass = first.scalar_strictly_decreasing
        && first.magnetic_decreasing
        && last.scalar <= 1e-12
        && last.magnetic <= 1e-12
        && stable;
    let column: Vec<String> = first.gaps.iter().map(|r| format!("{:.4e}", r.scalar)).collect();
    outcome(pass, format!("scalar gaps [{}], byte-stable: {stable}", column.join(", ")))
}

fn symmetrization() -> Outcome {
    let mut rng = seeded(110);
    let mut worst = [f64::INFINITY; 5];
    for _ in 0..1000 {
        let n = rng.random_range(1..=20);
        let rank = rng.random_range(1..=3);
        let m = positive_measure(&mut rng, n);
        let graph = Arc::new(WeightedGraph::new(n, [], vec![0.0; n], m.clone()).unwrap());
        let bundle = HermitianBundle::trivial(graph, rank);
        let f1 = random::sparse_section(&mut rng, n, rank);
        let f2 = random::sparse_section(&mut rng, n, rank);
        let s = |f: &Section| symmetrize(f, &bundle).unwrap();
        let (s1, s2) = (s(&f1), s(&f2));

        // |⟨f1, f2⟩| ≤ ⟨S f1, S f2⟩
        let slack = s1.inner(&s2, &m).re - f1.inner(&f2, &m).norm();
        worst[0] = worst[0].min(slack);

        let g = random::nonnegative_function(&mut rng, n);
        let sum: Vec<f64> = s1.real_parts().iter().zip(s2.real_parts()).map(|(a, b)| a + b).collect();
        let slack = real(&sum).inner(&g, &m).re - s(&f1.add(&f2)).inner(&g, &m).re;
        worst[1] = worst[1].min(slack);

        let alpha = random::complex_normal(&mut rng);
        let lhs = s(&f1.scale(alpha)).real_parts();
        let err = lhs
            .iter()
            .zip(s1.real_parts())
            .map(|(a, b)| (a - alpha.norm() * b).abs() / (alpha.norm() * b).max(1.0))
            .fold(0.0, f64::max);
        worst[2] = worst[2].min(1e-14 - err);

        let diff: Vec<f64> = s1.real_parts().iter().zip(s2.real_parts()).map(|(a, b)| a - b).collect();
        let slack = f1.sub(&f2).norm(&m) - real(&diff).norm(&m);
        worst[3] = worst[3].min(slack);

        // |f1 − f2| = |f1| − |f2| for a paired f2 with |f2| ≤ |f1|
        let target = ScalarFunction::real(s1.real_parts().iter().map(|x| x * rng.random::<f64>()));
        let p = pair(&f1, &target, &bundle).unwrap();
        assert!(check_paired(&f1, &p).unwrap().paired);
        let lhs = s(&f1.sub(&p)).real_parts();
        let err = lhs
            .iter()
            .zip(s1.real_parts().iter().zip(target.real_parts()))
            .map(|(a, (b, c))| (a - (b - c)).abs())
            .fold(0.0, f64::max);
        worst[4] = worst[4].min(1e-10 - err);
    }
    let names = ["cauchy-schwarz", "triangle", "homogeneity", "lipschitz", "abs-difference"];
    let pass = worst.iter().all(|&w| w >= -1e-12);
    let detail: Vec<String> = names.iter().zip(worst).map(|(n, w)| format!("{n} {w:.1e}")).collect();
    outcome(pass, format!("1000 pairs, min slack: {}", detail.join(", ")))
}

fn run_cli(args: &[&str], dir: &Path, out: &str) -> Vec<u8> {
    let path = dir.join(out);
    let status = Command::new(env!("CARGO_BIN_EXE_mgl"))
        .args(args)
        .arg("--out")
        .arg(&path)
        .env_remove("MGL_SEED")
        .output()
        .unwrap();
    assert!(status.status.code() == Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    std::fs::read(path).unwrap()
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, json: String| {
        let p = dir.path().join(name);
        std::fs::write(&p, json).unwrap();
        p.to_str().unwrap().to_string()
    };
    let bundle = random_diamagnetic_with(&mut seeded(111), 20, 2);
    let graph = write("graph.json", serde_json::to_string(&bundle.graph().to_spec()).unwrap());
    let bundle = write("bundle.json", serde_json::to_string(&bundle.to_spec()).unwrap());
    let path = exhaustion_bundle();
    let path_graph = write("path.json", serde_json::to_string(&path.graph().to_spec()).unwrap());
    let path_bundle = write("phases.json", serde_json::to_string(&path.to_spec()).unwrap());

    let dominate = ["dominate", "--graph", &graph, "--bundle", &bundle, "--seed", "7"];
    let uniqueness = ["uniqueness", "--graph", &path_graph, "--bundle", &path_bundle, "--sizes", "10,20,30,40,50"];
    let d1 = run_cli(&dominate, dir.path(), "d1.json");
    let d2 = run_cli(&dominate, dir.path(), "d2.json");
    let u1 = run_cli(&uniqueness, dir.path(), "u1.json");
    let u2 = run_cli(&uniqueness, dir.path(), "u2.json");
    outcome(
        d1 == d2 && u1 == u2,
        format!("dominate {} bytes identical: {}, uniqueness {} bytes identical: {}", d1.len(), d1 == d2, u1.len(), u1 == u2),
    )
}

fn main() {
    let start = Instant::now();
    let names = [
        "moreau decomposition exact",
        "projection onto C vs oracle",
        "diamagnetic domination",
        "three-way consistency",
        "analytic identities",
        "beurling-deny suite",
        "intrinsic metrics",
        "exhaustion regression",
        "symmetrization properties",
        "cli determinism",
    ];
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let domination = s.spawn(|| {
            let reports = diamagnetic_reports();
            (diamagnetic(&reports), consistency(&reports))
        });
        let others: Vec<_> = [
            moreau as fn() -> Outcome,
            projection,
            identities,
            beurling_deny,
            intrinsic,
            exhaustion,
            symmetrization,
            cli_determinism,
        ]
        .into_iter()
        .map(|f| s.spawn(f))
        .collect();
        let mut others: Vec<Outcome> = others.into_iter().map(|h| h.join().unwrap()).collect();
        let (c3, c4) = domination.join().unwrap();
        let tail = others.split_off(2);
        others.into_iter().chain([c3, c4]).chain(tail).collect()
    });
    let mut failed = 0;
    for (i, (name, o)) in names.iter().zip(&outcomes).enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {}/10 passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
