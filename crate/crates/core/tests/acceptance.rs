//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::Instant;

use clonewt::attack::{attack, AttackConfig};
use clonewt::audit::{
    clique_cover_invariance, conjecture_search, locality_chain, run_graph_suite, run_metric_suite, strict_locality_demo,
    suite_graph, GraphSuiteConfig, MetricSuiteConfig, Target,
};
use clonewt::euclid::{removal_effect_gr, sharing_gr, Estimator};
use clonewt::graph::examples::{chain8, paw};
use clonewt::metric::{random_instance, InstanceKind};
use clonewt::numeric::{q, Q};
use clonewt::rules::{graph_entropy, w_entropy_report, EntropyOptions};
use clonewt::sharing::{chi_graph, eta, Value};
use clonewt::{equivalence_classes, Caps, Density, Graph, GraphWeighting, MetricInstance, MetricWeighting, Rule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUITE_RULES: [&str; 5] = ["cu", "lift:uniform", "smooth:cu", "mcca", "mccp"];

struct Board {
    failed: Vec<String>,
    started: Instant,
}

impl Board {
    fn line(&mut self, id: &str, what: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag}  {id:<16} {what}: {detail}");
        if !ok {
            self.failed.push(id.to_string());
        }
    }

    fn error(&mut self, id: &str, what: &str, e: clonewt::Error) {
        self.line(id, what, false, format!("error: {e}"));
    }
}

fn rule(spec: &str) -> Rule {
    Rule::parse(spec).expect("registry rule")
}

fn exact_weights(g: &Graph, spec: &str) -> Vec<Q> {
    rule(spec).weigh(g).expect("rule runs").exact().expect("exact rule").to_vec()
}

fn exact(v: &Value) -> Q {
    v.exact().cloned().expect("exact value")
}

fn fmt(v: &[Q]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn weights_on_chain(b: &mut Board) {
    let want = vec![q(1, 15), q(1, 15), q(1, 15), q(1, 5), q(1, 10), q(1, 10), q(1, 5), q(1, 5)];
    let got = exact_weights(&chain8(), "cu");
    b.line("1", "class-uniform weights on the 8-vertex chain", got == want, fmt(&got));
}

fn paw_ledger(b: &mut Board) {
    let g = paw();
    let cu = rule("cu");
    let one_plus_eta = eta(&g, &cu, 0).ok().and_then(|r| r.eta).map(|e| exact(&e) + Q::from_integer(1.into()));
    let chi = |spec: &str, x, y| chi_graph(&g, &rule(spec), x, y).map(|v| exact(&v)).ok();
    let checks = [
        ("w_cu", exact_weights(&g, "cu") == vec![q(1, 3), q(1, 3), q(1, 6), q(1, 6)]),
        ("1+η(a)", one_plus_eta == Some(q(2, 1))),
        ("χ_cu(a,b)", chi("cu", 0, 1) == Some(q(-1, 6))),
        ("χ_cu(b,a)", chi("cu", 1, 0) == Some(q(1, 6))),
        ("w_mcca", exact_weights(&g, "mcca") == vec![q(1, 4), q(5, 12), q(1, 6), q(1, 6)]),
        ("w_mccp", exact_weights(&g, "mccp") == vec![q(1, 3), q(4, 15), q(1, 5), q(1, 5)]),
        ("χ_mcca(a,b)", chi("mcca", 0, 1) == Some(q(-1, 4))),
        ("χ_mccp(a,b)", chi("mccp", 0, 1) == Some(q(-1, 15))),
    ];
    let bad: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = if bad.is_empty() { "8/8 exact values match".to_string() } else { format!("mismatch: {}", bad.join(", ")) };
    b.line("2", "paw ledger", bad.is_empty(), detail);
}

fn entropy_on_paw(b: &mut Board) {
    let g = paw();
    let caps = Caps::default();
    match w_entropy_report(&g, &EntropyOptions::default(), &caps) {
        Ok(rep) => {
            let want = [0.5, 0.0, 0.25, 0.25];
            let err = (0..4).map(|i| (rep.weights.get_f64(i) - want[i]).abs()).fold(0.0, f64::max);
            let value = graph_entropy(&g, &rep.weights, &caps).unwrap_or(f64::NAN);
            let ok = err <= 1e-6 && (value - 1.0).abs() <= 1e-9;
            b.line("3", "entropy rule on the paw", ok, format!("max |w − (1/2,0,1/4,1/4)| = {err:.2e}, H = {value:.12}"));
        }
        Err(e) => b.error("3", "entropy rule on the paw", e),
    }
}

fn evaluate_vs_oracle(b: &mut Board) {
    let mw = MetricWeighting::from_rule(rule("cu"), Density::uniform(1.0).unwrap());
    let steps = 100_000;
    let mut worst_ratio: f64 = 0.0;
    let mut failures = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for seed in 0..100u64 {
        let n = rng.gen_range(2..=10);
        let kind = if seed % 2 == 0 {
            InstanceKind::Euclidean { dim: 1 + (seed as usize / 2) % 3, n }
        } else {
            InstanceKind::ShortestPath { n, density: 0.3 }
        };
        let inst = random_instance(kind, seed).unwrap();
        let w = mw.evaluate_all(&inst).unwrap();
        let oracle = mw.riemann_oracle_all(&inst, steps).unwrap();
        let bound = mw.oracle_bound(&inst, steps);
        for (x, o) in oracle.iter().enumerate() {
            let gap = (w.get_f64(x) - o).abs();
            worst_ratio = worst_ratio.max(gap / bound);
            failures += usize::from(gap > bound);
        }
    }
    let three = MetricInstance::from_points(None, vec![vec![0.0], vec![0.4], vec![2.0]]).unwrap();
    let hand = mw.clone().exact(true).evaluate_all(&three).unwrap();
    let hand_ok = hand.exact() == Some(&[q(17, 60), q(17, 60), q(13, 30)][..]);
    b.line(
        "4",
        "sweep vs Riemann oracle (100 instances, 1e5 steps)",
        failures == 0 && hand_ok,
        format!("{failures} elements over bound, worst gap/bound {worst_ratio:.3}; {{0, 0.4, 2}} → {}", fmt(hand.exact().unwrap_or(&[]))),
    );
}

fn metric_suite(b: &mut Board) {
    for spec in SUITE_RULES {
        let r = rule(spec);
        let exact = r.kind.is_exact();
        let mw = MetricWeighting::from_rule(r, Density::uniform(1.0).unwrap()).exact(exact);
        let id = format!("5:{spec}");
        match run_metric_suite(&mw, &MetricSuiteConfig::default()) {
            Ok(rep) => {
                let detail = format!(
                    "violations pos {} sym {} fair {} loc {} cont {}; worst slack fair {:.3} loc {:.3} cont {:.3}",
                    rep.positivity.violations,
                    rep.symmetry.violations,
                    rep.clone_fairness.violations,
                    rep.alpha_locality.violations,
                    rep.continuity.violations,
                    rep.clone_fairness.worst_slack,
                    rep.alpha_locality.worst_slack,
                    rep.continuity.worst_slack,
                );
                b.line(&id, "metric property suite (100 instances)", rep.violations() == 0, detail);
            }
            Err(e) => b.error(&id, "metric property suite", e),
        }
    }
}

fn graph_suite(b: &mut Board) {
    for spec in SUITE_RULES {
        let id = format!("6:{spec}");
        match run_graph_suite(&rule(spec), &GraphSuiteConfig::default()) {
            Ok(rep) => b.line(
                &id,
                "graph clone-robustness (500 graphs, exact)",
                rep.violations() == 0,
                format!(
                    "{} symmetry / {} locality checks, {} + {} violations",
                    rep.symmetry_checks, rep.locality_checks, rep.symmetry_violations, rep.locality_violations
                ),
            ),
            Err(e) => b.error(&id, "graph clone-robustness", e),
        }
    }
}

fn euclidean_sharing(b: &mut Board) {
    let line = |xs: &[f64]| xs.iter().map(|&x| vec![x]).collect::<Vec<_>>();
    let m = sharing_gr(&line(&[0.0, 1.0]), 1.0, Estimator::Exact).unwrap();
    let ex = m.exact.as_ref().unwrap();
    let removal = removal_effect_gr(&line(&[0.0, 1.0]), 1.0, 0, Estimator::Exact).unwrap();
    let pair_ok = ex.weights == vec![q(1, 2), q(1, 2)]
        && ex.chi[0][1] == q(1, 6)
        && ex.chi[0][0] == q(1, 3)
        && removal.holds
        && removal.eta.value == 0.5
        && removal.max_residual <= f64::EPSILON;
    let dil = sharing_gr(&line(&[0.0, -1.6, -1.6, 1.8]), 1.5, Estimator::Exact).unwrap();
    let dil = dil.exact.unwrap();
    let dilution_ok = dil.chi[0][1] < dil.chi[0][3];

    let mut misses = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=6);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0)]).collect();
        let m = sharing_gr(&pts, 0.6, Estimator::MonteCarlo { samples: 200_000, seed }).unwrap();
        for x in 0..n {
            let row: f64 = m.chi[x].iter().map(|c| c.value).sum();
            if (m.weights[x].value - row).abs() > m.weights[x].half_width + m.row_half_width(x) {
                misses += 1;
            }
        }
    }
    b.line(
        "7",
        "Euclidean sharing",
        pair_ok && dilution_ok && misses == 0,
        format!(
            "pair {{0,1}}: {}; dilution χ(x,y₁) = {} < χ(x,z) = {}: {}; 2-D rows outside 99% band: {misses}",
            if pair_ok { "ok" } else { "mismatch" },
            dil.chi[0][1],
            dil.chi[0][3],
            dilution_ok
        ),
    );
}

fn locality_demo(b: &mut Board) {
    let r = strict_locality_demo();
    let without_p3 = r.stages.iter().find(|s| s.name == "G∖P3");
    let c1 = without_p3.and_then(|s| s.values.iter().find(|(l, _)| l == "c1")).map(|(_, v)| v.as_str());
    let mut leg = Graph::with_labels(["a1", "b1", "c1", "d"].map(String::from).to_vec());
    for i in 1..4 {
        leg.add_edge(i - 1, i);
    }
    let single = locality_chain(&leg, "leg", &[]).map(|l| !l.contradiction).unwrap_or(false);
    let ok = r.contradiction
        && r.w1.as_deref() == Some("0")
        && r.w2.as_deref() == Some("0")
        && r.total_mass.as_deref() == Some("0")
        && c1 == Some("0")
        && single;
    b.line(
        "8",
        "strong-locality contradiction on the spider",
        ok,
        format!(
            "contradiction at stage {:?}, w1 = {:?}, w2 = {:?}, mass {:?}, w(G∖P3)(c1) = {:?}, single leg consistent: {single}",
            r.contradiction_stage, r.w1, r.w2, r.total_mass, c1
        ),
    );
}

fn cover_invariance(b: &mut Board) {
    let caps = Caps::default();
    let (mut tested, mut mismatches, mut index) = (0, 0, 0);
    while tested < 200 {
        let g = suite_graph(17, index, 8);
        index += 1;
        if equivalence_classes(&g).len() == g.len() {
            continue;
        }
        tested += 1;
        mismatches += usize::from(clique_cover_invariance(&g, &caps).unwrap().is_some());
    }
    b.line("9", "clique cover under clone removal", mismatches == 0, format!("{tested} graphs with twins, {mismatches} mismatches"));
}

fn attack_resistance(b: &mut Board) {
    let mw = MetricWeighting::from_rule(rule("cu"), Density::uniform(1.0).unwrap()).exact(true);
    let k = 5;
    let (mut far, mut moved, mut uniform_ok, mut runs) = (0, 0, true, 0);
    for seed in 0..10u64 {
        let inst = random_instance(InstanceKind::Euclidean { dim: 2, n: 6 }, seed).unwrap();
        let inst = inst.scaled(2.0).unwrap();
        let rep = attack(&inst, &mw, &AttackConfig { target: 0, k, eps: 0.0, seed }).unwrap();
        runs += 1;
        far += rep.far.len();
        moved += rep.far.iter().filter(|r| !r.exactly_zero).count();
        uniform_ok &= rep.uniform.after == rep.uniform_expected;
    }
    b.line(
        "10",
        "duplication attack, k = 5 perfect clones",
        far > 0 && moved == 0 && uniform_ok,
        format!("{runs} instances, {far} far elements, {moved} moved; uniform family mass = (1+k)/(n+k): {uniform_ok}"),
    );
}

fn conjectures(b: &mut Board) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (spec, budget) in [("mcc_axiom2:mcca", 10_000), ("mcc_axiom2:mccp", 10_000), ("entropy_negative_chi", 100)] {
        let target = Target::parse(spec).unwrap();
        let a = conjecture_search(&target, budget, 0).unwrap();
        let again = conjecture_search(&target, budget, 0).unwrap();
        let same = a.examined == budget
            && a.verdict == again.verdict
            && a.witnesses.iter().map(|w| &w.edges).eq(again.witnesses.iter().map(|w| &w.edges));
        ok &= same;
        if spec.starts_with("mcc") {
            // The paw is examined first and is itself a witness.
            ok &= a.witnesses.first().is_some_and(|w| w.edges == paw().to_edge_list());
        }
        parts.push(format!("{spec}: {} ({} graphs)", a.verdict, a.examined));
    }
    b.line("conjectures", "bounded counterexample search", ok, parts.join("; "));
}

fn main() -> ExitCode {
    let mut b = Board { failed: Vec::new(), started: Instant::now() };
    weights_on_chain(&mut b);
    paw_ledger(&mut b);
    entropy_on_paw(&mut b);
    evaluate_vs_oracle(&mut b);
    metric_suite(&mut b);
    graph_suite(&mut b);
    euclidean_sharing(&mut b);
    locality_demo(&mut b);
    cover_invariance(&mut b);
    attack_resistance(&mut b);
    conjectures(&mut b);
    println!("acceptance finished in {:.1}s", b.started.elapsed().as_secs_f64());
    if b.failed.is_empty() {
        println!("all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("failing: {}", b.failed.join(", "));
        ExitCode::FAILURE
    }
}
