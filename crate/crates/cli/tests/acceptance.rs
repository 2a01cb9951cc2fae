//! Acceptance suite: one PASS/FAIL line per criterion, tolerance 1e-9.
//!
//! Runs without the libtest harness so the lines are always shown; exits
//! non-zero when any criterion fails.

use std::time::Instant;

use nalgebra::DMatrix;
use qtorsion::classify::{classify_gh_all, hkt_check, hkt_identities, qkt_check, universal_identities, Check};
use qtorsion::corpus::{self, example, ExampleParams, GoldenCheck, Status};
use qtorsion::transforms::{
    change_basis, closed_one_forms, conformal_recompute, conformal_shift, d_squared_defect, recipe_torsion,
    skew_connection_check,
};
use qtorsion::{AqhModel, Form, Quat, TorsionReport};
use qtorsion_cli::{example_models, tolerance_stable};
use rand::{Rng, SeedableRng};

const TOL: f64 = 1e-9;

struct Outcome {
    failures: Vec<String>,
    checks: usize,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), checks: 0 }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn check(&mut self, prefix: &str, c: &Check) {
        self.expect(c.passed, || format!("{prefix}: {} (residual {:.2e})", c.name, c.residual));
    }

    fn golden(&mut self, c: &GoldenCheck) {
        self.expect(c.literal_pass(), || match c.status {
            Status::Misprint => format!("{} (printed value differs by {:.2e})", c.name, c.printed_residual.unwrap_or(f64::NAN)),
            _ => format!("{} (residual {:.2e})", c.name, c.residual),
        });
    }
}

fn params(name: &str) -> Vec<ExampleParams> {
    let d = ExampleParams::default();
    match name {
        "s3xt4m1" => vec![ExampleParams { m: 1, ..d }, ExampleParams { m: 2, ..d }],
        "t3mk3-a" | "t3mk3-b" => [1.0, 0.5, 2.0].map(|k| ExampleParams { k, ..d }).to_vec(),
        "torus" => vec![ExampleParams { n: 2, ..d }, ExampleParams { n: 3, ..d }],
        _ => vec![d],
    }
}

fn models(name: &str) -> Vec<(String, ExampleParams, AqhModel)> {
    params(name).into_iter().map(|p| (format!("{name} {p:?}"), p, example(name, p).expect("example builds"))).collect()
}

/// Stated module memberships.
const CLASSES: [(&str, &str); 8] = [
    ("s3xt9", "Λ³₀E S³H + KH"),
    ("s3xt4m1", "(K+E)H"),
    ("qheis", "Λ³₀EH + KH"),
    ("t3h3-a", "K S³H + E S³H + KH + EH"),
    ("t3h3-b", "Λ³₀E S³H + K S³H + KH + EH"),
    ("t3mk3-a", "K S³H + E S³H"),
    ("t3mk3-b", "K S³H + Λ³₀EH + KH"),
    ("salamon", "K S³H"),
];

fn golden_classifications() -> Outcome {
    let mut o = Outcome::new();
    for (name, label) in CLASSES {
        for (tag, _, m) in models(name) {
            let r = TorsionReport::from_model(&m, TOL);
            let got = r.label();
            o.expect(got == label, || format!("{tag}: expected \"{label}\", got \"{got}\""));
            if name == "s3xt9" {
                let zero = r.psi3_a.iter().chain(&r.psi_k_a).chain(&r.theta_a).chain([&r.theta]).all(|f| f.is_zero(TOL));
                o.expect(zero, || format!("{tag}: ψ3_A, ψK_A, θ, θ_A vanish"));
            }
            if name == "s3xt4m1" {
                o.expect(r.flags.xkh && r.flags.xeh, || format!("{tag}: ξ_KH and ξ_EH nonzero"));
                o.expect(hkt_check(&m, TOL).is_hkt, || format!("{tag}: HKT"));
            }
        }
    }
    // Flags and the "not in a proper submodule" requirement via the table.
    for e in &corpus::golden().models {
        for c in corpus::model_checks(e, TOL).expect("golden entry evaluates") {
            if c.name.contains(": flags {") {
                o.golden(&c);
            }
        }
    }
    o
}

fn golden_forms() -> Outcome {
    let mut o = Outcome::new();
    let g = corpus::golden();
    for e in &g.models {
        let mut e = e.clone();
        e.gh = None;
        e.hkt = None;
        e.qkt = None;
        e.skew_recipe = None;
        for c in corpus::model_checks(&e, TOL).expect("golden entry evaluates") {
            if !c.name.contains("class") && !c.name.contains("flag") {
                o.golden(&c);
            }
        }
    }
    for e in &g.conformal {
        let mut e = e.clone();
        e.gh = None;
        e.hkt = None;
        for c in corpus::conformal_checks(&e, TOL).expect("conformal entry evaluates") {
            if !c.name.contains("class") {
                o.golden(&c);
            }
        }
    }
    o
}

const GH: [(&str, &str); 8] = [
    ("s3xt9", "W_{1+3}"),
    ("s3xt4m1", "W_{3+4}"),
    ("qheis", "W_3"),
    ("t3h3-a", "W_{2+3+4}"),
    ("t3h3-b", "W_{1+2+3}"),
    ("t3mk3-a", "W_{2+3+4}"),
    ("t3mk3-b", "W_{2+3}"),
    ("torus", "Kähler"),
];

fn gray_hervella() -> Outcome {
    let mut o = Outcome::new();
    for (name, label) in GH {
        let strict = !matches!(name, "qheis" | "torus");
        for (tag, _, m) in models(name) {
            for g in classify_gh_all(&m, TOL) {
                let s = g.structure.name();
                o.expect(g.label == label, || format!("{tag}: {s} is {}, expected {label}", g.label));
                o.expect(!strict || g.strict(), || format!("{tag}: {s} type {label} is not strict"));
            }
        }
    }
    o
}

fn random_orthogonal(dim: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let qr = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0)).qr();
    let (q, r) = (qr.q(), qr.r());
    q * DMatrix::from_diagonal(&r.diagonal().map(|d: f64| d.signum()))
}

fn identity_suite(o: &mut Outcome, tag: &str, m: &AqhModel) {
    let r = TorsionReport::from_model(m, TOL);
    let scale = m.dws().iter().map(Form::max_norm).fold(0.0, f64::max);
    let small = |x: f64| !qtorsion::is_nonzero(x, scale, TOL);
    for (what, v) in r.identity_residuals(m.triple()) {
        o.expect(!qtorsion::is_nonzero(v, r.scale, TOL), || format!("{tag}: {what} ({v:.2e})"));
    }
    for c in universal_identities(m, &r, TOL) {
        o.check(tag, &c);
    }
    for a in Quat::ALL {
        let s = a.name();
        let nabla = m.nabla_omega(a);
        o.expect(small(nabla.max_diff(&m.gray_rhs(a))), || format!("{tag}: Gray identity for {s}"));
        o.expect(small(nabla.max_diff(&m.nabla_omega_from_dw(a))), || format!("{tag}: ∇ω_{s} from dω"));
        o.expect(small(nabla.max_diff(&m.nabla_omega_from_dw_alt(a))), || format!("{tag}: ∇ω_{s} second formula"));
        let n = m.nijenhuis_oracle(a);
        o.expect(small(n.max_diff(&m.nijenhuis_from_dw(a))), || format!("{tag}: N_{s} from dω vs brackets"));
    }
    o.expect(small(m.symmetry_defect()), || format!("{tag}: symmetric ∇ω identity"));
    let sum = |f: &[Form; 3]| f.iter().cloned().sum::<Form>();
    o.expect(sum(&r.theta_a).approx_eq(&(3.0 * &r.theta), TOL * (1.0 + r.scale)), || format!("{tag}: 3θ = Σθ_A"));
    o.expect(sum(&r.psi_k_a).is_zero(TOL * (1.0 + r.scale)), || format!("{tag}: ΣψK_A = 0"));
    o.expect(sum(&r.psi3_a).is_zero(TOL * (1.0 + r.scale)), || format!("{tag}: Σψ3_A = 0"));
}

fn identities() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for (tag, m) in example_models() {
        let d2 = d_squared_defect(m.algebra());
        o.expect(d2 <= TOL, || format!("{tag}: d² = {d2:.2e}"));
        identity_suite(&mut o, &tag, &m);
        // The same algebra with a random adapted triple.
        if m.dim() <= 12 {
            let r = random_orthogonal(m.dim(), &mut rng);
            let t = m.triple().conjugate(&r).expect("conjugated triple");
            let moved = AqhModel::new(m.algebra().clone(), t).expect("model");
            identity_suite(&mut o, &format!("{tag} with a random triple"), &moved);
        }
    }
    o
}

fn qkt_hkt() -> Outcome {
    let mut o = Outcome::new();
    for (tag, _, m) in models("s3xt4m1") {
        let r = TorsionReport::from_model(&m, TOL);
        o.expect(hkt_check(&m, TOL).is_hkt, || format!("{tag}: HKT"));
        for c in hkt_identities(&m, &r, TOL) {
            o.check(&tag, &c);
        }
        let q = qkt_check(&m, &r, TOL);
        o.expect(q.is_qkt, || format!("{tag}: QKT"));
        for c in q.checks.iter().chain(&q.literal_checks) {
            o.check(&tag, c);
        }
    }
    for (tag, _, m) in models("s3xt9") {
        let r = TorsionReport::from_model(&m, TOL);
        o.expect(!qkt_check(&m, &r, TOL).is_qkt, || format!("{tag}: not QKT"));
        let s = skew_connection_check(&m, &recipe_torsion(&r), TOL).expect("three-form");
        o.expect(s.passed, || format!("{tag}: skew connection from the recipe torsion ({:.2e})", s.residual));
    }
    o
}

fn transforms() -> Outcome {
    let mut o = Outcome::new();
    let g = corpus::golden();
    for e in &g.conformal {
        for c in corpus::conformal_checks(e, TOL).expect("conformal entry evaluates") {
            o.golden(&c);
        }
    }
    for e in &g.twists {
        for c in corpus::twist_checks(e, TOL).expect("twist entry evaluates") {
            o.golden(&c);
        }
    }
    // Random closed dσ: every flag except EH is unchanged.
    let pool: Vec<(String, AqhModel, Vec<Form>)> = example_models()
        .into_iter()
        .map(|(t, m)| {
            let closed = closed_one_forms(m.algebra());
            (t, m, closed)
        })
        .filter(|(_, _, c)| !c.is_empty())
        .collect();
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for i in 0..100 {
        let (tag, m, closed) = &pool[i % pool.len()];
        let ds: Form = closed.iter().map(|f| f.scale(rng.gen_range(-2.0..2.0))).sum();
        let before = TorsionReport::from_model(m, TOL);
        let after = conformal_recompute(m, &ds, TOL).expect("closed dσ");
        let (mut f0, mut f1) = (before.flags, after.flags);
        f0.xeh = false;
        f1.xeh = false;
        o.expect(f0 == f1, || format!("{tag}, pair {i}: flags {:?} became {:?}", before.flags.keys(), after.flags.keys()));
        let shifted = conformal_shift(m, &before, &ds).expect("closed dσ");
        let diff = Quat::ALL
            .iter()
            .map(|&a| after.beta[a.index()].max_diff(&shifted.beta[a.index()]))
            .fold(0.0, f64::max);
        o.expect(!qtorsion::is_nonzero(diff, after.scale, TOL), || format!("{tag}, pair {i}: shift law off by {diff:.2e}"));
    }
    o
}

fn robustness() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for (tag, m) in example_models() {
        o.expect(tolerance_stable(&m, TOL), || format!("{tag}: flags change under tolerance ×10 or ÷10"));
        let r = random_orthogonal(m.dim(), &mut rng);
        let moved = change_basis(&m, &r).expect("orthogonal relabelling");
        let (a, b) = (TorsionReport::from_model(&m, TOL), TorsionReport::from_model(&moved, TOL));
        o.expect(a.label() == b.label(), || format!("{tag}: class {} became {}", a.label(), b.label()));
        let gh = |m: &AqhModel| classify_gh_all(m, TOL).map(|g| g.label);
        o.expect(gh(&m) == gh(&moved), || format!("{tag}: Gray–Hervella types changed"));
        o.expect(hkt_check(&m, TOL).is_hkt == hkt_check(&moved, TOL).is_hkt, || format!("{tag}: HKT changed"));
        o.expect(qkt_check(&m, &a, TOL).is_qkt == qkt_check(&moved, &b, TOL).is_qkt, || format!("{tag}: QKT changed"));
    }
    o
}

fn main() {
    let start = Instant::now();
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("golden classifications", golden_classifications),
        ("golden one-forms", golden_forms),
        ("Gray–Hervella labels", gray_hervella),
        ("identity suites", identities),
        ("QKT/HKT suites", qkt_hkt),
        ("transform suites", transforms),
        ("robustness", robustness),
    ];
    let outcomes: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    (f(), t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut all = true;
    for (i, ((title, _), (o, secs))) in criteria.iter().zip(&outcomes).enumerate() {
        let ok = o.failures.is_empty();
        all &= ok;
        println!(
            "{} criterion {}: {title} ({} checks, {} failed, {secs:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            o.checks,
            o.failures.len()
        );
        for f in &o.failures {
            println!("       {f}");
        }
    }
    let total = start.elapsed().as_secs_f64();
    let fast = total < 60.0;
    println!("{} total time {total:.1}s (limit 60s)", if fast { "PASS" } else { "FAIL" });
    if !(all && fast) {
        std::process::exit(1);
    }
}
