//! Class labels: the almost quaternion-Hermitian type, the Gray–Hervella
//! type of each almost Hermitian structure, and the HKT/QKT predicates.

use serde::Serialize;

use crate::multilinear::{cal_l, cal_l_sum, Form, Tensor};
use crate::structure::{AqhModel, Quat};
use crate::torsion::{xi_from_differentials, TorsionReport};
use crate::is_nonzero;

/// A named numerical identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, scale: f64, tol: f64) -> Self {
        Check { name: name.into(), residual, passed: !is_nonzero(residual, scale, tol) }
    }
}

fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// The almost quaternion-Hermitian type of a torsion report.
pub fn classify_aqh(report: &TorsionReport) -> String {
    report.label()
}

/// Nonzero Gray–Hervella components of one almost Hermitian structure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GhFlags {
    pub w1: bool,
    pub w2: bool,
    pub w3: bool,
    pub w4: bool,
}

impl GhFlags {
    pub fn as_array(&self) -> [bool; 4] {
        [self.w1, self.w2, self.w3, self.w4]
    }

    pub fn from_array(f: [bool; 4]) -> Self {
        GhFlags { w1: f[0], w2: f[1], w3: f[2], w4: f[3] }
    }

    /// `Kähler`, `W_3`, `W_{2+3}`, …
    pub fn label(&self) -> String {
        let parts: Vec<String> =
            self.as_array().iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| (i + 1).to_string()).collect();
        match parts.len() {
            0 => "Kähler".into(),
            1 => format!("W_{}", parts[0]),
            _ => format!("W_{{{}}}", parts.join("+")),
        }
    }

    /// Parses the output of [`GhFlags::label`].
    pub fn parse_label(s: &str) -> Option<Self> {
        if s == "Kähler" {
            return Some(GhFlags::default());
        }
        let body = s.strip_prefix("W_")?;
        let body = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')).unwrap_or(body);
        let mut f = [false; 4];
        for p in body.split('+') {
            let k: usize = p.trim().parse().ok()?;
            if !(1..=4).contains(&k) {
                return None;
            }
            f[k - 1] = true;
        }
        Some(Self::from_array(f))
    }
}

/// Gray–Hervella data of the structure `A`.
#[derive(Clone, Debug)]
pub struct GhReport {
    pub structure: Quat,
    pub flags: GhFlags,
    pub label: String,
    /// `A d*ω_A`.
    pub lee_form: Form,
    /// `𝒩_A(X, Y, Z) = N_A(X, Y, Z) + N_A(Y, Z, X) + N_A(Z, X, Y)`.
    pub nij_alt: Form,
    /// Sizes of `𝒩`, `N − 𝒩/3`, the `W_3` remainder and `d*ω`, in flag order.
    pub norms: [f64; 4],
    pub scale: f64,
    /// The table condition of the assigned class holds.
    pub condition_holds: bool,
    /// No proper subclass condition holds.
    pub minimal: bool,
}

impl GhReport {
    pub fn strict(&self) -> bool {
        self.condition_holds && self.minimal
    }
}

/// Tensors entering the table conditions for one structure.
struct GhData {
    dw: Tensor,
    nij: Tensor,
    nij_alt: Tensor,
    codiff: Form,
    i_nij: Tensor,
    i_nij_alt: Tensor,
    lee_wedge: Tensor,
    scale: f64,
}

impl GhData {
    fn new(model: &AqhModel, a: Quat) -> Self {
        Self::from_parts(model, a, model.dw(a).clone(), model.codifferential_omega(a))
    }

    /// The Nijenhuis tensor is taken from `model`; `dω_A` and `d*ω_A` may
    /// belong to a conformally related metric (at a point where `σ = 0`).
    fn from_parts(model: &AqhModel, a: Quat, dw: Form, codiff: Form) -> Self {
        let ma = model.endo(a);
        let nc = 2.0 * model.n() as f64;
        let nij = model.nijenhuis_oracle(a);
        let nij_alt = nij.cyclic_sum();
        let lee = codiff.act(ma);
        let lee_wedge = lee.wedge(model.kaehler_form(a)).to_tensor().scale(1.0 / (nc - 1.0));
        let dw = dw.to_tensor();
        let scale = dw.max_norm().max(nij.max_norm()).max(codiff.max_norm());
        GhData {
            i_nij: nij.act_total(ma),
            i_nij_alt: nij_alt.act_total(ma),
            dw,
            nij,
            nij_alt,
            codiff,
            lee_wedge,
            scale,
        }
    }

    /// Residuals of the table condition for the class with components
    /// `class` (`W_1..W_4`); each entry must vanish for the condition to hold.
    fn condition(&self, class: [bool; 4]) -> Vec<f64> {
        let dw = &self.dw;
        let n0 = self.nij.max_norm();
        let alt3 = (&self.nij_alt - &self.nij.scale(3.0)).max_norm();
        let nalt = self.nij_alt.max_norm();
        let cod = self.codiff.max_norm();
        let quarter = self.i_nij_alt.scale(0.25);
        let three_q = self.i_nij.scale(0.75);
        let lw = &self.lee_wedge;
        match class {
            [false, false, false, false] => vec![n0, dw.max_norm()],
            [true, false, false, false] => vec![(dw + &three_q).max_norm()],
            [false, true, false, false] => vec![dw.max_norm()],
            [false, false, true, false] => vec![n0, cod],
            [false, false, false, true] => vec![n0, (dw + lw).max_norm()],
            [true, true, false, false] => vec![(dw + &quarter).max_norm()],
            [true, false, true, false] => vec![alt3, cod],
            [true, false, false, true] => vec![(&(dw + &three_q) + lw).max_norm()],
            [false, true, true, false] => vec![nalt, cod],
            [false, true, false, true] => vec![(dw + lw).max_norm()],
            [false, false, true, true] => vec![n0],
            [true, true, true, false] => vec![cod],
            [true, true, false, true] => vec![(&(dw + &quarter) + lw).max_norm()],
            [true, false, true, true] => vec![alt3],
            [false, true, true, true] => vec![nalt],
            [true, true, true, true] => vec![],
        }
    }

    fn holds(&self, class: [bool; 4], tol: f64) -> bool {
        self.condition(class).into_iter().all(|r| !is_nonzero(r, self.scale, tol))
    }
}

fn proper_subsets(f: [bool; 4]) -> Vec<[bool; 4]> {
    (0u8..16)
        .map(|m| [m & 1 != 0, m & 2 != 0, m & 4 != 0, m & 8 != 0])
        .filter(|s| s != &f && (0..4).all(|i| !s[i] || f[i]))
        .collect()
}

/// Gray–Hervella type of `(g, A)`.
pub fn classify_gh(model: &AqhModel, a: Quat, tol: f64) -> GhReport {
    gh_report(model, a, GhData::new(model, a), tol)
}

/// Gray–Hervella type of `(e^{2σ} g, A)` at a point where `σ = 0`, using
/// `dω° = dω + 2dσ∧ω` and `A d*ω° = −Λ_A dω°`.
pub fn classify_gh_conformal(model: &AqhModel, a: Quat, dsigma: &Form, tol: f64) -> GhReport {
    let w = model.kaehler_form(a);
    let dw = model.dw(a) + &(2.0 * &dsigma.wedge(w));
    let lee = -dw.lambda(w).expect("three-form");
    // A acts as −1 squared on one-forms.
    let codiff = -lee.act(model.endo(a));
    gh_report(model, a, GhData::from_parts(model, a, dw, codiff), tol)
}

fn gh_report(model: &AqhModel, a: Quat, d: GhData, tol: f64) -> GhReport {
    let ma = model.endo(a);
    let w3 = &(&d.dw + &d.i_nij_alt.scale(0.25)) + &d.lee_wedge;
    let second = &d.nij - &d.nij_alt.scale(1.0 / 3.0);
    let norms = [d.nij_alt.max_norm(), second.max_norm(), w3.max_norm(), d.codiff.max_norm()];
    let flags = GhFlags::from_array(norms.map(|v| is_nonzero(v, d.scale, tol)));
    let f = flags.as_array();
    GhReport {
        structure: a,
        flags,
        label: flags.label(),
        lee_form: d.codiff.act(ma),
        nij_alt: d.nij_alt.increasing_part(),
        norms,
        scale: d.scale,
        condition_holds: d.holds(f, tol),
        minimal: proper_subsets(f).into_iter().all(|s| !d.holds(s, tol)),
    }
}

/// Gray–Hervella reports for `I, J, K`.
pub fn classify_gh_all(model: &AqhModel, tol: f64) -> [GhReport; 3] {
    Quat::ALL.map(|a| classify_gh(model, a, tol))
}

/// HKT test: `I dω_I = J dω_J = K dω_K`.
#[derive(Clone, Debug)]
pub struct HktReport {
    pub is_hkt: bool,
    /// Largest pairwise difference of the `A dω_A`.
    pub defect: f64,
    /// `J dω_J = K dω_K` together with `N_J = 0`.
    pub alternative: bool,
    /// The common torsion form when HKT.
    pub torsion: Option<Form>,
}

pub fn hkt_check(model: &AqhModel, tol: f64) -> HktReport {
    let ad: Vec<Form> = Quat::ALL.iter().map(|&a| model.dw(a).act(model.endo(a))).collect();
    let scale = ad.iter().map(Form::max_norm).fold(0.0, f64::max);
    let defect = ad[0].max_diff(&ad[1]).max(ad[1].max_diff(&ad[2])).max(ad[0].max_diff(&ad[2]));
    let is_hkt = !is_nonzero(defect, scale, tol);
    let nj = model.nijenhuis_oracle(Quat::J).max_norm();
    let alternative = !is_nonzero(ad[1].max_diff(&ad[2]), scale, tol) && !is_nonzero(nj, scale, tol);
    HktReport { is_hkt, defect, alternative, torsion: is_hkt.then(|| ad[0].clone()) }
}

/// Identities of an HKT structure in terms of `t = −Λ_I dω_I`.
pub fn hkt_identities(model: &AqhModel, report: &TorsionReport, tol: f64) -> Vec<Check> {
    let n = model.n() as f64;
    let (mj, mk) = (model.endo(Quat::J), model.endo(Quat::K));
    let (wi, wj, wk) = (model.kaehler_form(Quat::I), model.kaehler_form(Quat::J), model.kaehler_form(Quat::K));
    let dwi = model.dw(Quat::I);
    let t = -dwi.lambda(wi).unwrap();
    let scale = report.scale;
    let mut out = vec![
        Check::new("t = K Λ_J dω_I", t.max_diff(&dwi.lambda(wj).unwrap().act(mk)), scale, tol),
        Check::new("t = −J Λ_K dω_I", t.max_diff(&-dwi.lambda(wk).unwrap().act(mj)), scale, tol),
    ];
    for a in Quat::ALL {
        let i = a.index();
        let d = report.decomposition(a);
        out.push(Check::new(
            format!("{}λ_{} = t/2n", a.name(), a.name()),
            report.a_lambda[i].max_diff(&t.scale(1.0 / (2.0 * n))),
            scale,
            tol,
        ));
        out.push(Check::new(format!("θ_{} = θ", a.name()), report.theta_a[i].max_diff(&report.theta), scale, tol));
        out.push(Check::new(format!("ν4 of {} = 2t", a.name()), d.nu4.max_diff(&(2.0 * &t)), scale, tol));
        out.push(Check::new(
            format!("ν3 of {} = 4t/(2n+1)", a.name()),
            d.nu3.max_diff(&t.scale(4.0 / (2.0 * n + 1.0))),
            scale,
            tol,
        ));
    }
    out
}

/// QKT data: torsion forms and the identities they satisfy.
#[derive(Clone, Debug)]
pub struct QktReport {
    pub is_qkt: bool,
    pub is_hkt: bool,
    /// Torsion components that prevent the QKT property.
    pub violations: Vec<&'static str>,
    /// `γ_A`.
    pub gamma: [Form; 3],
    /// The torsion three-form.
    pub torsion: Form,
    /// The torsion one-form `t = A Λ_A T`.
    pub t: Form,
    pub checks: Vec<Check>,
    /// Printed constants that do not hold; reported, never gating.
    pub literal_checks: Vec<Check>,
    /// The seven equivalent QKT integrability conditions, per structure.
    pub integrability: [[bool; 7]; 3],
}

impl QktReport {
    pub fn all_checks_pass(&self) -> bool {
        all_passed(&self.checks)
    }

    /// Every structure has all seven integrability conditions equal.
    pub fn integrability_consistent(&self) -> bool {
        self.integrability.iter().all(|row| row.iter().all(|&b| b == row[0]))
    }
}

/// `−d*Ω/6 − Σ A(AΛ_A d*Ω) ∧ ω_A / 12(n−1)`.
fn torsion_closed_form(model: &AqhModel, cod_omega: &Form) -> Form {
    let n = model.n() as f64;
    let mut t = cod_omega.scale(-1.0 / 6.0);
    for a in Quat::ALL {
        let ma = model.endo(a);
        let th = cod_omega.lambda(model.kaehler_form(a)).unwrap().act(ma).act(ma);
        t = t - th.wedge(model.kaehler_form(a)).scale(1.0 / (12.0 * (n - 1.0)));
    }
    t
}

pub fn qkt_check(model: &AqhModel, report: &TorsionReport, tol: f64) -> QktReport {
    let n = model.n() as f64;
    let f = &report.flags;
    let mut violations = Vec::new();
    for (flag, name) in [(f.x33, "Λ³₀E S³H"), (f.xk3, "K S³H"), (f.xe3, "E S³H"), (f.x3h, "Λ³₀EH")] {
        if flag {
            violations.push(name);
        }
    }
    let is_qkt = violations.is_empty();
    let is_hkt = hkt_check(model, tol).is_hkt;
    let scale = report.scale.max(1.0);

    let e = |a: Quat| model.endo(a);
    let w = |a: Quat| model.kaehler_form(a);
    let dw = |a: Quat| model.dw(a);
    let lam = |a: Quat, psi: &Form| psi.lambda(w(a)).unwrap();

    let mut checks = Vec::new();
    let mut literal = Vec::new();
    let mut gamma_first = Vec::new();
    for a in Quat::ALL {
        let (b, c) = a.others();
        let g1 = (lam(b, dw(b)) + lam(c, dw(b)).act(e(a))).scale(1.0 / (2.0 * (n - 1.0)));
        let g2 = (lam(c, dw(c)) - lam(b, dw(c)).act(e(a))).scale(1.0 / (2.0 * (n - 1.0)));
        checks.push(Check::new(format!("γ_{} two expressions", a.name()), g1.max_diff(&g2), scale, tol));
        gamma_first.push(-g1.act(e(a)));
    }
    let gamma: [Form; 3] = [gamma_first[0].clone(), gamma_first[1].clone(), gamma_first[2].clone()];
    let g = |a: Quat| &gamma[a.index()];

    let t_id = Quat::ALL.map(|a| {
        let (b, c) = a.others();
        dw(a).act(e(a)) + g(c).act(e(c)).act(e(b)).wedge(w(b)) + g(b).act(e(b)).act(e(c)).wedge(w(c))
    });
    let t_beta = Quat::ALL.map(|a| {
        let (b, c) = a.others();
        let ag = g(a).act(e(a));
        let plus = g(b).act(e(b)) + g(c).act(e(c));
        (&report.beta[a.index()] + &ag.act(e(b)).wedge(w(b)) + ag.act(e(c)).wedge(w(c)) + plus.act(e(a)).wedge(w(a)))
            .scale(0.5)
    });
    let torsion = t_id[0].clone();
    let omega4 = model.fundamental_form();
    let cod_omega = model.algebra().codifferential(&omega4);
    let cod_formula: Form = Quat::ALL
        .iter()
        .map(|&a| model.codifferential_omega(a).wedge(w(a)) - dw(a).act(e(a)))
        .sum::<Form>()
        .scale(2.0);
    let t_closed = torsion_closed_form(model, &cod_omega);
    let t = lam(Quat::I, &torsion).act(e(Quat::I));

    if is_qkt {
        checks.push(Check::new("d*Ω = 2Σ(d*ω_A∧ω_A − A dω_A)", cod_omega.max_diff(&cod_formula), scale, tol));
        for a in Quat::ALL {
            let i = a.index();
            checks.push(Check::new(format!("T from {} dω_{}", a.name(), a.name()), t_id[i].max_diff(&torsion), scale, tol));
            checks.push(Check::new(format!("T from β_{}", a.name()), t_beta[i].max_diff(&torsion), scale, tol));
            checks.push(Check::new(
                format!("t = {}Λ_{} T", a.name(), a.name()),
                lam(a, &torsion).act(e(a)).max_diff(&t),
                scale,
                tol,
            ));
        }
        checks.push(Check::new("T closed form in d*Ω", t_closed.max_diff(&torsion), scale, tol));
        let lt = cal_l_sum(model.triple().as_array(), &torsion).unwrap();
        checks.push(Check::new("𝓛T = 3T", lt.max_diff(&(3.0 * &torsion)), scale, tol));
        literal.push(Check::new("𝓛T = −3T", lt.max_diff(&(-3.0 * &torsion)), scale, tol));
        let d_omega4 = model.algebra().d(&omega4);
        checks.push(Check::new(
            "dΩ = −2Σ AT∧ω_A",
            d_omega4.max_diff(
                &Quat::ALL.iter().map(|&a| torsion.act(e(a)).wedge(w(a))).sum::<Form>().scale(-2.0),
            ),
            scale,
            tol,
        ));

        // Torsion one-form chain.
        let chain = t.scale(-3.0 * (n - 1.0) / (4.0 * n));
        let xi = xi_from_differentials(model);
        let dim = model.dim();
        let trace = Form::from_vector(&nalgebra::DVector::from_fn(dim, |y, _| {
            (0..dim).map(|i| xi.get(&[i, y, i])).sum::<f64>()
        }));
        checks.push(Check::new("(ξ_{e_i} e_i)♭ = −3(n−1)/4n t", trace.max_diff(&chain), scale, tol));
        let hodge = d_omega4.hodge_star().wedge(&omega4).hodge_star();
        checks.push(Check::new("−(1/32n) ∗(∗dΩ∧Ω) = −3(n−1)/4n t", hodge.scale(-1.0 / (32.0 * n)).max_diff(&chain), scale, tol));
        literal.push(Check::new("(1/16n) ∗(∗dΩ∧Ω) = −3(n−1)/4n t", hodge.scale(1.0 / (16.0 * n)).max_diff(&chain), scale, tol));
        for a in Quat::ALL {
            let i = a.index();
            checks.push(Check::new(
                format!("−(3/2){}η_{} = −3(n−1)/4n t", a.name(), a.name()),
                report.a_eta[i].scale(-1.5).max_diff(&chain),
                scale,
                tol,
            ));
            let th = lam(a, &cod_omega).act(e(a));
            checks.push(Check::new(
                format!("−3/(16n) {}Λ_{} d*Ω = −3(n−1)/4n t", a.name(), a.name()),
                th.scale(-3.0 / (16.0 * n)).max_diff(&chain),
                scale,
                tol,
            ));
            literal.push(Check::new(
                format!("−3/(8n) {}Λ_{} d*Ω = −3(n−1)/4n t", a.name(), a.name()),
                th.scale(-3.0 / (8.0 * n)).max_diff(&chain),
                scale,
                tol,
            ));
        }

        // Relations between Lee forms, γ, λ and η.
        for a in Quat::ALL {
            let (b, c) = a.others();
            let (ia, ib, ic) = (a.index(), b.index(), c.index());
            let lee = |x: Quat| model.lee_form(x);
            let bg = g(b).act(e(b));
            let cg = g(c).act(e(c));
            let l = &report.a_lambda;
            checks.push(Check::new(
                format!("{} d*ω_{} = t + Bγ_B + Cγ_C", a.name(), a.name()),
                lee(a).max_diff(&(&(&t + &bg) + &cg)),
                scale,
                tol,
            ));
            checks.push(Check::new(
                format!("{} d*ω_{} = Bλ_B + Cλ_C + 2Aη_A", a.name(), a.name()),
                lee(a).max_diff(&(&(&l[ib] + &l[ic]) + &(2.0 * &report.a_eta[ia]))),
                scale,
                tol,
            ));
            let gd = &bg - &cg;
            checks.push(Check::new(format!("Bγ_B − Cγ_C = Bλ_B − Cλ_C ({})", a.name()), gd.max_diff(&(&l[ib] - &l[ic])), scale, tol));
            checks.push(Check::new(
                format!("Bλ_B − Cλ_C = −(B d*ω_B − C d*ω_C) ({})", a.name()),
                (&l[ib] - &l[ic]).max_diff(&-(lee(b) - lee(c))),
                scale,
                tol,
            ));
            let rhs1 = (lam(b, dw(b)) - lam(c, dw(c))).scale(-2.0 * (n - 1.0));
            let lhs1 = lam(c, dw(a)).act(e(b)) + lam(b, dw(a)).act(e(c));
            checks.push(Check::new(
                format!("BΛ_C dω_A + CΛ_B dω_A = −2(n−1)(Λ_B dω_B − Λ_C dω_C) ({})", a.name()),
                lhs1.max_diff(&rhs1),
                scale,
                tol,
            ));
            let lhs1_lit = lam(c, dw(a)).act(e(b)) + lam(a, dw(a)).act(e(c));
            literal.push(Check::new(
                format!("BΛ_C dω_A + CΛ_A dω_A = −2(n−1)(Λ_B dω_B − Λ_C dω_C) ({})", a.name()),
                lhs1_lit.max_diff(&rhs1),
                scale,
                tol,
            ));
            let lhs2 = lam(a, dw(c)).act(e(b)) + lam(a, dw(b)).act(e(c));
            let rhs2 = (lam(b, dw(b)) - lam(c, dw(c))).scale(2.0 * n - 1.0);
            checks.push(Check::new(
                format!("BΛ_A dω_C + CΛ_A dω_B = (2n−1)(Λ_B dω_B − Λ_C dω_C) ({})", a.name()),
                lhs2.max_diff(&rhs2),
                scale,
                tol,
            ));
            checks.push(Check::new(
                format!("λ_{} − γ_{} = −At/2n", a.name(), a.name()),
                (&report.lambda[ia] - g(a)).max_diff(&t.act(e(a)).scale(-1.0 / (2.0 * n))),
                scale,
                tol,
            ));
            // Consequences for the torsion components.
            let d = report.decomposition(a);
            checks.push(Check::new(format!("β3_{} = 0", a.name()), d.beta3.max_norm(), scale, tol));
            checks.push(Check::new(
                format!("βK_{} = βK_I", a.name()),
                d.beta_k.max_diff(&report.decomposition(Quat::I).beta_k),
                scale,
                tol,
            ));
            let ag = g(a).act(e(a));
            checks.push(Check::new(
                format!("ν3 of {} = 2Aγ_A + 4t/(2n+1)", a.name()),
                d.nu3.max_diff(&(&(2.0 * &ag) + &t.scale(4.0 / (2.0 * n + 1.0)))),
                scale,
                tol,
            ));
            checks.push(Check::new(
                format!("ν4 of {} = 2Aγ_A + (2n−1)(Bγ_B + Cγ_C) + 2t", a.name()),
                d.nu4.max_diff(&(&(&(2.0 * &ag) + &((2.0 * n - 1.0) * &(&bg + &cg))) + &(2.0 * &t))),
                scale,
                tol,
            ));
        }
    }

    let integrability = Quat::ALL.map(|a| {
        let (b, c) = a.others();
        let zero = |f: &Form| !is_nonzero(f.max_norm(), scale, tol);
        let bl = &report.a_lambda[b.index()];
        let cl = &report.a_lambda[c.index()];
        [
            !is_nonzero(model.nijenhuis_oracle(a).max_norm(), scale, tol),
            zero(&(model.lee_form(b) - model.lee_form(c))),
            zero(&(bl - cl)),
            zero(&(g(b).act(e(b)) - g(c).act(e(c)))),
            zero(&(lam(c, dw(b)) + lam(b, dw(c)))),
            zero(&(lam(c, dw(a)).act(e(b)) + lam(b, dw(a)).act(e(c)))),
            zero(&(lam(a, dw(c)).act(e(b)) + lam(a, dw(b)).act(e(c)))),
        ]
    });

    QktReport {
        is_qkt,
        is_hkt,
        violations,
        gamma,
        torsion,
        t,
        checks,
        literal_checks: literal,
        integrability,
    }
}

/// Identity `−AΛ_C dω_B = (n−1) A d*ω_A − n B d*ω_B − (n−1) C d*ω_C` for the
/// three cyclic choices.
pub fn kh_type_check(model: &AqhModel, tol: f64) -> (bool, Vec<Check>) {
    let n = model.n() as f64;
    let scale = model.dws().iter().map(Form::max_norm).fold(0.0, f64::max);
    let checks: Vec<Check> = Quat::ALL
        .iter()
        .map(|&a| {
            let (b, c) = a.others();
            let lhs = -model.dw(b).lambda(model.kaehler_form(c)).unwrap().act(model.endo(a));
            let rhs = (n - 1.0) * &model.lee_form(a) - n * &model.lee_form(b) - (n - 1.0) * &model.lee_form(c);
            Check::new(format!("KH relation ({})", a.name()), lhs.max_diff(&rhs), scale, tol)
        })
        .collect();
    (all_passed(&checks), checks)
}

/// `𝓛_A β_A = β_A` and `IΛ_K dω_J + IΛ_J dω_K = −Λ_J dω_J + Λ_K dω_K` with
/// its cyclic versions.
pub fn universal_identities(model: &AqhModel, report: &TorsionReport, tol: f64) -> Vec<Check> {
    let scale = report.scale;
    let mut out = Vec::new();
    for a in Quat::ALL {
        let (b, c) = a.others();
        let ma = model.endo(a);
        let beta = &report.beta[a.index()];
        out.push(Check::new(
            format!("𝓛_{} β_{} = β_{}", a.name(), a.name(), a.name()),
            cal_l(ma, beta).unwrap().max_diff(beta),
            scale,
            tol,
        ));
        let w = |x: Quat| model.kaehler_form(x);
        let lhs = model.dw(b).lambda(w(c)).unwrap().act(ma) + model.dw(c).lambda(w(b)).unwrap().act(ma);
        let rhs = model.dw(c).lambda(w(c)).unwrap() - model.dw(b).lambda(w(b)).unwrap();
        out.push(Check::new(format!("A Λ_C dω_B + A Λ_B dω_C relation ({})", a.name()), lhs.max_diff(&rhs), scale, tol));
        let bl = beta.lambda(w(b)).unwrap().act(model.endo(b));
        let cl = beta.lambda(w(c)).unwrap().act(model.endo(c));
        out.push(Check::new(format!("BΛ_Bβ_A = CΛ_Cβ_A ({})", a.name()), bl.max_diff(&cl), scale, tol));
        // 2dω_A = A(β_A − β_B − β_C)
        let rec = (beta - &report.beta[b.index()] - &report.beta[c.index()]).act(ma);
        out.push(Check::new(format!("2dω_{} from β", a.name()), rec.max_diff(&(2.0 * model.dw(a))), scale, tol));
    }
    out
}
