//! Conformal changes of the metric, the algebraic twist along a symmetry,
//! and the test for a compatible connection with skew-symmetric torsion.

use nalgebra::{DMatrix, DVector};

use crate::classify::Check;
use crate::liealg::LieAlgebraModel;
use crate::multilinear::{Form, Tensor};
use crate::structure::{AqhModel, HypercomplexTriple, Quat};
use crate::torsion::TorsionReport;
use crate::{is_nonzero, Error, Result};

fn require_closed(algebra: &LieAlgebraModel, f: &Form) -> Result<()> {
    let d = algebra.d(f).max_norm();
    if is_nonzero(d, f.max_norm(), 1e-12) {
        return Err(Error::NotClosed(d));
    }
    Ok(())
}

/// Basis of the closed invariant one-forms (the annihilator of `[g, g]`).
pub fn closed_one_forms(algebra: &LieAlgebraModel) -> Vec<Form> {
    let dim = algebra.dim();
    // Rows: pairs i < j; entry (pair, k) = coefficient of e^i∧e^j in de^k.
    let pairs = crate::multilinear::increasing_indices(dim, 2);
    let m = DMatrix::from_fn(pairs.len().max(1), dim, |r, k| {
        pairs.get(r).map(|p| algebra.d_basis(k).get(p)).unwrap_or(0.0)
    });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut out = Vec::new();
    for r in 0..vt.nrows() {
        let s = if r < sv.len() { sv[r] } else { 0.0 };
        if s <= 1e-10 * (1.0 + smax) {
            out.push(Form::from_vector(&vt.row(r).transpose()));
        }
    }
    // Rows of V^T beyond the rank are not returned when dim > rows.
    if vt.nrows() < dim {
        let q = vt.transpose();
        let proj = DMatrix::identity(dim, dim) - &q * q.transpose();
        let extra = proj.svd(true, false);
        let u = extra.u.expect("requested");
        for (c, &s) in extra.singular_values.iter().enumerate() {
            if s > 0.5 {
                out.push(Form::from_vector(&u.column(c).into_owned()));
            }
        }
    }
    out
}

/// `dω°_A = dω_A + 2 dσ ∧ ω_A` for the metric `e^{2σ} g` at a point where
/// `σ = 0`.
pub fn conformal_differentials(model: &AqhModel, dsigma: &Form) -> Result<[Form; 3]> {
    check_one_form(model, dsigma)?;
    require_closed(model.algebra(), dsigma)?;
    Ok(Quat::ALL.map(|a| model.dw(a) + &(2.0 * &dsigma.wedge(model.kaehler_form(a)))))
}

fn check_one_form(model: &AqhModel, f: &Form) -> Result<()> {
    if f.degree() != 1 {
        return Err(Error::DegreeMismatch(f.degree(), 1));
    }
    if f.dim() != model.dim() {
        return Err(Error::DimensionMismatch(f.dim(), model.dim()));
    }
    Ok(())
}

/// Torsion of the conformally changed structure, recomputed from scratch.
pub fn conformal_recompute(model: &AqhModel, dsigma: &Form, tol: f64) -> Result<TorsionReport> {
    let dw = conformal_differentials(model, dsigma)?;
    TorsionReport::from_differentials(model.triple(), model.n(), &dw, tol)
}

/// Torsion of the conformally changed structure from the transformation
/// law `Aλ_A ↦ Aλ_A − dσ/n` and `β_A ↦ β_A + 2(B dσ∧ω_B + C dσ∧ω_C)`.
pub fn conformal_shift(model: &AqhModel, report: &TorsionReport, dsigma: &Form) -> Result<TorsionReport> {
    check_one_form(model, dsigma)?;
    require_closed(model.algebra(), dsigma)?;
    let n = model.n() as f64;
    let beta = Quat::ALL.map(|a| {
        let (b, c) = a.others();
        let extra = dsigma.act(model.endo(b)).wedge(model.kaehler_form(b))
            + dsigma.act(model.endo(c)).wedge(model.kaehler_form(c));
        &report.beta[a.index()] + &(2.0 * &extra)
    });
    let a_lambda = report.a_lambda.clone().map(|l| &l - &dsigma.scale(1.0 / n));
    Ok(TorsionReport::assemble(model.triple(), model.n(), beta, a_lambda, report.tol))
}

/// The remaining entries of the conformal transformation table, checked
/// against a transformed report.
pub fn conformal_table_checks(
    model: &AqhModel,
    before: &TorsionReport,
    after: &TorsionReport,
    dsigma: &Form,
    tol: f64,
) -> Vec<Check> {
    let n = model.n() as f64;
    let scale = before.scale.max(after.scale);
    let mut out = Vec::new();
    let s4 = dsigma.scale(4.0);
    let q = dsigma.scale(0.25);
    for a in Quat::ALL {
        let i = a.index();
        let (d0, d1) = (before.decomposition(a), after.decomposition(a));
        let name = a.name();
        out.push(Check::new(format!("{name}λ° = {name}λ − dσ/n"), after.a_lambda[i].max_diff(&(&before.a_lambda[i] - &dsigma.scale(1.0 / n))), scale, tol));
        out.push(Check::new(format!("ν3° of {name} = ν3 − 4dσ"), d1.nu3.max_diff(&(&d0.nu3 - &s4)), scale, tol));
        out.push(Check::new(format!("ν4° of {name} = ν4 − 4dσ"), d1.nu4.max_diff(&(&d0.nu4 - &s4)), scale, tol));
        out.push(Check::new(format!("θ°_{name} = θ_{name} − dσ/4"), after.theta_a[i].max_diff(&(&before.theta_a[i] - &q)), scale, tol));
        out.push(Check::new(format!("ψ3°_{name} = ψ3_{name}"), after.psi3_a[i].max_diff(&before.psi3_a[i]), scale, tol));
        out.push(Check::new(format!("ψK°_{name} = ψK_{name}"), after.psi_k_a[i].max_diff(&before.psi_k_a[i]), scale, tol));
    }
    out.push(Check::new("θ° = θ − dσ/4", after.theta.max_diff(&(&before.theta - &q)), scale, tol));
    out.push(Check::new("ψ3° = ψ3", after.psi3.max_diff(&before.psi3), scale, tol));
    out.push(Check::new("ψK° = ψK", after.psi_k.max_diff(&before.psi_k), scale, tol));
    out
}

/// `A d*ω°_A`, computed as `−Λ_A dω°_A`.
pub fn conformal_lee_forms(model: &AqhModel, dsigma: &Form) -> Result<[Form; 3]> {
    let dw = conformal_differentials(model, dsigma)?;
    Ok(Quat::ALL.map(|a| -dw[a.index()].lambda(model.kaehler_form(a)).unwrap()))
}

/// Two-form `F`, direction `X` and constant `a` of an algebraic twist,
/// together with the splitting
/// `F = Σ μ_A ω_A + Σ A_{(1)}κ_A + α`.
#[derive(Clone, Debug)]
pub struct TwistData {
    pub f: Form,
    pub x: DVector<f64>,
    pub a: f64,
    pub mu: [f64; 3],
    pub alpha: Form,
    /// `A_{(1)}κ_A` as two-forms.
    pub a_kappa: [Form; 3],
    /// `κ_A` as symmetric matrices.
    pub kappa: [DMatrix<f64>; 3],
}

/// Splits a two-form into its `S²H`, `Λ²₀E S²H` and `S²E` parts.
pub fn decompose_curvature(
    model: &AqhModel,
    f: &Form,
) -> Result<([f64; 3], Form, [Form; 3], [DMatrix<f64>; 3])> {
    if f.degree() != 2 {
        return Err(Error::DegreeMismatch(f.degree(), 2));
    }
    if f.dim() != model.dim() {
        return Err(Error::DimensionMismatch(f.dim(), model.dim()));
    }
    require_closed(model.algebra(), f)?;
    let triple = model.triple();
    let dim = triple.dim();
    let w = Quat::ALL.map(|a| crate::structure::kaehler_form_of(triple.get(a)));
    let mu = Quat::ALL.map(|a| {
        let wa = &w[a.index()];
        f.inner(wa).unwrap() / wa.inner(wa).unwrap()
    });
    let images = Quat::ALL.map(|a| f.act(triple.get(a)));
    let alpha = (f + &images[0] + &images[1] + &images[2]).scale(0.25);
    let a_kappa = Quat::ALL.map(|a| {
        let (b, c) = a.others();
        let p = &(f + &images[a.index()]) - &(&images[b.index()] + &images[c.index()]);
        p.scale(0.25) - w[a.index()].scale(mu[a.index()])
    });
    let kappa = Quat::ALL.map(|a| {
        let t = a_kappa[a.index()].to_tensor().act_slot(triple.get(a), 0).unwrap().scale(-1.0);
        DMatrix::from_fn(dim, dim, |i, j| t.get(&[i, j]))
    });
    Ok((mu, alpha, a_kappa, kappa))
}

impl TwistData {
    pub fn new(model: &AqhModel, f: Form, x: DVector<f64>, a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Twist("the constant a must be finite and nonzero".into()));
        }
        if x.len() != model.dim() {
            return Err(Error::DimensionMismatch(x.len(), model.dim()));
        }
        let (mu, alpha, a_kappa, kappa) = decompose_curvature(model, &f)?;
        let xf = f.contract(&x)?;
        if is_nonzero(xf.max_norm(), f.max_norm(), 1e-12) {
            return Err(Error::Twist(format!("X ⌟ F ≠ 0 (size {:e})", xf.max_norm())));
        }
        Ok(TwistData { f, x, a, mu, alpha, a_kappa, kappa })
    }

    /// `X` as a one-form.
    pub fn x_flat(&self) -> Form {
        Form::from_vector(&self.x)
    }

    /// `Σ μ_A ω_A + Σ A_{(1)}κ_A + α − F`.
    pub fn reconstruction_defect(&self, triple: &HypercomplexTriple) -> f64 {
        let mut r = &self.alpha - &self.f;
        for a in Quat::ALL {
            let w = crate::structure::kaehler_form_of(triple.get(a));
            r = r + w.scale(self.mu[a.index()]) + &self.a_kappa[a.index()];
        }
        r.max_norm()
    }

    /// `F ∈ S²E + S²H`, i.e. all `κ_A` vanish.
    pub fn kappa_vanishes(&self, tol: f64) -> bool {
        let s = self.f.max_norm();
        self.a_kappa.iter().all(|k| !is_nonzero(k.max_norm(), s, tol))
    }

    pub fn mu_vanishes(&self, tol: f64) -> bool {
        self.mu.iter().all(|m| !is_nonzero(m.abs(), self.f.max_norm(), tol))
    }
}

/// Twisted algebra with `d^W α = dα − (1/a) F ∧ (X ⌟ α)`.
pub fn twist_algebra(algebra: &LieAlgebraModel, data: &TwistData) -> Result<LieAlgebraModel> {
    let dim = algebra.dim();
    let mut c = algebra.structure_tensor().to_vec();
    for i in 0..dim {
        for j in 0..dim {
            let fij = data.f.get(&[i, j]);
            if fij == 0.0 {
                continue;
            }
            for k in 0..dim {
                c[(i * dim + j) * dim + k] += fij * data.x[k] / data.a;
            }
        }
    }
    LieAlgebraModel::from_tensor(algebra.names().to_vec(), c).map_err(|e| match e {
        Error::Jacobi(v) => Error::Twist(format!("twisted differential does not square to zero ({v:e})")),
        other => other,
    })
}

/// The twisted model, with the same triple.
pub fn twist(model: &AqhModel, data: &TwistData) -> Result<AqhModel> {
    let g = twist_algebra(model.algebra(), data)?;
    AqhModel::new(g, model.triple().clone())
}

/// Largest `|(d^W)² e^k|`.
pub fn d_squared_defect(algebra: &LieAlgebraModel) -> f64 {
    (0..algebra.dim()).map(|k| algebra.d(algebra.d_basis(k)).max_norm()).fold(0.0, f64::max)
}

fn interior(v: &DVector<f64>, m: &DMatrix<f64>) -> Form {
    Form::from_vector(&(m.transpose() * v))
}

fn skew_part(t: &Tensor) -> Form {
    let tt = t.permuted(&[1, 0]);
    (t - &tt).scale(0.5).increasing_part()
}

/// Closed-form predictions for the twisted torsion of the structure `A`.
#[derive(Clone, Debug)]
pub struct TwistPrediction {
    pub beta: Form,
    pub nu3: Form,
    pub nu4: Form,
    pub beta3: Form,
    pub beta_k: Form,
}

pub fn twist_prediction(model: &AqhModel, before: &TorsionReport, data: &TwistData, a: Quat) -> TwistPrediction {
    let n = model.n() as f64;
    let inv = 1.0 / data.a;
    let (b, c) = a.others();
    let (ma, mb, mc) = (model.endo(a), model.endo(b), model.endo(c));
    let (wa, wb, wc) = (model.kaehler_form(a), model.kaehler_form(b), model.kaehler_form(c));
    let x = &data.x;
    let xf = data.x_flat();
    let kap = &data.kappa[a.index()];
    let ktensor = Tensor::from_fn(model.dim(), 2, |ix| kap[(ix[0], ix[1])]);
    let slot1 = |e: &crate::multilinear::Endomorphism| skew_part(&ktensor.act_slot(e, 0).unwrap());
    let alpha = &data.alpha;
    let mv = |e: &crate::multilinear::Endomorphism| e.matrix() * x;
    let d = before.decomposition(a);

    let beta = &before.beta[a.index()] - &xf.wedge(&(data.f.act(mb) + data.f.act(mc))).scale(inv);
    let x_alpha = alpha.contract(x).unwrap();
    let ax_kappa = interior(&mv(ma), kap);
    let nu4 = &d.nu4
        + &(xf.act(ma).scale(data.mu[a.index()] * (2.0 * n - 1.0)) - &x_alpha - &ax_kappa).scale(2.0 * inv);
    let nu3 = &d.nu3
        + &(ax_kappa.scale(n) - x_alpha.scale(n - 1.0)).scale(4.0 * inv / ((2.0 * n + 1.0) * (n - 1.0)));

    let (ka, kb, kc) = (slot1(ma), slot1(mb), slot1(mc));
    let bx = xf.act(mb);
    let cx = xf.act(mc);
    let x_k = interior(x, kap);
    let cx_k = interior(&mv(mc), kap);
    let bx_k = interior(&mv(mb), kap);
    let beta3 = &d.beta3
        + &(2.0 * &xf.wedge(&ka) + bx.wedge(&kc) - cx.wedge(&kb)).scale(2.0 * inv / 3.0)
        + (2.0 * &x_k.wedge(wa) - cx_k.wedge(wb) + bx_k.wedge(wc)).scale(2.0 * inv / (3.0 * (n - 1.0)));
    let mut beta_k = &d.beta_k - &xf.wedge(alpha).scale(2.0 * inv);
    beta_k = beta_k + (xf.wedge(&ka) - bx.wedge(&kc) + cx.wedge(&kb)).scale(2.0 * inv / 3.0);
    beta_k = beta_k - (x_k.wedge(wa) + cx_k.wedge(wb) - bx_k.wedge(wc)).scale(2.0 * inv / (3.0 * (2.0 * n + 1.0)));
    let s: Form = Quat::ALL
        .iter()
        .map(|&q| interior(&mv(model.endo(q)), &alpha_matrix(alpha)).wedge(model.kaehler_form(q)))
        .sum();
    beta_k = beta_k - s.scale(2.0 * inv / (2.0 * n + 1.0));
    TwistPrediction { beta, nu3, nu4, beta3, beta_k }
}

fn alpha_matrix(alpha: &Form) -> DMatrix<f64> {
    let dim = alpha.dim();
    DMatrix::from_fn(dim, dim, |i, j| alpha.get(&[i, j]))
}

/// Compares the twisted torsion with the closed-form predictions.
pub fn twist_prediction_checks(
    model: &AqhModel,
    before: &TorsionReport,
    after: &TorsionReport,
    data: &TwistData,
    tol: f64,
) -> Vec<Check> {
    let scale = before.scale.max(after.scale);
    let mut out = Vec::new();
    for a in Quat::ALL {
        let p = twist_prediction(model, before, data, a);
        let d = after.decomposition(a);
        let name = a.name();
        out.push(Check::new(format!("β^W_{name}"), p.beta.max_diff(&after.beta[a.index()]), scale, tol));
        out.push(Check::new(format!("ν4^W of {name}"), p.nu4.max_diff(&d.nu4), scale, tol));
        out.push(Check::new(format!("ν3^W of {name}"), p.nu3.max_diff(&d.nu3), scale, tol));
        out.push(Check::new(format!("β3^W_{name}"), p.beta3.max_diff(&d.beta3), scale, tol));
        out.push(Check::new(format!("βK^W_{name}"), p.beta_k.max_diff(&d.beta_k), scale, tol));
    }
    out
}

/// Invariance statements for twists by `F ∈ S²E + S²H`.
#[derive(Clone, Debug)]
pub struct TwistInvariance {
    /// `F ∈ S²E + S²H`.
    pub applies: bool,
    /// `Σ μ_A A X♭ = 0` (with `X ⌟ F = 0`), so `EH` is unaffected.
    pub eh_applies: bool,
    /// `F ∈ S²E`, so `E S³H` is unaffected.
    pub e3_applies: bool,
    pub checks: Vec<Check>,
}

pub fn twist_invariance_check(
    model: &AqhModel,
    before: &TorsionReport,
    after: &TorsionReport,
    data: &TwistData,
    tol: f64,
) -> TwistInvariance {
    let scale = before.scale.max(after.scale).max(1.0);
    let applies = data.kappa_vanishes(tol);
    let xf = data.x_flat();
    let mu_x: Form = Quat::ALL.iter().map(|&a| xf.act(model.endo(a)).scale(data.mu[a.index()])).sum();
    let eh_applies = applies && !is_nonzero(mu_x.max_norm(), 1.0, tol);
    let e3_applies = applies && data.mu_vanishes(tol);
    let mut checks = Vec::new();
    if applies {
        checks.push(Check::new("ψ3 unchanged", after.psi3.max_diff(&before.psi3), scale, tol));
        for a in Quat::ALL {
            let i = a.index();
            checks.push(Check::new(format!("ψ3_{} unchanged", a.name()), after.psi3_a[i].max_diff(&before.psi3_a[i]), scale, tol));
            checks.push(Check::new(format!("ψK_{} unchanged", a.name()), after.psi_k_a[i].max_diff(&before.psi_k_a[i]), scale, tol));
        }
    }
    if eh_applies {
        checks.push(Check::new("θ unchanged", after.theta.max_diff(&before.theta), scale, tol));
    }
    if e3_applies {
        for a in Quat::ALL {
            let i = a.index();
            let d0 = &before.theta_a[i] - &before.theta;
            let d1 = &after.theta_a[i] - &after.theta;
            checks.push(Check::new(format!("θ_{} − θ unchanged", a.name()), d1.max_diff(&d0), scale, tol));
        }
    }
    TwistInvariance { applies, eh_applies, e3_applies, checks }
}

/// `(1/6) Σ_A (βK_A − β3_A)`, a candidate skew torsion for models that are
/// not QKT.
pub fn recipe_torsion(report: &TorsionReport) -> Form {
    report.decomposition.iter().map(|d| &d.beta_k - &d.beta3).sum::<Form>().scale(1.0 / 6.0)
}

/// Result of [`skew_connection_check`].
#[derive(Clone, Debug)]
pub struct SkewConnection {
    pub passed: bool,
    pub residual: f64,
    /// `γ_I(e_x), γ_J(e_x), γ_K(e_x)` per basis vector.
    pub gamma: Vec<[f64; 3]>,
}

/// With `⟨e_k, ∇_X e_j⟩ = ⟨e_k, ∇^LC_X e_j⟩ + ½T(X, e_j, e_k)`, does `∇`
/// preserve the span of `I, J, K`, i.e.
/// `∇I = γ_K J − γ_J K` and cyclically, for some one-forms `γ_A`?
pub fn skew_connection_check(model: &AqhModel, torsion: &Form, tol: f64) -> Result<SkewConnection> {
    if torsion.degree() != 3 || torsion.dim() != model.dim() {
        return Err(Error::DegreeMismatch(torsion.degree(), 3));
    }
    let dim = model.dim();
    let lc = model.levi_civita();
    let tt = torsion.to_tensor();
    let (i, j, k) = (model.endo(Quat::I).matrix(), model.endo(Quat::J).matrix(), model.endo(Quat::K).matrix());
    let zero = DMatrix::zeros(dim, dim);
    let block = dim * dim;
    // Columns for γ_I, γ_J, γ_K: their contributions to (∇̃I, ∇̃J, ∇̃K).
    let cols: [[&DMatrix<f64>; 3]; 3] = [[&zero, k, j], [k, &zero, i], [j, i, &zero]];
    let signs: [[f64; 3]; 3] = [[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]];
    let mut a = DMatrix::zeros(3 * block, 3);
    for u in 0..3 {
        for blk in 0..3 {
            let m = cols[u][blk];
            let s = signs[u][blk];
            for r in 0..dim {
                for c in 0..dim {
                    a[(blk * block + r * dim + c, u)] = s * m[(r, c)];
                }
            }
        }
    }
    let svd = a.clone().svd(true, true);
    let mut residual: f64 = 0.0;
    let mut gamma = Vec::with_capacity(dim);
    let mut scale: f64 = 0.0;
    for x in 0..dim {
        let conn = DMatrix::from_fn(dim, dim, |r, c| lc.get(&[x, c, r]) + 0.5 * tt.get(&[x, c, r]));
        let rhs_blocks = [&conn * i - i * &conn, &conn * j - j * &conn, &conn * k - k * &conn];
        let mut rhs = DVector::zeros(3 * block);
        for (blk, m) in rhs_blocks.iter().enumerate() {
            for r in 0..dim {
                for c in 0..dim {
                    rhs[blk * block + r * dim + c] = m[(r, c)];
                }
            }
            scale = scale.max(m.amax());
        }
        let g = svd.solve(&rhs, 1e-12).map_err(|e| Error::Twist(e.to_string()))?;
        let res = (&a * &g - &rhs).amax();
        residual = residual.max(res);
        gamma.push([g[0], g[1], g[2]]);
    }
    Ok(SkewConnection { passed: !is_nonzero(residual, scale, tol), residual, gamma })
}

/// The same structure written in the orthonormal coframe whose dual basis
/// is given by the columns of the orthogonal matrix `r`:
/// `C'_{ijk} = Σ R_{ai} R_{bj} C_{abc} R_{ck}` and `A' = RᵀAR`.
pub fn change_basis(model: &AqhModel, r: &DMatrix<f64>) -> Result<AqhModel> {
    let dim = model.dim();
    if r.nrows() != dim || r.ncols() != dim {
        return Err(Error::DimensionMismatch(r.nrows(), dim));
    }
    if (r.transpose() * r - DMatrix::identity(dim, dim)).amax() > 1e-12 {
        return Err(Error::InvalidTriple("change of basis is not orthogonal".into()));
    }
    let g = model.algebra();
    let mut c = vec![0.0; dim * dim * dim];
    for b in g.brackets() {
        // Brackets are stored for i < j; add both orders.
        for (i, j, s) in [(b.i, b.j, b.c), (b.j, b.i, -b.c)] {
            for x in 0..dim {
                let rx = r[(i, x)];
                if rx == 0.0 {
                    continue;
                }
                for y in 0..dim {
                    let ry = r[(j, y)];
                    if ry == 0.0 {
                        continue;
                    }
                    for z in 0..dim {
                        c[(x * dim + y) * dim + z] += rx * ry * s * r[(b.k, z)];
                    }
                }
            }
        }
    }
    let algebra = LieAlgebraModel::from_tensor(g.names().to_vec(), c)?;
    AqhModel::new(algebra, model.triple().conjugate(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hkt8() -> AqhModel {
        let names: Vec<String> = (1..=8).map(|i| format!("a{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let g = LieAlgebraModel::from_differentials(
            &refs,
            &[("a2", -2.0, "a3", "a4"), ("a3", -2.0, "a4", "a2"), ("a4", -2.0, "a2", "a3")],
        )
        .unwrap();
        AqhModel::standard(g).unwrap()
    }

    fn torus(dim: usize) -> AqhModel {
        AqhModel::standard(LieAlgebraModel::new((0..dim).map(|i| format!("e{i}")).collect(), vec![]).unwrap()).unwrap()
    }

    #[test]
    fn closed_forms_of_sp1_times_torus() {
        let m = hkt8();
        let closed = closed_one_forms(m.algebra());
        assert_eq!(closed.len(), 5);
        for f in &closed {
            assert!(m.algebra().d(f).is_zero(1e-12));
        }
        assert_eq!(closed_one_forms(torus(8).algebra()).len(), 8);
    }

    #[test]
    fn conformal_routes_agree() {
        let m = hkt8();
        let r = TorsionReport::from_model(&m, 1e-9);
        let ds = Form::from_vector(&DVector::from_fn(8, |i, _| if i == 0 { 0.3 } else if i == 5 { -0.7 } else { 0.0 }));
        let shifted = conformal_shift(&m, &r, &ds).unwrap();
        let recomputed = conformal_recompute(&m, &ds, 1e-9).unwrap();
        assert_eq!(shifted.flags, recomputed.flags);
        assert!(shifted.theta.approx_eq(&recomputed.theta, 1e-12));
        for c in conformal_table_checks(&m, &r, &recomputed, &ds, 1e-9) {
            assert!(c.passed, "{c:?}");
        }
        let lee = conformal_lee_forms(&m, &ds).unwrap();
        for a in Quat::ALL {
            let expected = &m.lee_form(a) - &ds.scale(2.0 * 3.0);
            assert!(lee[a.index()].approx_eq(&expected, 1e-12));
        }
        let not_closed = Form::one_form(8, 1);
        assert!(matches!(conformal_recompute(&m, &not_closed, 1e-9), Err(Error::NotClosed(_))));
    }

    #[test]
    fn curvature_of_kaehler_form() {
        let m = torus(8);
        let f = m.kaehler_form(Quat::I).clone();
        let (mu, alpha, ak, _) = decompose_curvature(&m, &f).unwrap();
        assert_eq!(mu, [1.0, 0.0, 0.0]);
        assert!(alpha.is_zero(1e-14));
        assert!(ak.iter().all(|k| k.is_zero(1e-14)));
    }

    #[test]
    fn random_curvature_decomposition() {
        use rand::{Rng, SeedableRng};
        let m = torus(12);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let f = Form::from_terms(
                12,
                2,
                crate::multilinear::increasing_indices(12, 2).into_iter().map(|k| (k, rng.gen_range(-1.0..1.0))),
            );
            let (mu, alpha, ak, kappa) = decompose_curvature(&m, &f).unwrap();
            let data = TwistData { f: f.clone(), x: DVector::zeros(12), a: 1.0, mu, alpha: alpha.clone(), a_kappa: ak, kappa };
            assert!(data.reconstruction_defect(m.triple()) < 1e-12);
            for q in Quat::ALL {
                assert!(alpha.act(m.endo(q)).approx_eq(&alpha, 1e-12));
                let k = &data.kappa[q.index()];
                assert!((k - k.transpose()).amax() < 1e-12);
                assert!(k.trace().abs() < 1e-12);
                assert!(data.a_kappa[q.index()].act(m.endo(q)).approx_eq(&data.a_kappa[q.index()], 1e-12));
            }
        }
    }

    #[test]
    fn twist_preconditions() {
        let m = torus(12);
        let f = Form::basis(12, &[0, 1]);
        let x0 = DVector::from_fn(12, |i, _| if i == 0 { 1.0 } else { 0.0 });
        assert!(matches!(TwistData::new(&m, f.clone(), x0, 1.0), Err(Error::Twist(_))));
        let x8 = DVector::from_fn(12, |i, _| if i == 8 { 1.0 } else { 0.0 });
        assert!(TwistData::new(&m, f.clone(), x8.clone(), 0.0).is_err());
        let data = TwistData::new(&m, Form::zero(12, 2), x8, 1.0).unwrap();
        let w = twist(&m, &data).unwrap();
        assert!(d_squared_defect(w.algebra()) == 0.0);
        let r = TorsionReport::from_model(&w, 1e-9);
        assert!(r.flags.is_empty());
    }

    #[test]
    fn twisting_random_curvature_on_torus() {
        use rand::{Rng, SeedableRng};
        let m = torus(12);
        let before = TorsionReport::from_model(&m, 1e-9);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..3 {
            let f = Form::from_terms(
                12,
                2,
                crate::multilinear::increasing_indices(12, 2)
                    .into_iter()
                    .filter(|k| !k.contains(&8))
                    .map(|k| (k, rng.gen_range(-1.0..1.0))),
            );
            let x = DVector::from_fn(12, |i, _| if i == 8 { 1.0 } else { 0.0 });
            let data = TwistData::new(&m, f, x, 1.3).unwrap();
            let w = twist(&m, &data).unwrap();
            let after = TorsionReport::from_model(&w, 1e-9);
            for c in twist_prediction_checks(&m, &before, &after, &data, 1e-9) {
                assert!(c.passed, "{c:?}");
            }
        }
    }

    #[test]
    fn basis_change_keeps_the_class() {
        let m = hkt8();
        let theta = 0.3f64;
        let mut r = DMatrix::identity(8, 8);
        r[(1, 1)] = theta.cos();
        r[(5, 1)] = theta.sin();
        r[(1, 5)] = -theta.sin();
        r[(5, 5)] = theta.cos();
        let m2 = change_basis(&m, &r).unwrap();
        let (a, b) = (TorsionReport::from_model(&m, 1e-9), TorsionReport::from_model(&m2, 1e-9));
        assert_eq!(a.flags, b.flags);
        assert!((a.theta.norm() - b.theta.norm()).abs() < 1e-12);
        assert!(change_basis(&m, &DMatrix::identity(8, 8).scale(2.0)).is_err());
    }

    #[test]
    fn skew_connections() {
        let m = hkt8();
        let r = TorsionReport::from_model(&m, 1e-9);
        let half_beta = r.beta[0].scale(0.5);
        assert!(skew_connection_check(&m, &half_beta, 1e-9).unwrap().passed);
        assert!(!skew_connection_check(&m, &r.beta[0], 1e-9).unwrap().passed);
        let t = torus(8);
        assert!(skew_connection_check(&t, &Form::zero(8, 3), 1e-9).unwrap().passed);
    }
}
