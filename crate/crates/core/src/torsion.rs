//! The intrinsic `Sp(n)Sp(1)`-torsion `ξ` and its six components, computed
//! from the exterior derivatives `dω_I, dω_J, dω_K`.
//!
//! For each `A` the three-form `β_A = B dω_B + C dω_C` is split into
//! `β3_A + βK_A + βE3_A + β4_A`; the torsion components are then linear
//! combinations of these pieces and the one-forms `Aλ_A`.

use nalgebra::DVector;
use serde::Serialize;

use crate::multilinear::{cal_l, Endomorphism, Form, Tensor};
use crate::structure::{AqhModel, HypercomplexTriple, Quat};
use crate::{is_nonzero, Error, Result};

/// `β_A = B dω_B + C dω_C`.
pub fn beta(triple: &HypercomplexTriple, dw: &[Form; 3], a: Quat) -> Form {
    let (b, c) = a.others();
    dw[b.index()].act(triple.get(b)) + dw[c.index()].act(triple.get(c))
}

fn omegas(triple: &HypercomplexTriple) -> [Form; 3] {
    Quat::ALL.map(|a| crate::structure::kaehler_form_of(triple.get(a)))
}

fn lam(w: &Form, psi: &Form) -> Form {
    psi.lambda(w).expect("degree checked by caller")
}

/// `2n Aλ_A = AΛ_C dω_B + Λ_A dω_A − Λ_C dω_C`.
pub fn a_lambda(triple: &HypercomplexTriple, dw: &[Form; 3], n: usize, a: Quat) -> Form {
    let w = omegas(triple);
    let (b, c) = a.others();
    let (ia, ib, ic) = (a.index(), b.index(), c.index());
    let s = lam(&w[ic], &dw[ib]).act(triple.get(a)) + lam(&w[ia], &dw[ia]) - lam(&w[ic], &dw[ic]);
    s.scale(1.0 / (2.0 * n as f64))
}

/// Second expression: `2n Aλ_A = AΛ_C dω_B + BΛ_C dω_A + BΛ_A dω_C`.
pub fn a_lambda_alt(triple: &HypercomplexTriple, dw: &[Form; 3], n: usize, a: Quat) -> Form {
    let w = omegas(triple);
    let (b, c) = a.others();
    let (ia, ib, ic) = (a.index(), b.index(), c.index());
    let mb = triple.get(b);
    let s = lam(&w[ic], &dw[ib]).act(triple.get(a)) + lam(&w[ic], &dw[ia]).act(mb) + lam(&w[ia], &dw[ic]).act(mb);
    s.scale(1.0 / (2.0 * n as f64))
}

/// `λ_A(X) = ⟨∇_X ω_B, ω_C⟩ / 2n`, straight from the Levi-Civita connection.
pub fn lambda_from_nabla(model: &AqhModel) -> [Form; 3] {
    let dim = model.dim();
    let n = model.n() as f64;
    Quat::ALL.map(|a| {
        let (b, c) = a.others();
        let nab = model.nabla_omega(b);
        let wc = model.kaehler_form(c).to_tensor();
        let v = DVector::from_fn(dim, |x, _| {
            let mut s = 0.0;
            for j in 0..dim {
                for k in 0..dim {
                    s += nab.get(&[x, j, k]) * wc.get(&[j, k]);
                }
            }
            0.5 * s / (2.0 * n)
        });
        Form::from_vector(&v)
    })
}

/// Inverse of `ν ↦ Aν` on one-forms.
fn undo(a: &Endomorphism, nu: &Form) -> Form {
    -nu.act(a)
}

/// The splitting of one `β_A`.
#[derive(Clone, Debug)]
pub struct BetaDecomposition {
    pub nu3: Form,
    pub nu4: Form,
    pub beta3: Form,
    pub beta_k: Form,
    pub beta_e3: Form,
    pub beta4: Form,
}

impl BetaDecomposition {
    pub fn compute(triple: &HypercomplexTriple, n: usize, a: Quat, beta_a: &Form) -> Self {
        let w = omegas(triple);
        let (b, c) = a.others();
        let (ma, mb, mc) = (triple.get(a), triple.get(b), triple.get(c));
        let (wa, wb, wc) = (&w[a.index()], &w[b.index()], &w[c.index()]);
        let nf = n as f64;
        let nu4 = lam(wa, beta_a).act(ma);
        let bl = lam(wb, beta_a).act(mb);
        let nu3 = ((2.0 * nf - 1.0) * &bl - &nu4).scale(1.0 / ((2.0 * nf + 1.0) * (nf - 1.0)));
        let beta_e3 = -0.5 * &nu3.act(mb).wedge(wb) - 0.5 * &nu3.act(mc).wedge(wc)
            + nu3.act(ma).wedge(wa).scale(1.0 / (2.0 * nf - 1.0));
        let beta4 = nu4.act(ma).wedge(wa).scale(-1.0 / (2.0 * nf - 1.0));
        let rest = beta_a - &beta_e3 - &beta4;
        let lb = cal_l(mb, &rest).expect("three-form");
        let lc = cal_l(mc, &rest).expect("three-form");
        let beta3 = (2.0 * &rest - &lb - &lc).scale(1.0 / 6.0);
        let beta_k = (4.0 * &rest + &lb + &lc).scale(1.0 / 6.0);
        BetaDecomposition { nu3, nu4, beta3, beta_k, beta_e3, beta4 }
    }

    /// Sum of the four pieces.
    pub fn total(&self) -> Form {
        &(&self.beta3 + &self.beta_k) + &(&self.beta_e3 + &self.beta4)
    }
}

/// Which of the six torsion components are nonzero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TorsionFlags {
    /// `Λ³₀E S³H`
    pub x33: bool,
    /// `K S³H`
    pub xk3: bool,
    /// `E S³H`
    pub xe3: bool,
    /// `Λ³₀E H`
    pub x3h: bool,
    /// `K H`
    pub xkh: bool,
    /// `E H`
    pub xeh: bool,
}

pub const COMPONENT_NAMES: [&str; 6] = ["Λ³₀E S³H", "K S³H", "E S³H", "Λ³₀EH", "KH", "EH"];
pub const COMPONENT_KEYS: [&str; 6] = ["x33", "xK3", "xE3", "x3H", "xKH", "xEH"];

impl TorsionFlags {
    pub fn as_array(&self) -> [bool; 6] {
        [self.x33, self.xk3, self.xe3, self.x3h, self.xkh, self.xeh]
    }

    pub fn from_array(f: [bool; 6]) -> Self {
        TorsionFlags { x33: f[0], xk3: f[1], xe3: f[2], x3h: f[3], xkh: f[4], xeh: f[5] }
    }

    /// Parses short keys such as `["xK3", "xKH"]`.
    pub fn from_keys<S: AsRef<str>>(keys: &[S]) -> Result<Self> {
        let mut f = [false; 6];
        for k in keys {
            let i = COMPONENT_KEYS
                .iter()
                .position(|c| c.eq_ignore_ascii_case(k.as_ref()))
                .ok_or_else(|| Error::Parse(format!("unknown torsion component `{}`", k.as_ref())))?;
            f[i] = true;
        }
        Ok(Self::from_array(f))
    }

    pub fn keys(&self) -> Vec<&'static str> {
        self.select(&COMPONENT_KEYS)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.select(&COMPONENT_NAMES)
    }

    fn select(&self, table: &[&'static str; 6]) -> Vec<&'static str> {
        self.as_array().iter().zip(table).filter(|(f, _)| **f).map(|(_, s)| *s).collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.as_array().iter().any(|&f| f)
    }

    /// Human-readable type, e.g. `K S³H + KH`.
    pub fn label(&self) -> String {
        if self.is_empty() {
            return "ξ = 0".into();
        }
        if self.as_array() == [false, false, false, false, true, true] {
            return "(K+E)H".into();
        }
        self.names().join(" + ")
    }
}

/// Norms (largest coefficient) of the six components.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ComponentNorms {
    pub psi3: f64,
    pub psi_k_a: f64,
    pub theta_diff: f64,
    pub psi3_a: f64,
    pub psi_k: f64,
    pub theta: f64,
}

impl ComponentNorms {
    pub fn as_array(&self) -> [f64; 6] {
        [self.psi3, self.psi_k_a, self.theta_diff, self.psi3_a, self.psi_k, self.theta]
    }
}

/// All torsion data derived from `dω_I, dω_J, dω_K`.
#[derive(Clone, Debug)]
pub struct TorsionReport {
    pub n: usize,
    pub tol: f64,
    /// Largest coefficient of the `β_A`, used as the scale in zero tests.
    pub scale: f64,
    pub beta: [Form; 3],
    pub decomposition: [BetaDecomposition; 3],
    pub a_lambda: [Form; 3],
    pub lambda: [Form; 3],
    pub a_eta: [Form; 3],
    pub eta: [Form; 3],
    pub psi3: Form,
    pub psi3_a: [Form; 3],
    pub psi_k: Form,
    pub psi_k_a: [Form; 3],
    pub theta: Form,
    pub theta_a: [Form; 3],
    pub norms: ComponentNorms,
    pub flags: TorsionFlags,
}

impl TorsionReport {
    pub fn from_model(model: &AqhModel, tol: f64) -> Self {
        Self::from_differentials(model.triple(), model.n(), model.dws(), tol)
            .expect("model data is consistent")
    }

    /// The pipeline on raw data: the triple and the three-forms `dω_A`.
    pub fn from_differentials(triple: &HypercomplexTriple, n: usize, dw: &[Form; 3], tol: f64) -> Result<Self> {
        if triple.dim() != 4 * n {
            return Err(Error::DimensionMismatch(triple.dim(), 4 * n));
        }
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        for f in dw {
            if f.degree() != 3 {
                return Err(Error::DegreeMismatch(f.degree(), 3));
            }
            if f.dim() != 4 * n {
                return Err(Error::DimensionMismatch(f.dim(), 4 * n));
            }
        }
        let beta = Quat::ALL.map(|a| beta(triple, dw, a));
        let a_lambda = Quat::ALL.map(|a| a_lambda(triple, dw, n, a));
        Ok(Self::assemble(triple, n, beta, a_lambda, tol))
    }

    /// Builds the report from the three-forms `β_A` and the one-forms `Aλ_A`,
    /// which together determine `ξ`.
    pub fn assemble(triple: &HypercomplexTriple, n: usize, beta: [Form; 3], a_lambda: [Form; 3], tol: f64) -> Self {
        let nf = n as f64;
        let decomposition = Quat::ALL.map(|a| BetaDecomposition::compute(triple, n, a, &beta[a.index()]));
        let lambda = Quat::ALL.map(|a| undo(triple.get(a), &a_lambda[a.index()]));

        let s3: Form = decomposition.iter().map(|d| d.beta3.clone()).sum();
        let sk: Form = decomposition.iter().map(|d| d.beta_k.clone()).sum();
        let psi3 = s3.scale(1.0 / 12.0);
        let psi3_a = Quat::ALL.map(|a| {
            let l = cal_l(triple.get(a), &s3).expect("three-form");
            decomposition[a.index()].beta3.scale(-1.0 / 8.0) + (3.0 * &s3 + &l).scale(1.0 / 48.0)
        });
        let psi_k = sk.scale(-1.0 / 48.0);
        let psi_k_a = Quat::ALL.map(|a| decomposition[a.index()].beta_k.scale(-0.5) + sk.scale(1.0 / 6.0));

        let q = Quat::ALL.map(|a| &decomposition[a.index()].nu3 - &(2.0 * &a_lambda[a.index()]));
        let sq: Form = q.iter().cloned().sum();
        let theta = sq.scale(nf / (24.0 * (2.0 * nf - 1.0)));
        let theta_a = Quat::ALL.map(|a| {
            (&q[a.index()] - &sq.scale((nf - 1.0) / (2.0 * (2.0 * nf - 1.0)))).scale(nf / (4.0 * (nf + 1.0)))
        });

        let ce = (2.0 * nf + 1.0) * (nf - 1.0) / (4.0 * nf * (2.0 * nf - 1.0));
        let a_eta = Quat::ALL.map(|a| {
            let (b, c) = a.others();
            let d = |x: Quat| &decomposition[x.index()];
            let part3 = (2.0 * (nf - 1.0)) * &d(a).nu3 + &d(b).nu3 + &d(c).nu3;
            let part4 = &d(a).nu4 - &d(b).nu4 - &d(c).nu4;
            (part3 + &part4).scale(ce)
        });
        let eta = Quat::ALL.map(|a| undo(triple.get(a), &a_eta[a.index()]));

        let scale = beta.iter().map(Form::max_norm).fold(0.0, f64::max);
        let max3 = |fs: &[Form; 3]| fs.iter().map(Form::max_norm).fold(0.0, f64::max);
        let theta_diff = theta_a.clone().map(|t| &t - &theta);
        let norms = ComponentNorms {
            psi3: psi3.max_norm(),
            psi_k_a: max3(&psi_k_a),
            theta_diff: max3(&theta_diff),
            psi3_a: max3(&psi3_a),
            psi_k: psi_k.max_norm(),
            theta: theta.max_norm(),
        };
        let flags = TorsionFlags::from_array(norms.as_array().map(|v| is_nonzero(v, scale, tol)));
        TorsionReport {
            n,
            tol,
            scale,
            beta,
            decomposition,
            a_lambda,
            lambda,
            a_eta,
            eta,
            psi3,
            psi3_a,
            psi_k,
            psi_k_a,
            theta,
            theta_a,
            norms,
            flags,
        }
    }

    pub fn label(&self) -> String {
        self.flags.label()
    }

    pub fn decomposition(&self, a: Quat) -> &BetaDecomposition {
        &self.decomposition[a.index()]
    }

    /// Residuals of the identities tying the components back to the pieces
    /// of `β_A`; all should vanish.
    pub fn identity_residuals(&self, triple: &HypercomplexTriple) -> Vec<(&'static str, f64)> {
        let nf = self.n as f64;
        let mut out = Vec::new();
        let mut worst = |name: &'static str, vals: Vec<f64>| out.push((name, vals.into_iter().fold(0.0, f64::max)));
        let d = &self.decomposition;

        worst("beta pieces sum", Quat::ALL.iter().map(|&a| d[a.index()].total().max_diff(&self.beta[a.index()])).collect());
        worst(
            "beta3 from psi",
            Quat::ALL
                .iter()
                .map(|&a| {
                    let l = cal_l(triple.get(a), &self.psi3).expect("three-form");
                    let r = &(&(6.0 * &self.psi3) + &(2.0 * &l)) - &(8.0 * &self.psi3_a[a.index()]);
                    r.max_diff(&d[a.index()].beta3)
                })
                .collect(),
        );
        worst(
            "betaK from psi",
            Quat::ALL
                .iter()
                .map(|&a| {
                    let r = -16.0 * &self.psi_k - 2.0 * &self.psi_k_a[a.index()];
                    r.max_diff(&d[a.index()].beta_k)
                })
                .collect(),
        );
        worst(
            "nu3 from theta",
            Quat::ALL
                .iter()
                .map(|&a| {
                    let i = a.index();
                    let r = 2.0 * &self.a_lambda[i]
                        + (3.0 * (nf - 1.0) * &self.theta + (nf + 1.0) * &self.theta_a[i]).scale(4.0 / nf);
                    r.max_diff(&d[i].nu3)
                })
                .collect(),
        );
        worst(
            "nu4 from theta",
            Quat::ALL
                .iter()
                .map(|&a| {
                    let (b, c) = a.others();
                    let i = a.index();
                    let r = (2.0 * nf - 1.0) * &(&self.a_lambda[b.index()] + &self.a_lambda[c.index()])
                        + 2.0 * &self.a_lambda[i]
                        + (&self.theta - &self.theta_a[i]).scale(6.0 * (nf - 1.0) * (2.0 * nf + 1.0) / nf);
                    r.max_diff(&d[i].nu4)
                })
                .collect(),
        );
        let sum_theta: Form = self.theta_a.iter().cloned().sum();
        worst("theta trace", vec![sum_theta.max_diff(&(3.0 * &self.theta))]);
        let s3a: Form = self.psi3_a.iter().cloned().sum();
        worst("psi3_A trace", vec![s3a.max_norm()]);
        let ska: Form = self.psi_k_a.iter().cloned().sum();
        worst("psiK_A trace", vec![ska.max_norm()]);
        out
    }
}

/// `ξ` from the Levi-Civita connection:
/// `ξ_X = Σ_A (−¼ A ∇_X A + ½ λ_A(X) A)`, returned as
/// `Ξ(X, Y, Z) = ⟨Y, ξ_X Z⟩`.
pub fn xi_levi_civita(model: &AqhModel) -> Tensor {
    let dim = model.dim();
    let gamma = model.levi_civita();
    let lambda = lambda_from_nabla(model);
    let mut xi = Tensor::zeros(dim, 3);
    for x in 0..dim {
        let g = model.connection_matrix(&gamma, x);
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        for a in Quat::ALL {
            let am = model.endo(a).matrix();
            let da = &g * am - am * &g;
            m += am * da * (-0.25) + am * (0.5 * lambda[a.index()].get(&[x]));
        }
        for y in 0..dim {
            for z in 0..dim {
                xi.set(&[x, y, z], m[(y, z)]);
            }
        }
    }
    xi
}

/// `ξ` assembled directly from `dω_I, dω_J, dω_K`.
pub fn xi_from_differentials(model: &AqhModel) -> Tensor {
    let dim = model.dim();
    let nf = model.n() as f64;
    let mut p = Tensor::zeros(dim, 3);
    for a in Quat::ALL {
        let (b, c) = a.others();
        let (ma, mb, mc) = (model.endo(a), model.endo(b), model.endo(c));
        let (wa, wc) = (model.kaehler_form(a), model.kaehler_form(c));
        let one = lam(wc, model.dw(b)) - lam(wa, model.dw(a)).act(ma) + lam(wc, model.dw(c)).act(ma);
        // P(X, Y, k) = one(X) (AY)_k / 4n
        let am = ma.matrix();
        let term = Tensor::from_fn(dim, 3, |ix| one.get(&[ix[0]]) * am[(ix[2], ix[1])] / (4.0 * nf));
        let a1 = model.dw(a).to_tensor().act_slot(ma, 0).unwrap();
        let t = [
            model.dw(a).to_tensor().act_slot(ma, 1).unwrap(),
            model.dw(a).to_tensor().act_slot(ma, 2).unwrap(),
            a1.act_slot(mb, 1).unwrap().act_slot(mb, 0).unwrap(),
            a1.act_slot(mb, 2).unwrap().act_slot(mb, 0).unwrap(),
            a1.act_pair(mc, 1, 2).unwrap(),
        ]
        .into_iter()
        .fold(a1.scale(-1.0), |acc, x| &acc + &x);
        p = &(&p + &term) + &t.scale(0.125);
    }
    p.permuted(&[0, 2, 1])
}

/// Rebuilds `ξ` from the six components of a report.
pub fn xi_from_components(report: &TorsionReport, triple: &HypercomplexTriple) -> Tensor {
    let nf = report.n as f64;
    let w = omegas(triple);
    let a23 = |a: Quat, f: &Form| f.to_tensor().act_pair(triple.get(a), 1, 2).unwrap();
    let mut r = report.psi3.to_tensor();
    for a in Quat::ALL {
        let i = a.index();
        r = &r + &a23(a, &report.psi_k_a[i]);
        r = &r + &a23(a, &report.psi3_a[i]);
        r = &r - &a23(a, &report.psi_k);
        let g = (&report.theta_a[i] - &report.theta).act(triple.get(a));
        let skew = g.wedge(&w[i]).to_tensor().scale(nf);
        let prod = g.to_tensor().outer(&w[i].to_tensor()).scale(nf - 1.0);
        r = &r + &(&skew - &prod).scale(1.0 / nf);
    }
    r = &r + &report.psi_k.to_tensor().scale(3.0);
    &r + &eh_tensor(&report.theta, triple)
}

/// The `EH` part of `ξ` determined by `θ`.
fn eh_tensor(theta: &Form, triple: &HypercomplexTriple) -> Tensor {
    let dim = triple.dim();
    let nf = (dim / 4) as f64;
    let w = omegas(triple);
    let mut eh = Tensor::zeros(dim, 3);
    for i in 0..dim {
        let ei = Form::one_form(dim, i).to_tensor();
        let mut two = ei_wedge(dim, i, theta).scale(3.0);
        for a in Quat::ALL {
            let m = triple.get(a);
            let aei = Form::from_vector(&m.matrix().column(i).into_owned());
            two = two - aei.wedge(&theta.act(m));
        }
        eh = &eh + &ei.outer(&two.to_tensor());
    }
    for a in Quat::ALL {
        let at = theta.act(triple.get(a)).to_tensor();
        eh = &eh - &at.outer(&w[a.index()].to_tensor()).scale(2.0 / nf);
    }
    eh
}

fn ei_wedge(dim: usize, i: usize, f: &Form) -> Form {
    Form::one_form(dim, i).wedge(f)
}

/// `θ` and `θ_A` read off from traces of `ξ`:
/// `θ = −Σ ξ_{e_i} e_i / ((6/n)(2n+1)(n−1))` and
/// `θ_A = −Σ A ξ_{e_i} A e_i / ((2/n)(2n+1)(n−1))`.
pub fn theta_from_xi(xi: &Tensor, triple: &HypercomplexTriple) -> (Form, [Form; 3]) {
    let dim = triple.dim();
    let nf = (dim / 4) as f64;
    let denom = (2.0 * nf + 1.0) * (nf - 1.0) / nf;
    let tr = DVector::from_fn(dim, |k, _| (0..dim).map(|i| xi.get(&[i, k, i])).sum::<f64>());
    let theta = Form::from_vector(&tr).scale(-1.0 / (6.0 * denom));
    let theta_a = Quat::ALL.map(|a| {
        let m = triple.get(a).matrix();
        let mut v = DVector::zeros(dim);
        for i in 0..dim {
            // ξ_{e_i} applied to A e_i
            let mut u = DVector::zeros(dim);
            for y in 0..dim {
                u[y] = (0..dim).map(|z| xi.get(&[i, y, z]) * m[(z, i)]).sum::<f64>();
            }
            v += m * u;
        }
        Form::from_vector(&v).scale(-1.0 / (2.0 * denom))
    });
    (theta, theta_a)
}
