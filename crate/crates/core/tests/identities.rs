mod common;

use common::{corpus_models, random_orthogonal, random_rotation};
use nalgebra::DMatrix;
use proptest::prelude::*;
use qtorsion::classify::universal_identities;
use qtorsion::multilinear::increasing_indices;
use qtorsion::torsion::{a_lambda, a_lambda_alt, lambda_from_nabla, theta_from_xi, xi_from_components, xi_from_differentials, xi_levi_civita};
use qtorsion::{AqhModel, Form, HypercomplexTriple, Quat, TorsionReport};
use rand::SeedableRng;

const TOL: f64 = 1e-9;

fn small(x: f64, scale: f64) -> bool {
    x <= 1e-10 * (1.0 + scale)
}

fn d_squared(model: &AqhModel, degree: usize) -> f64 {
    let g = model.algebra();
    increasing_indices(model.dim(), degree)
        .into_iter()
        .map(|idx| g.d(&g.d(&Form::basis(model.dim(), &idx))).max_norm())
        .fold(0.0, f64::max)
}

fn structure_identities(name: &str, m: &AqhModel) {
    let scale = m.dws().iter().map(Form::max_norm).fold(0.0, f64::max);
    for a in Quat::ALL {
        let nabla = m.nabla_omega(a);
        assert!(small(nabla.max_diff(&m.nabla_omega_from_dw(a)), scale), "{name}: ∇ω_{} from dω", a.name());
        assert!(small(nabla.max_diff(&m.nabla_omega_from_dw_alt(a)), scale), "{name}: ∇ω_{} second formula", a.name());
        assert!(small(nabla.max_diff(&m.gray_rhs(a)), scale), "{name}: Gray identity for {}", a.name());
        let alt = nabla.cyclic_sum().to_form(1e-12).unwrap();
        assert!(small(alt.max_diff(m.dw(a)), scale), "{name}: alternation of ∇ω_{}", a.name());
        let n = m.nijenhuis_oracle(a);
        assert!(small(n.max_diff(&m.nijenhuis_from_dw(a)), scale), "{name}: N_{} from dω", a.name());
        assert!(small(n.max_diff(&m.nijenhuis_from_dw_alt(a)), scale), "{name}: N_{} second formula", a.name());
    }
    assert!(small(m.symmetry_defect(), scale), "{name}: symmetric ∇ω identity");
}

fn torsion_identities(name: &str, m: &AqhModel) {
    let r = TorsionReport::from_model(m, TOL);
    for (what, v) in r.identity_residuals(m.triple()) {
        assert!(small(v, r.scale), "{name}: {what} ({v:e})");
    }
    for c in universal_identities(m, &r, TOL) {
        assert!(c.passed, "{name}: {} ({:e})", c.name, c.residual);
    }
    let lam = lambda_from_nabla(m);
    for a in Quat::ALL {
        let i = a.index();
        let al = a_lambda(m.triple(), m.dws(), m.n(), a);
        assert!(small(al.max_diff(&a_lambda_alt(m.triple(), m.dws(), m.n(), a)), r.scale), "{name}: Aλ_A two ways");
        assert!(small(lam[i].max_diff(&r.lambda[i]), r.scale), "{name}: λ_{} from ∇", a.name());
    }
    let sum_theta: Form = r.theta_a.iter().cloned().sum();
    assert!(small(sum_theta.max_diff(&(3.0 * &r.theta)), r.scale), "{name}: 3θ = Σθ_A");
    let sum_psik: Form = r.psi_k_a.iter().cloned().sum();
    let sum_psi3: Form = r.psi3_a.iter().cloned().sum();
    assert!(small(sum_psik.max_norm(), r.scale) && small(sum_psi3.max_norm(), r.scale), "{name}: Σψ_A = 0");
}

fn xi_identities(name: &str, m: &AqhModel) {
    let r = TorsionReport::from_model(m, TOL);
    let lc = xi_levi_civita(m);
    let scale = lc.max_norm();
    assert!(small(lc.max_diff(&xi_from_differentials(m)), scale), "{name}: ξ from dω");
    assert!(small(lc.max_diff(&xi_from_components(&r, m.triple())), scale), "{name}: ξ from its components");
    let (th, tha) = theta_from_xi(&lc, m.triple());
    assert!(small(th.max_diff(&r.theta), scale), "{name}: θ trace");
    for a in Quat::ALL {
        assert!(small(tha[a.index()].max_diff(&r.theta_a[a.index()]), scale), "{name}: θ_A trace");
    }
    // ξ_X takes values in the complement of sp(n) + sp(1).
    let dim = m.dim();
    for x in 0..dim {
        let xi = DMatrix::from_fn(dim, dim, |y, z| lc.get(&[x, y, z]));
        let mut sum = DMatrix::zeros(dim, dim);
        for a in Quat::ALL {
            let ma = m.endo(a).matrix();
            sum += ma * &xi * ma;
            let pairing: f64 = (0..dim).map(|i| (ma.transpose() * &xi)[(i, i)]).sum();
            assert!(small(pairing.abs(), scale), "{name}: ξ has no sp(1) part");
        }
        assert!(small((&sum - &xi).amax(), scale), "{name}: Σ_A A ξ_X A = ξ_X");
    }
}

#[test]
fn differential_squares_to_zero_on_corpus() {
    for (name, m) in corpus_models() {
        for p in 1..=3 {
            assert!(d_squared(&m, p) < 1e-12, "{name}: d² on {p}-forms");
        }
    }
}

#[test]
fn structure_identities_on_corpus() {
    for (name, m) in corpus_models() {
        structure_identities(&name, &m);
    }
}

#[test]
fn torsion_identities_on_corpus() {
    for (name, m) in corpus_models() {
        torsion_identities(&name, &m);
    }
}

#[test]
fn intrinsic_torsion_identities_on_corpus() {
    for (name, m) in corpus_models() {
        xi_identities(&name, &m);
    }
}

#[test]
fn no_lambda3_part_in_dimension_eight() {
    for (name, m) in corpus_models().into_iter().filter(|(_, m)| m.dim() == 8) {
        let r = TorsionReport::from_model(&m, TOL);
        assert!(r.psi3.is_zero(1e-12), "{name}");
        assert!(r.psi3_a.iter().all(|p| p.is_zero(1e-12)), "{name}");
        assert!(!r.flags.x33 && !r.flags.x3h, "{name}");
    }
}

#[test]
fn fundamental_form_is_closed_on_salamon() {
    let m = qtorsion::corpus::example("salamon", Default::default()).unwrap();
    assert!(m.algebra().d(&m.fundamental_form()).is_zero(1e-12));
}

fn perturbed(base: &AqhModel, seed: u64, rotate_only: bool) -> AqhModel {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let triple = if rotate_only {
        base.triple().rotate(&random_rotation(&mut rng)).unwrap()
    } else {
        let r = random_orthogonal(base.dim(), &mut rng);
        base.triple().conjugate(&r).unwrap()
    };
    AqhModel::new(base.algebra().clone(), triple).unwrap()
}

fn base_models() -> Vec<(String, AqhModel)> {
    corpus_models().into_iter().filter(|(n, _)| !n.starts_with("torus")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn identities_hold_for_random_triples(seed in any::<u64>(), which in 0usize..13) {
        let models = base_models();
        let (name, base) = &models[which % models.len()];
        let m = perturbed(base, seed, false);
        structure_identities(name, &m);
        torsion_identities(name, &m);
    }

    #[test]
    fn sp1_rotation_keeps_the_class(seed in any::<u64>(), which in 0usize..13) {
        let models = base_models();
        let (name, base) = &models[which % models.len()];
        let m = perturbed(base, seed, true);
        let (a, b) = (TorsionReport::from_model(base, TOL), TorsionReport::from_model(&m, TOL));
        prop_assert_eq!(a.flags, b.flags, "{}", name);
        prop_assert!((a.theta.norm() - b.theta.norm()).abs() < 1e-9);
        prop_assert!((a.psi3.norm() - b.psi3.norm()).abs() < 1e-9);
        prop_assert!((a.psi_k.norm() - b.psi_k.norm()).abs() < 1e-9);
        let omega = |m: &AqhModel| m.fundamental_form();
        prop_assert!(omega(base).approx_eq(&omega(&m), 1e-12));
    }
}

#[test]
fn invalid_triples_are_rejected() {
    let i = qtorsion::Endomorphism::identity(8);
    let j = qtorsion::Endomorphism::identity(8);
    assert!(HypercomplexTriple::new(i, j).is_err());
}
