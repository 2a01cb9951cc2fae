//! Almost quaternion-Hermitian structures: the hypercomplex triple, Kähler
//! forms, the fundamental four-form, Nijenhuis tensors and the Levi-Civita
//! derivatives of the Kähler forms.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::liealg::LieAlgebraModel;
use crate::multilinear::{increasing_indices, Endomorphism, Form, Tensor};
use crate::{Error, Result};

/// One of the three almost complex structures of an adapted basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quat {
    I,
    J,
    K,
}

impl Quat {
    pub const ALL: [Quat; 3] = [Quat::I, Quat::J, Quat::K];

    pub fn index(self) -> usize {
        match self {
            Quat::I => 0,
            Quat::J => 1,
            Quat::K => 2,
        }
    }

    /// The next two structures in cyclic order: `I → (J, K)`, `J → (K, I)`,
    /// `K → (I, J)`.
    pub fn others(self) -> (Quat, Quat) {
        match self {
            Quat::I => (Quat::J, Quat::K),
            Quat::J => (Quat::K, Quat::I),
            Quat::K => (Quat::I, Quat::J),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Quat::I => "I",
            Quat::J => "J",
            Quat::K => "K",
        }
    }
}

/// Three orthogonal almost complex structures with `K = IJ = −JI`.
#[derive(Clone, Debug)]
pub struct HypercomplexTriple {
    parts: [Endomorphism; 3],
}

impl HypercomplexTriple {
    /// Builds the triple from `I` and `J`, with `K = IJ`.
    pub fn new(i: Endomorphism, j: Endomorphism) -> Result<Self> {
        let k = &i * &j;
        Self::from_parts(i, j, k)
    }

    pub fn from_parts(i: Endomorphism, j: Endomorphism, k: Endomorphism) -> Result<Self> {
        let dim = i.dim();
        if j.dim() != dim || k.dim() != dim {
            return Err(Error::DimensionMismatch(dim, j.dim().max(k.dim())));
        }
        let t = HypercomplexTriple { parts: [i, j, k] };
        t.validate(1e-12)?;
        Ok(t)
    }

    fn validate(&self, tol: f64) -> Result<()> {
        let dim = self.dim();
        let minus_id = -&Endomorphism::identity(dim);
        for a in Quat::ALL {
            let m = self.get(a);
            if (m * m).max_diff(&minus_id) > tol {
                return Err(Error::InvalidTriple(format!("{}² ≠ −1", a.name())));
            }
            if !m.is_orthogonal(tol) {
                return Err(Error::InvalidTriple(format!("{} is not orthogonal", a.name())));
            }
        }
        let (i, j, k) = (self.get(Quat::I), self.get(Quat::J), self.get(Quat::K));
        if (i * j).max_diff(k) > tol || (j * i).max_diff(&-k) > tol {
            return Err(Error::InvalidTriple("K ≠ IJ = −JI".into()));
        }
        Ok(())
    }

    /// The block pattern on consecutive quadruples `e_1..e_4`:
    /// `Ie_1 = e_2, Ie_3 = e_4, Je_1 = e_3, Je_4 = e_2`, `K = IJ`.
    pub fn standard(dim: usize) -> Result<Self> {
        if dim == 0 || dim % 4 != 0 {
            return Err(Error::NotQuaternionic(dim));
        }
        let mut i = DMatrix::zeros(dim, dim);
        let mut j = DMatrix::zeros(dim, dim);
        for b in (0..dim).step_by(4) {
            i[(b + 1, b)] = 1.0;
            i[(b, b + 1)] = -1.0;
            i[(b + 3, b + 2)] = 1.0;
            i[(b + 2, b + 3)] = -1.0;
            j[(b + 2, b)] = 1.0;
            j[(b, b + 2)] = -1.0;
            j[(b + 1, b + 3)] = 1.0;
            j[(b + 3, b + 1)] = -1.0;
        }
        Self::new(Endomorphism::new(i)?, Endomorphism::new(j)?)
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    pub fn get(&self, a: Quat) -> &Endomorphism {
        &self.parts[a.index()]
    }

    pub fn as_array(&self) -> [&Endomorphism; 3] {
        [&self.parts[0], &self.parts[1], &self.parts[2]]
    }

    /// The same triple expressed in the orthonormal basis given by the
    /// columns of `r`.
    pub fn conjugate(&self, r: &DMatrix<f64>) -> Result<Self> {
        let [i, j, k] = &self.parts;
        Self::from_parts(i.conjugate(r), j.conjugate(r), k.conjugate(r))
    }

    /// A new adapted basis `I' = Σ R_{a0} A`, … for `R ∈ SO(3)`.
    pub fn rotate(&self, r: &nalgebra::Matrix3<f64>) -> Result<Self> {
        let mix = |col: usize| {
            let m = (0..3).fold(DMatrix::zeros(self.dim(), self.dim()), |acc, a| {
                acc + self.parts[a].matrix() * r[(a, col)]
            });
            Endomorphism::new(m)
        };
        Self::from_parts(mix(0)?, mix(1)?, mix(2)?)
    }
}

/// The Kähler form `ω_A(X, Y) = ⟨X, AY⟩`.
pub fn kaehler_form_of(a: &Endomorphism) -> Form {
    let n = a.dim();
    Form::from_terms(
        n,
        2,
        increasing_indices(n, 2).into_iter().map(|k| {
            let c = a.matrix()[(k[0], k[1])];
            (k, c)
        }),
    )
}

/// A Lie algebra with an orthonormal coframe and a hypercomplex triple.
#[derive(Clone, Debug)]
pub struct AqhModel {
    algebra: LieAlgebraModel,
    triple: HypercomplexTriple,
    n: usize,
    omega: [Form; 3],
    dw: [Form; 3],
}

impl AqhModel {
    pub fn new(algebra: LieAlgebraModel, triple: HypercomplexTriple) -> Result<Self> {
        let dim = algebra.dim();
        if triple.dim() != dim {
            return Err(Error::DimensionMismatch(triple.dim(), dim));
        }
        if dim == 0 || dim % 4 != 0 {
            return Err(Error::NotQuaternionic(dim));
        }
        let n = dim / 4;
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        let omega = Quat::ALL.map(|a| kaehler_form_of(triple.get(a)));
        let dw = [0, 1, 2].map(|i| algebra.d(&omega[i]));
        Ok(AqhModel { algebra, triple, n, omega, dw })
    }

    /// The model with the standard triple.
    pub fn standard(algebra: LieAlgebraModel) -> Result<Self> {
        let t = HypercomplexTriple::standard(algebra.dim())?;
        Self::new(algebra, t)
    }

    pub fn algebra(&self) -> &LieAlgebraModel {
        &self.algebra
    }

    pub fn triple(&self) -> &HypercomplexTriple {
        &self.triple
    }

    /// Quaternionic dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn endo(&self, a: Quat) -> &Endomorphism {
        self.triple.get(a)
    }

    pub fn kaehler_form(&self, a: Quat) -> &Form {
        &self.omega[a.index()]
    }

    pub fn omegas(&self) -> &[Form; 3] {
        &self.omega
    }

    /// `dω_A`.
    pub fn dw(&self, a: Quat) -> &Form {
        &self.dw[a.index()]
    }

    pub fn dws(&self) -> &[Form; 3] {
        &self.dw
    }

    /// `Ω = Σ_A ω_A ∧ ω_A`.
    pub fn fundamental_form(&self) -> Form {
        self.omega.iter().map(|w| w.wedge(w)).sum()
    }

    /// `d*ω_A`.
    pub fn codifferential_omega(&self, a: Quat) -> Form {
        self.algebra.codifferential(self.kaehler_form(a))
    }

    /// The Lee form `A d*ω_A`.
    pub fn lee_form(&self, a: Quat) -> Form {
        self.codifferential_omega(a).act(self.endo(a))
    }

    fn basis_vector(&self, i: usize) -> DVector<f64> {
        DVector::from_fn(self.dim(), |r, _| if r == i { 1.0 } else { 0.0 })
    }

    /// `N_A(X, Y, Z) = ⟨X, N_A(Y, Z)⟩` from the bracket, with
    /// `N_A(Y, Z) = [Y, Z] + A[AY, Z] + A[Y, AZ] − [AY, AZ]`.
    pub fn nijenhuis_oracle(&self, a: Quat) -> Tensor {
        let dim = self.dim();
        let m = self.endo(a);
        let g = &self.algebra;
        let mut t = Tensor::zeros(dim, 3);
        for y in 0..dim {
            let ey = self.basis_vector(y);
            let ay = m.apply(&ey);
            for z in 0..dim {
                let ez = self.basis_vector(z);
                let az = m.apply(&ez);
                let v = g.bracket(&ey, &ez) + m.apply(&g.bracket(&ay, &ez)) + m.apply(&g.bracket(&ey, &az))
                    - g.bracket(&ay, &az);
                for x in 0..dim {
                    t.set(&[x, y, z], v[x]);
                }
            }
        }
        t
    }

    /// `2N_A = (A_{(12)} + A_{(13)} + A_{(23)} − 1) B_{(23)} (B dω_B − C dω_C)`.
    pub fn nijenhuis_from_dw(&self, a: Quat) -> Tensor {
        let (b, c) = a.others();
        let (ma, mb) = (self.endo(a), self.endo(b));
        let diff = self.dw(b).act(mb) - self.dw(c).act(self.endo(c));
        let t = diff.to_tensor().act_pair(mb, 1, 2).expect("rank 3");
        let l = &(&t.act_pair(ma, 0, 1).unwrap() + &t.act_pair(ma, 0, 2).unwrap()) + &t.act_pair(ma, 1, 2).unwrap();
        (&l - &t).scale(0.5)
    }

    /// `2N_A = (1 − A_{(12)}) (C_{(23)} − B_{(23)}) (B dω_B − C dω_C)`.
    pub fn nijenhuis_from_dw_alt(&self, a: Quat) -> Tensor {
        let (b, c) = a.others();
        let (ma, mb, mc) = (self.endo(a), self.endo(b), self.endo(c));
        let diff = (self.dw(b).act(mb) - self.dw(c).act(mc)).to_tensor();
        let t = &diff.act_pair(mc, 1, 2).unwrap() - &diff.act_pair(mb, 1, 2).unwrap();
        (&t - &t.act_pair(ma, 0, 1).unwrap()).scale(0.5)
    }

    /// Levi-Civita connection coefficients `Γ(i, j, k) = ⟨∇_{e_i} e_j, e_k⟩`
    /// from the Koszul formula, stored as a rank-3 tensor.
    pub fn levi_civita(&self) -> Tensor {
        let g = &self.algebra;
        Tensor::from_fn(self.dim(), 3, |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            0.5 * (g.structure_constant(i, j, k) - g.structure_constant(j, k, i) + g.structure_constant(k, i, j))
        })
    }

    /// Matrix of `∇_{e_x}` acting on vectors: entry `(k, j)` is
    /// `⟨e_k, ∇_{e_x} e_j⟩`.
    pub fn connection_matrix(&self, gamma: &Tensor, x: usize) -> DMatrix<f64> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |k, j| gamma.get(&[x, j, k]))
    }

    /// `(∇_X ω_A)(Y, Z)` as a rank-3 tensor in `(X, Y, Z)`.
    pub fn nabla_omega(&self, a: Quat) -> Tensor {
        let gamma = self.levi_civita();
        let w = self.kaehler_form(a).to_tensor();
        let dim = self.dim();
        Tensor::from_fn(dim, 3, |ix| {
            let (x, y, z) = (ix[0], ix[1], ix[2]);
            let mut s = 0.0;
            for m in 0..dim {
                s -= gamma.get(&[x, y, m]) * w.get(&[m, z]) + gamma.get(&[x, z, m]) * w.get(&[y, m]);
            }
            s
        })
    }

    /// `2∇ω_A = (1 − A_{(23)}) dω_A + (A_{(2)} + A_{(3)}) B_{(1)} dω_B
    ///          − (1 − A_{(23)}) B_{(1)} dω_C`.
    pub fn nabla_omega_from_dw(&self, a: Quat) -> Tensor {
        let (b, c) = a.others();
        let (ma, mb) = (self.endo(a), self.endo(b));
        let one_minus = |t: &Tensor| t - &t.act_pair(ma, 1, 2).unwrap();
        let da = self.dw(a).to_tensor();
        let b1 = self.dw(b).to_tensor().act_slot(mb, 0).unwrap();
        let c1 = self.dw(c).to_tensor().act_slot(mb, 0).unwrap();
        let mid = &b1.act_slot(ma, 1).unwrap() + &b1.act_slot(ma, 2).unwrap();
        (&(&one_minus(&da) + &mid) - &one_minus(&c1)).scale(0.5)
    }

    /// `2∇ω_A = (1 − A_{(23)}) dω_A + (A_{(2)} + A_{(3)}) C_{(1)} dω_C
    ///          + (1 − A_{(23)}) C_{(1)} dω_B`.
    pub fn nabla_omega_from_dw_alt(&self, a: Quat) -> Tensor {
        let (b, c) = a.others();
        let (ma, mc) = (self.endo(a), self.endo(c));
        let one_minus = |t: &Tensor| t - &t.act_pair(ma, 1, 2).unwrap();
        let da = self.dw(a).to_tensor();
        let c1 = self.dw(c).to_tensor().act_slot(mc, 0).unwrap();
        let b1 = self.dw(b).to_tensor().act_slot(mc, 0).unwrap();
        let mid = &c1.act_slot(ma, 1).unwrap() + &c1.act_slot(ma, 2).unwrap();
        (&(&one_minus(&da) + &mid) + &one_minus(&b1)).scale(0.5)
    }

    /// Right-hand side of Gray's identity divided by two:
    /// `½(dω_A − A_{(23)} dω_A − A_{(3)} N_A)`.
    pub fn gray_rhs(&self, a: Quat) -> Tensor {
        let ma = self.endo(a);
        let da = self.dw(a).to_tensor();
        let n = self.nijenhuis_oracle(a);
        (&(&da - &da.act_pair(ma, 1, 2).unwrap()) - &n.act_slot(ma, 2).unwrap()).scale(0.5)
    }

    /// `(∇ω_I)(X, JY, KZ) + (∇ω_J)(X, KY, IZ) + (∇ω_K)(X, IY, JZ)`.
    pub fn symmetry_defect(&self) -> f64 {
        let dim = self.dim();
        let mut total = Tensor::zeros(dim, 3);
        for a in Quat::ALL {
            let (b, c) = a.others();
            // −B_{(2)} then −C_{(3)} gives +∇ω_A(X, BY, CZ).
            let t = self.nabla_omega(a).act_slot(self.endo(b), 1).unwrap().act_slot(self.endo(c), 2).unwrap();
            total = &total + &t;
        }
        total.max_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::cal_l;

    fn names12() -> Vec<String> {
        ["a", "b", "c"].iter().flat_map(|l| (1..=4).map(move |i| format!("{l}{i}"))).collect()
    }

    fn s3xt9() -> AqhModel {
        let names = names12();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let g = LieAlgebraModel::from_differentials(
            &refs,
            &[("a1", -2.0, "b1", "c1"), ("b1", -2.0, "c1", "a1"), ("c1", -2.0, "a1", "b1")],
        )
        .unwrap();
        AqhModel::standard(g).unwrap()
    }

    #[test]
    fn standard_triple_kaehler_forms() {
        let t = HypercomplexTriple::standard(12).unwrap();
        let wi = kaehler_form_of(t.get(Quat::I));
        let mut expected = Form::zero(12, 2);
        for b in [0, 4, 8] {
            expected += &Form::basis(12, &[b + 1, b]);
            expected += &Form::basis(12, &[b + 3, b + 2]);
        }
        assert_eq!(wi, expected);
        // ω_J = a3∧a1 + a2∧a4 + … , the (234) cycle of ω_I.
        let wj = kaehler_form_of(t.get(Quat::J));
        let mut ej = Form::zero(12, 2);
        for b in [0, 4, 8] {
            ej += &Form::basis(12, &[b + 2, b]);
            ej += &Form::basis(12, &[b + 1, b + 3]);
        }
        assert_eq!(wj, ej);
        for a in Quat::ALL {
            let w = kaehler_form_of(t.get(a));
            assert_eq!(w.inner(&w).unwrap(), 6.0);
            assert!(w.act(t.get(a)).approx_eq(&w, 0.0));
        }
        assert!(HypercomplexTriple::standard(10).is_err());
    }

    #[test]
    fn invalid_triples_rejected() {
        let t = HypercomplexTriple::standard(8).unwrap();
        let i = t.get(Quat::I).clone();
        assert!(HypercomplexTriple::new(i.clone(), i.clone()).is_err());
        let scaled = Endomorphism::new(i.matrix() * 2.0).unwrap();
        assert!(HypercomplexTriple::new(scaled, t.get(Quat::J).clone()).is_err());
    }

    #[test]
    fn small_dimension_rejected() {
        let g = LieAlgebraModel::new((0..4).map(|i| format!("x{i}")).collect(), vec![]).unwrap();
        assert!(matches!(AqhModel::standard(g), Err(Error::TooSmall(1))));
    }

    #[test]
    fn fundamental_form_independent_of_adapted_basis() {
        let m = s3xt9();
        let om = m.fundamental_form();
        let r = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 0.7).into_inner();
        let t2 = m.triple().rotate(&r).unwrap();
        let om2: Form = Quat::ALL.iter().map(|&a| kaehler_form_of(t2.get(a))).map(|w| w.wedge(&w)).sum();
        assert!(om.approx_eq(&om2, 1e-12));
        assert!(!m.algebra().d(&om).is_zero(1e-9));
    }

    #[test]
    fn nijenhuis_routes_agree() {
        let m = s3xt9();
        for a in Quat::ALL {
            let oracle = m.nijenhuis_oracle(a);
            assert!(oracle.max_diff(&m.nijenhuis_from_dw(a)) < 1e-12);
            assert!(oracle.max_diff(&m.nijenhuis_from_dw_alt(a)) < 1e-12);
        }
    }

    #[test]
    fn s3xt9_nijenhuis_skew_part() {
        // N_I = 2a1b1c1 − 2Σ_cyc a1b2c2 (fully skew here).
        let m = s3xt9();
        let ix = |s: &str| m.algebra().index_of(s).unwrap();
        let n = m.nijenhuis_oracle(Quat::I);
        assert!(n.antisymmetry_defect() < 1e-12);
        let f = n.to_form(1e-12).unwrap();
        let mut expected = 2.0 * &Form::basis(12, &[ix("a1"), ix("b1"), ix("c1")]);
        for (x, y, z) in [("a1", "b2", "c2"), ("b1", "c2", "a2"), ("c1", "a2", "b2")] {
            expected = expected - 2.0 * &Form::basis(12, &[ix(x), ix(y), ix(z)]);
        }
        assert!(f.approx_eq(&expected, 1e-12), "{f:?}");
    }

    #[test]
    fn nabla_omega_routes_and_identities() {
        let m = s3xt9();
        for a in Quat::ALL {
            let nab = m.nabla_omega(a);
            assert!(nab.max_diff(&m.nabla_omega_from_dw(a)) < 1e-12);
            assert!(nab.max_diff(&m.nabla_omega_from_dw_alt(a)) < 1e-12);
            assert!(nab.max_diff(&m.gray_rhs(a)) < 1e-12);
            // Alternation recovers dω_A.
            let alt = nab.cyclic_sum().to_form(1e-12).unwrap();
            assert!(alt.approx_eq(m.dw(a), 1e-12));
            // β_A lies in the +1 eigenspace of 𝓛_A.
            let (b, c) = a.others();
            let beta = m.dw(b).act(m.endo(b)) + m.dw(c).act(m.endo(c));
            assert!(cal_l(m.endo(a), &beta).unwrap().approx_eq(&beta, 1e-12));
        }
        assert!(m.symmetry_defect() < 1e-12);
    }

    #[test]
    fn torus_is_flat() {
        let g = LieAlgebraModel::new((0..8).map(|i| format!("a{}", i + 1)).collect(), vec![]).unwrap();
        let m = AqhModel::standard(g).unwrap();
        for a in Quat::ALL {
            assert_eq!(m.nijenhuis_oracle(a).max_norm(), 0.0);
            assert_eq!(m.nabla_omega(a).max_norm(), 0.0);
        }
        assert!(m.algebra().d(&m.fundamental_form()).is_empty());
    }
}
