//! Lie algebras given by structure constants in an orthonormal basis, with
//! the invariant exterior derivative and its metric adjoint.

use nalgebra::DVector;

use crate::multilinear::{increasing_indices, Form};
use crate::{Error, Result};

/// `[e_i, e_j] = c e_k` with `i < j` (zero-based).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

#[derive(Clone, Debug)]
pub struct LieAlgebraModel {
    names: Vec<String>,
    brackets: Vec<Bracket>,
    /// `c[(i*dim + j)*dim + k]` is the coefficient of `e_k` in `[e_i, e_j]`.
    c: Vec<f64>,
    d_basis: Vec<Form>,
    unimodular: bool,
}

impl LieAlgebraModel {
    pub fn new(names: Vec<String>, brackets: Vec<Bracket>) -> Result<Self> {
        let dim = names.len();
        let mut c = vec![0.0; dim * dim * dim];
        for b in &brackets {
            for index in [b.i, b.j, b.k] {
                if index >= dim {
                    return Err(Error::IndexOutOfRange { index, dim });
                }
            }
            if b.i >= b.j {
                return Err(Error::BracketOrder { i: b.i, j: b.j });
            }
            c[(b.i * dim + b.j) * dim + b.k] += b.c;
            c[(b.j * dim + b.i) * dim + b.k] -= b.c;
        }
        Self::from_tensor(names, c)
    }

    /// Builds the algebra from a full structure tensor, which must be
    /// antisymmetric in its first two indices.
    pub fn from_tensor(names: Vec<String>, c: Vec<f64>) -> Result<Self> {
        let dim = names.len();
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch(c.len(), dim * dim * dim));
        }
        let mut skew_defect: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    skew_defect = skew_defect.max((c[(i * dim + j) * dim + k] + c[(j * dim + i) * dim + k]).abs());
                }
            }
        }
        if skew_defect > 1e-12 {
            return Err(Error::NotAntisymmetric(skew_defect));
        }
        let mut brackets = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                for k in 0..dim {
                    let v = c[(i * dim + j) * dim + k];
                    if v != 0.0 {
                        brackets.push(Bracket { i, j, k, c: v });
                    }
                }
            }
        }
        let d_basis = (0..dim)
            .map(|k| {
                Form::from_terms(
                    dim,
                    2,
                    increasing_indices(dim, 2).into_iter().map(|ij| {
                        let v = -c[(ij[0] * dim + ij[1]) * dim + k];
                        (ij, v)
                    }),
                )
            })
            .collect();
        let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let unimodular = (0..dim).all(|x| {
            let tr: f64 = (0..dim).map(|y| c[(x * dim + y) * dim + y]).sum();
            tr.abs() <= 1e-12 * (1.0 + scale)
        });
        let model = LieAlgebraModel { names, brackets, c, d_basis, unimodular };
        let defect = (0..dim).map(|k| model.d(&model.d_basis[k]).max_norm()).fold(0.0, f64::max);
        if defect > 1e-12 * (1.0 + scale * scale) {
            return Err(Error::Jacobi(defect));
        }
        Ok(model)
    }

    /// Builds the algebra from differentials written as
    /// `d target += coef · x ∧ y`, with names looked up in `names`.
    pub fn from_differentials(names: &[&str], terms: &[(&str, f64, &str, &str)]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let dim = names.len();
        let find = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| Error::UnknownName(s.into()));
        let mut c = vec![0.0; dim * dim * dim];
        for &(t, coef, x, y) in terms {
            let (t, x, y) = (find(t)?, find(x)?, find(y)?);
            c[(x * dim + y) * dim + t] -= coef;
            c[(y * dim + x) * dim + t] += coef;
        }
        Self::from_tensor(names, c)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownName(name.into()))
    }

    pub fn brackets(&self) -> &[Bracket] {
        &self.brackets
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.c[(i * n + j) * n + k]
    }

    pub fn structure_tensor(&self) -> &[f64] {
        &self.c
    }

    /// `trace(ad_X) = 0` for every basis vector.
    pub fn is_unimodular(&self) -> bool {
        self.unimodular
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for b in &self.brackets {
            let w = x[b.i] * y[b.j] - x[b.j] * y[b.i];
            out[b.k] += b.c * w;
        }
        out
    }

    /// `ad_X` as a matrix, column `j` being `[X, e_j]`.
    pub fn ad(&self, x: &DVector<f64>) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        nalgebra::DMatrix::from_fn(n, n, |k, j| (0..n).map(|i| x[i] * self.structure_constant(i, j, k)).sum())
    }

    /// `d e^k`.
    pub fn d_basis(&self, k: usize) -> &Form {
        &self.d_basis[k]
    }

    /// Invariant exterior derivative, the antiderivation with
    /// `dα(X, Y) = −α([X, Y])` on one-forms.
    pub fn d(&self, alpha: &Form) -> Form {
        let dim = self.dim();
        let p = alpha.degree();
        let mut terms = Vec::new();
        for (key, c) in alpha.iter() {
            for (pos, &ik) in key.iter().enumerate() {
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                for (ab, v) in self.d_basis[ik].iter() {
                    let mut idx = Vec::with_capacity(p + 1);
                    idx.extend_from_slice(&key[..pos]);
                    idx.extend_from_slice(ab);
                    idx.extend_from_slice(&key[pos + 1..]);
                    terms.push((idx, sign * v * c));
                }
            }
        }
        Form::from_terms(dim, p + 1, terms)
    }

    /// Metric adjoint of `d`: `⟨d*β, γ⟩ = ⟨β, dγ⟩`.
    pub fn codifferential(&self, beta: &Form) -> Form {
        let dim = self.dim();
        let p = beta.degree();
        if p == 0 {
            return Form::zero(dim, 0);
        }
        let terms: Vec<(Vec<usize>, f64)> = increasing_indices(dim, p - 1)
            .into_iter()
            .map(|k| {
                let dk = self.d(&Form::basis(dim, &k));
                let c = beta.inner(&dk).expect("same degree");
                (k, c)
            })
            .collect();
        Form::from_terms(dim, p - 1, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sp1() -> LieAlgebraModel {
        LieAlgebraModel::new(
            vec!["x".into(), "y".into(), "z".into(), "w".into()],
            vec![
                Bracket { i: 0, j: 1, k: 2, c: 2.0 },
                Bracket { i: 1, j: 2, k: 0, c: 2.0 },
                Bracket { i: 0, j: 2, k: 1, c: -2.0 },
            ],
        )
        .unwrap()
    }

    fn heisenberg_times_r() -> LieAlgebraModel {
        LieAlgebraModel::from_differentials(&["p", "q", "r", "s"], &[("r", -1.0, "p", "q")]).unwrap()
    }

    fn e(n: usize, i: usize) -> DVector<f64> {
        DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn sp1_differentials() {
        let g = sp1();
        assert!(g.d(&Form::one_form(4, 0)).approx_eq(&(-2.0 * &Form::basis(4, &[1, 2])), 0.0));
        assert!(g.d(&Form::one_form(4, 1)).approx_eq(&(-2.0 * &Form::basis(4, &[2, 0])), 0.0));
        assert!(g.d(&Form::one_form(4, 2)).approx_eq(&(-2.0 * &Form::basis(4, &[0, 1])), 0.0));
        assert_eq!(g.bracket(&e(4, 0), &e(4, 1)), 2.0 * e(4, 2));
        assert!(g.is_unimodular());
    }

    #[test]
    fn heisenberg_differentials() {
        let h = heisenberg_times_r();
        assert!(h.d(&Form::one_form(4, 0)).is_empty());
        assert!(h.d(&Form::one_form(4, 1)).is_empty());
        assert!(h.d(&Form::one_form(4, 2)).approx_eq(&(-Form::basis(4, &[0, 1])), 0.0));
    }

    #[test]
    fn abelian_is_trivial() {
        let t = LieAlgebraModel::new((0..8).map(|i| format!("a{}", i + 1)).collect(), vec![]).unwrap();
        let f = Form::basis(8, &[0, 3, 5]);
        assert!(t.d(&f).is_empty());
        assert!(t.codifferential(&f).is_empty());
        assert!(t.bracket(&e(8, 1), &e(8, 2)).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn jacobi_violation_rejected() {
        let r = LieAlgebraModel::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![Bracket { i: 0, j: 1, k: 2, c: 1.0 }, Bracket { i: 1, j: 2, k: 1, c: 1.0 }],
        );
        assert!(matches!(r, Err(Error::Jacobi(_))));
        let bad = LieAlgebraModel::new(vec!["x".into(), "y".into()], vec![Bracket { i: 1, j: 0, k: 0, c: 1.0 }]);
        assert!(matches!(bad, Err(Error::BracketOrder { .. })));
    }

    #[test]
    fn non_unimodular_detected() {
        let g = LieAlgebraModel::new(vec!["x".into(), "y".into()], vec![Bracket { i: 0, j: 1, k: 1, c: 1.0 }]).unwrap();
        assert!(!g.is_unimodular());
    }

    #[test]
    fn jacobi_on_random_triples() {
        let g = sp1();
        let xs = [
            DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]),
            DVector::from_vec(vec![1.0, 0.2, -0.7, 0.0]),
            DVector::from_vec(vec![-0.4, 0.9, 0.1, 1.5]),
        ];
        let b = |u: &DVector<f64>, v: &DVector<f64>| g.bracket(u, v);
        let s = b(&xs[0], &b(&xs[1], &xs[2])) + b(&xs[1], &b(&xs[2], &xs[0])) + b(&xs[2], &b(&xs[0], &xs[1]));
        assert!(s.amax() < 1e-14);
    }

    #[test]
    fn d_on_one_forms_matches_bracket() {
        let g = sp1();
        for k in 0..4 {
            let dk = g.d(&Form::one_form(4, k));
            for i in 0..4 {
                for j in 0..4 {
                    let lhs = dk.get(&[i, j]);
                    let rhs = -g.bracket(&e(4, i), &e(4, j))[k];
                    assert!((lhs - rhs).abs() < 1e-15);
                }
            }
        }
    }

    fn random_algebra_form(vals: &[f64], p: usize) -> Form {
        Form::from_terms(8, p, increasing_indices(8, p).into_iter().zip(vals.iter().cycle()).map(|(k, &c)| (k, c)))
    }

    fn nilpotent8() -> LieAlgebraModel {
        let names: Vec<String> = (1..=8).map(|i| format!("e{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        LieAlgebraModel::from_differentials(
            &refs,
            &[("e3", -1.0, "e1", "e2"), ("e4", -1.0, "e1", "e3"), ("e8", 2.0, "e5", "e6"), ("e8", -1.0, "e1", "e7")],
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn d_squared_vanishes(v in prop::collection::vec(-2.0f64..2.0, 11)) {
            let g = nilpotent8();
            for p in 1..=3 {
                let a = random_algebra_form(&v, p);
                prop_assert!(g.d(&g.d(&a)).is_zero(1e-12));
            }
        }

        #[test]
        fn leibniz_rule(v in prop::collection::vec(-2.0f64..2.0, 9)) {
            let g = nilpotent8();
            let a = random_algebra_form(&v, 1);
            let b = random_algebra_form(&v[3..], 2);
            let lhs = g.d(&a.wedge(&b));
            let rhs = g.d(&a).wedge(&b) - a.wedge(&g.d(&b));
            prop_assert!(lhs.approx_eq(&rhs, 1e-11));
        }
    }

    #[test]
    fn codifferential_is_adjoint_on_bases() {
        let g = nilpotent8();
        for p in 1..=3 {
            for a in increasing_indices(8, p) {
                let fa = Form::basis(8, &a);
                let da = g.d(&fa);
                for b in increasing_indices(8, p + 1) {
                    let fb = Form::basis(8, &b);
                    let l = da.inner(&fb).unwrap();
                    let r = fa.inner(&g.codifferential(&fb)).unwrap();
                    assert!((l - r).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn codifferential_matches_star_d_star() {
        let g = nilpotent8();
        let b = random_algebra_form(&[0.3, -1.2, 0.8, 2.0, -0.5], 2);
        let via_star = -g.d(&b.hodge_star()).hodge_star();
        assert!(g.codifferential(&b).approx_eq(&via_star, 1e-12));
    }
}
