//! Sparse exterior forms, dense covariant tensors and the endomorphism
//! actions used throughout the torsion computations.
//!
//! Conventions: `(a ∧ b)(e_a, e_b) = 1` for orthonormal coframe elements,
//! `⟨α, β⟩ = (1/p!) Σ α(e_I) β(e_I)` over all ordered index tuples, so the
//! increasing basis forms are orthonormal.

use std::collections::BTreeMap;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Coefficients below this absolute size are dropped after each operation.
pub const PRUNE: f64 = 1e-14;

/// Sorts `idx` in place and returns the sign of the sorting permutation, or
/// `None` if an index repeats.
pub fn sort_with_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// All permutations of `0..k` with their signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, f64)>) {
        let k = used.len();
        if prefix.len() == k {
            let mut p = prefix.clone();
            let s = sort_with_sign(&mut p).unwrap_or(0.0);
            out.push((prefix.clone(), s));
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// Strictly increasing `p`-subsets of `0..dim`.
pub fn increasing_indices(dim: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, dim: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(i + 1, dim, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= dim {
        rec(0, dim, p, &mut Vec::with_capacity(p), &mut out);
    }
    out
}

/// A degree-`p` antisymmetric form on a `dim`-dimensional inner-product
/// space, stored by its coefficients on strictly increasing index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Form { dim, degree, coeffs: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        Form::from_terms(dim, 0, [(Vec::new(), c)])
    }

    /// The decomposable form `e^{i_1} ∧ … ∧ e^{i_p}`; the indices need not be
    /// sorted. Repeated indices give zero.
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        Form::from_terms(dim, idx.len(), [(idx.to_vec(), 1.0)])
    }

    pub fn one_form(dim: usize, i: usize) -> Self {
        Form::basis(dim, &[i])
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        Form::from_terms(v.len(), 1, v.iter().enumerate().map(|(i, &c)| (vec![i], c)))
    }

    /// `e^1 ∧ … ∧ e^dim`.
    pub fn volume(dim: usize) -> Self {
        Form::basis(dim, &(0..dim).collect::<Vec<_>>())
    }

    /// Builds a form from possibly unsorted index tuples.
    ///
    /// # Panics
    /// If a tuple has the wrong length or an index is out of range.
    pub fn from_terms<I>(dim: usize, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut f = Form::zero(dim, degree);
        for (idx, c) in terms {
            f.add_term(idx, c);
        }
        f.pruned()
    }

    fn add_term(&mut self, mut idx: Vec<usize>, c: f64) {
        assert_eq!(idx.len(), self.degree, "index tuple has wrong length");
        assert!(idx.iter().all(|&i| i < self.dim), "index out of range");
        if let Some(s) = sort_with_sign(&mut idx) {
            *self.coeffs.entry(idx).or_insert(0.0) += s * c;
        }
    }

    fn pruned(mut self) -> Self {
        self.coeffs.retain(|_, c| c.abs() >= PRUNE);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &f64)> {
        self.coeffs.iter()
    }

    /// Value on `(e_{i_1}, …, e_{i_p})` for arbitrary (unsorted) indices.
    pub fn get(&self, idx: &[usize]) -> f64 {
        let mut k = idx.to_vec();
        match sort_with_sign(&mut k) {
            Some(s) => s * self.coeffs.get(&k).copied().unwrap_or(0.0),
            None => 0.0,
        }
    }

    /// Scalar value of a degree-0 form.
    pub fn scalar_value(&self) -> f64 {
        self.coeffs.get(&Vec::new()).copied().unwrap_or(0.0)
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_norm() <= tol
    }

    /// Max-norm of the coefficient difference.
    pub fn max_diff(&self, other: &Form) -> f64 {
        (self - other).max_norm()
    }

    pub fn approx_eq(&self, other: &Form, tol: f64) -> bool {
        self.dim == other.dim && self.degree == other.degree && self.max_diff(other) <= tol
    }

    /// Components of a one-form.
    pub fn to_vector(&self) -> DVector<f64> {
        assert_eq!(self.degree, 1, "to_vector needs a one-form");
        let mut v = DVector::zeros(self.dim);
        for (k, c) in &self.coeffs {
            v[k[0]] = *c;
        }
        v
    }

    pub fn scale(&self, c: f64) -> Form {
        Form {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
        .pruned()
    }

    /// Exterior product.
    ///
    /// # Panics
    /// On dimension mismatch; see [`wedge`] for the checked version.
    pub fn wedge(&self, other: &Form) -> Form {
        assert_eq!(self.dim, other.dim, "wedge of forms on different spaces");
        let degree = self.degree + other.degree;
        let mut out = Form::zero(self.dim, degree);
        if degree > self.dim {
            return out;
        }
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let Some(sign) = merge_sign(a, b) else { continue };
                let mut k: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                k.sort_unstable();
                *out.coeffs.entry(k).or_insert(0.0) += sign * ca * cb;
            }
        }
        out.pruned()
    }

    /// Interior product `X ⌟ α`.
    pub fn contract(&self, x: &DVector<f64>) -> Result<Form> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(x.len(), self.dim));
        }
        if self.degree == 0 {
            return Err(Error::DegreeTooLow { needed: 1, got: 0 });
        }
        let mut out = Form::zero(self.dim, self.degree - 1);
        for (k, c) in &self.coeffs {
            for (pos, &i) in k.iter().enumerate() {
                if x[i] == 0.0 {
                    continue;
                }
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let mut rest = k.clone();
                rest.remove(pos);
                *out.coeffs.entry(rest).or_insert(0.0) += sign * x[i] * c;
            }
        }
        Ok(out.pruned())
    }

    /// Contraction with a basis vector.
    pub fn contract_basis(&self, i: usize) -> Form {
        let mut x = DVector::zeros(self.dim);
        x[i] = 1.0;
        self.contract(&x).expect("degree checked by caller")
    }

    pub fn inner(&self, other: &Form) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| c * other.coeffs.get(k).copied().unwrap_or(0.0))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Hodge star for the orientation `e^1 ∧ … ∧ e^dim`.
    pub fn hodge_star(&self) -> Form {
        let mut out = Form::zero(self.dim, self.dim - self.degree);
        for (k, c) in &self.coeffs {
            let comp: Vec<usize> = (0..self.dim).filter(|i| !k.contains(i)).collect();
            let mut all: Vec<usize> = k.iter().chain(comp.iter()).copied().collect();
            let s = sort_with_sign(&mut all).expect("disjoint");
            *out.coeffs.entry(comp).or_insert(0.0) += s * c;
        }
        out.pruned()
    }

    /// Value on arbitrary vectors, `Σ_I c_I det[v_j(e_{i_k})]`.
    pub fn evaluate(&self, vectors: &[DVector<f64>]) -> f64 {
        assert_eq!(vectors.len(), self.degree);
        let p = self.degree;
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let m = DMatrix::from_fn(p, p, |r, s| vectors[s][k[r]]);
                c * m.determinant()
            })
            .sum()
    }

    /// Dense antisymmetric tensor with entries `α(e_{i_1}, …, e_{i_p})`.
    pub fn to_tensor(&self) -> Tensor {
        let mut t = Tensor::zeros(self.dim, self.degree);
        let perms = permutations(self.degree);
        for (k, c) in &self.coeffs {
            for (p, s) in &perms {
                let idx: Vec<usize> = p.iter().map(|&i| k[i]).collect();
                t.set(&idx, s * c);
            }
        }
        t
    }

    /// `Aψ(X_1, …, X_s) = (−1)^s ψ(AX_1, …, AX_s)`.
    pub fn act(&self, a: &Endomorphism) -> Form {
        assert_eq!(self.dim, a.dim(), "endomorphism on a different space");
        let all: Vec<usize> = (0..self.degree).collect();
        let images = a.coframe_images();
        if self.sparse_is_cheaper(&images, std::slice::from_ref(&all)) {
            self.replace_factors(&images, &[all])
        } else {
            self.to_tensor().act_total(a).increasing_part()
        }
    }

    /// Rough operation counts of the sparse expansion against the dense
    /// slot actions.
    fn sparse_is_cheaper(&self, images: &[Vec<(usize, f64)>], sets: &[Vec<usize>]) -> bool {
        let nnz = images.iter().map(Vec::len).sum::<usize>() as f64 / self.dim.max(1) as f64;
        let sparse: f64 = sets.iter().map(|set| 8.0 * self.coeffs.len() as f64 * nnz.powi(set.len() as i32)).sum();
        let dense: f64 = sets.iter().map(|set| (set.len() as f64) * (self.dim as f64).powi(self.degree as i32 + 1)).sum();
        sparse <= dense
    }

    /// Sum over the position sets `sets` of `ψ` with the factors at those
    /// positions replaced by their images `e^i ↦ Σ_j images[i]`.
    fn replace_factors(&self, images: &[Vec<(usize, f64)>], sets: &[Vec<usize>]) -> Form {
        let mut out = Form::zero(self.dim, self.degree);
        let mut buf = vec![0; self.degree];
        for (k, c) in &self.coeffs {
            for set in sets {
                if set.iter().any(|&pos| images[k[pos]].is_empty()) {
                    continue;
                }
                // Odometer over the images of the replaced factors.
                let mut choice = vec![0usize; set.len()];
                'outer: loop {
                    buf.copy_from_slice(k);
                    let mut coef = *c;
                    for (slot, &pos) in set.iter().enumerate() {
                        let (j, v) = images[k[pos]][choice[slot]];
                        buf[pos] = j;
                        coef *= v;
                    }
                    let mut sorted = buf.clone();
                    if let Some(sign) = sort_with_sign(&mut sorted) {
                        *out.coeffs.entry(sorted).or_insert(0.0) += sign * coef;
                    }
                    for slot in (0..set.len()).rev() {
                        choice[slot] += 1;
                        if choice[slot] < images[k[set[slot]]].len() {
                            continue 'outer;
                        }
                        choice[slot] = 0;
                    }
                    break;
                }
            }
        }
        out.pruned()
    }

    /// `Λ_ω ψ`, the adjoint of `φ ↦ φ ∧ ω` for a two-form `ω`.
    pub fn lambda(&self, omega: &Form) -> Result<Form> {
        lambda_op(omega, self)
    }
}

/// Sign of the shuffle bringing `a ++ b` into increasing order, or `None` if
/// they share an index.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<f64> {
    let mut inversions = 0usize;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

fn combine(a: &Form, b: &Form, sb: f64) -> Form {
    assert_eq!(a.dim, b.dim, "forms on different spaces");
    assert_eq!(a.degree, b.degree, "forms of different degrees");
    let mut out = a.clone();
    for (k, c) in &b.coeffs {
        *out.coeffs.entry(k.clone()).or_insert(0.0) += sb * c;
    }
    out.pruned()
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        combine(self, rhs, -1.0)
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        combine(&self, &rhs, 1.0)
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        combine(&self, &rhs, -1.0)
    }
}

impl Add<&Form> for Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        combine(&self, rhs, 1.0)
    }
}

impl Sub<&Form> for Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        combine(&self, rhs, -1.0)
    }
}

impl AddAssign<&Form> for Form {
    fn add_assign(&mut self, rhs: &Form) {
        *self = combine(self, rhs, 1.0);
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(-1.0)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(-1.0)
    }
}

impl Mul<&Form> for f64 {
    type Output = Form;
    fn mul(self, rhs: &Form) -> Form {
        rhs.scale(self)
    }
}

impl Mul<Form> for f64 {
    type Output = Form;
    fn mul(self, rhs: Form) -> Form {
        rhs.scale(self)
    }
}

/// Sums a non-empty iterator of forms.
impl Sum for Form {
    fn sum<I: Iterator<Item = Form>>(mut iter: I) -> Form {
        let first = iter.next().expect("sum of an empty set of forms");
        iter.fold(first, |acc, f| acc + f)
    }
}

/// A dense covariant tensor of rank `rank` on a `dim`-dimensional space,
/// stored row-major. Used for tensors without full antisymmetry such as
/// slot actions, Nijenhuis tensors and covariant derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dim: usize,
    rank: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Tensor { dim, rank, data: vec![0.0; dim.pow(rank as u32)] }
    }

    pub fn from_fn(dim: usize, rank: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        let mut t = Tensor::zeros(dim, rank);
        let mut idx = vec![0; rank];
        for pos in 0..t.data.len() {
            t.decode(pos, &mut idx);
            t.data[pos] = f(&idx);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    fn decode(&self, mut pos: usize, idx: &mut [usize]) {
        for slot in (0..self.rank).rev() {
            idx[slot] = pos % self.dim;
            pos /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn max_diff(&self, other: &Tensor) -> f64 {
        assert_eq!((self.dim, self.rank), (other.dim, other.rank));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scale(&self, c: f64) -> Tensor {
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// `A_{(slot)} T`: `−T(…, A X_slot, …)`; slots are zero-based.
    pub fn act_slot(&self, a: &Endomorphism, slot: usize) -> Result<Tensor> {
        if slot >= self.rank {
            return Err(Error::SlotOutOfRange { slot, rank: self.rank });
        }
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch(a.dim(), self.dim));
        }
        let m = a.matrix();
        let stride = self.dim.pow((self.rank - 1 - slot) as u32);
        let mut out = Tensor::zeros(self.dim, self.rank);
        let mut idx = vec![0; self.rank];
        for pos in 0..self.data.len() {
            self.decode(pos, &mut idx);
            let j = idx[slot];
            let base = pos - j * stride;
            let mut s = 0.0;
            for k in 0..self.dim {
                let akj = m[(k, j)];
                if akj != 0.0 {
                    s += self.data[base + k * stride] * akj;
                }
            }
            out.data[pos] = -s;
        }
        Ok(out)
    }

    /// `A_{(s)} A_{(t)} T`.
    pub fn act_pair(&self, a: &Endomorphism, s: usize, t: usize) -> Result<Tensor> {
        self.act_slot(a, t)?.act_slot(a, s)
    }

    /// `(−1)^r T(AX_1, …, AX_r)`.
    pub fn act_total(&self, a: &Endomorphism) -> Tensor {
        let mut t = self.clone();
        for slot in 0..self.rank {
            t = t.act_slot(a, slot).expect("slot in range");
        }
        t
    }

    /// `result(X_0, …) = T(X_{perm[0]}, …)`.
    pub fn permuted(&self, perm: &[usize]) -> Tensor {
        assert_eq!(perm.len(), self.rank);
        let mut out = Tensor::zeros(self.dim, self.rank);
        let mut idx = vec![0; self.rank];
        for pos in 0..out.data.len() {
            self.decode(pos, &mut idx);
            let src = perm.iter().fold(0, |acc, &p| acc * self.dim + idx[p]);
            out.data[pos] = self.data[src];
        }
        out
    }

    /// `T(X,Y,Z) + T(Y,Z,X) + T(Z,X,Y)` for rank three.
    pub fn cyclic_sum(&self) -> Tensor {
        assert_eq!(self.rank, 3);
        let a = self.permuted(&[1, 2, 0]);
        let b = self.permuted(&[2, 0, 1]);
        &(self + &a) + &b
    }

    /// Largest `|T + T∘τ|` over adjacent transpositions `τ`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for s in 0..self.rank.saturating_sub(1) {
            let mut perm: Vec<usize> = (0..self.rank).collect();
            perm.swap(s, s + 1);
            d = d.max((self + &self.permuted(&perm)).max_norm());
        }
        d
    }

    /// Reads the coefficients on increasing indices without checking
    /// antisymmetry.
    pub fn increasing_part(&self) -> Form {
        Form::from_terms(
            self.dim,
            self.rank,
            increasing_indices(self.dim, self.rank).into_iter().map(|k| {
                let c = self.get(&k);
                (k, c)
            }),
        )
    }

    /// Converts an antisymmetric tensor to a form.
    pub fn to_form(&self, tol: f64) -> Result<Form> {
        let defect = self.antisymmetry_defect();
        if defect > tol * (1.0 + self.max_norm()) {
            return Err(Error::NotAntisymmetric(defect));
        }
        Ok(self.increasing_part())
    }

    pub fn outer(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.dim, other.dim);
        let n = other.data.len();
        let mut data = Vec::with_capacity(self.data.len() * n);
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Tensor { dim: self.dim, rank: self.rank + other.rank, data }
    }
}

impl Add for &Tensor {
    type Output = Tensor;
    fn add(self, rhs: &Tensor) -> Tensor {
        assert_eq!((self.dim, self.rank), (rhs.dim, rhs.rank));
        Tensor {
            dim: self.dim,
            rank: self.rank,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Tensor {
    type Output = Tensor;
    fn sub(self, rhs: &Tensor) -> Tensor {
        self + &rhs.scale(-1.0)
    }
}

impl Add for Tensor {
    type Output = Tensor;
    fn add(self, rhs: Tensor) -> Tensor {
        &self + &rhs
    }
}

impl Sub for Tensor {
    type Output = Tensor;
    fn sub(self, rhs: Tensor) -> Tensor {
        &self - &rhs
    }
}

impl Mul<&Tensor> for f64 {
    type Output = Tensor;
    fn mul(self, rhs: &Tensor) -> Tensor {
        rhs.scale(self)
    }
}

impl Mul<Tensor> for f64 {
    type Output = Tensor;
    fn mul(self, rhs: Tensor) -> Tensor {
        rhs.scale(self)
    }
}

/// A linear map of the tangent space; column `j` of the matrix is the image
/// of `e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Endomorphism {
    matrix: DMatrix<f64>,
}

impl Endomorphism {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(matrix.nrows(), matrix.ncols()));
        }
        Ok(Endomorphism { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Endomorphism { matrix: DMatrix::identity(dim, dim) }
    }

    /// `A e^i = −Σ_j A_{ij} e^j` for each coframe element, as sparse rows.
    fn coframe_images(&self) -> Vec<Vec<(usize, f64)>> {
        let m = &self.matrix;
        (0..m.nrows())
            .map(|i| (0..m.ncols()).filter(|&j| m[(i, j)] != 0.0).map(|j| (j, -m[(i, j)])).collect())
            .collect()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        Endomorphism { matrix: &self.matrix * &other.matrix }
    }

    pub fn transpose(&self) -> Endomorphism {
        Endomorphism { matrix: self.matrix.transpose() }
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (self.matrix.transpose() * &self.matrix - DMatrix::<f64>::identity(n, n)).amax() <= tol
    }

    /// `Rᵀ A R`, the endomorphism expressed in the basis given by the columns
    /// of the orthogonal matrix `R`.
    pub fn conjugate(&self, r: &DMatrix<f64>) -> Endomorphism {
        Endomorphism { matrix: r.transpose() * &self.matrix * r }
    }

    pub fn max_diff(&self, other: &Endomorphism) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }
}

impl Mul for &Endomorphism {
    type Output = Endomorphism;
    fn mul(self, rhs: &Endomorphism) -> Endomorphism {
        self.compose(rhs)
    }
}

impl Neg for &Endomorphism {
    type Output = Endomorphism;
    fn neg(self) -> Endomorphism {
        Endomorphism { matrix: -&self.matrix }
    }
}

/// Checked exterior product.
pub fn wedge(a: &Form, b: &Form) -> Result<Form> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    Ok(a.wedge(b))
}

pub fn contract(x: &DVector<f64>, a: &Form) -> Result<Form> {
    a.contract(x)
}

pub fn inner(a: &Form, b: &Form) -> Result<f64> {
    a.inner(b)
}

pub fn hodge_star(a: &Form) -> Form {
    a.hodge_star()
}

/// `A_{(slot)} ψ` as a dense tensor; `slot` is zero-based.
pub fn act_slot(a: &Endomorphism, slot: usize, psi: &Form) -> Result<Tensor> {
    psi.to_tensor().act_slot(a, slot)
}

pub fn act_total(a: &Endomorphism, psi: &Form) -> Form {
    psi.act(a)
}

/// `Λ_ω ψ = ½ Σ ω(e_j, e_k) ψ(e_j, e_k, …)`.
pub fn lambda_op(omega: &Form, psi: &Form) -> Result<Form> {
    if omega.degree != 2 {
        return Err(Error::DegreeMismatch(omega.degree, 2));
    }
    if omega.dim != psi.dim {
        return Err(Error::DimensionMismatch(omega.dim, psi.dim));
    }
    if psi.degree < 2 {
        return Err(Error::DegreeTooLow { needed: 2, got: psi.degree });
    }
    let mut dense = vec![0.0; psi.dim * psi.dim];
    for (k, c) in &omega.coeffs {
        dense[k[0] * psi.dim + k[1]] = *c;
    }
    let mut out = Form::zero(psi.dim, psi.degree - 2);
    for (k, c) in &psi.coeffs {
        for p in 0..k.len() {
            for q in p + 1..k.len() {
                let w = dense[k[p] * psi.dim + k[q]];
                if w == 0.0 {
                    continue;
                }
                let sign = if (p + q - 1) % 2 == 0 { 1.0 } else { -1.0 };
                let rest: Vec<usize> = k
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != p && i != q)
                    .map(|(_, &x)| x)
                    .collect();
                *out.coeffs.entry(rest).or_insert(0.0) += sign * w * c;
            }
        }
    }
    Ok(out.pruned())
}

/// `𝓛_A ψ = (A_{(12)} + A_{(13)} + A_{(23)}) ψ` on three-forms.
pub fn cal_l(a: &Endomorphism, psi: &Form) -> Result<Form> {
    if psi.degree != 3 {
        return Err(Error::DegreeMismatch(psi.degree, 3));
    }
    if a.dim() != psi.dim {
        return Err(Error::DimensionMismatch(a.dim(), psi.dim));
    }
    let images = a.coframe_images();
    let sets = [vec![0, 1], vec![0, 2], vec![1, 2]];
    if psi.sparse_is_cheaper(&images, &sets) {
        return Ok(psi.replace_factors(&images, &sets));
    }
    let t = psi.to_tensor();
    let sum = &(&t.act_pair(a, 0, 1)? + &t.act_pair(a, 0, 2)?) + &t.act_pair(a, 1, 2)?;
    Ok(sum.increasing_part())
}

/// `𝓛 = 𝓛_I + 𝓛_J + 𝓛_K`.
pub fn cal_l_sum(triple: [&Endomorphism; 3], psi: &Form) -> Result<Form> {
    Ok(cal_l(triple[0], psi)? + cal_l(triple[1], psi)? + cal_l(triple[2], psi)?)
}

/// Splits a three-form into its `+3` and `−3` eigenparts under `𝓛`:
/// `ψ_H = (3ψ + 𝓛ψ)/6`, `ψ_{S³H} = (3ψ − 𝓛ψ)/6`.
pub fn project_h_s3h(triple: [&Endomorphism; 3], psi: &Form) -> Result<(Form, Form)> {
    let l = cal_l_sum(triple, psi)?;
    let h = (3.0 * psi + &l).scale(1.0 / 6.0);
    let s = (3.0 * psi - &l).scale(1.0 / 6.0);
    Ok((h, s))
}
