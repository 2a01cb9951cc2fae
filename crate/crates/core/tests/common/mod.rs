#![allow(dead_code)]

use nalgebra::DMatrix;
use qtorsion::corpus::{example, ExampleParams, EXAMPLES};
use qtorsion::AqhModel;
use rand::Rng;

/// Every corpus example, with the parameter values used by the golden
/// table.
pub fn corpus_models() -> Vec<(String, AqhModel)> {
    let mut out = Vec::new();
    for e in EXAMPLES {
        let params: Vec<ExampleParams> = match e.params {
            "m" => vec![ExampleParams { m: 1, ..Default::default() }, ExampleParams { m: 2, ..Default::default() }],
            "k" => [1.0, 0.5, 2.0].iter().map(|&k| ExampleParams { k, ..Default::default() }).collect(),
            "n" => vec![ExampleParams { n: 2, ..Default::default() }, ExampleParams { n: 3, ..Default::default() }],
            _ => vec![ExampleParams::default()],
        };
        for p in params {
            let label = format!("{} {:?}", e.name, p);
            out.push((label, example(e.name, p).unwrap()));
        }
    }
    out
}

/// Haar-ish random orthogonal matrix from the QR factorisation of a
/// Gaussian-like matrix.
pub fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    let signs = DMatrix::from_diagonal(&r.diagonal().map(|d| if d < 0.0 { -1.0 } else { 1.0 }));
    q * signs
}

/// A random element of SO(3).
pub fn random_rotation<R: Rng>(rng: &mut R) -> nalgebra::Matrix3<f64> {
    let mut q = random_orthogonal(3, rng);
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    nalgebra::Matrix3::from_fn(|i, j| q[(i, j)])
}
