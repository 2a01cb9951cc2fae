//! Input model documents and output report documents.

use std::collections::{BTreeMap, HashSet};

use nalgebra::DMatrix;
use qtorsion::classify::{classify_gh_all, hkt_check, qkt_check, Check};
use qtorsion::corpus::format_form;
use qtorsion::liealg::Bracket;
use qtorsion::{AqhModel, Endomorphism, Form, HypercomplexTriple, LieAlgebraModel, Quat, TorsionReport};
use serde::{Deserialize, Serialize};

/// `"standard"` or explicit `I` and `J` (rows of the matrix whose column
/// `j` is `A e_j`); `K = IJ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TripleSpec {
    Named(String),
    Explicit {
        #[serde(rename = "I")]
        i: Vec<Vec<f64>>,
        #[serde(rename = "J")]
        j: Vec<Vec<f64>>,
    },
}

/// A model as read from disk. Brackets are `[i, j, k, c]` with
/// `[e_i, e_j] = c e_k`, one-based and `i < j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub dimension: usize,
    pub names: Vec<String>,
    pub brackets: Vec<(usize, usize, usize, f64)>,
    pub triple: TripleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

fn matrix(rows: &[Vec<f64>], dim: usize, what: &str) -> Result<Endomorphism, String> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(format!("triple.{what}: expected a {dim}×{dim} matrix"));
    }
    Endomorphism::new(DMatrix::from_fn(dim, dim, |r, c| rows[r][c])).map_err(|e| format!("triple.{what}: {e}"))
}

impl ModelDocument {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }

    /// Validates and builds the model; errors carry the offending field.
    pub fn build(&self) -> Result<AqhModel, String> {
        let dim = self.dimension;
        if self.names.len() != dim {
            return Err(format!("names: {} entries for dimension {dim}", self.names.len()));
        }
        let mut seen = HashSet::new();
        for (i, n) in self.names.iter().enumerate() {
            if n.is_empty() || !seen.insert(n) {
                return Err(format!("names[{i}]: empty or repeated name `{n}`"));
            }
        }
        let mut brackets = Vec::with_capacity(self.brackets.len());
        for (pos, &(i, j, k, c)) in self.brackets.iter().enumerate() {
            if i == 0 || j == 0 || k == 0 || i > dim || j > dim || k > dim {
                return Err(format!("brackets[{pos}]: indices are one-based and at most {dim}"));
            }
            if i >= j {
                return Err(format!("brackets[{pos}]: need i < j, got [{i}, {j}]"));
            }
            if !c.is_finite() {
                return Err(format!("brackets[{pos}]: coefficient is not finite"));
            }
            brackets.push(Bracket { i: i - 1, j: j - 1, k: k - 1, c });
        }
        let algebra = LieAlgebraModel::new(self.names.clone(), brackets).map_err(|e| format!("brackets: {e}"))?;
        let triple = match &self.triple {
            TripleSpec::Named(s) if s == "standard" => {
                HypercomplexTriple::standard(dim).map_err(|e| format!("dimension: {e}"))?
            }
            TripleSpec::Named(s) => return Err(format!("triple: unknown triple `{s}`")),
            TripleSpec::Explicit { i, j } => {
                HypercomplexTriple::new(matrix(i, dim, "I")?, matrix(j, dim, "J")?).map_err(|e| format!("triple: {e}"))?
            }
        };
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err("tolerance: must be positive".into());
            }
        }
        AqhModel::new(algebra, triple).map_err(|e| format!("model: {e}"))
    }

    pub fn from_model(model: &AqhModel, tolerance: Option<f64>) -> Self {
        let dim = model.dim();
        let triple = match HypercomplexTriple::standard(dim) {
            Ok(s) if Quat::ALL.iter().all(|&a| s.get(a).max_diff(model.endo(a)) == 0.0) => {
                TripleSpec::Named("standard".into())
            }
            _ => {
                let rows = |a: Quat| {
                    let m = model.endo(a).matrix();
                    (0..dim).map(|r| (0..dim).map(|c| m[(r, c)]).collect()).collect()
                };
                TripleSpec::Explicit { i: rows(Quat::I), j: rows(Quat::J) }
            }
        };
        ModelDocument {
            dimension: dim,
            names: model.algebra().names().to_vec(),
            brackets: model.algebra().brackets().iter().map(|b| (b.i + 1, b.j + 1, b.k + 1, b.c)).collect(),
            triple,
            tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

impl From<&Check> for CheckLine {
    fn from(c: &Check) -> Self {
        CheckLine { name: c.name.clone(), residual: c.residual, passed: c.passed }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GhLine {
    pub structure: String,
    pub label: String,
    pub strict: bool,
    /// Sizes of the `W_1..W_4` parts.
    pub norms: [f64; 4],
    pub lee_form: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HktBlock {
    pub is_hkt: bool,
    pub defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QktBlock {
    pub is_qkt: bool,
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    pub checks: Vec<CheckLine>,
}

/// Everything `analyze` prints.
#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub dimension: usize,
    pub n: usize,
    pub unimodular: bool,
    pub warnings: Vec<String>,
    pub tolerance: f64,
    pub scale: f64,
    pub label: String,
    pub flags: BTreeMap<String, bool>,
    pub norms: BTreeMap<String, f64>,
    /// Name → rendered form; per-structure quantities use `name[A]`.
    pub forms: BTreeMap<String, String>,
    pub gray_hervella: Vec<GhLine>,
    pub hkt: HktBlock,
    pub qkt: QktBlock,
}

fn put3(forms: &mut BTreeMap<String, String>, key: &str, f: &[Form; 3], names: &[String]) {
    for a in Quat::ALL {
        forms.insert(format!("{key}[{}]", a.name()), format_form(&f[a.index()], names));
    }
}

impl ReportDocument {
    pub fn new(model: &AqhModel, report: &TorsionReport) -> Self {
        let tol = report.tol;
        let names = model.algebra().names();
        let mut forms = BTreeMap::new();
        put3(&mut forms, "dw", model.dws(), names);
        put3(&mut forms, "beta", &report.beta, names);
        put3(&mut forms, "a_lambda", &report.a_lambda, names);
        put3(&mut forms, "lambda", &report.lambda, names);
        put3(&mut forms, "theta_a", &report.theta_a, names);
        put3(&mut forms, "psi3_a", &report.psi3_a, names);
        put3(&mut forms, "psik_a", &report.psi_k_a, names);
        let dec = |f: &dyn Fn(&qtorsion::BetaDecomposition) -> Form| Quat::ALL.map(|a| f(report.decomposition(a)));
        put3(&mut forms, "nu3", &dec(&|d| d.nu3.clone()), names);
        put3(&mut forms, "nu4", &dec(&|d| d.nu4.clone()), names);
        put3(&mut forms, "beta3", &dec(&|d| d.beta3.clone()), names);
        put3(&mut forms, "beta_k", &dec(&|d| d.beta_k.clone()), names);
        put3(&mut forms, "beta_e", &dec(&|d| &d.beta_e3 + &d.beta4), names);
        put3(&mut forms, "lee", &Quat::ALL.map(|a| model.lee_form(a)), names);
        forms.insert("theta".into(), format_form(&report.theta, names));
        forms.insert("psi3".into(), format_form(&report.psi3, names));
        forms.insert("psik".into(), format_form(&report.psi_k, names));

        let flags = qtorsion::torsion::COMPONENT_KEYS
            .iter()
            .zip(report.flags.as_array())
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let norms = qtorsion::torsion::COMPONENT_KEYS
            .iter()
            .zip(report.norms.as_array())
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let gray_hervella = classify_gh_all(model, tol)
            .iter()
            .map(|g| GhLine {
                structure: g.structure.name().into(),
                label: g.label.clone(),
                strict: g.strict(),
                norms: g.norms,
                lee_form: format_form(&g.lee_form, names),
            })
            .collect();
        let h = hkt_check(model, tol);
        let q = qkt_check(model, report, tol);
        let unimodular = model.algebra().is_unimodular();
        let mut warnings = Vec::new();
        if !unimodular {
            warnings.push("algebra is not unimodular: d* of invariant forms differs from the compact-quotient codifferential".into());
        }
        ReportDocument {
            dimension: model.dim(),
            n: model.n(),
            unimodular,
            warnings,
            tolerance: tol,
            scale: report.scale,
            label: report.label(),
            flags,
            norms,
            forms,
            gray_hervella,
            hkt: HktBlock {
                is_hkt: h.is_hkt,
                defect: h.defect,
                torsion: h.torsion.as_ref().map(|t| format_form(t, names)),
            },
            qkt: QktBlock {
                is_qkt: q.is_qkt,
                violations: q.violations.iter().map(|s| s.to_string()).collect(),
                torsion: q.is_qkt.then(|| format_form(&q.torsion, names)),
                t: q.is_qkt.then(|| format_form(&q.t, names)),
                checks: if q.is_qkt { q.checks.iter().map(CheckLine::from).collect() } else { Vec::new() },
            },
        }
    }

    /// Plain-text rendering; every number is the one stored in the JSON.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut line = |t: String| {
            s.push_str(&t);
            s.push('\n');
        };
        line(format!("dimension {} (n = {}){}", self.dimension, self.n, if self.unimodular { ", unimodular" } else { "" }));
        for w in &self.warnings {
            line(format!("warning: {w}"));
        }
        line(format!("tolerance {:e}, scale {}", self.tolerance, self.scale));
        line(format!("intrinsic torsion: {}", self.label));
        for (k, v) in &self.flags {
            line(format!("  {k:<4} {} (norm {})", if *v { "nonzero" } else { "zero   " }, self.norms[k]));
        }
        for g in &self.gray_hervella {
            line(format!(
                "Gray–Hervella {}: {}{} (norms {:?}, Lee form {})",
                g.structure,
                g.label,
                if g.strict { ", strict" } else { "" },
                g.norms,
                g.lee_form
            ));
        }
        line(format!("HKT: {} (defect {})", if self.hkt.is_hkt { "yes" } else { "no" }, self.hkt.defect));
        if let Some(t) = &self.hkt.torsion {
            line(format!("  torsion {t}"));
        }
        if self.qkt.is_qkt {
            line("QKT: yes".into());
            if let (Some(t), Some(tt)) = (&self.qkt.t, &self.qkt.torsion) {
                line(format!("  t = {t}"));
                line(format!("  T = {tt}"));
            }
            for c in &self.qkt.checks {
                line(format!("  {} {} (residual {})", if c.passed { "ok  " } else { "FAIL" }, c.name, c.residual));
            }
        } else {
            line(format!("QKT: no ({})", self.qkt.violations.join(", ")));
        }
        line("forms:".into());
        for (k, v) in &self.forms {
            line(format!("  {k} = {v}"));
        }
        s
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "dimension": 8,
        "names": ["a1","a2","a3","a4","a5","a6","a7","a8"],
        "brackets": [[3,4,2,2.0],[2,4,3,-2.0],[2,3,4,2.0]],
        "triple": "standard"
    }"#;

    #[test]
    fn round_trip() {
        let d = ModelDocument::parse(SAMPLE).unwrap();
        let m = d.build().unwrap();
        let again = ModelDocument::from_model(&m, None);
        let text = again.to_json();
        let back = ModelDocument::parse(&text).unwrap();
        assert_eq!(back, again);
        assert_eq!(ModelDocument::parse(&back.to_json()).unwrap(), back);
        assert_eq!(back.build().unwrap().algebra().structure_tensor(), m.algebra().structure_tensor());
    }

    #[test]
    fn explicit_triple_round_trip() {
        let std = HypercomplexTriple::standard(8).unwrap();
        let rows = |a: Quat| {
            let m = std.get(a).matrix();
            (0..8).map(|r| (0..8).map(|c| m[(r, c)]).collect()).collect()
        };
        let mut d = ModelDocument::parse(SAMPLE).unwrap();
        // Swapping I and J gives a valid triple with K replaced by −K.
        d.triple = TripleSpec::Explicit { i: rows(Quat::J), j: rows(Quat::I) };
        let m = d.build().unwrap();
        assert!(m.endo(Quat::K).max_diff(&-std.get(Quat::K)) < 1e-15);
        let e = ModelDocument::from_model(&m, Some(1e-8));
        assert!(matches!(e.triple, TripleSpec::Explicit { .. }));
        assert_eq!(ModelDocument::parse(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn validation_names_the_field() {
        let bad_jacobi = SAMPLE.replace("[[3,4,2,2.0],[2,4,3,-2.0],[2,3,4,2.0]]", "[[1,2,3,1.0],[3,4,1,1.0]]");
        assert!(ModelDocument::parse(&bad_jacobi).unwrap().build().unwrap_err().starts_with("brackets"));
        let bad_order = SAMPLE.replace("[3,4,2,2.0]", "[4,3,2,2.0]");
        assert!(ModelDocument::parse(&bad_order).unwrap().build().unwrap_err().contains("i < j"));
        let bad_names = SAMPLE.replace("\"a8\"", "\"a7\"");
        assert!(ModelDocument::parse(&bad_names).unwrap().build().unwrap_err().starts_with("names[7]"));
        let bad_triple = SAMPLE.replace("\"standard\"", "\"fancy\"");
        assert!(ModelDocument::parse(&bad_triple).unwrap().build().unwrap_err().starts_with("triple"));
        assert!(ModelDocument::parse("{\"dimension\": 8,").unwrap_err().starts_with("line"));
        let small = SAMPLE.replace("\"dimension\": 8", "\"dimension\": 4").replace(",\"a5\",\"a6\",\"a7\",\"a8\"", "");
        assert!(ModelDocument::parse(&small).unwrap().build().is_err());
    }

    #[test]
    fn report_renderings_share_numbers() {
        let m = ModelDocument::parse(SAMPLE).unwrap().build().unwrap();
        let r = TorsionReport::from_model(&m, 1e-9);
        let doc = ReportDocument::new(&m, &r);
        let text = doc.render();
        let json = serde_json::to_value(&doc).unwrap();
        for (k, v) in json["forms"].as_object().unwrap() {
            assert!(text.contains(&format!("{k} = {}", v.as_str().unwrap())));
        }
        assert_eq!(json["label"], "(K+E)H");
        assert!(text.contains("intrinsic torsion: (K+E)H"));
        assert_eq!(json["hkt"]["is_hkt"], true);
    }
}
