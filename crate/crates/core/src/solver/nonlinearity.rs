//! Right-hand sides `f(x, s)` with their growth metadata and a JSON registry.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bounds1d::Growth1D;
use crate::error::{invalid, Error, Result};
use crate::grid::BoxDomain;

/// Growth constants: `f(x,s) >= λs - C1` and `f(x,s) <= C2 s^p + C3` for `s >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub lambda: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    pub p: f64,
}

/// Autonomous minorant `g` valid for `s >= K`, used by the 1D bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minorant {
    pub growth: String,
    #[serde(rename = "K")]
    pub k: f64,
}

/// Closed-form families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    /// `s^p`
    Power {
        p: f64,
    },
    /// `s^p + c`
    PowerPlusConst {
        p: f64,
        c: f64,
    },
    /// `s³ + 1`
    CubicPlusOne,
    /// `a s + b`
    Affine {
        a: f64,
        b: f64,
    },
    Custom,
}

type Pointwise = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Nonlinearity {
    id: String,
    form: Form,
    custom: Option<(Pointwise, Pointwise)>,
    metadata: Option<Metadata>,
    minorant: Option<Minorant>,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("id", &self.id)
            .field("form", &self.form)
            .field("metadata", &self.metadata)
            .field("minorant", &self.minorant)
            .finish()
    }
}

impl Nonlinearity {
    pub fn new(id: impl Into<String>, form: Form) -> Result<Self> {
        match form {
            Form::Power { p } | Form::PowerPlusConst { p, .. } if !(p > 0.0) => {
                return Err(invalid(format!("power needs p > 0, got {p}")));
            }
            Form::Custom => return Err(invalid("use Nonlinearity::custom for custom forms")),
            _ => {}
        }
        Ok(Self {
            id: id.into(),
            form,
            custom: None,
            metadata: None,
            minorant: None,
        })
    }

    /// `f` and `∂f/∂s` given as closures of `(x, s)`.
    pub fn custom(
        id: impl Into<String>,
        f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            form: Form::Custom,
            custom: Some((Arc::new(f), Arc::new(df))),
            metadata: None,
            minorant: None,
        }
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn with_minorant(mut self, minorant: Minorant) -> Self {
        self.minorant = Some(minorant);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn metadata(&self) -> Option<&Metadata> {
        self.metadata.as_ref()
    }

    pub fn minorant(&self) -> Option<&Minorant> {
        self.minorant.as_ref()
    }

    /// Growth exponent from the metadata, else from the closed form.
    pub fn growth_exponent(&self) -> Option<f64> {
        self.metadata.map(|m| m.p).or(match self.form {
            Form::Power { p } | Form::PowerPlusConst { p, .. } => Some(p),
            Form::CubicPlusOne => Some(3.0),
            Form::Affine { .. } => Some(1.0),
            Form::Custom => None,
        })
    }

    /// The 1D minorant as a validated growth function.
    pub fn growth_1d(&self) -> Option<Result<Growth1D>> {
        self.minorant
            .as_ref()
            .map(|m| Growth1D::by_name(&m.growth, m.k))
    }

    pub fn evaluate(&self, x: &[f64], s: f64) -> f64 {
        match self.form {
            Form::Power { p } => s.powf(p),
            Form::PowerPlusConst { p, c } => s.powf(p) + c,
            Form::CubicPlusOne => s * s * s + 1.0,
            Form::Affine { a, b } => a * s + b,
            Form::Custom => (self.custom.as_ref().expect("custom closures").0)(x, s),
        }
    }

    /// `∂f/∂s`
    pub fn derivative(&self, x: &[f64], s: f64) -> f64 {
        match self.form {
            Form::Power { p } | Form::PowerPlusConst { p, .. } => {
                if s == 0.0 {
                    if p > 1.0 {
                        0.0
                    } else if p == 1.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    p * s.powf(p - 1.0)
                }
            }
            Form::CubicPlusOne => 3.0 * s * s,
            Form::Affine { a, .. } => a,
            Form::Custom => (self.custom.as_ref().expect("custom closures").1)(x, s),
        }
    }

    /// `f(·, s₊)` for the scalar case, ignoring `x`.
    pub fn scalar(&self, s: f64) -> f64 {
        self.evaluate(&[], s)
    }

    /// Spot-checks both growth inequalities on `x` samples of the domain and
    /// `s ∈ [0, 1e3]`.
    pub fn validate_metadata(&self, domain: &BoxDomain) -> Result<()> {
        let m = self
            .metadata
            .ok_or_else(|| invalid(format!("nonlinearity {} has no metadata", self.id)))?;
        let n = domain.dim();
        let xs: Vec<Vec<f64>> = (0..=4)
            .map(|j| {
                (0..n)
                    .map(|i| domain.lower()[i] + j as f64 / 4.0 * domain.width(i))
                    .collect()
            })
            .collect();
        for x in &xs {
            for i in 0..=2000 {
                let s = if i <= 1000 {
                    i as f64 * 1e-3
                } else {
                    (i - 1000) as f64
                };
                let v = self.evaluate(x, s);
                let (lo, hi) = (m.lambda * s - m.c1, m.c2 * s.powf(m.p) + m.c3);
                let tol = 1e-12 * (v.abs() + lo.abs() + hi.abs());
                if v < lo - tol {
                    return Err(Error::HypothesisViolated(format!(
                        "{}: f({s}) = {v} < λs - C1 = {lo}",
                        self.id
                    )));
                }
                if v > hi + tol {
                    return Err(Error::HypothesisViolated(format!(
                        "{}: f({s}) = {v} > C2 s^p + C3 = {hi}",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `sup_{s >= 0} (λs - f(s))₊` for an `x`-independent superlinear `f`, by a
/// dense scan on a doubling range plus golden-section refinement.
pub fn c1_by_scan(f: impl Fn(f64) -> f64 + Sync, lambda: f64) -> Result<f64> {
    let gap = |s: f64| lambda * s - f(s);
    let mut top = 1.0;
    loop {
        let (arg, val) = crate::bounds1d::scan_max(gap, 0.0, top);
        // accept once the maximiser sits well inside and the gap is negative at the end
        if arg < 0.9 * top && gap(top) < 0.0 && gap(2.0 * top) < gap(top) {
            return Ok(val.max(0.0));
        }
        top *= 2.0;
        if top > crate::bounds1d::SEARCH_CAP {
            return Err(Error::NotConverged {
                what: "C1 scan".into(),
                iterations: 0,
            });
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Entry {
    id: String,
    form: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    metadata: Option<Metadata>,
    #[serde(default)]
    minorant: Option<Minorant>,
}

fn param(e: &Entry, key: &str) -> Result<f64> {
    e.params
        .get(key)
        .copied()
        .ok_or_else(|| invalid(format!("{}: missing parameter {key}", e.id)))
}

/// Reads a JSON array of `{"id", "form", "params", "metadata"}` entries.
pub fn load_registry(reader: impl Read) -> Result<Vec<Nonlinearity>> {
    let entries: Vec<Entry> = serde_json::from_reader(reader)?;
    entries
        .into_iter()
        .map(|e| {
            let form = match e.form.as_str() {
                "power" => Form::Power { p: param(&e, "p")? },
                "power_plus_const" => Form::PowerPlusConst {
                    p: param(&e, "p")?,
                    c: param(&e, "c")?,
                },
                "cubic_plus_one" => Form::CubicPlusOne,
                "affine" => Form::Affine {
                    a: param(&e, "a")?,
                    b: param(&e, "b")?,
                },
                other => return Err(invalid(format!("{}: unknown form {other}", e.id))),
            };
            let mut nl = Nonlinearity::new(e.id, form)?;
            nl.metadata = e.metadata;
            nl.minorant = e.minorant;
            Ok(nl)
        })
        .collect()
}

pub fn find<'a>(registry: &'a [Nonlinearity], id: &str) -> Result<&'a Nonlinearity> {
    registry
        .iter()
        .find(|n| n.id == id)
        .ok_or_else(|| invalid(format!("no nonlinearity with id {id}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn c1_for_power_plus_one() {
        let lambda = 4.0 * PI * PI;
        let c1 = c1_by_scan(|s| s.powf(1.5) + 1.0, lambda).unwrap();
        // maximiser s = (λ/1.5)²
        let s = (lambda / 1.5).powi(2);
        let exact = lambda * s - s.powf(1.5) - 1.0;
        assert!((c1 - exact).abs() < 1e-9 * exact, "{c1} vs {exact}");
        assert!((c1 - 9115.0).abs() < 5.0);
        assert_eq!(c1_by_scan(|s| s * s + 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn metadata_validation() {
        let sq = BoxDomain::unit(2).unwrap();
        let lambda = 2.0 * sq.first_eigenvalue();
        let c1 = c1_by_scan(|s| s.powf(1.5) + 1.0, lambda).unwrap();
        let f = Nonlinearity::new("p15", Form::PowerPlusConst { p: 1.5, c: 1.0 })
            .unwrap()
            .with_metadata(Metadata {
                lambda,
                c1,
                c2: 1.0,
                c3: 1.0,
                p: 1.5,
            });
        f.validate_metadata(&sq).unwrap();
        let bad = f.clone().with_metadata(Metadata {
            lambda,
            c1: 0.5 * c1,
            c2: 1.0,
            c3: 1.0,
            p: 1.5,
        });
        assert!(bad.validate_metadata(&sq).is_err());
        let bad = f.with_metadata(Metadata {
            lambda,
            c1,
            c2: 1.0,
            c3: 0.5,
            p: 1.5,
        });
        assert!(bad.validate_metadata(&sq).is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let forms = [
            Form::Power { p: 1.5 },
            Form::PowerPlusConst { p: 3.0, c: 2.0 },
            Form::CubicPlusOne,
            Form::Affine { a: -2.0, b: 1.0 },
        ];
        for form in forms {
            let f = Nonlinearity::new("f", form).unwrap();
            for s in [0.3, 1.0, 2.7] {
                let fd = (f.scalar(s + 1e-6) - f.scalar(s - 1e-6)) / 2e-6;
                assert!((fd - f.derivative(&[], s)).abs() < 1e-6 * (1.0 + fd.abs()));
            }
        }
        assert_eq!(
            Nonlinearity::new("f", Form::Power { p: 1.5 })
                .unwrap()
                .derivative(&[], 0.0),
            0.0
        );
    }

    #[test]
    fn registry_roundtrip() {
        let json = r#"[
            {"id": "cubic", "form": "cubic_plus_one", "params": {},
             "metadata": {"lambda": 1.0, "C1": 1.0, "C2": 2.0, "C3": 2.0, "p": 3.0},
             "minorant": {"growth": "cubic_plus_one", "K": 1.0}},
            {"id": "lin", "form": "affine", "params": {"a": 2.0, "b": 1.0}, "metadata": null}
        ]"#;
        let reg = load_registry(json.as_bytes()).unwrap();
        assert_eq!(reg.len(), 2);
        let c = find(&reg, "cubic").unwrap();
        assert_eq!(c.scalar(2.0), 9.0);
        assert!(c.growth_1d().unwrap().is_ok());
        assert_eq!(find(&reg, "lin").unwrap().scalar(3.0), 7.0);
        assert!(find(&reg, "none").is_err());
        assert!(
            load_registry(r#"[{"id": "x", "form": "power", "params": {}}]"#.as_bytes()).is_err()
        );
        assert!(
            load_registry(r#"[{"id": "x", "form": "sine", "params": {}}]"#.as_bytes()).is_err()
        );
    }
}
