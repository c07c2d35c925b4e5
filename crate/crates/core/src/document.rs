//! TOML field-definition and report documents.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{ExtensionStep, FieldTower};
use crate::error::{Error, Result};
use crate::galois::{Automorphism, GaloisExtension, GaloisGroup, RamificationData};
use crate::kgmod::{FactorOverrides, KPoly};
use crate::linalg::Vector;
use crate::scalar::{BaseField, BaseKind, Scalar};
use crate::subfield::Subfield;
use crate::subspace::SVal;
use crate::vc::{Method, Verdict, Witness};

pub const SCHEMA_VERSION: u32 = 1;

const RESERVED: [&str; 3] = ["top", "base", "t"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub kind: BaseKind,
    pub p: u64,
}

/// A named subfield given by generators over the base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub label: String,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    /// Field the automorphisms must fix (default `base`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bottom: Option<String>,
    /// Images of the step generators, one list per automorphism.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hints: Vec<Vec<String>>,
}

impl GroupSpec {
    fn is_default(&self) -> bool {
        self == &GroupSpec::default()
    }
}

/// An explicit factorization of `X^n - 1`, lowest coefficient first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub n: usize,
    pub polys: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub top: String,
    pub bottom: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDefinitionDocument {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub base: BaseSpec,
    pub steps: Vec<ExtensionStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldSpec>,
    #[serde(default, skip_serializing_if = "GroupSpec::is_default")]
    pub group: GroupSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<FactorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<PairSpec>,
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Line of the first quoted occurrence of `needle`, for diagnostics.
fn locate(src: &str, needle: &str) -> String {
    src.find(&format!("\"{needle}\""))
        .or_else(|| src.find(needle))
        .map(|o| format!("line {}: ", line_col(src, o).0))
        .unwrap_or_default()
}

fn identifiers(expr: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut cur = String::new();
    for c in expr.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() || c == '_' {
            cur.push(c);
        } else if !cur.is_empty() {
            if !cur.chars().next().unwrap().is_ascii_digit() {
                out.insert(std::mem::take(&mut cur));
            }
            cur.clear();
        }
    }
    out
}

impl FieldDefinitionDocument {
    pub fn from_toml(src: &str) -> Result<Self> {
        let doc: FieldDefinitionDocument = toml::from_str(src).map_err(|e| {
            let at = e.span().map(|s| line_col(src, s.start));
            let msg = e.message().to_string();
            match at {
                Some((l, c)) => Error::Schema(format!("line {l}, column {c}: {msg}")),
                None => Error::Schema(msg),
            }
        })?;
        doc.validate(src)?;
        Ok(doc)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("definition documents serialize")
    }

    fn validate(&self, src: &str) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Schema(format!("{}unsupported schema {}", locate(src, "schema"), self.schema)));
        }
        let mut steps: BTreeSet<String> = BTreeSet::new();
        if self.base.kind == BaseKind::LaurentSeries {
            steps.insert("t".into());
        }
        let undeclared = |what: &str, name: &str| {
            Error::Schema(format!("{}undeclared label `{name}` in {what}", locate(src, name)))
        };
        for s in &self.steps {
            for c in &s.poly {
                if let Some(x) = identifiers(c).into_iter().find(|x| !steps.contains(x)) {
                    return Err(undeclared(&format!("step `{}`", s.label), &x));
                }
            }
            if RESERVED.contains(&s.label.as_str()) || !steps.insert(s.label.clone()) {
                return Err(Error::Schema(format!("{}duplicate or reserved label `{}`", locate(src, &s.label), s.label)));
            }
        }
        let mut fields: BTreeSet<String> = ["top", "base"].iter().map(|s| s.to_string()).collect();
        for f in &self.fields {
            for g in &f.generators {
                if let Some(x) = identifiers(g).into_iter().find(|x| !steps.contains(x)) {
                    return Err(undeclared(&format!("field `{}`", f.label), &x));
                }
            }
            if steps.contains(&f.label) || !fields.insert(f.label.clone()) {
                return Err(Error::Schema(format!("{}duplicate or reserved label `{}`", locate(src, &f.label), f.label)));
            }
        }
        if let Some(b) = &self.group.bottom {
            if !fields.contains(b) {
                return Err(undeclared("group", b));
            }
        }
        for h in &self.group.hints {
            if h.len() != self.steps.len() {
                return Err(Error::Schema(format!(
                    "automorphism hint has {} images for {} steps",
                    h.len(),
                    self.steps.len()
                )));
            }
            for img in h {
                if let Some(x) = identifiers(img).into_iter().find(|x| !steps.contains(x)) {
                    return Err(undeclared("automorphism hint", &x));
                }
            }
        }
        for p in &self.pairs {
            for l in [&p.top, &p.bottom] {
                if !fields.contains(l) {
                    return Err(undeclared("pair", l));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<BuiltDefinition> {
        let base = match self.base.kind {
            BaseKind::PAdic => BaseField::padic(self.base.p)?,
            BaseKind::LaurentSeries => BaseField::laurent(self.base.p)?,
        };
        let tower = Arc::new(FieldTower::build(base, &self.steps)?);
        let mut fields = BTreeMap::new();
        fields.insert("top".to_string(), Subfield::top(&tower));
        fields.insert("base".to_string(), Subfield::base(&tower));
        for f in &self.fields {
            let gens: Vec<Vector> =
                f.generators.iter().map(|g| tower.parse(g).map_err(|e| e.at(&f.label))).collect::<Result<_>>()?;
            fields.insert(f.label.clone(), Subfield::generated_by(&tower, &f.label, &gens).map_err(|e| e.at(&f.label))?);
        }
        let bottom = fields[self.group.bottom.as_deref().unwrap_or("base")].clone();
        let hints: Vec<Automorphism> = self
            .group
            .hints
            .iter()
            .map(|h| {
                let imgs: Vec<&str> = h.iter().map(|s| s.as_str()).collect();
                Automorphism::parse(&tower, &imgs)
            })
            .collect::<Result<_>>()?;
        let group = Arc::new(GaloisGroup::find(&tower, &bottom, &hints)?);
        let overrides: FactorOverrides = self
            .factors
            .iter()
            .map(|f| {
                let polys: Vec<KPoly> = f
                    .polys
                    .iter()
                    .map(|p| p.iter().map(|c| tower.parse(c)).collect::<Result<KPoly>>())
                    .collect::<Result<_>>()?;
                Ok((f.n, polys))
            })
            .collect::<Result<_>>()?;
        Ok(BuiltDefinition { doc: self.clone(), tower, fields, group, overrides })
    }
}

/// A definition document with its tower, named subfields and Galois group constructed.
#[derive(Clone, Debug)]
pub struct BuiltDefinition {
    pub doc: FieldDefinitionDocument,
    pub tower: Arc<FieldTower>,
    pub fields: BTreeMap<String, Subfield>,
    pub group: Arc<GaloisGroup>,
    pub overrides: FactorOverrides,
}

impl BuiltDefinition {
    pub fn field(&self, label: &str) -> Result<&Subfield> {
        self.fields.get(label).ok_or_else(|| Error::Schema(format!("undeclared field `{label}`")))
    }

    pub fn extension(&self, top: &str, bottom: &str) -> Result<GaloisExtension> {
        GaloisExtension::new(&self.group, self.field(top)?, self.field(bottom)?)
    }

    /// The declared pairs, or `top/base` when none are declared.
    pub fn pairs(&self) -> Vec<(String, String)> {
        if self.doc.pairs.is_empty() {
            let b = self.doc.group.bottom.clone().unwrap_or_else(|| "base".into());
            return vec![("top".into(), b)];
        }
        self.doc.pairs.iter().map(|p| (p.top.clone(), p.bottom.clone())).collect()
    }

    pub fn parse_element(&self, expr: &str) -> Result<Vector> {
        self.tower.parse(expr)
    }
}

/// An exact element as base coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementRecord {
    pub coords: Vec<String>,
    /// Coordinates are exact; no truncation took place.
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<bool>,
}

impl ElementRecord {
    pub fn new(x: &[Scalar]) -> Self {
        ElementRecord { coords: x.iter().map(|c| c.to_string()).collect(), exact: true, valuation: None, normal: None }
    }

    pub fn to_vector(&self, tower: &FieldTower) -> Result<Vector> {
        let scalars = FieldTower::base_only(tower.base().clone());
        if self.coords.len() != tower.degree() {
            return Err(Error::Schema(format!("element has {} coordinates, expected {}", self.coords.len(), tower.degree())));
        }
        self.coords.iter().map(|c| Ok(scalars.parse(c)?.remove(0))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SValRecord {
    pub spanning: Vec<ElementRecord>,
    pub dim: usize,
    pub s: SVal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_perp: Option<SVal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorRecord {
    pub n: usize,
    pub factors: Vec<String>,
    pub source: String,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodRecord {
    pub method: Method,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub top: String,
    pub bottom: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<RamificationData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<MethodRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ElementRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub svals: Vec<SValRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factorizations: Vec<FactorRecord>,
}

impl PairRecord {
    pub fn new(top: &str, bottom: &str) -> Self {
        PairRecord {
            top: top.into(),
            bottom: bottom.into(),
            invariants: None,
            verdict: None,
            method: None,
            methods: vec![],
            witness: None,
            svals: vec![],
            factorizations: vec![],
        }
    }

    pub fn set_witness(&mut self, w: &Witness) {
        let mut e = ElementRecord::new(&w.element);
        e.valuation = Some(w.valuation);
        e.normal = Some(false);
        self.witness = Some(e);
    }
}

/// An expected-versus-computed comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRecord {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub precision: u32,
    pub ceiling: u32,
    pub seed: u64,
    pub trials: usize,
    pub methods: Vec<Method>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub definition: Option<String>,
    pub settings: Settings,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<PairRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRecord>,
}

impl ReportDocument {
    pub fn new(command: &str, settings: Settings) -> Self {
        ReportDocument { schema: SCHEMA_VERSION, command: command.into(), definition: None, settings, pairs: vec![], checks: vec![] }
    }

    pub fn from_toml(src: &str) -> Result<Self> {
        let doc: ReportDocument = toml::from_str(src).map_err(|e| Error::Schema(e.message().to_string()))?;
        if doc.schema != SCHEMA_VERSION {
            return Err(Error::Schema(format!("unsupported schema {}", doc.schema)));
        }
        Ok(doc)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("reports serialize")
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    /// Re-derive every stored claim; returns the list of claims that fail.
    pub fn reverify(&self, def: &BuiltDefinition) -> Result<Vec<String>> {
        let mut bad = vec![];
        for p in &self.pairs {
            let ext = def.extension(&p.top, &p.bottom)?;
            let name = format!("{}/{}", p.top, p.bottom);
            if let Some(inv) = &p.invariants {
                if &ext.ramification()? != inv {
                    bad.push(format!("{name}: invariants"));
                }
            }
            if let Some(w) = &p.witness {
                let x = w.to_vector(&def.tower)?;
                let witness = Witness { element: x, valuation: w.valuation.unwrap_or(i64::MIN), module_s: None };
                if !crate::vc::verify_witness(&ext, &witness)? {
                    bad.push(format!("{name}: witness"));
                }
            }
            let pair = crate::subfield::FieldPair::new(ext.top().clone(), ext.bottom().clone())?;
            for s in &p.svals {
                let span: Vec<Vector> = s.spanning.iter().map(|e| e.to_vector(&def.tower)).collect::<Result<_>>()?;
                let v = crate::subspace::Subspace::new(&pair, &span)?;
                if v.dim() != s.dim || v.s_of_v()? != s.s {
                    bad.push(format!("{name}: s(V)"));
                }
                if let Some(sp) = &s.s_perp {
                    if &v.orthogonal().s_of_v()? != sp {
                        bad.push(format!("{name}: s(V⊥)"));
                    }
                }
            }
        }
        Ok(bad)
    }
}
