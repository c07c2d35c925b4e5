//! Deciders for the valuation criterion `VC(L/K)`: every element of valuation
//! `≡ -d_{L/K} - 1 (mod [L:K])` generates a normal basis.

mod decide;
mod sample;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{residue_digits, GaloisExtension, RamificationData};
use crate::linalg::{is_zero_vec, Matrix, Vector};
use crate::subspace::{SVal, Subspace};

pub use decide::{
    decide, probe_top_monotonicity, vc_decide_abelian, vc_decide_kummer, vc_decide_structural, vc_precheck, Decision,
    DecideOptions, KummerData, KummerGenerator, Precheck, ProbeOutcome,
};
pub use sample::{monte_carlo_vc, ClassSampler, random_element_of_class, MonteCarloOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Prop1Precheck,
    Structural,
    Kummer,
    Abelian,
    MonteCarlo,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undecided => "undecided",
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Prop1Precheck => "prop1-precheck",
            Method::Structural => "structural",
            Method::Kummer => "kummer",
            Method::Abelian => "abelian",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "precheck" | "prop1-precheck" => Method::Prop1Precheck,
            "structural" => Method::Structural,
            "kummer" => Method::Kummer,
            "abelian" => Method::Abelian,
            "monte-carlo" | "mc" => Method::MonteCarlo,
            _ => return Err(Error::Invalid(format!("unknown method `{s}`"))),
        })
    }
}

/// An element of valuation class `d̄` that is not normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub element: Vector,
    pub valuation: i64,
    /// `s(V)` of the unit-free module the witness was extracted from, if any.
    pub module_s: Option<SVal>,
}

#[derive(Clone, Debug)]
pub struct VCReport {
    pub pair: (String, String),
    pub verdict: Verdict,
    pub method: Method,
    pub invariants: Option<RamificationData>,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl VCReport {
    pub(crate) fn new(ext: &GaloisExtension, method: Method, verdict: Verdict) -> Self {
        VCReport {
            pair: (ext.top().label().to_string(), ext.bottom().label().to_string()),
            verdict,
            method,
            invariants: ext.ramification().ok(),
            witness: None,
            notes: vec![],
        }
    }

    pub(crate) fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

/// Whether the conjugates of `x` span `L` over `K`.
pub fn is_normal(ext: &GaloisExtension, x: &[crate::Scalar]) -> bool {
    if is_zero_vec(x) {
        return false;
    }
    let t = ext.tower();
    let mut rows = vec![];
    for i in 0..ext.degree() {
        let y = ext.apply(i, x);
        for k in ext.bottom().basis() {
            rows.push(t.mul(k, &y));
        }
    }
    Matrix::new(rows, t.degree()).rank() == ext.top().degree()
}

/// Every element of valuation `d` has nonzero trace.
pub fn trace_criterion(ext: &GaloisExtension, d: i64) -> Result<bool> {
    if !ext.is_totally_ramified() {
        return Ok(false);
    }
    let r = ext.ramification()?;
    Ok((d - r.dbar).rem_euclid(r.n as i64) == 0)
}

/// `z` of valuation `> d` whose trace has the least valuation, with that trace.
pub(crate) fn trace_pivot(ext: &GaloisExtension, d: i64) -> Result<Option<(Vector, Vector, i64)>> {
    let t = ext.tower();
    let pi = ext.top().uniformizer();
    let omegas = ext.residue_basis();
    let mut best: Option<(Vector, Vector, i64)> = None;
    for j in 0..ext.e() as i64 {
        for w in &omegas {
            let z = t.mul(w, &t.pow(pi, d + 1 + j).unwrap());
            let tr = ext.relative_trace(&z)?;
            if let Some(v) = ext.bottom().valuation(&tr) {
                if best.as_ref().is_none_or(|b| v < b.2) {
                    best = Some((z, tr, v));
                }
            }
        }
    }
    Ok(best)
}

/// `x - (Tr x / Tr z)·z`, or `None` when this would raise the valuation of `x`.
pub(crate) fn project_trace_zero(ext: &GaloisExtension, x: &[crate::Scalar], pivot: &(Vector, Vector, i64)) -> Result<Option<Vector>> {
    let t = ext.tower();
    let (z, trz, vz) = pivot;
    let tx = ext.relative_trace(x)?;
    if ext.bottom().valuation(&tx).is_some_and(|v| v < *vz) {
        return Ok(None);
    }
    let y = t.sub(x, &t.mul(&t.mul(&tx, &t.inv(trz).unwrap()), z));
    Ok((ext.top().valuation(&y) == ext.top().valuation(x)).then_some(y))
}

/// An element of valuation exactly `d` and trace zero, when one exists.
pub fn zero_trace_element(ext: &GaloisExtension, d: i64) -> Result<Option<Vector>> {
    if trace_criterion(ext, d)? {
        return Ok(None);
    }
    let t = ext.tower();
    let Some(pivot) = trace_pivot(ext, d)? else { return Ok(None) };
    let pd = t.pow(ext.top().uniformizer(), d).unwrap();
    for dg in residue_digits(ext.top())?.iter().filter(|g| !is_zero_vec(g)) {
        if let Some(y) = project_trace_zero(ext, &t.mul(dg, &pd), &pivot)? {
            debug_assert!(is_zero_vec(&ext.relative_trace(&y)?));
            return Ok(Some(y));
        }
    }
    Ok(None)
}

/// A non-normal element of class `d̄` inside `V⊥` for a module `V` with `0 ∉ s(V)`.
pub fn witness_from_module(ext: &GaloisExtension, v: &Subspace) -> Result<Option<Witness>> {
    let dbar = ext.ramification()?.dbar;
    let s_v = v.s_of_v()?;
    if s_v.contains(0) {
        return Ok(None);
    }
    let perp = v.orthogonal();
    let n = ext.degree() as i64;
    for (x, val) in perp.valuation_echelon()? {
        if (val - dbar).rem_euclid(n) == 0 && !is_normal(ext, x) {
            return Ok(Some(Witness { element: x.clone(), valuation: *val, module_s: Some(s_v) }));
        }
    }
    Ok(None)
}

/// A power of a uniformizer of a proper intermediate field with class `d̄`.
pub fn witness_from_subfield(ext: &GaloisExtension) -> Result<Option<Witness>> {
    let r = ext.ramification()?;
    let g = ext.group();
    let l = ext.top();
    for h in g.subgroups() {
        if h & ext.h_top() != ext.h_top() || h & !ext.h_bottom() != 0 || h == ext.h_top() {
            continue;
        }
        let Ok(e) = ext.intermediate(h, "E") else { continue };
        let rel = (l.e() / e.e()) as i64;
        if r.dbar % rel != 0 {
            continue;
        }
        let t = ext.tower();
        let x = t.pow(e.uniformizer(), r.dbar / rel).unwrap();
        if !is_normal(ext, &x) {
            let valuation = l.valuation(&x).unwrap();
            return Ok(Some(Witness { element: x, valuation, module_s: None }));
        }
    }
    Ok(None)
}

/// Independent re-check of a fails-verdict witness.
pub fn verify_witness(ext: &GaloisExtension, w: &Witness) -> Result<bool> {
    let r = ext.ramification()?;
    let v = ext.top().valuation(&w.element);
    Ok(v == Some(w.valuation) && (w.valuation - r.dbar).rem_euclid(r.e as i64) == 0 && !is_normal(ext, &w.element))
}
