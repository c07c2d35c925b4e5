use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    monte_carlo_vc, witness_from_module, witness_from_subfield, zero_trace_element, Method, MonteCarloOutcome,
    VCReport, Verdict,
};
use crate::error::{Error, Result};
use crate::galois::{primitive_root_of_unity, roots_of_unity_count, GaloisExtension, GaloisGroup, SubgroupMask};
use crate::kgmod::{cyclotomic_kernel_modules, eigenspace, minimal_submodules, FactorOverrides, MinimalSubmodule};
use crate::linalg::Vector;
use crate::scalar::BaseKind;
use crate::subfield::{FieldPair, Subfield};
use crate::subspace::Subspace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Precheck {
    Continue,
    FailFast(String),
}

fn is_power_of(n: usize, p: usize) -> bool {
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// Necessary conditions from the trace criterion.
pub fn vc_precheck(ext: &GaloisExtension) -> Result<Precheck> {
    let p = ext.tower().base().p() as usize;
    if !ext.is_totally_ramified() {
        return Ok(Precheck::FailFast("not totally ramified".into()));
    }
    if !is_power_of(ext.degree(), p) {
        return Ok(Precheck::FailFast(format!("degree {} has a tame part", ext.degree())));
    }
    let d = ext.different_valuation()?;
    if ext.degree() > 1 && (-d - 1).rem_euclid(p as i64) == 0 {
        return Ok(Precheck::FailFast(format!("p divides -d-1 = {}", -d - 1)));
    }
    Ok(Precheck::Continue)
}

fn failure_report(ext: &GaloisExtension, method: Method, reason: &str) -> Result<VCReport> {
    let mut rep = VCReport::new(ext, method, Verdict::Fails).note(reason.to_string());
    let r = ext.ramification()?;
    if let Some(x) = zero_trace_element(ext, r.dbar)? {
        let valuation = ext.top().valuation(&x).unwrap();
        rep.witness = Some(super::Witness { element: x, valuation, module_s: None });
        rep.notes.push("witness has trace zero".into());
    } else if let Some(w) = witness_from_subfield(ext)? {
        rep.witness = Some(w);
        rep.notes.push("witness lies in a proper intermediate field".into());
    } else {
        rep.notes.push("no witness constructed".into());
    }
    Ok(rep)
}

fn precheck_report(ext: &GaloisExtension) -> Result<VCReport> {
    match vc_precheck(ext)? {
        Precheck::Continue => Ok(VCReport::new(ext, Method::Prop1Precheck, Verdict::Undecided).note("continue")),
        Precheck::FailFast(why) => failure_report(ext, Method::Prop1Precheck, &why),
    }
}

/// Prop. 2: every minimal nonzero `K[G]`-submodule contains an element of valuation 0.
pub fn vc_decide_structural(ext: &GaloisExtension, overrides: &FactorOverrides) -> Result<VCReport> {
    Ok(structural_with_modules(ext, overrides)?.0)
}

fn structural_with_modules(
    ext: &GaloisExtension,
    overrides: &FactorOverrides,
) -> Result<(VCReport, Vec<MinimalSubmodule>)> {
    let p = ext.tower().base().p() as usize;
    if !ext.is_totally_ramified() || !is_power_of(ext.degree(), p) {
        return Ok((failure_report(ext, Method::Structural, "condition (1) fails")?, vec![]));
    }
    let mods = minimal_submodules(ext, overrides)?;
    let mut rep = VCReport::new(ext, Method::Structural, Verdict::Holds);
    for m in &mods {
        let s = m.module.s_of_v()?;
        rep.notes.push(format!("module in {} of dim {}: s(V) = {}", m.field, m.module.dim(), s));
        if !s.contains(0) && rep.verdict == Verdict::Holds {
            rep.verdict = Verdict::Fails;
            rep.witness = witness_from_module(ext, &m.module)?;
            if rep.witness.is_none() {
                rep.notes.push("unit-free module found but no witness in its complement".into());
            }
        }
    }
    Ok((rep, mods))
}

/// A Kummer generator `w = α^m` with `σ(α) = ζ α`.
#[derive(Clone, Debug)]
pub struct KummerGenerator {
    pub root: Vector,
    pub w: Vector,
    pub valuation: i64,
}

#[derive(Clone, Debug)]
pub struct KummerData {
    pub m: usize,
    pub generators: Vec<KummerGenerator>,
    pub unit_root: bool,
}

/// Generators of `Gal(L/K)` with orders whose product is `[L:K]`.
fn quotient_presentation(ext: &GaloisExtension) -> Vec<(usize, usize)> {
    let n = ext.degree();
    let tbl = ext.table();
    let generated = |gens: &[usize]| -> Vec<bool> {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut list = vec![0];
        let mut k = 0;
        while k < list.len() {
            let x = list[k];
            k += 1;
            for &g in gens {
                let y = tbl[g][x];
                if !seen[y] {
                    seen[y] = true;
                    list.push(y);
                }
            }
        }
        seen
    };
    let mut out: Vec<(usize, usize)> = vec![];
    let mut cur = generated(&[]);
    while cur.iter().any(|b| !b) {
        let best = (0..n)
            .filter(|&g| {
                let c = generated(&[g]);
                (0..n).all(|i| !(c[i] && cur[i]) || i == 0)
            })
            .max_by_key(|&g| ext.element_order(g))
            .or_else(|| (0..n).find(|&g| !cur[g]))
            .unwrap();
        out.push((best, ext.element_order(best)));
        let gens: Vec<usize> = out.iter().map(|x| x.0).collect();
        cur = generated(&gens);
    }
    out
}

fn log_p(m: usize, p: usize) -> u32 {
    let mut k = 0;
    let mut x = m;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

/// Kummer data of `L/K`, or `NotKummer` when `K` lacks the `m`-th roots of unity.
pub fn kummer_data(ext: &GaloisExtension) -> Result<KummerData> {
    let t = ext.tower();
    let p = t.base().p() as usize;
    if t.base().kind() == BaseKind::LaurentSeries {
        return Err(Error::NotKummer("characteristic p".into()));
    }
    if !ext.is_totally_ramified() || !is_power_of(ext.degree(), p) {
        return Err(Error::NotKummer("not a totally ramified p-power extension".into()));
    }
    if !ext.is_abelian() {
        return Err(Error::NotKummer("group is not abelian".into()));
    }
    let m = ext.exponent();
    let k = ext.bottom();
    if roots_of_unity_count(k, m as u64)? as usize != m {
        return Err(Error::NotKummer(format!("`{}` lacks primitive {m}-th roots of unity", k.label())));
    }
    let pres = quotient_presentation(ext);
    if pres.iter().map(|x| x.1).product::<usize>() != ext.degree() {
        return Err(Error::NotKummer("no direct decomposition of the group".into()));
    }
    let zeta = primitive_root_of_unity(k, log_p(m, p))?
        .ok_or_else(|| Error::NotKummer("root of unity not exactly representable".into()))?;
    let mut generators = vec![];
    for (i, &(_, o)) in pres.iter().enumerate() {
        let val = t.pow(&zeta, (m / o) as i64).unwrap();
        let chi: Vec<(usize, Vector)> = pres
            .iter()
            .enumerate()
            .map(|(j, &(h, _))| (h, if i == j { val.clone() } else { t.one() }))
            .collect();
        let space = eigenspace(ext, &chi)?;
        let alpha = space.basis()[0].clone();
        let w = t.pow(&alpha, m as i64).unwrap();
        if !k.contains(&w) {
            return Err(Error::Invalid("Kummer generator does not lie in the bottom field".into()));
        }
        let valuation = k.valuation(&w).unwrap();
        generators.push(KummerGenerator { root: alpha, w, valuation });
    }
    let unit_root = generators.iter().all(|g| g.valuation % m as i64 == 0);
    Ok(KummerData { m, generators, unit_root })
}

/// Thm. 1: a Kummer extension satisfies VC iff it is a unit root extension.
pub fn vc_decide_kummer(ext: &GaloisExtension) -> Result<(VCReport, KummerData)> {
    let data = kummer_data(ext)?;
    let verdict = if data.unit_root { Verdict::Holds } else { Verdict::Fails };
    let mut rep = VCReport::new(ext, Method::Kummer, verdict);
    for g in &data.generators {
        rep.notes.push(format!("generator with v_K(w) = {} (m = {})", g.valuation, data.m));
    }
    if let Some(bad) = data.generators.iter().find(|g| g.valuation % data.m as i64 != 0) {
        let pair = FieldPair::new(ext.top().clone(), ext.bottom().clone())?;
        let line = Subspace::new(&pair, std::slice::from_ref(&bad.root))?;
        rep.witness = witness_from_module(ext, &line)?;
    }
    Ok((rep, data))
}

/// Thm. 2: every cyclic subextension `F/E` of degree `r` is unit root Kummer.
pub fn vc_decide_abelian(ext: &GaloisExtension, overrides: &FactorOverrides) -> Result<VCReport> {
    let t = ext.tower();
    let p = t.base().p() as usize;
    let undecided = |why: &str| Ok(VCReport::new(ext, Method::Abelian, Verdict::Undecided).note(why.to_string()));
    if !ext.is_abelian() || !ext.is_totally_ramified() || !is_power_of(ext.degree(), p) {
        return undecided("theorem hypothesis: abelian, totally ramified, p-power degree");
    }
    if t.base().kind() == BaseKind::LaurentSeries {
        return undecided("mixed characteristic required");
    }
    let m = ext.exponent();
    let r = roots_of_unity_count(ext.bottom(), m as u64)? as usize;
    if p == 2 && m.is_multiple_of(8) && r == 2 {
        return undecided("p = 2, 8 | m and r = 2 is excluded");
    }
    if r == 1 {
        return Ok(VCReport::new(ext, Method::Abelian, Verdict::Holds).note("r = 1"));
    }
    let g = ext.group();
    let between: Vec<SubgroupMask> = g
        .subgroups()
        .into_iter()
        .filter(|&h| h & ext.h_top() == ext.h_top() && h & !ext.h_bottom() == 0)
        .collect();
    let mut rep = VCReport::new(ext, Method::Abelian, Verdict::Holds).note(format!("m = {m}, r = {r}"));
    let mut checked = 0;
    for &hf in &between {
        for &he in &between {
            if he & hf != hf || he.count_ones() != hf.count_ones() * r as u32 {
                continue;
            }
            let cyclic = g.members(he).into_iter().any(|x| {
                let mut gens = g.members(hf);
                gens.push(x);
                g.generated(&gens) == he
            });
            if !cyclic {
                continue;
            }
            let f = ext.intermediate(hf, "F")?;
            let e = ext.intermediate(he, "E")?;
            let sub = GaloisExtension::new(g, &f, &e)?;
            let data = kummer_data(&sub)?;
            checked += 1;
            if !data.unit_root {
                rep.verdict = Verdict::Fails;
                rep.notes.push(format!(
                    "subextension of degree {r} over a field of degree {} is not unit root",
                    e.degree() / ext.bottom().degree()
                ));
                break;
            }
        }
        if rep.verdict == Verdict::Fails {
            break;
        }
    }
    rep.notes.push(format!("{checked} cyclic subextensions of degree {r} checked"));
    if rep.verdict == Verdict::Fails {
        match structural_with_modules(ext, overrides) {
            Ok((s, _)) if s.verdict == Verdict::Fails => rep.witness = s.witness,
            Ok(_) => rep.notes.push("structural decider disagrees".into()),
            Err(e) => rep.notes.push(format!("witness unavailable: {e}")),
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideOptions {
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip)]
    pub overrides: FactorOverrides,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            methods: vec![Method::Prop1Precheck, Method::Abelian, Method::Structural, Method::MonteCarlo],
            trials: 200,
            seed: 0,
            overrides: vec![],
        }
    }
}

/// Combined verdict: the first definite verdict among the requested methods.
#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Verdict,
    pub method: Option<Method>,
    pub reports: Vec<VCReport>,
    /// All definite verdicts coincide.
    pub agree: bool,
}

pub fn decide(ext: &GaloisExtension, opts: &DecideOptions) -> Result<Decision> {
    let mut reports = vec![];
    let mut modules: Option<Vec<MinimalSubmodule>> = None;
    for &method in &opts.methods {
        let rep = match method {
            Method::Prop1Precheck => precheck_report(ext)?,
            Method::Kummer => match vc_decide_kummer(ext) {
                Ok((r, _)) => r,
                Err(Error::NotKummer(why)) => VCReport::new(ext, Method::Kummer, Verdict::Undecided).note(why),
                Err(e) => return Err(e),
            },
            Method::Abelian => match vc_decide_abelian(ext, &opts.overrides) {
                Ok(r) => r,
                Err(Error::HypothesisViolated(why)) => {
                    VCReport::new(ext, Method::Abelian, Verdict::Undecided).note(why)
                }
                Err(e) => return Err(e),
            },
            Method::Structural => match structural_with_modules(ext, &opts.overrides) {
                Ok((r, mods)) => {
                    modules = Some(mods);
                    r
                }
                Err(Error::HypothesisViolated(why) | Error::Unsupported(why)) => {
                    VCReport::new(ext, Method::Structural, Verdict::Undecided).note(why)
                }
                Err(e) => return Err(e),
            },
            Method::MonteCarlo => {
                if modules.is_none() && ext.is_totally_ramified() {
                    modules = minimal_submodules(ext, &opts.overrides).ok();
                }
                let mut directed: Vec<Subspace> =
                    modules.iter().flatten().map(|m| m.module.orthogonal()).collect();
                if directed.is_empty() && ext.is_totally_ramified() && ext.is_abelian() {
                    for v in cyclotomic_kernel_modules(ext)? {
                        if !v.s_of_v()?.contains(0) {
                            directed.push(v.orthogonal());
                        }
                    }
                }
                match monte_carlo_vc(ext, opts.trials, opts.seed, &directed)? {
                    MonteCarloOutcome::Refuted(w) => {
                        let mut r = VCReport::new(ext, Method::MonteCarlo, Verdict::Fails).note("refuted");
                        r.witness = Some(w);
                        r
                    }
                    MonteCarloOutcome::Consistent { trials } => VCReport::new(ext, Method::MonteCarlo, Verdict::Undecided)
                        .note(format!("consistent after {trials} trials")),
                }
            }
        };
        reports.push(rep);
    }
    let definite: Vec<&VCReport> = reports.iter().filter(|r| r.verdict != Verdict::Undecided).collect();
    let agree = definite.windows(2).all(|w| w[0].verdict == w[1].verdict);
    let (verdict, method) = match definite.first() {
        Some(r) => (r.verdict, Some(r.method)),
        None => (Verdict::Undecided, None),
    };
    Ok(Decision { verdict, method, reports, agree })
}

/// Outcome of the experimental check of `VC(M/K) ⇒ VC(M/L)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub vc_m_over_k: Verdict,
    pub vc_m_over_l: Verdict,
    /// `VC(M/K)` holds while `VC(M/L)` fails.
    pub candidate_counterexample: bool,
}

/// Decide both `VC(M/K)` and `VC(M/L)` and log whether the implication breaks.
pub fn probe_top_monotonicity(
    group: &Arc<GaloisGroup>,
    m: &Subfield,
    l: &Subfield,
    k: &Subfield,
    opts: &DecideOptions,
) -> Result<ProbeOutcome> {
    let mk = decide(&GaloisExtension::new(group, m, k)?, opts)?.verdict;
    let ml = decide(&GaloisExtension::new(group, m, l)?, opts)?.verdict;
    Ok(ProbeOutcome {
        vc_m_over_k: mk,
        vc_m_over_l: ml,
        candidate_counterexample: mk == Verdict::Holds && ml == Verdict::Fails,
    })
}
