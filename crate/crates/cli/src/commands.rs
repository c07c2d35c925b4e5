use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};

use normval_core::corpus;
use normval_core::document::{
    BuiltDefinition, CheckRecord, ElementRecord, FactorRecord, FieldDefinitionDocument, MethodRecord, PairRecord,
    ReportDocument, SValRecord, Settings,
};
use normval_core::galois::GaloisExtension;
use normval_core::linalg::Vector;
use normval_core::kgmod::{factor_xn_minus_1, poly_to_string, CyclotomicFactorization, FactorSource};
use normval_core::subfield::FieldPair;
use normval_core::subspace::Subspace;
use normval_core::vc::{decide, probe_top_monotonicity, verify_witness, DecideOptions, Verdict};
use normval_core::Error;

/// A definition document read from `spec`, or the bundled example of that name.
pub fn load(spec: &str) -> Result<BuiltDefinition> {
    let doc = if Path::new(spec).is_file() {
        let src = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        FieldDefinitionDocument::from_toml(&src).with_context(|| format!("parsing {spec}"))?
    } else if corpus::source(spec).is_some() {
        corpus::document(spec)?
    } else {
        bail!("`{spec}` is neither a file nor a bundled definition");
    };
    doc.build().with_context(|| format!("building {spec}"))
}

fn parse_pair(s: &str) -> Result<(String, String)> {
    let (t, b) = s.split_once('/').ok_or_else(|| anyhow!("pair `{s}` is not of the form TOP/BOTTOM"))?;
    Ok((t.trim().to_string(), b.trim().to_string()))
}

fn pairs_of(b: &BuiltDefinition, given: &[String]) -> Result<Vec<(String, String)>> {
    if given.is_empty() {
        return Ok(b.pairs());
    }
    given.iter().map(|s| parse_pair(s)).collect()
}

fn extension(b: &BuiltDefinition, top: &str, bottom: &str) -> Result<GaloisExtension> {
    b.extension(top, bottom).with_context(|| format!("pair {top}/{bottom}"))
}

fn source_name(s: FactorSource) -> &'static str {
    match s {
        FactorSource::Structural => "structural",
        FactorSource::EisensteinCertificate => "eisenstein-certificate",
        FactorSource::Inseparable => "inseparable",
        FactorSource::Explicit => "explicit",
    }
}

/// `X^n - 1` over the bottom field, for `n` the `p`-part of the degree.
fn factor_record(b: &BuiltDefinition, ext: &GaloisExtension) -> Result<Option<FactorRecord>> {
    let p = b.tower.base().p() as usize;
    let mut n = 1;
    while ext.degree().is_multiple_of(n * p) {
        n *= p;
    }
    if n == 1 {
        return Ok(None);
    }
    let fz = match factor_xn_minus_1(ext.bottom(), n) {
        Ok(fz) => fz,
        Err(Error::HypothesisViolated(why)) => {
            let given = b
                .overrides
                .iter()
                .filter(|(m, _)| *m == n)
                .find_map(|(_, fs)| CyclotomicFactorization::explicit(ext.bottom(), n, fs.clone()).ok());
            match given {
                Some(fz) => fz,
                None => {
                    eprintln!("note: X^{n} - 1 over {} not factored: {why}", ext.bottom().label());
                    return Ok(None);
                }
            }
        }
        Err(e) => return Err(e.into()),
    };
    let factors = fz
        .factors
        .iter()
        .zip(&fz.multiplicities)
        .map(|(f, &m)| {
            let s = poly_to_string(&b.tower, f);
            if m == 1 { s } else { format!("({s})^{m}") }
        })
        .collect();
    Ok(Some(FactorRecord { n, factors, source: source_name(fz.source).into(), certified: fz.certified }))
}

pub fn invariants(spec: &str, pairs: &[String], settings: Settings) -> Result<ReportDocument> {
    let b = load(spec)?;
    let mut report = ReportDocument::new("invariants", settings);
    report.definition = Some(spec.into());
    for (top, bottom) in pairs_of(&b, pairs)? {
        let ext = extension(&b, &top, &bottom)?;
        let mut rec = PairRecord::new(&top, &bottom);
        rec.invariants = Some(ext.ramification()?);
        rec.factorizations.extend(factor_record(&b, &ext)?);
        report.pairs.push(rec);
    }
    Ok(report)
}

/// `s(V)` and `s(V⊥)` for `V` spanned by `elements`.
pub fn sval_record(b: &BuiltDefinition, ext: &GaloisExtension, elements: &[String]) -> Result<SValRecord> {
    let mut span = vec![];
    for e in elements {
        let x = b.parse_element(e).with_context(|| format!("element `{e}`"))?;
        ensure!(ext.top().contains(&x), "`{e}` is not in {}", ext.top().label());
        span.push(x);
    }
    sval_of(ext, span)
}

pub fn sval_of(ext: &GaloisExtension, span: Vec<Vector>) -> Result<SValRecord> {
    let pair = FieldPair::new(ext.top().clone(), ext.bottom().clone())?;
    let spanning = span
        .iter()
        .map(|x| {
            let mut rec = ElementRecord::new(x);
            rec.valuation = ext.top().valuation(x);
            rec
        })
        .collect();
    let v = Subspace::new(&pair, &span)?;
    Ok(SValRecord { spanning, dim: v.dim(), s: v.s_of_v()?, s_perp: Some(v.orthogonal().s_of_v()?) })
}

pub fn sval(spec: &str, pair: &str, elements: &[String], settings: Settings) -> Result<ReportDocument> {
    let b = load(spec)?;
    let (top, bottom) = parse_pair(pair)?;
    let ext = extension(&b, &top, &bottom)?;
    let mut rec = PairRecord::new(&top, &bottom);
    rec.invariants = Some(ext.ramification()?);
    rec.svals.push(sval_record(&b, &ext, elements)?);
    let mut report = ReportDocument::new("sval", settings);
    report.definition = Some(spec.into());
    report.pairs.push(rec);
    Ok(report)
}

/// Decide `VC(top/bottom)`, checking that the methods agree and that any witness re-verifies.
pub fn vc_record(b: &BuiltDefinition, top: &str, bottom: &str, opts: &DecideOptions) -> Result<PairRecord> {
    let ext = extension(b, top, bottom)?;
    let d = decide(&ext, opts)?;
    let mut rec = PairRecord::new(top, bottom);
    rec.invariants = ext.ramification().ok();
    rec.verdict = Some(d.verdict);
    rec.method = d.method;
    for r in &d.reports {
        eprintln!("{top}/{bottom}: {} -> {}", r.method, r.verdict);
        rec.methods.push(MethodRecord { method: r.method, verdict: r.verdict, notes: r.notes.clone() });
    }
    ensure!(d.agree, "deciders disagree on {top}/{bottom}");
    if let Some(w) = d.reports.iter().find_map(|r| r.witness.as_ref()) {
        ensure!(verify_witness(&ext, w)?, "witness for {top}/{bottom} does not re-verify");
        rec.set_witness(w);
    }
    Ok(rec)
}

/// Fails if any pair fails, else undecided if any is undecided.
pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Holds;
    for v in verdicts {
        match v {
            Verdict::Fails => return Verdict::Fails,
            Verdict::Undecided => out = Verdict::Undecided,
            Verdict::Holds => {}
        }
    }
    out
}

pub fn vc(
    spec: &str,
    pairs: &[String],
    probe: Option<&str>,
    mut opts: DecideOptions,
    settings: Settings,
) -> Result<(ReportDocument, Verdict)> {
    let b = load(spec)?;
    opts.overrides = b.overrides.clone();
    let mut report = ReportDocument::new("vc", settings);
    report.definition = Some(spec.into());
    for (top, bottom) in pairs_of(&b, pairs)? {
        report.pairs.push(vc_record(&b, &top, &bottom, &opts)?);
        if let Some(mid) = probe {
            let out = probe_top_monotonicity(&b.group, b.field(&top)?, b.field(mid)?, b.field(&bottom)?, &opts)
                .with_context(|| format!("probe through {mid}"))?;
            eprintln!(
                "probe: VC({top}/{bottom}) = {}, VC({top}/{mid}) = {}{}",
                out.vc_m_over_k,
                out.vc_m_over_l,
                if out.candidate_counterexample { "; candidate counterexample" } else { "" }
            );
        }
    }
    let verdict = combine(report.pairs.iter().filter_map(|p| p.verdict));
    Ok((report, verdict))
}

pub fn check(spec: &str, path: &Path, settings: Settings) -> Result<ReportDocument> {
    let b = load(spec)?;
    let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let stored = ReportDocument::from_toml(&src).with_context(|| format!("parsing {}", path.display()))?;
    let bad = stored.reverify(&b)?;
    for claim in &bad {
        eprintln!("claim does not re-verify: {claim}");
    }
    let mut report = ReportDocument::new("check", settings);
    report.definition = Some(spec.into());
    report.checks.push(CheckRecord {
        name: format!("claims in {}", path.display()),
        expected: "all re-verify".into(),
        computed: if bad.is_empty() { "all re-verify".into() } else { bad.join("; ") },
        ok: bad.is_empty(),
    });
    Ok(report)
}
