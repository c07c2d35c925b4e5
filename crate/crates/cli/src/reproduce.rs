//! Worked examples recomputed end to end and compared with stored values.

use std::collections::BTreeMap;

use anyhow::{anyhow, Context, Result};

use normval_core::document::{BuiltDefinition, CheckRecord, PairRecord, ReportDocument, Settings};
use normval_core::galois::Automorphism;
use normval_core::linalg::is_zero_vec;
use normval_core::vc::{trace_criterion, zero_trace_element, DecideOptions, Verdict};

use crate::commands::{load, sval_of, vc_record};

pub const NAMES: [&str; 4] = ["z32", "cp2", "quadratic-q2", "equal-char"];

fn expected(name: &str) -> Result<BTreeMap<String, String>> {
    let src = match name {
        "z32" => include_str!("../expected/z32.toml"),
        "cp2" => include_str!("../expected/cp2.toml"),
        "quadratic-q2" => include_str!("../expected/quadratic-q2.toml"),
        "equal-char" => include_str!("../expected/equal-char.toml"),
        _ => return Err(anyhow!("no stored values for `{name}`")),
    };
    toml::from_str(src).with_context(|| format!("stored values for `{name}`"))
}

struct Run {
    opts: DecideOptions,
    pairs: Vec<PairRecord>,
    values: BTreeMap<String, String>,
}

impl Run {
    fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.into(), value.to_string());
    }

    fn decide(&mut self, b: &BuiltDefinition, key: &str, top: &str, bottom: &str) -> Result<()> {
        self.opts.overrides = b.overrides.clone();
        let rec = vc_record(b, top, bottom, &self.opts)?;
        self.set(key, rec.verdict.unwrap_or(Verdict::Undecided));
        if rec.verdict == Some(Verdict::Fails) {
            self.set(&format!("{key} witness re-verifies"), rec.witness.is_some());
        }
        self.pairs.push(rec);
        Ok(())
    }
}

fn z32(run: &mut Run) -> Result<()> {
    let b = load("z32")?;
    let t = &b.tower;
    let g = &b.group;
    let sigma = g
        .index_of(&Automorphism::parse(t, &["z^3"])?)
        .ok_or_else(|| anyhow!("z -> z^3 is not in the group"))?;
    let ext = b.extension("top", "K")?;
    let x = b.parse_element("z^9 - (z^4 + z^12)*z^3 - z")?;
    let sx = g.element(sigma).apply(&x);
    let show = |v: Option<i64>| v.map_or("infinity".into(), |v| v.to_string());
    run.set("v_L8(x)", show(ext.top().valuation(&x)));
    run.set("v_L8(sigma(x) - x)", show(ext.top().valuation(&t.sub(&sx, &x))));
    let s = sval_of(&ext, vec![x, sx])?;
    run.set("s(span{x, sigma(x)})", &s.s);
    run.decide(&b, "VC(L4/K)", "L4", "K")?;
    run.decide(&b, "VC(L8/K)", "top", "K")?;
    run.pairs.last_mut().expect("just decided").svals.push(s);
    Ok(())
}

fn cp2(run: &mut Run) -> Result<()> {
    let b = load("cp2")?;
    run.decide(&b, "VC(L/K)", "top", "K")?;
    run.decide(&b, "VC(M/K)", "M", "K")?;
    run.decide(&b, "VC(L/M)", "top", "M")?;
    let p = b.tower.base().p() as i64;
    for (key, bottom) in [("-1 - d_L/K mod 2", "K"), ("-1 - d_L/M mod 2", "M")] {
        let d = b.extension("top", bottom)?.different_valuation()?;
        run.set(key, (-1 - d).rem_euclid(p));
    }
    Ok(())
}

fn quadratic(run: &mut Run) -> Result<()> {
    let b = load("quadratic-q2")?;
    run.decide(&b, "VC(Q2(i)/Q2)", "I", "base")?;
    run.decide(&b, "VC(Q2(sqrt2)/Q2)", "S", "base")?;
    let gauss = b.extension("I", "base")?;
    let pi = gauss.top().uniformizer().clone();
    let mut odd = true;
    for d in -6i64..=6 {
        let criterion = trace_criterion(&gauss, d)?;
        let x = b.tower.pow(&pi, d).unwrap();
        let attained = if criterion {
            !is_zero_vec(&gauss.relative_trace(&x)?)
        } else {
            zero_trace_element(&gauss, d)?.is_some()
        };
        odd &= attained && criterion == (d.rem_euclid(2) == 1);
    }
    run.set("Q2(i)/Q2: trace criterion exactly at odd valuations", odd);
    Ok(())
}

fn equal_char(run: &mut Run) -> Result<()> {
    for name in ["equal-char", "equal-char-f3"] {
        let b = load(name)?;
        let p = b.tower.base().p();
        run.decide(&b, &format!("F{p}: VC(W/base)"), "W", "base")?;
        run.decide(&b, &format!("F{p}: VC(top/base)"), "top", "base")?;
    }
    Ok(())
}

pub fn run(name: &str, opts: DecideOptions, settings: Settings) -> Result<ReportDocument> {
    let want = expected(name)?;
    let mut run = Run { opts, pairs: vec![], values: BTreeMap::new() };
    match name {
        "z32" => z32(&mut run)?,
        "cp2" => cp2(&mut run)?,
        "quadratic-q2" => quadratic(&mut run)?,
        "equal-char" => equal_char(&mut run)?,
        _ => unreachable!("names are validated by the parser"),
    }
    let mut report = ReportDocument::new("reproduce", settings);
    report.definition = Some(name.into());
    report.pairs = run.pairs;
    let keys: std::collections::BTreeSet<&String> = want.keys().chain(run.values.keys()).collect();
    for key in keys {
        let expected = want.get(key).cloned().unwrap_or_else(|| "(none)".into());
        let computed = run.values.get(key).cloned().unwrap_or_else(|| "(none)".into());
        report.checks.push(CheckRecord { name: key.clone(), ok: expected == computed, expected, computed });
    }
    Ok(report)
}
