//! Acceptance suite: prints one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use anyhow::{anyhow, bail, ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use normval_core::corpus;
use normval_core::document::BuiltDefinition;
use normval_core::galois::{roots_of_unity_count, Automorphism, GaloisExtension};
use normval_core::kgmod::{poly_to_string, CyclotomicFactorization, FactorSource, KPoly};
use normval_core::linalg::{is_zero_vec, Vector};
use normval_core::subfield::{FieldPair, Subfield};
use normval_core::subspace::{check_duality, SVal, Subspace};
use normval_core::vc::*;

/// Criteria whose literal statement does not hold; see the README.
const KNOWN_FAILURES: &[u32] = &[2];

const SEED: u64 = 20;

fn load(name: &str) -> Result<BuiltDefinition> {
    corpus::load(name).with_context(|| format!("loading `{name}`"))
}

fn options(b: &BuiltDefinition, methods: &[Method], trials: usize) -> DecideOptions {
    DecideOptions { methods: methods.to_vec(), trials, seed: SEED, overrides: b.overrides.clone() }
}

fn exact_methods() -> Vec<Method> {
    vec![Method::Prop1Precheck, Method::Abelian, Method::Structural]
}

fn all_methods() -> Vec<Method> {
    vec![Method::Prop1Precheck, Method::Abelian, Method::Kummer, Method::Structural, Method::MonteCarlo]
}

/// Every corpus pair with its extension.
fn corpus_pairs() -> Result<Vec<(String, BuiltDefinition, GaloisExtension)>> {
    let mut out = vec![];
    for name in corpus::names() {
        let b = load(name)?;
        for (t, k) in b.pairs() {
            let ext = b.extension(&t, &k).with_context(|| format!("{name}: {t}/{k}"))?;
            out.push((format!("{name}:{t}/{k}"), b.clone(), ext));
        }
    }
    Ok(out)
}

/// The verdict of `decide`, after re-verifying every witness it returns.
fn checked_decision(ext: &GaloisExtension, opts: &DecideOptions) -> Result<Decision> {
    let d = decide(ext, opts)?;
    ensure!(d.agree, "methods disagree: {:?}", summary(&d));
    for r in &d.reports {
        if r.verdict == Verdict::Fails {
            let w = r.witness.as_ref().ok_or_else(|| anyhow!("{} fails without a witness", r.method))?;
            ensure!(verify_witness(ext, w)?, "{} witness does not re-verify", r.method);
        }
    }
    Ok(d)
}

fn summary(d: &Decision) -> Vec<String> {
    d.reports.iter().map(|r| format!("{}={}", r.method, r.verdict)).collect()
}

fn verdict_of(d: &Decision, m: Method) -> Option<Verdict> {
    d.reports.iter().find(|r| r.method == m).map(|r| r.verdict)
}

fn random_in_field(field: &Subfield, rng: &mut ChaCha8Rng) -> Vector {
    let t = field.tower();
    let mut x = t.zero();
    for b in field.basis() {
        x = t.add(&x, &t.mul(&t.int(rng.gen_range(-2..=2)), b));
    }
    x
}

fn random_subspace(pair: &FieldPair, field: &Subfield, rng: &mut ChaCha8Rng) -> Result<Subspace> {
    let n = pair.degree();
    let k = rng.gen_range(1..=n);
    let span: Vec<Vector> = (0..k).map(|_| random_in_field(field, rng)).collect();
    Ok(Subspace::new(pair, &span)?)
}

fn z32() -> Result<String> {
    let b = load("z32")?;
    let t = b.tower.clone();
    let g = b.group.clone();
    let sigma = g
        .index_of(&Automorphism::parse(&t, &["z^3"])?)
        .ok_or_else(|| anyhow!("z -> z^3 is not in the group"))?;
    let ext = b.extension("top", "K")?;
    let x = b.parse_element("z^9 - (z^4 + z^12)*z^3 - z")?;
    let sx = g.element(sigma).apply(&x);
    let l = ext.top();
    let vx = l.valuation(&x);
    let vd = l.valuation(&t.sub(&sx, &x));
    ensure!(vx == Some(10), "v(x) = {vx:?}");
    ensure!(vd == Some(14), "v(sigma x - x) = {vd:?}");
    let pair = FieldPair::new(l.clone(), ext.bottom().clone())?;
    let s = Subspace::new(&pair, &[x, sx])?.s_of_v()?;
    ensure!(s == SVal::new(8, [2, 6]), "s(V) = {s}");

    let l4 = checked_decision(&b.extension("L4", "K")?, &options(&b, &all_methods(), 1000))?;
    ensure!(l4.verdict == Verdict::Holds, "VC(L4/K): {:?}", summary(&l4));
    let l8 = checked_decision(&ext, &options(&b, &all_methods(), 1000))?;
    ensure!(l8.verdict == Verdict::Fails, "VC(L8/K): {:?}", summary(&l8));
    let dbar = ext.ramification()?.dbar;
    let w = l8.reports.iter().find_map(|r| r.witness.as_ref()).unwrap();
    Ok(format!(
        "v(x)=10, v(sx-x)=14, s(V)={s}, L4/K holds, L8/K fails (witness valuation {} = {dbar} mod 8)",
        w.valuation
    ))
}

fn factorization() -> Result<String> {
    let b = load("z32")?;
    let t = b.tower.clone();
    let k = b.field("K")?;
    let s = b.parse_element("z^4 + z^12")?;
    ensure!(t.mul(&s, &s) == t.int(-2), "s^2 != -2");
    let lin = |c: i64| vec![t.int(c), t.one()];
    let quad = |c0: i64, c1: Vector| vec![t.int(c0), c1, t.one()];
    let displayed: Vec<KPoly> =
        vec![lin(-1), lin(1), quad(1, t.zero()), quad(-1, s.clone()), quad(1, t.neg(&s))];
    let corrected: Vec<KPoly> =
        vec![lin(-1), lin(1), quad(1, t.zero()), quad(-1, s.clone()), quad(-1, t.neg(&s))];

    // Each eighth root of unity z^(4j) must be a root of exactly one factor.
    let roots_ok = |fs: &[KPoly]| {
        (0..8).all(|j| {
            let zeta = t.pow(&t.generator(0), 4 * j).unwrap();
            fs.iter().filter(|f| is_zero_vec(&t.eval_poly(f, &zeta))).count() == 1
        })
    };
    ensure!(roots_ok(&corrected), "corrected factors miss an eighth root of unity");
    let fz = CyclotomicFactorization::explicit(k, 8, corrected)?;
    ensure!(fz.certified, "corrected factors not certified irreducible");

    let literal = CyclotomicFactorization {
        n: 8,
        factors: displayed.clone(),
        multiplicities: vec![1; 5],
        source: FactorSource::Explicit,
        certified: false,
    };
    let product = literal.product(&t);
    ensure!(
        CyclotomicFactorization::explicit(k, 8, displayed).is_ok() && roots_ok(&literal.factors),
        "displayed factors multiply to {}, not X^8 - 1; the exact factorization has X^2 - sX - 1 (s^2 = -2) as its last factor",
        poly_to_string(&t, &product)
    );
    Ok("displayed factors reproduced exactly".into())
}

fn quadratics() -> Result<String> {
    let b = load("quadratic-q2")?;
    let gauss = b.extension("I", "base")?;
    let root2 = b.extension("S", "base")?;
    let opts = options(&b, &all_methods(), 1000);
    let d = checked_decision(&gauss, &opts)?;
    ensure!(d.verdict == Verdict::Holds, "VC(Q2(i)/Q2): {:?}", summary(&d));
    let d = checked_decision(&root2, &opts)?;
    ensure!(d.verdict == Verdict::Fails, "VC(Q2(sqrt2)/Q2): {:?}", summary(&d));

    let (rep, data) = vc_decide_kummer(&gauss)?;
    ensure!(rep.verdict == Verdict::Holds && data.generators[0].valuation == 0, "Kummer data of Q2(i)");
    let (rep, data) = vc_decide_kummer(&root2)?;
    ensure!(rep.verdict == Verdict::Fails && data.generators[0].valuation == 1, "Kummer data of Q2(sqrt2)");

    for dv in -9..=9 {
        ensure!(trace_criterion(&gauss, dv)? == (dv.rem_euclid(2) == 1), "trace criterion at d = {dv}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for c in [-3, -1, 1, 3, 5] {
        for _ in 0..200 {
            let x = random_element_of_class(&gauss, c, 4, &mut rng)?;
            ensure!(is_normal(&gauss, &x), "non-normal element of odd valuation {c}");
            ensure!(!is_zero_vec(&gauss.relative_trace(&x)?), "zero trace at odd valuation {c}");
        }
    }
    Ok("Q2(i)/Q2 holds, Q2(sqrt2)/Q2 fails, odd valuations are normal with nonzero trace".into())
}

fn cp2() -> Result<String> {
    let b = load("cp2")?;
    let opts = options(&b, &all_methods(), 1000);
    let lk = b.extension("top", "K")?;
    let mk = b.extension("M", "K")?;
    let lm = b.extension("top", "M")?;
    let want = [(&lk, Verdict::Fails, "L/K"), (&mk, Verdict::Holds, "M/K"), (&lm, Verdict::Holds, "L/M")];
    for (ext, v, name) in want {
        let d = checked_decision(ext, &opts)?;
        ensure!(d.verdict == v, "VC({name}): {:?}", summary(&d));
    }
    let (_, data) = vc_decide_kummer(&lk)?;
    ensure!(data.m == 4 && data.generators.len() == 1, "Kummer data of L/K");
    ensure!(data.generators[0].valuation.rem_euclid(4) == 2, "v_K(w) = {}", data.generators[0].valuation);
    let dl = lk.different_valuation()?;
    let dm = lm.different_valuation()?;
    let (cl, cm) = ((-1 - dl).rem_euclid(2), (-1 - dm).rem_euclid(2));
    ensure!(cl == cm && cl != 0, "-1-d_L/K = {}, -1-d_L/M = {}", -1 - dl, -1 - dm);
    Ok(format!("L/K fails, M/K holds, L/M holds, d_L/K={dl}, d_L/M={dm}, both -1-d odd"))
}

fn proposition1() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut samples = 0;
    let mut constructed = 0;
    for (name, _, ext) in corpus_pairs()? {
        let e = ext.e() as i64;
        let sampler = ClassSampler::new(&ext, 2 * ext.degree())?;
        for c in 0..e {
            let criterion = trace_criterion(&ext, c)?;
            let mut all_nonzero = true;
            for j in 0..500 {
                let x = sampler.sample(c, &mut rng);
                ensure!(j > 0 || ext.top().valuation(&x) == Some(c), "{name}: sample off class {c}");
                all_nonzero &= !is_zero_vec(&ext.relative_trace(&x)?);
                samples += 1;
            }
            let zero = zero_trace_element(&ext, c)?;
            if criterion {
                ensure!(all_nonzero, "{name}: zero trace in class {c} where the criterion holds");
                ensure!(zero.is_none(), "{name}: zero-trace element in class {c}");
            } else {
                let y = zero.ok_or_else(|| anyhow!("{name}: no zero-trace element in class {c}"))?;
                ensure!(ext.top().valuation(&y) == Some(c), "{name}: constructed element has wrong valuation");
                ensure!(is_zero_vec(&ext.relative_trace(&y)?), "{name}: constructed element has nonzero trace");
                constructed += 1;
            }
        }
    }
    Ok(format!("{samples} samples, {constructed} zero-trace elements constructed"))
}

fn lemmas_3_1_3_2() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut count = 0;
    let mut pairs = 0;
    for (name, _, ext) in corpus_pairs()? {
        if !ext.is_totally_ramified() {
            continue;
        }
        pairs += 1;
        let pair = FieldPair::new(ext.top().clone(), ext.bottom().clone())?;
        for _ in 0..200 {
            let v = random_subspace(&pair, ext.top(), &mut rng)?;
            let s = v.s_of_v()?;
            ensure!(s.len() == v.dim(), "{name}: #s(V) = {} but dim V = {}", s.len(), v.dim());
            let rep = check_duality(&v)?;
            ensure!(rep.holds, "{name}: s(V) = {}, s(V^perp) = {}, predicted {}", rep.s_v, rep.s_perp, rep.predicted);
            count += 1;
        }
    }
    Ok(format!("{count} random subspaces over {pairs} totally ramified pairs"))
}

fn trace_ideals() -> Result<String> {
    let mut checks = 0;
    let pairs = corpus_pairs()?;
    for (name, _, ext) in &pairs {
        let e = ext.e() as i64;
        for i in -2 * e..=2 * e {
            let got = ext.trace_ideal_image(i)?;
            ensure!(got == i.div_euclid(e), "{name}: i = {i} gives {got}, expected {}", i.div_euclid(e));
            checks += 1;
        }
    }
    Ok(format!("{checks} ideals over {} pairs", pairs.len()))
}

fn differential() -> Result<String> {
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    let pairs = corpus_pairs()?;
    for (name, b, ext) in &pairs {
        let d = checked_decision(ext, &options(b, &all_methods(), 1000)).with_context(|| name.clone())?;
        let st = verdict_of(&d, Method::Structural).unwrap();
        let ab = verdict_of(&d, Method::Abelian).unwrap();
        let mc = verdict_of(&d, Method::MonteCarlo).unwrap();
        if st != Verdict::Undecided && ab != Verdict::Undecided {
            ensure!(st == ab, "{name}: structural {st}, abelian {ab}");
            *tally.entry("structural=abelian").or_default() += 1;
        }
        match d.verdict {
            Verdict::Holds => ensure!(mc != Verdict::Fails, "{name}: monte carlo refutes a holds verdict"),
            Verdict::Fails => ensure!(mc == Verdict::Fails, "{name}: monte carlo did not refute within 1000 trials"),
            Verdict::Undecided => bail!("{name}: undecided"),
        }
        if verdict_of(&d, Method::Kummer).is_some_and(|v| v != Verdict::Undecided) {
            *tally.entry("kummer").or_default() += 1;
        }
        let p = ext.tower().base().p();
        if p == 2 && ab == Verdict::Undecided && st != Verdict::Undecided && ext.is_totally_ramified() {
            *tally.entry("excluded p=2").or_default() += 1;
        }
        if ab != Verdict::Undecided && ext.is_totally_ramified() {
            if let Ok(r) = roots_of_unity_count(ext.bottom(), ext.exponent() as u64) {
                *tally.entry(if r == 1 { "r=1" } else { "r>1" }).or_default() += 1;
            }
        }
    }
    ensure!(pairs.len() >= 20, "only {} pairs", pairs.len());
    for key in ["kummer", "excluded p=2", "r=1", "r>1"] {
        ensure!(tally.get(key).is_some_and(|&c| c > 0), "no pair of kind {key}");
    }
    let kinds: Vec<String> = tally.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    Ok(format!("{} pairs ({})", pairs.len(), kinds.join(", ")))
}

fn equal_characteristic() -> Result<String> {
    let mut seen = vec![];
    for name in ["equal-char", "equal-char-f3"] {
        let b = load(name)?;
        let p = b.tower.base().p() as usize;
        for (top, want) in [("W", p), ("top", p * p)] {
            let ext = b.extension(top, "base")?;
            ensure!(ext.degree() == want && ext.is_totally_ramified(), "{name}: {top}/base shape");
            let rep = vc_decide_structural(&ext, &b.overrides)?;
            ensure!(rep.verdict == Verdict::Holds, "{name}: structural gives {} on {top}/base", rep.verdict);
            let mc = monte_carlo_vc(&ext, 500, SEED, &[])?;
            ensure!(mc == MonteCarloOutcome::Consistent { trials: 500 }, "{name}: {top}/base refuted");
            seen.push(format!("F{p}((t)) degree {want}"));
        }
    }
    Ok(format!("structural holds and 500 trials consistent for {}", seen.join(", ")))
}

fn monotonicity() -> Result<String> {
    let mut cache: HashMap<(Option<String>, String, String), Verdict> = HashMap::new();
    let mut vc = |b: &BuiltDefinition, ext: &GaloisExtension| -> Result<Verdict> {
        let key = (b.doc.name.clone(), ext.top().label().to_string(), ext.bottom().label().to_string());
        if let Some(v) = cache.get(&key) {
            return Ok(*v);
        }
        let v = checked_decision(ext, &options(b, &exact_methods(), 0))?.verdict;
        cache.insert(key, v);
        Ok(v)
    };
    let decided = |v: Verdict, what: &str| -> Result<bool> {
        ensure!(v != Verdict::Undecided, "{what} undecided");
        Ok(v == Verdict::Holds)
    };
    let (mut cor, mut cor_live, mut l42, mut l42_live) = (0, 0, 0, 0);
    for name in corpus::names() {
        let b = load(name)?;
        let fields: Vec<&Subfield> = b.fields.values().collect();
        for k in &fields {
            for l in &fields {
                for m in &fields {
                    let chain = k.degree() < l.degree() && l.degree() < m.degree();
                    if !chain || !k.is_subfield_of(l) || !l.is_subfield_of(m) {
                        continue;
                    }
                    let (Ok(mk), Ok(lk)) = (GaloisExtension::new(&b.group, m, k), GaloisExtension::new(&b.group, l, k))
                    else {
                        continue;
                    };
                    let holds_mk = vc(&b, &mk)? == Verdict::Holds;
                    cor += 1;
                    if holds_mk {
                        cor_live += 1;
                        ensure!(decided(vc(&b, &lk)?, "L/K")?, "{name}: VC(M/K) but not VC(L/K) for {}/{}/{}", m.label(), l.label(), k.label());
                    }
                    let ml = GaloisExtension::new(&b.group, m, l)?;
                    if !ml.is_abelian() {
                        continue;
                    }
                    let r = ml.exponent() as u64;
                    if roots_of_unity_count(k, r).ok() != Some(r) {
                        continue;
                    }
                    l42 += 1;
                    if holds_mk {
                        l42_live += 1;
                        ensure!(decided(vc(&b, &ml)?, "M/L")?, "{name}: VC(M/K) but not VC(M/L) for {}/{}/{}", m.label(), l.label(), k.label());
                    }
                }
            }
        }
    }

    let b = load("q3-zeta9")?;
    let lk = b.extension("R", "base")?;
    let kl_k = b.extension("top", "C")?;
    let tame = b.extension("C", "base")?;
    ensure!(tame.degree() % 3 != 0, "C/base is not tame");
    let e = tame.e() as i64;
    let pair = FieldPair::new(lk.top().clone(), lk.bottom().clone())?;
    let lifted = FieldPair::new(kl_k.top().clone(), kl_k.bottom().clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..100 {
        let v = random_subspace(&pair, lk.top(), &mut rng)?;
        let s = v.s_of_v()?;
        let kv = Subspace::new(&lifted, v.basis())?;
        let scaled = SVal::new(kl_k.degree() as i64, s.classes.iter().map(|c| e * c));
        ensure!(kv.s_of_v()? == scaled, "e*s(V) = {scaled} but s(K~V) = {}", kv.s_of_v()?);
    }
    if vc(&b, &kl_k)? == Verdict::Holds {
        ensure!(vc(&b, &lk)? == Verdict::Holds, "VC(K~L/K~) but not VC(L/K)");
    }
    Ok(format!(
        "Cor 3.1: {cor} chains ({cor_live} with VC(M/K)); Lemma 4.2: {l42} chains ({l42_live} with VC(M/K)); tame base change on 100 subspaces"
    ))
}

type Criterion = (u32, &'static str, fn() -> Result<String>);

const CRITERIA: [Criterion; 10] = [
    (1, "z32 regression", z32),
    (2, "X^8 - 1 over Q2(sqrt-2)", factorization),
    (3, "quadratic examples", quadratics),
    (4, "cp2", cp2),
    (5, "trace criterion", proposition1),
    (6, "cardinality and duality of s(V)", lemmas_3_1_3_2),
    (7, "traces of ideals", trace_ideals),
    (8, "differential decider agreement", differential),
    (9, "equal characteristic", equal_characteristic),
    (10, "monotonicity", monotonicity),
];

fn main() {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let results: Vec<(u32, &str, Result<String>, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = CRITERIA
            .iter()
            .filter(|c| only.is_empty() || only.contains(&c.0))
            .map(|&(n, name, f)| {
                std::thread::Builder::new()
                    .stack_size(64 << 20)
                    .spawn_scoped(s, move || {
                        let start = Instant::now();
                        let r = f();
                        (n, name, r, start.elapsed().as_secs_f64())
                    })
                    .unwrap()
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut unexpected = vec![];
    for (n, name, r, secs) in &results {
        let (tag, detail) = match r {
            Ok(s) => ("PASS", s.clone()),
            Err(e) => ("FAIL", format!("{e:#}")),
        };
        println!("criterion {n:>2} {tag} {name} ({secs:.1}s): {detail}");
        if r.is_ok() == KNOWN_FAILURES.contains(n) {
            unexpected.push(*n);
        }
    }
    let passed = results.iter().filter(|r| r.2.is_ok()).count();
    println!("acceptance: {passed}/{} criteria pass; known failures {KNOWN_FAILURES:?}", results.len());
    if !unexpected.is_empty() {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
