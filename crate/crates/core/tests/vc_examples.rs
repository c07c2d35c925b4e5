use std::sync::Arc;

use normval_core::galois::*;
use normval_core::kgmod::KPoly;
use normval_core::subfield::Subfield;
use normval_core::vc::*;
use normval_core::*;

fn tower(b: BaseField, steps: &[(&str, &[&str])]) -> Arc<FieldTower> {
    let steps: Vec<ExtensionStep> = steps.iter().map(|(l, p)| ExtensionStep::new(l, StepKind::General, p)).collect();
    Arc::new(FieldTower::build(b, &steps).unwrap())
}

fn whole(t: &Arc<FieldTower>, hints: &[&[&str]]) -> GaloisExtension {
    let hints: Vec<Automorphism> = hints.iter().map(|h| Automorphism::parse(t, h).unwrap()).collect();
    let g = Arc::new(GaloisGroup::find(t, &Subfield::base(t), &hints).unwrap());
    GaloisExtension::whole(&g).unwrap()
}

#[test]
fn gaussian_is_unit_root() {
    let t = tower(BaseField::padic(2).unwrap(), &[("i", &["1", "0", "1"])]);
    let ext = whole(&t, &[]);
    let (rep, data) = vc_decide_kummer(&ext).unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
    assert_eq!(data.m, 2);
    assert_eq!(data.generators[0].valuation, 0);
    assert_eq!(data.generators[0].w, t.int(-1));
    assert_eq!(vc_decide_structural(&ext, &vec![]).unwrap().verdict, Verdict::Holds);
    assert_eq!(monte_carlo_vc(&ext, 1000, 7, &[]).unwrap(), MonteCarloOutcome::Consistent { trials: 1000 });
    let d = decide(&ext, &DecideOptions::default()).unwrap();
    assert_eq!(d.verdict, Verdict::Holds);
    assert!(d.agree);
}

#[test]
fn sqrt2_fails_precheck() {
    let t = tower(BaseField::padic(2).unwrap(), &[("s", &["-2", "0", "1"])]);
    let ext = whole(&t, &[]);
    assert!(matches!(vc_precheck(&ext).unwrap(), Precheck::FailFast(_)));
    let d = decide(&ext, &DecideOptions::default()).unwrap();
    assert_eq!(d.verdict, Verdict::Fails);
    let w = d.reports[0].witness.as_ref().unwrap();
    assert!(verify_witness(&ext, w).unwrap());
}

#[test]
fn sqrt3_over_q3_has_tame_degree() {
    let t = tower(BaseField::padic(3).unwrap(), &[("s", &["-3", "0", "1"])]);
    let ext = whole(&t, &[]);
    assert!(matches!(vc_precheck(&ext).unwrap(), Precheck::FailFast(_)));
}

fn z32() -> (Arc<FieldTower>, Arc<GaloisGroup>, Subfield) {
    let mut poly = vec!["1"];
    poly.extend(std::iter::repeat_n("0", 15));
    poly.push("1");
    let t = tower(BaseField::padic(2).unwrap(), &[("z", &poly)]);
    let k = Subfield::generated_by(&t, "K", &[t.parse("z^4 + z^12").unwrap()]).unwrap();
    let g = GaloisGroup::find(&t, &k, &[Automorphism::parse(&t, &["z^3"]).unwrap()]).unwrap();
    (t, Arc::new(g), k)
}

fn x8_factors(t: &FieldTower) -> Vec<KPoly> {
    let s = t.parse("z^4 + z^12").unwrap();
    let lin = |c: i64| vec![t.int(c), t.one()];
    vec![
        lin(-1),
        lin(1),
        vec![t.one(), t.zero(), t.one()],
        vec![t.int(-1), s.clone(), t.one()],
        vec![t.int(-1), t.neg(&s), t.one()],
    ]
}

#[test]
fn z32_l8_fails_l4_holds() {
    let (t, g, k) = z32();
    let top = Subfield::top(&t);
    let ext = GaloisExtension::new(&g, &top, &k).unwrap();
    let ov = vec![(8, x8_factors(&t))];
    let rep = vc_decide_structural(&ext, &ov).unwrap();
    assert_eq!(rep.verdict, Verdict::Fails, "{:?}", rep.notes);
    let w = rep.witness.as_ref().unwrap();
    assert!(verify_witness(&ext, w).unwrap());
    assert_eq!(vc_decide_abelian(&ext, &ov).unwrap().verdict, Verdict::Undecided);

    let s4 = g.pow(1, 4);
    let l4 = fixed_field(&g, g.generated(&[s4]), "L4").unwrap();
    let ext4 = GaloisExtension::new(&g, &l4, &k).unwrap();
    assert_eq!(vc_decide_structural(&ext4, &vec![]).unwrap().verdict, Verdict::Holds);
}

#[test]
fn cp2_fails_with_both_layers_holding() {
    let t = tower(BaseField::padic(2).unwrap(), &[("y", &["2", "0", "0", "0", "1"]), ("i", &["1", "0", "1"])]);
    let hints: Vec<Automorphism> =
        [["i*y", "i"], ["y", "-i"]].iter().map(|h| Automorphism::parse(&t, h).unwrap()).collect();
    let g = Arc::new(GaloisGroup::find(&t, &Subfield::base(&t), &hints).unwrap());
    assert_eq!(g.order(), 8);
    let l = Subfield::top(&t);
    let k = Subfield::generated_by(&t, "K", &[t.parse("i").unwrap()]).unwrap();
    let m = Subfield::generated_by(&t, "M", &[t.parse("i").unwrap(), t.parse("y^2").unwrap()]).unwrap();
    let lk = GaloisExtension::new(&g, &l, &k).unwrap();
    assert!(lk.is_totally_ramified());
    let (rep, data) = vc_decide_kummer(&lk).unwrap();
    assert_eq!(rep.verdict, Verdict::Fails);
    assert_eq!(data.m, 4);
    assert_eq!(data.generators[0].valuation.rem_euclid(4), 2);
    assert!(verify_witness(&lk, rep.witness.as_ref().unwrap()).unwrap());
    assert_eq!(vc_decide_structural(&lk, &vec![]).unwrap().verdict, Verdict::Fails);
    let mk = GaloisExtension::new(&g, &m, &k).unwrap();
    let lm = GaloisExtension::new(&g, &l, &m).unwrap();
    assert_eq!(vc_decide_kummer(&mk).unwrap().0.verdict, Verdict::Holds);
    assert_eq!(vc_decide_kummer(&lm).unwrap().0.verdict, Verdict::Holds);
    let dl = lk.different_valuation().unwrap();
    let dm = lm.different_valuation().unwrap();
    assert_eq!((-1 - dl).rem_euclid(2), (-1 - dm).rem_euclid(2));
    assert_ne!((-1 - dl).rem_euclid(2), 0);
}

fn eisenstein(b: BaseField, steps: &[(&str, &[&str])]) -> Arc<FieldTower> {
    let steps: Vec<ExtensionStep> =
        steps.iter().map(|(l, p)| ExtensionStep::new(l, StepKind::Eisenstein, p)).collect();
    Arc::new(FieldTower::build(b, &steps).unwrap())
}

/// `w = 1/y` with `y^p - y = 1/t`, and for degree `p^2` a uniformizer of the
/// compositum with `z^p - z = 1/t^q`.
fn artin_schreier(p: u64, square: bool) -> GaloisExtension {
    let b = BaseField::laurent(p).unwrap();
    let mut hints: Vec<&[&str]> = vec![];
    let t = match (p, square) {
        (2, false) => eisenstein(b, &[("w", &["t", "t", "1"])]),
        (3, false) => eisenstein(b, &[("w", &["-t", "0", "t", "1"])]),
        (2, true) => eisenstein(b, &[("w", &["t", "t", "1"]), ("u", &["w/(1+w^4)", "w^3/(1+w^4)", "1"])]),
        (3, true) => {
            hints.push(&["w/(1+w)", "(1/w+1)/(1/(w*u)+1/w-1)"]);
            hints.push(&["w", "(1/w)/(1/(w*u)+1)"]);
            eisenstein(b, &[("w", &["-t", "0", "t", "1"]), ("u", &["-w/(1-w^2)", "0", "t", "1"])])
        }
        _ => unreachable!(),
    };
    whole(&t, &hints)
}

#[test]
fn equal_characteristic_holds() {
    for (p, square) in [(2, false), (3, false), (2, true), (3, true)] {
        let ext = artin_schreier(p, square);
        assert!(ext.is_totally_ramified());
        assert_eq!(ext.degree(), if square { p * p } else { p } as usize);
        assert_eq!(vc_decide_structural(&ext, &vec![]).unwrap().verdict, Verdict::Holds);
        assert!(matches!(monte_carlo_vc(&ext, 500, 1, &[]).unwrap(), MonteCarloOutcome::Consistent { .. }));
    }
}
