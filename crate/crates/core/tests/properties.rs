use std::sync::OnceLock;

use proptest::prelude::*;

use normval_core::corpus;
use normval_core::document::{BuiltDefinition, FieldDefinitionDocument};
use normval_core::galois::{roots_of_unity_count, GaloisExtension};
use normval_core::kgmod::{is_stable, minimal_submodules};
use normval_core::linalg::{is_zero_vec, Vector};
use normval_core::subfield::FieldPair;
use normval_core::subspace::Subspace;
use normval_core::vc::is_normal;
use normval_core::{FieldElement, FieldTower};

fn built(name: &'static str) -> &'static BuiltDefinition {
    static CACHE: OnceLock<Vec<(&'static str, BuiltDefinition)>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        ["quadratic-q2", "q3-zeta9", "equal-char", "cp2", "z32"]
            .into_iter()
            .map(|n| (n, corpus::load(n).unwrap()))
            .collect()
    });
    &all.iter().find(|(n, _)| *n == name).unwrap().1
}

const SMALL: [&str; 3] = ["quadratic-q2", "q3-zeta9", "equal-char"];

fn element(t: &FieldTower, coords: &[i64], shift: i64) -> Vector {
    let mut x = t.zero();
    for (i, &c) in coords.iter().enumerate().take(t.degree()) {
        x = t.add(&x, &t.mul(&t.int(c), &t.basis(i)));
    }
    let pi = match t.base().variable() {
        Some(v) => t.scalar(v),
        None => t.int(t.base().p() as i64),
    };
    t.mul(&x, &t.pow(&pi, shift).unwrap())
}

fn coords() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..6, 9)
}

fn whole(b: &BuiltDefinition) -> GaloisExtension {
    GaloisExtension::whole(&b.group).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn valuation_is_multiplicative_and_ultrametric(
        which in 0usize..3, a in coords(), b in coords(), sa in -2i64..3, sb in -2i64..3,
    ) {
        let t = &built(SMALL[which]).tower;
        let (x, y) = (element(t, &a, sa), element(t, &b, sb));
        prop_assume!(!is_zero_vec(&x) && !is_zero_vec(&y));
        let (vx, vy) = (t.valuation(&x).unwrap(), t.valuation(&y).unwrap());
        prop_assert_eq!(t.valuation(&t.mul(&x, &y)), Some(vx + vy));
        let s = t.add(&x, &y);
        if let Some(vs) = t.valuation(&s) {
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }
    }

    #[test]
    fn trace_and_norm_are_galois_sum_and_product(which in 0usize..3, a in coords()) {
        let b = built(SMALL[which]);
        let ext = whole(b);
        let t = &b.tower;
        let x = element(t, &a, 0);
        prop_assert_eq!(ext.relative_trace(&x).unwrap(), t.scalar(t.trace(&x)));
        prop_assert_eq!(ext.relative_norm(&x), t.scalar(t.norm(&x)));
    }

    #[test]
    fn automorphisms_preserve_valuation(which in 0usize..3, a in coords(), s in -2i64..3) {
        let b = built(SMALL[which]);
        let t = &b.tower;
        let x = element(t, &a, s);
        prop_assume!(!is_zero_vec(&x));
        for g in b.group.elements() {
            prop_assert_eq!(t.valuation(&g.apply(&x)), t.valuation(&x));
        }
    }

    #[test]
    fn trace_is_transitive(a in coords()) {
        let b = built("quadratic-q2");
        let x = element(&b.tower, &a, 0);
        let top_i = b.extension("top", "I").unwrap();
        let i_base = b.extension("I", "base").unwrap();
        let top_base = b.extension("top", "base").unwrap();
        let stepwise = i_base.relative_trace(&top_i.relative_trace(&x).unwrap()).unwrap();
        prop_assert_eq!(stepwise, top_base.relative_trace(&x).unwrap());
    }

    #[test]
    fn precision_is_sound(a in coords(), b in coords(), n in 4i64..20) {
        let tower = &built("quadratic-q2").tower;
        let x = FieldElement::new(tower, element(tower, &a, 0));
        let y = FieldElement::new(tower, element(tower, &b, 0));
        let at = |k: i64| x.with_precision(k).unwrap().try_mul(&y.with_precision(k).unwrap()).unwrap();
        let coarse = at(n);
        let fine = at(2 * n).with_precision(coarse.precision().unwrap_or(2 * n)).unwrap();
        prop_assert!(coarse.eq_mod_precision(&fine));
    }

    #[test]
    fn normal_elements_have_nonzero_trace(which in 0usize..3, a in coords()) {
        let b = built(SMALL[which]);
        let ext = whole(b);
        let x = element(&b.tower, &a, 0);
        if is_normal(&ext, &x) {
            prop_assert!(!is_zero_vec(&ext.relative_trace(&x).unwrap()));
        }
    }

    #[test]
    fn complement_is_an_involution_and_s_is_monotone(
        spans in prop::collection::vec(coords(), 1..4), extra in coords(),
    ) {
        let b = built("q3-zeta9");
        let t = &b.tower;
        let pair = FieldPair::new(b.field("top").unwrap().clone(), b.field("C").unwrap().clone()).unwrap();
        let span: Vec<Vector> = spans.iter().map(|c| element(t, c, 0)).collect();
        let v = Subspace::new(&pair, &span).unwrap();
        prop_assert_eq!(&v.orthogonal().orthogonal(), &v);
        let w = v.sum(&Subspace::new(&pair, &[element(t, &extra, 0)]).unwrap());
        prop_assert!(v.s_of_v().unwrap().is_subset(&w.s_of_v().unwrap()));
    }
}

#[test]
fn minimal_submodules_are_stable_and_independent() {
    for (name, top, bottom) in [("z32", "L4", "K"), ("q3-zeta9", "top", "C"), ("cp2", "top", "K"), ("quadratic-q2", "top", "base")] {
        let b = built(name);
        let ext = b.extension(top, bottom).unwrap();
        let mods = minimal_submodules(&ext, &b.overrides).unwrap();
        for (i, m) in mods.iter().enumerate() {
            assert!(is_stable(&ext, &m.module), "{name}: module {i} not stable");
            for n in &mods[i + 1..] {
                assert_eq!(m.module.intersect(&n.module).dim(), 0, "{name}: modules meet");
            }
        }
        if name == "cp2" {
            assert_eq!(mods.len(), 4);
            let total = mods.iter().skip(1).fold(mods[0].module.clone(), |acc, m| acc.sum(&m.module));
            assert_eq!(total.dim(), ext.degree());
        }
    }
}

#[test]
fn tame_layer_has_different_e_minus_one() {
    let ext = built("q3-zeta9").extension("C", "base").unwrap();
    assert_eq!(ext.different_valuation().unwrap(), ext.e() as i64 - 1);
}

#[test]
fn roots_of_unity_grow_with_the_field() {
    let b = built("z32");
    let mut fields: Vec<_> = b.fields.values().collect();
    fields.sort_by_key(|f| f.degree());
    for k in &fields {
        for l in &fields {
            if k.is_subfield_of(l) {
                let (rk, rl) = (roots_of_unity_count(k, 32).unwrap(), roots_of_unity_count(l, 32).unwrap());
                assert_eq!(rl % rk, 0, "{} in {}", k.label(), l.label());
            }
        }
    }
}

#[test]
fn definition_documents_round_trip() {
    for name in corpus::names() {
        let doc = corpus::document(name).unwrap();
        let again = FieldDefinitionDocument::from_toml(&doc.to_toml()).unwrap();
        assert_eq!(again, doc, "{name}");
    }
}
