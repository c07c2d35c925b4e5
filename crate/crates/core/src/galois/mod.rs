//! Automorphism groups, relative traces, ramification invariants and roots of unity.

mod auto;
mod ext;
mod roots;

pub(crate) use roots::residue_digits;

pub use auto::{Automorphism, GaloisGroup, SubgroupMask, MAX_GROUP_ORDER};
pub use ext::{different_over_base, fixed_field, fixing_subgroup, GaloisExtension, RamificationData};
pub use roots::{
    cyclotomic_prime_power, has_root, hensel_roots, primitive_root_of_unity, roots_of_unity_count, MAX_DEPTH,
};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::arith::{ExtensionStep, FieldTower, StepKind};
    use crate::scalar::BaseField;
    use crate::subfield::Subfield;

    fn tower(p: u64, kind: StepKind, poly: &[&str]) -> Arc<FieldTower> {
        let b = BaseField::padic(p).unwrap();
        Arc::new(FieldTower::build(b, &[ExtensionStep::new("a", kind, poly)]).unwrap())
    }

    fn cyclotomic_2k(n: usize) -> Arc<FieldTower> {
        let mut poly = vec!["1"];
        poly.extend(std::iter::repeat_n("0", n / 2 - 1));
        poly.push("1");
        let b = BaseField::padic(2).unwrap();
        Arc::new(FieldTower::build(b, &[ExtensionStep::new("z", StepKind::General, &poly)]).unwrap())
    }

    fn whole(t: &Arc<FieldTower>, hints: &[&str]) -> GaloisExtension {
        let hint = Automorphism::parse(t, hints).unwrap();
        let g = GaloisGroup::find(t, &Subfield::base(t), &[hint]).unwrap();
        GaloisExtension::whole(&Arc::new(g)).unwrap()
    }

    #[test]
    fn gaussian_conjugation() {
        let t = tower(2, StepKind::General, &["1", "0", "1"]);
        let ext = whole(&t, &["-a"]);
        assert_eq!(ext.degree(), 2);
        assert_eq!(ext.relative_trace(&t.generator(0)).unwrap(), t.zero());
        let found = GaloisGroup::find(&t, &Subfield::base(&t), &[]);
        let found = found.unwrap_or_else(|e| panic!("{e:?}"));
        assert_eq!(found.order(), 2);
        assert!(found.elements().iter().any(|s| s.images()[0] == t.parse("-a").unwrap()));
    }

    #[test]
    fn differents_of_quadratics() {
        let t = tower(2, StepKind::Eisenstein, &["-2", "0", "1"]);
        let ext = whole(&t, &["-a"]);
        assert_eq!(ext.different_valuation().unwrap(), 3);
        assert_eq!(ext.trace_ideal_image(0).unwrap(), 0);
        assert_eq!(ext.trace_ideal_image(1).unwrap(), 0);
        assert_eq!(ext.trace_ideal_image(2).unwrap(), 1);

        let t = tower(2, StepKind::Eisenstein, &["2", "-2", "1"]);
        let ext = whole(&t, &["2 - a"]);
        assert_eq!(ext.different_valuation().unwrap(), 2);
        assert_eq!(ext.trace_ideal_image(-1).unwrap(), -1);

        let t = tower(3, StepKind::Eisenstein, &["-3", "0", "1"]);
        let ext = whole(&t, &["-a"]);
        assert_eq!(ext.ramification().unwrap().d, 1);
    }

    #[test]
    fn zeta16_over_sqrt_minus_two() {
        let t = cyclotomic_2k(16);
        let k = Subfield::generated_by(&t, "K", &[t.parse("z^2 + z^6").unwrap()]).unwrap();
        let g = GaloisGroup::find(&t, &k, &[Automorphism::parse(&t, &["z^3"]).unwrap()]).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_abelian());
        let index2: Vec<_> = g.subgroups().into_iter().filter(|m| m.count_ones() == 2).collect();
        assert_eq!(index2.len(), 1);
        let l2 = fixed_field(&g, index2[0], "L2").unwrap();
        assert_eq!(l2.degree(), 4);
        assert!(l2.contains(&t.parse("z^2").unwrap()));
        assert_eq!(roots_of_unity_count(&k, 8).unwrap(), 2);
        let ext = GaloisExtension::new(&Arc::new(g), &Subfield::top(&t), &l2).unwrap();
        assert_eq!(ext.relative_trace(&t.generator(0)).unwrap(), t.zero());
    }

    #[test]
    fn roots_of_unity() {
        let t = tower(2, StepKind::General, &["1", "0", "1"]);
        let k = Subfield::top(&t);
        assert_eq!(roots_of_unity_count(&k, 4).unwrap(), 4);
        assert_eq!(roots_of_unity_count(&k, 8).unwrap(), 4);
        let z = primitive_root_of_unity(&k, 2).unwrap().unwrap();
        assert_eq!(t.mul(&z, &z), t.int(-1));
        let q3 = Arc::new(FieldTower::base_only(BaseField::padic(3).unwrap()));
        assert_eq!(roots_of_unity_count(&Subfield::base(&q3), 3).unwrap(), 1);
        assert_eq!(roots_of_unity_count(&Subfield::base(&q3), 6).unwrap(), 2);
    }
}
