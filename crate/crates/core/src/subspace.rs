//! `K`-subspaces of `L`, valuation-echelon bases and the set `s(V)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::residue_digits;
use crate::linalg::{is_zero_vec, Matrix, RowSpace, Vector};
use crate::subfield::FieldPair;

const MAX_CANCELLATIONS: usize = 100_000;

/// A set of classes in `Z/nZ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SVal {
    pub n: i64,
    pub classes: BTreeSet<i64>,
}

impl SVal {
    pub fn new(n: i64, classes: impl IntoIterator<Item = i64>) -> Self {
        SVal { n, classes: classes.into_iter().map(|c| c.rem_euclid(n)).collect() }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, c: i64) -> bool {
        self.classes.contains(&c.rem_euclid(self.n))
    }

    pub fn complement(&self) -> SVal {
        SVal::new(self.n, (0..self.n).filter(|c| !self.classes.contains(c)))
    }

    /// `{a - s : s ∈ self}`.
    pub fn reflect(&self, a: i64) -> SVal {
        SVal::new(self.n, self.classes.iter().map(|s| a - s))
    }

    pub fn is_subset(&self, o: &SVal) -> bool {
        self.classes.is_subset(&o.classes)
    }
}

impl fmt::Display for SVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.classes.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}} mod {}", v.join(", "), self.n)
    }
}

/// A `K`-subspace of `L`.
#[derive(Clone, Debug)]
pub struct Subspace {
    pair: FieldPair,
    basis: Vec<Vector>,
    kspan: RowSpace,
    echelon: OnceLock<Result<Vec<(Vector, i64)>>>,
}

impl PartialEq for Subspace {
    fn eq(&self, o: &Self) -> bool {
        self.pair == o.pair && self.kspan == o.kspan
    }
}

impl Subspace {
    /// The `K`-span of `spanning`; zero vectors and dependent ones are dropped.
    pub fn new(pair: &FieldPair, spanning: &[Vector]) -> Result<Self> {
        let t = pair.tower();
        let mut kspan = RowSpace::empty(t.degree());
        let mut basis = vec![];
        for x in spanning {
            if !pair.top.contains(x) {
                return Err(Error::Invalid(format!("spanning vector outside `{}`", pair.top.label())));
            }
            if is_zero_vec(x) || kspan.contains(x) {
                continue;
            }
            for k in pair.bottom.basis() {
                kspan.insert(t.mul(k, x));
            }
            basis.push(x.clone());
        }
        Ok(Subspace { pair: pair.clone(), basis, kspan, echelon: OnceLock::new() })
    }

    pub fn whole(pair: &FieldPair) -> Self {
        Subspace::new(pair, pair.top.basis()).expect("L spans itself")
    }

    pub fn bottom_line(pair: &FieldPair) -> Self {
        Subspace::new(pair, &[pair.tower().one()]).expect("1 lies in L")
    }

    pub fn zero(pair: &FieldPair) -> Self {
        Subspace::new(pair, &[]).unwrap()
    }

    pub fn pair(&self) -> &FieldPair {
        &self.pair
    }

    /// A `K`-basis.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// `K·V` as a base-subspace.
    pub fn base_span(&self) -> &RowSpace {
        &self.kspan
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, x: &[crate::Scalar]) -> bool {
        self.kspan.contains(x)
    }

    pub fn is_subspace_of(&self, o: &Subspace) -> bool {
        self.kspan.is_subspace_of(&o.kspan)
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        Subspace::new(&self.pair, &v).unwrap()
    }

    pub fn intersect(&self, o: &Subspace) -> Subspace {
        let i = self.kspan.intersect(&o.kspan);
        Subspace::new(&self.pair, i.rows()).unwrap()
    }

    /// Basis with valuations (in `v_L`) pairwise distinct modulo `n`.
    pub fn valuation_echelon(&self) -> Result<&[(Vector, i64)]> {
        match self.echelon.get_or_init(|| self.compute_echelon()) {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }

    fn compute_echelon(&self) -> Result<Vec<(Vector, i64)>> {
        let pair = &self.pair;
        if !pair.is_totally_ramified() {
            return Err(Error::NotTotallyRamified);
        }
        let t = pair.tower();
        let n = pair.degree() as i64;
        let vl = |x: &[crate::Scalar]| pair.top.valuation(x).expect("basis vector vanished");
        let digits: Vec<Vector> = residue_digits(&pair.bottom)?
            .into_iter()
            .filter(|d| !is_zero_vec(d))
            .collect();
        let pi = pair.bottom.uniformizer();
        let mut s: Vec<(Vector, i64)> = self.basis.iter().map(|x| (x.clone(), vl(x))).collect();
        let mut steps = 0;
        loop {
            let mut hit = None;
            'outer: for i in 0..s.len() {
                for j in i + 1..s.len() {
                    if (s[i].1 - s[j].1).rem_euclid(n) == 0 {
                        hit = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let Some((i, j)) = hit else { break };
            let (xi, yi) = if s[i].1 > s[j].1 { (j, i) } else { (i, j) };
            let (x, vx) = s[xi].clone();
            let (y, vy) = s[yi].clone();
            let w = t.mul(&x, &t.pow(pi, (vy - vx) / n).unwrap());
            let mut next = None;
            for c in &digits {
                let cand = t.sub(&y, &t.mul(c, &w));
                let v = vl(&cand);
                if v > vy {
                    next = Some((cand, v));
                    break;
                }
            }
            s[yi] = next.ok_or_else(|| Error::Invalid("no residue digit cancels the leading term".into()))?;
            steps += 1;
            if steps > MAX_CANCELLATIONS {
                return Err(Error::PrecisionExhausted("valuation echelon did not settle".into()));
            }
        }
        Ok(s)
    }

    /// `s(V) ⊂ Z/nZ`.
    pub fn s_of_v(&self) -> Result<SVal> {
        let n = self.pair.degree() as i64;
        Ok(SVal::new(n, self.valuation_echelon()?.iter().map(|(_, v)| *v)))
    }

    /// Orthogonal complement for `(x, y) ↦ Tr_{L/K}(xy)`.
    pub fn orthogonal(&self) -> Subspace {
        let pair = &self.pair;
        if self.dim() == 0 {
            return Subspace::whole(pair);
        }
        let t = pair.tower();
        let lb = pair.top.basis();
        let rows: Vec<Vector> = self
            .kspan
            .rows()
            .iter()
            .map(|w| lb.iter().map(|l| pair.trace_to_base(&t.mul(w, l))).collect())
            .collect();
        let ker = Matrix::new(rows, lb.len()).kernel();
        let perp: Vec<Vector> = ker
            .iter()
            .map(|c| {
                let mut y = t.zero();
                for (ci, l) in c.iter().zip(lb) {
                    crate::linalg::axpy(&mut y, ci, l);
                }
                y
            })
            .collect();
        Subspace::new(pair, &perp).unwrap()
    }

    /// `σ(V)` for a map given on coordinates.
    pub fn map(&self, f: impl Fn(&[crate::Scalar]) -> Vector) -> Subspace {
        let v: Vec<Vector> = self.basis.iter().map(|x| f(x)).collect();
        Subspace::new(&self.pair, &v).unwrap()
    }
}

/// Both sides of `s(V⊥) = (Z/nZ) \ (d̄ - s(V))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub dbar: i64,
    pub s_v: SVal,
    pub s_perp: SVal,
    pub predicted: SVal,
    pub holds: bool,
}

pub fn check_duality(v: &Subspace) -> Result<DualityReport> {
    let dbar = v.pair().dbar()?;
    let s_v = v.s_of_v()?;
    let s_perp = v.orthogonal().s_of_v()?;
    let predicted = s_v.reflect(dbar).complement();
    let holds = predicted == s_perp;
    Ok(DualityReport { dbar, s_v, s_perp, predicted, holds })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::arith::{ExtensionStep, FieldTower, StepKind};
    use crate::scalar::BaseField;
    use crate::subfield::Subfield;

    fn gaussian() -> FieldPair {
        let b = BaseField::padic(2).unwrap();
        let t = Arc::new(FieldTower::build(b, &[ExtensionStep::new("i", StepKind::General, &["1", "0", "1"])]).unwrap());
        FieldPair::new(Subfield::top(&t), Subfield::base(&t)).unwrap()
    }

    #[test]
    fn one_and_i_separate() {
        let pair = gaussian();
        let t = pair.tower().clone();
        let v = Subspace::new(&pair, &[t.one(), t.generator(0)]).unwrap();
        assert_eq!(v.s_of_v().unwrap(), SVal::new(2, [0, 1]));
        let k = Subspace::bottom_line(&pair);
        let perp = k.orthogonal();
        assert_eq!(perp.dim(), 1);
        assert!(perp.contains(&t.generator(0)));
        let rep = check_duality(&k).unwrap();
        assert_eq!(rep.dbar, 1);
        assert!(rep.holds, "{rep:?}");
        assert!(check_duality(&Subspace::whole(&pair)).unwrap().holds);
    }
}
