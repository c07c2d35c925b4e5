//! Intermediate fields of a tower, kept as base-subspaces of the top field.

use std::sync::Arc;

use num_integer::Integer;

use crate::arith::FieldTower;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, RowSpace, Vector};

/// A subfield `F` of the top field `T` of a tower.
#[derive(Clone, Debug)]
pub struct Subfield {
    tower: Arc<FieldTower>,
    label: String,
    space: RowSpace,
    e: usize,
    f: usize,
    uniformizer: Vector,
    generator: Option<Vector>,
}

impl PartialEq for Subfield {
    fn eq(&self, o: &Self) -> bool {
        *self.tower == *o.tower && self.space == o.space
    }
}

impl Subfield {
    /// The `level`-th prefix of the tower (`0` is the base field).
    pub fn prefix(tower: &Arc<FieldTower>, level: usize) -> Self {
        let dim = tower.dims()[level];
        let rows = (0..dim).map(|i| tower.basis(i)).collect();
        let (e, f) = tower.steps()[..level]
            .iter()
            .fold((1, 1), |(e, f), s| (e * s.ram_index, f * s.res_degree));
        let uniformizer = if level == 0 {
            tower.scalar(tower.base().uniformizer())
        } else {
            tower.embed(&tower.steps()[level - 1].uniformizer)
        };
        let label = if level == 0 {
            tower.base().to_string()
        } else {
            tower.steps()[level - 1].label.clone()
        };
        let generator = (level > 0).then(|| tower.generator(level - 1));
        Subfield {
            tower: tower.clone(),
            label,
            space: RowSpace::from_rows(rows, tower.degree()),
            e,
            f,
            uniformizer,
            generator,
        }
    }

    pub fn top(tower: &Arc<FieldTower>) -> Self {
        let mut s = Subfield::prefix(tower, tower.steps().len());
        s.label = "top".into();
        s
    }

    pub fn base(tower: &Arc<FieldTower>) -> Self {
        Subfield::prefix(tower, 0)
    }

    /// The base-algebra generated by the given elements.
    pub fn generated_by(tower: &Arc<FieldTower>, label: &str, gens: &[Vector]) -> Result<Self> {
        let mut space = RowSpace::from_rows(vec![tower.one()], tower.degree());
        loop {
            let mut grew = false;
            let rows = space.rows().to_vec();
            for b in &rows {
                for g in gens {
                    grew |= space.insert(tower.mul(b, g));
                }
            }
            if !grew {
                break;
            }
        }
        let gen = (gens.len() == 1).then(|| gens[0].clone());
        Subfield::from_space(tower, label, space, gen)
    }

    /// A base-subspace verified to be closed under multiplication.
    pub fn from_space(
        tower: &Arc<FieldTower>,
        label: &str,
        space: RowSpace,
        generator: Option<Vector>,
    ) -> Result<Self> {
        if !space.contains(&tower.one()) {
            return Err(Error::Invalid(format!("{label}: subspace does not contain 1")));
        }
        let rows = space.rows();
        for a in rows {
            for b in rows {
                if !space.contains(&tower.mul(a, b)) {
                    return Err(Error::Invalid(format!("{label}: subspace is not closed under multiplication")));
                }
            }
        }
        let n = tower.degree();
        let m = space.dim();
        if !n.is_multiple_of(m) {
            return Err(Error::Invalid(format!("{label}: dimension {m} does not divide {n}")));
        }
        for lvl in 0..=tower.steps().len() {
            let pre = Subfield::prefix(tower, lvl);
            if pre.space == space {
                let mut pre = pre;
                pre.label = label.to_string();
                if generator.is_some() {
                    pre.generator = generator;
                }
                return Ok(pre);
            }
        }
        if !tower.is_totally_ramified() {
            return Err(Error::Unsupported(format!(
                "{label}: non-prefix subfields of towers with residue degree > 1"
            )));
        }
        let mut sf = Subfield {
            tower: tower.clone(),
            label: label.to_string(),
            space,
            e: m,
            f: 1,
            uniformizer: vec![],
            generator,
        };
        sf.uniformizer = sf.search_uniformizer()?;
        if sf.generator.is_none() {
            sf.generator = Some(sf.uniformizer.clone());
        }
        Ok(sf)
    }

    /// Combine candidates of known valuation by extended gcd until one has
    /// valuation 1 in this field.
    fn search_uniformizer(&self) -> Result<Vector> {
        let t = &self.tower;
        let rel_e = (t.e() / self.e) as i64;
        let p = t.base().p() as i64;
        let mut best: (Vector, i64) = (t.scalar(t.base().uniformizer()), self.e as i64);
        let mut cands: Vec<Vector> = vec![];
        for row in self.space.rows() {
            cands.push(row.clone());
            for r in 1..p.min(4) {
                cands.push(t.sub(row, &t.int(r)));
            }
        }
        let rows = self.space.rows();
        for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                cands.push(t.add(a, b));
                cands.push(t.sub(&t.sub(a, b), &t.one()));
            }
        }
        for c in cands {
            if best.1 == 1 {
                break;
            }
            let Some(v) = t.valuation(&c) else { continue };
            debug_assert_eq!(v % rel_e, 0);
            let a = v / rel_e;
            let g = a.extended_gcd(&best.1);
            if g.gcd.abs() < best.1 {
                let (s, u) = if g.gcd > 0 { (g.x, g.y) } else { (-g.x, -g.y) };
                let x = t.mul(&t.pow(&c, s).unwrap(), &t.pow(&best.0, u).unwrap());
                best = (x, g.gcd.abs());
            }
        }
        if best.1 == 1 {
            Ok(best.0)
        } else {
            Err(Error::GeneratorSearchFailed)
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn space(&self) -> &RowSpace {
        &self.space
    }

    pub fn basis(&self) -> &[Vector] {
        self.space.rows()
    }

    /// Degree over the base field.
    pub fn degree(&self) -> usize {
        self.space.dim()
    }

    /// Ramification index over the base field.
    pub fn e(&self) -> usize {
        self.e
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn uniformizer(&self) -> &Vector {
        &self.uniformizer
    }

    pub fn generator(&self) -> Option<&Vector> {
        self.generator.as_ref()
    }

    pub fn contains(&self, x: &[crate::Scalar]) -> bool {
        self.space.contains(x)
    }

    pub fn is_subfield_of(&self, o: &Subfield) -> bool {
        self.space.is_subspace_of(&o.space)
    }

    /// Ramification index of the top field over this one.
    pub fn e_top_over(&self) -> usize {
        self.tower.e() / self.e
    }

    /// Valuation normalized for this field; `x` must lie in it.
    pub fn valuation(&self, x: &[crate::Scalar]) -> Option<i64> {
        let v = self.tower.valuation(x)?;
        let r = self.e_top_over() as i64;
        debug_assert_eq!(v % r, 0, "element not in {}", self.label);
        Some(v / r)
    }

    /// Matrix of multiplication by `x ∈ F` on `F` in the echelon basis.
    pub fn mult_matrix(&self, x: &[crate::Scalar]) -> Matrix {
        let cols: Vec<Vector> = self
            .space
            .rows()
            .iter()
            .map(|b| self.space.coords(&self.tower.mul(x, b)).expect("product left the subfield"))
            .collect();
        Matrix::from_columns(&cols, self.degree())
    }

    /// Trace from this field down to the base.
    pub fn trace_to_base(&self, x: &[crate::Scalar]) -> crate::Scalar {
        self.mult_matrix(x).trace()
    }

    pub fn norm_to_base(&self, x: &[crate::Scalar]) -> crate::Scalar {
        self.mult_matrix(x).det()
    }

    /// Minimal polynomial over the base of an element generating this field,
    /// coefficients lowest first, monic.
    pub fn charpoly_over_base(&self, x: &[crate::Scalar]) -> Vec<crate::Scalar> {
        let t = &self.tower;
        let m = self.degree();
        let mut powers = vec![t.one()];
        for _ in 0..m {
            let last = powers.last().unwrap().clone();
            powers.push(t.mul(&last, x));
        }
        let coords: Vec<Vector> = powers.iter().map(|v| self.space.coords(v).unwrap()).collect();
        let a = Matrix::from_columns(&coords[..m], m);
        let rhs: Vector = coords[m].iter().map(|c| c.neg()).collect();
        let mut c = a.solve(&rhs).expect("element does not generate the field");
        c.push(t.base().one());
        c
    }
}

/// A pair `L ⊇ K` of subfields of one tower.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPair {
    pub top: Subfield,
    pub bottom: Subfield,
}

impl FieldPair {
    pub fn new(top: Subfield, bottom: Subfield) -> Result<Self> {
        if !bottom.is_subfield_of(&top) {
            return Err(Error::Invalid(format!("`{}` is not inside `{}`", bottom.label(), top.label())));
        }
        Ok(FieldPair { top, bottom })
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        self.top.tower()
    }

    pub fn degree(&self) -> usize {
        self.top.degree() / self.bottom.degree()
    }

    pub fn e(&self) -> usize {
        self.top.e() / self.bottom.e()
    }

    pub fn is_totally_ramified(&self) -> bool {
        self.e() == self.degree()
    }

    /// `d_{L/K}` by transitivity through the base.
    pub fn different(&self) -> Result<i64> {
        let dl = crate::galois::different_over_base(&self.top)?;
        let dk = crate::galois::different_over_base(&self.bottom)?;
        Ok(dl - self.e() as i64 * dk)
    }

    /// `-d - 1 mod n`.
    pub fn dbar(&self) -> Result<i64> {
        Ok((-self.different()? - 1).rem_euclid(self.degree() as i64))
    }

    /// `Tr_{L/B}(x)` for `x ∈ L`.
    pub fn trace_to_base(&self, x: &[crate::Scalar]) -> crate::Scalar {
        let t = self.tower();
        let k = t.base().from_int((t.degree() / self.top.degree()) as i64);
        if k.is_zero() {
            return self.top.trace_to_base(x);
        }
        t.fast_trace(x).div(&k)
    }
}
