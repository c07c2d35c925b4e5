use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith::FieldTower;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, RowSpace, Vector};
use crate::scalar::Scalar;
use crate::subfield::Subfield;

use super::auto::{GaloisGroup, SubgroupMask};

/// Ramification invariants of `L/K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationData {
    pub n: usize,
    pub e: usize,
    pub f: usize,
    /// Valuation of the different, in `v_L`.
    pub d: i64,
    /// `-d - 1 mod e`.
    pub dbar: i64,
}

/// A Galois pair `L/K` of subfields of the top field `T`, with
/// `Gal(L/K) = H_K / H_L` for the groups fixing each field.
#[derive(Clone, Debug)]
pub struct GaloisExtension {
    group: Arc<GaloisGroup>,
    top: Subfield,
    bottom: Subfield,
    h_top: SubgroupMask,
    h_bottom: SubgroupMask,
    reps: Vec<usize>,
    table: Vec<Vec<usize>>,
    trace_map: OnceLock<Matrix>,
}

/// Elements of `group` fixing every basis vector of `field`.
pub fn fixing_subgroup(group: &GaloisGroup, field: &Subfield) -> SubgroupMask {
    let idx: Vec<usize> = (0..group.order())
        .filter(|&i| field.basis().iter().all(|b| group.element(i).fixes(b)))
        .collect();
    group.mask(&idx)
}

/// The subfield of `T` fixed by a subgroup.
pub fn fixed_field(group: &GaloisGroup, sub: SubgroupMask, label: &str) -> Result<Subfield> {
    if !group.is_subgroup(sub) {
        return Err(Error::Invalid("element set is not a subgroup".into()));
    }
    let t = group.tower();
    let n = t.degree();
    let members = group.members(sub);
    if members.len() == 1 {
        return Ok(Subfield::top(t).with_label(label));
    }
    let mut rows = vec![];
    for &i in &members[1..] {
        let m = group.element(i).matrix();
        for r in 0..n {
            let mut row = m.transpose().column(r);
            row[r] = row[r].sub(&t.base().one());
            rows.push(row);
        }
    }
    let kernel = Matrix::new(rows, n).kernel();
    let space = RowSpace::from_rows(kernel, n);
    if space.dim() * members.len() != n {
        return Err(Error::Invalid("fixed field has the wrong dimension".into()));
    }
    Subfield::from_space(t, label, space, None)
}

impl GaloisExtension {
    pub fn new(group: &Arc<GaloisGroup>, top: &Subfield, bottom: &Subfield) -> Result<Self> {
        if !bottom.is_subfield_of(top) {
            return Err(Error::Invalid(format!("`{}` is not inside `{}`", bottom.label(), top.label())));
        }
        if !group.bottom().is_subfield_of(bottom) {
            return Err(Error::Invalid(format!(
                "`{}` does not contain the group's fixed field",
                bottom.label()
            )));
        }
        let h_top = fixing_subgroup(group, top);
        let h_bottom = fixing_subgroup(group, bottom);
        let n = top.degree() / bottom.degree();
        let quot = (h_bottom.count_ones() / h_top.count_ones()) as usize;
        if quot != n || h_top.count_ones() as usize * top.degree() != group.tower().degree() {
            return Err(Error::NotGalois { found: quot, degree: n });
        }
        for a in group.members(h_bottom) {
            for h in group.members(h_top) {
                let c = group.mul(group.mul(a, h), group.inverse(a));
                if h_top >> c & 1 == 0 {
                    return Err(Error::NotGalois { found: quot, degree: n });
                }
            }
        }
        let mut reps = vec![];
        let mut covered: SubgroupMask = 0;
        for a in group.members(h_bottom) {
            if covered >> a & 1 == 1 {
                continue;
            }
            reps.push(a);
            for h in group.members(h_top) {
                covered |= 1 << group.mul(a, h);
            }
        }
        let coset_of = |x: usize| -> usize {
            reps.iter()
                .position(|&r| h_top >> group.mul(group.inverse(r), x) & 1 == 1)
                .unwrap()
        };
        let table = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| coset_of(group.mul(a, b))).collect())
            .collect();
        Ok(GaloisExtension {
            group: group.clone(),
            top: top.clone(),
            bottom: bottom.clone(),
            h_top,
            h_bottom,
            reps,
            table,
            trace_map: OnceLock::new(),
        })
    }

    /// `T` over the group's fixed field.
    pub fn whole(group: &Arc<GaloisGroup>) -> Result<Self> {
        GaloisExtension::new(group, &Subfield::top(group.tower()), group.bottom())
    }

    pub fn group(&self) -> &Arc<GaloisGroup> {
        &self.group
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        self.group.tower()
    }

    pub fn top(&self) -> &Subfield {
        &self.top
    }

    pub fn bottom(&self) -> &Subfield {
        &self.bottom
    }

    pub fn degree(&self) -> usize {
        self.reps.len()
    }

    pub fn h_top(&self) -> SubgroupMask {
        self.h_top
    }

    pub fn h_bottom(&self) -> SubgroupMask {
        self.h_bottom
    }

    /// Parent-group index of each element of `Gal(L/K)`.
    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.degree();
        (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
    }

    pub fn element_order(&self, i: usize) -> usize {
        let mut k = 1;
        let mut x = i;
        while x != 0 {
            x = self.table[x][i];
            k += 1;
        }
        k
    }

    /// Exponent of `Gal(L/K)`.
    pub fn exponent(&self) -> usize {
        (0..self.degree()).map(|i| self.element_order(i)).fold(1, num_integer::lcm)
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.degree()).any(|i| self.element_order(i) == self.degree())
    }

    /// `σ_i(x)` for the `i`-th element of `Gal(L/K)`.
    pub fn apply(&self, i: usize, x: &[Scalar]) -> Vector {
        self.group.element(self.reps[i]).apply(x)
    }

    /// `Tr_{L/K}(x)`, checked to lie in `K`.
    pub fn relative_trace(&self, x: &[Scalar]) -> Result<Vector> {
        let m = self.trace_map.get_or_init(|| {
            let t = self.tower();
            let mats: Vec<&Matrix> = self.reps.iter().map(|&r| self.group.element(r).matrix()).collect();
            let rows = (0..t.degree())
                .map(|i| {
                    (0..t.degree())
                        .map(|j| mats.iter().fold(t.base().zero(), |acc, m| acc.add(&m.rows[i][j])))
                        .collect()
                })
                .collect();
            Matrix::new(rows, t.degree())
        });
        let s = m.mul_vec(x);
        if !self.bottom.contains(&s) {
            return Err(Error::Invalid("trace does not lie in the bottom field".into()));
        }
        Ok(s)
    }

    pub fn relative_norm(&self, x: &[Scalar]) -> Vector {
        let t = self.tower();
        (0..self.degree()).fold(t.one(), |acc, i| t.mul(&acc, &self.apply(i, x)))
    }

    /// Intermediate field `L^H` for the parent subgroup `H` with `H_L ≤ H ≤ H_K`.
    pub fn intermediate(&self, h: SubgroupMask, label: &str) -> Result<Subfield> {
        if h & self.h_top != self.h_top || h & !self.h_bottom != 0 {
            return Err(Error::Invalid("subgroup is not between the pair's groups".into()));
        }
        fixed_field(&self.group, h, label)
    }

    /// Parent subgroup corresponding to a subgroup of `Gal(L/K)` given by element indices.
    pub fn lift_subgroup(&self, idx: &[usize]) -> SubgroupMask {
        let g = &self.group;
        let mut m = 0;
        for &i in idx {
            for h in g.members(self.h_top) {
                m |= 1 << g.mul(self.reps[i], h);
            }
        }
        m
    }

    /// The pair `E/F` for fields between `K` and `L`.
    pub fn sub_pair(&self, top: &Subfield, bottom: &Subfield) -> Result<GaloisExtension> {
        GaloisExtension::new(&self.group, top, bottom)
    }

    pub fn e(&self) -> usize {
        self.top.e() / self.bottom.e()
    }

    pub fn f(&self) -> usize {
        self.top.f() / self.bottom.f()
    }

    pub fn is_totally_ramified(&self) -> bool {
        self.e() == self.degree()
    }

    pub fn different_valuation(&self) -> Result<i64> {
        let dl = different_over_base(&self.top)?;
        let dk = different_over_base(&self.bottom)?;
        Ok(dl - self.e() as i64 * dk)
    }

    pub fn ramification(&self) -> Result<RamificationData> {
        let n = self.degree();
        let d = self.different_valuation()?;
        Ok(RamificationData { n, e: self.e(), f: self.f(), d, dbar: (-d - 1).rem_euclid(self.e() as i64) })
    }

    /// Lifts to `L` of a basis of the residue field of `L` over that of `K`.
    pub fn residue_basis(&self) -> Vec<Vector> {
        let t = self.tower();
        let f = self.f();
        if f == 1 {
            return vec![t.one()];
        }
        let u = t.steps().iter().position(|s| s.res_degree == f).expect("residue-extending step");
        let theta = t.generator(u);
        (0..f as i64).map(|j| t.pow(&theta, j).unwrap()).collect()
    }

    /// `v_K(Tr_{L/K}(𝔭_L^{i-d}))`, from the `O_K`-basis `ω_a π_L^{i-d+k}` of the ideal.
    pub fn trace_ideal_image(&self, i: i64) -> Result<i64> {
        let t = self.tower();
        let d = self.different_valuation()?;
        let pi = self.top.uniformizer();
        let omegas = self.residue_basis();
        let mut best: Option<i64> = None;
        let mut pk = t.pow(pi, i - d).unwrap();
        for _ in 0..self.e() {
            for w in &omegas {
                let tr = self.relative_trace(&t.mul(w, &pk))?;
                if let Some(v) = self.bottom.valuation(&tr) {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
            pk = t.mul(&pk, pi);
        }
        best.ok_or_else(|| Error::Invalid("all traces vanish".into()))
    }
}

/// `d_{F/B}` for a subfield `F` over the base: transitivity along monogenic
/// prefix steps, or else the derivative of the minimal polynomial of a uniformizer.
pub fn different_over_base(field: &Subfield) -> Result<i64> {
    let t = field.tower();
    if let Some(level) = t.dims().iter().position(|&d| d == field.degree()) {
        if *field == Subfield::prefix(t, level) {
            match prefix_different(t, level) {
                Err(Error::NotMonogenicPresentation(_)) if field.f() == 1 => {}
                r => return r,
            }
        }
    }
    if field.f() != 1 {
        return Err(Error::NotMonogenicPresentation(field.label().into()));
    }
    let pi = field.uniformizer();
    let h = field.charpoly_over_base(pi);
    let b = t.base();
    let mut deriv = t.zero();
    let mut pw = t.one();
    for (i, c) in h.iter().enumerate().skip(1) {
        let coef = c.mul(&b.from_int(i as i64));
        deriv = t.add(&deriv, &t.scale(&coef, &pw));
        pw = t.mul(&pw, pi);
    }
    field.valuation(&deriv).ok_or_else(|| Error::Invalid("inseparable uniformizer".into()))
}

fn prefix_different(t: &FieldTower, level: usize) -> Result<i64> {
    let mut d = 0i64;
    let mut e_below = 1i64;
    for j in 0..level {
        let s = &t.steps()[j];
        if !s.monogenic {
            return Err(Error::NotMonogenicPresentation(s.label.clone()));
        }
        let e_j = e_below * s.ram_index as i64;
        let theta = t.generator(j);
        let deriv: Vec<Vector> = s
            .poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| t.scale(&t.base().from_int(i as i64), &t.embed(c)))
            .collect();
        let g1 = t.eval_poly(&deriv, &theta);
        let v = t.valuation(&g1).ok_or_else(|| Error::Invalid(format!("{}: inseparable step", s.label)))?;
        let rel = t.e() as i64 / e_j;
        d = v / rel + s.ram_index as i64 * d;
        e_below = e_j;
    }
    Ok(d)
}
