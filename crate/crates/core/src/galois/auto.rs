use std::collections::HashMap;
use std::sync::Arc;

use crate::arith::{FieldElement, FieldTower};
use crate::error::{Error, Result};
use crate::linalg::{is_zero_vec, Matrix, Vector};
use crate::scalar::Scalar;
use crate::subfield::Subfield;

use super::roots::hensel_roots;

/// Largest extension degree handled by automorphism search.
pub const MAX_GROUP_ORDER: usize = 64;

/// A base-linear field automorphism of the top field of a tower.
#[derive(Clone, Debug)]
pub struct Automorphism {
    tower: Arc<FieldTower>,
    images: Vec<Vector>,
    matrix: Matrix,
}

impl PartialEq for Automorphism {
    fn eq(&self, o: &Self) -> bool {
        self.images == o.images
    }
}

/// Images of every basis monomial up to prefix level `upto`.
fn monomial_images(t: &FieldTower, images: &[Vector], upto: usize) -> Vec<Vector> {
    let dims = t.dims();
    let mut mono = vec![t.one()];
    for (j, img) in images.iter().enumerate().take(upto) {
        let d = dims[j + 1] / dims[j];
        for k in 1..d {
            for i in 0..dims[j] {
                let prev = &mono[(k - 1) * dims[j] + i];
                mono.push(t.mul(prev, img));
            }
        }
    }
    mono
}

/// Apply the partial map defined by `mono` to an element of the prefix it covers.
fn apply_mono(t: &FieldTower, mono: &[Vector], x: &[Scalar]) -> Vector {
    let mut out = t.zero();
    for (c, m) in x.iter().zip(mono) {
        if !c.is_zero() {
            crate::linalg::axpy(&mut out, c, m);
        }
    }
    out
}

/// Step `j`'s defining polynomial with the automorphism applied to its coefficients.
fn conjugate_poly(t: &FieldTower, mono: &[Vector], j: usize) -> Vec<Vector> {
    t.steps()[j].poly.iter().map(|c| apply_mono(t, mono, &t.embed(c))).collect()
}

impl Automorphism {
    pub fn identity(tower: &Arc<FieldTower>) -> Self {
        let images = (0..tower.steps().len()).map(|j| tower.generator(j)).collect();
        Automorphism::from_images(tower, images).expect("identity")
    }

    /// Build from the images of the step generators, checking that each lands
    /// on a root of the conjugated step polynomial.
    pub fn from_images(tower: &Arc<FieldTower>, images: Vec<Vector>) -> Result<Self> {
        let t = tower;
        if images.len() != t.steps().len() {
            return Err(Error::Invalid(format!(
                "expected {} generator images, got {}",
                t.steps().len(),
                images.len()
            )));
        }
        for (j, img) in images.iter().enumerate() {
            let mono = monomial_images(t, &images, j);
            let g = conjugate_poly(t, &mono, j);
            if !is_zero_vec(&t.eval_poly(&g, img)) {
                let label = &t.steps()[j].label;
                return Err(Error::Invalid(format!("{label}: image is not a root of the step polynomial")));
            }
        }
        let mono = monomial_images(t, &images, images.len());
        let matrix = Matrix::from_columns(&mono, t.degree());
        Ok(Automorphism { tower: tower.clone(), images, matrix })
    }

    /// Parse generator images given as expressions in the step labels.
    pub fn parse(tower: &Arc<FieldTower>, images: &[&str]) -> Result<Self> {
        let v = images.iter().map(|s| tower.parse(s)).collect::<Result<Vec<_>>>()?;
        Automorphism::from_images(tower, v)
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn images(&self) -> &[Vector] {
        &self.images
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Scalar]) -> Vector {
        self.matrix.mul_vec(x)
    }

    pub fn apply_elem(&self, x: &FieldElement) -> FieldElement {
        let c = self.apply(x.coords());
        let y = FieldElement::new(&self.tower, c);
        match x.precision() {
            None => y,
            Some(n) => y.with_precision(n).expect("positive precision"),
        }
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Automorphism) -> Automorphism {
        let images: Vec<Vector> = o.images.iter().map(|v| self.apply(v)).collect();
        let matrix = self.matrix.mul(&o.matrix);
        Automorphism { tower: self.tower.clone(), images, matrix }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, v)| *v == self.tower.generator(j))
    }

    pub fn fixes(&self, x: &[Scalar]) -> bool {
        self.apply(x) == x
    }
}

/// The group `Aut(T/K)` for the top field `T` of a tower over a subfield `K`.
#[derive(Clone, Debug)]
pub struct GaloisGroup {
    tower: Arc<FieldTower>,
    bottom: Subfield,
    elements: Vec<Automorphism>,
    table: Vec<Vec<usize>>,
}

/// A subgroup as a bitmask of element indices.
pub type SubgroupMask = u64;

impl GaloisGroup {
    /// Close `gens` under composition; its order must equal `[T:K]`.
    pub fn generate(tower: &Arc<FieldTower>, bottom: &Subfield, gens: &[Automorphism]) -> Result<Self> {
        let degree = tower.degree() / bottom.degree();
        for g in gens {
            if !bottom.basis().iter().all(|b| g.fixes(b)) {
                return Err(Error::Invalid(format!("automorphism does not fix `{}`", bottom.label())));
            }
        }
        let mut elements = vec![Automorphism::identity(tower)];
        let mut frontier = 0;
        while frontier < elements.len() {
            let x = elements[frontier].clone();
            frontier += 1;
            for g in gens {
                let y = g.compose(&x);
                if !elements.contains(&y) {
                    if elements.len() >= degree {
                        return Err(Error::Invalid(format!(
                            "generators produce more than [{}:{}] = {degree} automorphisms",
                            "top",
                            bottom.label()
                        )));
                    }
                    elements.push(y);
                }
            }
        }
        if elements.len() != degree {
            return Err(Error::NotGalois { found: elements.len(), degree });
        }
        let mut group = GaloisGroup {
            tower: tower.clone(),
            bottom: bottom.clone(),
            elements,
            table: vec![],
        };
        group.build_table();
        Ok(group)
    }

    /// All automorphisms of the top field fixing `bottom`: hints first, then
    /// exhaustive root lifting of each step polynomial.
    pub fn find(tower: &Arc<FieldTower>, bottom: &Subfield, hints: &[Automorphism]) -> Result<Self> {
        let degree = tower.degree() / bottom.degree();
        if degree > MAX_GROUP_ORDER {
            return Err(Error::Unsupported(format!("extension degree {degree} exceeds {MAX_GROUP_ORDER}")));
        }
        match GaloisGroup::generate(tower, bottom, hints) {
            Err(Error::NotGalois { .. }) => {}
            other => return other,
        }
        let all = search_automorphisms(tower)?;
        let fixing: Vec<Automorphism> = all
            .into_iter()
            .filter(|s| bottom.basis().iter().all(|b| s.fixes(b)))
            .collect();
        GaloisGroup::generate(tower, bottom, &fixing)
    }

    fn build_table(&mut self) {
        let n = self.elements.len();
        let index: HashMap<String, usize> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("{:?}", s.images), i))
            .collect();
        self.table = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = self.elements[i].compose(&self.elements[j]);
                        index[&format!("{:?}", c.images)]
                    })
                    .collect()
            })
            .collect();
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn bottom(&self) -> &Subfield {
        &self.bottom
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Automorphism] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Automorphism {
        &self.elements[i]
    }

    /// `table[i][j]` is the index of `σ_i ∘ σ_j`.
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        (0..self.order()).find(|&j| self.table[i][j] == 0).expect("group element without inverse")
    }

    pub fn pow(&self, i: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.table[acc][i])
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

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
    }

    /// Index of the element whose images match `s`.
    pub fn index_of(&self, s: &Automorphism) -> Option<usize> {
        self.elements.iter().position(|x| x == s)
    }

    pub fn mask(&self, idx: &[usize]) -> SubgroupMask {
        idx.iter().fold(0, |m, &i| m | (1 << i))
    }

    pub fn members(&self, mask: SubgroupMask) -> Vec<usize> {
        (0..self.order()).filter(|i| mask >> i & 1 == 1).collect()
    }

    pub fn full(&self) -> SubgroupMask {
        if self.order() == 64 {
            u64::MAX
        } else {
            (1u64 << self.order()) - 1
        }
    }

    pub fn is_subgroup(&self, mask: SubgroupMask) -> bool {
        let m = self.members(mask);
        mask & 1 == 1 && m.iter().all(|&a| m.iter().all(|&b| mask >> self.table[a][b] & 1 == 1))
    }

    /// Subgroup generated by the given elements.
    pub fn generated(&self, gens: &[usize]) -> SubgroupMask {
        let mut mask: SubgroupMask = 1;
        let mut list = vec![0];
        let mut k = 0;
        while k < list.len() {
            let x = list[k];
            k += 1;
            for &g in gens {
                let y = self.table[g][x];
                if mask >> y & 1 == 0 {
                    mask |= 1 << y;
                    list.push(y);
                }
            }
        }
        mask
    }

    /// Every subgroup, ordered by size then mask.
    pub fn subgroups(&self) -> Vec<SubgroupMask> {
        let mut found: Vec<SubgroupMask> = vec![1];
        let mut k = 0;
        while k < found.len() {
            let h = found[k];
            k += 1;
            for g in 0..self.order() {
                if h >> g & 1 == 1 {
                    continue;
                }
                let mut gens = self.members(h);
                gens.push(g);
                let s = self.generated(&gens);
                if !found.contains(&s) {
                    found.push(s);
                }
            }
        }
        found.sort_by_key(|m| (m.count_ones(), *m));
        found
    }

    pub fn is_cyclic_mask(&self, mask: SubgroupMask) -> bool {
        let n = mask.count_ones() as usize;
        self.members(mask).iter().any(|&g| self.element_order(g) == n)
    }

    /// Generators with their orders, forming a direct-product decomposition
    /// when a greedy choice finds one.
    pub fn abelian_presentation(&self) -> Vec<(usize, usize)> {
        let mut out = vec![];
        let mut sub: SubgroupMask = 1;
        while sub != self.full() {
            let best = (0..self.order())
                .filter(|&g| {
                    let c = self.generated(&[g]);
                    c & sub == 1
                })
                .max_by_key(|&g| self.element_order(g));
            let g = match best {
                Some(g) => g,
                None => (0..self.order()).find(|&g| sub >> g & 1 == 0).unwrap(),
            };
            out.push((g, self.element_order(g)));
            let mut gens: Vec<usize> = out.iter().map(|x| x.0).collect();
            gens.sort();
            sub = self.generated(&gens);
        }
        out
    }
}

/// Every automorphism of the top field over the base, by lifting roots of
/// each conjugated step polynomial.
pub(crate) fn search_automorphisms(tower: &Arc<FieldTower>) -> Result<Vec<Automorphism>> {
    let t = tower;
    let top = Subfield::top(tower);
    let mut partial: Vec<Vec<Vector>> = vec![vec![]];
    for j in 0..t.steps().len() {
        let mut next = vec![];
        for imgs in &partial {
            let mono = monomial_images(t, imgs, j);
            let g = conjugate_poly(t, &mono, j);
            for r in hensel_roots(&top, &g, true)? {
                let mut v = imgs.clone();
                v.push(r);
                next.push(v);
            }
        }
        partial = next;
    }
    partial.into_iter().map(|imgs| Automorphism::from_images(tower, imgs)).collect()
}
