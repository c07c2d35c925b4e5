//! Exact linear algebra over the base scalars.

use crate::scalar::{BaseField, Scalar};

pub type Vector = Vec<Scalar>;

/// Dense matrix stored as rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: Vec<Vector>,
    pub ncols: usize,
}

impl Matrix {
    pub fn new(rows: Vec<Vector>, ncols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == ncols));
        Matrix { rows, ncols }
    }

    pub fn zeros(base: &BaseField, nrows: usize, ncols: usize) -> Self {
        Matrix { rows: vec![vec![base.zero(); ncols]; nrows], ncols }
    }

    pub fn identity(base: &BaseField, n: usize) -> Self {
        let mut m = Matrix::zeros(base, n, n);
        for i in 0..n {
            m.rows[i][i] = base.one();
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector], nrows: usize) -> Self {
        let rows = (0..nrows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        Matrix { rows, ncols: cols.len() }
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, j: usize) -> Vector {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let cols: Vec<Vector> = self.rows.clone();
        Matrix::from_columns(&cols, self.ncols)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        self.rows.iter().map(|r| dot(r, v)).collect()
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let cols: Vec<Vector> = (0..o.ncols).map(|j| self.mul_vec(&o.column(j))).collect();
        Matrix::from_columns(&cols, self.nrows())
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = self.rows[0][0].clone();
        for i in 1..self.nrows() {
            acc = acc.add(&self.rows[i][i]);
        }
        acc
    }

    pub fn rank(&self) -> usize {
        let full = self.nrows().min(self.ncols);
        if crate::modular::rank_lower_bound(&self.rows, self.ncols) == Some(full) {
            return full;
        }
        RowSpace::from_rows(self.rows.clone(), self.ncols).dim()
    }

    /// Determinant by Gaussian elimination with a small-height pivot choice.
    pub fn det(&self) -> Scalar {
        let n = self.nrows();
        assert_eq!(n, self.ncols, "determinant of a non-square matrix");
        let mut a = self.rows.clone();
        let mut det: Option<Scalar> = None;
        let mut sign = false;
        for c in 0..n {
            let Some(piv) = pick_pivot(&a, c, c) else {
                return zero_like(&self.rows[0][0]);
            };
            if piv != c {
                a.swap(piv, c);
                sign = !sign;
            }
            let pv = a[c][c].clone();
            let inv = pv.inv();
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].mul(&inv);
                for k in c..n {
                    let t = f.mul(&a[c][k]);
                    a[r][k] = a[r][k].sub(&t);
                }
            }
            det = Some(match det {
                None => pv,
                Some(d) => d.mul(&pv),
            });
        }
        let d = det.unwrap_or_else(|| one_like(&self.rows[0][0]));
        if sign {
            d.neg()
        } else {
            d
        }
    }

    /// Right kernel `{x : A x = 0}` as a basis.
    pub fn kernel(&self) -> Vec<Vector> {
        let rs = RowSpace::from_rows(self.rows.clone(), self.ncols);
        rs.annihilator()
    }

    /// Solve `A x = b` for square invertible `A`.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vector> {
        let n = self.nrows();
        let mut aug: Vec<Vector> = self
            .rows
            .iter()
            .zip(b)
            .map(|(r, bi)| {
                let mut r = r.clone();
                r.push(bi.clone());
                r
            })
            .collect();
        for c in 0..n {
            let piv = pick_pivot(&aug, c, c)?;
            aug.swap(piv, c);
            let inv = aug[c][c].inv();
            for k in c..=n {
                aug[c][k] = aug[c][k].mul(&inv);
            }
            for r in 0..n {
                if r == c || aug[r][c].is_zero() {
                    continue;
                }
                let f = aug[r][c].clone();
                for k in c..=n {
                    let t = f.mul(&aug[c][k]);
                    aug[r][k] = aug[r][k].sub(&t);
                }
            }
        }
        Some(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.nrows();
        let zero = zero_like(&self.rows[0][0]);
        let one = one_like(&self.rows[0][0]);
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![zero.clone(); n];
            e[j] = one.clone();
            cols.push(self.solve(&e)?);
        }
        Some(Matrix::from_columns(&cols, n))
    }
}

fn zero_like(s: &Scalar) -> Scalar {
    s.sub(s)
}

fn one_like(s: &Scalar) -> Scalar {
    s.pow(0)
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc: Option<Scalar> = None;
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let t = x.mul(y);
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t),
        });
    }
    acc.unwrap_or_else(|| zero_like(&a[0]))
}

pub fn axpy(y: &mut [Scalar], a: &Scalar, x: &[Scalar]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi = yi.add(&a.mul(xi));
        }
    }
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

fn pick_pivot(a: &[Vector], start: usize, col: usize) -> Option<usize> {
    (start..a.len())
        .filter(|&r| !a[r][col].is_zero())
        .min_by_key(|&r| a[r][col].height())
}

/// A subspace of `base^n` kept in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowSpace {
    rows: Vec<Vector>,
    pivots: Vec<usize>,
    ncols: usize,
}

impl RowSpace {
    pub fn empty(ncols: usize) -> Self {
        RowSpace { rows: vec![], pivots: vec![], ncols }
    }

    pub fn from_rows(rows: Vec<Vector>, ncols: usize) -> Self {
        let mut rs = RowSpace::empty(ncols);
        for r in rows {
            rs.insert(r);
        }
        rs
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` against the current rows.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if !v[pc].is_zero() {
                let f = v[pc].neg();
                axpy(&mut v, &f, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Insert a vector; returns true when the dimension grew.
    pub fn insert(&mut self, v: Vector) -> bool {
        let mut v = self.reduce(&v);
        let Some(pc) = v.iter().position(|x| !x.is_zero()) else { return false };
        let inv = v[pc].inv();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = x.mul(&inv);
            }
        }
        for row in self.rows.iter_mut() {
            if !row[pc].is_zero() {
                let f = row[pc].neg();
                axpy(row, &f, &v);
            }
        }
        let pos = self.pivots.iter().position(|&p| p > pc).unwrap_or(self.pivots.len());
        self.rows.insert(pos, v);
        self.pivots.insert(pos, pc);
        true
    }

    /// Coordinates of `v` with respect to the echelon rows, if `v` lies in the span.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vector> {
        let c: Vector = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut r = v.to_vec();
        for (ci, row) in c.iter().zip(&self.rows) {
            axpy(&mut r, &ci.neg(), row);
        }
        if is_zero_vec(&r) {
            Some(c)
        } else {
            None
        }
    }

    pub fn combine(&self, coords: &[Scalar]) -> Vector {
        let zero = zero_like(&self.rows[0][0]);
        let mut out = vec![zero; self.ncols];
        for (c, row) in coords.iter().zip(&self.rows) {
            axpy(&mut out, c, row);
        }
        out
    }

    /// Basis of `{x : r·x = 0 for every row r}`.
    pub fn annihilator(&self) -> Vec<Vector> {
        let n = self.ncols;
        let Some(sample) = self.rows.first().and_then(|r| r.first()).cloned() else {
            return vec![];
        };
        let zero = zero_like(&sample);
        let one = one_like(&sample);
        let free: Vec<usize> = (0..n).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![zero.clone(); n];
                x[f] = one.clone();
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    x[pc] = row[f].neg();
                }
                x
            })
            .collect()
    }

    pub fn sum(&self, o: &RowSpace) -> RowSpace {
        let mut s = self.clone();
        for r in &o.rows {
            s.insert(r.clone());
        }
        s
    }

    pub fn is_subspace_of(&self, o: &RowSpace) -> bool {
        self.rows.iter().all(|r| o.contains(r))
    }

    /// Intersection via kernel of the stacked basis.
    pub fn intersect(&self, o: &RowSpace) -> RowSpace {
        if self.dim() == 0 || o.dim() == 0 {
            return RowSpace::empty(self.ncols);
        }
        // Solve sum a_i u_i - sum b_j w_j = 0.
        let mut cols: Vec<Vector> = self.rows.clone();
        cols.extend(o.rows.iter().map(|w| w.iter().map(Scalar::neg).collect::<Vector>()));
        let m = Matrix::from_columns(&cols, self.ncols);
        let mut out = RowSpace::empty(self.ncols);
        for k in m.kernel() {
            out.insert(self.combine(&k[..self.dim()]));
        }
        out
    }
}
