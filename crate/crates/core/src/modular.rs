//! Reduction of base-field matrices into a finite field. The rank of the image
//! never exceeds the true rank, so a full-rank image certifies full rank.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::fpoly::{inv_mod, FpPoly};
use crate::linalg::Vector;
use crate::scalar::Scalar;

const PRIME: u64 = (1 << 61) - 1;
const POLY_FIELD_BITS: f64 = 24.0;

trait Residues {
    type E: Clone;
    fn reduce(&self, s: &Scalar) -> Option<Self::E>;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn sub_mul(&self, a: &Self::E, b: &Self::E, c: &Self::E) -> Self::E;
    fn div(&self, a: &Self::E, b: &Self::E) -> Self::E;
}

struct PrimeField;

fn mod_big(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(PRIME)).to_u64().unwrap()
}

impl Residues for PrimeField {
    type E = u64;

    fn reduce(&self, s: &Scalar) -> Option<u64> {
        let Scalar::Rat(q) = s else { return None };
        let d = mod_big(q.denom());
        (d != 0).then(|| (mod_big(q.numer()) as u128 * inv_mod(d, PRIME) as u128 % PRIME as u128) as u64)
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn sub_mul(&self, a: &u64, b: &u64, c: &u64) -> u64 {
        let bc = (*b as u128 * *c as u128 % PRIME as u128) as u64;
        (a + PRIME - bc) % PRIME
    }

    fn div(&self, a: &u64, b: &u64) -> u64 {
        (*a as u128 * inv_mod(*b, PRIME) as u128 % PRIME as u128) as u64
    }
}

/// `F_p[t]/(g)` for an irreducible `g`.
struct PolyField {
    g: FpPoly,
    order: u128,
}

fn poly_field(p: u64) -> Arc<PolyField> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<PolyField>>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
    cache.entry(p).or_insert_with(|| Arc::new(PolyField::new(p))).clone()
}

impl PolyField {
    fn new(p: u64) -> Self {
        let k = (POLY_FIELD_BITS / (p as f64).log2()).ceil().max(2.0) as usize;
        let g = (1u64..)
            .map(|mut x| {
                let mut coeffs = vec![0u64; k + 1];
                for c in coeffs.iter_mut().take(k) {
                    *c = x % p;
                    x /= p;
                }
                coeffs[k] = 1;
                FpPoly::new(p, coeffs)
            })
            .find(|g| g.is_irreducible())
            .unwrap();
        PolyField { g, order: (p as u128).pow(k as u32) }
    }

    fn mulmod(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        a.mul(b).div_rem(&self.g).1
    }

    fn inv(&self, a: &FpPoly) -> FpPoly {
        let mut e = self.order - 2;
        let mut base = a.clone();
        let mut r = FpPoly::constant(a.modulus(), 1);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mulmod(&r, &base);
            }
            base = self.mulmod(&base, &base);
            e >>= 1;
        }
        r
    }
}

impl Residues for PolyField {
    type E = FpPoly;

    fn reduce(&self, s: &Scalar) -> Option<FpPoly> {
        let Scalar::Fpt(f) = s else { return None };
        let d = f.den().div_rem(&self.g).1;
        if d.is_zero() {
            return None;
        }
        Some(self.mulmod(&f.num().div_rem(&self.g).1, &self.inv(&d)))
    }

    fn is_zero(&self, a: &FpPoly) -> bool {
        a.is_zero()
    }

    fn sub_mul(&self, a: &FpPoly, b: &FpPoly, c: &FpPoly) -> FpPoly {
        a.sub(&self.mulmod(b, c))
    }

    fn div(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        self.mulmod(a, &self.inv(b))
    }
}

fn rank_in<F: Residues>(f: &F, rows: &[Vector], ncols: usize) -> Option<usize> {
    let mut m: Vec<Vec<F::E>> = rows
        .iter()
        .map(|r| r.iter().map(|s| f.reduce(s)).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !f.is_zero(&m[r][c])) else { continue };
        m.swap(rank, piv);
        let pivot_row = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if f.is_zero(&row[c]) {
                continue;
            }
            let factor = f.div(&row[c], &pivot_row[c]);
            for k in c..ncols {
                row[k] = f.sub_mul(&row[k], &factor, &pivot_row[k]);
            }
        }
        rank += 1;
    }
    Some(rank)
}

/// A lower bound for the rank, or `None` when some entry does not reduce.
pub(crate) fn rank_lower_bound(rows: &[Vector], ncols: usize) -> Option<usize> {
    match rows.first()?.first()? {
        Scalar::Rat(_) => rank_in(&PrimeField, rows, ncols),
        Scalar::Fpt(x) => rank_in(&*poly_field(x.modulus()), rows, ncols),
    }
}

fn inv_mod_composite(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m as i128) as u64
}

fn valuation_u64(mut x: u64, p: u64) -> i64 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// `v_p(det A)` by elimination in `Z/p^N` with full pivoting on the least
/// valuation, which loses no precision. `None` when `p^N` does not separate
/// the remaining entries from zero.
pub(crate) fn padic_det_valuation(rows: &[Vector], p: u64) -> Option<i64> {
    let n = rows.len();
    let digits = (62.0 / (p as f64).log2()).floor() as u32;
    let modulus = p.pow(digits);
    let big_m = BigInt::from(modulus);
    let mut shift = 0i64;
    let mut a: Vec<Vec<u64>> = Vec::with_capacity(n);
    for row in rows {
        let mut vals = Vec::with_capacity(row.len());
        for s in row {
            let Scalar::Rat(q) = s else { return None };
            vals.push((q, crate::scalar::rat_valuation(q, p)));
        }
        let lo = vals.iter().filter_map(|(_, v)| *v).min()?;
        shift += lo;
        let pb = BigInt::from(p);
        let mut out = Vec::with_capacity(row.len());
        for (q, v) in vals {
            let Some(v) = v else {
                out.push(0);
                continue;
            };
            let k = v - lo;
            if k >= digits as i64 {
                out.push(0);
                continue;
            }
            let (mut num, mut den) = (q.numer().clone(), q.denom().clone());
            if v > 0 {
                num /= pb.pow(v as u32);
            } else if v < 0 {
                den /= pb.pow((-v) as u32);
            }
            let num = num.mod_floor(&big_m).to_u64().unwrap();
            let den = den.mod_floor(&big_m).to_u64().unwrap();
            let unit = (num as u128 * inv_mod_composite(den, modulus) as u128 % modulus as u128) as u64;
            out.push((unit as u128 * p.pow(k as u32) as u128 % modulus as u128) as u64);
        }
        a.push(out);
    }
    let mut total = shift;
    let mut live_rows: Vec<usize> = (0..n).collect();
    let mut live_cols: Vec<usize> = (0..n).collect();
    while !live_rows.is_empty() {
        let mut best: Option<(i64, usize, usize)> = None;
        for (ri, &r) in live_rows.iter().enumerate() {
            for (ci, &c) in live_cols.iter().enumerate() {
                let x = a[r][c];
                if x != 0 {
                    let v = valuation_u64(x, p);
                    if best.is_none_or(|b| v < b.0) {
                        best = Some((v, ri, ci));
                    }
                }
            }
        }
        let (v0, ri, ci) = best?;
        let (pr, pc) = (live_rows.swap_remove(ri), live_cols.swap_remove(ci));
        total += v0;
        let pv = p.pow(v0 as u32);
        let u_inv = inv_mod_composite(a[pr][pc] / pv, modulus);
        let pivot_row = a[pr].clone();
        for &r in &live_rows {
            if a[r][pc] == 0 {
                continue;
            }
            let f = ((a[r][pc] / pv) as u128 * u_inv as u128 % modulus as u128) as u64;
            for &c in &live_cols {
                let t = (f as u128 * pivot_row[c] as u128 % modulus as u128) as u64;
                a[r][c] = (a[r][c] + modulus - t) % modulus;
            }
            a[r][pc] = 0;
        }
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;
    use proptest::prelude::*;

    use super::*;
    use crate::linalg::Matrix;
    use crate::scalar::rat_valuation;

    fn matrix(entries: &[(i64, i64)], n: usize) -> Vec<Vector> {
        entries
            .chunks(n)
            .map(|r| r.iter().map(|&(a, b)| Scalar::Rat(BigRational::new(a.into(), b.into()))).collect())
            .collect()
    }

    proptest! {
        #[test]
        fn matches_exact_determinant(
            p in prop::sample::select(vec![2u64, 3, 5]),
            n in 1usize..6,
            seed in prop::collection::vec((-40i64..40, 1i64..17), 36),
        ) {
            let rows = matrix(&seed[..n * n], n);
            let exact = Matrix::new(rows.clone(), n).det();
            let Scalar::Rat(q) = exact else { unreachable!() };
            match rat_valuation(&q, p) {
                Some(v) => prop_assert_eq!(padic_det_valuation(&rows, p), Some(v)),
                None => prop_assert_eq!(padic_det_valuation(&rows, p), None),
            }
        }
    }
}
