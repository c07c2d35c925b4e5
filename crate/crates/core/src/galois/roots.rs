//! Roots of polynomials inside a subfield by residue-digit tree search with a
//! Hensel certificate, and exact recovery by rational reconstruction.

use crate::arith::FieldTower;
use crate::error::{Error, Result};
use crate::linalg::{is_zero_vec, Vector};
use crate::scalar::BaseKind;
use crate::subfield::Subfield;

/// Deepest digit level explored, in units of the subfield valuation.
pub const MAX_DEPTH: i64 = 512;
const MAX_CANDIDATES: usize = 20_000;

fn derivative(t: &FieldTower, f: &[Vector]) -> Vec<Vector> {
    f.iter().enumerate().skip(1).map(|(i, c)| t.scale(&t.base().from_int(i as i64), c)).collect()
}

/// Representatives of the residue field of `field`.
pub(crate) fn residue_digits(field: &Subfield) -> Result<Vec<Vector>> {
    let t = field.tower();
    let p = t.base().p() as i64;
    let ints: Vec<Vector> = (0..p).map(|r| t.int(r)).collect();
    if field.f() == 1 {
        return Ok(ints);
    }
    let level = t.dims().iter().position(|&d| d == field.degree());
    let u = level
        .and_then(|lvl| t.steps()[..lvl].iter().position(|s| s.res_degree == field.f()))
        .ok_or_else(|| Error::Unsupported("residue digits for this subfield".into()))?;
    let theta = t.generator(u);
    let mut digits = vec![t.zero()];
    let mut power = t.one();
    for _ in 0..field.f() {
        let mut next = vec![];
        for d in &digits {
            for r in 0..p {
                next.push(t.add(d, &t.scale(&t.base().from_int(r), &power)));
            }
        }
        digits = next;
        power = t.mul(&power, &theta);
    }
    Ok(digits)
}

/// Integral monic model `h(y) = π^{sd} f(π^{-s} y)` with the shift `s`.
fn integral_model(field: &Subfield, f: &[Vector]) -> (Vec<Vector>, i64) {
    let t = field.tower();
    let d = f.len() as i64 - 1;
    let r = field.e_top_over() as i64;
    let mut s = 0i64;
    for (i, c) in f.iter().enumerate() {
        if let Some(v) = t.valuation(c) {
            let i = i as i64;
            if i < d && v < 0 {
                let need = (-v + r * (d - i) - 1) / (r * (d - i));
                s = s.max(need);
            }
        }
    }
    if s == 0 {
        return (f.to_vec(), 0);
    }
    let pi = field.uniformizer();
    let h = f
        .iter()
        .enumerate()
        .map(|(i, c)| t.mul(c, &t.pow(pi, s * (d - i as i64)).unwrap()))
        .collect();
    (h, s)
}

/// Taylor coefficients `f^{(i)}(a)/i!`, lowest first.
fn taylor(t: &FieldTower, f: &[Vector], a: &[crate::Scalar]) -> Vec<Vector> {
    let mut c = f.to_vec();
    let mut out = vec![];
    while !c.is_empty() {
        let mut q = vec![t.zero(); c.len() - 1];
        let mut acc = t.zero();
        for i in (0..c.len()).rev() {
            acc = t.add(&t.mul(&acc, a), &c[i]);
            if i > 0 {
                q[i - 1] = acc.clone();
            }
        }
        out.push(acc);
        c = q;
    }
    out
}

/// One certified approximation per root as `(a, v(f'(a)))` in top-field units;
/// exact roots carry `i64::MAX`.
fn certified(field: &Subfield, h: &[Vector], all: bool) -> Result<Vec<(Vector, i64)>> {
    let t = field.tower();
    let r = field.e_top_over() as i64;
    let digits = residue_digits(field)?;
    let dh = derivative(t, h);
    let pi = field.uniformizer().clone();
    let mut out = vec![];
    let mut stack: Vec<(Vector, i64, Vector)> = vec![(t.zero(), 0, t.one())];
    let mut visited = 0usize;
    while let Some((a, k, pik)) = stack.pop() {
        if k > MAX_DEPTH {
            return Err(Error::PrecisionExhausted(format!("root search deeper than {MAX_DEPTH} digits")));
        }
        let next_pik = t.mul(&pik, &pi);
        // `f(a + π^k X) / π^λ` is integral with nonzero reduction; only roots of
        // the reduction can be the next digit.
        let lambda = taylor(t, h, &a)
            .iter()
            .enumerate()
            .filter_map(|(i, b)| t.valuation(b).map(|v| v + i as i64 * k * r))
            .min()
            .unwrap_or(0);
        for dgt in &digits {
            visited += 1;
            if visited > MAX_CANDIDATES {
                return Err(Error::PrecisionExhausted("root search exceeded its candidate budget".into()));
            }
            let cand = t.add(&a, &t.mul(dgt, &pik));
            let vf = t.valuation(&t.eval_poly(h, &cand));
            if vf.is_some_and(|vf| vf <= lambda) {
                continue;
            }
            let vd = t.valuation(&t.eval_poly(&dh, &cand));
            let Some(vf) = vf else {
                if !out.iter().any(|(x, _)| *x == cand) {
                    out.push((cand.clone(), i64::MAX));
                }
                if !all {
                    return Ok(out);
                }
                if vd.is_some_and(|vd| (k + 1) * r > vd) {
                    continue;
                }
                stack.push((cand, k + 1, next_pik.clone()));
                continue;
            };
            if let Some(vd) = vd {
                if vf > 2 * vd && (k + 1) * r > vd {
                    out.push((cand, vd));
                    if !all {
                        return Ok(out);
                    }
                    continue;
                }
            }
            stack.push((cand, k + 1, next_pik.clone()));
        }
    }
    Ok(out)
}

/// Whether `f` has a root in `field`.
pub fn has_root(field: &Subfield, f: &[Vector]) -> Result<bool> {
    let (h, _) = integral_model(field, f);
    Ok(!certified(field, &h, false)?.is_empty())
}

/// Newton iteration truncated to precision `n`, then coordinatewise rational
/// reconstruction; `None` when the result does not satisfy `h` exactly.
fn recover(t: &FieldTower, h: &[Vector], dh: &[Vector], a: &Vector, vd: i64, n: i64) -> Option<Vector> {
    let mut a = a.clone();
    for _ in 0..64 {
        let fa = t.eval_poly(h, &a);
        match t.valuation(&fa) {
            None => return Some(a),
            Some(v) if v >= n + 2 * vd => break,
            _ => {}
        }
        let step = t.mul(&fa, &t.inv(&t.eval_poly(dh, &a))?);
        a = t.truncate(&t.sub(&a, &step), n + 2 * vd);
    }
    let e = t.e() as i64;
    let bv = t.basis_valuations();
    let rec: Option<Vector> = a
        .iter()
        .zip(bv)
        .map(|(c, &b)| t.base().reconstruct(c, (n - b).div_euclid(e) - 1))
        .collect();
    let rec = rec?;
    is_zero_vec(&t.eval_poly(h, &rec)).then_some(rec)
}

/// Every root of `f` in `field` (just one when `all` is false) as exact elements.
pub fn hensel_roots(field: &Subfield, f: &[Vector], all: bool) -> Result<Vec<Vector>> {
    let t = field.tower();
    let (h, s) = integral_model(field, f);
    let dh = derivative(t, &h);
    let approx = certified(field, &h, all)?;
    let mut roots: Vec<Vector> = vec![];
    for (a, vd) in approx {
        let y = if vd == i64::MAX {
            a
        } else {
            let mut n = 32 * t.e() as i64;
            let ceiling = 2048 * t.e() as i64;
            loop {
                if let Some(y) = recover(t, &h, &dh, &a, vd, n) {
                    break y;
                }
                n *= 2;
                if n > ceiling {
                    return Err(Error::PrecisionExhausted(
                        "root has no exact representative within the reconstruction ceiling".into(),
                    ));
                }
            }
        };
        let x = if s == 0 { y } else { t.mul(&y, &t.pow(field.uniformizer(), -s).unwrap()) };
        debug_assert!(is_zero_vec(&t.eval_poly(f, &x)));
        if !roots.contains(&x) {
            roots.push(x);
        }
    }
    Ok(roots)
}

/// Coefficients of the `p^j`-th cyclotomic polynomial.
pub fn cyclotomic_prime_power(t: &FieldTower, p: u64, j: u32) -> Vec<Vector> {
    if j == 0 {
        return vec![t.int(-1), t.one()];
    }
    let step = p.pow(j - 1) as usize;
    let deg = step * (p as usize - 1);
    (0..=deg).map(|i| if i % step == 0 { t.one() } else { t.zero() }).collect()
}

fn prime_power_part(m: u64, p: u64) -> (u32, u64) {
    let mut k = 0;
    let mut rest = m;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (k, rest)
}

/// Exact `ζ_{p^1}, ..., ζ_{p^j}` in `field` with `ζ_{p^i}^p = ζ_{p^{i-1}}`, for
/// the largest `j ≤ k` possible. A primitive `p^i`-th root forces `φ(p^i) | e`.
fn root_chain(field: &Subfield, k: u32) -> Result<Vec<Vector>> {
    let t = field.tower();
    let p = t.base().p();
    let mut chain: Vec<Vector> = vec![];
    for j in 1..=k {
        if !(field.e() as u64).is_multiple_of(p.pow(j - 1) * (p - 1)) {
            break;
        }
        let f = match chain.last() {
            None => cyclotomic_prime_power(t, p, 1),
            Some(z) => {
                let mut f = vec![t.zero(); p as usize + 1];
                f[0] = t.neg(z);
                f[p as usize] = t.one();
                f
            }
        };
        match hensel_roots(field, &f, false)?.into_iter().next() {
            Some(z) => chain.push(z),
            None => break,
        }
    }
    Ok(chain)
}

/// Largest divisor `r` of `m` such that `field` contains a primitive `r`-th root of unity.
pub fn roots_of_unity_count(field: &Subfield, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Invalid("m must be positive".into()));
    }
    let t = field.tower();
    let p = t.base().p();
    let (k, rest) = prime_power_part(m, p);
    let q1 = p.pow(field.f() as u32) - 1;
    let tame = num_integer::gcd(rest, q1);
    if t.base().kind() == BaseKind::LaurentSeries {
        return Ok(tame);
    }
    Ok(p.pow(root_chain(field, k)?.len() as u32) * tame)
}

/// An exact primitive `p^j`-th root of unity in `field`, if one exists.
pub fn primitive_root_of_unity(field: &Subfield, j: u32) -> Result<Option<Vector>> {
    let t = field.tower();
    if j == 0 {
        return Ok(Some(t.one()));
    }
    if t.base().kind() == BaseKind::LaurentSeries {
        return Ok(None);
    }
    let chain = root_chain(field, j)?;
    Ok((chain.len() == j as usize).then(|| chain[j as usize - 1].clone()))
}
