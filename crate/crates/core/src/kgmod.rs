//! `K[G]`-submodules of `L` for abelian `G`.

use std::sync::Arc;

use crate::arith::{FieldElement, FieldTower};
use crate::error::{Error, Result};
use crate::galois::{has_root, Automorphism, primitive_root_of_unity, roots_of_unity_count, GaloisExtension};
use crate::linalg::{is_zero_vec, Matrix, Vector};
use crate::scalar::BaseKind;
use crate::subfield::{FieldPair, Subfield};
use crate::subspace::Subspace;

/// Polynomial with coefficients in a subfield, lowest degree first.
pub type KPoly = Vec<Vector>;

fn poly_mul(t: &FieldTower, a: &[Vector], b: &[Vector]) -> KPoly {
    let mut out = vec![t.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = t.add(&out[i + j], &t.mul(x, y));
        }
    }
    out
}

/// `X^n - c`.
fn binomial(t: &FieldTower, n: usize, c: &Vector) -> KPoly {
    let mut f = vec![t.zero(); n + 1];
    f[0] = t.neg(c);
    f[n] = t.one();
    f
}

pub fn poly_to_string(t: &Arc<FieldTower>, f: &[Vector]) -> String {
    let mut terms = vec![];
    for (k, c) in f.iter().enumerate().rev() {
        if is_zero_vec(c) {
            continue;
        }
        let coef = FieldElement::new(t, c.clone()).to_string();
        let mono = match k {
            0 => String::new(),
            1 => "X".into(),
            _ => format!("X^{k}"),
        };
        terms.push(match (k, c == &t.one()) {
            (0, _) => format!("({coef})"),
            (_, true) => mono,
            _ => format!("({coef})*{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// How a factorization was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorSource {
    /// Recursive binomial factorization with roots of unity found in `K`.
    Structural,
    /// `K` contains no `p`-th root of unity and `gcd(e_K, φ(p^j)) = 1`.
    EisensteinCertificate,
    /// Characteristic `p`: `X^n - 1 = (X - 1)^n`.
    Inseparable,
    Explicit,
}

/// `X^n - 1 = Π f_i^{m_i}` over `K`.
#[derive(Clone, Debug)]
pub struct CyclotomicFactorization {
    pub n: usize,
    pub factors: Vec<KPoly>,
    pub multiplicities: Vec<usize>,
    pub source: FactorSource,
    /// Whether every factor is certified irreducible.
    pub certified: bool,
}

impl CyclotomicFactorization {
    pub fn product(&self, t: &FieldTower) -> KPoly {
        let mut acc = vec![t.one()];
        for (f, &m) in self.factors.iter().zip(&self.multiplicities) {
            for _ in 0..m {
                acc = poly_mul(t, &acc, f);
            }
        }
        acc
    }

    /// A user-supplied factor list, checked against `X^n - 1` exactly.
    pub fn explicit(field: &Subfield, n: usize, factors: Vec<KPoly>) -> Result<Self> {
        let t = field.tower();
        for f in &factors {
            if f.iter().any(|c| !field.contains(c)) {
                return Err(Error::Invalid(format!("factor coefficient outside `{}`", field.label())));
            }
            if f.last() != Some(&t.one()) {
                return Err(Error::Invalid("factors must be monic".into()));
            }
        }
        let multiplicities = vec![1; factors.len()];
        let mut fz = CyclotomicFactorization {
            n,
            factors,
            multiplicities,
            source: FactorSource::Explicit,
            certified: false,
        };
        if fz.product(t) != binomial(t, n, &t.one()) {
            return Err(Error::Invalid(format!("factors do not multiply to X^{n} - 1")));
        }
        let mut all = true;
        for f in &fz.factors {
            let deg = f.len() - 1;
            all &= deg == 1 || (deg <= 3 && !has_root(field, f)?);
        }
        fz.certified = all;
        Ok(fz)
    }
}

fn prime_power_exponent(n: usize, p: usize) -> Option<u32> {
    let mut k = 0;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    (m == 1).then_some(k)
}

/// Factor `X^n - 1` over `K` for `n` a power of `p`.
pub fn factor_xn_minus_1(field: &Subfield, n: usize) -> Result<CyclotomicFactorization> {
    let t = field.tower();
    let p = t.base().p() as usize;
    let Some(k) = prime_power_exponent(n, p) else {
        return Err(Error::HypothesisViolated(format!("{n} is not a power of {p}")));
    };
    if t.base().kind() == BaseKind::LaurentSeries {
        return Ok(CyclotomicFactorization {
            n,
            factors: vec![vec![t.int(-1), t.one()]],
            multiplicities: vec![n],
            source: FactorSource::Inseparable,
            certified: true,
        });
    }
    let r = roots_of_unity_count(field, n as u64)? as usize;
    let mut factors: Vec<KPoly> = vec![vec![t.int(-1), t.one()]];
    let source;
    if r == 1 && k > 0 {
        let e = field.e();
        for j in 1..=k {
            let phi = (p - 1) * p.pow(j - 1);
            if num_integer::gcd(e, phi) != 1 {
                return Err(Error::HypothesisViolated(format!(
                    "no p-th roots of unity and gcd(e, {phi}) > 1; supply the factors explicitly"
                )));
            }
            factors.push(crate::galois::cyclotomic_prime_power(t, p as u64, j));
        }
        source = FactorSource::EisensteinCertificate;
    } else {
        let rj = prime_power_exponent(r, p).unwrap();
        let zeta = if rj == 0 { t.one() } else { primitive_root_of_unity(field, rj)?.expect("root counted") };
        for j in 1..=k {
            let nj = p.pow(j);
            if p == 2 && nj >= 8 && r == 2 {
                return Err(Error::HypothesisViolated(
                    "p = 2, 8 | n and r = 2; supply the factors explicitly".into(),
                ));
            }
            let rr = r.min(nj);
            let base = t.pow(&zeta, (r / rr) as i64).unwrap();
            for a in (1..rr).filter(|a| a % p != 0) {
                factors.push(binomial(t, nj / rr, &t.pow(&base, a as i64).unwrap()));
            }
        }
        source = FactorSource::Structural;
    }
    let multiplicities = vec![1; factors.len()];
    Ok(CyclotomicFactorization { n, factors, multiplicities, source, certified: true })
}

/// `ker f(σ)` on `L` as a `K`-subspace.
pub fn kernel_of_poly(pair: &FieldPair, f: &[Vector], sigma: &Automorphism) -> Subspace {
    let t = pair.tower();
    let lb = pair.top.basis();
    let cols: Vec<Vector> = lb
        .iter()
        .map(|l| {
            let mut acc = t.zero();
            let mut cur = l.clone();
            for (k, c) in f.iter().enumerate() {
                if k > 0 {
                    cur = sigma.apply(&cur);
                }
                if !is_zero_vec(c) {
                    acc = t.add(&acc, &t.mul(c, &cur));
                }
            }
            acc
        })
        .collect();
    let ker = Matrix::from_columns(&cols, t.degree()).kernel();
    Subspace::new(pair, &combine(t, lb, &ker)).unwrap()
}

fn combine(t: &FieldTower, basis: &[Vector], coeffs: &[Vector]) -> Vec<Vector> {
    coeffs
        .iter()
        .map(|c| {
            let mut y = t.zero();
            for (ci, b) in c.iter().zip(basis) {
                crate::linalg::axpy(&mut y, ci, b);
            }
            y
        })
        .collect()
}

/// `{x ∈ L : σ_g(x) = χ(g)·x}` for the given `(element index, value)` pairs of `Gal(L/K)`.
pub fn eigenspace(ext: &GaloisExtension, chi: &[(usize, Vector)]) -> Result<Subspace> {
    let t = ext.tower();
    let lb = ext.top().basis();
    let mut rows: Vec<Vector> = vec![];
    for (g, val) in chi {
        let cols: Vec<Vector> = lb.iter().map(|l| t.sub(&ext.apply(*g, l), &t.mul(val, l))).collect();
        rows.extend(Matrix::from_columns(&cols, t.degree()).rows().iter().cloned());
    }
    let ker = Matrix::new(rows, lb.len()).kernel();
    if ker.is_empty() {
        return Err(Error::EmptyEigenspace);
    }
    let pair = FieldPair::new(ext.top().clone(), ext.bottom().clone())?;
    Ok(Subspace::new(&pair, &combine(t, lb, &ker)).unwrap())
}

/// A minimal nonzero `K[G]`-submodule with where it came from.
#[derive(Clone, Debug)]
pub struct MinimalSubmodule {
    pub module: Subspace,
    /// Label of the cyclic subextension `E` containing the module.
    pub field: String,
    /// Degree `[E:K]`.
    pub field_degree: usize,
    pub factor: KPoly,
}

/// Explicit factorizations keyed by `n`, for cases outside the structural lemma.
/// A list is used only where the lemma does not apply, and only over bottom
/// fields containing all of its coefficients.
pub type FactorOverrides = Vec<(usize, Vec<KPoly>)>;

/// All minimal nonzero `K[G]`-submodules of `L`, through the cyclic
/// subextensions `E = L^H` with `G/H` cyclic.
pub fn minimal_submodules(ext: &GaloisExtension, overrides: &FactorOverrides) -> Result<Vec<MinimalSubmodule>> {
    if !ext.is_abelian() {
        return Err(Error::Unsupported("minimal submodules of non-abelian extensions".into()));
    }
    let g = ext.group();
    let k = ext.bottom();
    let pair = FieldPair::new(ext.top().clone(), k.clone())?;
    let mut out: Vec<MinimalSubmodule> = vec![];
    let subgroups: Vec<_> = g
        .subgroups()
        .into_iter()
        .filter(|&h| h & ext.h_top() == ext.h_top() && h & !ext.h_bottom() == 0)
        .collect();
    for h in subgroups.into_iter().rev() {
        let m = ext.h_bottom().count_ones() as usize / h.count_ones() as usize;
        let hm = g.members(h);
        let Some(tau) = g.members(ext.h_bottom()).into_iter().find(|&x| {
            let mut gens = hm.clone();
            gens.push(x);
            g.generated(&gens) == ext.h_bottom()
        }) else {
            continue;
        };
        let label = format!("E{m}");
        let e = ext.intermediate(h, &label)?;
        let fits = |fs: &Vec<KPoly>| fs.iter().flatten().all(|c| k.contains(c));
        let fz = match factor_xn_minus_1(k, m) {
            Err(Error::HypothesisViolated(why)) => match overrides.iter().find(|(n, fs)| *n == m && fits(fs)) {
                Some((_, fs)) => CyclotomicFactorization::explicit(k, m, fs.clone())?,
                None => return Err(Error::HypothesisViolated(why)),
            },
            r => r?,
        };
        let epair = FieldPair::new(e.clone(), k.clone())?;
        let sigma = g.element(tau);
        for f in &fz.factors {
            let v = kernel_of_poly(&epair, f, sigma);
            if v.dim() == 0 {
                continue;
            }
            let v = Subspace::new(&pair, v.basis())?;
            if fz.source != FactorSource::Inseparable && v.dim() != f.len() - 1 {
                return Err(Error::Invalid(format!(
                    "kernel of {} has dimension {}, expected {}",
                    poly_to_string(ext.tower(), f),
                    v.dim(),
                    f.len() - 1
                )));
            }
            if fz.source == FactorSource::Inseparable && v.dim() != 1 {
                return Err(Error::Invalid("fixed space of σ is not K".into()));
            }
            if out.iter().any(|w| w.module == v) {
                continue;
            }
            out.push(MinimalSubmodule { module: v, field: label.clone(), field_degree: m, factor: f.clone() });
        }
    }
    out.sort_by_key(|w| (w.module.dim(), w.field_degree));
    Ok(out)
}

/// Submodules `ker(τ^k - 1)` and `ker(1 + τ^k + ... + τ^{m-k})` of every
/// cyclic subextension `E`, for `k | m = [E:K]`. They need no factorization of
/// `X^m - 1`, so they exist for any degree.
pub fn cyclotomic_kernel_modules(ext: &GaloisExtension) -> Result<Vec<Subspace>> {
    let g = ext.group();
    let t = ext.tower();
    let k = ext.bottom();
    let pair = FieldPair::new(ext.top().clone(), k.clone())?;
    let mut out: Vec<Subspace> = vec![];
    for h in g.subgroups() {
        if h & ext.h_top() != ext.h_top() || h & !ext.h_bottom() != 0 || h == ext.h_bottom() {
            continue;
        }
        let m = ext.h_bottom().count_ones() as usize / h.count_ones() as usize;
        let hm = g.members(h);
        let Some(tau) = g.members(ext.h_bottom()).into_iter().find(|&x| {
            let mut gens = hm.clone();
            gens.push(x);
            g.generated(&gens) == ext.h_bottom()
        }) else {
            continue;
        };
        let e = ext.intermediate(h, "E")?;
        let epair = FieldPair::new(e, k.clone())?;
        for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
            let mut sum = vec![t.zero(); m - d + 1];
            for j in (0..m).step_by(d) {
                sum[j] = t.one();
            }
            for f in [binomial(t, d, &t.one()), sum] {
                let v = kernel_of_poly(&epair, &f, g.element(tau));
                let v = Subspace::new(&pair, v.basis())?;
                if v.dim() > 0 && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    Ok(out)
}

/// Whether `v` is stable under every element of `Gal(L/K)`.
pub fn is_stable(ext: &GaloisExtension, v: &Subspace) -> bool {
    (0..ext.degree()).all(|i| v.basis().iter().all(|x| v.contains(&ext.apply(i, x))))
}
