use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{is_normal, project_trace_zero, trace_pivot, Witness};
use crate::error::Result;
use crate::galois::{residue_digits, GaloisExtension};
use crate::linalg::{is_zero_vec, Vector};
use crate::subfield::Subfield;
use crate::subspace::Subspace;

const DIRECTED_PER_MODULE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub enum MonteCarloOutcome {
    Refuted(Witness),
    Consistent { trials: usize },
}

/// Random units `Σ c_k π^k` with digits `c_k`, from a table of all products `c·π^k`.
struct UnitSampler {
    table: Vec<Vec<Vector>>,
    nonzero: Vec<usize>,
}

impl UnitSampler {
    fn new(field: &Subfield, terms: usize) -> Result<Self> {
        let t = field.tower();
        let digits = residue_digits(field)?;
        let nonzero = (0..digits.len()).filter(|&i| !is_zero_vec(&digits[i])).collect();
        let mut pk = t.one();
        let mut table = vec![];
        for _ in 0..terms {
            table.push(digits.iter().map(|c| t.mul(c, &pk)).collect());
            pk = t.mul(&pk, field.uniformizer());
        }
        Ok(UnitSampler { table, nonzero })
    }

    fn sample(&self, field: &Subfield, rng: &mut ChaCha8Rng, unit: bool) -> Vector {
        let t = field.tower();
        let mut x = t.zero();
        for (k, row) in self.table.iter().enumerate() {
            let i = if k == 0 && unit { *self.nonzero.choose(rng).unwrap() } else { rng.gen_range(0..row.len()) };
            x = t.add(&x, &row[i]);
        }
        x
    }
}

/// Random elements `π_L^c · u` of `L` with `u` a unit of a fixed number of digits.
pub struct ClassSampler<'a> {
    ext: &'a GaloisExtension,
    units: UnitSampler,
}

impl<'a> ClassSampler<'a> {
    pub fn new(ext: &'a GaloisExtension, terms: usize) -> Result<Self> {
        Ok(ClassSampler { ext, units: UnitSampler::new(ext.top(), terms.max(1))? })
    }

    pub fn sample(&self, class: i64, rng: &mut ChaCha8Rng) -> Vector {
        let l = self.ext.top();
        let t = self.ext.tower();
        t.mul(&t.pow(l.uniformizer(), class).unwrap(), &self.units.sample(l, rng, true))
    }
}

/// A random `π_L^c · u` with `u` a unit built from `terms` random digits.
pub fn random_element_of_class(ext: &GaloisExtension, class: i64, terms: usize, rng: &mut ChaCha8Rng) -> Result<Vector> {
    Ok(ClassSampler::new(ext, terms)?.sample(class, rng))
}

/// A random element of `w` with valuation class `class`, if `class ∈ s(w)`.
fn random_in_subspace(
    ext: &GaloisExtension,
    w: &Subspace,
    class: i64,
    units: &UnitSampler,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vector>> {
    let n = ext.degree() as i64;
    let ech = w.valuation_echelon()?;
    let Some(j) = ech.iter().position(|(_, v)| (v - class).rem_euclid(n) == 0) else { return Ok(None) };
    let t = ext.tower();
    let k = ext.bottom();
    let pi = k.uniformizer();
    let lead_shift: i64 = rng.gen_range(0..2);
    let lead = n * lead_shift + ech[j].1;
    let mut x = t.zero();
    for (i, (b, v)) in ech.iter().enumerate() {
        let shift = if i == j {
            lead_shift
        } else {
            let mut s = lead_shift;
            while n * s + v <= lead {
                s += 1;
            }
            s + rng.gen_range(0..2)
        };
        let a = t.mul(&units.sample(k, rng, i == j), &t.pow(pi, shift).unwrap());
        x = t.add(&x, &t.mul(&a, b));
    }
    Ok(Some(x))
}

/// Search for a non-normal element of class `d̄`: first inside `directed` (or the
/// trace-zero hyperplane when `L/K` is not totally ramified), then uniformly.
pub fn monte_carlo_vc(ext: &GaloisExtension, trials: usize, seed: u64, directed: &[Subspace]) -> Result<MonteCarloOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = ext.ramification()?;
    let l = ext.top();
    let terms = 2 * ext.degree();
    let mut done = 0;
    let refute = |x: Vector| {
        let valuation = l.valuation(&x).unwrap();
        MonteCarloOutcome::Refuted(Witness { element: x, valuation, module_s: None })
    };
    if ext.is_totally_ramified() {
        let units = UnitSampler::new(ext.bottom(), terms)?;
        for w in directed {
            for _ in 0..DIRECTED_PER_MODULE {
                if done >= trials {
                    return Ok(MonteCarloOutcome::Consistent { trials: done });
                }
                let Some(x) = random_in_subspace(ext, w, r.dbar, &units, &mut rng)? else { break };
                done += 1;
                if !is_normal(ext, &x) {
                    return Ok(refute(x));
                }
            }
        }
    }
    let units = UnitSampler::new(l, terms)?;
    let pd = ext.tower().pow(l.uniformizer(), r.dbar).unwrap();
    if !ext.is_totally_ramified() {
        if let Some(pivot) = trace_pivot(ext, r.dbar)? {
            for _ in 0..DIRECTED_PER_MODULE.min(trials) {
                let x = ext.tower().mul(&pd, &units.sample(l, &mut rng, true));
                let Some(y) = project_trace_zero(ext, &x, &pivot)? else { continue };
                done += 1;
                if !is_normal(ext, &y) {
                    return Ok(refute(y));
                }
            }
        }
    }
    while done < trials {
        let x = ext.tower().mul(&pd, &units.sample(l, &mut rng, true));
        done += 1;
        if !is_normal(ext, &x) {
            return Ok(refute(x));
        }
    }
    Ok(MonteCarloOutcome::Consistent { trials: done })
}
