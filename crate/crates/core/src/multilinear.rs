//! Boolean tables and their multilinear interpolation, randomized structure checkers,
//! and the closed-form rectifier relaxation for two-variable tables.
//!
//! The multilinear interpolation of a table `h` is
//! `sum_X h(X) * prod_j x[j]^X_j * (1 - x[j])^(1 - X_j)` with the `0^0 = 1` convention.
//! It is the unique function linear along every coordinate that agrees with `h` at the
//! vertices of the unit box, and is evaluated here by interpolating one coordinate at a
//! time, which costs `O(2^n)` instead of `O(n * 2^n)` for the explicit sum.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relaxation::{Relaxation, StructureClass};
use crate::rng::rng_from_seed;

/// Hard cap on table arity; larger tables are rejected, never approximated.
pub const MAX_TABLE_ARITY: usize = 20;

/// Exhaustive value table of a function on binary vectors of a fixed arity.
///
/// `values[mask]` is the value at the vertex whose bit `j` (weight `2^j`) is variable
/// `j`; so `values[0]` is the all-zeros vertex and `values[2^n - 1]` the all-ones one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BooleanTable {
    arity: usize,
    values: Vec<f64>,
}

impl BooleanTable {
    pub fn new(arity: usize, values: Vec<f64>) -> Result<Self> {
        if arity > MAX_TABLE_ARITY {
            return Err(Error::TableTooLarge(arity, MAX_TABLE_ARITY));
        }
        let expected = 1usize << arity;
        if values.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "arity {arity} requires {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "table value {i} is not finite"
            )));
        }
        Ok(Self { arity, values })
    }

    /// Uniform random table with values in `range`.
    pub fn random<R: Rng>(arity: usize, range: std::ops::Range<f64>, rng: &mut R) -> Result<Self> {
        let values = (0..1usize << arity)
            .map(|_| rng.gen_range(range.clone()))
            .collect();
        Self::new(arity, values)
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the vertex encoded by `mask` (bit `j` is variable `j`).
    #[inline]
    pub fn at_mask(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    /// Value at a binary assignment.
    pub fn at_binary(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: bits.len(),
            });
        }
        let mut mask = 0usize;
        for (j, &b) in bits.iter().enumerate() {
            mask |= (b as usize & 1) << j;
        }
        Ok(self.values[mask])
    }

    /// Multilinear interpolation at a point of the unit box, by coordinate-wise
    /// interpolation from the highest variable down. At binary points this selects
    /// table entries exactly (no rounding error).
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut work = self.values.clone();
        let mut live = work.len();
        for j in (0..self.arity).rev() {
            let half = live / 2;
            let xj = x[j];
            if xj == 0.0 {
                // keep lower half as is
            } else if xj == 1.0 {
                for i in 0..half {
                    work[i] = work[i + half];
                }
            } else {
                for i in 0..half {
                    work[i] = (1.0 - xj) * work[i] + xj * work[i + half];
                }
            }
            live = half;
        }
        work[0]
    }

    /// Serializes as a line with the arity followed by `2^n` values in mask order.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.arity);
        for v in &self.values {
            s.push_str(&format!("{v}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_ascii_whitespace();
        let arity: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty table text".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad arity: {e}")))?;
        let values: Vec<f64> = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad value {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        Self::new(arity, values)
    }
}

impl Relaxation for BooleanTable {
    fn arity(&self) -> usize {
        self.arity
    }

    fn structure(&self) -> StructureClass {
        StructureClass::EntrywiseAffine
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        // Linear along each coordinate, so the partial is the difference of the two
        // one-coordinate restrictions.
        let mut probe = x.to_vec();
        for j in 0..self.arity {
            let saved = probe[j];
            probe[j] = 1.0;
            let hi = self.eval_unchecked(&probe);
            probe[j] = 0.0;
            let lo = self.eval_unchecked(&probe);
            probe[j] = saved;
            grad[j] = hi - lo;
        }
    }
}

/// One sampled violation of a structure check. The two points differ in exactly the
/// named coordinate; `gap` is by how much the interpolation inequality failed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureWitness {
    pub coordinate: usize,
    pub point_a: Vec<f64>,
    pub point_b: Vec<f64>,
    pub gamma: f64,
    pub gap: f64,
}

/// Outcome of a randomized structure check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureReport {
    pub passed: bool,
    pub trials: usize,
    pub witness: Option<StructureWitness>,
}

/// Default slack for the structure checkers.
pub const DEFAULT_CHECK_TOL: f64 = 1e-8;

fn sample_check<F>(
    f: F,
    arity: usize,
    trials: usize,
    tol: f64,
    seed: u64,
    affine: bool,
) -> StructureReport
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = rng_from_seed(seed);
    let mut base = vec![0.0f64; arity];
    for trial in 0..trials {
        for b in &mut base {
            *b = rng.gen();
        }
        let i = rng.gen_range(0..arity);
        let a: f64 = rng.gen();
        let b: f64 = rng.gen();
        let gamma: f64 = rng.gen();

        let mut pa = base.clone();
        pa[i] = a;
        let mut pb = base.clone();
        pb[i] = b;
        let mut pm = base.clone();
        pm[i] = gamma * a + (1.0 - gamma) * b;

        let lhs = gamma * f(&pa) + (1.0 - gamma) * f(&pb);
        let rhs = f(&pm);
        let gap = if affine { (lhs - rhs).abs() } else { lhs - rhs };
        if gap > tol {
            return StructureReport {
                passed: false,
                trials: trial + 1,
                witness: Some(StructureWitness {
                    coordinate: i,
                    point_a: pa,
                    point_b: pb,
                    gamma,
                    gap,
                }),
            };
        }
    }
    StructureReport {
        passed: true,
        trials,
        witness: None,
    }
}

/// Randomized check that `f` is concave along every coordinate: samples a point, a
/// coordinate, two endpoint values, and an interpolation weight, and requires the
/// chord to lie below the function up to `tol`.
pub fn check_entrywise_concave<F>(
    f: F,
    arity: usize,
    trials: usize,
    tol: f64,
    seed: u64,
) -> StructureReport
where
    F: Fn(&[f64]) -> f64,
{
    sample_check(f, arity, trials, tol, seed, false)
}

/// Randomized check for the equality version: chord equals function along every
/// coordinate (linear in each coordinate separately).
pub fn check_entrywise_affine<F>(
    f: F,
    arity: usize,
    trials: usize,
    tol: f64,
    seed: u64,
) -> StructureReport
where
    F: Fn(&[f64]) -> f64,
{
    sample_check(f, arity, trials, tol, seed, true)
}

/// Convenience wrappers over a [`Relaxation`].
pub fn check_relaxation_concave(
    r: &dyn Relaxation,
    trials: usize,
    tol: f64,
    seed: u64,
) -> StructureReport {
    check_entrywise_concave(|x| r.value(x), r.arity(), trials, tol, seed)
}

pub fn check_relaxation_affine(
    r: &dyn Relaxation,
    trials: usize,
    tol: f64,
    seed: u64,
) -> StructureReport {
    check_entrywise_affine(|x| r.value(x), r.arity(), trials, tol, seed)
}

/// Concave relaxation of a two-variable table as a constant minus three rectified
/// affine forms.
///
/// Construction: flip coordinates so the maximum value sits at the all-zeros vertex;
/// with `a0 = h(0,0) >= a1 = h(0,1), a2 = h(1,0), a3 = h(1,1)` the relaxation is
///
/// ```text
/// h(y) = a0 - relu((a0-a1)(y2-y1)) - relu((a0-a2)(y1-y2)) - relu((a0-a3)(y1+y2-1))
/// ```
///
/// which matches the table at all four vertices and is concave along each coordinate
/// (affine pre-compositions of -relu). Recorded flips map evaluation inputs into the
/// flipped frame first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rectifier2 {
    /// Per-coordinate input flip `y = 1 - x` applied before the forms.
    pub flip: [bool; 2],
    /// The table maximum, value at the flipped-frame origin.
    pub base: f64,
    /// Three affine forms `[w1, w2, w0]` evaluated as `w1*y1 + w2*y2 + w0`.
    pub forms: [[f64; 3]; 3],
}

impl Rectifier2 {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let y1 = if self.flip[0] { 1.0 - x[0] } else { x[0] };
        let y2 = if self.flip[1] { 1.0 - x[1] } else { x[1] };
        let mut v = self.base;
        for [w1, w2, w0] in &self.forms {
            v -= (w1 * y1 + w2 * y2 + w0).max(0.0);
        }
        v
    }
}

impl Relaxation for Rectifier2 {
    fn arity(&self) -> usize {
        2
    }

    fn structure(&self) -> StructureClass {
        StructureClass::EntrywiseConcave
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let s1 = if self.flip[0] { -1.0 } else { 1.0 };
        let s2 = if self.flip[1] { -1.0 } else { 1.0 };
        let y1 = if self.flip[0] { 1.0 - x[0] } else { x[0] };
        let y2 = if self.flip[1] { 1.0 - x[1] } else { x[1] };
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for [w1, w2, w0] in &self.forms {
            // Subgradient 0 exactly at the kink.
            if w1 * y1 + w2 * y2 + w0 > 0.0 {
                d1 -= w1;
                d2 -= w2;
            }
        }
        grad[0] = d1 * s1;
        grad[1] = d2 * s2;
    }
}

/// Builds the rectifier relaxation for an arity-2 table. Errors on any other arity;
/// the construction is specific to two variables.
pub fn rectifier_for_table(table: &BooleanTable) -> Result<Rectifier2> {
    if table.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: table.arity(),
        });
    }
    let v = table.values();
    // First maximum in mask order decides the flip frame.
    let mut argmax = 0usize;
    for mask in 1..4 {
        if v[mask] > v[argmax] {
            argmax = mask;
        }
    }
    let flip = [argmax & 1 == 1, argmax & 2 == 2];
    // Table in the flipped frame: y-mask m reads the original at m XOR argmax.
    let a0 = v[argmax];
    let a1 = v[argmax ^ 2]; // y = (0, 1)
    let a2 = v[argmax ^ 1]; // y = (1, 0)
    let a3 = v[argmax ^ 3]; // y = (1, 1)
    let d1 = a0 - a1;
    let d2 = a0 - a2;
    let d3 = a0 - a3;
    Ok(Rectifier2 {
        flip,
        base: a0,
        forms: [[-d1, d1, 0.0], [d2, -d2, 0.0], [d3, d3, -d3]],
    })
}
