//! The relaxation interface: evaluable, differentiable maps from the unit box to the
//! reals, each carrying a declared per-coordinate structure class.

use serde::{Deserialize, Serialize};

/// How a relaxation behaves along each coordinate separately, all other coordinates
/// held fixed. `EntrywiseAffine` means linear along every coordinate (multilinear as a
/// whole); `EntrywiseConcave` means concave along every coordinate, which is what the
/// rounding guarantee needs. The classes are declarations verified by sampling, not
/// proofs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureClass {
    EntrywiseAffine,
    EntrywiseConcave,
    Unconstrained,
}

impl StructureClass {
    /// Whether the class suffices for the rounding guarantee.
    pub fn supports_guarantee(self) -> bool {
        matches!(
            self,
            StructureClass::EntrywiseAffine | StructureClass::EntrywiseConcave
        )
    }

    /// Class of a nonnegatively weighted sum of two relaxations.
    pub fn join(self, other: StructureClass) -> StructureClass {
        use StructureClass::*;
        match (self, other) {
            (EntrywiseAffine, EntrywiseAffine) => EntrywiseAffine,
            (a, b) if a.supports_guarantee() && b.supports_guarantee() => EntrywiseConcave,
            _ => Unconstrained,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StructureClass::EntrywiseAffine => "entrywise_affine",
            StructureClass::EntrywiseConcave => "entrywise_concave",
            StructureClass::Unconstrained => "unconstrained",
        }
    }
}

/// A differentiable function on `[0,1]^arity`. Implementations must be pure and
/// thread-safe; `value` and `gradient` may assume `x.len() == arity()`.
pub trait Relaxation: Send + Sync {
    fn arity(&self) -> usize;

    fn structure(&self) -> StructureClass;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes the gradient at `x` into `grad` (length `arity()`).
    fn gradient(&self, x: &[f64], grad: &mut [f64]);
}

impl Relaxation for Box<dyn Relaxation> {
    fn arity(&self) -> usize {
        self.as_ref().arity()
    }
    fn structure(&self) -> StructureClass {
        self.as_ref().structure()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.as_ref().value(x)
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        self.as_ref().gradient(x, grad)
    }
}
