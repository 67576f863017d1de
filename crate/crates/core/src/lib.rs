//! Stability analysis of 2-D and 3-D linear time-invariant systems
//! `ṙ = A·r` from the asymptotic behaviour of the curvature and torsion
//! of solution trajectories.
//!
//! The pipeline is:
//!
//! 1. [`jordan::classify`] brings `A` into real Jordan canonical form
//!    `A = P⁻¹·J·P`.
//! 2. [`flow`] evaluates the closed-form flow `r(t) = e^{tA}·r(0)` and its
//!    derivative stack, and [`diffgeom`] turns a stack into pointwise
//!    curvature and torsion.
//! 3. [`asymptotics`] represents `κ²(t)` and `τ(t)` symbolically as ratios
//!    of exp-polynomial sums, classifies their `t → +∞` behaviour into the
//!    trichotomy zero / infinity / eventually-bounded-positive, and
//!    cross-checks the result against a transcription of the per-case
//!    eigenvalue tables and a numeric large-`t` probe.
//! 4. [`stability`] issues the verdict (asymptotically stable / stable /
//!    undetermined-by-geometry) together with the classical eigenvalue
//!    criterion as an independent oracle.
//!
//! [`equivalence`] provides the change-of-coordinates machinery and the
//! curvature/torsion sandwich bounds used to validate invariance of the
//! limit classes under equivalence transformations.

pub mod asymptotics;
pub mod diffgeom;
pub mod equivalence;
pub mod flow;
pub mod jordan;
pub mod linalg;
pub mod stability;
pub mod strata;

pub use linalg::{ComplexScalar, RealMatrix, RealVector, SingularTriple};
