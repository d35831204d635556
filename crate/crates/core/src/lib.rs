//! Modular monodromy groups of elliptic K3 surfaces, enumerated through
//! their dessins d'enfants.
//!
//! Conjugacy classes of finite-index subgroups of `PSL(2,Z)` are represented
//! by hypermaps `(σ, α)` with `σ³ = α² = id`. On top of that this crate
//! provides the torsion/torsion-free surgeries, the Euler-number rules that
//! decide which classes occur for K3 surfaces, the count of `SL(2,Z)` lifts,
//! and a matrix-level verification layer.

pub mod catalog;
pub mod enumerate;
pub mod euler;
pub mod hypermap;
pub mod lifts;
pub mod perm;
pub mod report;
pub mod slwords;
pub mod torsion;
pub mod verify;

pub use enumerate::{enumerate_classes, rooted_count, EnumerationConstraints};
pub use hypermap::{CanonicalCode, CuspWidths, Hypermap, SubgroupType};
pub use perm::Permutation;
