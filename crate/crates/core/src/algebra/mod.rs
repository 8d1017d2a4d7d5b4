//! Finite abelian groups, characters, group rings, minus parts and ideal lattices.

pub mod character;
pub mod galois;
pub mod group;
pub mod group_ring;
pub mod lattice;
pub mod minus;

pub use character::{enumerate_characters, Character, RootOfUnityMod};
pub use galois::{CanonicalKind, GaloisStructure, PlaceData};
pub use group::{AbelianQuotient, Elem, FiniteAbelianGroup};
pub use group_ring::{CoeffRing, GroupRing, GroupRingElement};
pub use lattice::{ideal_from_generators, minus_ideal_from_generators, Ambient, IdealLattice};
pub use minus::{rational_det, MinusElement, MinusQuotient};
