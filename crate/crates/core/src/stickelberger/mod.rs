//! Stickelberger elements of abelian extensions of Q at s = 0.

pub mod drcond;
pub mod field;
pub mod kurihara;
pub mod theta;

pub use drcond::{check_drcond, DrCondReport};
pub use field::{crt, lift_along, push_forward, AbelianFieldQ, UnitGroupMod};
pub use kurihara::{odd_product_det, sinnott_kurihara_ideal, KsVariant};
pub use theta::{check_integrality, partial_zeta_zero, theta, StickelbergerElement};
