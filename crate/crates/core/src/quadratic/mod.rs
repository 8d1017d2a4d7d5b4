//! Imaginary quadratic fields: ideals, class groups and ray class groups.

mod field;
mod forms;
mod ray;
mod units;

pub use field::{ImagQuadField, QuadIdeal, QuadNumber, Splitting};
pub use forms::{form_class_group, ideal_to_form, reduced_forms, ClassGroup, QuadForm};
pub use ray::{ray_class_group, RayClassGroup, RayClassSummary, ResidueFactor, ResidueUnits};
pub use units::{principal_generator, s_units, PrincipalOutcome, SUnitSummary, SUnits};
