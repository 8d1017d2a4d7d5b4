//! Dirichlet characters, L-values at non-positive integers and Eisenstein
//! series as exact q-expansions.
mod bernoulli;
mod congruence;
mod constant;
mod dirichlet;
mod qexp;

pub use bernoulli::{
    bernoulli_numbers, bernoulli_polynomial, depleted_l_value, generalized_bernoulli, l_at_nonpositive, l_at_nonpositive_rational, value_field,
    GaussSum, EXACT_GAUSS_SUM_BOUND,
};
pub use congruence::{congruence_check, eisenstein_ideal_shadow, level_one_ladder, CongruenceModulus, CongruenceOutcome, ShadowReport};
pub use constant::{constant_term_eval, ConstantTerm, ConstantTermSetup, CuspDatum, FormSpec};
pub use dirichlet::{CharacterLabel, DirichletCharacter};
pub use qexp::{
    dirichlet_from_galois_character, eisenstein_qexp, family_qexp, normalized_level_one, ordinary_stabilization, specialize_family, stabilized_constant,
    stabilized_level, w_modified, CoefficientRing, HeckeOp, Nebentypus, QExpansion,
};
