//! Vector fields on jet spaces, their prolongations, and one-forms.

mod field;
mod form;

pub use field::{
    characteristics, has_lambda_covering_form, is_lambda_symmetry, is_symmetry, lift_nonlocal, prolong_lambda,
    prolong_standard, tangency_residuals, Provenance, VectorField,
};
pub use form::{in_contact_ideal, interior_product, lie_derivative, ContactIdeal, OneForm};
