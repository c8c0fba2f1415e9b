//! Finitely generated abelian groups, their homomorphisms, and the Smith
//! normal form that drives every kernel and cokernel computation.

mod group;
mod hom;
mod matrix;
mod snf;

pub use group::{element_order, is_isomorphic, normal_form_string, FgAbGroup, Order};
pub use hom::{cokernel, kernel, GroupHom};
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SnfDecomposition};

pub(crate) use hom::{cokernel_tagged, solve};
