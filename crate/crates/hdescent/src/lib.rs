//! Higher descent on a finite combinatorial site.

pub mod cli;
pub mod descent;
pub mod equivalence;
pub mod equivariant;
pub mod error;
pub mod group;
pub mod groupoid;
pub mod holonomy;
pub mod linear;
pub mod plus;
pub mod prestacks;
pub mod simplicial;
pub mod site;

pub use error::{Error, Result};
