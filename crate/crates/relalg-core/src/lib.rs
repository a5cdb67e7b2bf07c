//! Finite relational structures, infinitary Horn theories instantiated over
//! finite quantity lattices, lifted algebraic signatures, and the algebras
//! built over them.
//!
//! The crate is organised around a small tower of notions:
//!
//! - [`signatures`]: relational/algebraic signatures and finite quantity
//!   lattices; everything else is parameterised by these.
//! - [`structures`]: finite structures, their morphisms, (co)products,
//!   substructures and image factorisation.
//! - [`horn`]: Horn clauses, clause satisfaction, and the axiom presets for
//!   generalized metric spaces, posets, L-valued relations and partial
//!   algebras.
//! - [`liftings`]: the six built-in liftings of the power functor and the
//!   checkers for the standing assumptions on them.
//! - [`algebras`]: algebras over structures, validation against liftings,
//!   products, subalgebras, factorisation and the homomorphism theorem.
//! - [`free_terms`]: depth-bounded free algebras (term slices) and the
//!   unique extension of maps to term evaluation.
//! - [`equations`]: clustered equations, satisfaction, variety-closure
//!   soundness checks and the translation of abstract equations.
//! - [`quotients`]: quotient enumeration, c-reflexivity, compatible pairs
//!   and the exactness correspondence.
//! - [`dsl`]: the `.ral` specification language (parser and serializer).
//! - [`oracle`]: brute-force reference implementations used by the
//!   differential test suites; not wired into any production path.

pub mod algebras;
pub mod dsl;
pub mod equations;
pub mod free_terms;
pub mod horn;
pub mod liftings;
pub mod oracle;
pub mod quotients;
pub mod signatures;
pub mod structures;

mod error;

pub use error::{Error, Result};
pub use signatures::{
    make_gmet_signature, make_partial_algebra_signature, make_poset_signature,
    AlgebraicSignature, LiftedSignature, Quantity, QuantityLattice, RelationalSignature,
};
pub use structures::{MorphismClass, Structure, StructureMap};
