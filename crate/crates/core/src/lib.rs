//! Finite-dimensional modules over `U_q(g)` at real `q > 0` for `g` of type
//! A1, A2 and B2, with their R-matrices, unitary coboundary operators, cactus
//! group actions, quantum symmetric and exterior powers, and Grothendieck-ring
//! bookkeeping.
//!
//! ```
//! use qsymx::cartan::{CartanType, RootSystem, Weight};
//! use qsymx::{groth, symext, uqg};
//!
//! let rs = RootSystem::new(CartanType::A1);
//! let v = uqg::build_simple(&rs, &Weight::new([3]), 1.2)?;
//!
//! // The 4-dimensional module is not flat in degree 3 ...
//! assert_eq!(symext::sym_subspace(&v, 3, 1e-9)?.dim(), 16);
//! // ... but its cubes still satisfy S³_q − Λ³_q = S³ − Λ³.
//! assert!(groth::verify_cube_identity_for(&v, 1e-9)?.identity_holds);
//! # Ok::<(), qsymx::error::Error>(())
//! ```
//!
//! Modules are built bottom-up: [`cartan`] supplies the root data, [`uqg`]
//! the generator matrices and invariant forms, [`braiding`] the R-matrix and
//! coboundary operators, [`cactus`] the action of `J_n` on tensor powers,
//! [`symext`] the power subspaces, and [`groth`] the decompositions.

pub mod braiding;
pub mod cactus;
pub mod cartan;
pub mod error;
pub mod groth;
pub mod linalg;
pub mod symext;
pub mod uqg;

// Runs the snippets of the guide in book/ and of the README as doc tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cartan.md")]
    mod cartan {}
    #[doc = include_str!("../../../book/src/modules.md")]
    mod modules {}
    #[doc = include_str!("../../../book/src/braiding.md")]
    mod braiding {}
    #[doc = include_str!("../../../book/src/cactus.md")]
    mod cactus {}
    #[doc = include_str!("../../../book/src/powers.md")]
    mod powers {}
    #[doc = include_str!("../../../book/src/grothendieck.md")]
    mod grothendieck {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
