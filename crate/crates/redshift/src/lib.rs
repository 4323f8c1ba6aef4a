//! Symbolic spectral-sequence computations over F_p.
//!
//! The crate reconstructs, page by page, a family of Tate and homotopy
//! fixed-point spectral sequences whose input is an exterior-times-polynomial
//! algebra `E(l1, l2, l3) ⊗ P(mu)` over F_p, verifies each page against
//! closed-form descriptions, and assembles the resulting generator tables
//! for topological cyclic homology and algebraic K-theory together with
//! their Poincaré series.
//!
//! Module map:
//!
//! * [`fpalg`] — graded-commutative monomial algebras over F_p (Koszul signs,
//!   windowed basis enumeration).
//! * [`ssengine`] — bigraded pages, derivation-defined differentials, and
//!   windowed homology by exact Gaussian elimination mod p.
//! * [`catalog`] — the specific E²-terms, differential schedules and
//!   closed-form page descriptions, plus the `r(k)`/`[k]` combinatorics.
//! * [`decomp`] — structured E^∞ inventories: the summands `S(k,d)`,
//!   the modules `B(k,d)`, and the degree-`>= 0` decompositions.
//! * [`tcasm`] — the equalizer/coequalizer assembly and the TC / K
//!   generator tables with Poincaré series.
//! * [`cli`] — the command-line front end.
//!
//! The book under `book/` walks through the same material narratively; its
//! code listings are compiled as doctests via the hidden [`guide`] module.

pub mod catalog;
pub mod cli;
pub mod decomp;
pub mod fpalg;
pub mod ssengine;
pub mod tcasm;

#[doc(hidden)]
pub mod guide;
