//! Exact-arithmetic calculus for V-filtrations of monodromic modules along
//! slopes, with the Hodge- and weight-filtration bookkeeping that restriction
//! functors need.
//!
//! Everything is computed over Q with arbitrary-precision rationals. The
//! layers, from the bottom up:
//!
//! * [`rat`], [`linalg`], [`subspace`]: exact scalars, fraction-free row
//!   reduction, canonical subspace and flag algebra.
//! * [`filtration`]: monodromy filtrations of nilpotent operators and their
//!   relative versions along a second filtration.
//! * [`model`]: finite window-truncated models of monodromic modules graded
//!   by a slope, with validation of the defining relations.
//! * [`koszul`]: Koszul-type complexes built from the graded multiplication
//!   operators, their cohomology with induced Hodge and weight data, and the
//!   restriction-to-the-vertex computations on top of them.
//! * [`spectra`], [`bfunction`]: jump spectra of filtrations and root
//!   multisets of b-functions, with their transformation rules.
//! * [`whci`]: Du Bois-type classification for weighted-homogeneous
//!   complete intersection inputs.
//! * [`generate`]: seeded random population of validated models for
//!   property testing.
//! * [`json`]: the stable JSON schemas used by the command-line tool and
//!   the C interface.

pub mod bfunction;
pub mod filtration;
pub mod generate;
pub mod json;
pub mod koszul;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod rat;
pub mod spectra;
pub mod subspace;
pub mod whci;
