//! Certified lower bounds for stable commutator length.
//!
//! The crate works in free products of cyclic groups
//! `F_m * C_{o_1} * ... * C_{o_n}` and in fundamental groups of 2-orbifolds.
//! Every positive bound it reports comes with enough data to recheck it:
//! a homogeneous quasimorphism given as a rational combination of counting
//! quasimorphisms, the chain it was evaluated on, and the defect estimate.
//!
//! Module map:
//!
//! * [`group`]: letters, reduced words, cyclic reduction, conjugacy.
//! * [`text`]: parsers and printers for groups, words, chains and orbifolds.
//! * [`qm`]: counting quasimorphisms and their homogenizations.
//! * [`chain`]: chains, homology, and gap certificates.
//! * [`orbifold`]: orbifolds with boundary and relative gaps.
//! * [`splitting`]: splittings of closed orbifold groups over `Z`.
//! * [`hyperbolic`]: matrix numerics for von Dyck groups.
//! * [`oracle`]: brute-force cross checks.

pub mod chain;
pub mod error;
pub mod group;
pub mod hyperbolic;
pub mod oracle;
pub mod orbifold;
pub mod qm;
pub mod rational;
pub mod splitting;
pub mod text;

pub use chain::{Basis, Chain, GapCertificate, HomologyClass, Status, VanishingReason};
pub use error::Error;
pub use group::{CyclicWord, GroupSpec, Letter, Word};
pub use qm::{CountingQm, QmCombination};
pub use rational::Q;
