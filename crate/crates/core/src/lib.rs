//! Key exchange over pairwise commuting algebraic subsets of ascending
//! HNN-extensions `Z^m *_M`.
//!
//! * [`group`] and [`oracle`]: exact arithmetic on Britton normal forms and a
//!   rational model used as an independent check.
//! * [`grammar`], [`cnf`], [`sample`], [`subset`], [`fsa`]: context-free
//!   carriers of algebraic subsets.
//! * [`protocol`]: the two subset protocols and orbit Diffie–Hellman.
//! * [`lattice`], [`attack`], [`experiment`]: length-based cryptanalysis.

pub mod attack;
pub mod cnf;
pub mod error;
pub mod experiment;
pub mod fsa;
pub mod grammar;
pub mod group;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod protocol;
pub mod sample;
pub mod seed;
pub mod subset;
pub mod wire;

pub use error::{Error, Result};
pub use grammar::CFGrammar;
pub use group::{BitLength, GroupElement, GroupParams, GroupWord, Length, Token, UnaryLength};
pub use linalg::{IntMatrix, IntVector};
pub use oracle::OracleElement;
pub use sample::SamplePolicy;
pub use subset::{OrbitRange, SubsetSpec};
