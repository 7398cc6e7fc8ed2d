//! Exact genus-zero quantum K-theory.
//!
//! The crate computes, with exact rational arithmetic throughout:
//!
//! * descendent Euler characteristics `chi(M_{0,n}, prod L_i^{d_i})` of a point
//!   ([`descendents`]),
//! * the genus-zero quantum K-potential, its quantized metric and quantum
//!   product ([`frobenius`]),
//! * the fundamental solution of the quantum differential equation ([`qde`]),
//!
//! and checks the identities relating them (WDVV, flatness, the unit law,
//! the Levi-Civita property, the quantum differential equation) as exact
//! coefficient identities on explicit truncation windows.
//!
//! ```
//! use qk_core::correlators::{CorrelatorTable, Target};
//! use qk_core::frobenius::{assemble_potential, frobenius_report, FrobeniusData};
//!
//! let table = CorrelatorTable::new(Target::Projective(2), 1);
//! let potential = assemble_potential(&table, 6, 0).unwrap();
//! let data = FrobeniusData::build(&potential).unwrap();
//! assert!(frobenius_report(&data).unwrap().all_zero());
//! ```

pub mod correlators;
pub mod descendents;
pub mod frobenius;
pub mod kring;
pub mod matrix;
pub mod qde;
pub mod rational;
pub mod series;

pub use correlators::{CorrelatorTable, Target};
pub use descendents::{descendent_euler, DescendentIndex};
pub use kring::{KClass, KRing};
pub use matrix::SeriesMatrix;
pub use rational::Rational;
pub use series::{Orders, TruncatedSeries, Var, Vars};

// The guide's code blocks run as doctests through these modules.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/kring.md")]
    mod kring {}
    #[doc = include_str!("../../../book/src/descendents.md")]
    mod descendents {}
    #[doc = include_str!("../../../book/src/correlators.md")]
    mod correlators {}
    #[doc = include_str!("../../../book/src/frobenius.md")]
    mod frobenius {}
    #[doc = include_str!("../../../book/src/qde.md")]
    mod qde {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
