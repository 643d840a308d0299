//! Words, presentations and Andrews-Curtis moves, with solvers for the
//! word problem and area in a few one-relator groups and a trivializer for
//! the doubled presentations `P_w`.

pub mod ac;
pub mod constructions;
pub mod error;
pub mod fixtures;
pub mod presentation;
pub mod search;
pub mod solvers;
pub mod tower;
pub mod trivializer;
pub mod word;

pub use ac::{Move, MoveTrace, Verification};
pub use error::{Error, Result};
pub use presentation::Presentation;
pub use word::{Alphabet, Letter, Word};
