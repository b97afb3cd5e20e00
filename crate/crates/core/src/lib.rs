//! Finite ultrametric spaces, the category whose morphisms are amalgams, and
//! the representation theory of its endomorphism semigroups.

pub mod amalgam;
pub mod dendro;
pub mod embed;
pub mod endsemi;
pub mod groups;
pub mod linalg;
pub mod random;
pub mod rat;
pub mod reps;
pub mod selftest;
pub mod ultracore;
pub mod urysohn;
pub mod woolly;

pub use rat::{Radius, Rat};
