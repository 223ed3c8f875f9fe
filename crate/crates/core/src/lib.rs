pub mod cg;
pub mod closure;
pub mod experiments;
pub mod error;
pub mod hull;
pub mod instance;
pub mod lp;
pub mod mip;
pub mod rational;
pub mod rng;

pub use error::{Error, Result};
pub use instance::{IlpInstance, InstanceClass, LinearConstraint, Relation, Sense};
pub use rational::{Integer, Rational};
