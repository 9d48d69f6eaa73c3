pub mod bundle;
pub mod error;
pub mod fairness;
pub mod instance;
pub mod oracle;
pub mod rational;
pub mod rules;
pub mod valuations;

pub use bundle::Bundle;
pub use error::{Error, Result};
pub use instance::{Allocation, Instance};
pub use rational::Rational;
pub use valuations::Valuation;
