//! A-optimal experimental designs for scalar-on-function linear models.
//!
//! Profile factors (settings that vary over time within a run) and their
//! functional parameters are expanded in finite bases. The functional model
//! then collapses to an ordinary linear model `y = Zν + ε`, and a design is
//! chosen by minimizing `tr((ZᵀZ)⁻¹)` with multi-start coordinate exchange.
//!
//! ```
//! use fundesign::basis::BasisSystem;
//! use fundesign::model::{Bounds, ProblemSpec, ProfileFactorSpec};
//! use fundesign::optimizer::{coordinate_exchange, OptimizerConfig};
//!
//! let factor = ProfileFactorSpec::new(
//!     BasisSystem::uniform_step(0.0, 1.0, 2).unwrap(),
//!     BasisSystem::power(1, 0.0, 1.0).unwrap(),
//!     Bounds::new(-1.0, 1.0).unwrap(),
//! )
//! .unwrap();
//! let spec = ProblemSpec::new(4, vec![factor], vec![]);
//! let config = OptimizerConfig { n_starts: 10, seed: 1, ..Default::default() };
//! let result = coordinate_exchange(&spec, &config).unwrap();
//! assert!((result.best_value - 8.75).abs() < 1e-9);
//! ```

pub mod basis;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod line_search;
pub mod model;
pub mod optimizer;
pub mod oracle;

pub use error::{Error, Result};
