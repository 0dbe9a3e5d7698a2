//! Physical-layer secrecy of three-tier wireless sensor networks.
//!
//! Sensors, multi-antenna access points, sinks and two independent
//! eavesdropper populations are modelled as Poisson point processes. The
//! crate evaluates the SINR distributions and average secrecy rates in
//! closed form ([`analytic`], [`secrecy`]) and by simulation
//! ([`montecarlo`]).

pub mod analytic;
pub mod channel;
pub mod geometry;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod scalar;
pub mod secrecy;
pub mod special;

pub use model::{ConfigError, ConfigParams, NetworkConfig, Preset, Scenario};
pub use quadrature::{Integral, QuadratureError, QuadratureSpec};
pub use scalar::Scalar;
pub use secrecy::{Method, SecrecyEstimate};

pub type Config = NetworkConfig<f64>;
pub type Config32 = NetworkConfig<f32>;
pub type Quadrature = QuadratureSpec<f64>;
pub type Quadrature32 = QuadratureSpec<f32>;
