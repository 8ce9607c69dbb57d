//! Knowledge-unit mining and long-time-contributor prediction for Java projects.
pub mod analysis;
pub mod features;
pub mod ku;
pub mod labeling;
pub mod learn;
pub mod mining;
pub mod pipeline;
