//! Fitting, generation, analysis and airborne-SIR simulation for SPDT
//! (same-place-different-time) dynamic contact networks.
//!
//! An SPDT network links an *active copy* of a host (one stay at a location)
//! to every neighbour that arrives while the host is present or within
//! `delta` steps after it leaves. Indirect links carry the exposure to
//! particles left behind by the host.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`model`] - time grid, network representation and the link-event file format
//! * [`stochastic`] - samplers and closed-form distributions
//! * [`fitting`] - maximum-likelihood estimation of the model parameters
//! * [`generator`] - synthetic SPDT networks and activity-driven baselines
//! * [`extraction`] - GPS traces to empirical networks, densification
//! * [`diffusion`] - exposure model and day-stepped SIR simulation
//! * [`analysis`] - CIP histograms, RSE, static and temporal metrics
//! * [`config`] - flat `key=value` parameter files

pub mod analysis;
pub mod config;
pub mod diffusion;
pub mod extraction;
pub mod fitting;
pub mod generator;
pub mod model;
pub mod numeric;
pub mod rng;
pub mod stochastic;

pub use model::{ActiveCopy, ContactLink, ContactNetwork, LinkClass, NodeId, TimeGrid};
