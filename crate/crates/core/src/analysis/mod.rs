//! CIP distributions, histogram comparison, and static and temporal metrics.

mod cip;
mod histogram;
mod static_metrics;
mod temporal;

pub use cip::{cip_histograms, cip_samples, CipHistograms};
pub use histogram::{rse, AnalysisError, Histogram};
pub use static_metrics::{daily_static_metrics, static_metrics, undirected_clustering, StaticMetrics};
pub use temporal::{temporal_metrics, DayAggregatedGraph, Sources, TemporalMetrics, TemporalParams};
