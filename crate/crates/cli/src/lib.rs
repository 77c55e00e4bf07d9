//! Config-driven experiment runner over the `cstk` toolkit.

pub mod catalog;
pub mod config;
pub mod experiments;
pub mod report;

use std::time::Instant;

use rayon::prelude::*;

use config::{Config, ConfigError};
use report::{Report, ReportRow};

/// Validates the config and runs every experiment. Experiments run in
/// parallel; rows come back in config order.
pub fn run_config(cfg: &Config) -> Result<Report, ConfigError> {
    cfg.validate()?;
    let resolved: Vec<_> = cfg.experiments.iter().map(|e| experiments::resolve(e, cfg)).collect();
    let rows = resolved
        .par_iter()
        .map(|r| {
            let start = Instant::now();
            let outcome = experiments::run(r, cfg.seed).map(|m| (m.values, m.residual)).map_err(|e| e.to_string());
            let inputs = serde_json::to_value(r).expect("config serializes");
            ReportRow::new(r.id.clone(), r.kind, inputs, outcome, r.tolerance.unwrap_or(0.0), start.elapsed().as_secs_f64())
        })
        .collect();
    Ok(Report::new(cfg.clone(), rows))
}
