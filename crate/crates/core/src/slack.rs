//! Floating-point pad used by every enclosure.
//!
//! Brackets are widened by a multiplicative factor `1 + slack * (N + 1)` where
//! `N` is the number of accumulated terms. The per-step constant defaults to
//! `1e-12` and may be overridden through the `TAULAB_SLACK` environment
//! variable.

use std::sync::OnceLock;

pub const DEFAULT_SLACK: f64 = 1e-12;
pub const SLACK_ENV: &str = "TAULAB_SLACK";

static SLACK: OnceLock<f64> = OnceLock::new();

/// Parses an override value. Only finite, non-negative values below 1e-3 are
/// accepted; anything else falls back to the default.
pub fn parse_slack(raw: Option<&str>) -> f64 {
    raw.and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v >= 0.0 && *v < 1e-3)
        .unwrap_or(DEFAULT_SLACK)
}

/// Per-step pad constant, read once per process.
pub fn slack() -> f64 {
    *SLACK.get_or_init(|| parse_slack(std::env::var(SLACK_ENV).ok().as_deref()))
}

/// Relative pad after `terms` accumulation steps.
pub fn pad(terms: usize) -> f64 {
    slack() * (terms as f64 + 1.0)
}
