//! Simulation engine: the retrieval loop over a populated archive, the
//! positioning experiment, and seeded parameter sweeps.
//!
//! Motion advances at `motility.dt`; conjugation and delivery are checked
//! every `event_dt_s`. Every random draw comes from a ChaCha stream keyed by
//! `(seed, domain, index)`, so results do not depend on thread count or
//! iteration order, and runs that differ only in encoding share their
//! geometry and motion noise.

mod metrics;
mod positioning;
mod retrieval;
mod sweep;

pub use metrics::{write_metrics_csv, write_trajectory_csv, MetricsRecord, TrajectoryRow, METRICS_HEADER};
pub use positioning::{circle_sweep, run_positioning, PositioningStats};
pub use retrieval::{
    payload_for, run_retrieval, simulate_retrieval, try_conjugation, RetrievalOutcome,
};
pub use sweep::{parameter_sweep, SweepParams};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::MotilityParams;
use crate::archive::{ArchiveError, ArchiveLayout, LayoutParams, StorageParams};
use crate::codec::{Encoding, DEFAULT_PLASMID_LEN};
use crate::field::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid config: {field}: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error(transparent)]
    Archive(#[from] ArchiveError),
}

fn invalid(field: &str, message: impl Into<String>) -> EngineError {
    EngineError::ConfigInvalid { field: field.to_string(), message: message.into() }
}

/// How a conjugation attempt is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuccessModel {
    /// Success iff a standard normal draw exceeds the threshold.
    #[default]
    NormalThreshold,
    /// The threshold is itself the success probability.
    Probability,
}

/// Which plasmids go to which cluster.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum Placement {
    /// Round-robin over the clusters addressed by the storage namespace.
    #[default]
    RoundRobin,
    /// The leading `high_fraction` of plasmids go to high-priority clusters,
    /// the rest to low-priority ones.
    Priority { high_fraction: f64 },
}

/// The file being archived: seeded random bytes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PayloadParams {
    pub bytes: usize,
    pub plasmid_len: usize,
}

impl Default for PayloadParams {
    fn default() -> Self {
        Self { bytes: 18_400, plasmid_len: DEFAULT_PLASMID_LEN }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PositioningParams {
    pub duration_s: f64,
    pub n_bacteria: usize,
    pub dest_radii_cm: Vec<f64>,
    pub start_radii_cm: Vec<f64>,
    pub dest_points_per_circle: usize,
    pub start_points_per_circle: usize,
}

impl Default for PositioningParams {
    fn default() -> Self {
        Self {
            duration_s: 1000.0,
            n_bacteria: 100,
            dest_radii_cm: vec![0.030, 0.058, 0.087, 0.200],
            start_radii_cm: vec![0.300, 0.350, 0.450],
            dest_points_per_circle: 8,
            start_points_per_circle: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub encoding: Encoding,
    pub motility: MotilityParams,
    pub layout: LayoutParams,
    pub storage: StorageParams,
    pub placement: Placement,
    pub payload: PayloadParams,
    pub positioning: PositioningParams,
    pub n_retrievers_per_cluster: usize,
    /// Release point of the retrievers; point A when absent.
    pub start: Option<Point>,
    pub conjugation_time_s: f64,
    pub time_limit_s: f64,
    pub event_dt_s: f64,
    pub conjugation_threshold_cm: f64,
    pub conjugation_success_threshold: f64,
    pub success_model: SuccessModel,
    pub delivery_radius_cm: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let layout = LayoutParams::default();
        Self {
            seed: 0,
            encoding: Encoding::Basic,
            motility: MotilityParams::default(),
            layout,
            storage: StorageParams::default(),
            placement: Placement::RoundRobin,
            payload: PayloadParams::default(),
            positioning: PositioningParams::default(),
            n_retrievers_per_cluster: 10,
            start: None,
            conjugation_time_s: 1500.0,
            time_limit_s: 7200.0,
            event_dt_s: 50.0,
            conjugation_threshold_cm: layout.cluster_radius_cm,
            conjugation_success_threshold: 0.5,
            success_model: SuccessModel::NormalThreshold,
            delivery_radius_cm: 0.01,
        }
    }
}

impl SimConfig {
    /// Checks every invariant and returns the built layout.
    pub fn validate(&self) -> Result<ArchiveLayout, EngineError> {
        self.motility.validate().map_err(|e| invalid("motility", e.0))?;
        let layout = self.layout.build().map_err(|e| invalid("layout", e.to_string()))?;
        if !(self.conjugation_time_s >= 0.0 && self.conjugation_time_s.is_finite()) {
            return Err(invalid("conjugation_time_s", "must be finite and non-negative"));
        }
        if !(self.time_limit_s >= self.conjugation_time_s) || !self.time_limit_s.is_finite() {
            return Err(invalid("time_limit_s", "must be finite and at least conjugation_time_s"));
        }
        if !(self.event_dt_s >= self.motility.dt) || !self.event_dt_s.is_finite() {
            return Err(invalid("event_dt_s", "must be finite and at least motility.dt"));
        }
        let ratio = self.event_dt_s / self.motility.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(invalid("event_dt_s", "must be an integer multiple of motility.dt"));
        }
        if !(self.conjugation_threshold_cm > 0.0) {
            return Err(invalid("conjugation_threshold_cm", "must be positive"));
        }
        if !(self.delivery_radius_cm > 0.0) {
            return Err(invalid("delivery_radius_cm", "must be positive"));
        }
        if self.conjugation_success_threshold.is_nan() {
            return Err(invalid("conjugation_success_threshold", "must be a number"));
        }
        if self.payload.plasmid_len == 0 {
            return Err(invalid("payload.plasmid_len", "must be positive"));
        }
        if !(self.storage.capacity_mean.is_finite() && self.storage.capacity_sd.is_finite()) {
            return Err(invalid("storage", "capacity distribution must be finite"));
        }
        if let Placement::Priority { high_fraction } = self.placement {
            if !(0.0..=1.0).contains(&high_fraction) {
                return Err(invalid("placement.high_fraction", "must lie in [0, 1]"));
            }
        }
        let p = &self.positioning;
        if !(p.duration_s > 0.0 && p.duration_s.is_finite()) {
            return Err(invalid("positioning.duration_s", "must be positive"));
        }
        if p.dest_radii_cm.iter().chain(&p.start_radii_cm).any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(invalid("positioning", "radii must be finite and non-negative"));
        }
        Ok(layout)
    }

    pub fn steps_per_event(&self) -> u64 {
        (self.event_dt_s / self.motility.dt).round() as u64
    }

    /// Storage bacteria per cluster: one per retriever unless set, and at
    /// least one so an archive exists even without retrievers.
    pub fn members_per_cluster(&self) -> usize {
        self.storage.members_per_cluster.unwrap_or(self.n_retrievers_per_cluster.max(1))
    }
}

/// Independent random-number domains.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub(crate) enum Domain {
    Payload = 1,
    Storage = 2,
    Motion = 3,
    Events = 4,
    Checkout = 5,
}

pub(crate) fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 48) | index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = SimConfig::default();
        c.validate().unwrap();
        assert_eq!(c.steps_per_event(), 2500);
        assert_eq!(c.members_per_cluster(), 10);
    }

    #[test]
    fn rejects_bad_timing() {
        let bad = |f: fn(&mut SimConfig)| {
            let mut c = SimConfig::default();
            f(&mut c);
            c.validate().unwrap_err()
        };
        assert!(matches!(bad(|c| c.time_limit_s = 100.0), EngineError::ConfigInvalid { field, .. } if field == "time_limit_s"));
        assert!(matches!(bad(|c| c.event_dt_s = 0.03), EngineError::ConfigInvalid { field, .. } if field == "event_dt_s"));
        assert!(matches!(bad(|c| c.event_dt_s = 0.01), EngineError::ConfigInvalid { field, .. } if field == "event_dt_s"));
        assert!(matches!(bad(|c| c.motility.v = 0.0), EngineError::ConfigInvalid { field, .. } if field == "motility"));
        assert!(matches!(bad(|c| c.delivery_radius_cm = 0.0), EngineError::ConfigInvalid { .. }));
    }

    #[test]
    fn toml_round_trip() {
        let c = SimConfig { placement: Placement::Priority { high_fraction: 0.5 }, ..Default::default() };
        let text = toml::to_string(&c).unwrap();
        let back: SimConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, c);
        let partial: SimConfig = toml::from_str("seed = 9\n[motility]\nD = 14.0\n").unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.motility.rotational_diffusion, 14.0);
        assert_eq!(partial.time_limit_s, 7200.0);
        assert!(toml::from_str::<SimConfig>("bogus = 1").is_err());
    }

    #[test]
    fn streams_are_distinct() {
        use rand::Rng;
        let a: u64 = stream(1, Domain::Motion, 0).random();
        let b: u64 = stream(1, Domain::Motion, 1).random();
        let c: u64 = stream(1, Domain::Events, 0).random();
        let d: u64 = stream(1, Domain::Motion, 0).random();
        assert!(a != b && a != c && b != c);
        assert_eq!(a, d);
    }
}
