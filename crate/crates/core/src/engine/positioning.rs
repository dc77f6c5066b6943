use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;

use super::metrics::MetricsRecord;
use super::{stream, Domain, EngineError, SimConfig};
use crate::agent::{BacteriumState, Chemotaxis};
use crate::field::{targets_for, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositioningStats {
    /// Mean final distance to the destination (cm).
    pub mean_error_cm: f64,
    /// Population standard deviation of that distance (cm).
    pub std_error_cm: f64,
}

/// Releases `n_bacteria` at `start`, programmed with the storage-triad
/// concentrations of `destination`, and measures how far they end up from it
/// after `positioning.duration_s`.
pub fn run_positioning(
    config: &SimConfig,
    start: Point,
    destination: Point,
    n_bacteria: usize,
) -> Result<PositioningStats, EngineError> {
    let layout = config.validate()?;
    if !destination.is_finite() || !start.is_finite() {
        return Err(EngineError::ConfigInvalid { field: "positioning".into(), message: "points must be finite".into() });
    }
    let chem = Chemotaxis::new(config.motility).map_err(|e| EngineError::ConfigInvalid {
        field: "motility".into(),
        message: e.0,
    })?;
    let triad = &layout.storage_triad;
    let targets = targets_for(triad, destination);
    let steps = (config.positioning.duration_s / config.motility.dt).round() as u64;
    let errors: Vec<f64> = (0..n_bacteria)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(config.seed, Domain::Motion, i as u64);
            let heading = rng.random::<f64>() * TAU;
            let mut state = BacteriumState::new(i as u32, start, heading, targets);
            state.mode = chem.update_mode(&state, triad);
            for _ in 0..steps {
                chem.step(&mut state, triad, &mut rng);
            }
            state.position.distance(destination)
        })
        .collect();
    if errors.is_empty() {
        return Ok(PositioningStats { mean_error_cm: 0.0, std_error_cm: 0.0 });
    }
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    Ok(PositioningStats { mean_error_cm: mean, std_error_cm: var.sqrt() })
}

fn circle_points(centre: Point, radius: f64, count: usize) -> Vec<Point> {
    (0..count)
        .map(|k| {
            let a = TAU * k as f64 / count as f64;
            centre.offset(radius * a.cos(), radius * a.sin())
        })
        .collect()
}

/// Every (start point, destination point) pair over the configured circles,
/// all centred on the storage triad's barycentre. Pair `k` (destinations in
/// the outer loop) runs with seed `config.seed + k`.
pub fn circle_sweep(config: &SimConfig) -> Result<Vec<MetricsRecord>, EngineError> {
    let layout = config.validate()?;
    let centre = layout.storage_triad.barycentre();
    let p = &config.positioning;
    let mut pairs = Vec::new();
    for &dr in &p.dest_radii_cm {
        for dest in circle_points(centre, dr, p.dest_points_per_circle) {
            for &sr in &p.start_radii_cm {
                for start in circle_points(centre, sr, p.start_points_per_circle) {
                    pairs.push((dr, dest, sr, start));
                }
            }
        }
    }
    pairs
        .into_par_iter()
        .enumerate()
        .map(|(k, (dr, dest, sr, start))| {
            let seed = config.seed.wrapping_add(k as u64);
            let run = SimConfig { seed, ..config.clone() };
            let stats = run_positioning(&run, start, dest, p.n_bacteria)?;
            let mut r = MetricsRecord::blank(k as u64, seed, "positioning", p.n_bacteria, config.motility.rotational_diffusion);
            r.dest_radius_cm = Some(dr);
            r.start_radius_cm = Some(sr);
            r.dest_x_cm = Some(dest.x);
            r.dest_y_cm = Some(dest.y);
            r.start_x_cm = Some(start.x);
            r.start_y_cm = Some(start.y);
            r.positioning_error_cm = Some(stats.mean_error_cm);
            r.positioning_std_cm = Some(stats.std_error_cm);
            Ok(r)
        })
        .collect()
}
