//! Engineered motile bacterium: gradient-seeking run-and-tumble steering with
//! receptor saturation.
//!
//! Every step the bacterium scans candidate headings within `±psi_a` of its
//! current heading, picks the one whose look-ahead point maximises the sum of
//! gated concentrations, adds a random tumble of fixed magnitude
//! `sqrt(2·D·dt)` and swims `v·dt` along the result. Once all three receptors
//! are saturated it only tumbles, and it resumes steering when any
//! concentration drops below its target by more than the hysteresis margin.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::Plasmid;
use crate::field::{raw_vector, BeaconTriad, Point, TargetConcentrations};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid motility parameter: {0}")]
pub struct MotilityError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotilityParams {
    /// Step interval (s).
    pub dt: f64,
    /// Swim speed (cm/s).
    pub v: f64,
    /// Rotational diffusion coefficient (rad²/s).
    #[serde(rename = "D")]
    pub rotational_diffusion: f64,
    /// Half-width of the heading scan (rad).
    pub psi_a: f64,
    /// Number of equispaced scan samples; odd so that zero is included.
    pub n_scan: usize,
    /// Relative drop below target that ends saturation.
    pub saturation_hysteresis: f64,
}

impl Default for MotilityParams {
    fn default() -> Self {
        Self {
            dt: 2e-2,
            v: 5e-3,
            rotational_diffusion: 5.0,
            psi_a: 3.49e-2,
            n_scan: 21,
            saturation_hysteresis: 0.02,
        }
    }
}

impl MotilityParams {
    pub fn validate(&self) -> Result<(), MotilityError> {
        let positive = [("dt", self.dt), ("v", self.v), ("psi_a", self.psi_a)];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(MotilityError(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.rotational_diffusion.is_finite() && self.rotational_diffusion >= 0.0) {
            return Err(MotilityError(format!("D must be non-negative, got {}", self.rotational_diffusion)));
        }
        if self.n_scan < 3 || self.n_scan.is_multiple_of(2) || self.n_scan > MAX_SCAN {
            return Err(MotilityError(format!("n_scan must be odd and in 3..={MAX_SCAN}, got {}", self.n_scan)));
        }
        if !(0.0..1.0).contains(&self.saturation_hysteresis) {
            return Err(MotilityError(format!(
                "saturation_hysteresis must lie in [0, 1), got {}",
                self.saturation_hysteresis
            )));
        }
        Ok(())
    }

    /// Distance covered by one step.
    pub fn step_length(&self) -> f64 {
        self.v * self.dt
    }

    pub fn tumble_magnitude(&self) -> f64 {
        (2.0 * self.rotational_diffusion * self.dt).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Chemotaxis,
    /// Attached to a storage bacterium; frozen for the remaining steps.
    Conjugating { remaining_steps: u64 },
    /// All receptors saturated; random walk only.
    Saturated,
}

impl Mode {
    /// Conjugation lasting `duration_s`, i.e. `ceil(duration_s / dt)` frozen
    /// steps.
    pub fn conjugating(duration_s: f64, dt: f64) -> Mode {
        let steps = (duration_s / dt - 1e-9).ceil().max(0.0);
        Mode::Conjugating { remaining_steps: steps as u64 }
    }

    /// Seconds left in conjugation, zero otherwise.
    pub fn remaining_s(&self, dt: f64) -> f64 {
        match self {
            Mode::Conjugating { remaining_steps } => *remaining_steps as f64 * dt,
            _ => 0.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Mode::Chemotaxis => "chemotaxis",
            Mode::Conjugating { .. } => "conjugating",
            Mode::Saturated => "saturated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacteriumState {
    pub id: u32,
    pub position: Point,
    /// Radians in (-π, π].
    pub heading: f64,
    pub mode: Mode,
    pub targets: TargetConcentrations,
    pub cargo: Vec<Arc<Plasmid>>,
    pub should_conjugate: bool,
}

impl BacteriumState {
    pub fn new(id: u32, position: Point, heading: f64, targets: TargetConcentrations) -> BacteriumState {
        BacteriumState {
            id,
            position,
            heading: wrap_angle(heading),
            mode: Mode::Chemotaxis,
            targets,
            cargo: Vec::new(),
            should_conjugate: true,
        }
    }
}

/// Maps an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Upper bound on `n_scan`.
pub const MAX_SCAN: usize = 63;

const SMALL_EXPONENT: f64 = 1.5e-4;

/// `exp(x)` for `|x| < SMALL_EXPONENT`; the dropped `x^4/24` term is below
/// half an ulp there.
#[inline(always)]
fn exp_small(x: f64) -> f64 {
    1.0 + x * (1.0 + x * (0.5 + x * (1.0 / 6.0)))
}

/// Steering model with the heading scan precomputed.
#[derive(Debug, Clone)]
pub struct Chemotaxis {
    params: MotilityParams,
    // Ordered by preference for ties: 0, -δ, +δ, -2δ, +2δ, ...
    scan_psi: Vec<f64>,
    scan_cos: Vec<f64>,
    scan_sin: Vec<f64>,
    step_len: f64,
    tumble: f64,
}

impl Chemotaxis {
    pub fn new(params: MotilityParams) -> Result<Chemotaxis, MotilityError> {
        params.validate()?;
        let half = (params.n_scan - 1) / 2;
        let spacing = params.psi_a / half as f64;
        let mut scan_psi = Vec::with_capacity(params.n_scan);
        let mut push = |k: isize| {
            scan_psi.push(if k.unsigned_abs() == half {
                params.psi_a * k.signum() as f64
            } else {
                k as f64 * spacing
            });
        };
        push(0);
        for k in 1..=half as isize {
            push(-k);
            push(k);
        }
        Ok(Chemotaxis {
            params,
            scan_cos: scan_psi.iter().map(|p| p.cos()).collect(),
            scan_sin: scan_psi.iter().map(|p| p.sin()).collect(),
            scan_psi,
            step_len: params.step_length(),
            tumble: params.tumble_magnitude(),
        })
    }

    pub fn params(&self) -> &MotilityParams {
        &self.params
    }

    /// The scan offset whose look-ahead point sees the largest sum of gated
    /// concentrations.
    pub fn best_heading(&self, state: &BacteriumState, triad: &BeaconTriad) -> f64 {
        let n = self.scan_psi.len();
        let (cos, sin) = (&self.scan_cos[..n], &self.scan_sin[..n]);
        let (s0, c0) = state.heading.sin_cos();
        let targets = state.targets.values();
        let len = self.step_len;
        let len_sq = len * len;
        let mut totals = [0.0f64; MAX_SCAN];
        let totals = &mut totals[..n];
        for (i, beacon) in triad.beacons().iter().enumerate() {
            let dx = state.position.x - beacon.position.x;
            let dy = state.position.y - beacon.position.y;
            let base = beacon.amplitude * (-(dx * dx + dy * dy)).exp();
            // |d + u|^2 = |d|^2 + 2 d.u + |u|^2, and d.u is linear in the
            // scan sample's (cos, sin).
            let p = -2.0 * len * (dx * c0 + dy * s0);
            let q = -2.0 * len * (dy * c0 - dx * s0);
            let target = targets[i];
            if p.abs() + q.abs() + len_sq < SMALL_EXPONENT {
                for k in 0..n {
                    let raw = base * exp_small(p * cos[k] + q * sin[k] - len_sq);
                    totals[k] += if raw < target { raw } else { 0.0 };
                }
            } else {
                for k in 0..n {
                    let raw = base * (p * cos[k] + q * sin[k] - len_sq).exp();
                    totals[k] += if raw < target { raw } else { 0.0 };
                }
            }
        }
        let mut best = 0;
        for k in 1..n {
            if totals[k] > totals[best] {
                best = k;
            }
        }
        self.scan_psi[best]
    }

    /// `±sqrt(2·D·dt)` with an equiprobable sign.
    pub fn tumble_term<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random::<bool>() {
            self.tumble
        } else {
            -self.tumble
        }
    }

    pub fn step<R: Rng + ?Sized>(&self, state: &mut BacteriumState, triad: &BeaconTriad, rng: &mut R) {
        match state.mode {
            Mode::Conjugating { remaining_steps } => {
                if remaining_steps <= 1 {
                    state.mode = Mode::Chemotaxis;
                    state.mode = self.update_mode(state, triad);
                } else {
                    state.mode = Mode::Conjugating { remaining_steps: remaining_steps - 1 };
                }
            }
            Mode::Chemotaxis => {
                let steer = self.best_heading(state, triad);
                let phi = self.tumble_term(rng);
                self.swim(state, steer + phi);
                state.mode = self.update_mode(state, triad);
            }
            Mode::Saturated => {
                let phi = self.tumble_term(rng);
                self.swim(state, phi);
                state.mode = self.update_mode(state, triad);
            }
        }
    }

    fn swim(&self, state: &mut BacteriumState, turn: f64) {
        state.heading = wrap_angle(state.heading + turn);
        let (s, c) = state.heading.sin_cos();
        state.position = state.position.offset(self.step_len * c, self.step_len * s);
    }

    /// Mode implied by the current position. Saturation needs every raw
    /// concentration at or above its target; leaving it needs one to fall
    /// below `target·(1 - h)`. A conjugating bacterium keeps its mode.
    pub fn update_mode(&self, state: &BacteriumState, triad: &BeaconTriad) -> Mode {
        if let Mode::Conjugating { .. } = state.mode {
            return state.mode;
        }
        let raw = raw_vector(triad, state.position);
        let targets = state.targets.values();
        if (0..3).all(|i| raw[i] >= targets[i]) {
            return Mode::Saturated;
        }
        let keep = 1.0 - self.params.saturation_hysteresis;
        if state.mode == Mode::Saturated && (0..3).all(|i| raw[i] >= targets[i] * keep) {
            Mode::Saturated
        } else {
            Mode::Chemotaxis
        }
    }

    /// Reprograms the receptors, e.g. from the storage area to the delivery
    /// point.
    pub fn retarget(&self, state: &mut BacteriumState, targets: TargetConcentrations, triad: &BeaconTriad) {
        state.targets = targets;
        if state.mode == Mode::Saturated {
            state.mode = Mode::Chemotaxis;
        }
        state.mode = self.update_mode(state, triad);
    }
}
