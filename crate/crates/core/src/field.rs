//! Static chemoattractant field around fixed beacons.
//!
//! Each beacon emits its own attractant whose concentration falls off as
//! `exp(-d²)` with `d` in cm. A motile bacterium is programmed with one
//! target concentration per beacon (the value found at its destination) and
//! only responds to a beacon while the sensed value stays strictly below that
//! target.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    #[inline]
    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

fn unit_amplitude() -> f64 {
    1.0
}

/// A fixed chemoemitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beacon {
    pub id: u32,
    pub position: Point,
    /// Attractant channel; unique per beacon.
    pub attractant: u32,
    /// Peak concentration at the beacon itself.
    #[serde(default = "unit_amplitude")]
    pub amplitude: f64,
}

impl Beacon {
    pub fn new(id: u32, position: Point) -> Beacon {
        Beacon { id, position, attractant: id, amplitude: 1.0 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("beacons are collinear")]
    Collinear,
    #[error("beacon id or attractant {0} used twice")]
    DuplicateBeacon(u32),
    #[error("beacon {0} has non-positive or non-finite amplitude")]
    BadAmplitude(u32),
}

/// Three beacons spanning a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Beacon; 3]", into = "[Beacon; 3]")]
pub struct BeaconTriad {
    beacons: [Beacon; 3],
}

impl TryFrom<[Beacon; 3]> for BeaconTriad {
    type Error = FieldError;

    fn try_from(beacons: [Beacon; 3]) -> Result<Self, Self::Error> {
        BeaconTriad::new(beacons)
    }
}

impl From<BeaconTriad> for [Beacon; 3] {
    fn from(t: BeaconTriad) -> Self {
        t.beacons
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

impl BeaconTriad {
    pub fn new(beacons: [Beacon; 3]) -> Result<BeaconTriad, FieldError> {
        for i in 0..3 {
            if !(beacons[i].amplitude.is_finite() && beacons[i].amplitude > 0.0) {
                return Err(FieldError::BadAmplitude(beacons[i].id));
            }
            for j in i + 1..3 {
                if beacons[i].id == beacons[j].id {
                    return Err(FieldError::DuplicateBeacon(beacons[i].id));
                }
                if beacons[i].attractant == beacons[j].attractant {
                    return Err(FieldError::DuplicateBeacon(beacons[i].attractant));
                }
            }
        }
        let [a, b, c] = beacons.map(|b| b.position);
        let area2 = cross(a, b, c);
        let scale = a.distance_sq(b).max(b.distance_sq(c)).max(a.distance_sq(c));
        if !area2.is_finite() || area2.abs() <= 1e-12 * scale {
            return Err(FieldError::Collinear);
        }
        Ok(BeaconTriad { beacons })
    }

    /// Equilateral triad of side `side` centred at `centre`. The first beacon
    /// sits at angle `apex_angle` (radians) as seen from the centre; the others
    /// follow counter-clockwise. Ids start at `first_id`.
    pub fn equilateral(centre: Point, side: f64, apex_angle: f64, first_id: u32) -> Result<BeaconTriad, FieldError> {
        let r = side / 3f64.sqrt();
        let beacons = [0u32, 1, 2].map(|k| {
            let a = apex_angle + k as f64 * 2.0 * std::f64::consts::PI / 3.0;
            Beacon::new(first_id + k, centre.offset(r * a.cos(), r * a.sin()))
        });
        BeaconTriad::new(beacons)
    }

    pub fn beacons(&self) -> &[Beacon; 3] {
        &self.beacons
    }

    pub fn barycentre(&self) -> Point {
        let [a, b, c] = self.beacons.map(|b| b.position);
        Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    /// True when `p` lies strictly inside the triangle.
    pub fn contains(&self, p: Point) -> bool {
        let [a, b, c] = self.beacons.map(|b| b.position);
        let d1 = cross(a, b, p);
        let d2 = cross(b, c, p);
        let d3 = cross(c, a, p);
        (d1 > 0.0 && d2 > 0.0 && d3 > 0.0) || (d1 < 0.0 && d2 < 0.0 && d3 < 0.0)
    }

    /// Point whose distances to the beacons match `targets`, from the linear
    /// system obtained by differencing the three circle equations. `None` if
    /// a target is out of range.
    pub fn trilaterate(&self, targets: &TargetConcentrations) -> Option<Point> {
        let r2 = self.target_radii_sq(targets)?;
        let [p1, p2, p3] = self.beacons.map(|b| b.position);
        let norm = |p: Point| p.x * p.x + p.y * p.y;
        let (a11, a12) = (2.0 * (p2.x - p1.x), 2.0 * (p2.y - p1.y));
        let (a21, a22) = (2.0 * (p3.x - p1.x), 2.0 * (p3.y - p1.y));
        let b1 = r2[0] - r2[1] + norm(p2) - norm(p1);
        let b2 = r2[0] - r2[2] + norm(p3) - norm(p1);
        let det = a11 * a22 - a12 * a21;
        Some(Point::new((b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det))
    }

    /// Squared radii of the three "target circles", `-ln(c_i / amplitude_i)`.
    pub fn target_radii_sq(&self, targets: &TargetConcentrations) -> Option<[f64; 3]> {
        let mut out = [0.0; 3];
        for (i, b) in self.beacons.iter().enumerate() {
            let c = targets.0[i] / b.amplitude;
            if !(c > 0.0 && c <= 1.0) {
                return None;
            }
            out[i] = -c.ln();
        }
        Some(out)
    }
}

/// One target concentration per beacon of a triad, the virtual address of a
/// location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetConcentrations([f64; 3]);

impl TargetConcentrations {
    /// Explicit targets, for receptor programming that does not correspond to
    /// a reachable location. Values must be positive and finite.
    pub fn from_values(values: [f64; 3]) -> Option<TargetConcentrations> {
        values
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
            .then_some(TargetConcentrations(values))
    }

    pub fn values(&self) -> [f64; 3] {
        self.0
    }
}

impl std::ops::Index<usize> for TargetConcentrations {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[inline]
pub fn raw_concentration(beacon: &Beacon, pos: Point) -> f64 {
    beacon.amplitude * (-beacon.position.distance_sq(pos)).exp()
}

/// The raw value while it stays strictly below `target`, zero otherwise.
#[inline]
pub fn gated_concentration(beacon: &Beacon, pos: Point, target: f64) -> f64 {
    let raw = raw_concentration(beacon, pos);
    if raw < target {
        raw
    } else {
        0.0
    }
}

pub fn sensed_vector(triad: &BeaconTriad, pos: Point, targets: &TargetConcentrations) -> [f64; 3] {
    let b = triad.beacons();
    [0, 1, 2].map(|i| gated_concentration(&b[i], pos, targets.0[i]))
}

pub fn raw_vector(triad: &BeaconTriad, pos: Point) -> [f64; 3] {
    triad.beacons().map(|b| raw_concentration(&b, pos))
}

/// The concentrations a bacterium must see to be at `destination`.
pub fn targets_for(triad: &BeaconTriad, destination: Point) -> TargetConcentrations {
    TargetConcentrations(raw_vector(triad, destination))
}
