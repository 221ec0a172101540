//! Object population: resident space objects, catalogs, altitude shells.

pub mod io;
pub mod synth;
pub mod tle;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::EARTH_RADIUS_KM;
use crate::error::{Error, Result};

/// Mean Keplerian orbital state. Angles in radians, normalized to [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalState {
    /// Semi-major axis (km).
    pub semi_major_axis: f64,
    /// Eccentricity.
    pub eccentricity: f64,
    /// Inclination (rad).
    pub inclination: f64,
    /// Right ascension of the ascending node (rad).
    pub raan: f64,
    /// Argument of perigee (rad).
    pub arg_perigee: f64,
    /// Mean anomaly (rad).
    pub mean_anomaly: f64,
    /// Epoch (days since simulation start).
    pub epoch: f64,
}

impl OrbitalState {
    /// Mean altitude above the Earth's surface, a − R⊕ (km).
    pub fn mean_altitude_km(&self) -> f64 {
        self.semi_major_axis - EARTH_RADIUS_KM
    }

    /// Perigee altitude, a(1 − e) − R⊕ (km).
    pub fn perigee_altitude_km(&self) -> f64 {
        self.semi_major_axis * (1.0 - self.eccentricity) - EARTH_RADIUS_KM
    }

    /// Normalize all angles into [0, 2π).
    pub fn normalize_angles(&mut self) {
        self.inclination = self.inclination.rem_euclid(TAU);
        self.raan = self.raan.rem_euclid(TAU);
        self.arg_perigee = self.arg_perigee.rem_euclid(TAU);
        self.mean_anomaly = self.mean_anomaly.rem_euclid(TAU);
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.semi_major_axis > EARTH_RADIUS_KM) {
            return Err(Error::Domain(format!(
                "semi-major axis {} km must exceed the Earth radius",
                self.semi_major_axis
            )));
        }
        if !(0.0..1.0).contains(&self.eccentricity) {
            return Err(Error::Domain(format!(
                "eccentricity {} outside [0, 1)",
                self.eccentricity
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.inclination) {
            return Err(Error::Domain(format!(
                "inclination {} outside [0, π]",
                self.inclination
            )));
        }
        for (name, angle) in [
            ("raan", self.raan),
            ("arg_perigee", self.arg_perigee),
            ("mean_anomaly", self.mean_anomaly),
        ] {
            if !(0.0..TAU).contains(&angle) {
                return Err(Error::Domain(format!("{name} {angle} outside [0, 2π)")));
            }
        }
        Ok(())
    }
}

/// Physical properties of a resident space object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalProperties {
    /// Mass (kg).
    pub mass_kg: f64,
    /// Collision hard-body radius (m).
    pub radius_m: f64,
    /// Cross section (m²); π·r² unless ingested from a sidecar.
    pub cross_section_m2: f64,
    /// Ballistic coefficient Cd·A/m (m²/kg).
    pub bc_m2_per_kg: f64,
}

impl PhysicalProperties {
    /// Drag coefficient used when deriving the ballistic coefficient.
    pub const DRAG_COEFFICIENT: f64 = 2.2;

    /// Build from mass and radius, deriving cross section and Cd·A/m.
    pub fn from_mass_radius(mass_kg: f64, radius_m: f64) -> Self {
        let cross_section_m2 = std::f64::consts::PI * radius_m * radius_m;
        PhysicalProperties {
            mass_kg,
            radius_m,
            cross_section_m2,
            bc_m2_per_kg: Self::DRAG_COEFFICIENT * cross_section_m2 / mass_kg,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass_kg", self.mass_kg),
            ("radius_m", self.radius_m),
            ("cross_section_m2", self.cross_section_m2),
            ("bc_m2_per_kg", self.bc_m2_per_kg),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} = {v} must be strictly positive")));
            }
        }
        Ok(())
    }
}

/// Object class, used for event rates, property defaults and ADR eligibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    ActivePayload,
    DerelictPayload,
    RocketBody,
    Debris,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 4] = [
        ObjectClass::ActivePayload,
        ObjectClass::DerelictPayload,
        ObjectClass::RocketBody,
        ObjectClass::Debris,
    ];

    /// Default mass/radius assigned to bare TLE records of this class.
    pub fn default_properties(self) -> PhysicalProperties {
        match self {
            ObjectClass::ActivePayload | ObjectClass::DerelictPayload => {
                PhysicalProperties::from_mass_radius(700.0, 1.0)
            }
            ObjectClass::RocketBody => PhysicalProperties::from_mass_radius(2000.0, 2.5),
            ObjectClass::Debris => PhysicalProperties::from_mass_radius(5.0, 0.2),
        }
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ObjectClass::ActivePayload => "active",
            ObjectClass::DerelictPayload => "derelict",
            ObjectClass::RocketBody => "rocket_body",
            ObjectClass::Debris => "debris",
        };
        f.write_str(name)
    }
}

impl FromStr for ObjectClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "active" => Ok(ObjectClass::ActivePayload),
            "derelict" => Ok(ObjectClass::DerelictPayload),
            "rocket_body" | "rb" => Ok(ObjectClass::RocketBody),
            "debris" => Ok(ObjectClass::Debris),
            other => Err(Error::Parse(format!("unknown object class '{other}'"))),
        }
    }
}

/// One cataloged object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidentSpaceObject {
    pub id: u64,
    pub state: OrbitalState,
    pub props: PhysicalProperties,
    pub object_class: ObjectClass,
    /// Remaining mission lifetime (years); present only for active payloads.
    pub mission_years_remaining: Option<f64>,
    pub constellation_flag: bool,
}

impl ResidentSpaceObject {
    pub fn is_active(&self) -> bool {
        self.object_class == ObjectClass::ActivePayload
    }

    /// Active payload still inside its mission life (station-kept).
    pub fn is_station_kept(&self) -> bool {
        self.is_active() && self.mission_years_remaining.map_or(false, |y| y > 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.state.validate()?;
        self.props.validate()?;
        match (self.object_class, self.mission_years_remaining) {
            (ObjectClass::ActivePayload, Some(y)) if y >= 0.0 => Ok(()),
            (ObjectClass::ActivePayload, _) => Err(Error::Domain(format!(
                "object {} is an active payload without a non-negative mission lifetime",
                self.id
            ))),
            (_, None) => Ok(()),
            (_, Some(_)) => Err(Error::Domain(format!(
                "object {} carries a mission lifetime but is not an active payload",
                self.id
            ))),
        }
    }
}

/// Object population. Iteration order is ascending id (determinism contract).
#[derive(Debug, Default, PartialEq)]
pub struct Catalog {
    objects: Vec<ResidentSpaceObject>,
    /// Epoch (days since simulation start).
    pub epoch: f64,
}

impl Clone for Catalog {
    fn clone(&self) -> Self {
        Catalog { objects: self.objects.clone(), epoch: self.epoch }
    }

    // Reuses the destination's buffer; the per-step snapshot in the engine
    // leans on this.
    fn clone_from(&mut self, source: &Self) {
        self.objects.clone_from(&source.objects);
        self.epoch = source.epoch;
    }
}

impl Catalog {
    pub fn new() -> Self {
        Catalog { objects: Vec::new(), epoch: 0.0 }
    }

    /// Build from arbitrary-order objects; sorts by id and rejects duplicates.
    pub fn from_objects(mut objects: Vec<ResidentSpaceObject>, epoch: f64) -> Result<Self> {
        objects.sort_by_key(|o| o.id);
        for pair in objects.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::Contract(format!("duplicate id {} in catalog", pair[0].id)));
            }
        }
        Ok(Catalog { objects, epoch })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ResidentSpaceObject> {
        self.objects.iter()
    }

    pub fn iter_mut(&mut self) -> std::slice::IterMut<'_, ResidentSpaceObject> {
        self.objects.iter_mut()
    }

    pub fn objects(&self) -> &[ResidentSpaceObject] {
        &self.objects
    }

    pub fn objects_mut(&mut self) -> &mut [ResidentSpaceObject] {
        &mut self.objects
    }

    pub fn get(&self, id: u64) -> Option<&ResidentSpaceObject> {
        self.position_of(id).map(|i| &self.objects[i])
    }

    pub fn position_of(&self, id: u64) -> Option<usize> {
        self.objects.binary_search_by_key(&id, |o| o.id).ok()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.position_of(id).is_some()
    }

    /// Insert a new object; its id must not already be present.
    pub fn insert(&mut self, object: ResidentSpaceObject) -> Result<()> {
        match self.objects.binary_search_by_key(&object.id, |o| o.id) {
            Ok(_) => Err(Error::Contract(format!("id {} already in catalog", object.id))),
            Err(pos) => {
                self.objects.insert(pos, object);
                Ok(())
            }
        }
    }

    /// Remove an object by id; errors if it is absent (double removal).
    pub fn remove(&mut self, id: u64) -> Result<ResidentSpaceObject> {
        match self.objects.binary_search_by_key(&id, |o| o.id) {
            Ok(pos) => Ok(self.objects.remove(pos)),
            Err(_) => Err(Error::Contract(format!("removal of id {id} not present in catalog"))),
        }
    }

    /// Smallest id strictly greater than every id ever observed here.
    pub fn next_id(&self) -> u64 {
        self.objects.last().map_or(1, |o| o.id + 1)
    }

    pub fn validate(&self) -> Result<()> {
        for pair in self.objects.windows(2) {
            if pair[0].id >= pair[1].id {
                return Err(Error::Contract("catalog not sorted by ascending id".into()));
            }
        }
        for obj in &self.objects {
            obj.validate()?;
        }
        Ok(())
    }

    pub fn count_by_class(&self, class: ObjectClass) -> usize {
        self.objects.iter().filter(|o| o.object_class == class).count()
    }
}

/// Concentric altitude shells used for background-density bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellGrid {
    /// Lowest shell floor (km).
    pub floor_km: f64,
    /// Shell width (km).
    pub width_km: f64,
    /// Band ceiling (km); altitudes at or above it are out of range.
    pub ceiling_km: f64,
}

impl Default for ShellGrid {
    fn default() -> Self {
        ShellGrid { floor_km: 200.0, width_km: 50.0, ceiling_km: 2000.0 }
    }
}

impl ShellGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.width_km > 0.0) {
            return Err(Error::Config(format!("shell width {} must be positive", self.width_km)));
        }
        if self.ceiling_km <= self.floor_km {
            return Err(Error::Config(format!(
                "shell ceiling {} must exceed floor {}",
                self.ceiling_km, self.floor_km
            )));
        }
        Ok(())
    }

    pub fn shell_count(&self) -> usize {
        ((self.ceiling_km - self.floor_km) / self.width_km).ceil() as usize
    }

    /// Altitude bounds [lo, hi) of shell `index` (km).
    pub fn shell_bounds_km(&self, index: usize) -> (f64, f64) {
        let lo = self.floor_km + index as f64 * self.width_km;
        (lo, (lo + self.width_km).min(self.ceiling_km))
    }

    /// Volume of shell `index` (km³): (4π/3)·((R⊕+h_top)³ − (R⊕+h_bot)³).
    pub fn shell_volume_km3(&self, index: usize) -> f64 {
        let (lo, hi) = self.shell_bounds_km(index);
        let r_lo = EARTH_RADIUS_KM + lo;
        let r_hi = EARTH_RADIUS_KM + hi;
        (4.0 * std::f64::consts::PI / 3.0) * (r_hi.powi(3) - r_lo.powi(3))
    }
}

/// Shell id for an altitude, or `None` when outside [floor, ceiling).
pub fn shell_index(altitude_km: f64, grid: &ShellGrid) -> Option<usize> {
    if altitude_km < grid.floor_km || altitude_km >= grid.ceiling_km || !altitude_km.is_finite() {
        return None;
    }
    Some(((altitude_km - grid.floor_km) / grid.width_km) as usize)
}

/// Per-shell object counts, plus the number of out-of-range objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellCounts {
    pub counts: Vec<usize>,
    pub out_of_range: usize,
}

/// Count objects per shell by mean altitude (a − R⊕).
pub fn shell_counts(catalog: &Catalog, grid: &ShellGrid) -> ShellCounts {
    let mut counts = vec![0usize; grid.shell_count()];
    let mut out_of_range = 0usize;
    for obj in catalog.iter() {
        match shell_index(obj.state.mean_altitude_km(), grid) {
            Some(s) => counts[s] += 1,
            None => out_of_range += 1,
        }
    }
    ShellCounts { counts, out_of_range }
}
