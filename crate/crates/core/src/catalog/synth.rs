//! Synthetic population generation for desk-scale experiments.
//!
//! Deterministic for a fixed (spec, seed) pair: objects are generated
//! class-group by class-group in spec order from a single seeded stream.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    Catalog, ObjectClass, OrbitalState, PhysicalProperties, ResidentSpaceObject,
};
use crate::constants::EARTH_RADIUS_KM;
use crate::error::{Error, Result};

/// Uniform range [lo, hi]; degenerate (lo = hi) is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn fixed(v: f64) -> Self {
        Range { lo: v, hi: v }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return Err(Error::Config(format!(
                "invalid {name} range [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..self.hi)
        }
    }
}

/// One class group of the synthetic population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub class: ObjectClass,
    pub count: usize,
    /// Mean altitude a − R⊕ (km).
    pub altitude_km: Range,
    pub eccentricity: Range,
    /// Inclination (rad).
    pub inclination_rad: Range,
    pub mass_kg: Range,
    pub radius_m: Range,
    /// Ballistic coefficient Cd·A/m (m²/kg); derived from mass and radius
    /// when absent.
    #[serde(default)]
    pub bc_m2_per_kg: Option<Range>,
    /// Mission lifetime draw for active payloads (years).
    #[serde(default)]
    pub mission_years: Option<Range>,
}

/// Full synthetic population description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub classes: Vec<ClassSpec>,
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<()> {
        for spec in &self.classes {
            spec.altitude_km.validate("altitude_km")?;
            spec.eccentricity.validate("eccentricity")?;
            spec.inclination_rad.validate("inclination_rad")?;
            spec.mass_kg.validate("mass_kg")?;
            spec.radius_m.validate("radius_m")?;
            if let Some(bc) = &spec.bc_m2_per_kg {
                bc.validate("bc_m2_per_kg")?;
            }
            if let Some(m) = &spec.mission_years {
                m.validate("mission_years")?;
            }
            if spec.altitude_km.lo <= 0.0 {
                return Err(Error::Config("altitude range must be positive".into()));
            }
            if spec.eccentricity.lo < 0.0 || spec.eccentricity.hi >= 1.0 {
                return Err(Error::Config("eccentricity range must lie in [0, 1)".into()));
            }
            if spec.inclination_rad.lo < 0.0 || spec.inclination_rad.hi > std::f64::consts::PI {
                return Err(Error::Config("inclination range must lie in [0, π]".into()));
            }
            if spec.mass_kg.lo <= 0.0 || spec.radius_m.lo <= 0.0 {
                return Err(Error::Config("mass and radius must be positive".into()));
            }
            if spec.class == ObjectClass::ActivePayload && spec.mission_years.is_none() {
                return Err(Error::Config(
                    "active payload class spec requires mission_years".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn total_count(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }
}

/// Generate a deterministic synthetic catalog. Ids start at 1.
pub fn synth_population(spec: &PopulationSpec, seed: u64) -> Result<Catalog> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut objects = Vec::with_capacity(spec.total_count());
    let mut id = 1u64;

    for class_spec in &spec.classes {
        for _ in 0..class_spec.count {
            let altitude = class_spec.altitude_km.sample(&mut rng);
            let ecc = class_spec.eccentricity.sample(&mut rng);
            let inc = class_spec.inclination_rad.sample(&mut rng);
            let mass = class_spec.mass_kg.sample(&mut rng);
            let radius = class_spec.radius_m.sample(&mut rng);

            let mut props = PhysicalProperties::from_mass_radius(mass, radius);
            if let Some(bc) = &class_spec.bc_m2_per_kg {
                props.bc_m2_per_kg = bc.sample(&mut rng);
            }

            let state = OrbitalState {
                semi_major_axis: EARTH_RADIUS_KM + altitude,
                eccentricity: ecc,
                inclination: inc,
                raan: rng.gen_range(0.0..TAU),
                arg_perigee: rng.gen_range(0.0..TAU),
                mean_anomaly: rng.gen_range(0.0..TAU),
                epoch: 0.0,
            };

            let mission_years_remaining = if class_spec.class == ObjectClass::ActivePayload {
                Some(class_spec.mission_years.as_ref().map_or(0.0, |r| r.sample(&mut rng)))
            } else {
                None
            };

            objects.push(ResidentSpaceObject {
                id,
                state,
                props,
                object_class: class_spec.class,
                mission_years_remaining,
                constellation_flag: false,
            });
            id += 1;
        }
    }

    let catalog = Catalog::from_objects(objects, 0.0)?;
    catalog.validate()?;
    Ok(catalog)
}
