//! Shared desk-scale scenario used by the integration and acceptance
//! suites: a congested two-band environment.
//!
//! Band A (800–850 km) holds heavy rocket-body hulks massive enough to
//! shrug off small-debris impacts (chronic shower sources and the
//! ground-truth cohort suppliers), a mass gradient of medium hulks that
//! small debris can catastrophically shatter (latent fragment bombs whose
//! breakup severity grows with mass), and a dense small-debris background.
//! Band B (900–950 km) holds derelict payloads with their own debris
//! cloud. Active payloads fly a quieter lane between the bands, and a
//! long-lived background population sits above both.
//!
//! Radii are stress-test sized and ballistic coefficients are set
//! explicitly so the bands both collide and persist over the 50-year
//! horizon.

#![allow(dead_code)]

use debrisim::catalog::synth::{ClassSpec, Range};
use debrisim::catalog::ObjectClass;
use debrisim::engine::SimulationConfig;
use debrisim::events::ExplosionRates;

pub fn desk_classes() -> Vec<ClassSpec> {
    vec![
        // Heavy hulks: immune to catastrophic shattering by the ambient
        // 2 kg debris below ~14 km/s, so they accumulate collision events.
        ClassSpec {
            class: ObjectClass::RocketBody,
            count: 40,
            altitude_km: Range { lo: 805.0, hi: 845.0 },
            eccentricity: Range { lo: 0.0, hi: 0.003 },
            inclination_rad: Range { lo: 1.2, hi: 1.6 },
            mass_kg: Range { lo: 4800.0, hi: 5200.0 },
            radius_m: Range { lo: 34.0, hi: 42.0 },
            bc_m2_per_kg: Some(Range { lo: 0.003, hi: 0.006 }),
            mission_years: None,
        },
        // Medium hulks: a mass gradient of catastrophe-prone objects whose
        // breakup severity scales with mass.
        ClassSpec {
            class: ObjectClass::RocketBody,
            count: 80,
            altitude_km: Range { lo: 805.0, hi: 845.0 },
            eccentricity: Range { lo: 0.0, hi: 0.003 },
            inclination_rad: Range { lo: 1.2, hi: 1.6 },
            mass_kg: Range { lo: 800.0, hi: 2400.0 },
            radius_m: Range { lo: 22.0, hi: 30.0 },
            bc_m2_per_kg: Some(Range { lo: 0.003, hi: 0.006 }),
            mission_years: None,
        },
        ClassSpec {
            class: ObjectClass::DerelictPayload,
            count: 250,
            altitude_km: Range { lo: 900.0, hi: 950.0 },
            eccentricity: Range { lo: 0.0, hi: 0.003 },
            inclination_rad: Range { lo: 1.2, hi: 1.6 },
            mass_kg: Range { lo: 650.0, hi: 750.0 },
            radius_m: Range { lo: 4.0, hi: 6.0 },
            bc_m2_per_kg: Some(Range { lo: 0.005, hi: 0.01 }),
            mission_years: None,
        },
        ClassSpec {
            class: ObjectClass::ActivePayload,
            count: 300,
            altitude_km: Range { lo: 855.0, hi: 895.0 },
            eccentricity: Range { lo: 0.0, hi: 0.003 },
            inclination_rad: Range { lo: 1.2, hi: 1.6 },
            mass_kg: Range { lo: 650.0, hi: 750.0 },
            radius_m: Range { lo: 1.0, hi: 2.0 },
            bc_m2_per_kg: Some(Range { lo: 0.005, hi: 0.01 }),
            mission_years: Some(Range { lo: 1.0, hi: 8.0 }),
        },
        ClassSpec {
            class: ObjectClass::Debris,
            count: 3800,
            altitude_km: Range { lo: 800.0, hi: 850.0 },
            eccentricity: Range { lo: 0.0, hi: 0.003 },
            inclination_rad: Range { lo: 1.2, hi: 1.6 },
            mass_kg: Range { lo: 1.8, hi: 2.2 },
            radius_m: Range { lo: 0.3, hi: 0.6 },
            bc_m2_per_kg: Some(Range { lo: 0.008, hi: 0.02 }),
            mission_years: None,
        },
        ClassSpec {
            class: ObjectClass::Debris,
            count: 1000,
            altitude_km: Range { lo: 900.0, hi: 950.0 },
            eccentricity: Range { lo: 0.0, hi: 0.003 },
            inclination_rad: Range { lo: 1.2, hi: 1.6 },
            mass_kg: Range { lo: 1.8, hi: 2.2 },
            radius_m: Range { lo: 0.3, hi: 0.6 },
            bc_m2_per_kg: Some(Range { lo: 0.008, hi: 0.02 }),
            mission_years: None,
        },
        // Quiet high band: long-lived background objects that rarely
        // conjunct, representing the catalog mass outside the congested
        // bands.
        ClassSpec {
            class: ObjectClass::Debris,
            count: 500,
            altitude_km: Range { lo: 1000.0, hi: 1060.0 },
            eccentricity: Range { lo: 0.0, hi: 0.003 },
            inclination_rad: Range { lo: 1.2, hi: 1.6 },
            mass_kg: Range { lo: 1.8, hi: 2.2 },
            radius_m: Range { lo: 0.3, hi: 0.6 },
            bc_m2_per_kg: Some(Range { lo: 0.008, hi: 0.02 }),
            mission_years: None,
        },
    ]
}

/// The desk-scale baseline: ~6,000 objects over a 50-year horizon,
/// no removals, MITRI risk tracking, intra-run parallelism off (ensembles
/// parallelize across seeds instead).
pub fn desk_config() -> SimulationConfig {
    let mut config = SimulationConfig::default();
    config.simulation.horizon_years = 50.0;
    config.simulation.timestep_days = 5.0;
    config.simulation.record_interval_steps = 10;
    config.simulation.parallel = false;
    config.population.synth_seed = 2024;
    config.population.classes = desk_classes();
    config.events.launch_rate_per_year = 37.5;
    config.events.mission_lifetime_years = 8.0;
    config.events.pmd_success_prob = 0.9;
    config.events.avoidance_failure_prob = 0.01;
    config.events.explosion_rates = ExplosionRates {
        active: 0.0,
        derelict: 2e-5,
        rocket_body: 2e-5,
        debris: 0.0,
    };
    config.atmosphere.lifetime_cap_years = 100.0;
    config.validate().expect("desk config valid");
    config
}

/// A small fast variant for smoke tests: ~700 objects, 5 years.
pub fn mini_config() -> SimulationConfig {
    let mut config = desk_config();
    config.simulation.horizon_years = 5.0;
    for class in config.population.classes.iter_mut() {
        class.count = (class.count / 8).max(8);
    }
    config.validate().expect("mini config valid");
    config
}
