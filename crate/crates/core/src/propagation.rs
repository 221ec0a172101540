//! First-order analytical orbit propagation.
//!
//! Semi-major axis decays under drag as ȧ = −BC·ρ·√(μa) with a piecewise
//! exponential atmosphere; RAAN and argument of perigee advance at the
//! standard J2 secular rates; mean anomaly advances at the mean motion.
//! Eccentricity and inclination are held fixed at this order.

use std::path::Path;

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::catalog::{OrbitalState, PhysicalProperties};
use crate::constants::{DAYS_PER_YEAR, EARTH_RADIUS_KM, J2, MU_EARTH, SECONDS_PER_DAY};
use crate::error::{Error, Result};

/// One band of the piecewise-exponential atmosphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtmosphereBand {
    pub base_altitude_km: f64,
    pub base_density_kg_m3: f64,
    pub scale_height_km: f64,
}

/// Piecewise-exponential static atmosphere. Bands are contiguous and
/// ordered; above the top band the top scale height extrapolates.
#[derive(Debug, Clone, PartialEq)]
pub struct AtmosphereModel {
    bands: Vec<AtmosphereBand>,
}

impl AtmosphereModel {
    /// Static 12-band table with CIRA-like structure between 0 and 2000 km;
    /// no solar-cycle variation. Scale heights chain each band's density
    /// into the next base, so the profile is continuous and monotone.
    pub fn standard() -> Self {
        let table = [
            (0.0, 1.225, 7.251861),
            (25.0, 3.899e-2, 6.692542),
            (100.0, 5.297e-7, 9.017519),
            (150.0, 2.070e-9, 24.944491),
            (200.0, 2.789e-10, 40.894319),
            (300.0, 2.418e-11, 53.462813),
            (400.0, 3.725e-12, 59.649242),
            (500.0, 6.967e-13, 63.821653),
            (600.0, 1.454e-13, 71.834525),
            (700.0, 3.614e-14, 88.667304),
            (800.0, 1.170e-14, 147.638174),
            (1000.0, 3.019e-15, 268.0),
        ];
        let bands = table
            .iter()
            .map(|&(h, rho, sh)| AtmosphereBand {
                base_altitude_km: h,
                base_density_kg_m3: rho,
                scale_height_km: sh,
            })
            .collect();
        AtmosphereModel { bands }
    }

    /// Zero-density model; useful for isolating the conservative dynamics.
    pub fn vacuum() -> Self {
        AtmosphereModel {
            bands: vec![AtmosphereBand {
                base_altitude_km: 0.0,
                base_density_kg_m3: 0.0,
                scale_height_km: 1.0,
            }],
        }
    }

    pub fn from_bands(bands: Vec<AtmosphereBand>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::Config("atmosphere table must have at least one band".into()));
        }
        for pair in bands.windows(2) {
            if pair[1].base_altitude_km <= pair[0].base_altitude_km {
                return Err(Error::Config("atmosphere bands must be ordered by altitude".into()));
            }
            if pair[1].base_density_kg_m3 > pair[0].base_density_kg_m3 {
                return Err(Error::Config(
                    "atmosphere base densities must be non-increasing with altitude".into(),
                ));
            }
        }
        for b in &bands {
            if !(b.base_density_kg_m3 > 0.0) || !(b.scale_height_km > 0.0) {
                return Err(Error::Config(
                    "atmosphere densities and scale heights must be positive".into(),
                ));
            }
        }
        Ok(AtmosphereModel { bands })
    }

    /// Parse the external table format: `h_base_km,rho_kgm3,scale_height_km`
    /// with that exact header.
    pub fn from_table(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("h_base_km,rho_kgm3,scale_height_km") => {}
            other => {
                return Err(Error::Parse(format!(
                    "atmosphere table header mismatch, got {other:?}"
                )))
            }
        }
        let mut bands = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("atmosphere table line {}: 3 columns", i + 2)));
            }
            let mut vals = [0.0; 3];
            for (j, c) in cols.iter().enumerate() {
                vals[j] = c.trim().parse().map_err(|_| {
                    Error::Parse(format!("atmosphere table line {}: bad number '{c}'", i + 2))
                })?;
            }
            bands.push(AtmosphereBand {
                base_altitude_km: vals[0],
                base_density_kg_m3: vals[1],
                scale_height_km: vals[2],
            });
        }
        Self::from_bands(bands)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_table(&std::fs::read_to_string(path)?)
    }

    /// Serialize in the external table format.
    pub fn to_table(&self) -> String {
        let mut out = String::from("h_base_km,rho_kgm3,scale_height_km\n");
        for b in &self.bands {
            out.push_str(&format!(
                "{},{:e},{}\n",
                b.base_altitude_km, b.base_density_kg_m3, b.scale_height_km
            ));
        }
        out
    }

    pub fn bands(&self) -> &[AtmosphereBand] {
        &self.bands
    }
}

/// Fixed physical constants for the gravity model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GravityConstants {
    pub mu_km3_s2: f64,
    pub earth_radius_km: f64,
    pub j2: f64,
}

impl Default for GravityConstants {
    fn default() -> Self {
        GravityConstants { mu_km3_s2: MU_EARTH, earth_radius_km: EARTH_RADIUS_KM, j2: J2 }
    }
}

/// Atmospheric density (kg/m³) at the given altitude.
///
/// ρ = ρ_base·exp(−(h − h_base)/H) with the band containing h; below the
/// lowest band base the lowest band extrapolates upward, above the top
/// band the top scale height extrapolates.
pub fn atmospheric_density(altitude_km: f64, model: &AtmosphereModel) -> Result<f64> {
    if !(altitude_km >= 0.0) {
        return Err(Error::Domain(format!("altitude {altitude_km} km must be non-negative")));
    }
    let bands = &model.bands;
    let idx = bands
        .partition_point(|b| b.base_altitude_km <= altitude_km)
        .saturating_sub(1);
    let band = &bands[idx];
    Ok(band.base_density_kg_m3
        * (-(altitude_km - band.base_altitude_km) / band.scale_height_km).exp())
}

/// Propagation environment: constants, atmosphere and the reentry altitude
/// below which an object is flagged decayed.
#[derive(Debug, Clone)]
pub struct PropagationContext {
    pub consts: GravityConstants,
    pub atmosphere: AtmosphereModel,
    pub reentry_altitude_km: f64,
}

impl PropagationContext {
    pub fn new(atmosphere: AtmosphereModel, reentry_altitude_km: f64) -> Self {
        PropagationContext { consts: GravityConstants::default(), atmosphere, reentry_altitude_km }
    }
}

/// Result of one propagation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagated {
    pub state: OrbitalState,
    /// Mean altitude dropped below the reentry altitude during this step.
    pub decayed: bool,
}

/// Semi-major axis decay rate ȧ (km/s) from drag.
///
/// Units harmonized internally: BC m²/kg → km²/kg (1e-6) and ρ kg/m³ →
/// kg/km³ (1e9) combine to a net factor of 1e3.
fn drag_a_dot(a_km: f64, bc_m2_per_kg: f64, rho_kg_m3: f64, mu: f64) -> f64 {
    -bc_m2_per_kg * rho_kg_m3 * 1.0e3 * (mu * a_km).sqrt()
}

/// Advance an orbital state by `dt_s` seconds.
pub fn propagate(
    state: &OrbitalState,
    props: &PhysicalProperties,
    dt_s: f64,
    ctx: &PropagationContext,
) -> Result<Propagated> {
    if !(dt_s > 0.0 && dt_s.is_finite()) {
        return Err(Error::Numeric(format!("propagation step {dt_s} s must be positive")));
    }
    let a = state.semi_major_axis;
    let e = state.eccentricity;
    if !(a.is_finite() && e.is_finite() && state.inclination.is_finite()) {
        return Err(Error::Numeric("non-finite orbital state".into()));
    }

    let mu = ctx.consts.mu_km3_s2;
    let altitude = a - ctx.consts.earth_radius_km;
    let rho = atmospheric_density(altitude.max(0.0), &ctx.atmosphere)?;
    let a_new = a + drag_a_dot(a, props.bc_m2_per_kg, rho, mu) * dt_s;

    // J2 secular rates evaluated on the pre-step elements.
    let n = (mu / (a * a * a)).sqrt();
    let p = a * (1.0 - e * e);
    let j2_factor = 1.5 * ctx.consts.j2 * n * (ctx.consts.earth_radius_km / p).powi(2);
    let cos_i = state.inclination.cos();
    let raan_rate = -j2_factor * cos_i;
    let argp_rate = 0.5 * j2_factor * (5.0 * cos_i * cos_i - 1.0);

    // The node/perigee deltas are far below one turn at sane steps, so a
    // branch wrap beats fmod; the mean anomaly advances many turns.
    let wrap = |x: f64| -> f64 {
        if (0.0..TAU).contains(&x) {
            x
        } else if (-TAU..0.0).contains(&x) {
            x + TAU
        } else if (TAU..2.0 * TAU).contains(&x) {
            x - TAU
        } else {
            x.rem_euclid(TAU)
        }
    };

    let next = OrbitalState {
        semi_major_axis: a_new,
        eccentricity: e,
        inclination: state.inclination,
        raan: wrap(state.raan + raan_rate * dt_s),
        arg_perigee: wrap(state.arg_perigee + argp_rate * dt_s),
        mean_anomaly: (state.mean_anomaly + n * dt_s).rem_euclid(TAU),
        epoch: state.epoch + dt_s / SECONDS_PER_DAY,
    };

    if !next.semi_major_axis.is_finite() {
        return Err(Error::Numeric("drag integration produced a non-finite semi-major axis".into()));
    }

    let decayed = next.semi_major_axis - ctx.consts.earth_radius_km < ctx.reentry_altitude_km;
    Ok(Propagated { state: next, decayed })
}

/// Remaining orbital lifetime (years), capped at `cap_years`.
///
/// Integrates the drag decay with an adaptive step of min(30 days, time to
/// lose 5 km) until the mean altitude drops below the reentry altitude or
/// the cap is reached.
pub fn residual_lifetime(
    state: &OrbitalState,
    props: &PhysicalProperties,
    ctx: &PropagationContext,
    cap_years: f64,
) -> f64 {
    debug_assert!(cap_years > 0.0);
    const MAX_STEP_S: f64 = 30.0 * SECONDS_PER_DAY;
    const ALT_LOSS_KM: f64 = 5.0;

    let cap_s = cap_years * DAYS_PER_YEAR * SECONDS_PER_DAY;
    let mu = ctx.consts.mu_km3_s2;
    let mut a = state.semi_major_axis;
    let mut elapsed_s = 0.0;

    // Altitude only decreases here, so the atmosphere band index can be
    // tracked incrementally instead of searched every iteration.
    let bands = ctx.atmosphere.bands();
    let start_alt = (a - ctx.consts.earth_radius_km).max(0.0);
    let mut band_idx =
        bands.partition_point(|b| b.base_altitude_km <= start_alt).saturating_sub(1);

    while elapsed_s < cap_s {
        let altitude = a - ctx.consts.earth_radius_km;
        if altitude < ctx.reentry_altitude_km {
            break;
        }
        while band_idx > 0 && altitude < bands[band_idx].base_altitude_km {
            band_idx -= 1;
        }
        let band = &bands[band_idx];
        let rho = band.base_density_kg_m3
            * (-(altitude.max(0.0) - band.base_altitude_km) / band.scale_height_km).exp();
        let a_dot = drag_a_dot(a, props.bc_m2_per_kg, rho, mu);
        let dt = if a_dot.abs() > 0.0 {
            (ALT_LOSS_KM / a_dot.abs()).min(MAX_STEP_S)
        } else {
            MAX_STEP_S
        };
        let dt = dt.min(cap_s - elapsed_s);
        a += a_dot * dt;
        elapsed_s += dt;
    }

    (elapsed_s / (DAYS_PER_YEAR * SECONDS_PER_DAY)).min(cap_years)
}
