//! Physical and calendar constants shared across the simulation.

/// Earth gravitational parameter (km³/s²).
pub const MU_EARTH: f64 = 398600.4418;

/// Earth equatorial radius (km).
pub const EARTH_RADIUS_KM: f64 = 6378.137;

/// Earth J2 zonal harmonic coefficient.
pub const J2: f64 = 1.08262668e-3;

/// Days per Julian year.
pub const DAYS_PER_YEAR: f64 = 365.25;

/// Seconds per day.
pub const SECONDS_PER_DAY: f64 = 86400.0;

/// Seconds per Julian year.
pub const SECONDS_PER_YEAR: f64 = DAYS_PER_YEAR * SECONDS_PER_DAY;
