//! Keplerian element / Cartesian state conversions.
//!
//! Shared by conjunction position sampling (elements → ECI state) and
//! fragment orbit construction (perturbed ECI state → elements).

use std::f64::consts::TAU;

use crate::catalog::OrbitalState;
use crate::constants::MU_EARTH;
use crate::error::{Error, Result};

/// Solve Kepler's equation M = E - e·sin E for the eccentric anomaly.
///
/// Near-circular orbits (the bulk of a LEO catalog) start from a
/// third-order series and polish with a single Newton step; higher
/// eccentricities fall back to the iterative solve.
pub fn solve_kepler(mean_anomaly: f64, eccentricity: f64) -> f64 {
    let m = if (0.0..TAU).contains(&mean_anomaly) {
        mean_anomaly
    } else {
        mean_anomaly.rem_euclid(TAU)
    };
    let e = eccentricity;

    if e < 0.05 {
        // E ≈ M + e·sin M + e²·sin 2M / 2 + e³·(3·sin 3M − sin M)/8,
        // accurate to O(e⁴); one Newton step brings it to round-off.
        let (sin_m, cos_m) = m.sin_cos();
        let sin_2m = 2.0 * sin_m * cos_m;
        let sin_3m = sin_m * (3.0 - 4.0 * sin_m * sin_m);
        let guess = m
            + e * sin_m
            + e * e * sin_2m / 2.0
            + e * e * e * (3.0 * sin_3m - sin_m) / 8.0;
        let (sin_g, cos_g) = guess.sin_cos();
        return guess - (guess - e * sin_g - m) / (1.0 - e * cos_g);
    }

    let mut e_anom = if e < 0.8 { m } else { std::f64::consts::PI };
    for _ in 0..30 {
        let (sin_e, cos_e) = e_anom.sin_cos();
        let f = e_anom - e * sin_e - m;
        let fp = 1.0 - e * cos_e;
        let delta = f / fp;
        e_anom -= delta;
        if delta.abs() < 1e-12 {
            break;
        }
    }
    e_anom
}

/// ECI position (km) and velocity (km/s) of an orbit at the given mean anomaly.
///
/// The state's own `mean_anomaly` field is ignored in favor of the
/// `mean_anomaly` argument so callers can sample arbitrary phases.
/// Hot path: one Newton solve plus the argument-of-latitude rotation,
/// avoiding the full perifocal rotation matrix.
pub fn elements_to_cartesian(
    state: &OrbitalState,
    mean_anomaly: f64,
) -> Result<([f64; 3], [f64; 3])> {
    let a = state.semi_major_axis;
    let e = state.eccentricity;
    if !(a.is_finite() && a > 0.0) || !(0.0..1.0).contains(&e) {
        return Err(Error::Numeric(format!(
            "cannot convert elements with a = {a}, e = {e} to a Cartesian state"
        )));
    }

    let e_anom = solve_kepler(mean_anomaly, e);
    let (sin_e, cos_e) = e_anom.sin_cos();
    let one_m_e2 = 1.0 - e * e;
    let r_over_a = 1.0 - e * cos_e;
    let r = a * r_over_a;

    // True-anomaly components straight from the eccentric anomaly:
    // cos ν = (cos E − e)/(1 − e cos E), sin ν = √(1−e²)·sin E/(1 − e cos E).
    let cos_nu = (cos_e - e) / r_over_a;
    let sin_nu = one_m_e2.sqrt() * sin_e / r_over_a;

    let p = a * one_m_e2;
    let v_factor = (MU_EARTH / p).sqrt();
    // Radial and transverse velocity components.
    let v_r = v_factor * e * sin_nu;
    let v_t = v_factor * (1.0 + e * cos_nu);

    // Argument of latitude u = ω + ν by angle addition.
    let (sin_argp, cos_argp) = state.arg_perigee.sin_cos();
    let sin_u = sin_argp * cos_nu + cos_argp * sin_nu;
    let cos_u = cos_argp * cos_nu - sin_argp * sin_nu;
    let (sin_raan, cos_raan) = state.raan.sin_cos();
    let (sin_i, cos_i) = state.inclination.sin_cos();

    let r_hat = [
        cos_raan * cos_u - sin_raan * sin_u * cos_i,
        sin_raan * cos_u + cos_raan * sin_u * cos_i,
        sin_u * sin_i,
    ];
    let t_hat = [
        -cos_raan * sin_u - sin_raan * cos_u * cos_i,
        -sin_raan * sin_u + cos_raan * cos_u * cos_i,
        cos_u * sin_i,
    ];

    let pos = [r * r_hat[0], r * r_hat[1], r * r_hat[2]];
    let vel = [
        v_r * r_hat[0] + v_t * t_hat[0],
        v_r * r_hat[1] + v_t * t_hat[1],
        v_r * r_hat[2] + v_t * t_hat[2],
    ];
    Ok((pos, vel))
}

/// Recover mean Keplerian elements from an ECI state vector.
///
/// Returns `None` for non-elliptical (escaping) or degenerate states.
pub fn cartesian_to_elements(pos: [f64; 3], vel: [f64; 3], epoch: f64) -> Option<OrbitalState> {
    let r_mag = norm(pos);
    let v_mag = norm(vel);
    if r_mag < 1.0 || !r_mag.is_finite() || !v_mag.is_finite() {
        return None;
    }

    let h = cross(pos, vel);
    let h_mag = norm(h);
    if h_mag < 1e-9 {
        return None;
    }

    let energy = v_mag * v_mag / 2.0 - MU_EARTH / r_mag;
    if energy >= 0.0 {
        return None; // hyperbolic or parabolic
    }
    let a = -MU_EARTH / (2.0 * energy);

    let rv = dot(pos, vel);
    let coeff = v_mag * v_mag - MU_EARTH / r_mag;
    let e_vec = [
        (coeff * pos[0] - rv * vel[0]) / MU_EARTH,
        (coeff * pos[1] - rv * vel[1]) / MU_EARTH,
        (coeff * pos[2] - rv * vel[2]) / MU_EARTH,
    ];
    let ecc = norm(e_vec);
    if ecc >= 1.0 {
        return None;
    }

    let inc = (h[2] / h_mag).clamp(-1.0, 1.0).acos();

    // Node vector n = k × h.
    let node = [-h[1], h[0], 0.0];
    let n_mag = norm(node);

    let raan = if n_mag > 1e-11 {
        let mut val = (node[0] / n_mag).clamp(-1.0, 1.0).acos();
        if node[1] < 0.0 {
            val = TAU - val;
        }
        val
    } else {
        0.0
    };

    let arg_perigee = if n_mag > 1e-11 && ecc > 1e-11 {
        let mut val = (dot(node, e_vec) / (n_mag * ecc)).clamp(-1.0, 1.0).acos();
        if e_vec[2] < 0.0 {
            val = TAU - val;
        }
        val
    } else {
        0.0
    };

    let true_anom = if ecc > 1e-11 {
        let mut val = (dot(e_vec, pos) / (ecc * r_mag)).clamp(-1.0, 1.0).acos();
        if rv < 0.0 {
            val = TAU - val;
        }
        val
    } else if n_mag > 1e-11 {
        let mut val = (dot(node, pos) / (n_mag * r_mag)).clamp(-1.0, 1.0).acos();
        if pos[2] < 0.0 {
            val = TAU - val;
        }
        val
    } else {
        pos[1].atan2(pos[0]).rem_euclid(TAU)
    };

    let e_anom = 2.0 * ((1.0 - ecc).sqrt() * (true_anom / 2.0).sin())
        .atan2((1.0 + ecc).sqrt() * (true_anom / 2.0).cos());
    let mean_anomaly = (e_anom - ecc * e_anom.sin()).rem_euclid(TAU);

    Some(OrbitalState {
        semi_major_axis: a,
        eccentricity: ecc,
        inclination: inc,
        raan,
        arg_perigee,
        mean_anomaly,
        epoch,
    })
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
