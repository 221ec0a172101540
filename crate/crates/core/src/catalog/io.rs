//! Catalog snapshot and sidecar-properties file formats.
//!
//! Snapshot: delimited text with header
//! `id,class,a_km,ecc,inc_rad,raan_rad,argp_rad,ma_rad,mass_kg,radius_m,bc_m2kg`.
//!
//! Sidecar: `id,mass_kg,radius_m,bc_m2kg,class`, keyed by id; overrides the
//! class defaults assigned to bare TLE records.

use std::path::Path;

use crate::catalog::{Catalog, ObjectClass, OrbitalState, PhysicalProperties, ResidentSpaceObject};
use crate::error::{Error, Result};

pub const SNAPSHOT_HEADER: &str =
    "id,class,a_km,ecc,inc_rad,raan_rad,argp_rad,ma_rad,mass_kg,radius_m,bc_m2kg";
pub const SIDECAR_HEADER: &str = "id,mass_kg,radius_m,bc_m2kg,class";

/// Serialize a catalog snapshot.
pub fn write_snapshot(catalog: &Catalog) -> String {
    let mut out = String::from(SNAPSHOT_HEADER);
    out.push('\n');
    for o in catalog.iter() {
        out.push_str(&format!(
            "{},{},{:.6},{:.9},{:.9},{:.9},{:.9},{:.9},{:.6},{:.6},{:.9}\n",
            o.id,
            o.object_class,
            o.state.semi_major_axis,
            o.state.eccentricity,
            o.state.inclination,
            o.state.raan,
            o.state.arg_perigee,
            o.state.mean_anomaly,
            o.props.mass_kg,
            o.props.radius_m,
            o.props.bc_m2_per_kg,
        ));
    }
    out
}

/// Parse a catalog snapshot produced by [`write_snapshot`].
pub fn read_snapshot(text: &str) -> Result<Catalog> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SNAPSHOT_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "snapshot header mismatch: expected '{SNAPSHOT_HEADER}', got {other:?}"
            )))
        }
    }

    let mut objects = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 11 {
            return Err(Error::Parse(format!(
                "snapshot line {}: expected 11 columns, got {}",
                i + 2,
                cols.len()
            )));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("snapshot line {}: bad {what} '{s}'", i + 2)))
        };
        let id: u64 = cols[0]
            .parse()
            .map_err(|_| Error::Parse(format!("snapshot line {}: bad id '{}'", i + 2, cols[0])))?;
        let object_class: ObjectClass = cols[1].parse()?;
        let state = OrbitalState {
            semi_major_axis: parse_f(cols[2], "a_km")?,
            eccentricity: parse_f(cols[3], "ecc")?,
            inclination: parse_f(cols[4], "inc_rad")?,
            raan: parse_f(cols[5], "raan_rad")?,
            arg_perigee: parse_f(cols[6], "argp_rad")?,
            mean_anomaly: parse_f(cols[7], "ma_rad")?,
            epoch: 0.0,
        };
        let mass_kg = parse_f(cols[8], "mass_kg")?;
        let radius_m = parse_f(cols[9], "radius_m")?;
        let bc = parse_f(cols[10], "bc_m2kg")?;
        let mut props = PhysicalProperties::from_mass_radius(mass_kg, radius_m);
        props.bc_m2_per_kg = bc;
        objects.push(ResidentSpaceObject {
            id,
            state,
            props,
            object_class,
            mission_years_remaining: (object_class == ObjectClass::ActivePayload).then_some(0.0),
            constellation_flag: false,
        });
    }
    Catalog::from_objects(objects, 0.0)
}

/// Apply a sidecar properties file to a catalog in place.
///
/// Unknown ids in the sidecar are ignored (the sidecar may describe a
/// superset of the loaded records).
pub fn apply_sidecar(catalog: &mut Catalog, text: &str) -> Result<usize> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SIDECAR_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "sidecar header mismatch: expected '{SIDECAR_HEADER}', got {other:?}"
            )))
        }
    }

    let mut applied = 0usize;
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::Parse(format!(
                "sidecar line {}: expected 5 columns, got {}",
                i + 2,
                cols.len()
            )));
        }
        let id: u64 = cols[0]
            .parse()
            .map_err(|_| Error::Parse(format!("sidecar line {}: bad id '{}'", i + 2, cols[0])))?;
        let Some(pos) = catalog.position_of(id) else { continue };

        let mass: f64 = cols[1]
            .parse()
            .map_err(|_| Error::Parse(format!("sidecar line {}: bad mass", i + 2)))?;
        let radius: f64 = cols[2]
            .parse()
            .map_err(|_| Error::Parse(format!("sidecar line {}: bad radius", i + 2)))?;
        let bc: f64 = cols[3]
            .parse()
            .map_err(|_| Error::Parse(format!("sidecar line {}: bad bc", i + 2)))?;
        let class: ObjectClass = cols[4].parse()?;

        let obj = &mut catalog.objects_mut()[pos];
        let mut props = PhysicalProperties::from_mass_radius(mass, radius);
        props.bc_m2_per_kg = bc;
        props.validate()?;
        obj.props = props;
        obj.object_class = class;
        obj.mission_years_remaining =
            (class == ObjectClass::ActivePayload).then(|| obj.mission_years_remaining.unwrap_or(0.0));
        applied += 1;
    }
    Ok(applied)
}

pub fn write_snapshot_file(catalog: &Catalog, path: &Path) -> Result<()> {
    std::fs::write(path, write_snapshot(catalog))?;
    Ok(())
}

pub fn read_snapshot_file(path: &Path) -> Result<Catalog> {
    let text = std::fs::read_to_string(path)?;
    read_snapshot(&text)
}
