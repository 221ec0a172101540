//! Two-line element (TLE) ingestion and emission.
//!
//! Accepts standard 2-line records or 3-line records with a leading name
//! line. Lines are 69 characters with a modulo-10 checksum (digits count
//! their value, '-' counts 1). Mean motion is converted to semi-major axis
//! via a = (μ/n²)^(1/3).
//!
//! TLEs carry no mass or area, so parsed objects get class-based default
//! properties; a sidecar properties file (see [`crate::catalog::io`]) can
//! override them per id. Classes are inferred from name-line tags
//! ("R/B", "DEB", "DERELICT", "PAYLOAD"); unnamed or unrecognized records
//! default to derelict payloads.

use std::f64::consts::TAU;

use crate::catalog::{Catalog, ObjectClass, OrbitalState, ResidentSpaceObject};
use crate::constants::{MU_EARTH, SECONDS_PER_DAY};
use crate::error::{Error, Result};

const LINE_LEN: usize = 69;

/// Parse a TLE text stream into a catalog at epoch 0.
pub fn parse_tle_file(text: &str) -> Result<Catalog> {
    let mut objects = Vec::new();
    let mut pending_name: Option<&str> = None;

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    while let Some((lineno, line)) = lines.next() {
        if !line.starts_with("1 ") {
            // Name line: remembered for classification of the next record.
            if line.starts_with("2 ") {
                return Err(Error::Tle {
                    line: lineno,
                    reason: "line 2 without a preceding line 1".into(),
                });
            }
            if pending_name.is_some() {
                return Err(Error::Tle {
                    line: lineno,
                    reason: "two consecutive name lines".into(),
                });
            }
            pending_name = Some(line);
            continue;
        }

        let (line2_no, line2) = lines
            .next()
            .ok_or(Error::Tle { line: lineno, reason: "missing line 2".into() })?;
        if !line2.starts_with("2 ") {
            return Err(Error::Tle { line: line2_no, reason: "expected line 2".into() });
        }

        let object = parse_record(pending_name.take(), (lineno, line), (line2_no, line2))?;
        objects.push(object);
    }

    if objects.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    Catalog::from_objects(objects, 0.0)
}

fn parse_record(
    name: Option<&str>,
    (l1_no, l1): (usize, &str),
    (l2_no, l2): (usize, &str),
) -> Result<ResidentSpaceObject> {
    validate_line(l1_no, l1)?;
    validate_line(l2_no, l2)?;

    let id_1: u64 = field(l1, l1_no, 2, 7, "catalog number")?;
    let id_2: u64 = field(l2, l2_no, 2, 7, "catalog number")?;
    if id_1 != id_2 {
        return Err(Error::Tle {
            line: l2_no,
            reason: format!("catalog number mismatch ({id_1} vs {id_2})"),
        });
    }

    let inclination_deg: f64 = field(l2, l2_no, 8, 16, "inclination")?;
    let raan_deg: f64 = field(l2, l2_no, 17, 25, "raan")?;
    let ecc_digits: u64 = field(l2, l2_no, 26, 33, "eccentricity")?;
    let eccentricity = ecc_digits as f64 / 1e7;
    let argp_deg: f64 = field(l2, l2_no, 34, 42, "argument of perigee")?;
    let ma_deg: f64 = field(l2, l2_no, 43, 51, "mean anomaly")?;
    let mean_motion_rev_day: f64 = field(l2, l2_no, 52, 63, "mean motion")?;
    if mean_motion_rev_day <= 0.0 {
        return Err(Error::Tle { line: l2_no, reason: "non-positive mean motion".into() });
    }

    let n_rad_s = mean_motion_rev_day * TAU / SECONDS_PER_DAY;
    let semi_major_axis = (MU_EARTH / (n_rad_s * n_rad_s)).cbrt();

    let object_class = classify_name(name);
    let mut state = OrbitalState {
        semi_major_axis,
        eccentricity,
        inclination: inclination_deg.to_radians(),
        raan: raan_deg.to_radians(),
        arg_perigee: argp_deg.to_radians(),
        mean_anomaly: ma_deg.to_radians(),
        epoch: 0.0,
    };
    state.normalize_angles();

    let object = ResidentSpaceObject {
        id: id_1,
        state,
        props: object_class.default_properties(),
        object_class,
        mission_years_remaining: if object_class == ObjectClass::ActivePayload {
            Some(0.0)
        } else {
            None
        },
        constellation_flag: false,
    };
    object.validate().map_err(|e| Error::Tle { line: l2_no, reason: e.to_string() })?;
    Ok(object)
}

fn classify_name(name: Option<&str>) -> ObjectClass {
    let Some(name) = name else { return ObjectClass::DerelictPayload };
    let upper = name.to_ascii_uppercase();
    if upper.contains("R/B") {
        ObjectClass::RocketBody
    } else if upper.contains("DEB") {
        ObjectClass::Debris
    } else if upper.contains("PAYLOAD") && !upper.contains("DERELICT") {
        ObjectClass::ActivePayload
    } else {
        ObjectClass::DerelictPayload
    }
}

fn validate_line(lineno: usize, line: &str) -> Result<()> {
    if line.len() != LINE_LEN || !line.is_ascii() {
        return Err(Error::Tle {
            line: lineno,
            reason: format!("expected {} ASCII characters, got {}", LINE_LEN, line.len()),
        });
    }
    let bytes = line.as_bytes();
    let stated = (bytes[LINE_LEN - 1] as char)
        .to_digit(10)
        .ok_or(Error::Tle { line: lineno, reason: "checksum is not a digit".into() })?;
    let computed = checksum(&line[..LINE_LEN - 1]);
    if stated != computed {
        return Err(Error::Tle {
            line: lineno,
            reason: format!("checksum mismatch: stated {stated}, computed {computed}"),
        });
    }
    Ok(())
}

/// Modulo-10 TLE checksum: digits add their value, '-' adds 1.
pub fn checksum(payload: &str) -> u32 {
    payload
        .chars()
        .map(|c| match c {
            '-' => 1,
            c => c.to_digit(10).unwrap_or(0),
        })
        .sum::<u32>()
        % 10
}

fn field<T: std::str::FromStr>(
    line: &str,
    lineno: usize,
    start: usize,
    end: usize,
    what: &str,
) -> Result<T> {
    line[start..end]
        .trim()
        .parse()
        .map_err(|_| Error::Tle {
            line: lineno,
            reason: format!("unparsable {what} field '{}'", &line[start..end]),
        })
}

/// Emit the catalog as 3-line TLE records with class tags in the name line.
///
/// Ids must fit the 5-digit catalog-number field.
pub fn emit_tle(catalog: &Catalog) -> Result<String> {
    let mut out = String::new();
    for obj in catalog.iter() {
        if obj.id > 99999 {
            return Err(Error::Domain(format!(
                "id {} does not fit the 5-digit TLE catalog number field",
                obj.id
            )));
        }
        let tag = match obj.object_class {
            ObjectClass::ActivePayload => "PAYLOAD",
            ObjectClass::DerelictPayload => "DERELICT",
            ObjectClass::RocketBody => "R/B",
            ObjectClass::Debris => "DEB",
        };
        out.push_str(&format!("SIM {:05} {tag}\n", obj.id));

        let body1 = format!(
            "1 {:05}U 00001A   00001.00000000  .00000000  00000-0  00000-0 0  999",
            obj.id
        );
        out.push_str(&body1);
        out.push_str(&checksum(&body1).to_string());
        out.push('\n');

        let n_rad_s = (MU_EARTH / obj.state.semi_major_axis.powi(3)).sqrt();
        let mean_motion = n_rad_s * SECONDS_PER_DAY / TAU;
        let body2 = format!(
            "2 {:05} {:8.4} {:8.4} {:07} {:8.4} {:8.4} {:11.8}{:5}",
            obj.id,
            obj.state.inclination.to_degrees(),
            obj.state.raan.to_degrees(),
            (obj.state.eccentricity * 1e7).round() as u64,
            obj.state.arg_perigee.to_degrees(),
            obj.state.mean_anomaly.to_degrees(),
            mean_motion,
            0,
        );
        out.push_str(&body2);
        out.push_str(&checksum(&body2).to_string());
        out.push('\n');
    }
    Ok(out)
}
