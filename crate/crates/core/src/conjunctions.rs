//! CUBE conjunction detection and collision probability.
//!
//! Object positions are sampled at a uniformly random mean-anomaly phase
//! each timestep, hashed into cubic cells, and every co-resident pair is
//! treated kinetically: a pair sharing a cube of volume dU = edge³ collides
//! at rate V·σ/dU, extended over the timestep Δt to a probability.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::hash::{BuildHasherDefault, Hasher};

use rand::Rng;

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::kepler::elements_to_cartesian;

/// Multiplicative hasher for packed cell keys; the grid build is hot and
/// SipHash costs more than the rest of the insert.
#[derive(Default)]
pub struct CellHasher(u64);

impl Hasher for CellHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ u64::from(b)).wrapping_mul(0x100_0000_01b3);
        }
    }

    fn write_i64(&mut self, i: i64) {
        self.0 = (self.0 ^ i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        self.0 ^= self.0 >> 31;
    }
}

type CellMap = HashMap<[i64; 3], Vec<u64>, BuildHasherDefault<CellHasher>>;

/// Position/velocity sample of one object at the current timestep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledState {
    pub id: u64,
    pub position_km: [f64; 3],
    pub velocity_km_s: [f64; 3],
}

/// Volumetric hash of sampled positions.
#[derive(Debug, Clone)]
pub struct CubeGrid {
    pub edge_km: f64,
    cells: CellMap,
}

impl CubeGrid {
    pub fn cell_key(position_km: [f64; 3], edge_km: f64) -> [i64; 3] {
        [
            (position_km[0] / edge_km).floor() as i64,
            (position_km[1] / edge_km).floor() as i64,
            (position_km[2] / edge_km).floor() as i64,
        ]
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, key: [i64; 3]) -> Option<&[u64]> {
        self.cells.get(&key).map(Vec::as_slice)
    }
}

/// Co-resident unordered pair (id_i < id_j).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellPair {
    pub id_i: u64,
    pub id_j: u64,
}

/// A conjunction pair with its kinetic collision probability and the
/// uniform draw used for stochastic triggering and epsilon scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjunctionPair {
    pub id_i: u64,
    pub id_j: u64,
    /// Relative speed |v_i − v_j| (km/s).
    pub rel_velocity_km_s: f64,
    /// Combined cross section σ = π·(r_i + r_j)² (km²).
    pub combined_sigma_km2: f64,
    pub pair_probability: f64,
    pub rand_draw: f64,
}

/// Sample one Cartesian state per object at a uniform mean-anomaly phase.
///
/// Draws are consumed serially in ascending-id catalog order, so the result
/// is deterministic for a given rng state.
pub fn sample_positions(catalog: &Catalog, rng: &mut impl Rng) -> Result<Vec<SampledState>> {
    let mut out = Vec::with_capacity(catalog.len());
    sample_positions_into(catalog, rng, false, &mut out)?;
    Ok(out)
}

/// [`sample_positions`] into a reused buffer, optionally parallelizing the
/// element conversions. Phase draws stay serial in catalog order, so the
/// output is bit-identical with parallelism on or off.
///
/// The parallel path requires a catalog whose states satisfy the orbital
/// invariants (every engine catalog does); the serial path surfaces invalid
/// elements as errors.
pub fn sample_positions_into(
    catalog: &Catalog,
    rng: &mut impl Rng,
    parallel: bool,
    out: &mut Vec<SampledState>,
) -> Result<()> {
    use rayon::prelude::*;

    let phases: Vec<f64> = (0..catalog.len()).map(|_| rng.gen_range(0.0..TAU)).collect();
    out.clear();

    if parallel {
        catalog
            .objects()
            .par_iter()
            .zip(phases.par_iter())
            .map(|(obj, &phase)| {
                let (position_km, velocity_km_s) = elements_to_cartesian(&obj.state, phase)
                    .expect("validated catalogs hold elliptical elements");
                SampledState { id: obj.id, position_km, velocity_km_s }
            })
            .collect_into_vec(out);
    } else {
        out.reserve(catalog.len());
        for (obj, &phase) in catalog.objects().iter().zip(phases.iter()) {
            let (position_km, velocity_km_s) = elements_to_cartesian(&obj.state, phase)?;
            out.push(SampledState { id: obj.id, position_km, velocity_km_s });
        }
    }
    Ok(())
}

/// Hash positions into cubes and list all co-resident pairs, sorted by
/// (id_i, id_j).
pub fn build_cube_grid(samples: &[SampledState], edge_km: f64) -> Result<(CubeGrid, Vec<CellPair>)> {
    if !(edge_km > 0.0) {
        return Err(Error::Domain(format!("cube edge {edge_km} km must be positive")));
    }

    let mut cells: CellMap =
        CellMap::with_capacity_and_hasher(samples.len(), BuildHasherDefault::default());
    for s in samples {
        cells.entry(CubeGrid::cell_key(s.position_km, edge_km)).or_default().push(s.id);
    }

    let mut pairs = Vec::new();
    for ids in cells.values() {
        if ids.len() < 2 {
            continue;
        }
        for i in 0..ids.len() {
            for j in (i + 1)..ids.len() {
                let (a, b) = (ids[i].min(ids[j]), ids[i].max(ids[j]));
                pairs.push(CellPair { id_i: a, id_j: b });
            }
        }
    }
    pairs.sort_unstable();

    Ok((CubeGrid { edge_km, cells }, pairs))
}

/// Scratch buffer for [`coresident_pairs`].
#[derive(Debug, Default)]
pub struct PairScratch {
    keyed: Vec<u128>,
}

/// Allocation-light equivalent of the pair list from [`build_cube_grid`]:
/// packs cell keys with ids, sorts, and scans equal-cell runs. Produces
/// the identical sorted pair list.
pub fn coresident_pairs(
    samples: &[SampledState],
    edge_km: f64,
    scratch: &mut PairScratch,
    out: &mut Vec<CellPair>,
) -> Result<()> {
    if !(edge_km > 0.0) {
        return Err(Error::Domain(format!("cube edge {edge_km} km must be positive")));
    }
    const BIAS: i64 = 1 << 20;

    scratch.keyed.clear();
    scratch.keyed.reserve(samples.len());
    for s in samples {
        let [x, y, z] = CubeGrid::cell_key(s.position_km, edge_km);
        debug_assert!(
            x.abs() < BIAS && y.abs() < BIAS && z.abs() < BIAS,
            "cell coordinate out of packing range"
        );
        let key = (((x + BIAS) as u64) << 42) | (((y + BIAS) as u64) << 21) | ((z + BIAS) as u64);
        scratch.keyed.push((u128::from(key) << 64) | u128::from(s.id));
    }
    scratch.keyed.sort_unstable();

    out.clear();
    let keyed = &scratch.keyed;
    let mut run_start = 0usize;
    for i in 1..=keyed.len() {
        let run_ended = i == keyed.len() || (keyed[i] >> 64) != (keyed[run_start] >> 64);
        if !run_ended {
            continue;
        }
        // Ids inside a run are already ascending (low bits of the sort key).
        for a in run_start..i {
            for b in (a + 1)..i {
                out.push(CellPair { id_i: keyed[a] as u64, id_j: keyed[b] as u64 });
            }
        }
        run_start = i;
    }
    out.sort_unstable();
    Ok(())
}

/// Geometry of one co-resident pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    pub edge_km: f64,
    pub rel_velocity_km_s: f64,
    pub sigma_km2: f64,
}

/// Kinetic pair collision probability over one timestep:
/// clamp(V·σ·Δt / edge³, 0, 1).
pub fn pair_probability(geometry: &PairGeometry, dt_s: f64) -> Result<f64> {
    if !(geometry.edge_km > 0.0) {
        return Err(Error::Domain("cube edge must be positive".into()));
    }
    if geometry.rel_velocity_km_s < 0.0 || geometry.sigma_km2 < 0.0 || dt_s < 0.0 {
        return Err(Error::Domain("pair probability inputs must be non-negative".into()));
    }
    let du = geometry.edge_km.powi(3);
    Ok((geometry.rel_velocity_km_s * geometry.sigma_km2 * dt_s / du).clamp(0.0, 1.0))
}

/// Probability of colliding with any cube neighbor: 1 − Π(1 − p_j).
pub fn object_total_probability(pair_probs: &[f64]) -> Result<f64> {
    let mut survive = 1.0;
    for &p in pair_probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("pair probability {p} outside [0, 1]")));
        }
        survive *= 1.0 - p;
    }
    Ok(1.0 - survive)
}

/// Evaluate probability and draw `rand_draw` for every co-resident pair.
///
/// `samples` must be sorted by id (sampling in catalog order guarantees
/// this) and `radii_m` maps ids to hard-body radii in the same order.
/// Draws occur serially over the sorted pair list, one per pair, from the
/// run's conjunction-draw stream. Draws of exactly zero are nudged to the
/// smallest positive value so downstream ratio-based epsilon scaling stays
/// finite.
pub fn evaluate_pairs(
    cell_pairs: &[CellPair],
    samples: &[SampledState],
    radii_m: &[(u64, f64)],
    edge_km: f64,
    dt_s: f64,
    rng: &mut impl Rng,
) -> Result<Vec<ConjunctionPair>> {
    let find_sample = |id: u64| -> Result<&SampledState> {
        samples
            .binary_search_by_key(&id, |s| s.id)
            .map(|i| &samples[i])
            .map_err(|_| Error::Contract(format!("no sample for id {id}")))
    };
    let find_radius = |id: u64| -> Result<f64> {
        radii_m
            .binary_search_by_key(&id, |r| r.0)
            .map(|i| radii_m[i].1)
            .map_err(|_| Error::Contract(format!("no radius for id {id}")))
    };

    let mut out = Vec::with_capacity(cell_pairs.len());
    for pair in cell_pairs {
        let si = find_sample(pair.id_i)?;
        let sj = find_sample(pair.id_j)?;
        let dv = [
            si.velocity_km_s[0] - sj.velocity_km_s[0],
            si.velocity_km_s[1] - sj.velocity_km_s[1],
            si.velocity_km_s[2] - sj.velocity_km_s[2],
        ];
        let rel_velocity_km_s = (dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2]).sqrt();
        let r_i = find_radius(pair.id_i)?;
        let r_j = find_radius(pair.id_j)?;
        let combined_sigma_km2 = std::f64::consts::PI * ((r_i + r_j) / 1000.0).powi(2);

        let p = pair_probability(
            &PairGeometry { edge_km, rel_velocity_km_s, sigma_km2: combined_sigma_km2 },
            dt_s,
        )?;
        let mut rand_draw: f64 = rng.gen();
        if rand_draw == 0.0 {
            rand_draw = f64::MIN_POSITIVE;
        }
        out.push(ConjunctionPair {
            id_i: pair.id_i,
            id_j: pair.id_j,
            rel_velocity_km_s,
            combined_sigma_km2,
            pair_probability: p,
            rand_draw,
        });
    }
    Ok(out)
}
