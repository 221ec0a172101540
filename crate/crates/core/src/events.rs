//! Per-timestep stochastic event engine with a deterministic commit order.
//!
//! Event draws read the timestep's catalog snapshot; mutation happens in a
//! single commit pass applying, in fixed order: decays → collisions →
//! explosions → post-mission disposal → launches → removals. Ids are never
//! reused and every mutation is appended to the event log in the same
//! order.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, ObjectClass, ResidentSpaceObject};
use crate::conjunctions::ConjunctionPair;
use crate::constants::DAYS_PER_YEAR;
use crate::error::{Error, Result};
use crate::fragmentation::{
    classify_collision, explosion_fragments, sample_collision_fragments, CollisionKind,
    ParentBody,
};

/// Per-class annual explosion probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplosionRates {
    pub active: f64,
    pub derelict: f64,
    pub rocket_body: f64,
    pub debris: f64,
}

impl Default for ExplosionRates {
    fn default() -> Self {
        ExplosionRates { active: 0.0, derelict: 1e-4, rocket_body: 1e-4, debris: 0.0 }
    }
}

impl ExplosionRates {
    pub fn rate_for(&self, class: ObjectClass) -> f64 {
        match class {
            ObjectClass::ActivePayload => self.active,
            ObjectClass::DerelictPayload => self.derelict,
            ObjectClass::RocketBody => self.rocket_body,
            ObjectClass::Debris => self.debris,
        }
    }
}

/// Stochastic-event configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EventConfig {
    /// New launches per year.
    pub launch_rate_per_year: f64,
    pub explosion_rates: ExplosionRates,
    pub pmd_success_prob: f64,
    /// Mission lifetime assigned to launched payloads (years).
    pub mission_lifetime_years: f64,
    /// Probability that an active participant fails to dodge a triggered
    /// conjunction.
    pub avoidance_failure_prob: f64,
    pub timestep_days: f64,
    /// Explosion severity scale S in the cumulative count law.
    pub explosion_scale: f64,
}

impl Default for EventConfig {
    fn default() -> Self {
        EventConfig {
            launch_rate_per_year: 0.0,
            explosion_rates: ExplosionRates::default(),
            pmd_success_prob: 0.9,
            mission_lifetime_years: 8.0,
            avoidance_failure_prob: 0.01,
            timestep_days: 5.0,
            explosion_scale: 1.0,
        }
    }
}

impl EventConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("pmd_success_prob", self.pmd_success_prob),
            ("avoidance_failure_prob", self.avoidance_failure_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} outside [0, 1]")));
            }
        }
        for (name, r) in [
            ("launch_rate_per_year", self.launch_rate_per_year),
            ("explosion_scale", self.explosion_scale),
            ("active explosion rate", self.explosion_rates.active),
            ("derelict explosion rate", self.explosion_rates.derelict),
            ("rocket body explosion rate", self.explosion_rates.rocket_body),
            ("debris explosion rate", self.explosion_rates.debris),
        ] {
            if !(r >= 0.0) {
                return Err(Error::Config(format!("{name} = {r} must be non-negative")));
            }
        }
        if !(self.timestep_days > 0.0) {
            return Err(Error::Config("timestep must be positive".into()));
        }
        if !(self.mission_lifetime_years >= 0.0) {
            return Err(Error::Config("mission lifetime must be non-negative".into()));
        }
        Ok(())
    }

    /// Per-timestep explosion probability for a class.
    pub fn explosion_step_prob(&self, class: ObjectClass) -> f64 {
        self.explosion_rates.rate_for(class) * self.timestep_days / DAYS_PER_YEAR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Collision,
    Explosion,
    Launch,
    PmdSuccess,
    PmdFailure,
    Decay,
    Removal,
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EventKind::Collision => "collision",
            EventKind::Explosion => "explosion",
            EventKind::Launch => "launch",
            EventKind::PmdSuccess => "pmd_success",
            EventKind::PmdFailure => "pmd_failure",
            EventKind::Decay => "decay",
            EventKind::Removal => "removal",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for EventKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collision" => Ok(EventKind::Collision),
            "explosion" => Ok(EventKind::Explosion),
            "launch" => Ok(EventKind::Launch),
            "pmd_success" => Ok(EventKind::PmdSuccess),
            "pmd_failure" => Ok(EventKind::PmdFailure),
            "decay" => Ok(EventKind::Decay),
            "removal" => Ok(EventKind::Removal),
            other => Err(Error::Parse(format!("unknown event kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub t_days: f64,
    pub kind: EventKind,
    pub id_a: u64,
    pub id_b: Option<u64>,
    pub n_fragments: u32,
}

/// Time-ordered event log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    pub records: Vec<EventRecord>,
}

impl EventLog {
    pub fn push(&mut self, record: EventRecord) {
        debug_assert!(
            self.records.last().map_or(true, |last| record.t_days >= last.t_days),
            "event log must be time-ordered"
        );
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Pick the pairs that physically collide this step.
///
/// A pair triggers when its pre-drawn uniform sample falls below its pair
/// probability. Active participants then get one avoidance draw each and
/// the collision survives only if at least one of them fails to dodge.
/// An object appearing in several triggered pairs collides only in the
/// first, in sorted order.
pub fn draw_collisions(
    pairs: &[ConjunctionPair],
    catalog: &Catalog,
    config: &EventConfig,
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    for w in pairs.windows(2) {
        if (w[1].id_i, w[1].id_j) <= (w[0].id_i, w[0].id_j) {
            return Err(Error::Contract("conjunction pairs must be sorted by (id_i, id_j)".into()));
        }
    }

    let mut collided = std::collections::BTreeSet::new();
    let mut triggered = Vec::new();
    for (idx, pair) in pairs.iter().enumerate() {
        if collided.contains(&pair.id_i) || collided.contains(&pair.id_j) {
            continue;
        }
        if pair.rand_draw >= pair.pair_probability {
            continue;
        }
        let active_i = catalog.get(pair.id_i).map_or(false, |o| o.is_active());
        let active_j = catalog.get(pair.id_j).map_or(false, |o| o.is_active());
        let n_active = usize::from(active_i) + usize::from(active_j);
        if n_active > 0 {
            // One draw per active participant; any failed dodge lets the
            // collision through.
            let mut any_failure = false;
            for _ in 0..n_active {
                if rng.gen::<f64>() < config.avoidance_failure_prob {
                    any_failure = true;
                }
            }
            if !any_failure {
                continue;
            }
        }
        collided.insert(pair.id_i);
        collided.insert(pair.id_j);
        triggered.push(idx);
    }
    Ok(triggered)
}

/// Independent per-object explosion draws, in catalog order.
pub fn draw_explosions(catalog: &Catalog, config: &EventConfig, rng: &mut impl Rng) -> Vec<u64> {
    let mut out = Vec::new();
    for obj in catalog.iter() {
        let p = config.explosion_step_prob(obj.object_class);
        if p > 0.0 && rng.gen::<f64>() < p {
            out.push(obj.id);
        }
    }
    out
}

/// Draw this step's launches from the template population.
///
/// The count is Poisson with mean launch_rate·Δt; each new object copies a
/// template member's orbit shape and properties with resampled orbital
/// phases, a full mission lifetime, and a placeholder id assigned at
/// commit.
pub fn generate_launches(
    config: &EventConfig,
    template: &[ResidentSpaceObject],
    epoch_days: f64,
    rng: &mut impl Rng,
) -> Result<Vec<ResidentSpaceObject>> {
    let lambda = config.launch_rate_per_year * config.timestep_days / DAYS_PER_YEAR;
    if lambda == 0.0 {
        return Ok(Vec::new());
    }
    if template.is_empty() {
        return Err(Error::Config("positive launch rate requires a non-empty template".into()));
    }
    let poisson = Poisson::new(lambda)
        .map_err(|e| Error::Config(format!("invalid launch rate: {e}")))?;
    let count = poisson.sample(rng) as usize;

    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let pick = rng.gen_range(0..template.len());
        let mut obj = template[pick].clone();
        obj.id = 0; // assigned at commit
        obj.object_class = ObjectClass::ActivePayload;
        obj.mission_years_remaining = Some(config.mission_lifetime_years);
        obj.state.raan = rng.gen_range(0.0..TAU);
        obj.state.arg_perigee = rng.gen_range(0.0..TAU);
        obj.state.mean_anomaly = rng.gen_range(0.0..TAU);
        obj.state.epoch = epoch_days;
        out.push(obj);
    }
    Ok(out)
}

/// End-of-life disposal decisions for this step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PmdDecisions {
    pub success: Vec<u64>,
    pub failure: Vec<u64>,
}

/// Draw disposal outcomes for every active payload whose mission has ended.
pub fn apply_pmd(catalog: &Catalog, config: &EventConfig, rng: &mut impl Rng) -> PmdDecisions {
    let mut decisions = PmdDecisions::default();
    for obj in catalog.iter() {
        if obj.is_active() && obj.mission_years_remaining.map_or(false, |y| y <= 0.0) {
            if rng.gen::<f64>() < config.pmd_success_prob {
                decisions.success.push(obj.id);
            } else {
                decisions.failure.push(obj.id);
            }
        }
    }
    decisions
}

/// Everything the commit phase needs about one triggered collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggeredCollision {
    pub pair: ConjunctionPair,
    pub position_km_a: [f64; 3],
    pub velocity_km_s_a: [f64; 3],
    pub position_km_b: [f64; 3],
    pub velocity_km_s_b: [f64; 3],
}

/// Event lists produced from one timestep's snapshot.
#[derive(Debug, Clone, Default)]
pub struct StepEvents {
    pub decayed: Vec<u64>,
    pub collisions: Vec<TriggeredCollision>,
    pub explosions: Vec<u64>,
    pub pmd: PmdDecisions,
    pub launches: Vec<ResidentSpaceObject>,
    pub removals: Vec<u64>,
}

/// Per-step population bookkeeping, exact by construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepAccounting {
    pub decayed: u32,
    pub collision_parents_removed: u32,
    pub exploded: u32,
    pub pmd_success: u32,
    pub pmd_failure: u32,
    pub launched: u32,
    pub removed: u32,
    pub fragments_inserted: u32,
}

impl StepAccounting {
    /// Net population change this step.
    pub fn net(&self) -> i64 {
        i64::from(self.fragments_inserted) + i64::from(self.launched)
            - i64::from(self.decayed)
            - i64::from(self.collision_parents_removed)
            - i64::from(self.exploded)
            - i64::from(self.pmd_success)
            - i64::from(self.removed)
    }
}

/// What the commit produced, beyond the catalog mutation itself.
#[derive(Debug, Clone, Default)]
pub struct CommitOutcome {
    pub accounting: StepAccounting,
    /// Ids born this step (fragments and launches).
    pub born: Vec<u64>,
    /// Ids removed this step for any reason.
    pub dead: Vec<u64>,
    /// Event-mode debris increments: total fragment count attributed to
    /// each collision parent.
    pub debris_increments: Vec<(u64, f64)>,
    /// Collision participations per object this step.
    pub collision_counts: BTreeMap<u64, u32>,
}

/// Parameters the commit needs from the wider simulation.
#[derive(Debug, Clone, Copy)]
pub struct CommitParams {
    pub t_days: f64,
    pub fragment_length_threshold_m: f64,
    pub explosion_scale: f64,
    pub timestep_days: f64,
}

/// Apply one timestep's events in fixed order.
///
/// Order: decays → collisions (remove parents, insert fragments) →
/// explosions → PMD → launches → removals. Objects consumed by an earlier
/// phase are skipped by later ones (a collided object cannot explode).
/// Fragment sampling consumes `rng` in event-list order.
pub fn commit_timestep(
    catalog: &mut Catalog,
    events: &StepEvents,
    params: &CommitParams,
    next_id: &mut u64,
    rng: &mut impl Rng,
    log: &mut EventLog,
) -> Result<CommitOutcome> {
    let mut outcome = CommitOutcome::default();
    let t = params.t_days;

    check_unique(&events.decayed, "decay list")?;
    check_unique(&events.explosions, "explosion list")?;
    check_unique(&events.removals, "removal list")?;

    // Decays.
    for &id in &events.decayed {
        catalog.remove(id)?;
        outcome.dead.push(id);
        outcome.accounting.decayed += 1;
        log.push(EventRecord { t_days: t, kind: EventKind::Decay, id_a: id, id_b: None, n_fragments: 0 });
    }

    // Collisions.
    for coll in &events.collisions {
        let (id_a, id_b) = (coll.pair.id_i, coll.pair.id_j);
        // A parent lost to decay this step can no longer collide.
        let (Some(obj_a), Some(obj_b)) = (catalog.get(id_a), catalog.get(id_b)) else {
            continue;
        };
        let parent_a = ParentBody {
            id: id_a,
            mass_kg: obj_a.props.mass_kg,
            position_km: coll.position_km_a,
            velocity_km_s: coll.velocity_km_s_a,
        };
        let parent_b = ParentBody {
            id: id_b,
            mass_kg: obj_b.props.mass_kg,
            position_km: coll.position_km_b,
            velocity_km_s: coll.velocity_km_s_b,
        };
        let (m_p, m_t) = if parent_a.mass_kg <= parent_b.mass_kg {
            (parent_a.mass_kg, parent_b.mass_kg)
        } else {
            (parent_b.mass_kg, parent_a.mass_kg)
        };
        let class = classify_collision(m_p, m_t, coll.pair.rel_velocity_km_s)?;
        let fragmentation = sample_collision_fragments(
            &class,
            (&parent_a, &parent_b),
            coll.pair.rel_velocity_km_s,
            params.fragment_length_threshold_m,
            t,
            rng,
        )?;

        // Catastrophic impacts destroy both parents; non-catastrophic
        // impacts destroy the projectile and crater the surviving target.
        match class.kind {
            CollisionKind::Catastrophic => {
                catalog.remove(id_a)?;
                catalog.remove(id_b)?;
                outcome.dead.push(id_a);
                outcome.dead.push(id_b);
                outcome.accounting.collision_parents_removed += 2;
            }
            CollisionKind::NonCatastrophic => {
                let projectile = if parent_a.mass_kg <= parent_b.mass_kg { id_a } else { id_b };
                catalog.remove(projectile)?;
                outcome.dead.push(projectile);
                outcome.accounting.collision_parents_removed += 1;
            }
        }

        let inserted = insert_fragments(catalog, &fragmentation.fragments, next_id, &mut outcome)?;
        outcome.accounting.fragments_inserted += inserted;

        let n = f64::from(fragmentation.total_count);
        outcome.debris_increments.push((id_a, n));
        outcome.debris_increments.push((id_b, n));
        *outcome.collision_counts.entry(id_a).or_insert(0) += 1;
        *outcome.collision_counts.entry(id_b).or_insert(0) += 1;

        log.push(EventRecord {
            t_days: t,
            kind: EventKind::Collision,
            id_a,
            id_b: Some(id_b),
            n_fragments: inserted,
        });
    }

    // Explosions. A parent consumed by a collision this step is skipped.
    for &id in &events.explosions {
        let Some(obj) = catalog.get(id) else { continue };
        let ma = obj.state.mean_anomaly;
        let (position_km, velocity_km_s) = crate::kepler::elements_to_cartesian(&obj.state, ma)?;
        let parent = ParentBody { id, mass_kg: obj.props.mass_kg, position_km, velocity_km_s };
        let fragmentation = explosion_fragments(
            &parent,
            params.explosion_scale,
            params.fragment_length_threshold_m,
            t,
            rng,
        )?;

        catalog.remove(id)?;
        outcome.dead.push(id);
        outcome.accounting.exploded += 1;

        let inserted = insert_fragments(catalog, &fragmentation.fragments, next_id, &mut outcome)?;
        outcome.accounting.fragments_inserted += inserted;

        log.push(EventRecord {
            t_days: t,
            kind: EventKind::Explosion,
            id_a: id,
            id_b: None,
            n_fragments: inserted,
        });
    }

    // Post-mission disposal.
    for &id in &events.pmd.success {
        if !catalog.contains(id) {
            continue;
        }
        catalog.remove(id)?;
        outcome.dead.push(id);
        outcome.accounting.pmd_success += 1;
        log.push(EventRecord { t_days: t, kind: EventKind::PmdSuccess, id_a: id, id_b: None, n_fragments: 0 });
    }
    for &id in &events.pmd.failure {
        let Some(pos) = catalog.position_of(id) else { continue };
        let obj = &mut catalog.objects_mut()[pos];
        obj.object_class = ObjectClass::DerelictPayload;
        obj.mission_years_remaining = None;
        outcome.accounting.pmd_failure += 1;
        log.push(EventRecord { t_days: t, kind: EventKind::PmdFailure, id_a: id, id_b: None, n_fragments: 0 });
    }

    // Launches.
    for template in &events.launches {
        let id = *next_id;
        *next_id += 1;
        let mut obj = template.clone();
        obj.id = id;
        catalog.insert(obj)?;
        outcome.born.push(id);
        outcome.accounting.launched += 1;
        log.push(EventRecord { t_days: t, kind: EventKind::Launch, id_a: id, id_b: None, n_fragments: 0 });
    }

    // ADR removals; a target that died earlier this step is skipped.
    for &id in &events.removals {
        if !catalog.contains(id) {
            continue;
        }
        catalog.remove(id)?;
        outcome.dead.push(id);
        outcome.accounting.removed += 1;
        log.push(EventRecord { t_days: t, kind: EventKind::Removal, id_a: id, id_b: None, n_fragments: 0 });
    }

    // Mission clocks tick at the end of the step; station-keeping holds
    // until the clock reaches zero.
    let dt_years = params.timestep_days / DAYS_PER_YEAR;
    for obj in catalog.iter_mut() {
        if let Some(remaining) = obj.mission_years_remaining.as_mut() {
            *remaining = (*remaining - dt_years).max(0.0);
        }
    }

    catalog.epoch = t;
    Ok(outcome)
}

fn check_unique(ids: &[u64], what: &str) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for &id in ids {
        if !seen.insert(id) {
            return Err(Error::Contract(format!("duplicate id {id} in {what}")));
        }
    }
    Ok(())
}

/// Insert sampled fragments as debris objects with fresh ids.
fn insert_fragments(
    catalog: &mut Catalog,
    fragments: &[crate::fragmentation::FragmentRecord],
    next_id: &mut u64,
    outcome: &mut CommitOutcome,
) -> Result<u32> {
    let mut inserted = 0u32;
    for frag in fragments {
        let id = *next_id;
        *next_id += 1;
        catalog.insert(ResidentSpaceObject {
            id,
            state: frag.state,
            props: crate::catalog::PhysicalProperties {
                mass_kg: frag.mass_kg,
                radius_m: (frag.characteristic_length_m / 2.0).max(1e-3),
                cross_section_m2: crate::fragmentation::fragment_area_m2(
                    frag.characteristic_length_m,
                ),
                bc_m2_per_kg: crate::catalog::PhysicalProperties::DRAG_COEFFICIENT
                    * frag.area_to_mass_m2_per_kg,
            },
            object_class: ObjectClass::Debris,
            mission_years_remaining: None,
            constellation_flag: false,
        })?;
        outcome.born.push(id);
        inserted += 1;
    }
    Ok(inserted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{OrbitalState, PhysicalProperties};
    use crate::constants::EARTH_RADIUS_KM;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn mk_object(id: u64, class: ObjectClass, mass: f64) -> ResidentSpaceObject {
        ResidentSpaceObject {
            id,
            state: OrbitalState {
                semi_major_axis: EARTH_RADIUS_KM + 780.0,
                eccentricity: 0.001,
                inclination: 1.2,
                raan: 0.1 * id as f64 % std::f64::consts::TAU,
                arg_perigee: 0.2,
                mean_anomaly: 0.3,
                epoch: 0.0,
            },
            props: PhysicalProperties::from_mass_radius(mass, 1.0),
            object_class: class,
            mission_years_remaining: (class == ObjectClass::ActivePayload).then_some(5.0),
            constellation_flag: false,
        }
    }

    fn mk_pair(id_i: u64, id_j: u64, p: f64, draw: f64) -> ConjunctionPair {
        ConjunctionPair {
            id_i,
            id_j,
            rel_velocity_km_s: 10.0,
            combined_sigma_km2: 1e-5,
            pair_probability: p,
            rand_draw: draw,
        }
    }

    #[test]
    fn collision_draw_thresholds() {
        let catalog = Catalog::from_objects(
            vec![
                mk_object(1, ObjectClass::Debris, 5.0),
                mk_object(2, ObjectClass::Debris, 5.0),
                mk_object(3, ObjectClass::Debris, 5.0),
            ],
            0.0,
        )
        .unwrap();
        let config = EventConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(0);

        // p = 0 never triggers; p = 1 with no actives always triggers.
        let pairs = vec![mk_pair(1, 2, 0.0, 0.5), mk_pair(1, 3, 1.0, 0.5)];
        let hit = draw_collisions(&pairs, &catalog, &config, &mut rng).unwrap();
        assert_eq!(hit, vec![1]);
    }

    #[test]
    fn collision_draw_requires_sorted_pairs() {
        let catalog =
            Catalog::from_objects(vec![mk_object(1, ObjectClass::Debris, 5.0)], 0.0).unwrap();
        let pairs = vec![mk_pair(2, 3, 0.5, 0.1), mk_pair(1, 2, 0.5, 0.1)];
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert!(draw_collisions(&pairs, &catalog, &EventConfig::default(), &mut rng).is_err());
    }

    #[test]
    fn first_pair_wins_for_shared_objects() {
        let catalog = Catalog::from_objects(
            vec![
                mk_object(1, ObjectClass::Debris, 5.0),
                mk_object(2, ObjectClass::Debris, 5.0),
                mk_object(3, ObjectClass::Debris, 5.0),
            ],
            0.0,
        )
        .unwrap();
        let pairs = vec![mk_pair(1, 2, 1.0, 0.5), mk_pair(1, 3, 1.0, 0.5), mk_pair(2, 3, 1.0, 0.5)];
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let hit = draw_collisions(&pairs, &catalog, &EventConfig::default(), &mut rng).unwrap();
        assert_eq!(hit, vec![0]);
    }

    #[test]
    fn active_participants_mostly_dodge() {
        let catalog = Catalog::from_objects(
            vec![
                mk_object(1, ObjectClass::ActivePayload, 700.0),
                mk_object(2, ObjectClass::Debris, 5.0),
            ],
            0.0,
        )
        .unwrap();
        let config = EventConfig { avoidance_failure_prob: 0.01, ..EventConfig::default() };
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let trials = 20_000;
        let mut hits = 0;
        for _ in 0..trials {
            let pairs = vec![mk_pair(1, 2, 1.0, 0.5)];
            hits += draw_collisions(&pairs, &catalog, &config, &mut rng).unwrap().len();
        }
        let rate = hits as f64 / trials as f64;
        assert!((0.005..0.02).contains(&rate), "avoidance failure rate {rate}");
    }

    #[test]
    fn triggered_fraction_matches_probability() {
        // 10⁵ synthetic pairs at p = 0.01 → triggered fraction within a
        // binomial confidence band.
        let catalog = Catalog::from_objects(
            (1..=200_002).map(|i| mk_object(i, ObjectClass::Debris, 5.0)).collect(),
            0.0,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 100_000u64;
        let pairs: Vec<ConjunctionPair> = (0..n)
            .map(|k| mk_pair(2 * k + 1, 2 * k + 2, 0.01, rng.gen()))
            .collect();
        let mut rng2 = ChaCha12Rng::seed_from_u64(8);
        let hit = draw_collisions(&pairs, &catalog, &EventConfig::default(), &mut rng2).unwrap();
        let frac = hit.len() as f64 / n as f64;
        assert!((0.008..=0.012).contains(&frac), "triggered fraction {frac}");
    }

    #[test]
    fn explosion_rate_conversion() {
        let config = EventConfig {
            explosion_rates: ExplosionRates { active: 0.0, derelict: 1.0, rocket_body: 0.0, debris: 0.0 },
            timestep_days: 5.0,
            ..EventConfig::default()
        };
        let p = config.explosion_step_prob(ObjectClass::DerelictPayload);
        assert!((p - 5.0 / 365.25).abs() < 1e-12);

        // Rate 0 → no draws; fixed rng state → identical lists.
        let catalog = Catalog::from_objects(
            (1..=100).map(|i| mk_object(i, ObjectClass::DerelictPayload, 700.0)).collect(),
            0.0,
        )
        .unwrap();
        let zero = EventConfig::default();
        let none = draw_explosions(
            &catalog,
            &EventConfig {
                explosion_rates: ExplosionRates { active: 0.0, derelict: 0.0, rocket_body: 0.0, debris: 0.0 },
                ..zero
            },
            &mut ChaCha12Rng::seed_from_u64(1),
        );
        assert!(none.is_empty());

        let a = draw_explosions(&catalog, &config, &mut ChaCha12Rng::seed_from_u64(1));
        let b = draw_explosions(&catalog, &config, &mut ChaCha12Rng::seed_from_u64(1));
        assert_eq!(a, b);
    }

    #[test]
    fn launch_poisson_mean() {
        let config = EventConfig {
            launch_rate_per_year: 100.0,
            timestep_days: 5.0,
            ..EventConfig::default()
        };
        let template = vec![mk_object(1, ObjectClass::ActivePayload, 700.0)];
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let steps = 10_000;
        let mut total = 0usize;
        for _ in 0..steps {
            let launched = generate_launches(&config, &template, 0.0, &mut rng).unwrap();
            for l in &launched {
                assert_eq!(l.object_class, ObjectClass::ActivePayload);
                assert_eq!(l.mission_years_remaining, Some(8.0));
            }
            total += launched.len();
        }
        let mean = total as f64 / steps as f64;
        let expected = 100.0 * 5.0 / 365.25;
        assert!(
            (mean - expected).abs() / expected < 0.05,
            "Poisson mean {mean} vs expected {expected}"
        );
    }

    #[test]
    fn launch_rate_zero_and_empty_template() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let none = generate_launches(&EventConfig::default(), &[], 0.0, &mut rng).unwrap();
        assert!(none.is_empty());

        let config = EventConfig { launch_rate_per_year: 10.0, ..EventConfig::default() };
        assert!(generate_launches(&config, &[], 0.0, &mut rng).is_err());
    }

    #[test]
    fn pmd_extremes_and_binomial_band() {
        let mut eol: Vec<ResidentSpaceObject> = (1..=1000)
            .map(|i| {
                let mut o = mk_object(i, ObjectClass::ActivePayload, 700.0);
                o.mission_years_remaining = Some(0.0);
                o
            })
            .collect();
        // One still inside its mission: untouched.
        eol.push(mk_object(1001, ObjectClass::ActivePayload, 700.0));
        let catalog = Catalog::from_objects(eol, 0.0).unwrap();

        let all = apply_pmd(
            &catalog,
            &EventConfig { pmd_success_prob: 1.0, ..EventConfig::default() },
            &mut ChaCha12Rng::seed_from_u64(1),
        );
        assert_eq!(all.success.len(), 1000);
        assert!(all.failure.is_empty());

        let none = apply_pmd(
            &catalog,
            &EventConfig { pmd_success_prob: 0.0, ..EventConfig::default() },
            &mut ChaCha12Rng::seed_from_u64(1),
        );
        assert_eq!(none.failure.len(), 1000);

        let typical = apply_pmd(
            &catalog,
            &EventConfig { pmd_success_prob: 0.9, ..EventConfig::default() },
            &mut ChaCha12Rng::seed_from_u64(5),
        );
        let s = typical.success.len();
        assert!((870..=930).contains(&s), "successes {s}");
    }

    fn commit_params() -> CommitParams {
        CommitParams {
            t_days: 5.0,
            fragment_length_threshold_m: 0.1,
            explosion_scale: 1.0,
            timestep_days: 5.0,
        }
    }

    #[test]
    fn commit_no_events_only_ticks_clocks() {
        let mut catalog = Catalog::from_objects(
            vec![mk_object(1, ObjectClass::ActivePayload, 700.0), mk_object(2, ObjectClass::Debris, 5.0)],
            0.0,
        )
        .unwrap();
        let mut next_id = catalog.next_id();
        let mut log = EventLog::default();
        let before = catalog.len();
        let outcome = commit_timestep(
            &mut catalog,
            &StepEvents::default(),
            &commit_params(),
            &mut next_id,
            &mut ChaCha12Rng::seed_from_u64(0),
            &mut log,
        )
        .unwrap();
        assert_eq!(catalog.len(), before);
        assert_eq!(outcome.accounting.net(), 0);
        assert!(log.is_empty());
        let remaining = catalog.get(1).unwrap().mission_years_remaining.unwrap();
        assert!((remaining - (5.0 - 5.0 / 365.25)).abs() < 1e-12);
    }

    #[test]
    fn commit_catastrophic_collision_replaces_parents() {
        let mut catalog = Catalog::from_objects(
            vec![mk_object(1, ObjectClass::DerelictPayload, 1000.0), mk_object(2, ObjectClass::DerelictPayload, 1000.0)],
            0.0,
        )
        .unwrap();
        let mut next_id = catalog.next_id();
        let mut log = EventLog::default();

        let pair = mk_pair(1, 2, 1.0, 0.5);
        let events = StepEvents {
            collisions: vec![TriggeredCollision {
                pair,
                position_km_a: [7100.0, 0.0, 0.0],
                velocity_km_s_a: [0.0, 7.49, 0.0],
                position_km_b: [7100.0, 0.0, 0.0],
                velocity_km_s_b: [0.0, -7.49, 0.0],
            }],
            ..StepEvents::default()
        };
        let outcome = commit_timestep(
            &mut catalog,
            &events,
            &commit_params(),
            &mut next_id,
            &mut ChaCha12Rng::seed_from_u64(1),
            &mut log,
        )
        .unwrap();

        assert!(!catalog.contains(1) && !catalog.contains(2));
        // 0.1·0.1^(−0.5)·2000^0.75 ≈ 94.6 → 95 sampled fragments.
        assert_eq!(outcome.accounting.collision_parents_removed, 2);
        let expected = (0.1f64 * 0.1f64.powf(-0.5) * 2000f64.powf(0.75)).round() as u32;
        assert_eq!(
            outcome.debris_increments,
            vec![(1, f64::from(expected)), (2, f64::from(expected))]
        );
        assert_eq!(outcome.collision_counts.get(&1), Some(&1));
        // Population identity holds.
        assert_eq!(
            catalog.len() as i64,
            2 + outcome.accounting.net(),
        );
    }

    #[test]
    fn commit_collision_preempts_explosion() {
        let mut catalog = Catalog::from_objects(
            vec![mk_object(1, ObjectClass::DerelictPayload, 1000.0), mk_object(2, ObjectClass::DerelictPayload, 1000.0)],
            0.0,
        )
        .unwrap();
        let mut next_id = catalog.next_id();
        let mut log = EventLog::default();
        let events = StepEvents {
            collisions: vec![TriggeredCollision {
                pair: mk_pair(1, 2, 1.0, 0.5),
                position_km_a: [7100.0, 0.0, 0.0],
                velocity_km_s_a: [0.0, 7.49, 0.0],
                position_km_b: [7100.0, 0.0, 0.0],
                velocity_km_s_b: [0.0, -7.49, 0.0],
            }],
            explosions: vec![1],
            ..StepEvents::default()
        };
        commit_timestep(
            &mut catalog,
            &events,
            &commit_params(),
            &mut next_id,
            &mut ChaCha12Rng::seed_from_u64(1),
            &mut log,
        )
        .unwrap();
        assert!(log.records.iter().all(|r| r.kind != EventKind::Explosion));
    }

    #[test]
    fn commit_rejects_duplicate_mutations() {
        let mut catalog =
            Catalog::from_objects(vec![mk_object(1, ObjectClass::Debris, 5.0)], 0.0).unwrap();
        let mut next_id = catalog.next_id();
        let mut log = EventLog::default();
        let events = StepEvents { removals: vec![1, 1], ..StepEvents::default() };
        assert!(commit_timestep(
            &mut catalog,
            &events,
            &commit_params(),
            &mut next_id,
            &mut ChaCha12Rng::seed_from_u64(0),
            &mut log,
        )
        .is_err());
    }
}
