//! Per-timestep simulation loop, seeded Monte Carlo ensembles, and
//! wall-time accounting.
//!
//! Phase order within a timestep is fixed: density refresh (if due) →
//! propagate all → decay flagging → CUBE build → pair probabilities and
//! draws → risk accumulator updates → collision/explosion/launch/PMD
//! draws → ranking (if epoch) → ADR selection (if due) → commit → metrics.
//! All randomness comes from per-phase streams derived from the run seed,
//! so identical (config, seed) pairs produce bit-identical results with
//! intra-run parallelism on or off.

pub mod config;
pub mod output;
pub mod rng;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;

use crate::adr::{removal_due, select_removals};
use crate::catalog::synth::{synth_population, PopulationSpec};
use crate::catalog::{shell_counts, shell_index, Catalog, ObjectClass, PhysicalProperties};
use crate::constants::{DAYS_PER_YEAR, SECONDS_PER_DAY};
use crate::conjunctions::{coresident_pairs, evaluate_pairs, sample_positions_into, CellPair, PairScratch, SampledState};
use crate::error::{Error, Result};
use crate::events::{
    apply_pmd, commit_timestep, draw_collisions, draw_explosions, generate_launches, CommitParams,
    EventLog, StepAccounting, StepEvents, TriggeredCollision,
};
use crate::propagation::{propagate, residual_lifetime, AtmosphereModel, PropagationContext};
use crate::risk::{
    csi, fictitious_debris_increment, g_inclination, median, rank, refresh_background_density,
    BackgroundDensityField, CsiReferences, Normalizations, RankEntry, RiskRecord,
    NORM_FLOOR,
};

pub use config::SimulationConfig;

/// One population time-series sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PopulationSample {
    pub t_days_x10: u64,
    pub total: usize,
    pub active: usize,
    pub derelict: usize,
    pub rocket_body: usize,
    pub debris: usize,
}

impl PopulationSample {
    pub fn t_days(&self) -> f64 {
        self.t_days_x10 as f64 / 10.0
    }
}

/// Exact per-step bookkeeping record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub accounting: StepAccounting,
    pub population_after: usize,
}

/// A full ranking at one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingSnapshot {
    pub epoch_days: f64,
    pub entries: Vec<RankEntry>,
}

/// Everything a single seeded run produces.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub seed: u64,
    pub series: Vec<PopulationSample>,
    pub events: EventLog,
    pub steps: Vec<StepRecord>,
    /// Final ranking, always refreshed at the last step.
    pub final_ranking: RankingSnapshot,
    /// Every epoch snapshot when `keep_all_rankings` is set.
    pub rankings: Vec<RankingSnapshot>,
    /// Ground-truth collision participations per object.
    pub collision_counts: BTreeMap<u64, u32>,
    pub final_population: usize,
    /// Stepping-loop wall time (excludes setup and I/O).
    pub wall_time_s: f64,
    pub config_digest: String,
}

/// A seeded ensemble with order-independent aggregates.
#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub runs: Vec<RunResult>,
    pub mean_final_population: f64,
    pub std_final_population: f64,
    pub mean_wall_time_s: f64,
    /// Max per-object collision count across runs; a threshold on this map
    /// reproduces the union-over-runs ground-truth cohort.
    pub pooled_collision_counts: BTreeMap<u64, u32>,
}

/// Load the initial population per the config.
pub fn load_catalog(config: &SimulationConfig) -> Result<Catalog> {
    let mut catalog = match config.population.source {
        config::PopulationSource::Synthetic => {
            let spec = PopulationSpec { classes: config.population.classes.clone() };
            synth_population(&spec, config.population.synth_seed)?
        }
        config::PopulationSource::Tle => {
            let path = config.population.tle_path.as_ref().unwrap();
            let text = std::fs::read_to_string(path)?;
            let mut catalog = crate::catalog::tle::parse_tle_file(&text)?;
            if let Some(sidecar) = &config.population.sidecar_path {
                let text = std::fs::read_to_string(sidecar)?;
                crate::catalog::io::apply_sidecar(&mut catalog, &text)?;
            }
            catalog
        }
        config::PopulationSource::Snapshot => {
            let path = config.population.snapshot_path.as_ref().unwrap();
            let mut catalog = crate::catalog::io::read_snapshot_file(path)?;
            if let Some(sidecar) = &config.population.sidecar_path {
                let text = std::fs::read_to_string(sidecar)?;
                crate::catalog::io::apply_sidecar(&mut catalog, &text)?;
            }
            catalog
        }
    };

    // File-based sources carry no mission clocks; stagger them across the
    // configured lifetime so disposals do not arrive in one synchronized
    // wave.
    if !matches!(config.population.source, config::PopulationSource::Synthetic) {
        let lifetime = config.events.mission_lifetime_years;
        let n_active = catalog.iter().filter(|o| o.is_active()).count().max(1);
        let mut idx = 0usize;
        for obj in catalog.iter_mut() {
            if obj.is_active() {
                idx += 1;
                obj.mission_years_remaining = Some(lifetime * idx as f64 / n_active as f64);
            }
        }
    }

    catalog.validate()?;
    Ok(catalog)
}

fn build_atmosphere(config: &SimulationConfig) -> Result<AtmosphereModel> {
    match &config.atmosphere.table_path {
        Some(path) => AtmosphereModel::from_file(path),
        None => Ok(AtmosphereModel::standard()),
    }
}

/// CSI reference object: a 10-tonne payload with a 10 m² cross section.
fn csi_reference_lifetime(ctx: &PropagationContext, cap_years: f64, h0_km: f64) -> f64 {
    let props = PhysicalProperties::from_mass_radius(10_000.0, (10.0 / std::f64::consts::PI).sqrt());
    let state = crate::catalog::OrbitalState {
        semi_major_axis: ctx.consts.earth_radius_km + h0_km,
        eccentricity: 0.0,
        inclination: 0.0,
        raan: 0.0,
        arg_perigee: 0.0,
        mean_anomaly: 0.0,
        epoch: 0.0,
    };
    residual_lifetime(&state, &props, ctx, cap_years).max(NORM_FLOOR)
}

struct Setup {
    catalog: Catalog,
    /// Id-sorted records mirroring the catalog.
    records: Vec<RiskRecord>,
    background: BackgroundDensityField,
    background_t0: BackgroundDensityField,
    m0_kg: f64,
    l0_years: f64,
    rho_b0: f64,
    csi_refs: CsiReferences,
    csi_ref_lifetime: f64,
    csi_rho_ref: f64,
    launch_template: Vec<crate::catalog::ResidentSpaceObject>,
    ctx: PropagationContext,
}

fn record_mut(records: &mut [RiskRecord], id: u64) -> Option<&mut RiskRecord> {
    records.binary_search_by_key(&id, |r| r.id).ok().map(|i| &mut records[i])
}

fn remove_record(records: &mut Vec<RiskRecord>, id: u64) {
    if let Ok(i) = records.binary_search_by_key(&id, |r| r.id) {
        records.remove(i);
    }
}

fn new_record(
    obj: &crate::catalog::ResidentSpaceObject,
    setup_m0: f64,
    setup_l0: f64,
    mass_exponent: f64,
    lifetime_years: f64,
    csi_refs: &CsiReferences,
    csi_ref_lifetime: f64,
    csi_rho_ref: f64,
    background_t0: &BackgroundDensityField,
    grid: &crate::catalog::ShellGrid,
    k_incl: f64,
) -> RiskRecord {
    let mut record = RiskRecord::new(obj.id);
    record.mass_term = (obj.props.mass_kg / setup_m0).powf(mass_exponent);
    record.lifetime_years = lifetime_years;
    record.lifetime_term = lifetime_years / setup_l0;
    let shell = shell_index(obj.state.mean_altitude_km(), grid);
    let rho_t0 = background_t0.density_at_shell(shell);
    record.csi_frozen = csi(
        obj.props.mass_kg,
        obj.state.inclination,
        rho_t0,
        csi_rho_ref,
        lifetime_years / csi_ref_lifetime,
        csi_refs,
        k_incl,
    );
    record
}

fn compute_lifetimes(
    catalog: &Catalog,
    ctx: &PropagationContext,
    cap_years: f64,
    parallel: bool,
) -> Vec<f64> {
    if parallel {
        catalog
            .objects()
            .par_iter()
            .map(|o| residual_lifetime(&o.state, &o.props, ctx, cap_years))
            .collect()
    } else {
        catalog
            .objects()
            .iter()
            .map(|o| residual_lifetime(&o.state, &o.props, ctx, cap_years))
            .collect()
    }
}

fn initialize(config: &SimulationConfig) -> Result<Setup> {
    let catalog = load_catalog(config)?;
    let atmosphere = build_atmosphere(config)?;
    let ctx = PropagationContext::new(atmosphere, config.atmosphere.reentry_altitude_km);
    let cap = config.atmosphere.lifetime_cap_years;
    let grid = &config.shells;

    if config.events.launch_rate_per_year > 0.0
        && !catalog.iter().any(|o| o.is_active())
    {
        return Err(Error::Config(
            "positive launch rate requires active payloads in the initial catalog".into(),
        ));
    }

    let lifetimes = compute_lifetimes(&catalog, &ctx, cap, config.simulation.parallel);

    let counts = shell_counts(&catalog, grid);
    let mut background = match config.risk.density_interval() {
        Some(interval) => BackgroundDensityField::with_interval(grid.shell_count(), interval),
        None => BackgroundDensityField::new_static(grid.shell_count()),
    };
    background.initialize(&counts.counts, grid, 0.0);
    let background_t0 = BackgroundDensityField {
        densities: background.densities.clone(),
        last_update_days: 0.0,
        update_interval_days: None,
    };

    let masses: Vec<f64> = catalog.iter().map(|o| o.props.mass_kg).collect();
    let m0_kg = median(&masses).unwrap_or(1.0).max(NORM_FLOOR);
    let l0_years = median(&lifetimes).unwrap_or(1.0).max(NORM_FLOOR);
    let rho_b0 = background
        .densities
        .iter()
        .copied()
        .fold(0.0f64, f64::max)
        .max(NORM_FLOOR);

    let csi_refs = CsiReferences::default();
    let csi_ref_lifetime = csi_reference_lifetime(&ctx, cap, csi_refs.h0_km);
    let csi_rho_ref = background_t0
        .density_at_shell(shell_index(csi_refs.density_ref_altitude_km, grid))
        .max(NORM_FLOOR);

    let mut records = Vec::with_capacity(catalog.len());
    for (obj, &lifetime) in catalog.iter().zip(lifetimes.iter()) {
        records.push(new_record(
            obj,
            m0_kg,
            l0_years,
            config.risk.mass_exponent,
            lifetime,
            &csi_refs,
            csi_ref_lifetime,
            csi_rho_ref,
            &background_t0,
            grid,
            config.risk.k_inclination,
        ));
    }

    let launch_template: Vec<_> = catalog.iter().filter(|o| o.is_active()).cloned().collect();

    Ok(Setup {
        catalog,
        records,
        background,
        background_t0,
        m0_kg,
        l0_years,
        rho_b0,
        csi_refs,
        csi_ref_lifetime,
        csi_rho_ref,
        launch_template,
        ctx,
    })
}

fn interval_crossed(t: f64, prev_t: f64, interval_days: f64) -> bool {
    let now = (t / interval_days).floor() as i64;
    let before = (prev_t / interval_days).floor() as i64;
    now > before && now >= 1
}

fn population_sample(catalog: &Catalog, t_days: f64) -> PopulationSample {
    PopulationSample {
        t_days_x10: (t_days * 10.0).round() as u64,
        total: catalog.len(),
        active: catalog.count_by_class(ObjectClass::ActivePayload),
        derelict: catalog.count_by_class(ObjectClass::DerelictPayload),
        rocket_body: catalog.count_by_class(ObjectClass::RocketBody),
        debris: catalog.count_by_class(ObjectClass::Debris),
    }
}

/// Execute one seeded run.
pub fn run(config: &SimulationConfig, seed: u64) -> Result<RunResult> {
    config.validate()?;
    let digest = config.digest();
    let mut setup = initialize(config)?;
    let mut rngs = rng::PhaseRngs::new(seed);

    let dt_days = config.simulation.timestep_days;
    let dt_s = dt_days * SECONDS_PER_DAY;
    let n_steps = config.steps();
    let grid = config.shells;
    let fictitious = config.risk.fictitious_enabled();
    let eps = config.risk.epsilon();
    let filter = config.risk.effective_filter(config.simulation.fragment_min_length_m);
    let parallel = config.simulation.parallel;

    let mut next_id = setup.catalog.next_id();
    let mut log = EventLog::default();
    let mut series = vec![population_sample(&setup.catalog, 0.0)];
    let mut steps = Vec::with_capacity(n_steps);
    let mut rankings: Vec<RankingSnapshot> = Vec::new();
    let mut final_ranking: Option<RankingSnapshot> = None;
    let mut collision_counts: BTreeMap<u64, u32> = BTreeMap::new();
    let mut epoch_counter = 0u64;
    let mut alive_buf = Catalog::new();
    let mut samples_buf: Vec<SampledState> = Vec::new();
    let mut pair_scratch = PairScratch::default();
    let mut cell_pairs: Vec<CellPair> = Vec::new();

    let started = Instant::now();
    for step in 1..=n_steps {
        let t = step as f64 * dt_days;
        let prev_t = t - dt_days;

        // 1. Background-density refresh, when due.
        if setup.background.refresh_due(t) {
            let counts_now = shell_counts(&setup.catalog, &grid);
            refresh_background_density(&mut setup.background, &counts_now.counts, &grid, t);
        }

        // 2. Propagate everything in place; station-kept payloads hold
        //    their semi-major axis against drag.
        let ctx = &setup.ctx;
        let propagate_one = |obj: &mut crate::catalog::ResidentSpaceObject| -> Result<bool> {
            let out = propagate(&obj.state, &obj.props, dt_s, ctx)?;
            if obj.is_station_kept() {
                let held_a = obj.state.semi_major_axis;
                obj.state = out.state;
                obj.state.semi_major_axis = held_a;
                Ok(false)
            } else {
                obj.state = out.state;
                Ok(out.decayed)
            }
        };
        let decay_flags: Vec<bool> = if parallel {
            setup
                .catalog
                .objects_mut()
                .par_iter_mut()
                .map(propagate_one)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Numeric(format!("step {step} (t = {t} d): {e}")))?
        } else {
            setup
                .catalog
                .objects_mut()
                .iter_mut()
                .map(propagate_one)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Numeric(format!("step {step} (t = {t} d): {e}")))?
        };

        // 3. Decay flags.
        let decayed_ids: Vec<u64> = setup
            .catalog
            .iter()
            .zip(decay_flags)
            .filter_map(|(obj, decayed)| decayed.then_some(obj.id))
            .collect();
        let decayed_set: BTreeSet<u64> = decayed_ids.iter().copied().collect();

        // 4. CUBE build on the surviving population. The snapshot buffer is
        //    reused across steps; only steps with decays filter it.
        let alive: &Catalog = if decayed_ids.is_empty() {
            &setup.catalog
        } else {
            alive_buf.clone_from(&setup.catalog);
            for id in &decayed_ids {
                alive_buf.remove(*id)?;
            }
            &alive_buf
        };
        sample_positions_into(alive, &mut rngs.anomaly, parallel, &mut samples_buf)?;
        let samples = &samples_buf;
        coresident_pairs(samples, config.cube.edge_km, &mut pair_scratch, &mut cell_pairs)?;

        // 5. Pair probabilities and stochastic draws, in sorted pair order.
        let radii: Vec<(u64, f64)> = alive.iter().map(|o| (o.id, o.props.radius_m)).collect();
        let pairs = evaluate_pairs(
            &cell_pairs,
            samples,
            &radii,
            config.cube.edge_km,
            dt_s,
            &mut rngs.pair_draws,
        )?;

        // 6. Risk accumulator updates.
        let mut neighbor_counts: BTreeMap<u64, u32> = BTreeMap::new();
        let mut survive: BTreeMap<u64, f64> = BTreeMap::new();
        let mut p_max = 0.0f64;
        for pair in &pairs {
            *neighbor_counts.entry(pair.id_i).or_insert(0) += 1;
            *neighbor_counts.entry(pair.id_j).or_insert(0) += 1;
            let q = 1.0 - pair.pair_probability;
            *survive.entry(pair.id_i).or_insert(1.0) *= q;
            *survive.entry(pair.id_j).or_insert(1.0) *= q;
            p_max = p_max.max(pair.pair_probability);
        }

        if fictitious && !pairs.is_empty() {
            let masses: Vec<(u64, f64)> =
                alive.iter().map(|o| (o.id, o.props.mass_kg)).collect();
            // A degenerate all-zero-probability step only feeds the k·√P
            // term with √0, so flooring p_max keeps epsilon1 exact.
            let increments = fictitious_debris_increment(
                &pairs,
                &masses,
                &filter,
                &eps,
                p_max.max(NORM_FLOOR),
            )?;
            for (id, inc) in increments {
                if let Some(rec) = record_mut(&mut setup.records, id) {
                    rec.d_accum += inc;
                }
            }
        }

        // Merge-scan: records and the per-pair maps are both id-ordered,
        // so each object's neighbor count and survival product stream past
        // without per-object map lookups.
        let elapsed_years = t / DAYS_PER_YEAR;
        let mut neighbors_iter = neighbor_counts.iter().peekable();
        let mut survive_iter = survive.iter().peekable();
        for rec in setup.records.iter_mut() {
            let x_r = match neighbors_iter.peek() {
                Some(&(&id, &n)) if id == rec.id => {
                    neighbors_iter.next();
                    f64::from(n)
                }
                _ => 0.0,
            };
            let p_c = match survive_iter.peek() {
                Some(&(&id, &q)) if id == rec.id => {
                    survive_iter.next();
                    1.0 - q
                }
                _ => 0.0,
            };
            if decayed_set.contains(&rec.id) {
                continue;
            }
            rec.observe_r(x_r);
            rec.p_sum += p_c;
            rec.p_count += 1;
            rec.observe_d(rec.d_accum / elapsed_years);
        }

        // 7. Event draws from the snapshot.
        let triggered = draw_collisions(&pairs, alive, &config.events, &mut rngs.avoidance)?;
        let collisions: Vec<TriggeredCollision> = triggered
            .iter()
            .map(|&idx| {
                let pair = pairs[idx];
                let sample_of = |id: u64| {
                    samples[samples.binary_search_by_key(&id, |s| s.id).expect("sampled id")]
                };
                let (sa, sb) = (sample_of(pair.id_i), sample_of(pair.id_j));
                TriggeredCollision {
                    pair,
                    position_km_a: sa.position_km,
                    velocity_km_s_a: sa.velocity_km_s,
                    position_km_b: sb.position_km,
                    velocity_km_s_b: sb.velocity_km_s,
                }
            })
            .collect();
        let explosions = draw_explosions(alive, &config.events, &mut rngs.explosions);
        let launches =
            generate_launches(&config.events, &setup.launch_template, t, &mut rngs.launches)?;
        let pmd = apply_pmd(alive, &config.events, &mut rngs.pmd);

        // 8. Ranking epoch.
        let removal_epoch = removal_due(t, prev_t, &config.removal);
        let ranking_epoch = interval_crossed(t, prev_t, config.simulation.ranking_interval_days)
            || removal_epoch
            || step == n_steps;
        let mut current_ranking: Option<Vec<RankEntry>> = None;
        if ranking_epoch {
            epoch_counter += 1;
            let snapshot = refresh_and_rank(
                &setup.catalog,
                &mut setup.records,
                &setup.background,
                (setup.m0_kg, setup.l0_years, setup.rho_b0),
                config,
                epoch_counter,
                t,
                &decayed_set,
            )?;
            if config.simulation.keep_all_rankings {
                rankings.push(snapshot.clone());
            }
            current_ranking = Some(snapshot.entries.clone());
            final_ranking = Some(snapshot);
        }

        // 9. ADR selection.
        let removals = if removal_epoch {
            select_removals(
                alive,
                current_ranking.as_deref(),
                &config.removal,
                &mut rngs.adr,
            )?
        } else {
            Vec::new()
        };

        // 10. Commit in fixed order.
        let events = StepEvents { decayed: decayed_ids, collisions, explosions, pmd, launches, removals };
        let params = CommitParams {
            t_days: t,
            fragment_length_threshold_m: config.simulation.fragment_min_length_m,
            explosion_scale: config.events.explosion_scale,
            timestep_days: dt_days,
        };
        let outcome = commit_timestep(
            &mut setup.catalog,
            &events,
            &params,
            &mut next_id,
            &mut rngs.fragments,
            &mut log,
        )
        .map_err(|e| Error::Contract(format!("step {step} (t = {t} d): {e}")))?;

        for id in &outcome.dead {
            remove_record(&mut setup.records, *id);
        }
        // Births carry fresh monotonically increasing ids, so appending
        // keeps the record store sorted.
        for id in &outcome.born {
            let obj = setup.catalog.get(*id).expect("born object present");
            let lifetime = residual_lifetime(
                &obj.state,
                &obj.props,
                &setup.ctx,
                config.atmosphere.lifetime_cap_years,
            );
            debug_assert!(setup.records.last().map_or(true, |r| r.id < *id));
            setup.records.push(new_record(
                obj,
                setup.m0_kg,
                setup.l0_years,
                config.risk.mass_exponent,
                lifetime,
                &setup.csi_refs,
                setup.csi_ref_lifetime,
                setup.csi_rho_ref,
                &setup.background_t0,
                &grid,
                config.risk.k_inclination,
            ));
        }
        if !fictitious {
            for (id, inc) in &outcome.debris_increments {
                if let Some(rec) = record_mut(&mut setup.records, *id) {
                    rec.d_accum += inc;
                }
            }
        }
        for (id, n) in &outcome.collision_counts {
            *collision_counts.entry(*id).or_insert(0) += n;
        }

        if setup.catalog.len() > config.simulation.max_objects {
            return Err(Error::Numeric(format!(
                "population {} exceeded the {} object cap at step {step} (t = {t} d)",
                setup.catalog.len(),
                config.simulation.max_objects
            )));
        }

        // 11. Metrics.
        steps.push(StepRecord {
            step,
            accounting: outcome.accounting,
            population_after: setup.catalog.len(),
        });
        if step % config.simulation.record_interval_steps == 0 {
            series.push(population_sample(&setup.catalog, t));
        }
    }

    // A zero-step run still reports a (static) ranking of the initial
    // population.
    if final_ranking.is_none() {
        epoch_counter += 1;
        let snapshot = refresh_and_rank(
            &setup.catalog,
            &mut setup.records,
            &setup.background,
            (setup.m0_kg, setup.l0_years, setup.rho_b0),
            config,
            epoch_counter,
            0.0,
            &BTreeSet::new(),
        )?;
        if config.simulation.keep_all_rankings {
            rankings.push(snapshot.clone());
        }
        final_ranking = Some(snapshot);
    }
    let wall_time_s = started.elapsed().as_secs_f64();

    Ok(RunResult {
        seed,
        series,
        events: log,
        steps,
        final_ranking: final_ranking.expect("final ranking always computed"),
        rankings,
        collision_counts,
        final_population: setup.catalog.len(),
        wall_time_s,
        config_digest: digest,
    })
}

/// Refresh every record's epoch terms, recompute normalizations, compute
/// index values, and rank.
#[allow(clippy::too_many_arguments)]
fn refresh_and_rank(
    catalog: &Catalog,
    records: &mut Vec<RiskRecord>,
    background: &BackgroundDensityField,
    (m0_kg, l0_years, rho_b0): (f64, f64, f64),
    config: &SimulationConfig,
    epoch_counter: u64,
    t_days: f64,
    decayed_set: &BTreeSet<u64>,
) -> Result<RankingSnapshot> {
    let grid = &config.shells;
    let kind = config.risk.index;

    // Collision-probability term: exponential-fit mean of the whole
    // history, smoothed across epochs.
    for rec in records.iter_mut() {
        if decayed_set.contains(&rec.id) {
            continue;
        }
        if rec.p_count > 0 {
            let fitted = rec.p_sum / rec.p_count as f64;
            rec.observe_p(fitted);
        }
    }

    let firsts_r: Vec<f64> = records.iter().filter_map(|r| r.first_r).collect();
    let firsts_d: Vec<f64> = records.iter().filter_map(|r| r.first_d).collect();
    let firsts_p: Vec<f64> = records.iter().filter_map(|r| r.first_p).collect();
    let norms = Normalizations {
        m0_kg,
        rho_b0,
        l0_years,
        r0: median(&firsts_r).unwrap_or(NORM_FLOOR),
        d0: median(&firsts_d).unwrap_or(NORM_FLOOR),
        p0: median(&firsts_p).unwrap_or(NORM_FLOOR),
        k_inclination: config.risk.k_inclination,
    }
    .floored();

    for (obj, rec) in catalog.iter().zip(records.iter_mut()) {
        debug_assert_eq!(obj.id, rec.id, "records must mirror the catalog");
        let shell = shell_index(obj.state.mean_altitude_km(), grid);
        let rho = background.density_at_shell(shell);
        rec.density_term =
            rho * g_inclination(obj.state.inclination, config.risk.k_inclination) / norms.rho_b0;
        rec.last_refresh_epoch = epoch_counter;
        rec.index_value = crate::risk::compute_index(rec, kind, &norms, epoch_counter)?;
    }

    Ok(RankingSnapshot { epoch_days: t_days, entries: rank(records, &norms) })
}

/// Run an ensemble of seeds. Runs share no mutable state and always
/// parallelize across seeds; aggregates are computed over sorted values so
/// they are invariant to seed order.
pub fn campaign(config: &SimulationConfig, seeds: &[u64]) -> Result<CampaignResult> {
    let unique: BTreeSet<u64> = seeds.iter().copied().collect();
    if unique.len() != seeds.len() {
        return Err(Error::Config("campaign seeds must be distinct".into()));
    }
    if seeds.is_empty() {
        return Err(Error::Config("campaign needs at least one seed".into()));
    }

    let runs: Vec<RunResult> =
        seeds.par_iter().map(|&s| run(config, s)).collect::<Result<Vec<_>>>()?;

    Ok(aggregate(runs))
}

fn aggregate(runs: Vec<RunResult>) -> CampaignResult {
    let mut finals: Vec<f64> = runs.iter().map(|r| r.final_population as f64).collect();
    finals.sort_by(f64::total_cmp);
    let n = finals.len() as f64;
    let mean_final_population = finals.iter().sum::<f64>() / n;
    let var = finals.iter().map(|x| (x - mean_final_population).powi(2)).sum::<f64>()
        / (n - 1.0).max(1.0);
    let std_final_population = var.sqrt();

    let mut walls: Vec<f64> = runs.iter().map(|r| r.wall_time_s).collect();
    walls.sort_by(f64::total_cmp);
    let mean_wall_time_s = walls.iter().sum::<f64>() / n;

    let mut pooled: BTreeMap<u64, u32> = BTreeMap::new();
    for run in &runs {
        for (&id, &count) in &run.collision_counts {
            let entry = pooled.entry(id).or_insert(0);
            *entry = (*entry).max(count);
        }
    }

    CampaignResult {
        runs,
        mean_final_population,
        std_final_population,
        mean_wall_time_s,
        pooled_collision_counts: pooled,
    }
}
