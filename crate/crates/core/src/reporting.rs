//! Post-run analysis: ground-truth cohorts, identification rates, ranking
//! comparisons, and experiment suites over config variants.
//!
//! Every report is a pure function of persisted run results, so re-running
//! an analysis over the same directory reproduces it byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::engine::{campaign, RankingSnapshot, SimulationConfig};
use crate::error::{Error, Result};
use crate::events::{EventKind, EventLog};
use crate::risk::{EpsilonMode, IndexKind};

/// Objects that suffered at least `threshold` collision events in at least
/// one run of an ensemble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthCohort {
    pub threshold: u32,
    pub members: BTreeSet<u64>,
}

/// Build the cohort from per-run collision counts.
pub fn ground_truth_cohort<'a, I>(counts_per_run: I, threshold: u32) -> GroundTruthCohort
where
    I: IntoIterator<Item = &'a BTreeMap<u64, u32>>,
{
    let mut members = BTreeSet::new();
    for counts in counts_per_run {
        for (&id, &n) in counts {
            if n >= threshold {
                members.insert(id);
            }
        }
    }
    GroundTruthCohort { threshold, members }
}

/// Recount collision participations from an event log (oracle path).
pub fn collision_counts_from_log(log: &EventLog) -> BTreeMap<u64, u32> {
    let mut counts = BTreeMap::new();
    for rec in &log.records {
        if rec.kind == EventKind::Collision {
            *counts.entry(rec.id_a).or_insert(0) += 1;
            if let Some(b) = rec.id_b {
                *counts.entry(b).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Fraction of the cohort ranked within the top slice of a ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationReport {
    pub top_fraction: f64,
    /// Size of the top slice, ⌈top_fraction · N⌉.
    pub top_n: usize,
    pub cohort_size: usize,
    pub hits: usize,
    /// Cohort members absent from the ranked population; counted as misses.
    pub absent: Vec<u64>,
    pub rate: f64,
}

pub fn identification_rate(
    ranking: &RankingSnapshot,
    cohort: &GroundTruthCohort,
    top_fraction: f64,
) -> Result<IdentificationReport> {
    if cohort.members.is_empty() {
        return Err(Error::Domain("identification rate undefined for an empty cohort".into()));
    }
    if !(0.0..=1.0).contains(&top_fraction) {
        return Err(Error::Domain(format!("top fraction {top_fraction} outside [0, 1]")));
    }
    let n = ranking.entries.len();
    let top_n = ((top_fraction * n as f64).ceil() as usize).min(n);
    let top_ids: BTreeSet<u64> = ranking.entries[..top_n].iter().map(|e| e.id).collect();
    let ranked_ids: BTreeSet<u64> = ranking.entries.iter().map(|e| e.id).collect();

    let mut hits = 0usize;
    let mut absent = Vec::new();
    for &id in &cohort.members {
        if top_ids.contains(&id) {
            hits += 1;
        } else if !ranked_ids.contains(&id) {
            absent.push(id);
        }
    }
    Ok(IdentificationReport {
        top_fraction,
        top_n,
        cohort_size: cohort.members.len(),
        hits,
        absent,
        rate: hits as f64 / cohort.members.len() as f64,
    })
}

/// Paired percentile table comparing two rankings over a cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingComparison {
    /// (id, percentile in A, percentile in B) per cohort member.
    pub points: Vec<(u64, f64, f64)>,
    /// Fraction of points where A assigns the lower (more critical)
    /// percentile.
    pub fraction_first_better: f64,
    /// Cohort members missing from either ranking.
    pub absent: Vec<u64>,
}

pub fn ranking_comparison(
    a: &RankingSnapshot,
    b: &RankingSnapshot,
    cohort: &GroundTruthCohort,
) -> Result<RankingComparison> {
    let ids_a: BTreeSet<u64> = a.entries.iter().map(|e| e.id).collect();
    let ids_b: BTreeSet<u64> = b.entries.iter().map(|e| e.id).collect();
    if ids_a != ids_b {
        return Err(Error::Contract(
            "ranking comparison requires both rankings over the same population".into(),
        ));
    }
    let pct_a: BTreeMap<u64, f64> = a.entries.iter().map(|e| (e.id, e.percentile)).collect();
    let pct_b: BTreeMap<u64, f64> = b.entries.iter().map(|e| (e.id, e.percentile)).collect();

    let mut points = Vec::new();
    let mut absent = Vec::new();
    let mut first_better = 0usize;
    for &id in &cohort.members {
        match (pct_a.get(&id), pct_b.get(&id)) {
            (Some(&pa), Some(&pb)) => {
                if pa < pb {
                    first_better += 1;
                }
                points.push((id, pa, pb));
            }
            _ => absent.push(id),
        }
    }
    let fraction_first_better =
        if points.is_empty() { 0.0 } else { first_better as f64 / points.len() as f64 };
    Ok(RankingComparison { points, fraction_first_better, absent })
}

/// One row of an experiment-suite table.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub name: String,
    pub mean_final_population: f64,
    pub std_final_population: f64,
    pub mean_wall_time_s: f64,
    /// Mean wall time relative to the baseline variant.
    pub relative_cost: f64,
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub baseline: String,
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "variant,mean_final_population,std_final_population,mean_wall_s,relative_cost,config_digest\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.3},{:.3},{:.3},{:.3},{}",
                r.name,
                r.mean_final_population,
                r.std_final_population,
                r.mean_wall_time_s,
                r.relative_cost,
                r.config_digest
            );
        }
        out
    }
}

/// Run every named variant over the shared seed list and tabulate final
/// populations and relative cost against the named baseline (the first
/// variant when unspecified).
pub fn experiment_suite(
    variants: &[(String, SimulationConfig)],
    seeds: &[u64],
    baseline: Option<&str>,
) -> Result<SuiteReport> {
    if variants.is_empty() {
        return Err(Error::Config("experiment suite needs at least one variant".into()));
    }
    let baseline_name = baseline.unwrap_or(&variants[0].0).to_string();
    if !variants.iter().any(|(n, _)| *n == baseline_name) {
        return Err(Error::Config(format!("baseline variant '{baseline_name}' not in the list")));
    }

    let mut raw = Vec::with_capacity(variants.len());
    for (name, config) in variants {
        let result = campaign(config, seeds)?;
        raw.push((name.clone(), config.digest(), result));
    }
    let baseline_wall = raw
        .iter()
        .find(|(n, _, _)| *n == baseline_name)
        .map(|(_, _, r)| r.mean_wall_time_s)
        .expect("baseline present");

    let rows = raw
        .into_iter()
        .map(|(name, config_digest, r)| SuiteRow {
            name,
            mean_final_population: r.mean_final_population,
            std_final_population: r.std_final_population,
            mean_wall_time_s: r.mean_wall_time_s,
            relative_cost: r.mean_wall_time_s / baseline_wall,
            config_digest,
        })
        .collect();
    Ok(SuiteReport { baseline: baseline_name, rows })
}

/// Apply a `key=value[,key=value...]` delta string to a config.
///
/// Supported keys: index, mass_exponent, fictitious, filter,
/// filter_min_mass_kg, filter_min_length_m, epsilon, eps_max,
/// density_interval_days, policy, k, cadence_years, horizon_years,
/// timestep_days, launch_rate_per_year.
pub fn apply_variant(base: &SimulationConfig, delta: &str) -> Result<SimulationConfig> {
    let mut config = base.clone();
    for part in delta.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("variant delta '{part}' is not key=value")))?;
        let value = value.trim();
        let parse_f = |what: &str| -> Result<f64> {
            value.parse().map_err(|_| Error::Config(format!("bad number for {what}: '{value}'")))
        };
        let parse_bool = |what: &str| -> Result<bool> {
            match value {
                "on" | "true" => Ok(true),
                "off" | "false" => Ok(false),
                _ => Err(Error::Config(format!("bad flag for {what}: '{value}'"))),
            }
        };
        match key.trim() {
            "index" => {
                config.risk.index = match value {
                    "csi" => IndexKind::Csi,
                    "mitri" => IndexKind::Mitri,
                    "fmm" => IndexKind::Fmm,
                    _ => return Err(Error::Config(format!("unknown index '{value}'"))),
                }
            }
            "mass_exponent" => config.risk.mass_exponent = parse_f("mass_exponent")?,
            "fictitious" => config.risk.fictitious = Some(parse_bool("fictitious")?),
            "filter" => config.risk.filter_enabled = Some(parse_bool("filter")?),
            "filter_min_mass_kg" => config.risk.filter_min_mass_kg = parse_f("filter_min_mass_kg")?,
            "filter_min_length_m" => {
                config.risk.filter_min_length_m = parse_f("filter_min_length_m")?
            }
            "epsilon" => {
                config.risk.epsilon_mode = match value {
                    "off" => EpsilonMode::Off,
                    "sigmoid" => EpsilonMode::Sigmoid,
                    "linear" => EpsilonMode::Linear,
                    _ => return Err(Error::Config(format!("unknown epsilon mode '{value}'"))),
                }
            }
            "eps_max" => config.risk.eps_max = parse_f("eps_max")?,
            "density_interval_days" => {
                config.risk.density_update_interval_days = if value == "static" {
                    None
                } else {
                    Some(parse_f("density_interval_days")?)
                }
            }
            "policy" => {
                config.removal.kind = match value {
                    "none" => crate::adr::PolicyKind::None,
                    "random_k" => crate::adr::PolicyKind::RandomK,
                    "top_k" => crate::adr::PolicyKind::TopKByIndex,
                    _ => return Err(Error::Config(format!("unknown policy '{value}'"))),
                }
            }
            "k" => {
                config.removal.k = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad integer for k: '{value}'")))?
            }
            "cadence_years" => config.removal.cadence_years = parse_f("cadence_years")?,
            "horizon_years" => config.simulation.horizon_years = parse_f("horizon_years")?,
            "timestep_days" => config.simulation.timestep_days = parse_f("timestep_days")?,
            "launch_rate_per_year" => {
                config.events.launch_rate_per_year = parse_f("launch_rate_per_year")?
            }
            other => return Err(Error::Config(format!("unknown variant key '{other}'"))),
        }
    }
    config.validate()?;
    Ok(config)
}

/// Mean population series over runs sharing the same sampling times.
pub fn mean_population_series(series: &[&[crate::engine::PopulationSample]]) -> Vec<(f64, f64)> {
    let Some(first) = series.first() else { return Vec::new() };
    let len = series.iter().map(|s| s.len()).min().unwrap_or(0);
    (0..len)
        .map(|i| {
            let t = first[i].t_days();
            let mean =
                series.iter().map(|s| s[i].total as f64).sum::<f64>() / series.len() as f64;
            (t, mean)
        })
        .collect()
}
