//! Run persistence: delimited text files plus a structured-text manifest.
//!
//! Layout under a campaign output directory:
//!   config.toml                 resolved configuration
//!   campaign.toml               ensemble aggregates
//!   run_<seed>/series.csv       t_days,n_total,n_active,n_derelict,n_rb,n_debris
//!   run_<seed>/events.csv       t_days,kind,id_a,id_b,n_fragments
//!   run_<seed>/ranking_final.csv
//!   run_<seed>/collision_counts.csv
//!   run_<seed>/manifest.toml    seed, config digest, wall time

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{CampaignResult, PopulationSample, RankingSnapshot, RunResult};
use crate::error::{Error, Result};
use crate::events::{EventKind, EventLog, EventRecord};
use crate::risk::RankEntry;

pub const SERIES_HEADER: &str = "t_days,n_total,n_active,n_derelict,n_rb,n_debris";
pub const EVENTS_HEADER: &str = "t_days,kind,id_a,id_b,n_fragments";
pub const RANKING_HEADER: &str =
    "epoch_days,rank,id,index_value,percentile,mass_term,density_term,lifetime_term,ER,ED,EP";
pub const COUNTS_HEADER: &str = "id,collisions";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub seed: u64,
    pub config_digest: String,
    pub wall_time_s: f64,
    pub final_population: usize,
}

pub fn series_csv(series: &[PopulationSample]) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for s in series {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.t_days(),
            s.total,
            s.active,
            s.derelict,
            s.rocket_body,
            s.debris
        );
    }
    out
}

pub fn events_csv(log: &EventLog) -> String {
    let mut out = String::from(EVENTS_HEADER);
    out.push('\n');
    for r in &log.records {
        let id_b = r.id_b.map_or(String::new(), |id| id.to_string());
        let _ = writeln!(out, "{},{},{},{},{}", r.t_days, r.kind, r.id_a, id_b, r.n_fragments);
    }
    out
}

pub fn ranking_csv(snapshot: &RankingSnapshot) -> String {
    let mut out = String::from(RANKING_HEADER);
    out.push('\n');
    for e in &snapshot.entries {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            snapshot.epoch_days,
            e.rank,
            e.id,
            e.index_value,
            e.percentile,
            e.mass_term,
            e.density_term,
            e.lifetime_term,
            e.exp_r,
            e.exp_d,
            e.exp_p,
        );
    }
    out
}

pub fn counts_csv(counts: &BTreeMap<u64, u32>) -> String {
    let mut out = String::from(COUNTS_HEADER);
    out.push('\n');
    for (id, n) in counts {
        let _ = writeln!(out, "{id},{n}");
    }
    out
}

pub fn run_dir(base: &Path, seed: u64) -> PathBuf {
    base.join(format!("run_{seed:05}"))
}

/// Persist one run under `base/run_<seed>/`.
pub fn write_run(base: &Path, result: &RunResult) -> Result<PathBuf> {
    let dir = run_dir(base, result.seed);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("series.csv"), series_csv(&result.series))?;
    std::fs::write(dir.join("events.csv"), events_csv(&result.events))?;
    std::fs::write(dir.join("ranking_final.csv"), ranking_csv(&result.final_ranking))?;
    for snapshot in &result.rankings {
        let name = format!("ranking_{:07}.csv", (snapshot.epoch_days * 10.0).round() as u64);
        std::fs::write(dir.join(name), ranking_csv(snapshot))?;
    }
    std::fs::write(dir.join("collision_counts.csv"), counts_csv(&result.collision_counts))?;
    let manifest = RunManifest {
        seed: result.seed,
        config_digest: result.config_digest.clone(),
        wall_time_s: result.wall_time_s,
        final_population: result.final_population,
    };
    std::fs::write(
        dir.join("manifest.toml"),
        toml::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(dir)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignManifest {
    pub seeds: Vec<u64>,
    pub config_digest: String,
    pub mean_final_population: f64,
    pub std_final_population: f64,
    pub mean_wall_time_s: f64,
}

/// Persist a whole campaign: resolved config, per-run directories, and the
/// aggregate manifest.
pub fn write_campaign(
    base: &Path,
    config: &crate::engine::SimulationConfig,
    result: &CampaignResult,
) -> Result<()> {
    std::fs::create_dir_all(base)?;
    std::fs::write(base.join("config.toml"), config.to_toml())?;
    for run in &result.runs {
        write_run(base, run)?;
    }
    let manifest = CampaignManifest {
        seeds: result.runs.iter().map(|r| r.seed).collect(),
        config_digest: config.digest(),
        mean_final_population: result.mean_final_population,
        std_final_population: result.std_final_population,
        mean_wall_time_s: result.mean_wall_time_s,
    };
    std::fs::write(
        base.join("campaign.toml"),
        toml::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(())
}

/// A run read back from disk; the subset of [`RunResult`] the analysis
/// stage needs.
#[derive(Debug, Clone)]
pub struct PersistedRun {
    pub manifest: RunManifest,
    pub series: Vec<PopulationSample>,
    pub events: EventLog,
    pub final_ranking: RankingSnapshot,
    pub collision_counts: BTreeMap<u64, u32>,
}

fn parse_series(text: &str) -> Result<Vec<PopulationSample>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SERIES_HEADER => {}
        other => return Err(Error::Parse(format!("series header mismatch: {other:?}"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(Error::Parse(format!("series line {}: 6 columns expected", i + 2)));
        }
        let t: f64 = cols[0]
            .parse()
            .map_err(|_| Error::Parse(format!("series line {}: bad t", i + 2)))?;
        let num = |j: usize| -> Result<usize> {
            cols[j]
                .parse()
                .map_err(|_| Error::Parse(format!("series line {}: bad count", i + 2)))
        };
        out.push(PopulationSample {
            t_days_x10: (t * 10.0).round() as u64,
            total: num(1)?,
            active: num(2)?,
            derelict: num(3)?,
            rocket_body: num(4)?,
            debris: num(5)?,
        });
    }
    Ok(out)
}

fn parse_events(text: &str) -> Result<EventLog> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == EVENTS_HEADER => {}
        other => return Err(Error::Parse(format!("events header mismatch: {other:?}"))),
    }
    let mut log = EventLog::default();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::Parse(format!("events line {}: 5 columns expected", i + 2)));
        }
        let t_days: f64 = cols[0]
            .parse()
            .map_err(|_| Error::Parse(format!("events line {}: bad t", i + 2)))?;
        let kind: EventKind = cols[1].parse()?;
        let id_a: u64 = cols[2]
            .parse()
            .map_err(|_| Error::Parse(format!("events line {}: bad id_a", i + 2)))?;
        let id_b = if cols[3].is_empty() {
            None
        } else {
            Some(
                cols[3]
                    .parse()
                    .map_err(|_| Error::Parse(format!("events line {}: bad id_b", i + 2)))?,
            )
        };
        let n_fragments: u32 = cols[4]
            .parse()
            .map_err(|_| Error::Parse(format!("events line {}: bad fragment count", i + 2)))?;
        log.push(EventRecord { t_days, kind, id_a, id_b, n_fragments });
    }
    Ok(log)
}

fn parse_ranking(text: &str) -> Result<RankingSnapshot> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == RANKING_HEADER => {}
        other => return Err(Error::Parse(format!("ranking header mismatch: {other:?}"))),
    }
    let mut epoch_days = 0.0;
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 11 {
            return Err(Error::Parse(format!("ranking line {}: 11 columns expected", i + 2)));
        }
        let f = |j: usize| -> Result<f64> {
            cols[j]
                .parse()
                .map_err(|_| Error::Parse(format!("ranking line {}: bad number", i + 2)))
        };
        epoch_days = f(0)?;
        entries.push(RankEntry {
            rank: cols[1]
                .parse()
                .map_err(|_| Error::Parse(format!("ranking line {}: bad rank", i + 2)))?,
            id: cols[2]
                .parse()
                .map_err(|_| Error::Parse(format!("ranking line {}: bad id", i + 2)))?,
            index_value: f(3)?,
            percentile: f(4)?,
            mass_term: f(5)?,
            density_term: f(6)?,
            lifetime_term: f(7)?,
            exp_r: f(8)?,
            exp_d: f(9)?,
            exp_p: f(10)?,
        });
    }
    Ok(RankingSnapshot { epoch_days, entries })
}

fn parse_counts(text: &str) -> Result<BTreeMap<u64, u32>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == COUNTS_HEADER => {}
        other => return Err(Error::Parse(format!("counts header mismatch: {other:?}"))),
    }
    let mut out = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (id, n) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("counts line {}: 2 columns expected", i + 2)))?;
        let id: u64 =
            id.parse().map_err(|_| Error::Parse(format!("counts line {}: bad id", i + 2)))?;
        let n: u32 =
            n.parse().map_err(|_| Error::Parse(format!("counts line {}: bad count", i + 2)))?;
        out.insert(id, n);
    }
    Ok(out)
}

/// Read one persisted run directory.
pub fn read_run(dir: &Path) -> Result<PersistedRun> {
    let manifest: RunManifest =
        toml::from_str(&std::fs::read_to_string(dir.join("manifest.toml"))?)
            .map_err(|e| Error::Parse(format!("manifest: {e}")))?;
    Ok(PersistedRun {
        manifest,
        series: parse_series(&std::fs::read_to_string(dir.join("series.csv"))?)?,
        events: parse_events(&std::fs::read_to_string(dir.join("events.csv"))?)?,
        final_ranking: parse_ranking(&std::fs::read_to_string(dir.join("ranking_final.csv"))?)?,
        collision_counts: parse_counts(&std::fs::read_to_string(
            dir.join("collision_counts.csv"),
        )?)?,
    })
}

/// Read every `run_*` directory under a campaign directory, sorted by seed.
pub fn read_campaign_runs(base: &Path) -> Result<Vec<PersistedRun>> {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(base)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.is_dir()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .map_or(false, |n| n.starts_with("run_"))
        })
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::Parse(format!("no runs found under {}", base.display())));
    }
    dirs.iter().map(|d| read_run(d)).collect()
}
