//! Command-line driver: seeded runs, campaigns, one-shot rankings,
//! post-run analysis, experiment suites, and plot-ready data export.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use debrisim::engine::output::{
    self, ranking_csv, read_campaign_runs, write_campaign, write_run,
};
use debrisim::engine::{self, SimulationConfig};
use debrisim::reporting::{
    self, apply_variant, ground_truth_cohort, identification_rate, ranking_comparison,
};

#[derive(Parser)]
#[command(
    name = "debrisim",
    about = "Monte Carlo LEO debris environment simulator with risk-driven ADR",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one seeded run and persist it.
    Run(RunArgs),
    /// Execute an ensemble of seeds and persist every run plus aggregates.
    Campaign(CampaignArgs),
    /// Compute a one-shot index snapshot from a catalog file.
    Rank(RankArgs),
    /// Build cohort/identification/comparison reports from stored runs.
    Analyze(AnalyzeArgs),
    /// Run an experiment suite of config variants over shared seeds.
    Suite(SuiteArgs),
    /// Emit plot-ready delimited data from stored runs.
    EmitPlots(EmitPlotsArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    config: PathBuf,
    /// Seed list: comma-separated values and/or inclusive ranges (1..10).
    #[arg(long)]
    seeds: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    config: PathBuf,
    /// Catalog snapshot (.csv) or TLE file to rank.
    #[arg(long)]
    catalog: PathBuf,
    /// Index kind override: csi, mitri or fmm.
    #[arg(long)]
    index: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Campaign directory holding run_* subdirectories.
    #[arg(long)]
    runs: PathBuf,
    /// Second campaign to compare rankings against, matched by seed.
    #[arg(long)]
    compare: Option<PathBuf>,
    /// Ground-truth cohort threshold (collisions per run).
    #[arg(long, default_value_t = 50)]
    threshold: u32,
    #[arg(long, default_value_t = 0.005)]
    top_fraction: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    config: PathBuf,
    /// Repeatable variant: name:key=value[,key=value...]. An empty delta
    /// (just "name") reuses the base config.
    #[arg(long = "variant")]
    variants: Vec<String>,
    #[arg(long)]
    seeds: String,
    /// Variant name whose wall time anchors the relative-cost column.
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EmitPlotsArgs {
    /// Campaign directories (repeatable); each becomes one labelled curve.
    #[arg(long = "runs")]
    runs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_seeds(text: &str) -> anyhow::Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().context("bad seed range start")?;
            let hi: u64 = hi.trim().parse().context("bad seed range end")?;
            if hi < lo {
                bail!("seed range {part} is inverted");
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(part.parse().context("bad seed value")?);
        }
    }
    if seeds.is_empty() {
        bail!("no seeds given");
    }
    Ok(seeds)
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<()> {
    let config = SimulationConfig::from_file(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    let result = engine::run(&config, args.seed)?;
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(args.out.join("config.toml"), config.to_toml())?;
    let dir = write_run(&args.out, &result)?;
    println!(
        "run seed {} finished: {} objects after {:.1} years ({:.2} s), results in {}",
        args.seed,
        result.final_population,
        config.simulation.horizon_years,
        result.wall_time_s,
        dir.display()
    );
    Ok(())
}

fn cmd_campaign(args: &CampaignArgs) -> anyhow::Result<()> {
    let config = SimulationConfig::from_file(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    let seeds = parse_seeds(&args.seeds)?;
    let result = engine::campaign(&config, &seeds)?;
    write_campaign(&args.out, &config, &result)?;
    println!(
        "campaign over {} seeds: mean final population {:.1} (std {:.1}), mean wall {:.2} s",
        seeds.len(),
        result.mean_final_population,
        result.std_final_population,
        result.mean_wall_time_s
    );
    Ok(())
}

fn cmd_rank(args: &RankArgs) -> anyhow::Result<()> {
    let mut config = SimulationConfig::from_file(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(index) = &args.index {
        config = apply_variant(&config, &format!("index={index}"))?;
    }
    // One-shot: rank the supplied catalog at epoch zero, no stepping.
    config.simulation.horizon_years = 0.0;
    let is_tle = args
        .catalog
        .extension()
        .and_then(|e| e.to_str())
        .map_or(true, |e| !e.eq_ignore_ascii_case("csv"));
    if is_tle {
        config.population.source = engine::config::PopulationSource::Tle;
        config.population.tle_path = Some(args.catalog.clone());
    } else {
        config.population.source = engine::config::PopulationSource::Snapshot;
        config.population.snapshot_path = Some(args.catalog.clone());
    }

    let result = engine::run(&config, 0)?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("ranking.csv");
    std::fs::write(&path, ranking_csv(&result.final_ranking))?;
    println!(
        "ranked {} objects with {} → {}",
        result.final_ranking.entries.len(),
        config.risk.index,
        path.display()
    );
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> anyhow::Result<()> {
    let runs = read_campaign_runs(&args.runs)
        .with_context(|| format!("reading runs under {}", args.runs.display()))?;
    std::fs::create_dir_all(&args.out)?;

    let counts: Vec<&BTreeMap<u64, u32>> = runs.iter().map(|r| &r.collision_counts).collect();
    let cohort = ground_truth_cohort(counts, args.threshold);

    // Cohort table with pooled max counts.
    let mut pooled: BTreeMap<u64, u32> = BTreeMap::new();
    for run in &runs {
        for (&id, &n) in &run.collision_counts {
            if cohort.members.contains(&id) {
                let e = pooled.entry(id).or_insert(0);
                *e = (*e).max(n);
            }
        }
    }
    let mut cohort_csv = String::from("id,max_collisions\n");
    for (id, n) in &pooled {
        cohort_csv.push_str(&format!("{id},{n}\n"));
    }
    std::fs::write(args.out.join("cohort.csv"), cohort_csv)?;
    if cohort.members.is_empty() {
        bail!(
            "no object reached {} collisions in any run; lower --threshold",
            args.threshold
        );
    }

    // Identification rate per run, plus the mean.
    let mut ident_csv = String::from("seed,rate,hits,cohort_size,top_n,config_digest\n");
    let mut mean_rate = 0.0;
    for run in &runs {
        let report = identification_rate(&run.final_ranking, &cohort, args.top_fraction)?;
        ident_csv.push_str(&format!(
            "{},{:.6},{},{},{},{}\n",
            run.manifest.seed,
            report.rate,
            report.hits,
            report.cohort_size,
            report.top_n,
            run.manifest.config_digest
        ));
        mean_rate += report.rate;
    }
    mean_rate /= runs.len() as f64;
    ident_csv.push_str(&format!("mean,{mean_rate:.6},,,,\n"));
    std::fs::write(args.out.join("identification.csv"), ident_csv)?;

    // Optional paired comparison against a second campaign.
    if let Some(other_dir) = &args.compare {
        let others = read_campaign_runs(other_dir)?;
        let by_seed: BTreeMap<u64, &output::PersistedRun> =
            others.iter().map(|r| (r.manifest.seed, r)).collect();
        let mut cmp_csv = String::from("seed,id,pct_a,pct_b\n");
        let mut better = 0usize;
        let mut total = 0usize;
        for run in &runs {
            let Some(other) = by_seed.get(&run.manifest.seed) else { continue };
            let cmp = ranking_comparison(&run.final_ranking, &other.final_ranking, &cohort)?;
            for (id, pa, pb) in &cmp.points {
                cmp_csv.push_str(&format!("{},{},{:.6},{:.6}\n", run.manifest.seed, id, pa, pb));
                if pa < pb {
                    better += 1;
                }
                total += 1;
            }
        }
        cmp_csv.push_str(&format!(
            "fraction_first_better,,{:.6},\n",
            if total == 0 { 0.0 } else { better as f64 / total as f64 }
        ));
        std::fs::write(args.out.join("comparison.csv"), cmp_csv)?;
    }

    println!(
        "cohort of {} objects at ≥{} collisions; mean identification rate {:.3} at top {:.2}%",
        cohort.members.len(),
        args.threshold,
        mean_rate,
        args.top_fraction * 100.0
    );
    Ok(())
}

fn cmd_suite(args: &SuiteArgs) -> anyhow::Result<()> {
    let base = SimulationConfig::from_file(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    let seeds = parse_seeds(&args.seeds)?;
    if args.variants.is_empty() {
        bail!("give at least one --variant name:delta");
    }
    let mut variants = Vec::new();
    for spec in &args.variants {
        let (name, delta) = spec.split_once(':').unwrap_or((spec.as_str(), ""));
        let config = apply_variant(&base, delta)?;
        variants.push((name.to_string(), config));
    }
    let report = reporting::experiment_suite(&variants, &seeds, args.baseline.as_deref())?;
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(args.out.join("suite.csv"), report.to_csv())?;
    println!("{}", report.to_csv().trim_end());
    Ok(())
}

fn cmd_emit_plots(args: &EmitPlotsArgs) -> anyhow::Result<()> {
    if args.runs.is_empty() {
        bail!("give at least one --runs directory");
    }
    std::fs::create_dir_all(&args.out)?;
    let mut summary = String::from("label,mean_final_population,runs\n");
    for dir in &args.runs {
        let label = dir
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or("campaign")
            .to_string();
        let runs = read_campaign_runs(dir)?;
        let series: Vec<&[engine::PopulationSample]> =
            runs.iter().map(|r| r.series.as_slice()).collect();
        let mean = reporting::mean_population_series(&series);
        let mut csv = String::from("t_days,mean_total\n");
        for (t, v) in &mean {
            csv.push_str(&format!("{t},{v:.3}\n"));
        }
        std::fs::write(args.out.join(format!("population_{label}.csv")), csv)?;
        let mean_final = runs.iter().map(|r| r.manifest.final_population as f64).sum::<f64>()
            / runs.len() as f64;
        summary.push_str(&format!("{label},{mean_final:.3},{}\n", runs.len()));
    }
    std::fs::write(args.out.join("final_population.csv"), summary)?;
    println!("plot data written to {}", args.out.display());
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Campaign(args) => cmd_campaign(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Suite(args) => cmd_suite(args),
        Command::EmitPlots(args) => cmd_emit_plots(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
