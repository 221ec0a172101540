// scratch calibration harness (not part of the deliverable)
use std::collections::BTreeMap;

use debrisim::adr::PolicyKind;
use debrisim::engine::{campaign, CampaignResult, SimulationConfig};
use debrisim::reporting::{apply_variant, ground_truth_cohort, identification_rate};

#[path = "../tests/common/mod.rs"]
mod common;

fn ensemble_stats(name: &str, config: &SimulationConfig, seeds: &[u64]) -> CampaignResult {
    let result = campaign(config, seeds).unwrap();
    let finals: Vec<usize> = result.runs.iter().map(|r| r.final_population).collect();
    println!(
        "{name}: mean_final = {:.1} (std {:.1}) wall = {:.1}s finals = {:?}",
        result.mean_final_population, result.std_final_population, result.mean_wall_time_s, finals
    );
    result
}

fn main() {
    let seeds: Vec<u64> = (1..=6).collect();
    let base = common::desk_config();

    let mitri = ensemble_stats("mitri no-adr", &base, &seeds);

    let counts: Vec<&BTreeMap<u64, u32>> =
        mitri.runs.iter().map(|r| &r.collision_counts).collect();
    let cohort = ground_truth_cohort(counts, 5);
    println!("cohort ≥5: {} members", cohort.members.len());
    let per_run: Vec<usize> = mitri
        .runs
        .iter()
        .map(|r| r.collision_counts.values().filter(|&&c| c >= 5).count())
        .collect();
    println!("per-run ≥5 counts: {per_run:?}");

    // Where do cohort members land in the final MITRI ranking of run 1?
    let run0 = &mitri.runs[0];
    let positions: Vec<(u64, usize)> = run0
        .final_ranking
        .entries
        .iter()
        .filter(|e| cohort.members.contains(&e.id))
        .map(|e| (e.id, e.rank))
        .collect();
    println!("run1 cohort ranks (MITRI): {positions:?}");
    println!("run1 top 15 (id, idx, mass, ER, ED, EP):");
    for e in run0.final_ranking.entries.iter().take(15) {
        println!(
            "  #{:<4} id {:<6} idx {:9.2e} m {:9.2e} R {:9.2e} D {:9.2e} P {:9.2e}",
            e.rank, e.id, e.index_value, e.mass_term, e.exp_r, e.exp_d, e.exp_p
        );
    }

    // Identification across intervals.
    let fmm = ensemble_stats("fmm no-adr", &apply_variant(&base, "index=fmm").unwrap(), &seeds);
    for (label, runs) in [("mitri-static", &mitri), ("fmm-static", &fmm)] {
        let mut rates = Vec::new();
        for run in &runs.runs {
            let rep = identification_rate(&run.final_ranking, &cohort, 0.005).unwrap();
            rates.push((rep.rate * 1000.0).round() / 1000.0);
        }
        let mean: f64 = rates.iter().sum::<f64>() / rates.len().max(1) as f64;
        println!("{label} identification: {rates:?} mean {mean:.3}");
    }
    for interval in ["182.625", "91.3125", "30.4375"] {
        for kind in ["mitri", "fmm"] {
            let cfg =
                apply_variant(&base, &format!("index={kind},density_interval_days={interval}"))
                    .unwrap();
            let result = campaign(&cfg, &seeds).unwrap();
            let mean: f64 = result
                .runs
                .iter()
                .map(|r| identification_rate(&r.final_ranking, &cohort, 0.005).unwrap().rate)
                .sum::<f64>()
                / result.runs.len() as f64;
            println!("{kind} @{interval}d identification mean {mean:.3} (wall {:.1}s)", result.mean_wall_time_s);
        }
    }

    // ADR arms.
    let mut random5 = base.clone();
    random5.removal.kind = PolicyKind::RandomK;
    random5.removal.k = 5;
    let random5 = ensemble_stats("random k=5", &random5, &seeds);
    println!(
        "random-vs-baseline deviation: {:.2}%",
        (mitri.mean_final_population - random5.mean_final_population).abs()
            / mitri.mean_final_population
            * 100.0
    );

    let mut topk1 = base.clone();
    topk1.removal.kind = PolicyKind::TopKByIndex;
    topk1.removal.k = 1;
    ensemble_stats("topk mitri k=1", &topk1, &seeds);

    let fmm_k5 = apply_variant(&base, "index=fmm,policy=top_k,k=5").unwrap();
    ensemble_stats("topk fmm k5 mass=1.75", &fmm_k5, &seeds);
    ensemble_stats(
        "topk fmm k5 mass=1",
        &apply_variant(&fmm_k5, "mass_exponent=1").unwrap(),
        &seeds,
    );
    ensemble_stats(
        "topk fmm k5 mass=0",
        &apply_variant(&fmm_k5, "mass_exponent=0").unwrap(),
        &seeds,
    );

    // Cadence (MITRI k=3) and filter arms.
    for cadence in ["1", "5", "10"] {
        let cfg =
            apply_variant(&base, &format!("policy=top_k,k=3,cadence_years={cadence}")).unwrap();
        ensemble_stats(&format!("mitri k3 cadence {cadence}y"), &cfg, &seeds);
    }
    let f10 = ensemble_stats("fmm k5 filter 10kg", &fmm_k5, &seeds);
    let f50 = ensemble_stats(
        "fmm k5 filter 50kg",
        &apply_variant(&fmm_k5, "filter_min_mass_kg=50").unwrap(),
        &seeds,
    );
    println!(
        "filter equality: {}",
        if f10.runs.iter().map(|r| r.final_population).collect::<Vec<_>>()
            == f50.runs.iter().map(|r| r.final_population).collect::<Vec<_>>()
        {
            "bitwise-identical finals"
        } else {
            "DIFFERENT finals"
        }
    );
}
