//! Criticality indices: static CSI, concurrent-analysis MITRI, and FMM
//! (fictitious collisions + debris filtering + dynamic background density).
//!
//! All three share the multiplicative structure
//!     (M/M₀)^x · ρ_B(h)·g(i)/ρ_B,0 · L/L₀ · E[R/R₀] · E[D/D₀] · E[P/P₀]
//! where the dynamic expectations are running smoothed averages
//! Eₙ = (Eₙ₋₁ + xₙ)/2. CSI keeps only the first three factors and is frozen
//! at birth. MITRI accumulates generated debris from triggered collision
//! events; FMM accumulates the filtered potential debris of every
//! conjunction pair, optionally scaled by an epsilon weight, and refreshes
//! the background density field at a configurable cadence.
//!
//! A dynamic term enters the product only after its observation stream has
//! produced a first nonzero value (E₁ = x₁); until then the term is the
//! neutral factor 1, so an index never collapses to zero merely because an
//! object has not yet been observed in any conjunction or event.

use serde::{Deserialize, Serialize};

use crate::catalog::ShellGrid;
use crate::conjunctions::ConjunctionPair;
use crate::error::{Error, Result};
use crate::fragmentation::{classify_collision, filtered_fragment_count, DebrisFilter};

/// Fixed slope of the sigmoid epsilon model.
pub const EPSILON_SIGMOID_SLOPE: f64 = 10.0;

/// Default inclination-weight constant: near-equatorial debris flux is
/// about 60% of polar flux.
pub const DEFAULT_K_INCLINATION: f64 = 0.6;

/// Floor applied to normalization constants so zero medians cannot poison
/// the index products.
pub const NORM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    Csi,
    Mitri,
    Fmm,
}

impl std::fmt::Display for IndexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IndexKind::Csi => "csi",
            IndexKind::Mitri => "mitri",
            IndexKind::Fmm => "fmm",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonMode {
    Off,
    /// Sigmoid transition plus sub-linear √P dampening.
    Sigmoid,
    /// First-order linear scaling, clamped to [0, 1].
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonConfig {
    pub mode: EpsilonMode,
    pub eps_max: f64,
}

impl Default for EpsilonConfig {
    fn default() -> Self {
        EpsilonConfig { mode: EpsilonMode::Off, eps_max: 1.0 }
    }
}

impl EpsilonConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mode == EpsilonMode::Sigmoid && !(self.eps_max > 0.0) {
            return Err(Error::Config("sigmoid epsilon requires eps_max > 0".into()));
        }
        Ok(())
    }
}

/// Normalization constants for the index terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizations {
    pub m0_kg: f64,
    pub rho_b0: f64,
    pub l0_years: f64,
    pub r0: f64,
    pub d0: f64,
    pub p0: f64,
    pub k_inclination: f64,
}

impl Normalizations {
    /// Apply the [`NORM_FLOOR`] to every constant.
    pub fn floored(mut self) -> Self {
        for v in [
            &mut self.m0_kg,
            &mut self.rho_b0,
            &mut self.l0_years,
            &mut self.r0,
            &mut self.d0,
            &mut self.p0,
        ] {
            if !(*v > NORM_FLOOR) {
                *v = NORM_FLOOR;
            }
        }
        self
    }
}

/// Per-shell background density ρ_B (objects/km³) with its refresh policy.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundDensityField {
    pub densities: Vec<f64>,
    pub last_update_days: f64,
    /// `None` means static: initialized once and never refreshed.
    pub update_interval_days: Option<f64>,
}

impl BackgroundDensityField {
    pub fn new_static(shells: usize) -> Self {
        BackgroundDensityField {
            densities: vec![0.0; shells],
            last_update_days: 0.0,
            update_interval_days: None,
        }
    }

    pub fn with_interval(shells: usize, interval_days: f64) -> Self {
        BackgroundDensityField {
            densities: vec![0.0; shells],
            last_update_days: 0.0,
            update_interval_days: Some(interval_days),
        }
    }

    /// Compute densities from shell counts unconditionally (initialization).
    pub fn initialize(&mut self, counts: &[usize], grid: &ShellGrid, now_days: f64) {
        self.densities =
            counts.iter().enumerate().map(|(s, &n)| n as f64 / grid.shell_volume_km3(s)).collect();
        self.last_update_days = now_days;
    }

    /// Density at a shell; 0 outside the grid.
    pub fn density_at_shell(&self, shell: Option<usize>) -> f64 {
        shell.and_then(|s| self.densities.get(s)).copied().unwrap_or(0.0)
    }

    /// Whether a refresh is due at `now_days`.
    pub fn refresh_due(&self, now_days: f64) -> bool {
        self.update_interval_days
            .map_or(false, |interval| now_days - self.last_update_days >= interval)
    }
}

/// Refresh the field from instantaneous shell counts if its interval is
/// due: ρ_B[s] = N[s]/V[s]. Static fields never refresh. Returns whether a
/// refresh happened.
pub fn refresh_background_density(
    field: &mut BackgroundDensityField,
    counts: &[usize],
    grid: &ShellGrid,
    now_days: f64,
) -> bool {
    let Some(interval) = field.update_interval_days else { return false };
    if now_days - field.last_update_days < interval {
        return false;
    }
    field.initialize(counts, grid, now_days);
    true
}

/// Inclination weight g(i) = (1 + k·(1 − cos i)/2)/(1 + k), increasing on
/// [0, π].
pub fn g_inclination(inclination_rad: f64, k: f64) -> f64 {
    (1.0 + k * (1.0 - inclination_rad.cos()) / 2.0) / (1.0 + k)
}

/// Running smoothed average Eₙ = (Eₙ₋₁ + xₙ)/2.
pub fn update_expectation(prev: f64, x: f64) -> f64 {
    (prev + x) / 2.0
}

/// Mean of an exponential fit to collision-probability samples: the MLE
/// rate is λ = 1/mean, so the fitted mean P = 1/λ is the sample mean.
pub fn exp_fit_mean(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("cannot fit an exponential to an empty sample".into()));
    }
    let mut sum = 0.0;
    for &s in samples {
        if s < 0.0 {
            return Err(Error::Domain(format!("negative probability sample {s}")));
        }
        sum += s;
    }
    Ok(sum / samples.len() as f64)
}

/// Sigmoid epsilon: 1/(1 + e^{10(rand − P)}) + (ε_max/√P_max)·√P, clamped
/// to [0, 1 + ε_max].
pub fn epsilon1(rand_draw: f64, p_coll: f64, eps_max: f64, p_max: f64) -> Result<f64> {
    if !(p_max > 0.0) {
        return Err(Error::Domain("epsilon1 requires p_max > 0".into()));
    }
    if !(0.0..=1.0).contains(&rand_draw) || !(0.0..=1.0).contains(&p_coll) {
        return Err(Error::Domain("epsilon1 inputs must lie in [0, 1]".into()));
    }
    let k = eps_max / p_max.sqrt();
    let sigmoid = 1.0 / (1.0 + (EPSILON_SIGMOID_SLOPE * (rand_draw - p_coll)).exp());
    Ok((sigmoid + k * p_coll.sqrt()).clamp(0.0, 1.0 + eps_max))
}

/// Linear epsilon: 1 − |rand − P|/rand, clamped to [0, 1].
pub fn epsilon2(rand_draw: f64, p_coll: f64) -> Result<f64> {
    if !(rand_draw > 0.0 && rand_draw <= 1.0) {
        return Err(Error::Domain("epsilon2 requires rand_draw in (0, 1]".into()));
    }
    if !(0.0..=1.0).contains(&p_coll) {
        return Err(Error::Domain("epsilon2 requires p_coll in [0, 1]".into()));
    }
    Ok((1.0 - (rand_draw - p_coll).abs() / rand_draw).clamp(0.0, 1.0))
}

/// Per-object debris increment from the fictitious-collision model.
///
/// Every conjunction pair contributes the filtered potential fragment count
/// of its hypothetical collision to both participants, scaled by the
/// configured epsilon weight. `masses` maps pair ids to masses (sorted by
/// id); `p_max` is the maximum pair probability observed this timestep.
pub fn fictitious_debris_increment(
    pairs: &[ConjunctionPair],
    masses: &[(u64, f64)],
    filter: &DebrisFilter,
    eps: &EpsilonConfig,
    p_max: f64,
) -> Result<Vec<(u64, f64)>> {
    let mass_of = |id: u64| -> Result<f64> {
        masses
            .binary_search_by_key(&id, |m| m.0)
            .map(|i| masses[i].1)
            .map_err(|_| Error::Contract(format!("no mass for id {id}")))
    };

    let mut increments = Vec::with_capacity(pairs.len() * 2);
    for pair in pairs {
        let m_i = mass_of(pair.id_i)?;
        let m_j = mass_of(pair.id_j)?;
        let (m_p, m_t) = if m_i <= m_j { (m_i, m_j) } else { (m_j, m_i) };
        let class = classify_collision(m_p, m_t, pair.rel_velocity_km_s)?;
        let count = filtered_fragment_count(&class, m_i, m_j, pair.rel_velocity_km_s, filter)?;

        let weight = match eps.mode {
            EpsilonMode::Off => 1.0,
            EpsilonMode::Sigmoid => {
                epsilon1(pair.rand_draw, pair.pair_probability, eps.eps_max, p_max)?
            }
            EpsilonMode::Linear => epsilon2(pair.rand_draw, pair.pair_probability)?,
        };

        let inc = count * weight;
        increments.push((pair.id_i, inc));
        increments.push((pair.id_j, inc));
    }
    Ok(increments)
}

/// Per-object static terms plus running smoothed expectations.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRecord {
    pub id: u64,
    /// (M/M₀)^exponent.
    pub mass_term: f64,
    /// ρ_B(h)·g(i)/ρ_B,0, refreshed at ranking epochs.
    pub density_term: f64,
    /// L/L₀ with L the residual lifetime at birth.
    pub lifetime_term: f64,
    /// Residual lifetime at birth (years), before normalization.
    pub lifetime_years: f64,
    /// Smoothed expectation numerators; `None` until first nonzero
    /// observation.
    pub exp_r: Option<f64>,
    pub exp_d: Option<f64>,
    pub exp_p: Option<f64>,
    /// First nonzero observations, kept for normalization medians.
    pub first_r: Option<f64>,
    pub first_d: Option<f64>,
    pub first_p: Option<f64>,
    /// Total debris attributed to this object (event or fictitious count).
    pub d_accum: f64,
    /// Sufficient statistics of the per-step collision-probability history;
    /// the exponential-fit mean equals p_sum/p_count.
    pub p_sum: f64,
    pub p_count: u64,
    /// CSI value frozen at birth.
    pub csi_frozen: f64,
    /// Ranking epoch this record was last refreshed at.
    pub last_refresh_epoch: u64,
    pub index_value: f64,
}

impl RiskRecord {
    pub fn new(id: u64) -> Self {
        RiskRecord {
            id,
            mass_term: 1.0,
            density_term: 1.0,
            lifetime_term: 1.0,
            lifetime_years: 0.0,
            exp_r: None,
            exp_d: None,
            exp_p: None,
            first_r: None,
            first_d: None,
            first_p: None,
            d_accum: 0.0,
            p_sum: 0.0,
            p_count: 0,
            csi_frozen: 0.0,
            last_refresh_epoch: 0,
            index_value: 0.0,
        }
    }

    /// Feed one observation into a smoothed-expectation slot. The stream
    /// initializes at its first nonzero observation; afterwards every
    /// observation (including zeros) updates it.
    pub fn observe(slot: &mut Option<f64>, first: &mut Option<f64>, x: f64) {
        match slot {
            Some(e) => *e = update_expectation(*e, x),
            None if x != 0.0 => {
                *slot = Some(x);
                *first = Some(x);
            }
            None => {}
        }
    }

    pub fn observe_r(&mut self, x: f64) {
        Self::observe(&mut self.exp_r, &mut self.first_r, x);
    }

    pub fn observe_d(&mut self, x: f64) {
        Self::observe(&mut self.exp_d, &mut self.first_d, x);
    }

    pub fn observe_p(&mut self, x: f64) {
        Self::observe(&mut self.exp_p, &mut self.first_p, x);
    }
}

/// CSI reference constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiReferences {
    /// Reference mass (kg).
    pub m0_kg: f64,
    /// Reference altitude for the lifetime ratio (km).
    pub h0_km: f64,
    /// Reference altitude whose density normalizes ρ_B (km).
    pub density_ref_altitude_km: f64,
}

impl Default for CsiReferences {
    fn default() -> Self {
        CsiReferences { m0_kg: 10_000.0, h0_km: 1000.0, density_ref_altitude_km: 770.0 }
    }
}

/// CSI = (M/M₀)·(ρ_B(h)/ρ_B,0)·(l(h)/l(h₀))·g(i), frozen at birth.
pub fn csi(
    mass_kg: f64,
    inclination_rad: f64,
    shell_density: f64,
    density_ref: f64,
    lifetime_ratio: f64,
    refs: &CsiReferences,
    k_inclination: f64,
) -> f64 {
    let rho0 = density_ref.max(NORM_FLOOR);
    (mass_kg / refs.m0_kg)
        * (shell_density / rho0)
        * lifetime_ratio
        * g_inclination(inclination_rad, k_inclination)
}

/// Compute the configured index value for a refreshed record.
pub fn compute_index(
    record: &RiskRecord,
    kind: IndexKind,
    norms: &Normalizations,
    current_epoch: u64,
) -> Result<f64> {
    if record.last_refresh_epoch != current_epoch {
        return Err(Error::StaleRecord {
            id: record.id,
            last: record.last_refresh_epoch,
            epoch: current_epoch,
        });
    }
    match kind {
        IndexKind::Csi => Ok(record.csi_frozen),
        IndexKind::Mitri | IndexKind::Fmm => {
            let r_term = record.exp_r.map_or(1.0, |e| e / norms.r0);
            let d_term = record.exp_d.map_or(1.0, |e| e / norms.d0);
            let p_term = record.exp_p.map_or(1.0, |e| e / norms.p0);
            Ok(record.mass_term
                * record.density_term
                * record.lifetime_term
                * r_term
                * d_term
                * p_term)
        }
    }
}

/// One row of a ranking snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    /// 1-based position in descending index order.
    pub rank: usize,
    pub id: u64,
    pub index_value: f64,
    /// rank / population size, in (0, 1].
    pub percentile: f64,
    pub mass_term: f64,
    pub density_term: f64,
    pub lifetime_term: f64,
    pub exp_r: f64,
    pub exp_d: f64,
    pub exp_p: f64,
}

/// Rank records by descending index value; ties break by ascending id.
pub fn rank(records: &[RiskRecord], norms: &Normalizations) -> Vec<RankEntry> {
    let n = records.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        records[b]
            .index_value
            .total_cmp(&records[a].index_value)
            .then_with(|| records[a].id.cmp(&records[b].id))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(pos, i)| {
            let r = &records[i];
            RankEntry {
                rank: pos + 1,
                id: r.id,
                index_value: r.index_value,
                percentile: (pos + 1) as f64 / n as f64,
                mass_term: r.mass_term,
                density_term: r.density_term,
                lifetime_term: r.lifetime_term,
                exp_r: r.exp_r.map_or(1.0, |e| e / norms.r0),
                exp_d: r.exp_d.map_or(1.0, |e| e / norms.d0),
                exp_p: r.exp_p.map_or(1.0, |e| e / norms.p0),
            }
        })
        .collect()
}

/// Median of a sample; averages the two middle values for even sizes.
/// Returns `None` for empty input.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn g_inclination_worked_values() {
        assert_relative_eq!(g_inclination(0.0, 0.6), 0.625, max_relative = 1e-12);
        assert_relative_eq!(
            g_inclination(std::f64::consts::PI, 0.6),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            g_inclination(std::f64::consts::FRAC_PI_2, 0.6),
            0.8125,
            max_relative = 1e-12
        );
        // Strictly increasing on [0, π].
        let mut prev = -1.0;
        for k in 0..=100 {
            let i = std::f64::consts::PI * k as f64 / 100.0;
            let g = g_inclination(i, 0.6);
            assert!(g > prev);
            prev = g;
        }
    }

    #[test]
    fn smoothed_average_sequence() {
        assert_eq!(update_expectation(2.0, 4.0), 3.0);
        // Stream [0, 1, 1, 1] with E₁ = x₁ → [0, 0.5, 0.75, 0.875].
        let mut e = 0.0;
        let mut seq = vec![e];
        for x in [1.0, 1.0, 1.0] {
            e = update_expectation(e, x);
            seq.push(e);
        }
        assert_eq!(seq, vec![0.0, 0.5, 0.75, 0.875]);
        // Constant stream is a fixed point.
        let mut e = 7.5;
        for _ in 0..10 {
            e = update_expectation(e, 7.5);
        }
        assert_eq!(e, 7.5);
    }

    #[test]
    fn smoothed_average_bounded_by_observations() {
        let xs = [0.3, 0.9, 0.1, 0.5, 0.7, 0.0, 0.2];
        let mut e = xs[0];
        let (mut lo, mut hi) = (xs[0], xs[0]);
        for &x in &xs[1..] {
            e = update_expectation(e, x);
            lo = lo.min(x);
            hi = hi.max(x);
            assert!(e >= lo && e <= hi, "E = {e} escaped [{lo}, {hi}]");
        }
    }

    #[test]
    fn exponential_fit_mean() {
        assert_relative_eq!(
            exp_fit_mean(&[0.1, 0.2, 0.3]).unwrap(),
            0.2,
            max_relative = 1e-12
        );
        assert_eq!(exp_fit_mean(&[0.42]).unwrap(), 0.42);
        assert_eq!(exp_fit_mean(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(exp_fit_mean(&[]).is_err());
        assert!(exp_fit_mean(&[-0.1]).is_err());
    }

    #[test]
    fn epsilon1_worked_values() {
        // rand = P with eps_max = 0 → sigmoid midpoint 0.5.
        assert_relative_eq!(epsilon1(0.3, 0.3, 0.0, 0.5).unwrap(), 0.5, max_relative = 1e-12);
        // P − rand = 1 → sigmoid ≈ 1/(1 + e^(−10)).
        let v = epsilon1(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(v, 1.0 / (1.0 + (-10f64).exp()), max_relative = 1e-12);
        // P = P_max, eps_max = 1, rand = P → 0.5 + 1.
        assert_relative_eq!(epsilon1(0.25, 0.25, 1.0, 0.25).unwrap(), 1.5, max_relative = 1e-12);
        assert!(epsilon1(0.5, 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn epsilon2_worked_values() {
        assert_relative_eq!(epsilon2(0.4, 0.4).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(epsilon2(0.5, 0.25).unwrap(), 0.5, max_relative = 1e-12);
        // Raw value −3 clamps to 0.
        assert_eq!(epsilon2(0.1, 0.5).unwrap(), 0.0);
        assert!(epsilon2(0.0, 0.5).is_err());
    }

    #[test]
    fn background_density_refresh() {
        let grid = ShellGrid::default();
        let shells = grid.shell_count();
        let mut counts = vec![0usize; shells];
        let shell_400 = crate::catalog::shell_index(425.0, &grid).unwrap();
        counts[shell_400] = 100;

        let mut field = BackgroundDensityField::with_interval(shells, 30.0);
        field.initialize(&counts, &grid, 0.0);
        let rho = field.densities[shell_400];
        assert_relative_eq!(
            rho,
            100.0 / grid.shell_volume_km3(shell_400),
            max_relative = 1e-12
        );

        // Doubling the count doubles the density.
        counts[shell_400] = 200;
        assert!(refresh_background_density(&mut field, &counts, &grid, 30.0));
        assert_relative_eq!(field.densities[shell_400], 2.0 * rho, max_relative = 1e-12);

        // Not yet due → unchanged.
        counts[shell_400] = 400;
        assert!(!refresh_background_density(&mut field, &counts, &grid, 45.0));
        assert_relative_eq!(field.densities[shell_400], 2.0 * rho, max_relative = 1e-12);

        // Static fields never refresh.
        let mut fixed = BackgroundDensityField::new_static(shells);
        fixed.initialize(&counts, &grid, 0.0);
        let before = fixed.densities.clone();
        assert!(!refresh_background_density(&mut fixed, &counts, &grid, 1e6));
        assert_eq!(fixed.densities, before);

        // Empty shells carry zero density.
        assert_eq!(field.densities[0], 0.0);
    }

    #[test]
    fn csi_reduces_to_inclination_weight() {
        let refs = CsiReferences::default();
        // All ratios 1, i = 0 → g(0) = 0.625.
        let v = csi(refs.m0_kg, 0.0, 1.0, 1.0, 1.0, &refs, 0.6);
        assert_relative_eq!(v, 0.625, max_relative = 1e-12);
        // Linear in mass.
        let v2 = csi(2.0 * refs.m0_kg, 0.0, 1.0, 1.0, 1.0, &refs, 0.6);
        assert_relative_eq!(v2, 2.0 * v, max_relative = 1e-12);
        // Empty shell → 0.
        assert_eq!(csi(refs.m0_kg, 0.0, 0.0, 1.0, 1.0, &refs, 0.6), 0.0);
    }

    fn unit_norms() -> Normalizations {
        Normalizations {
            m0_kg: 1.0,
            rho_b0: 1.0,
            l0_years: 1.0,
            r0: 1.0,
            d0: 1.0,
            p0: 1.0,
            k_inclination: 0.6,
        }
    }

    #[test]
    fn index_product_and_staleness() {
        let mut rec = RiskRecord::new(1);
        rec.mass_term = 1.0;
        rec.density_term = g_inclination(0.0, 0.6);
        rec.lifetime_term = 1.0;
        rec.exp_r = Some(1.0);
        rec.exp_d = Some(1.0);
        rec.exp_p = Some(1.0);
        rec.last_refresh_epoch = 3;

        let norms = unit_norms();
        let v = compute_index(&rec, IndexKind::Mitri, &norms, 3).unwrap();
        assert_relative_eq!(v, 0.625, max_relative = 1e-12);

        // Mass exponent 1.75 at M = 2·M₀ scales by 2^1.75.
        rec.mass_term = 2f64.powf(1.75);
        let v2 = compute_index(&rec, IndexKind::Mitri, &norms, 3).unwrap();
        assert_relative_eq!(v2 / v, 2f64.powf(1.75), max_relative = 1e-12);

        assert!(matches!(
            compute_index(&rec, IndexKind::Mitri, &norms, 4),
            Err(Error::StaleRecord { .. })
        ));
    }

    #[test]
    fn unobserved_terms_are_neutral() {
        let mut rec = RiskRecord::new(1);
        rec.mass_term = 2.0;
        rec.density_term = 3.0;
        rec.lifetime_term = 5.0;
        rec.last_refresh_epoch = 1;
        let v = compute_index(&rec, IndexKind::Mitri, &unit_norms(), 1).unwrap();
        assert_relative_eq!(v, 30.0, max_relative = 1e-12);
    }

    #[test]
    fn observation_streams_start_at_first_nonzero() {
        let mut rec = RiskRecord::new(1);
        rec.observe_r(0.0);
        rec.observe_r(0.0);
        assert_eq!(rec.exp_r, None);
        rec.observe_r(4.0);
        assert_eq!(rec.exp_r, Some(4.0));
        assert_eq!(rec.first_r, Some(4.0));
        rec.observe_r(0.0);
        assert_eq!(rec.exp_r, Some(2.0));
        assert_eq!(rec.first_r, Some(4.0));
    }

    #[test]
    fn ranking_order_and_percentiles() {
        let norms = unit_norms();
        let mut records: Vec<RiskRecord> = (1..=4)
            .map(|id| {
                let mut r = RiskRecord::new(id);
                r.index_value = match id {
                    1 => 2.0,
                    2 => 5.0,
                    3 => 5.0,
                    4 => 1.0,
                    _ => unreachable!(),
                };
                r
            })
            .collect();
        let ranked = rank(&records, &norms);
        let ids: Vec<u64> = ranked.iter().map(|e| e.id).collect();
        // Ties (2, 3) break by ascending id.
        assert_eq!(ids, vec![2, 3, 1, 4]);
        assert_relative_eq!(ranked[0].percentile, 0.25, max_relative = 1e-12);
        assert_relative_eq!(ranked[3].percentile, 1.0, max_relative = 1e-12);

        // All equal → ascending id order.
        for r in records.iter_mut() {
            r.index_value = 1.0;
        }
        let ranked = rank(&records, &norms);
        let ids: Vec<u64> = ranked.iter().map(|e| e.id).collect();
        assert_eq!(ids, vec![1, 2, 3, 4]);

        // Positive scaling leaves the order unchanged.
        for r in records.iter_mut() {
            r.index_value = r.id as f64 * 0.01;
        }
        let base: Vec<u64> = rank(&records, &norms).iter().map(|e| e.id).collect();
        for r in records.iter_mut() {
            r.index_value *= 1234.5;
        }
        let scaled: Vec<u64> = rank(&records, &norms).iter().map(|e| e.id).collect();
        assert_eq!(base, scaled);
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0]), Some(3.0));
        assert_eq!(median(&[1.0, 3.0]), Some(2.0));
        assert_eq!(median(&[5.0, 1.0, 3.0]), Some(3.0));
    }
}
