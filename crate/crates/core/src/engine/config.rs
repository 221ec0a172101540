//! Simulation configuration: a TOML key-value tree covering every knob.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::synth::PopulationSpec;
use crate::catalog::ShellGrid;
use crate::error::{Error, Result};
use crate::events::EventConfig;
use crate::fragmentation::DebrisFilter;
use crate::risk::{EpsilonConfig, EpsilonMode, IndexKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub horizon_years: f64,
    pub timestep_days: f64,
    /// Population series sampling interval, in steps.
    pub record_interval_steps: usize,
    /// Enable intra-run parallelism (results are identical either way).
    pub parallel: bool,
    /// Abort threshold against runaway cascades.
    pub max_objects: usize,
    /// Ranking refresh cadence (days); removals also force a refresh.
    pub ranking_interval_days: f64,
    /// Keep every ranking snapshot instead of only the final one.
    pub keep_all_rankings: bool,
    /// Trackable-fragment length threshold fed to the breakup model (m).
    pub fragment_min_length_m: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        SimulationSection {
            horizon_years: 200.0,
            timestep_days: 5.0,
            record_interval_steps: 10,
            parallel: true,
            max_objects: 500_000,
            ranking_interval_days: 365.25,
            keep_all_rankings: false,
            fragment_min_length_m: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationSource {
    Synthetic,
    Tle,
    Snapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSection {
    pub source: PopulationSource,
    #[serde(default)]
    pub tle_path: Option<PathBuf>,
    #[serde(default)]
    pub sidecar_path: Option<PathBuf>,
    #[serde(default)]
    pub snapshot_path: Option<PathBuf>,
    /// Seed of the synthetic population; fixed across runs so every seed
    /// of a campaign starts from the same catalog.
    #[serde(default)]
    pub synth_seed: u64,
    #[serde(default)]
    pub classes: Vec<crate::catalog::synth::ClassSpec>,
}

impl Default for PopulationSection {
    fn default() -> Self {
        PopulationSection {
            source: PopulationSource::Synthetic,
            tle_path: None,
            sidecar_path: None,
            snapshot_path: None,
            synth_seed: 0,
            classes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtmosphereSection {
    /// External band table; the built-in table is used when absent.
    pub table_path: Option<PathBuf>,
    pub reentry_altitude_km: f64,
    pub lifetime_cap_years: f64,
}

impl Default for AtmosphereSection {
    fn default() -> Self {
        AtmosphereSection { table_path: None, reentry_altitude_km: 150.0, lifetime_cap_years: 1000.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CubeSection {
    pub edge_km: f64,
}

impl Default for CubeSection {
    fn default() -> Self {
        CubeSection { edge_km: 50.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RiskSection {
    pub index: IndexKind,
    pub mass_exponent: f64,
    /// Fictitious-collision debris accumulation; defaults to the index
    /// kind's convention (FMM on, MITRI/CSI off).
    pub fictitious: Option<bool>,
    /// Trackability filtering of fictitious debris; defaults likewise.
    pub filter_enabled: Option<bool>,
    pub filter_min_mass_kg: f64,
    pub filter_min_length_m: f64,
    pub epsilon_mode: EpsilonMode,
    pub eps_max: f64,
    /// Background-density refresh interval (days); absent or 0 = static.
    pub density_update_interval_days: Option<f64>,
    pub k_inclination: f64,
}

impl Default for RiskSection {
    fn default() -> Self {
        RiskSection {
            index: IndexKind::Mitri,
            mass_exponent: 1.75,
            fictitious: None,
            filter_enabled: None,
            filter_min_mass_kg: 10.0,
            filter_min_length_m: 0.1,
            epsilon_mode: EpsilonMode::Off,
            eps_max: 1.0,
            density_update_interval_days: None,
            k_inclination: crate::risk::DEFAULT_K_INCLINATION,
        }
    }
}

impl RiskSection {
    pub fn fictitious_enabled(&self) -> bool {
        self.fictitious.unwrap_or(self.index == IndexKind::Fmm)
    }

    pub fn filter_is_enabled(&self) -> bool {
        self.filter_enabled.unwrap_or(self.index == IndexKind::Fmm)
    }

    pub fn epsilon(&self) -> EpsilonConfig {
        EpsilonConfig { mode: self.epsilon_mode, eps_max: self.eps_max }
    }

    /// The filter applied to fictitious counts; with filtering disabled the
    /// plain trackable-length threshold applies.
    pub fn effective_filter(&self, fragment_min_length_m: f64) -> DebrisFilter {
        if self.filter_is_enabled() {
            DebrisFilter { min_mass_kg: self.filter_min_mass_kg, min_length_m: self.filter_min_length_m }
        } else {
            DebrisFilter { min_mass_kg: 0.0, min_length_m: fragment_min_length_m }
        }
    }

    pub fn density_interval(&self) -> Option<f64> {
        match self.density_update_interval_days {
            Some(d) if d > 0.0 => Some(d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub simulation: SimulationSection,
    pub population: PopulationSection,
    pub shells: ShellGrid,
    pub atmosphere: AtmosphereSection,
    pub cube: CubeSection,
    pub events: EventConfig,
    pub risk: RiskSection,
    pub removal: crate::adr::RemovalPolicy,
}

impl SimulationConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: SimulationConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialized config.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml().as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.simulation;
        if !(s.horizon_years >= 0.0) {
            return Err(Error::Config("horizon must be non-negative".into()));
        }
        if !(s.timestep_days > 0.0) {
            return Err(Error::Config("timestep must be positive".into()));
        }
        if s.record_interval_steps == 0 {
            return Err(Error::Config("record interval must be at least 1".into()));
        }
        if !(s.ranking_interval_days > 0.0) {
            return Err(Error::Config("ranking interval must be positive".into()));
        }
        if !(s.fragment_min_length_m > 0.0) {
            return Err(Error::Config("fragment length threshold must be positive".into()));
        }
        if !(self.cube.edge_km > 0.0) {
            return Err(Error::Config("cube edge must be positive".into()));
        }
        if !(self.atmosphere.reentry_altitude_km >= 0.0) {
            return Err(Error::Config("reentry altitude must be non-negative".into()));
        }
        if !(self.atmosphere.lifetime_cap_years > 0.0) {
            return Err(Error::Config("lifetime cap must be positive".into()));
        }
        if !(self.risk.mass_exponent >= 0.0) {
            return Err(Error::Config("mass exponent must be non-negative".into()));
        }
        if self.risk.filter_min_mass_kg < 0.0 || self.risk.filter_min_length_m < 0.0 {
            return Err(Error::Config("filter thresholds must be non-negative".into()));
        }
        self.shells.validate()?;
        self.events.validate()?;
        self.removal.validate()?;
        self.risk.epsilon().validate()?;

        match self.population.source {
            PopulationSource::Synthetic => {
                let spec = PopulationSpec { classes: self.population.classes.clone() };
                spec.validate()?;
            }
            PopulationSource::Tle => {
                if self.population.tle_path.is_none() {
                    return Err(Error::Config("tle source requires tle_path".into()));
                }
            }
            PopulationSource::Snapshot => {
                if self.population.snapshot_path.is_none() {
                    return Err(Error::Config("snapshot source requires snapshot_path".into()));
                }
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.simulation.horizon_years * crate::constants::DAYS_PER_YEAR
            / self.simulation.timestep_days)
            .floor() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_after_adding_population() {
        let mut config = SimulationConfig::default();
        config.population.classes = vec![crate::catalog::synth::ClassSpec {
            class: crate::catalog::ObjectClass::Debris,
            count: 10,
            altitude_km: crate::catalog::synth::Range { lo: 700.0, hi: 800.0 },
            eccentricity: crate::catalog::synth::Range { lo: 0.0, hi: 0.01 },
            inclination_rad: crate::catalog::synth::Range { lo: 0.5, hi: 1.5 },
            mass_kg: crate::catalog::synth::Range { lo: 1.0, hi: 5.0 },
            radius_m: crate::catalog::synth::Range { lo: 0.1, hi: 0.3 },
            bc_m2_per_kg: None,
            mission_years: None,
        }];
        config.validate().unwrap();
        assert_eq!(config.steps(), (200.0f64 * 365.25 / 5.0).floor() as usize);
    }

    #[test]
    fn toml_roundtrip_and_digest_stability() {
        let mut config = SimulationConfig::default();
        config.simulation.horizon_years = 50.0;
        config.population.classes = vec![crate::catalog::synth::ClassSpec {
            class: crate::catalog::ObjectClass::Debris,
            count: 10,
            altitude_km: crate::catalog::synth::Range { lo: 700.0, hi: 800.0 },
            eccentricity: crate::catalog::synth::Range { lo: 0.0, hi: 0.01 },
            inclination_rad: crate::catalog::synth::Range { lo: 0.5, hi: 1.5 },
            mass_kg: crate::catalog::synth::Range { lo: 1.0, hi: 5.0 },
            radius_m: crate::catalog::synth::Range { lo: 0.1, hi: 0.3 },
            bc_m2_per_kg: None,
            mission_years: None,
        }];
        let text = config.to_toml();
        let back = SimulationConfig::from_toml(&text).unwrap();
        assert_eq!(back, config);
        assert_eq!(back.digest(), config.digest());
        assert_ne!(
            SimulationConfig::default().digest(),
            config.digest(),
            "different configs must differ in digest"
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = "[simulation]\nhorizon_years = 1.0\nnot_a_field = 3\n";
        assert!(SimulationConfig::from_toml(text).is_err());
    }

    #[test]
    fn risk_defaults_follow_index_kind() {
        let mut risk = RiskSection::default();
        assert!(!risk.fictitious_enabled());
        risk.index = IndexKind::Fmm;
        assert!(risk.fictitious_enabled());
        assert!(risk.filter_is_enabled());
        risk.fictitious = Some(false);
        assert!(!risk.fictitious_enabled());
    }
}
