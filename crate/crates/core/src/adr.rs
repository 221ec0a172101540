//! Removal policy engine: random-k and top-k-by-index selection on a
//! configurable campaign cadence.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, ObjectClass};
use crate::constants::DAYS_PER_YEAR;
use crate::error::{Error, Result};
use crate::risk::{IndexKind, RankEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    None,
    RandomK,
    TopKByIndex,
}

/// Removal policy. Eligibility defaults to every non-active class: ADR
/// services derelict objects, not operating payloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RemovalPolicy {
    pub kind: PolicyKind,
    /// Objects removed per campaign.
    pub k: u32,
    pub cadence_years: f64,
    pub index_kind: IndexKind,
    pub eligible: Vec<ObjectClass>,
}

impl Default for RemovalPolicy {
    fn default() -> Self {
        RemovalPolicy {
            kind: PolicyKind::None,
            k: 0,
            cadence_years: 1.0,
            index_kind: IndexKind::Mitri,
            eligible: vec![
                ObjectClass::DerelictPayload,
                ObjectClass::RocketBody,
                ObjectClass::Debris,
            ],
        }
    }
}

impl RemovalPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.cadence_years > 0.0) {
            return Err(Error::Config("removal cadence must be positive".into()));
        }
        if self.kind != PolicyKind::None && self.eligible.is_empty() {
            return Err(Error::Config("removal policy needs at least one eligible class".into()));
        }
        Ok(())
    }

    pub fn is_eligible(&self, class: ObjectClass) -> bool {
        self.eligible.contains(&class)
    }
}

/// Whether a campaign boundary was crossed in (prev_t, t].
///
/// Campaigns fire at the first timestep at or after each integer multiple
/// of the cadence.
pub fn removal_due(t_days: f64, prev_t_days: f64, policy: &RemovalPolicy) -> bool {
    if policy.kind == PolicyKind::None || policy.k == 0 {
        return false;
    }
    let period = policy.cadence_years * DAYS_PER_YEAR;
    let crossed = (t_days / period).floor() as i64;
    let prev = (prev_t_days / period).floor() as i64;
    crossed > prev && crossed >= 1
}

/// Select this campaign's removal targets.
///
/// RandomK draws k eligible objects without replacement; TopKByIndex takes
/// the k highest-ranked eligible objects from the current ranking. Fewer
/// than k eligible objects selects them all.
pub fn select_removals(
    catalog: &Catalog,
    ranking: Option<&[RankEntry]>,
    policy: &RemovalPolicy,
    rng: &mut impl Rng,
) -> Result<Vec<u64>> {
    let k = policy.k as usize;
    match policy.kind {
        PolicyKind::None => Ok(Vec::new()),
        PolicyKind::RandomK => {
            let eligible: Vec<u64> = catalog
                .iter()
                .filter(|o| policy.is_eligible(o.object_class))
                .map(|o| o.id)
                .collect();
            if eligible.len() <= k {
                return Ok(eligible);
            }
            let picked = rand::seq::index::sample(rng, eligible.len(), k);
            let mut ids: Vec<u64> = picked.iter().map(|i| eligible[i]).collect();
            ids.sort_unstable();
            Ok(ids)
        }
        PolicyKind::TopKByIndex => {
            let ranking = ranking.ok_or_else(|| {
                Error::Contract("top-k selection requires a ranking computed this epoch".into())
            })?;
            let mut ids = Vec::with_capacity(k);
            for entry in ranking {
                if ids.len() == k {
                    break;
                }
                let Some(obj) = catalog.get(entry.id) else { continue };
                if policy.is_eligible(obj.object_class) {
                    ids.push(entry.id);
                }
            }
            Ok(ids)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{OrbitalState, PhysicalProperties, ResidentSpaceObject};
    use crate::constants::EARTH_RADIUS_KM;
    use crate::risk::RiskRecord;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn policy(kind: PolicyKind, k: u32, cadence: f64) -> RemovalPolicy {
        RemovalPolicy { kind, k, cadence_years: cadence, ..RemovalPolicy::default() }
    }

    #[test]
    fn cadence_boundaries() {
        let annual = policy(PolicyKind::RandomK, 1, 1.0);
        assert!(removal_due(365.25, 360.25, &annual));
        assert!(!removal_due(360.25, 355.25, &annual));

        let five = policy(PolicyKind::RandomK, 1, 5.0);
        assert!(!removal_due(365.25, 360.25, &five));
        assert!(removal_due(5.0 * 365.25 + 2.0, 5.0 * 365.25 - 3.0, &five));

        // 200-year run at 10-year cadence → exactly 20 campaign epochs.
        let ten = policy(PolicyKind::RandomK, 1, 10.0);
        let dt = 5.0;
        let steps = (200.0 * 365.25 / dt) as usize;
        let mut campaigns = 0;
        for step in 1..=steps {
            let t = step as f64 * dt;
            if removal_due(t, t - dt, &ten) {
                campaigns += 1;
            }
        }
        assert_eq!(campaigns, 20);

        // Disabled policies never fire.
        assert!(!removal_due(365.25, 0.0, &policy(PolicyKind::None, 5, 1.0)));
        assert!(!removal_due(365.25, 0.0, &policy(PolicyKind::RandomK, 0, 1.0)));
    }

    fn mk_object(id: u64, class: ObjectClass) -> ResidentSpaceObject {
        ResidentSpaceObject {
            id,
            state: OrbitalState {
                semi_major_axis: EARTH_RADIUS_KM + 800.0,
                eccentricity: 0.0,
                inclination: 1.0,
                raan: 0.0,
                arg_perigee: 0.0,
                mean_anomaly: 0.0,
                epoch: 0.0,
            },
            props: PhysicalProperties::from_mass_radius(100.0, 1.0),
            object_class: class,
            mission_years_remaining: (class == ObjectClass::ActivePayload).then_some(5.0),
            constellation_flag: false,
        }
    }

    fn mixed_catalog(n: u64) -> Catalog {
        Catalog::from_objects(
            (1..=n)
                .map(|i| {
                    let class = if i % 10 == 0 {
                        ObjectClass::ActivePayload
                    } else if i % 3 == 0 {
                        ObjectClass::RocketBody
                    } else {
                        ObjectClass::Debris
                    };
                    mk_object(i, class)
                })
                .collect(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn random_k_is_deterministic_and_respects_eligibility() {
        let catalog = mixed_catalog(100);
        let p = policy(PolicyKind::RandomK, 5, 1.0);
        let a = select_removals(&catalog, None, &p, &mut ChaCha12Rng::seed_from_u64(4)).unwrap();
        let b = select_removals(&catalog, None, &p, &mut ChaCha12Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        for id in &a {
            assert_ne!(catalog.get(*id).unwrap().object_class, ObjectClass::ActivePayload);
        }

        // k = 0 → empty.
        let none =
            select_removals(&catalog, None, &policy(PolicyKind::RandomK, 0, 1.0), &mut ChaCha12Rng::seed_from_u64(4))
                .unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn top_k_matches_brute_force() {
        let catalog = mixed_catalog(60);
        // Synthetic ranking: index value = id as f64, descending order.
        let mut records: Vec<RiskRecord> = catalog
            .iter()
            .map(|o| {
                let mut r = RiskRecord::new(o.id);
                r.index_value = o.id as f64;
                r
            })
            .collect();
        records.sort_by_key(|r| r.id);
        let norms = crate::risk::Normalizations {
            m0_kg: 1.0,
            rho_b0: 1.0,
            l0_years: 1.0,
            r0: 1.0,
            d0: 1.0,
            p0: 1.0,
            k_inclination: 0.6,
        };
        let ranking = crate::risk::rank(&records, &norms);

        let p = RemovalPolicy {
            kind: PolicyKind::TopKByIndex,
            k: 4,
            cadence_years: 1.0,
            ..RemovalPolicy::default()
        };
        let ids =
            select_removals(&catalog, Some(&ranking), &p, &mut ChaCha12Rng::seed_from_u64(0))
                .unwrap();

        // Brute force: highest ids among eligible classes.
        let mut eligible: Vec<u64> = catalog
            .iter()
            .filter(|o| p.is_eligible(o.object_class))
            .map(|o| o.id)
            .collect();
        eligible.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(ids, eligible[..4].to_vec());

        // k = 1 → the single maximum-index eligible object.
        let one = RemovalPolicy { k: 1, ..p.clone() };
        let ids =
            select_removals(&catalog, Some(&ranking), &one, &mut ChaCha12Rng::seed_from_u64(0))
                .unwrap();
        assert_eq!(ids, vec![eligible[0]]);
    }

    #[test]
    fn fewer_eligible_than_k_selects_all() {
        let catalog = Catalog::from_objects(
            vec![mk_object(1, ObjectClass::Debris), mk_object(2, ObjectClass::ActivePayload)],
            0.0,
        )
        .unwrap();
        let p = policy(PolicyKind::RandomK, 10, 1.0);
        let ids = select_removals(&catalog, None, &p, &mut ChaCha12Rng::seed_from_u64(0)).unwrap();
        assert_eq!(ids, vec![1]);
    }
}
