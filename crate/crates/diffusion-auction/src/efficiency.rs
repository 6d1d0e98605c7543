//! Efficiency-loss accounting for the distance-based mechanism.
//!
//! Loss is measured on reported values: the best feasible surplus minus the
//! surplus the mechanism achieved, normalized by `k * value_cap`. The
//! worst-case estimate combines seeded random profiles with the two
//! adversarial families that realize the `max(k*v_h, k*(cap - v_h))` loss
//! bound, so at `v_h = cap/2` the estimate is exactly one half.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{gen_random_instance, GeneratorParams};
use crate::mechanisms::{run_distance_based, Outcome, ReserveConfig};
use crate::network::{
    connected_and_distances, AuctionInstance, BuyerType, Money, ReportProfile,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EfficiencyError {
    #[error("efficiency records need a value cap on the instance")]
    MissingValueCap,
}

/// Loss bookkeeping for one profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EfficiencyRecord {
    pub optimal_surplus: Money,
    pub achieved_surplus: Money,
    pub loss: Money,
    /// `loss / (k * value_cap)`, exact.
    pub normalized_loss: Ratio<u64>,
}

/// The best feasible reported surplus: the sum of the `min(k, connected)`
/// highest reported values among connected buyers.
pub fn optimal_surplus(instance: &AuctionInstance, report: &ReportProfile, k: u32) -> Money {
    let view = connected_and_distances(instance, report);
    let mut values: Vec<Money> = view.connected().iter().map(|&b| report.value(b)).collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.into_iter().take(k as usize).sum()
}

/// Sum of reported values over winners.
pub fn reported_surplus(report: &ReportProfile, outcome: &Outcome) -> Money {
    outcome.winners().into_iter().map(|b| report.value(b)).sum()
}

/// Run the distance-based mechanism (with optional reserve) on one profile
/// and record the loss. Requires the instance to carry a value cap.
pub fn efficiency_record(
    instance: &AuctionInstance,
    report: &ReportProfile,
    reserve: Option<Money>,
) -> Result<EfficiencyRecord, EfficiencyError> {
    let cap = instance.value_cap().ok_or(EfficiencyError::MissingValueCap)?;
    let cfg = reserve.map(ReserveConfig::new);
    let outcome = run_distance_based(instance, report, cfg.as_ref());
    let optimal = optimal_surplus(instance, report, instance.units());
    let achieved = reported_surplus(report, &outcome);
    let loss = optimal - achieved;
    let denominator = u64::from(instance.units()) * cap;
    let normalized_loss = if denominator == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(loss, denominator)
    };
    Ok(EfficiencyRecord {
        optimal_surplus: optimal,
        achieved_surplus: achieved,
        loss,
        normalized_loss,
    })
}

/// A path of `2k` buyers hanging off the seller: the first `k` at
/// `front_value`, the far `k` at the cap. The mechanism sells to the near
/// half, so with `front_value = v_h` the loss is exactly `k * (cap - v_h)`.
pub fn path_family(k: u32, value_cap: Money, front_value: Money) -> AuctionInstance {
    let n = 2 * k as usize;
    let buyers: Vec<BuyerType> = (0..n)
        .map(|i| {
            let value = if i < k as usize { front_value } else { value_cap };
            let followers: Vec<u32> = if i + 1 < n { vec![i as u32 + 1] } else { vec![] };
            BuyerType::new(value, followers)
        })
        .collect();
    AuctionInstance::new(k, [0], buyers, Some(value_cap)).expect("path family is valid")
}

/// `k` direct buyers all one unit below the reserve: nothing sells, the
/// loss is `k * (v_h - 1)`. `None` when `v_h` is zero (no value sits below
/// a zero reserve).
pub fn below_reserve_family(k: u32, value_cap: Money, reserve: Money) -> Option<AuctionInstance> {
    if reserve == 0 || reserve > value_cap {
        return None;
    }
    let buyers: Vec<BuyerType> = (0..k).map(|_| BuyerType::new(reserve - 1, [])).collect();
    Some(
        AuctionInstance::new(k, 0..k, buyers, Some(value_cap))
            .expect("below-reserve family is valid"),
    )
}

/// Where a worst-case loss estimate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossSource {
    /// A user-supplied instance file.
    Instance,
    Seeded { seed: u64 },
    PathFamily,
    BelowReserveFamily,
}

impl std::fmt::Display for LossSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LossSource::Instance => write!(f, "instance"),
            LossSource::Seeded { seed } => write!(f, "seed {seed}"),
            LossSource::PathFamily => write!(f, "path family"),
            LossSource::BelowReserveFamily => write!(f, "below-reserve family"),
        }
    }
}

/// Sweep parameters for the seeded half of the worst-case estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub budget: u64,
    pub base_seed: u64,
    pub n: usize,
    pub k: u32,
    pub value_cap: Money,
}

/// One row of the efficiency sweep, ready for CSV emission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossRow {
    pub source: LossSource,
    pub n: usize,
    pub k: u32,
    pub reserve: Money,
    pub record: EfficiencyRecord,
}

/// Evaluate the seeded family plus both adversarial families at reserve
/// `v_h`, returning every row. Truthful reports throughout.
pub fn loss_sweep(family: &FamilyParams, reserve: Money) -> Vec<LossRow> {
    let mut rows = Vec::with_capacity(family.budget as usize + 2);
    for offset in 0..family.budget {
        let params = GeneratorParams {
            n: family.n,
            k: family.k,
            max_value: family.value_cap,
            max_followers: family.n.saturating_sub(1),
            edge_probability: [0.0, 0.15, 0.3, 0.5, 0.75][(offset % 5) as usize],
            seed: family.base_seed + offset,
        };
        let instance = gen_random_instance(&params);
        let report = ReportProfile::truthful(&instance);
        let record = efficiency_record(&instance, &report, Some(reserve))
            .expect("generated instances carry a cap");
        rows.push(LossRow {
            source: LossSource::Seeded { seed: params.seed },
            n: instance.buyer_count(),
            k: instance.units(),
            reserve,
            record,
        });
    }

    let path = path_family(family.k, family.value_cap, reserve.min(family.value_cap));
    let report = ReportProfile::truthful(&path);
    rows.push(LossRow {
        source: LossSource::PathFamily,
        n: path.buyer_count(),
        k: path.units(),
        reserve,
        record: efficiency_record(&path, &report, Some(reserve)).expect("path family has a cap"),
    });

    if let Some(below) = below_reserve_family(family.k, family.value_cap, reserve) {
        let report = ReportProfile::truthful(&below);
        rows.push(LossRow {
            source: LossSource::BelowReserveFamily,
            n: below.buyer_count(),
            k: below.units(),
            reserve,
            record: efficiency_record(&below, &report, Some(reserve))
                .expect("below-reserve family has a cap"),
        });
    }
    rows
}

/// Worst normalized loss over the sweep: a lower bound on the true
/// worst case, exact at the reserves where the adversarial families are
/// extremal (0, cap/2, cap).
pub fn alpha_estimate(family: &FamilyParams, reserve: Money) -> (Ratio<u64>, LossSource) {
    loss_sweep(family, reserve)
        .into_iter()
        .map(|row| (row.record.normalized_loss, row.source))
        .max_by(|a, b| a.0.cmp(&b.0))
        .expect("sweep always contains the path family")
}
