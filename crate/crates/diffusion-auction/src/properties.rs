//! Executable property checkers. Each check returns a [`PropertyReport`]:
//! either a pass, or a failure carrying a concrete [`Witness`] that can be
//! re-run to reproduce the violation.
//!
//! Deviation checks work on a finite grid of candidate reports. With exact
//! integer money a deviation can only change an outcome by crossing another
//! reported value, so the grid `{0, cap} ∪ {v ± 1 for every value v in
//! play}` covers one representative of every outcome-equivalence class.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mechanisms::{run_distance_based, Mechanism, Outcome};
use crate::network::{
    connected_and_distances, AuctionInstance, BuyerId, DiffusionCriticalTree, Money, Report,
    ReportProfile,
};

/// The checkable properties, named as the CLI spells them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    Feasibility,
    IndividualRationality,
    NonDeficit,
    NonWastefulness,
    BoundedEfficiency,
    StrategyProofness,
    HidingDominance,
    FollowerRevenueMonotonicity,
    DominationSurplus,
    DominationRevenue,
    /// Agreement between the partition oracle and the reduced
    /// optimal-diffusion decision; produced by the reduction verifier, not
    /// runnable against a single instance file.
    ReductionEquivalence,
}

impl Property {
    /// The properties checkable against one instance file.
    pub const ALL: [Property; 10] = [
        Property::Feasibility,
        Property::IndividualRationality,
        Property::NonDeficit,
        Property::NonWastefulness,
        Property::BoundedEfficiency,
        Property::StrategyProofness,
        Property::HidingDominance,
        Property::FollowerRevenueMonotonicity,
        Property::DominationSurplus,
        Property::DominationRevenue,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::Feasibility => "feasibility",
            Property::IndividualRationality => "individual-rationality",
            Property::NonDeficit => "non-deficit",
            Property::NonWastefulness => "non-wastefulness",
            Property::BoundedEfficiency => "bounded-efficiency",
            Property::StrategyProofness => "strategy-proofness",
            Property::HidingDominance => "hiding-dominance",
            Property::FollowerRevenueMonotonicity => "follower-revenue-monotonicity",
            Property::DominationSurplus => "domination-surplus",
            Property::DominationRevenue => "domination-revenue",
            Property::ReductionEquivalence => "reduction-equivalence",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .iter()
            .find(|p| p.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown property `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Surplus,
    Revenue,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Surplus => write!(f, "surplus"),
            Metric::Revenue => write!(f, "revenue"),
        }
    }
}

/// What went wrong, with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WitnessKind {
    /// Some buyer strictly gains by deviating from the truthful report.
    ProfitableDeviation {
        mechanism: Mechanism,
        buyer: BuyerId,
        baseline: Vec<Report>,
        deviated: Vec<Report>,
        baseline_utility: i64,
        deviated_utility: i64,
    },
    /// Hiding (truthful value, empty forwarding) is strictly beaten by some
    /// alternative report, so hiding is not a dominant strategy.
    HidingDominated {
        mechanism: Mechanism,
        buyer: BuyerId,
        hiding: Vec<Report>,
        alternative: Vec<Report>,
        hiding_utility: i64,
        alternative_utility: i64,
    },
    /// The supposedly dominant mechanism scored strictly below the other.
    DominationViolated {
        metric: Metric,
        dominant: Mechanism,
        dominated: Mechanism,
        dominant_value: Money,
        dominated_value: Money,
    },
    /// Informing a strict subset of the direct followers raises revenue.
    RevenueNonMonotone {
        subset: Vec<BuyerId>,
        restricted_revenue: Money,
        full_revenue: Money,
    },
    /// Too many units sold, or a unit sold to an unconnected buyer.
    Infeasible {
        winner_count: usize,
        units: u32,
        unconnected_winner: Option<BuyerId>,
    },
    /// A truthful winner paying more than her value.
    NegativeUtility {
        buyer: BuyerId,
        value: Money,
        payment: Money,
    },
    /// Fewer units sold than `min(k, connected)`.
    Wasteful { winner_count: usize, required: usize },
    /// A winner with `k` or more strictly better competitors outside her
    /// own subtree.
    AboveTopK {
        buyer: BuyerId,
        better_count: usize,
        units: u32,
    },
    /// The partition oracle and the reduced diffusion decision disagreed;
    /// the embedded instance is the gadget. Re-running the reduction
    /// verifier on `items` reproduces the pair.
    ReductionMismatch {
        items: Vec<u64>,
        partition_answer: bool,
        diffusion_answer: bool,
        best_revenue: Money,
        threshold: Money,
    },
}

/// A self-contained violation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub instance: AuctionInstance,
    pub kind: WitnessKind,
}

impl Witness {
    /// Re-run the stored violation. `Some(true)` means the recomputation
    /// reproduced the stored numbers exactly and they still violate the
    /// property; `None` means the witness is a direct evaluation with no
    /// mechanism run to repeat.
    pub fn replay(&self) -> Option<bool> {
        match &self.kind {
            WitnessKind::ProfitableDeviation {
                mechanism,
                buyer,
                baseline,
                deviated,
                baseline_utility,
                deviated_utility,
            } => Some(self.replay_pair(
                mechanism,
                *buyer,
                baseline,
                deviated,
                *baseline_utility,
                *deviated_utility,
            )),
            WitnessKind::HidingDominated {
                mechanism,
                buyer,
                hiding,
                alternative,
                hiding_utility,
                alternative_utility,
            } => Some(self.replay_pair(
                mechanism,
                *buyer,
                hiding,
                alternative,
                *hiding_utility,
                *alternative_utility,
            )),
            WitnessKind::DominationViolated {
                metric,
                dominant,
                dominated,
                dominant_value,
                dominated_value,
            } => {
                let report = ReportProfile::truthful(&self.instance);
                let lhs = metric_value(*metric, &self.instance, &dominant.run(&self.instance, &report));
                let rhs = metric_value(*metric, &self.instance, &dominated.run(&self.instance, &report));
                Some(lhs == *dominant_value && rhs == *dominated_value && lhs < rhs)
            }
            WitnessKind::RevenueNonMonotone {
                subset,
                restricted_revenue,
                full_revenue,
            } => {
                let full = truthful_distance_revenue(&self.instance);
                let set: BTreeSet<BuyerId> = subset.iter().copied().collect();
                let Ok(restricted) = self.instance.restrict_seller(&set) else {
                    return Some(false);
                };
                let rev = truthful_distance_revenue(&restricted);
                Some(full == *full_revenue && rev == *restricted_revenue && rev > full)
            }
            _ => None,
        }
    }

    fn replay_pair(
        &self,
        mechanism: &Mechanism,
        buyer: BuyerId,
        worse: &[Report],
        better: &[Report],
        worse_utility: i64,
        better_utility: i64,
    ) -> bool {
        let value = self.instance.true_value(buyer);
        let rerun = |reports: &[Report]| -> Option<i64> {
            let profile = ReportProfile::new(&self.instance, reports.to_vec()).ok()?;
            Some(mechanism.run(&self.instance, &profile).utility(buyer, value))
        };
        match (rerun(worse), rerun(better)) {
            (Some(w), Some(b)) => w == worse_utility && b == better_utility && b > w,
            _ => false,
        }
    }
}

fn truthful_distance_revenue(instance: &AuctionInstance) -> Money {
    let report = ReportProfile::truthful(instance);
    run_distance_based(instance, &report, None).revenue()
}

/// Verdict of one property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Pass-side annotation, e.g. where a strict domination was observed.
    pub detail: Option<String>,
}

impl PropertyReport {
    fn pass(property: Property) -> Self {
        PropertyReport {
            property,
            verdict: Verdict::Pass,
            witness: None,
            detail: None,
        }
    }

    fn pass_with(property: Property, detail: String) -> Self {
        PropertyReport {
            property,
            verdict: Verdict::Pass,
            witness: None,
            detail: Some(detail),
        }
    }

    fn fail(property: Property, witness: Witness) -> Self {
        PropertyReport {
            property,
            verdict: Verdict::Fail,
            witness: Some(witness),
            detail: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("buyer {buyer} has {followers} followers, above the enumeration cap {cap}")]
    FollowerCapExceeded {
        buyer: BuyerId,
        followers: usize,
        cap: usize,
    },
    #[error("the seller has {followers} direct followers, above the enumeration cap {cap}")]
    SellerCapExceeded { followers: usize, cap: usize },
    #[error("enumeration needs {required} mechanism runs, above the cap {cap}")]
    ProductCapExceeded { required: u128, cap: u128 },
}

/// Caps and extras for deviation enumeration.
#[derive(Debug, Clone)]
pub struct EnumerationConfig {
    /// Largest follower set whose powerset we are willing to enumerate.
    pub follower_cap: usize,
    /// Largest number of mechanism runs allowed for one check.
    pub run_cap: u128,
    /// Extra candidate values to fold into the bid grid (e.g. a reserve).
    pub extra_values: Vec<Money>,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            follower_cap: 8,
            run_cap: 20_000_000,
            extra_values: Vec::new(),
        }
    }
}

/// Whose reports the opponents use during a dominance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpponentMode {
    /// Opponents report truthfully: a necessary condition, cheap enough for
    /// large random suites.
    Truthful,
    /// Opponents range over their whole candidate-report grids: the fully
    /// quantified condition, for micro instances.
    Exhaustive,
}

/// All candidate deviations of one buyer: a value grid crossed with every
/// subset of her true followers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManipulationSpace {
    pub buyer: BuyerId,
    pub candidate_values: Vec<Money>,
    pub candidate_forward_sets: Vec<BTreeSet<BuyerId>>,
}

impl ManipulationSpace {
    pub fn len(&self) -> usize {
        self.candidate_values.len() * self.candidate_forward_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Candidate reports in canonical order: values ascending, forward sets
    /// in subset-mask order.
    pub fn reports(&self) -> impl Iterator<Item = Report> + '_ {
        self.candidate_values.iter().flat_map(move |&value| {
            self.candidate_forward_sets.iter().map(move |set| Report {
                value,
                forwarded: set.clone(),
            })
        })
    }
}

/// Build the deviation grid for `buyer`.
pub fn enumerate_manipulations(
    instance: &AuctionInstance,
    buyer: BuyerId,
    config: &EnumerationConfig,
) -> Result<ManipulationSpace, EnumerationError> {
    let followers: Vec<BuyerId> = instance.buyer(buyer).followers.iter().copied().collect();
    if followers.len() > config.follower_cap {
        return Err(EnumerationError::FollowerCapExceeded {
            buyer,
            followers: followers.len(),
            cap: config.follower_cap,
        });
    }

    let cap = instance
        .value_cap()
        .unwrap_or_else(|| instance.max_true_value() + 1);
    let mut grid: BTreeSet<Money> = BTreeSet::from([0, cap]);
    let mut push = |v: Money| {
        grid.insert(v.min(cap));
        grid.insert((v + 1).min(cap));
        grid.insert(v.saturating_sub(1));
    };
    for id in instance.buyer_ids() {
        push(instance.true_value(id));
    }
    for &v in &config.extra_values {
        push(v);
    }

    let candidate_forward_sets = (0..1u64 << followers.len())
        .map(|mask| {
            followers
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask >> bit & 1 == 1)
                .map(|(_, &f)| f)
                .collect()
        })
        .collect();

    Ok(ManipulationSpace {
        buyer,
        candidate_values: grid.into_iter().collect(),
        candidate_forward_sets,
    })
}

/// Iterate over every combination of opponent reports, calling `visit` on
/// a profile with the combination installed. The focal buyer's slot stays
/// truthful; `visit` swaps it as needed.
fn for_each_opponent_profile<E>(
    instance: &AuctionInstance,
    focal: BuyerId,
    spaces: &[ManipulationSpace],
    mut visit: impl FnMut(&ReportProfile) -> Result<(), E>,
) -> Result<(), E> {
    let opponents: Vec<&ManipulationSpace> =
        spaces.iter().filter(|s| s.buyer != focal).collect();
    let candidates: Vec<Vec<Report>> = opponents
        .iter()
        .map(|space| space.reports().collect())
        .collect();
    let mut pick = vec![0usize; opponents.len()];
    let mut profile = ReportProfile::truthful(instance);
    loop {
        let mut reports = profile.reports().to_vec();
        for (slot, &p) in pick.iter().enumerate() {
            reports[opponents[slot].buyer.index()] = candidates[slot][p].clone();
        }
        profile = ReportProfile::new(instance, reports)
            .expect("enumerated opponent reports are valid");
        visit(&profile)?;
        let mut advanced = false;
        for (slot, p) in pick.iter_mut().enumerate() {
            *p += 1;
            if *p < candidates[slot].len() {
                advanced = true;
                break;
            }
            *p = 0;
        }
        if !advanced {
            return Ok(());
        }
    }
}

fn metric_value(metric: Metric, instance: &AuctionInstance, outcome: &Outcome) -> Money {
    match metric {
        Metric::Surplus => crate::mechanisms::social_surplus(instance, outcome),
        Metric::Revenue => outcome.revenue(),
    }
}

struct DeviationScan<'a> {
    instance: &'a AuctionInstance,
    mechanism: &'a Mechanism,
}

impl DeviationScan<'_> {
    fn utility(&self, profile: &ReportProfile, buyer: BuyerId) -> i64 {
        self.mechanism
            .run(self.instance, profile)
            .utility(buyer, self.instance.true_value(buyer))
    }
}

fn estimated_runs(
    spaces: &[ManipulationSpace],
    mode: OpponentMode,
) -> u128 {
    let n = spaces.len() as u128;
    match mode {
        OpponentMode::Truthful => {
            // One baseline plus one run per deviation per buyer.
            1 + spaces.iter().map(|s| s.len() as u128).sum::<u128>()
        }
        OpponentMode::Exhaustive => {
            let mut total: u128 = 0;
            for focal in spaces {
                let mut product: u128 = 1;
                for other in spaces.iter().filter(|s| s.buyer != focal.buyer) {
                    product = product.saturating_mul(other.len() as u128);
                }
                total = total
                    .saturating_add(product.saturating_mul(1 + focal.len() as u128));
            }
            total.max(n)
        }
    }
}

/// Is the truthful report (true value, full forwarding) a dominant strategy
/// for every buyer? Fails with the first profitable deviation found, lowest
/// buyer id first, then grid order.
pub fn check_strategy_proofness(
    instance: &AuctionInstance,
    mechanism: &Mechanism,
    config: &EnumerationConfig,
    mode: OpponentMode,
) -> Result<PropertyReport, EnumerationError> {
    let config = config_with_reserve(config, mechanism);
    let spaces: Vec<ManipulationSpace> = instance
        .buyer_ids()
        .map(|b| enumerate_manipulations(instance, b, &config))
        .collect::<Result<_, _>>()?;
    let required = estimated_runs(&spaces, mode);
    if required > config.run_cap {
        return Err(EnumerationError::ProductCapExceeded {
            required,
            cap: config.run_cap,
        });
    }

    let scan = DeviationScan { instance, mechanism };
    let mut witness = None;
    for space in &spaces {
        let buyer = space.buyer;
        let truthful_report = Report {
            value: instance.true_value(buyer),
            forwarded: instance.buyer(buyer).followers.clone(),
        };
        let scan_profile = |profile: &ReportProfile| -> Result<(), Box<Witness>> {
            let base_profile = profile
                .with_report(instance, buyer, truthful_report.clone())
                .expect("truthful report is always valid");
            let base = scan.utility(&base_profile, buyer);
            for deviation in space.reports() {
                if deviation == truthful_report {
                    continue;
                }
                let deviated_profile = base_profile
                    .with_report(instance, buyer, deviation)
                    .expect("grid reports are valid");
                let got = scan.utility(&deviated_profile, buyer);
                if got > base {
                    return Err(Box::new(Witness {
                        instance: instance.clone(),
                        kind: WitnessKind::ProfitableDeviation {
                            mechanism: *mechanism,
                            buyer,
                            baseline: base_profile.reports().to_vec(),
                            deviated: deviated_profile.reports().to_vec(),
                            baseline_utility: base,
                            deviated_utility: got,
                        },
                    }));
                }
            }
            Ok(())
        };
        let result = match mode {
            OpponentMode::Truthful => scan_profile(&ReportProfile::truthful(instance)),
            OpponentMode::Exhaustive => {
                for_each_opponent_profile(instance, buyer, &spaces, scan_profile)
            }
        };
        if let Err(w) = result {
            witness = Some(w);
            break;
        }
    }
    Ok(match witness {
        Some(w) => PropertyReport::fail(Property::StrategyProofness, *w),
        None => PropertyReport::pass(Property::StrategyProofness),
    })
}

/// Is hiding (truthful value, forwarding to nobody) a dominant strategy?
/// Fails with an alternative report that strictly beats hiding.
pub fn check_hiding_dominance(
    instance: &AuctionInstance,
    mechanism: &Mechanism,
    config: &EnumerationConfig,
    mode: OpponentMode,
) -> Result<PropertyReport, EnumerationError> {
    let config = config_with_reserve(config, mechanism);
    let spaces: Vec<ManipulationSpace> = instance
        .buyer_ids()
        .map(|b| enumerate_manipulations(instance, b, &config))
        .collect::<Result<_, _>>()?;
    let required = estimated_runs(&spaces, mode);
    if required > config.run_cap {
        return Err(EnumerationError::ProductCapExceeded {
            required,
            cap: config.run_cap,
        });
    }

    let scan = DeviationScan { instance, mechanism };
    let mut witness = None;
    for space in &spaces {
        let buyer = space.buyer;
        let hiding_report = Report {
            value: instance.true_value(buyer),
            forwarded: BTreeSet::new(),
        };
        let scan_profile = |profile: &ReportProfile| -> Result<(), Box<Witness>> {
            let hiding_profile = profile
                .with_report(instance, buyer, hiding_report.clone())
                .expect("hiding report is always valid");
            let hiding_utility = scan.utility(&hiding_profile, buyer);
            for alternative in space.reports() {
                if alternative == hiding_report {
                    continue;
                }
                let alternative_profile = hiding_profile
                    .with_report(instance, buyer, alternative)
                    .expect("grid reports are valid");
                let got = scan.utility(&alternative_profile, buyer);
                if got > hiding_utility {
                    return Err(Box::new(Witness {
                        instance: instance.clone(),
                        kind: WitnessKind::HidingDominated {
                            mechanism: *mechanism,
                            buyer,
                            hiding: hiding_profile.reports().to_vec(),
                            alternative: alternative_profile.reports().to_vec(),
                            hiding_utility,
                            alternative_utility: got,
                        },
                    }));
                }
            }
            Ok(())
        };
        let result = match mode {
            OpponentMode::Truthful => scan_profile(&ReportProfile::truthful(instance)),
            OpponentMode::Exhaustive => {
                for_each_opponent_profile(instance, buyer, &spaces, scan_profile)
            }
        };
        if let Err(w) = result {
            witness = Some(w);
            break;
        }
    }
    Ok(match witness {
        Some(w) => PropertyReport::fail(Property::HidingDominance, *w),
        None => PropertyReport::pass(Property::HidingDominance),
    })
}

fn config_with_reserve(config: &EnumerationConfig, mechanism: &Mechanism) -> EnumerationConfig {
    let mut out = config.clone();
    if let Some(reserve) = mechanism.reserve() {
        out.extra_values.push(reserve);
    }
    out
}

/// Does `dominant` score at least as well as `dominated` on every instance
/// of the family, under truthful reports? Passing reports where the first
/// strict gap was seen; failing embeds the offending instance.
pub fn check_domination(
    instances: &[AuctionInstance],
    dominant: &Mechanism,
    dominated: &Mechanism,
    metric: Metric,
) -> PropertyReport {
    let property = match metric {
        Metric::Surplus => Property::DominationSurplus,
        Metric::Revenue => Property::DominationRevenue,
    };
    let mut strict_at = None;
    for (idx, instance) in instances.iter().enumerate() {
        let report = ReportProfile::truthful(instance);
        let lhs = metric_value(metric, instance, &dominant.run(instance, &report));
        let rhs = metric_value(metric, instance, &dominated.run(instance, &report));
        if lhs < rhs {
            return PropertyReport::fail(
                property,
                Witness {
                    instance: instance.clone(),
                    kind: WitnessKind::DominationViolated {
                        metric,
                        dominant: *dominant,
                        dominated: *dominated,
                        dominant_value: lhs,
                        dominated_value: rhs,
                    },
                },
            );
        }
        if lhs > rhs && strict_at.is_none() {
            strict_at = Some((idx, lhs, rhs));
        }
    }
    match strict_at {
        Some((idx, lhs, rhs)) => PropertyReport::pass_with(
            property,
            format!("strict at instance {idx}: {lhs} > {rhs}"),
        ),
        None => PropertyReport::pass_with(property, "no strict instance in family".to_string()),
    }
}

/// Does informing every direct follower maximize revenue over informing any
/// subset? Fails with the best violating subset (highest revenue, then
/// lexicographically smallest).
pub fn check_follower_revenue_monotonicity(
    instance: &AuctionInstance,
    cap: usize,
) -> Result<PropertyReport, EnumerationError> {
    let seller: Vec<BuyerId> = instance.seller_followers().iter().copied().collect();
    if seller.len() > cap {
        return Err(EnumerationError::SellerCapExceeded {
            followers: seller.len(),
            cap,
        });
    }
    let full_revenue = truthful_distance_revenue(instance);
    let mut best: Option<(Money, Vec<BuyerId>)> = None;
    for mask in 0..(1u64 << seller.len()).saturating_sub(1) {
        let subset: BTreeSet<BuyerId> = seller
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &b)| b)
            .collect();
        let restricted = instance
            .restrict_seller(&subset)
            .expect("subset of seller followers");
        let revenue = truthful_distance_revenue(&restricted);
        if revenue > full_revenue {
            let subset: Vec<BuyerId> = subset.into_iter().collect();
            let better = match &best {
                None => true,
                Some((r, s)) => revenue > *r || (revenue == *r && subset < *s),
            };
            if better {
                best = Some((revenue, subset));
            }
        }
    }
    Ok(match best {
        Some((restricted_revenue, subset)) => PropertyReport::fail(
            Property::FollowerRevenueMonotonicity,
            Witness {
                instance: instance.clone(),
                kind: WitnessKind::RevenueNonMonotone {
                    subset,
                    restricted_revenue,
                    full_revenue,
                },
            },
        ),
        None => PropertyReport::pass(Property::FollowerRevenueMonotonicity),
    })
}

/// At most `k` units sold, and only to connected buyers.
pub fn check_feasibility(
    instance: &AuctionInstance,
    report: &ReportProfile,
    outcome: &Outcome,
) -> PropertyReport {
    let view = connected_and_distances(instance, report);
    let winners = outcome.winners();
    let unconnected = winners.iter().copied().find(|&w| !view.is_connected(w));
    if winners.len() > instance.units() as usize || unconnected.is_some() {
        return PropertyReport::fail(
            Property::Feasibility,
            Witness {
                instance: instance.clone(),
                kind: WitnessKind::Infeasible {
                    winner_count: winners.len(),
                    units: instance.units(),
                    unconnected_winner: unconnected,
                },
            },
        );
    }
    PropertyReport::pass(Property::Feasibility)
}

/// Under truthful reports, no winner pays more than her true value.
pub fn check_individual_rationality(
    instance: &AuctionInstance,
    outcome: &Outcome,
) -> PropertyReport {
    for id in instance.buyer_ids() {
        let value = instance.true_value(id);
        if outcome.is_winner(id) && outcome.payment(id) > value {
            return PropertyReport::fail(
                Property::IndividualRationality,
                Witness {
                    instance: instance.clone(),
                    kind: WitnessKind::NegativeUtility {
                        buyer: id,
                        value,
                        payment: outcome.payment(id),
                    },
                },
            );
        }
    }
    PropertyReport::pass(Property::IndividualRationality)
}

/// Revenue is non-negative; with unsigned money this checks the stronger
/// per-buyer form, that losers are never charged.
pub fn check_non_deficit(instance: &AuctionInstance, outcome: &Outcome) -> PropertyReport {
    for id in instance.buyer_ids() {
        if !outcome.is_winner(id) && outcome.payment(id) != 0 {
            return PropertyReport::fail(
                Property::NonDeficit,
                Witness {
                    instance: instance.clone(),
                    kind: WitnessKind::NegativeUtility {
                        buyer: id,
                        value: 0,
                        payment: outcome.payment(id),
                    },
                },
            );
        }
    }
    PropertyReport::pass(Property::NonDeficit)
}

/// At least `min(k, connected)` units are sold.
pub fn check_non_wastefulness(
    instance: &AuctionInstance,
    report: &ReportProfile,
    outcome: &Outcome,
) -> PropertyReport {
    let view = connected_and_distances(instance, report);
    let required = view.connected_count().min(instance.units() as usize);
    if outcome.winner_count() < required {
        return PropertyReport::fail(
            Property::NonWastefulness,
            Witness {
                instance: instance.clone(),
                kind: WitnessKind::Wasteful {
                    winner_count: outcome.winner_count(),
                    required,
                },
            },
        );
    }
    PropertyReport::pass(Property::NonWastefulness)
}

/// Every winner is within the top `k` reported values once her own subtree
/// is set aside.
pub fn check_bounded_efficiency(
    instance: &AuctionInstance,
    report: &ReportProfile,
    outcome: &Outcome,
) -> PropertyReport {
    let tree = DiffusionCriticalTree::build(instance, report);
    for winner in outcome.winners() {
        if !tree.contains(winner) {
            continue; // feasibility's problem, not ours
        }
        let own = report.value(winner);
        let better_count = tree
            .eligible_others(winner)
            .into_iter()
            .filter(|&j| report.value(j) > own)
            .count();
        if better_count >= instance.units() as usize {
            return PropertyReport::fail(
                Property::BoundedEfficiency,
                Witness {
                    instance: instance.clone(),
                    kind: WitnessKind::AboveTopK {
                        buyer: winner,
                        better_count,
                        units: instance.units(),
                    },
                },
            );
        }
    }
    PropertyReport::pass(Property::BoundedEfficiency)
}
