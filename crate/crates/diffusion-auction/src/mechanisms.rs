//! The three allocation mechanisms and their shared pricing primitive.
//!
//! All three take an instance plus a report profile and return an
//! [`Outcome`]. The distance-based mechanism walks the connected buyers in
//! priority order (ascending BFS distance, ties by ascending id) and prices
//! each buyer by the k'-th highest competing report; an optional reserve
//! price is realized as `k` dummy seller-adjacent values that inflate every
//! competitor pool but never win. The two baselines are a VCG restricted to
//! the seller's direct followers and a free first-come-first-served
//! allocation over the same priority order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::network::{
    connected_and_distances, AuctionInstance, BuyerId, DiffusionCriticalTree, Money,
    ReachabilityView, ReportProfile,
};

/// A price quote: finite money or the no-units-left sentinel.
///
/// `Finite(a) < Finite(b)` iff `a < b`, and every finite price is below
/// `Infinite`, so winner checks are plain comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Price {
    Finite(Money),
    Infinite,
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Price::Finite(v) => write!(f, "{v}"),
            Price::Infinite => write!(f, "inf"),
        }
    }
}

/// The k'-th highest value in a pool, counting multiplicity.
///
/// Two conventions apply, in this order: a non-positive `k_prime` means no
/// unit is left and the price is infinite; a pool smaller than `k_prime`
/// cannot constrain anyone and prices at zero.
pub fn v_star(values: &[Money], k_prime: i64) -> Price {
    if k_prime <= 0 {
        return Price::Infinite;
    }
    let k = k_prime as usize;
    if values.len() < k {
        return Price::Finite(0);
    }
    let mut pool = values.to_vec();
    let (_, nth, _) = pool.select_nth_unstable_by(k - 1, |a, b| b.cmp(a));
    Price::Finite(*nth)
}

/// Connected buyers sorted by ascending distance, ties by ascending id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityOrder(Vec<BuyerId>);

impl PriorityOrder {
    pub fn as_slice(&self) -> &[BuyerId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = BuyerId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The deterministic priority order used by the distance-based mechanism
/// and FCFS-F. Distances are taken in the original reported graph, not in
/// the critical tree.
pub fn priority_order(view: &ReachabilityView) -> PriorityOrder {
    let mut order: Vec<BuyerId> = view.connected().to_vec();
    order.sort_by_key(|&b| (view.distance(b).expect("connected buyer has a distance"), b));
    PriorityOrder(order)
}

/// Reserve price, realized as `k` dummy buyers attached to the seller.
/// The dummies join every buyer's competitor pool and are never candidates
/// themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReserveConfig {
    pub reserve_value: Money,
}

impl ReserveConfig {
    pub fn new(reserve_value: Money) -> Self {
        ReserveConfig { reserve_value }
    }
}

/// Allocation and payments for one mechanism run. Surplus is always summed
/// over true values, revenue over payments; losers pay nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    allocated: Vec<bool>,
    payments: Vec<Money>,
    surplus: Money,
    revenue: Money,
}

impl Outcome {
    fn collect(instance: &AuctionInstance, allocated: Vec<bool>, payments: Vec<Money>) -> Self {
        let surplus = allocated
            .iter()
            .zip(instance.buyer_ids())
            .filter(|(&won, _)| won)
            .map(|(_, id)| instance.true_value(id))
            .sum();
        let revenue = payments.iter().sum();
        Outcome {
            allocated,
            payments,
            surplus,
            revenue,
        }
    }

    pub fn is_winner(&self, id: BuyerId) -> bool {
        self.allocated[id.index()]
    }

    pub fn payment(&self, id: BuyerId) -> Money {
        self.payments[id.index()]
    }

    pub fn winners(&self) -> Vec<BuyerId> {
        self.allocated
            .iter()
            .enumerate()
            .filter_map(|(i, &won)| won.then_some(BuyerId(i as u32)))
            .collect()
    }

    pub fn winner_count(&self) -> usize {
        self.allocated.iter().filter(|&&w| w).count()
    }

    pub fn buyer_count(&self) -> usize {
        self.allocated.len()
    }

    /// Sum of winners' true values.
    pub fn surplus(&self) -> Money {
        self.surplus
    }

    /// Sum of payments.
    pub fn revenue(&self) -> Money {
        self.revenue
    }

    /// Quasi-linear utility of `id` given her true value.
    pub fn utility(&self, id: BuyerId, true_value: Money) -> i64 {
        let gained = if self.is_winner(id) { true_value as i64 } else { 0 };
        gained - self.payment(id) as i64
    }
}

/// Sum of true values over winners, recomputed from scratch.
pub fn social_surplus(instance: &AuctionInstance, outcome: &Outcome) -> Money {
    instance
        .buyer_ids()
        .filter(|&id| outcome.is_winner(id))
        .map(|id| instance.true_value(id))
        .sum()
}

/// Sum of payments, recomputed from scratch.
pub fn revenue(outcome: &Outcome) -> Money {
    instance_free_revenue(outcome)
}

fn instance_free_revenue(outcome: &Outcome) -> Money {
    outcome.payments.iter().sum()
}

/// The distance-based mechanism: walk the priority order, price each buyer
/// by the k'-th highest report among connected buyers outside her subtree
/// (dummies included when a reserve is set, earlier winners excluded), and
/// sell whenever the reported value meets the price.
pub fn run_distance_based(
    instance: &AuctionInstance,
    report: &ReportProfile,
    reserve: Option<&ReserveConfig>,
) -> Outcome {
    let n = instance.buyer_count();
    let view = connected_and_distances(instance, report);
    let tree = DiffusionCriticalTree::build(instance, report);
    let order = priority_order(&view);

    let mut allocated = vec![false; n];
    let mut payments = vec![0; n];
    let mut remaining = i64::from(instance.units());
    for i in order.iter() {
        let mut pool: Vec<Money> = tree
            .eligible_others(i)
            .into_iter()
            .filter(|j| !allocated[j.index()])
            .map(|j| report.value(j))
            .collect();
        if let Some(cfg) = reserve {
            pool.extend(std::iter::repeat_n(cfg.reserve_value, instance.units() as usize));
        }
        if let Price::Finite(price) = v_star(&pool, remaining) {
            if report.value(i) >= price {
                allocated[i.index()] = true;
                payments[i.index()] = price;
                remaining -= 1;
            }
        }
    }
    Outcome::collect(instance, allocated, payments)
}

/// VCG restricted to the seller's direct followers. Everyone else is
/// ignored; each winner pays the k-th highest report among the other
/// direct followers. Boundary ties are resolved toward lower ids so that
/// at most `k` units leave.
pub fn run_nd_vcg(instance: &AuctionInstance, report: &ReportProfile) -> Outcome {
    let n = instance.buyer_count();
    let k = instance.units() as usize;
    let pool: Vec<BuyerId> = instance.seller_followers().iter().copied().collect();

    let mut ranked = pool.clone();
    ranked.sort_by(|&a, &b| report.value(b).cmp(&report.value(a)).then(a.cmp(&b)));
    ranked.truncate(k.min(pool.len()));

    let mut allocated = vec![false; n];
    let mut payments = vec![0; n];
    for &i in &ranked {
        let others: Vec<Money> = pool
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| report.value(j))
            .collect();
        let price = match v_star(&others, k as i64) {
            Price::Finite(p) => p,
            Price::Infinite => unreachable!("k is at least 1"),
        };
        allocated[i.index()] = true;
        payments[i.index()] = price;
    }
    Outcome::collect(instance, allocated, payments)
}

/// First-come-first-served for free: the first `min(k, |connected|)` buyers
/// in priority order each get a unit, nobody pays.
pub fn run_fcfs_f(instance: &AuctionInstance, report: &ReportProfile) -> Outcome {
    let n = instance.buyer_count();
    let view = connected_and_distances(instance, report);
    let order = priority_order(&view);
    let mut allocated = vec![false; n];
    for i in order.iter().take(instance.units() as usize) {
        allocated[i.index()] = true;
    }
    Outcome::collect(instance, allocated, vec![0; n])
}

/// Mechanism selector shared by the checkers and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mechanism {
    Distance { reserve: Option<Money> },
    NdVcg,
    FcfsF,
}

impl Mechanism {
    pub fn distance() -> Self {
        Mechanism::Distance { reserve: None }
    }

    pub fn run(&self, instance: &AuctionInstance, report: &ReportProfile) -> Outcome {
        match self {
            Mechanism::Distance { reserve } => {
                let cfg = reserve.map(ReserveConfig::new);
                run_distance_based(instance, report, cfg.as_ref())
            }
            Mechanism::NdVcg => run_nd_vcg(instance, report),
            Mechanism::FcfsF => run_fcfs_f(instance, report),
        }
    }

    /// The reserve value baked into this mechanism, if any.
    pub fn reserve(&self) -> Option<Money> {
        match self {
            Mechanism::Distance { reserve } => *reserve,
            _ => None,
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::Distance { reserve: None } => write!(f, "distance"),
            Mechanism::Distance { reserve: Some(v) } => write!(f, "distance(reserve={v})"),
            Mechanism::NdVcg => write!(f, "ndvcg"),
            Mechanism::FcfsF => write!(f, "fcfs"),
        }
    }
}

impl FromStr for Mechanism {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "distance" => Ok(Mechanism::distance()),
            "ndvcg" => Ok(Mechanism::NdVcg),
            "fcfs" => Ok(Mechanism::FcfsF),
            other => Err(format!(
                "unknown mechanism `{other}` (expected distance, ndvcg, or fcfs)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{AuctionInstance, BuyerType};
    use crate::samples;

    fn winners(outcome: &Outcome) -> Vec<u32> {
        outcome.winners().iter().map(|b| b.0).collect()
    }

    #[test]
    fn v_star_conventions() {
        // Competitor values of buyer 0 in the seven-buyer sample.
        let values = [72, 34, 45, 50, 66, 40];
        assert_eq!(v_star(&values, 3), Price::Finite(50));
        assert_eq!(v_star(&values, 0), Price::Infinite);
        assert_eq!(v_star(&values, -2), Price::Infinite);
        assert_eq!(v_star(&[20], 2), Price::Finite(0));
        assert_eq!(v_star(&[], 1), Price::Finite(0));
        // Multiplicity counts: the second highest of {7, 7, 3} is 7.
        assert_eq!(v_star(&[7, 3, 7], 2), Price::Finite(7));
    }

    #[test]
    fn priority_orders() {
        let instance = samples::seven_buyers();
        let report = ReportProfile::truthful(&instance);
        let view = connected_and_distances(&instance, &report);
        let order: Vec<u32> = priority_order(&view).iter().map(|b| b.0).collect();
        assert_eq!(order, vec![0, 1, 2, 3, 4, 5, 6]);

        let instance = samples::revenue_nonmonotone();
        let report = ReportProfile::truthful(&instance);
        let view = connected_and_distances(&instance, &report);
        let order: Vec<u32> = priority_order(&view).iter().map(|b| b.0).collect();
        assert_eq!(order, vec![0, 1, 2, 3]);

        let lonely = AuctionInstance::new(1, [], vec![BuyerType::new(4, [])], None).unwrap();
        let report = ReportProfile::truthful(&lonely);
        let view = connected_and_distances(&lonely, &report);
        assert!(priority_order(&view).is_empty());
    }

    #[test]
    fn distance_based_seven_buyers() {
        let instance = samples::seven_buyers();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_distance_based(&instance, &report, None);
        assert_eq!(winners(&outcome), vec![1, 2, 4]);
        assert_eq!(outcome.payment(BuyerId(1)), 40);
        assert_eq!(outcome.payment(BuyerId(2)), 30);
        assert_eq!(outcome.payment(BuyerId(4)), 45);
        assert_eq!(outcome.revenue(), 115);
        assert_eq!(outcome.surplus(), 156);
    }

    #[test]
    fn distance_based_with_reserve() {
        let instance = samples::seven_buyers();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_distance_based(&instance, &report, Some(&ReserveConfig::new(40)));
        assert_eq!(winners(&outcome), vec![1, 4, 5]);
        assert_eq!(outcome.payment(BuyerId(1)), 40);
        assert_eq!(outcome.payment(BuyerId(4)), 40);
        assert_eq!(outcome.payment(BuyerId(5)), 45);
        assert_eq!(outcome.revenue(), 125);
    }

    #[test]
    fn everyone_wins_for_free_when_units_cover_the_network() {
        let buyers = vec![
            BuyerType::new(9, [1]),
            BuyerType::new(4, [2]),
            BuyerType::new(7, []),
        ];
        let instance = AuctionInstance::new(5, [0], buyers, None).unwrap();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_distance_based(&instance, &report, None);
        assert_eq!(winners(&outcome), vec![0, 1, 2]);
        assert_eq!(outcome.revenue(), 0);
    }

    #[test]
    fn ties_win_at_their_price() {
        let buyers = vec![BuyerType::new(5, []), BuyerType::new(5, [])];
        let instance = AuctionInstance::new(1, [0, 1], buyers, None).unwrap();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_distance_based(&instance, &report, None);
        assert_eq!(winners(&outcome), vec![0]);
        assert_eq!(outcome.payment(BuyerId(0)), 5);
    }

    #[test]
    fn distance_based_four_buyers() {
        let instance = samples::revenue_nonmonotone();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_distance_based(&instance, &report, None);
        assert_eq!(winners(&outcome), vec![1, 3]);
        assert_eq!(outcome.payment(BuyerId(1)), 6);
        assert_eq!(outcome.payment(BuyerId(3)), 6);
        assert_eq!(outcome.revenue(), 12);
    }

    #[test]
    fn nd_vcg_pays_zero_when_directs_are_scarce() {
        let instance = samples::seven_buyers();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_nd_vcg(&instance, &report);
        assert_eq!(winners(&outcome), vec![0, 1]);
        assert_eq!(outcome.revenue(), 0);
        assert_eq!(outcome.surplus(), 102);
    }

    #[test]
    fn nd_vcg_is_second_price_for_one_unit() {
        let buyers = vec![BuyerType::new(10, []), BuyerType::new(7, [])];
        let instance = AuctionInstance::new(1, [0, 1], buyers, None).unwrap();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_nd_vcg(&instance, &report);
        assert_eq!(winners(&outcome), vec![0]);
        assert_eq!(outcome.payment(BuyerId(0)), 7);
    }

    #[test]
    fn nd_vcg_four_buyers() {
        let instance = samples::revenue_nonmonotone();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_nd_vcg(&instance, &report);
        assert_eq!(winners(&outcome), vec![1, 2]);
        assert_eq!(outcome.payment(BuyerId(1)), 5);
        assert_eq!(outcome.payment(BuyerId(2)), 5);
    }

    #[test]
    fn nd_vcg_never_oversells_on_ties() {
        let buyers = vec![
            BuyerType::new(5, []),
            BuyerType::new(5, []),
            BuyerType::new(5, []),
        ];
        let instance = AuctionInstance::new(2, [0, 1, 2], buyers, None).unwrap();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_nd_vcg(&instance, &report);
        assert_eq!(winners(&outcome), vec![0, 1]);
        assert_eq!(outcome.payment(BuyerId(0)), 5);
        assert_eq!(outcome.payment(BuyerId(1)), 5);
    }

    #[test]
    fn fcfs_takes_the_priority_prefix() {
        let instance = samples::seven_buyers();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_fcfs_f(&instance, &report);
        assert_eq!(winners(&outcome), vec![0, 1, 2]);
        assert_eq!(outcome.revenue(), 0);
        assert_eq!(outcome.surplus(), 136);

        let instance = samples::revenue_nonmonotone();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_fcfs_f(&instance, &report);
        assert_eq!(winners(&outcome), vec![0, 1]);

        let nobody = AuctionInstance::new(2, [], vec![BuyerType::new(3, [])], None).unwrap();
        let report = ReportProfile::truthful(&nobody);
        assert_eq!(run_fcfs_f(&nobody, &report).winner_count(), 0);
    }

    #[test]
    fn restricted_seller_changes_the_distance_outcome() {
        let instance = samples::revenue_nonmonotone();
        let restricted = instance
            .restrict_seller(&[BuyerId(0), BuyerId(1)].into_iter().collect())
            .unwrap();
        let report = ReportProfile::truthful(&restricted);
        let outcome = run_distance_based(&restricted, &report, None);
        assert_eq!(winners(&outcome), vec![0, 1]);
        assert_eq!(outcome.payment(BuyerId(0)), 0);
        assert_eq!(outcome.payment(BuyerId(1)), 15);
        assert_eq!(outcome.revenue(), 15);
    }

    #[test]
    fn surplus_and_revenue_helpers_match_outcome_fields() {
        let instance = samples::seven_buyers();
        let report = ReportProfile::truthful(&instance);
        let outcome = run_distance_based(&instance, &report, None);
        assert_eq!(social_surplus(&instance, &outcome), outcome.surplus());
        assert_eq!(revenue(&outcome), outcome.revenue());

        let nobody = AuctionInstance::new(2, [], vec![BuyerType::new(3, [])], None).unwrap();
        let report = ReportProfile::truthful(&nobody);
        let outcome = run_distance_based(&nobody, &report, None);
        assert_eq!((outcome.surplus(), outcome.revenue()), (0, 0));
    }

    #[test]
    fn mechanism_names_round_trip() {
        for name in ["distance", "ndvcg", "fcfs"] {
            let mech: Mechanism = name.parse().unwrap();
            assert_eq!(mech.to_string(), name);
        }
        assert!("gidm".parse::<Mechanism>().is_err());
    }
}
