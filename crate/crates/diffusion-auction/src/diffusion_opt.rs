//! The seller's optimal-diffusion problem: which subset of her direct
//! followers should she inform to maximize revenue?
//!
//! Revenue is not monotone in the informed set, so the question is a real
//! search problem; it is solved here exactly by subset enumeration. The
//! module also carries the gadget construction that embeds a partition
//! question into an optimal-diffusion question, plus a dynamic-programming
//! partition oracle so the two routes can be cross-validated.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mechanisms::run_distance_based;
use crate::network::{AuctionInstance, BuyerId, BuyerType, ModelError, Money, ReportProfile};
use crate::properties::{Property, PropertyReport, Verdict, Witness, WitnessKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("the seller has {followers} direct followers, above the enumeration cap {cap}")]
    SellerCapExceeded { followers: usize, cap: usize },
    #[error("partition items must be positive")]
    NonPositiveItem,
    #[error("partition total {total} exceeds the oracle cap {cap}")]
    OracleCapExceeded { total: u64, cap: u64 },
    #[error("invalid reduction parameters: {0}")]
    InvalidParams(String),
    #[error("invalid gadget instance: {0}")]
    Model(#[from] ModelError),
}

/// Default cap on `|seller followers|` for exact subset enumeration.
pub const SUBSET_CAP: usize = 20;
/// Default cap on the summed item weight the partition oracle accepts.
pub const ORACLE_TOTAL_CAP: u64 = 1_000_000;
/// Cap on the summed item weight the gadget builder accepts; the gadget
/// has roughly two and a half buyers per unit of weight.
pub const GADGET_TOTAL_CAP: u64 = 100_000;

/// A multiset of positive integers to split into two equal-sum halves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionInstance {
    items: Vec<u64>,
}

impl PartitionInstance {
    pub fn new(items: Vec<u64>) -> Result<Self, SolverError> {
        if items.contains(&0) {
            return Err(SolverError::NonPositiveItem);
        }
        Ok(PartitionInstance { items })
    }

    pub fn items(&self) -> &[u64] {
        &self.items
    }

    pub fn total(&self) -> u64 {
        self.items.iter().sum()
    }

    /// Items with an integral half-sum. An odd total has no integral half,
    /// so every item is doubled: subset sums double along with the target,
    /// which preserves the yes/no answer and makes the new total even.
    pub fn normalized(&self) -> (Vec<u64>, u64) {
        let total = self.total();
        if total.is_multiple_of(2) {
            (self.items.clone(), total / 2)
        } else {
            (self.items.iter().map(|v| v * 2).collect(), total)
        }
    }
}

/// Subset-sum dynamic program: can some subset hit half the total?
pub fn partition_oracle(p: &PartitionInstance) -> Result<bool, SolverError> {
    let total = p.total();
    if total > ORACLE_TOTAL_CAP {
        return Err(SolverError::OracleCapExceeded {
            total,
            cap: ORACLE_TOTAL_CAP,
        });
    }
    if !total.is_multiple_of(2) {
        return Ok(false);
    }
    let target = (total / 2) as usize;
    let mut reachable = vec![false; target + 1];
    reachable[0] = true;
    for &item in &p.items {
        let item = item as usize;
        for sum in (item..=target).rev() {
            if reachable[sum - item] {
                reachable[sum] = true;
            }
        }
    }
    Ok(reachable[target])
}

/// Value ladder for the gadget. The five levels must satisfy
/// `epsilon < v2 < v1 < v3` with `v4` far above the whole low range (any
/// revenue that misses the one `v4` payment stays strictly below the
/// threshold), and `v4 < v5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub half_sum: u64,
    pub epsilon: Money,
    pub v1: Money,
    pub v2: Money,
    pub v3: Money,
    pub v4: Money,
    pub v5: Money,
}

impl ReductionParams {
    /// The stock ladder for a given half-sum: `1 < 2 < 3 < 4` with `v4`
    /// large enough that `(m + 2) * v3 < K`.
    pub fn standard(half_sum: u64) -> Self {
        let v3 = 4;
        let v1 = 3;
        let v4 = (half_sum + 2) * v3 + half_sum * v1 + 2;
        ReductionParams {
            half_sum,
            epsilon: 1,
            v1,
            v2: 2,
            v3,
            v4,
            v5: v4 + 1,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let ReductionParams {
            half_sum,
            epsilon,
            v1,
            v2,
            v3,
            v4,
            v5,
        } = *self;
        if !(epsilon < v2 && v2 < v1 && v1 < v3) {
            return Err(SolverError::InvalidParams(format!(
                "need epsilon < v2 < v1 < v3, got {epsilon}, {v2}, {v1}, {v3}"
            )));
        }
        if v4 >= v5 {
            return Err(SolverError::InvalidParams(format!(
                "need v4 < v5, got {v4}, {v5}"
            )));
        }
        if (half_sum + 2) * v3 >= self.threshold() {
            return Err(SolverError::InvalidParams(format!(
                "v4 too small: ({} + 2) * {v3} must stay below the threshold {}",
                half_sum,
                self.threshold()
            )));
        }
        Ok(())
    }

    /// Units offered by the gadget instance.
    pub fn units(&self) -> u32 {
        (self.half_sum + 2) as u32
    }

    /// The revenue threshold the yes-branch hits exactly.
    pub fn threshold(&self) -> Money {
        self.epsilon + self.half_sum * self.v1 + self.v4
    }
}

/// What a gadget buyer is for, indexed by buyer id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    /// Cheap root that unlocks `item`'s block of unit-value buyers.
    ItemRoot { item: usize },
    /// One of the `v(item)` identical mid-value buyers behind a root.
    ItemUnit { item: usize, index: u64 },
    /// The chain whose members pick up units at low prices, ending in the
    /// single high `v4` buyer.
    Ladder { index: u64 },
    /// The parallel chain whose deep `v5` buyer pays the `v4` price.
    Tail { index: u64 },
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::ItemRoot { item } => write!(f, "item{item}.root"),
            Role::ItemUnit { item, index } => write!(f, "item{item}.unit{index}"),
            Role::Ladder { index } => write!(f, "ladder{index}"),
            Role::Tail { index } => write!(f, "tail{index}"),
        }
    }
}

/// A gadget instance plus its decision threshold and per-buyer roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedInstance {
    pub instance: AuctionInstance,
    pub threshold: Money,
    pub roles: Vec<Role>,
}

/// Embed a partition question into an optimal-diffusion question.
///
/// For each item `i` (weight `w`), an epsilon root with `w` children of
/// value `v1`; a ladder chain `v2, v3, ..., v3, v4` of length `m + 2`; a
/// tail chain `eps, ..., eps, v5` of length `m + 1`. The seller sees every
/// item root plus both chain heads, and `k = m + 2` units are offered.
/// Ids are assigned blockwise (roots, item units, ladder, tail) so that at
/// equal distance the ladder outranks the tail, which the yes-branch
/// walkthrough needs.
pub fn reduce_partition(
    p: &PartitionInstance,
    params: &ReductionParams,
) -> Result<ReducedInstance, SolverError> {
    params.validate()?;
    if p.total() > GADGET_TOTAL_CAP {
        return Err(SolverError::OracleCapExceeded {
            total: p.total(),
            cap: GADGET_TOTAL_CAP,
        });
    }
    let (items, half_sum) = p.normalized();
    if params.half_sum != half_sum {
        return Err(SolverError::InvalidParams(format!(
            "params are for half-sum {}, instance normalizes to {half_sum}",
            params.half_sum
        )));
    }
    let m = half_sum;
    let item_units: u64 = items.iter().sum();
    let n = items.len() as u64 + item_units + (m + 2) + (m + 1);

    let mut values = vec![0u64; n as usize];
    let mut followers: Vec<Vec<u32>> = vec![Vec::new(); n as usize];
    let mut roles = Vec::with_capacity(n as usize);

    let root_base = 0u64;
    let unit_base = items.len() as u64;
    let ladder_base = unit_base + item_units;
    let tail_base = ladder_base + (m + 2);

    let mut next_unit = unit_base;
    let mut seller = Vec::new();
    for (item, &weight) in items.iter().enumerate() {
        let root = root_base + item as u64;
        seller.push(root as u32);
        values[root as usize] = params.epsilon;
        followers[root as usize] = (next_unit..next_unit + weight).map(|u| u as u32).collect();
        roles.push(Role::ItemRoot { item });
        next_unit += weight;
    }
    for (item, &weight) in items.iter().enumerate() {
        for index in 1..=weight {
            roles.push(Role::ItemUnit { item, index });
        }
    }
    for unit in unit_base..unit_base + item_units {
        values[unit as usize] = params.v1;
    }

    seller.push(ladder_base as u32);
    for offset in 0..(m + 2) {
        let id = ladder_base + offset;
        roles.push(Role::Ladder { index: offset + 1 });
        values[id as usize] = match offset {
            0 => params.v2,
            o if o == m + 1 => params.v4,
            _ => params.v3,
        };
        if offset < m + 1 {
            followers[id as usize] = vec![(id + 1) as u32];
        }
    }

    seller.push(tail_base as u32);
    for offset in 0..(m + 1) {
        let id = tail_base + offset;
        roles.push(Role::Tail { index: offset + 1 });
        values[id as usize] = if offset == m { params.v5 } else { params.epsilon };
        if offset < m {
            followers[id as usize] = vec![(id + 1) as u32];
        }
    }

    let buyers: Vec<BuyerType> = values
        .into_iter()
        .zip(followers)
        .map(|(value, f)| BuyerType::new(value, f))
        .collect();
    let instance = AuctionInstance::new(params.units(), seller, buyers, None)?;
    Ok(ReducedInstance {
        instance,
        threshold: params.threshold(),
        roles,
    })
}

/// The revenue-maximizing informed subset, found by trying all of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffusionSolution {
    /// Ascending ids; ties on revenue go to the lexicographically smallest
    /// subset.
    pub best_subset: Vec<BuyerId>,
    pub best_revenue: Money,
    /// Revenue of every enumerated subset, in enumeration order.
    pub table: Vec<(Vec<BuyerId>, Money)>,
}

/// Enumerate all `2^|seller followers|` informed subsets, run the
/// distance-based mechanism (truthful reports) on each restriction, and
/// keep the best.
pub fn optimal_diffusion_exact(
    instance: &AuctionInstance,
    cap: usize,
) -> Result<DiffusionSolution, SolverError> {
    let seller: Vec<BuyerId> = instance.seller_followers().iter().copied().collect();
    if seller.len() > cap {
        return Err(SolverError::SellerCapExceeded {
            followers: seller.len(),
            cap,
        });
    }
    let mut table = Vec::with_capacity(1 << seller.len());
    let mut best: Option<(Money, Vec<BuyerId>)> = None;
    for mask in 0u64..(1 << seller.len()) {
        let subset: BTreeSet<BuyerId> = seller
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &b)| b)
            .collect();
        let restricted = instance
            .restrict_seller(&subset)
            .expect("subset of seller followers");
        let report = ReportProfile::truthful(&restricted);
        let revenue = run_distance_based(&restricted, &report, None).revenue();
        let subset: Vec<BuyerId> = subset.into_iter().collect();
        let better = match &best {
            None => true,
            Some((r, s)) => revenue > *r || (revenue == *r && subset < *s),
        };
        if better {
            best = Some((revenue, subset.clone()));
        }
        table.push((subset, revenue));
    }
    let (best_revenue, best_subset) = best.expect("the empty subset is always enumerated");
    Ok(DiffusionSolution {
        best_subset,
        best_revenue,
        table,
    })
}

/// Decision form: is there an informed subset reaching revenue `threshold`?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffusionDecision {
    pub satisfied: bool,
    /// The best subset when the threshold is reached.
    pub witness: Option<Vec<BuyerId>>,
    pub best_revenue: Money,
}

pub fn optimal_diffusion_decision(
    instance: &AuctionInstance,
    threshold: Money,
    cap: usize,
) -> Result<DiffusionDecision, SolverError> {
    let solution = optimal_diffusion_exact(instance, cap)?;
    let satisfied = solution.best_revenue >= threshold;
    Ok(DiffusionDecision {
        satisfied,
        witness: satisfied.then_some(solution.best_subset),
        best_revenue: solution.best_revenue,
    })
}

/// Cross-validate the gadget: the partition oracle and the diffusion
/// decision on the reduced instance must agree.
pub fn verify_reduction(
    p: &PartitionInstance,
    params: &ReductionParams,
) -> Result<PropertyReport, SolverError> {
    let expected = partition_oracle(p)?;
    let reduced = reduce_partition(p, params)?;
    let decision =
        optimal_diffusion_decision(&reduced.instance, reduced.threshold, SUBSET_CAP)?;
    let detail = format!(
        "items {:?}: partition {}, diffusion {} (best revenue {} vs threshold {})",
        p.items(),
        expected,
        decision.satisfied,
        decision.best_revenue,
        reduced.threshold,
    );
    let (verdict, witness) = if decision.satisfied == expected {
        (Verdict::Pass, None)
    } else {
        (
            Verdict::Fail,
            Some(Witness {
                instance: reduced.instance,
                kind: WitnessKind::ReductionMismatch {
                    items: p.items().to_vec(),
                    partition_answer: expected,
                    diffusion_answer: decision.satisfied,
                    best_revenue: decision.best_revenue,
                    threshold: reduced.threshold,
                },
            }),
        )
    };
    Ok(PropertyReport {
        property: Property::ReductionEquivalence,
        verdict,
        witness,
        detail: Some(detail),
    })
}
