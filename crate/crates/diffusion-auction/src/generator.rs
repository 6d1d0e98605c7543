//! Seeded random and exhaustive instance generators for the test suites.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::network::{AuctionInstance, BuyerType, Money};

/// Parameters for one random instance. The same params always produce the
/// same instance, on every platform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub n: usize,
    pub k: u32,
    pub max_value: Money,
    pub max_followers: usize,
    pub edge_probability: f64,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n: 8,
            k: 3,
            max_value: 100,
            max_followers: 7,
            edge_probability: 0.3,
            seed: 0,
        }
    }
}

/// Draw a random instance: values uniform on `0..=max_value`, each ordered
/// pair an edge with `edge_probability` (trimmed to `max_followers`), and a
/// nonempty random subset of buyers as the seller's direct followers.
pub fn gen_random_instance(params: &GeneratorParams) -> AuctionInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n;

    let values: Vec<Money> = (0..n).map(|_| rng.gen_range(0..=params.max_value)).collect();

    let mut buyers = Vec::with_capacity(n);
    for (i, &value) in values.iter().enumerate() {
        let mut followers: Vec<u32> = (0..n as u32)
            .filter(|&j| j != i as u32 && rng.gen_bool(params.edge_probability))
            .collect();
        while followers.len() > params.max_followers {
            let drop = rng.gen_range(0..followers.len());
            followers.swap_remove(drop);
        }
        buyers.push(BuyerType::new(value, followers));
    }

    let mut seller: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(0.5)).collect();
    if seller.is_empty() && n > 0 {
        seller.push(rng.gen_range(0..n as u32));
    }

    AuctionInstance::new(params.k, seller, buyers, Some(params.max_value))
        .expect("generated instances are structurally valid")
}

/// Corpus flavors used by the verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    /// Up to 8 buyers, up to 4 units, values up to 100: the allocation and
    /// payment invariants corpus.
    Broad,
    /// Same sizes but values on a small grid and at most 4 followers per
    /// buyer, so value ties and forwarding deviations bite: the incentive
    /// corpus.
    SmallGrid,
}

/// Deterministic parameter sweep for corpus entry `index`: cycles n through
/// 1..=8, k through 1..=4, and the edge density through five steps.
pub fn corpus_params(kind: CorpusKind, index: u64) -> GeneratorParams {
    let n = 1 + (index % 8) as usize;
    let k = 1 + ((index / 8) % 4) as u32;
    let edge_probability = [0.0, 0.15, 0.3, 0.5, 0.75][((index / 32) % 5) as usize];
    let (max_value, max_followers) = match kind {
        CorpusKind::Broad => (100, 7),
        CorpusKind::SmallGrid => (8, 4),
    };
    GeneratorParams {
        n,
        k,
        max_value,
        max_followers,
        edge_probability,
        seed: index,
    }
}

/// Every instance with exactly `n` buyers, values in `0..=max_value`, all
/// follower configurations, and every nonempty seller subset. Exhaustive,
/// so only sensible for `n <= 3` or so.
///
/// The family is closed under shrinking any follower set and under
/// replacing any value, which is what lets truthful-opponent deviation
/// checks over the whole family stand in for the fully quantified
/// dominant-strategy condition.
pub fn enumerate_all_instances(n: usize, max_value: Money, k: u32) -> Vec<AuctionInstance> {
    assert!(n <= 4, "exhaustive enumeration is only meant for micro sizes");
    let value_range = max_value + 1;
    let follower_masks: u64 = 1 << (n - 1);
    let mut follower_choices: Vec<Vec<Vec<u32>>> = Vec::with_capacity(n);
    for i in 0..n {
        let others: Vec<u32> = (0..n as u32).filter(|&j| j != i as u32).collect();
        let mut choices = Vec::with_capacity(follower_masks as usize);
        for mask in 0..follower_masks {
            let set: Vec<u32> = others
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &j)| j)
                .collect();
            choices.push(set);
        }
        follower_choices.push(choices);
    }

    let mut out = Vec::new();
    let mut follower_pick = vec![0usize; n];
    loop {
        for seller_mask in 1u32..(1 << n) {
            let seller: Vec<u32> =
                (0..n as u32).filter(|j| seller_mask >> j & 1 == 1).collect();
            let mut value_pick = vec![0u64; n];
            loop {
                let buyers: Vec<BuyerType> = (0..n)
                    .map(|i| {
                        BuyerType::new(
                            value_pick[i],
                            follower_choices[i][follower_pick[i]].iter().copied(),
                        )
                    })
                    .collect();
                out.push(
                    AuctionInstance::new(k, seller.iter().copied(), buyers, Some(max_value))
                        .expect("enumerated instances are structurally valid"),
                );
                if !advance(&mut value_pick, value_range) {
                    break;
                }
            }
        }
        if !advance_usize(&mut follower_pick, follower_masks as usize) {
            break;
        }
    }
    out
}

fn advance(digits: &mut [u64], base: u64) -> bool {
    for d in digits {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn advance_usize(digits: &mut [usize], base: usize) -> bool {
    for d in digits {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
