//! Acceptance suite: one test per criterion, each printing its verdict.
//!
//! Run with:
//!   cargo test -p diffusion-auction-cli --test acceptance -- --nocapture

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;

use diffusion_auction::diffusion_opt::{
    optimal_diffusion_exact, partition_oracle, reduce_partition, verify_reduction,
    PartitionInstance, ReductionParams, SUBSET_CAP,
};
use diffusion_auction::efficiency::{
    below_reserve_family, efficiency_record, path_family,
};
use diffusion_auction::generator::{
    corpus_params, enumerate_all_instances, gen_random_instance, CorpusKind, GeneratorParams,
};
use diffusion_auction::mechanisms::{run_distance_based, Mechanism, ReserveConfig};
use diffusion_auction::network::{
    connected_and_distances, AuctionInstance, BuyerId, Report, ReportProfile,
};
use diffusion_auction::properties::{
    check_bounded_efficiency, check_domination, check_feasibility, check_hiding_dominance,
    check_individual_rationality, check_non_deficit, check_non_wastefulness,
    check_strategy_proofness, EnumerationConfig, Metric, OpponentMode,
};
use diffusion_auction::samples;

const VALUE_CAP: u64 = 100;
const RESERVE_HALF: u64 = 50;
const BROAD_CORPUS: u64 = 10_000;
const INCENTIVE_CORPUS: u64 = 2_000;

fn instance_path(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("instances")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run_binary(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_dauction"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "dauction {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn broad_corpus() -> impl Iterator<Item = (u64, AuctionInstance)> {
    (0..BROAD_CORPUS).map(|i| (i, gen_random_instance(&corpus_params(CorpusKind::Broad, i))))
}

/// Exhaustive closure of micro instances: every network shape, seller set,
/// and value profile on the {0..3} grid for up to three buyers. Closed
/// under opponent deviations, so truthful-opponent checks over the family
/// carry the fully quantified dominant-strategy claim at these sizes.
fn micro_closure() -> impl Iterator<Item = AuctionInstance> {
    (1..=3usize).flat_map(|n| {
        (1..=3u32).flat_map(move |k| enumerate_all_instances(n, 3, k).into_iter())
    })
}

/// Seeded four-buyer micro instances for the literal opponent-profile
/// product tier: values on {0..3}, at most two followers each.
fn micro_samples() -> Vec<AuctionInstance> {
    (0..8u64)
        .map(|seed| {
            gen_random_instance(&GeneratorParams {
                n: 4,
                k: 1 + (seed % 3) as u32,
                max_value: 3,
                max_followers: 2,
                edge_probability: [0.25, 0.5, 0.75][(seed % 3) as usize],
                seed: 1_000 + seed,
            })
        })
        .collect()
}

#[test]
fn criterion_01_example_reproduction() {
    let started = Instant::now();
    let stdout = run_binary(&["run", "--instance", &instance_path("seven_buyers.toml")]);
    assert!(stdout.contains("winners: 1 2 4"), "{stdout}");
    assert!(stdout.contains("buyer 1: allocated=1 payment=40"), "{stdout}");
    assert!(stdout.contains("buyer 2: allocated=1 payment=30"), "{stdout}");
    assert!(stdout.contains("buyer 4: allocated=1 payment=45"), "{stdout}");
    assert!(stdout.contains("revenue: 115"), "{stdout}");
    assert!(stdout.contains("surplus: 156"), "{stdout}");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 1 (seven-buyer reproduction: winners 1 2 4, payments 40/30/45, \
         revenue 115, surplus 156, {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_02_reserve_example_reproduction() {
    let started = Instant::now();
    let stdout = run_binary(&[
        "run",
        "--instance",
        &instance_path("seven_buyers.toml"),
        "--reserve",
        "40",
    ]);
    assert!(stdout.contains("winners: 1 4 5"), "{stdout}");
    assert!(stdout.contains("buyer 1: allocated=1 payment=40"), "{stdout}");
    assert!(stdout.contains("buyer 4: allocated=1 payment=40"), "{stdout}");
    assert!(stdout.contains("buyer 5: allocated=1 payment=45"), "{stdout}");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 2 (reserve-40 reproduction: winners 1 4 5, payments 40/40/45, \
         {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_03_revenue_nonmonotonicity() {
    let started = Instant::now();
    let instance = samples::revenue_nonmonotone();
    let full = run_distance_based(&instance, &ReportProfile::truthful(&instance), None);
    assert_eq!(full.revenue(), 12);

    let subset: BTreeSet<BuyerId> = [BuyerId(0), BuyerId(1)].into_iter().collect();
    let restricted = instance.restrict_seller(&subset).unwrap();
    let narrow = run_distance_based(&restricted, &ReportProfile::truthful(&restricted), None);
    assert_eq!(narrow.revenue(), 15);

    let stdout = run_binary(&[
        "optdiff",
        "--instance",
        &instance_path("revenue_nonmonotone.toml"),
    ]);
    assert!(stdout.contains("best subset: {0 1}"), "{stdout}");
    assert!(stdout.contains("best revenue: 15"), "{stdout}");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 3 (full diffusion revenue 12 vs optimal subset {{0 1}} at 15, \
         {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_04_allocation_and_payment_invariants() {
    let started = Instant::now();
    for (seed, instance) in broad_corpus() {
        let report = ReportProfile::truthful(&instance);
        let outcome = run_distance_based(&instance, &report, None);
        assert!(
            check_feasibility(&instance, &report, &outcome).passed(),
            "feasibility violated at seed {seed}"
        );
        assert!(
            check_individual_rationality(&instance, &outcome).passed(),
            "individual rationality violated at seed {seed}"
        );
        assert!(
            check_non_deficit(&instance, &outcome).passed(),
            "non-deficit violated at seed {seed}"
        );
        assert!(
            check_non_wastefulness(&instance, &report, &outcome).passed(),
            "non-wastefulness violated at seed {seed}"
        );
        let view = connected_and_distances(&instance, &report);
        assert_eq!(
            outcome.winner_count(),
            view.connected_count().min(instance.units() as usize),
            "winner count off at seed {seed}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "criterion 4 (feasibility, individual rationality, non-deficit, non-wastefulness: \
         0 violations over {BROAD_CORPUS} instances, {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_05_strategy_proofness() {
    let started = Instant::now();
    let mechanism = Mechanism::distance();
    let config = EnumerationConfig::default();

    // Tier 1: grid deviations against truthful opponents on the random
    // incentive corpus.
    for i in 0..INCENTIVE_CORPUS {
        let instance = gen_random_instance(&corpus_params(CorpusKind::SmallGrid, i));
        let report =
            check_strategy_proofness(&instance, &mechanism, &config, OpponentMode::Truthful)
                .expect("corpus respects enumeration caps");
        assert!(report.passed(), "profitable deviation at seed {i}: {report:?}");
    }
    let tier1 = started.elapsed();

    // Tier 2a: the exhaustive micro closure, equivalent to full opponent
    // quantification for up to three buyers.
    let mut closure_count = 0u64;
    for instance in micro_closure() {
        closure_count += 1;
        let report =
            check_strategy_proofness(&instance, &mechanism, &config, OpponentMode::Truthful)
                .expect("micro instances respect enumeration caps");
        assert!(report.passed(), "profitable deviation in micro closure: {report:?}");
    }
    let tier2a = started.elapsed() - tier1;

    // Tier 2b: literal opponent-profile products on four-buyer instances.
    for instance in micro_samples() {
        let report =
            check_strategy_proofness(&instance, &mechanism, &config, OpponentMode::Exhaustive)
                .expect("micro samples respect enumeration caps");
        assert!(report.passed(), "profitable deviation under enumerated opponents: {report:?}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    println!(
        "criterion 5 (strategy-proofness: 0 profitable deviations over {INCENTIVE_CORPUS} \
         random instances [{tier1:?}], {closure_count} exhaustive micro instances \
         [{tier2a:?}], and 8 four-buyer opponent-product instances; total {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_06_bounded_efficiency() {
    let started = Instant::now();
    for (seed, instance) in broad_corpus() {
        let report = ReportProfile::truthful(&instance);
        let outcome = run_distance_based(&instance, &report, None);
        assert!(
            check_bounded_efficiency(&instance, &report, &outcome).passed(),
            "bounded efficiency violated at seed {seed}"
        );
    }
    let elapsed = started.elapsed();
    println!(
        "criterion 6 (bounded efficiency: every winner within the top k outside her \
         subtree, 0 violations over {BROAD_CORPUS} instances, {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_07_domination() {
    let started = Instant::now();
    // The seven-buyer sample leads the family, so the strict witnesses the
    // criterion names are checked first.
    let mut family = vec![samples::seven_buyers()];
    family.extend(broad_corpus().map(|(_, instance)| instance));

    let distance = Mechanism::distance();
    let mut strict_details = Vec::new();
    for baseline in [Mechanism::NdVcg, Mechanism::FcfsF] {
        for metric in [Metric::Surplus, Metric::Revenue] {
            let report = check_domination(&family, &distance, &baseline, metric);
            assert!(report.passed(), "domination violated vs {baseline} on {metric}: {report:?}");
            let detail = report.detail.expect("family contains a strict instance");
            assert!(detail.starts_with("strict at"), "no strict witness vs {baseline} on {metric}");
            strict_details.push(format!("{metric} vs {baseline}: {detail}"));
        }
    }

    // The named strict gaps from the seven-buyer sample.
    let truthful = ReportProfile::truthful(&family[0]);
    let surpluses: Vec<u64> = [Mechanism::distance(), Mechanism::NdVcg, Mechanism::FcfsF]
        .iter()
        .map(|m| m.run(&family[0], &truthful).surplus())
        .collect();
    assert_eq!(surpluses, vec![156, 102, 136]);
    let elapsed = started.elapsed();
    println!(
        "criterion 7 (distance-based dominates ND-VCG and FCFS-F on surplus and revenue \
         over {} instances; strict: 156 > 102, 156 > 136, revenue 115 > 0; {elapsed:?}): PASS",
        family.len()
    );
}

#[test]
fn criterion_08_reserve_counts_and_worst_case_loss() {
    let started = Instant::now();
    let half = Ratio::new(1u64, 2);
    let reserve = ReserveConfig::new(RESERVE_HALF);

    for (seed, instance) in broad_corpus() {
        let report = ReportProfile::truthful(&instance);
        let outcome = run_distance_based(&instance, &report, Some(&reserve));
        let view = connected_and_distances(&instance, &report);
        let eligible = view
            .connected()
            .iter()
            .filter(|&&b| instance.true_value(b) >= RESERVE_HALF)
            .count();
        assert_eq!(
            outcome.winner_count(),
            eligible.min(instance.units() as usize),
            "reserve allocation count off at seed {seed}"
        );

        let record = efficiency_record(&instance, &report, Some(RESERVE_HALF))
            .expect("corpus instances carry a cap");
        assert!(
            record.normalized_loss <= half,
            "normalized loss {} above 1/2 at seed {seed}",
            record.normalized_loss
        );
        let units = u64::from(instance.units());
        let bound = (units * RESERVE_HALF).max(units * (VALUE_CAP - RESERVE_HALF));
        assert!(record.loss <= bound, "loss bound violated at seed {seed}");
    }

    // Adversarial families: the path family achieves the k*(cap - v_h)
    // branch exactly; the below-reserve family stays within the k*v_h
    // branch and also respects one half at the midpoint reserve.
    for k in 1..=4u32 {
        let path = path_family(k, VALUE_CAP, RESERVE_HALF);
        let report = ReportProfile::truthful(&path);
        let record = efficiency_record(&path, &report, Some(RESERVE_HALF)).unwrap();
        assert_eq!(record.loss, u64::from(k) * (VALUE_CAP - RESERVE_HALF));
        assert_eq!(record.normalized_loss, half);

        let below = below_reserve_family(k, VALUE_CAP, RESERVE_HALF).unwrap();
        let report = ReportProfile::truthful(&below);
        let record = efficiency_record(&below, &report, Some(RESERVE_HALF)).unwrap();
        assert_eq!(record.loss, u64::from(k) * (RESERVE_HALF - 1));
        assert!(record.normalized_loss <= half);
    }
    let elapsed = started.elapsed();
    println!(
        "criterion 8 (reserve {RESERVE_HALF}: winners = min(l, k) and normalized loss <= 1/2 \
         over {BROAD_CORPUS} instances; path family hits k*(cap-reserve) exactly; \
         {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_09_partition_reduction() {
    let started = Instant::now();
    let multisets = all_multisets(5, 4);
    assert_eq!(multisets.len(), 125);

    let mut yes_count = 0;
    for items in &multisets {
        let p = PartitionInstance::new(items.clone()).unwrap();
        let params = ReductionParams::standard(p.normalized().1);
        let report = verify_reduction(&p, &params).expect("reduction within caps");
        assert!(
            report.passed(),
            "oracle and reduced decision disagree on {items:?}: {:?}",
            report.detail
        );

        if partition_oracle(&p).unwrap() {
            yes_count += 1;
            let reduced = reduce_partition(&p, &params).unwrap();
            let solution = optimal_diffusion_exact(&reduced.instance, SUBSET_CAP).unwrap();
            assert_eq!(
                solution.best_revenue, reduced.threshold,
                "yes-instance {items:?} should peak exactly at the threshold"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    assert!(yes_count > 0, "the family contains yes instances");
    println!(
        "criterion 9 (partition reduction: oracle agreement on all {} multisets, \
         {yes_count} yes-instances peak exactly at the threshold, {elapsed:?}): PASS",
        multisets.len()
    );
}

fn all_multisets(max_len: usize, max_value: u64) -> Vec<Vec<u64>> {
    fn extend(current: &mut Vec<u64>, floor: u64, max_value: u64, room: usize, out: &mut Vec<Vec<u64>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if room == 0 {
            return;
        }
        for v in floor..=max_value {
            current.push(v);
            extend(current, v, max_value, room - 1, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, max_value, max_len, &mut out);
    out
}

#[test]
fn criterion_10_hiding_incentives() {
    let started = Instant::now();
    let config = EnumerationConfig::default();

    // Hiding (truthful value, empty forwarding) is dominant for both
    // baselines on the exhaustive micro closure...
    for instance in micro_closure() {
        for mechanism in [Mechanism::NdVcg, Mechanism::FcfsF] {
            let report =
                check_hiding_dominance(&instance, &mechanism, &config, OpponentMode::Truthful)
                    .expect("micro instances respect enumeration caps");
            assert!(report.passed(), "hiding beaten under {mechanism}: {report:?}");
        }
    }
    // ...and under fully enumerated opponents on the four-buyer samples.
    for instance in micro_samples() {
        for mechanism in [Mechanism::NdVcg, Mechanism::FcfsF] {
            let report =
                check_hiding_dominance(&instance, &mechanism, &config, OpponentMode::Exhaustive)
                    .expect("micro samples respect enumeration caps");
            assert!(report.passed(), "hiding beaten under {mechanism}: {report:?}");
        }
    }

    // For the distance-based mechanism with k = 2, hiding can strictly
    // lose. The canonical two-branch instance only ties...
    let tie = samples::hiding_tie();
    let (sincere, hidden) = hiding_utilities(&tie, BuyerId(1));
    assert_eq!((sincere, hidden), (6, 6));
    println!(
        "criterion 10 note: in the canonical two-branch k=2 instance, hiding ties instead \
         of strictly losing (utility {hidden} hidden vs {sincere} sincere); the claimed \
         strict loss needs the rival child raised, as in the strict variant"
    );

    // ...while the strict variant and a corpus search both produce strict
    // losses.
    let strict = samples::hiding_strict();
    let (sincere, hidden) = hiding_utilities(&strict, BuyerId(1));
    assert_eq!((sincere, hidden), (5, 3));

    let mut search_hit = None;
    'search: for i in 0..INCENTIVE_CORPUS {
        let mut params = corpus_params(CorpusKind::SmallGrid, i);
        params.k = 2;
        let instance = gen_random_instance(&params);
        for buyer in instance.buyer_ids() {
            if instance.buyer(buyer).followers.is_empty() {
                continue;
            }
            let (sincere, hidden) = hiding_utilities(&instance, buyer);
            if hidden < sincere {
                search_hit = Some((i, buyer, sincere, hidden));
                break 'search;
            }
        }
    }
    let (seed, buyer, s, h) =
        search_hit.expect("the corpus contains an instance where hiding strictly loses");
    let elapsed = started.elapsed();
    println!(
        "criterion 10 (hiding dominant under ND-VCG and FCFS-F on the micro enumeration; \
         distance-based k=2 strict loss found at seed {seed} buyer {buyer} with utility \
         {h} hidden vs {s} sincere, and in the strict sample 3 vs 5; {elapsed:?}): PASS"
    );
}

fn hiding_utilities(instance: &AuctionInstance, buyer: BuyerId) -> (i64, i64) {
    let mechanism = Mechanism::distance();
    let truthful = ReportProfile::truthful(instance);
    let value = instance.true_value(buyer);
    let hiding = truthful
        .with_report(instance, buyer, Report { value, forwarded: BTreeSet::new() })
        .unwrap();
    let sincere = mechanism.run(instance, &truthful).utility(buyer, value);
    let hidden = mechanism.run(instance, &hiding).utility(buyer, value);
    (sincere, hidden)
}
