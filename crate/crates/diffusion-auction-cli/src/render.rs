//! Text and CSV rendering. Field order is fixed: run outputs are golden-
//! file tested byte for byte.

use diffusion_auction::diffusion_opt::{DiffusionSolution, ReducedInstance};
use diffusion_auction::efficiency::{LossRow, LossSource};
use diffusion_auction::mechanisms::{Mechanism, Outcome};
use diffusion_auction::network::{AuctionInstance, BuyerId, ReportProfile};
use diffusion_auction::properties::{PropertyReport, Verdict, Witness, WitnessKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

pub fn join_ids(ids: &[BuyerId]) -> String {
    let parts: Vec<String> = ids.iter().map(|b| b.to_string()).collect();
    parts.join(" ")
}

pub fn render_run(
    mechanism: &Mechanism,
    instance: &AuctionInstance,
    report: &ReportProfile,
    outcome: &Outcome,
    format: Format,
) -> String {
    match format {
        Format::Text => {
            let view = diffusion_auction::connected_and_distances(instance, report);
            let mut out = String::new();
            out.push_str(&format!("mechanism: {mechanism}\n"));
            out.push_str(&format!("units: {}\n", instance.units()));
            out.push_str(&format!("connected: {}\n", join_ids(view.connected())));
            out.push_str(&format!("winners: {}\n", join_ids(&outcome.winners())));
            for id in instance.buyer_ids() {
                out.push_str(&format!(
                    "buyer {id}: allocated={} payment={}\n",
                    u8::from(outcome.is_winner(id)),
                    outcome.payment(id)
                ));
            }
            out.push_str(&format!("revenue: {}\n", outcome.revenue()));
            out.push_str(&format!("surplus: {}\n", outcome.surplus()));
            out
        }
        Format::Csv => {
            let mut out = String::from("buyer,allocated,payment\n");
            for id in instance.buyer_ids() {
                out.push_str(&format!(
                    "{id},{},{}\n",
                    u8::from(outcome.is_winner(id)),
                    outcome.payment(id)
                ));
            }
            out.push_str(&format!("revenue,,{}\n", outcome.revenue()));
            out.push_str(&format!("surplus,,{}\n", outcome.surplus()));
            out
        }
    }
}

pub fn render_compare(
    instance: &AuctionInstance,
    runs: &[(Mechanism, Outcome)],
    format: Format,
) -> String {
    match format {
        Format::Text => {
            let names: Vec<String> = runs.iter().map(|(m, _)| m.to_string()).collect();
            let mut rows: Vec<Vec<String>> = Vec::new();
            let mut header = vec!["buyer".to_string()];
            header.extend(names.clone());
            rows.push(header);
            for id in instance.buyer_ids() {
                let mut row = vec![id.to_string()];
                for (_, outcome) in runs {
                    row.push(if outcome.is_winner(id) {
                        outcome.payment(id).to_string()
                    } else {
                        ".".to_string()
                    });
                }
                rows.push(row);
            }
            let mut revenue = vec!["revenue".to_string()];
            let mut surplus = vec!["surplus".to_string()];
            for (_, outcome) in runs {
                revenue.push(outcome.revenue().to_string());
                surplus.push(outcome.surplus().to_string());
            }
            rows.push(revenue);
            rows.push(surplus);

            let columns = rows[0].len();
            let widths: Vec<usize> = (0..columns)
                .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
                .collect();
            let mut out = String::new();
            for row in rows {
                let line: Vec<String> = row
                    .iter()
                    .enumerate()
                    .map(|(c, cell)| format!("{cell:<width$}", width = widths[c]))
                    .collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("mechanism,buyer,allocated,payment\n");
            for (mechanism, outcome) in runs {
                for id in instance.buyer_ids() {
                    out.push_str(&format!(
                        "{mechanism},{id},{},{}\n",
                        u8::from(outcome.is_winner(id)),
                        outcome.payment(id)
                    ));
                }
                out.push_str(&format!("{mechanism},revenue,,{}\n", outcome.revenue()));
                out.push_str(&format!("{mechanism},surplus,,{}\n", outcome.surplus()));
            }
            out
        }
    }
}

fn witness_summary(witness: &Witness) -> String {
    match &witness.kind {
        WitnessKind::ProfitableDeviation {
            buyer,
            deviated,
            baseline_utility,
            deviated_utility,
            ..
        } => {
            let report = &deviated[buyer.index()];
            format!(
                "buyer {buyer} gains by reporting value={} forwarded={{{}}}: utility {} -> {}",
                report.value,
                join_ids(&report.forwarded.iter().copied().collect::<Vec<_>>()),
                baseline_utility,
                deviated_utility
            )
        }
        WitnessKind::HidingDominated {
            buyer,
            alternative,
            hiding_utility,
            alternative_utility,
            ..
        } => {
            let report = &alternative[buyer.index()];
            format!(
                "buyer {buyer}: hiding utility {} < {} from value={} forwarded={{{}}}",
                hiding_utility,
                alternative_utility,
                report.value,
                join_ids(&report.forwarded.iter().copied().collect::<Vec<_>>())
            )
        }
        WitnessKind::DominationViolated {
            metric,
            dominant,
            dominated,
            dominant_value,
            dominated_value,
        } => format!(
            "{metric}: {dominant} scored {dominant_value} < {dominated} at {dominated_value}"
        ),
        WitnessKind::RevenueNonMonotone {
            subset,
            restricted_revenue,
            full_revenue,
        } => format!(
            "restricting the seller to {{{}}} yields revenue {restricted_revenue} > {full_revenue}",
            join_ids(subset)
        ),
        WitnessKind::Infeasible {
            winner_count,
            units,
            unconnected_winner,
        } => match unconnected_winner {
            Some(b) => format!("unconnected buyer {b} won a unit"),
            None => format!("{winner_count} winners for {units} units"),
        },
        WitnessKind::NegativeUtility {
            buyer,
            value,
            payment,
        } => format!("buyer {buyer} pays {payment} against value {value}"),
        WitnessKind::Wasteful {
            winner_count,
            required,
        } => format!("only {winner_count} of the required {required} units sold"),
        WitnessKind::AboveTopK {
            buyer,
            better_count,
            units,
        } => format!(
            "winner {buyer} has {better_count} strictly better competitors for {units} units"
        ),
        WitnessKind::ReductionMismatch {
            items,
            partition_answer,
            diffusion_answer,
            best_revenue,
            threshold,
        } => format!(
            "items {items:?}: partition says {partition_answer}, diffusion says \
             {diffusion_answer} (best revenue {best_revenue} vs threshold {threshold})"
        ),
    }
}

pub fn render_report(report: &PropertyReport, format: Format) -> String {
    let verdict = match report.verdict {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
    };
    match format {
        Format::Text => {
            let mut out = format!("property: {}\nverdict: {verdict}\n", report.property);
            if let Some(detail) = &report.detail {
                out.push_str(&format!("detail: {detail}\n"));
            }
            if let Some(witness) = &report.witness {
                out.push_str(&format!("witness: {}\n", witness_summary(witness)));
                out.push_str(&format!(
                    "witness-json: {}\n",
                    serde_json::to_string(witness).expect("witnesses serialize")
                ));
            }
            out
        }
        Format::Csv => {
            let witness = report
                .witness
                .as_ref()
                .map(|w| serde_json::to_string(w).expect("witnesses serialize"))
                .unwrap_or_default();
            let escaped = witness.replace('"', "\"\"");
            format!("{},{verdict},\"{escaped}\"\n", report.property)
        }
    }
}

pub fn render_solution(
    solution: &DiffusionSolution,
    threshold: Option<u64>,
    format: Format,
) -> String {
    match format {
        Format::Text => {
            let mut out = format!("subsets: {}\n", solution.table.len());
            for (subset, revenue) in &solution.table {
                out.push_str(&format!("subset {{{}}}: revenue {revenue}\n", join_ids(subset)));
            }
            out.push_str(&format!(
                "best subset: {{{}}}\n",
                join_ids(&solution.best_subset)
            ));
            out.push_str(&format!("best revenue: {}\n", solution.best_revenue));
            if let Some(k) = threshold {
                out.push_str(&format!("threshold: {k}\n"));
                out.push_str(&format!(
                    "decision: {}\n",
                    if solution.best_revenue >= k { "yes" } else { "no" }
                ));
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("subset,revenue\n");
            for (subset, revenue) in &solution.table {
                out.push_str(&format!("{},{revenue}\n", join_ids(subset)));
            }
            out.push_str(&format!(
                "best:{},{}\n",
                join_ids(&solution.best_subset),
                solution.best_revenue
            ));
            if let Some(k) = threshold {
                out.push_str(&format!(
                    "decision:{},{k}\n",
                    if solution.best_revenue >= k { "yes" } else { "no" }
                ));
            }
            out
        }
    }
}

pub fn render_reduced(reduced: &ReducedInstance, items: &[u64]) -> String {
    let roles: Vec<String> = reduced
        .roles
        .iter()
        .enumerate()
        .map(|(id, role)| format!("{id}={role}"))
        .collect();
    let mut out = format!(
        "# gadget instance for items {:?}: {} buyers, {} units, revenue threshold {}\n",
        items,
        reduced.instance.buyer_count(),
        reduced.instance.units(),
        reduced.threshold
    );
    out.push_str(&format!("# roles: {}\n", roles.join(" ")));
    out.push_str(&diffusion_auction::format::serialize_instance(
        &reduced.instance,
        None,
    ));
    out
}

fn source_label(source: &LossSource) -> String {
    match source {
        LossSource::Instance => "instance".to_string(),
        LossSource::Seeded { seed } => seed.to_string(),
        LossSource::PathFamily => "path-family".to_string(),
        LossSource::BelowReserveFamily => "below-reserve-family".to_string(),
    }
}

pub fn loss_csv_header() -> &'static str {
    "seed,n,k,v_h,optimal,achieved,loss,normalized_loss\n"
}

pub fn render_loss_row(row: &LossRow, format: Format) -> String {
    let r = &row.record;
    let normalized = *r.normalized_loss.numer() as f64 / (*r.normalized_loss.denom()).max(1) as f64;
    match format {
        Format::Text => format!(
            "{}: n={} k={} reserve={} optimal={} achieved={} loss={} normalized={}/{}\n",
            row.source,
            row.n,
            row.k,
            row.reserve,
            r.optimal_surplus,
            r.achieved_surplus,
            r.loss,
            r.normalized_loss.numer(),
            r.normalized_loss.denom()
        ),
        Format::Csv => format!(
            "{},{},{},{},{},{},{},{normalized}\n",
            source_label(&row.source),
            row.n,
            row.k,
            row.reserve,
            r.optimal_surplus,
            r.achieved_surplus,
            r.loss
        ),
    }
}
