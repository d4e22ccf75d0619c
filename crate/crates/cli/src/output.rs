use std::io::Write;

use diffeo_core::rules::VertexRule;
use diffeo_core::trees::TreeSumResult;
use diffeo_core::verify::Report;
use serde::Serialize;

use crate::config::Format;
use crate::CliError;

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Output(e.to_string())
}

fn json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io)?;
    writeln!(out).map_err(io)
}

fn csv_rows(out: &mut impl Write, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn legs(edges: &[u8]) -> String {
    edges.iter().map(u8::to_string).collect::<Vec<_>>().join("+")
}

pub fn rule(out: &mut impl Write, rule: &VertexRule, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => json(out, rule),
        Format::Pretty => writeln!(out, "{}", rule.text).map_err(io),
        Format::Csv => {
            let rows = rule
                .terms
                .iter()
                .map(|t| vec![rule.valence.to_string(), t.coefficient.clone(), t.edges.iter().map(|e| legs(e)).collect::<Vec<_>>().join(" ")])
                .collect();
            csv_rows(out, &["valence", "coefficient", "edges"], rows)
        }
    }
}

pub fn treesum(out: &mut impl Write, r: &TreeSumResult, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => json(out, r),
        Format::Pretty => {
            writeln!(out, "{}_{} = {}", r.kind, r.n, r.value.to_collected_string()).map_err(io)?;
            writeln!(out, "trees: {}  decorated: {}  mode: {}", r.tree_count, r.decorated_count, r.mode).map_err(io)?;
            for (k, v) in &r.per_valence {
                writeln!(out, "  valence {k}: {v}").map_err(io)?;
            }
            for t in r.trace.iter().flatten() {
                writeln!(out, "  {} [{}]: {}", t.topology, t.decoration, t.amplitude).map_err(io)?;
            }
            Ok(())
        }
        Format::Csv => {
            let offshell = r.offshell.iter().map(u8::to_string).collect::<Vec<_>>().join(" ");
            let row = vec![
                r.kind.to_string(),
                r.n.to_string(),
                offshell,
                r.theory.clone(),
                r.mode.clone(),
                r.tree_count.to_string(),
                r.decorated_count.to_string(),
                r.value.to_collected_string(),
            ];
            csv_rows(out, &["kind", "n", "offshell_set", "theory", "mode", "tree_count", "decorated_count", "value"], vec![row])
        }
    }
}

#[derive(Serialize)]
struct SuiteOutput<'a> {
    pass: bool,
    reports: &'a [Report],
}

pub fn reports(out: &mut impl Write, reports: &[Report], pass: bool, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => json(out, &SuiteOutput { pass, reports }),
        Format::Pretty => {
            for r in reports {
                let p = &r.params;
                writeln!(
                    out,
                    "{:<7} {:<13} max_n={} s={} order={} trials={} seed={} dim={}  {} residuals  {} ms",
                    r.status.to_string(),
                    r.check.as_str(),
                    p.max_n,
                    p.s,
                    p.order,
                    p.trials,
                    p.seed,
                    p.dim,
                    r.residuals_checked,
                    r.wall_ms
                )
                .map_err(io)?;
                if let Some(w) = &r.witness {
                    let n = w.n.map(|n| format!(" n={n}")).unwrap_or_default();
                    let tree = w.tree.as_deref().map(|t| format!(" tree={t}")).unwrap_or_default();
                    writeln!(out, "        witness {}{n}{tree}: {}", w.case, w.residual).map_err(io)?;
                }
            }
            writeln!(out, "{}", if pass { "suite: pass" } else { "suite: fail" }).map_err(io)
        }
        Format::Csv => {
            let rows = reports
                .iter()
                .map(|r| {
                    let p = &r.params;
                    let w = r.witness.as_ref();
                    vec![
                        r.check.as_str().to_string(),
                        p.max_n.to_string(),
                        p.s.to_string(),
                        p.order.to_string(),
                        p.trials.to_string(),
                        p.seed.to_string(),
                        p.dim.to_string(),
                        r.fault.map(|f| serde_json::to_string(&f).unwrap_or_default()).unwrap_or_default(),
                        r.status.to_string(),
                        r.residuals_checked.to_string(),
                        w.map(|w| w.case.clone()).unwrap_or_default(),
                        w.and_then(|w| w.n).map(|n| n.to_string()).unwrap_or_default(),
                        w.and_then(|w| w.tree.clone()).unwrap_or_default(),
                        w.map(|w| w.residual.clone()).unwrap_or_default(),
                    ]
                })
                .collect();
            csv_rows(
                out,
                &["check", "max_n", "s", "order", "trials", "seed", "dim", "fault", "status", "residuals_checked", "witness_case", "witness_n", "witness_tree", "residual"],
                rows,
            )
        }
    }
}
