use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use super::{reliability, resilience, robustness};
use crate::args::ReportArgs;
use crate::charts;
use crate::manifest::{read_run, run_dir, write_json, Envelope, TOOL_VERSION};
use crate::published::{self, PublishedReference};

pub const SCHEMA: &str = "r3.report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantRow {
    pub variant: u8,
    pub label: String,
    pub eens_mwh_per_yr: f64,
    pub eens_converged: bool,
    pub mc_years: usize,
    pub mean_final_sd: f64,
    pub ens_mwh: f64,
    /// `None` when the base value is zero and this one is not.
    pub delta_eens_pct: Option<f64>,
    pub delta_sd_pct: Option<f64>,
    pub delta_ens_pct: Option<f64>,
    pub rank_reliability: usize,
    pub rank_robustness: usize,
    pub rank_resilience: usize,
    pub published: Option<PublishedReference>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputRef {
    pub variant: u8,
    pub command: String,
    pub manifest_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct R3Report {
    pub schema: String,
    pub tool_version: String,
    pub base_variant: u8,
    pub rows: Vec<VariantRow>,
    pub inputs: Vec<InputRef>,
    pub notes: Vec<String>,
}

/// Per-variant values the report is computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Inputs {
    pub variant: u8,
    pub label: String,
    pub eens: f64,
    pub eens_converged: bool,
    pub mc_years: usize,
    pub mean_sd: f64,
    pub ens: f64,
}

/// `100·num/base`, with a zero base giving 0 for a zero numerator and no value otherwise.
pub fn guarded_pct(num: f64, base: f64) -> Option<f64> {
    if base == 0.0 {
        (num == 0.0).then_some(0.0)
    } else {
        Some(100.0 * num / base)
    }
}

pub fn delta_eens_pct(e1: f64, ek: f64) -> Option<f64> {
    guarded_pct(e1 - ek, e1)
}

pub fn delta_sd_pct(sd1: f64, sdk: f64) -> Option<f64> {
    guarded_pct(sdk - sd1, sd1)
}

pub fn delta_ens_pct(ens1: f64, ensk: f64) -> Option<f64> {
    guarded_pct(ens1 - ensk, ens1)
}

/// 1 = largest delta; missing deltas rank last; ties keep variant order.
fn ranks(values: &[Option<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);
        key(values[b]).total_cmp(&key(values[a])).then(a.cmp(&b))
    });
    let mut rank = vec![0; values.len()];
    for (r, i) in order.into_iter().enumerate() {
        rank[i] = r + 1;
    }
    rank
}

pub fn build_rows(inputs: &[Inputs]) -> Result<Vec<VariantRow>> {
    let Some(base) = inputs.iter().find(|i| i.variant == 1) else {
        bail!("the report needs variant 1 as its base");
    };
    let d_eens: Vec<Option<f64>> = inputs.iter().map(|i| delta_eens_pct(base.eens, i.eens)).collect();
    let d_sd: Vec<Option<f64>> = inputs.iter().map(|i| delta_sd_pct(base.mean_sd, i.mean_sd)).collect();
    let d_ens: Vec<Option<f64>> = inputs.iter().map(|i| delta_ens_pct(base.ens, i.ens)).collect();
    let (r_eens, r_sd, r_ens) = (ranks(&d_eens), ranks(&d_sd), ranks(&d_ens));
    Ok(inputs
        .iter()
        .enumerate()
        .map(|(k, i)| VariantRow {
            variant: i.variant,
            label: i.label.clone(),
            eens_mwh_per_yr: i.eens,
            eens_converged: i.eens_converged,
            mc_years: i.mc_years,
            mean_final_sd: i.mean_sd,
            ens_mwh: i.ens,
            delta_eens_pct: d_eens[k],
            delta_sd_pct: d_sd[k],
            delta_ens_pct: d_ens[k],
            rank_reliability: r_eens[k],
            rank_robustness: r_sd[k],
            rank_resilience: r_ens[k],
            published: published::reference(i.variant),
        })
        .collect())
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.prec$}"))
}

pub fn text_table(rows: &[VariantRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Percentage change against Case 1 (computed | published, as printed)");
    let _ = writeln!(
        s,
        "{:<8} {:>9} {:>9} {:>9} | {:>9} {:>9} {:>9}",
        "case", "dSD%", "dEENS%", "dENS%", "dSD%", "dEENS%", "dENS%"
    );
    for r in rows {
        let p = r.published;
        let _ = writeln!(
            s,
            "{:<8} {:>9} {:>9} {:>9} | {:>9} {:>9} {:>9}",
            r.label,
            fmt_opt(r.delta_sd_pct, 3),
            fmt_opt(r.delta_eens_pct, 3),
            fmt_opt(r.delta_ens_pct, 3),
            fmt_opt(p.map(|p| p.delta_sd_pct), 3),
            fmt_opt(p.map(|p| p.delta_eens_pct), 3),
            fmt_opt(p.map(|p| p.delta_ens_pct), 3),
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "Absolute values (computed | published)");
    let _ = writeln!(
        s,
        "{:<8} {:>12} {:>12} {:>8} {:>8} {:>10} {:>10} {:>6}",
        "case", "EENS MWh/yr", "published", "SD", "publ.", "ENS MWh", "published", "years"
    );
    for r in rows {
        let p = r.published;
        let _ = writeln!(
            s,
            "{:<8} {:>12.1} {:>12} {:>8.4} {:>8} {:>10.2} {:>10} {:>6}",
            r.label,
            r.eens_mwh_per_yr,
            fmt_opt(p.map(|p| p.eens_mwh_per_yr), 1),
            r.mean_final_sd,
            fmt_opt(p.map(|p| p.mean_final_sd), 2),
            r.ens_mwh,
            fmt_opt(p.map(|p| p.ens_mwh), 2),
            r.mc_years,
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "Ranks (1 = best): reliability / robustness / resilience");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<8} {} / {} / {}",
            r.label, r.rank_reliability, r.rank_robustness, r.rank_resilience
        );
    }
    s
}

#[derive(Serialize)]
struct ScatterRow {
    variant: u8,
    label: String,
    delta_eens_pct: Option<f64>,
    delta_sd_pct: Option<f64>,
    delta_ens_pct: Option<f64>,
}

pub fn run(args: &ReportArgs) -> Result<R3Report> {
    generate(&args.out, &args.variants)
}

type Loaded = (
    Envelope<reliability::ReliabilityResult>,
    Envelope<robustness::RobustnessResult>,
    Envelope<resilience::ResilienceResult>,
);

/// Reads all results under `out`, writes `out/report/`.
pub fn generate(out: &Path, variants: &[u8]) -> Result<R3Report> {
    let mut missing = Vec::new();
    for &v in variants {
        for cmd in ["reliability", "robustness", "resilience"] {
            let p = run_dir(out, v, cmd).join("result.json");
            if !p.exists() {
                missing.push(p.display().to_string());
            }
        }
    }
    if !missing.is_empty() {
        bail!("missing results:\n  {}", missing.join("\n  "));
    }

    let mut loaded: Vec<Loaded> = Vec::new();
    let mut inputs_ref = Vec::new();
    let mut versions = std::collections::BTreeSet::new();
    for &v in variants {
        let (rel, m1) = read_run(&run_dir(out, v, "reliability"), reliability::SCHEMA)?;
        let (rob, m2) = read_run(&run_dir(out, v, "robustness"), robustness::SCHEMA)?;
        let (res, m3) = read_run(&run_dir(out, v, "resilience"), resilience::SCHEMA)?;
        for (env_version, m) in [(&rel.tool_version, &m1), (&rob.tool_version, &m2), (&res.tool_version, &m3)] {
            versions.insert(env_version.clone());
            versions.insert(m.tool_version.clone());
            inputs_ref.push(InputRef {
                variant: v,
                command: m.command.clone(),
                manifest_hash: m.hash(),
            });
        }
        loaded.push((rel, rob, res));
    }
    if versions.len() > 1 {
        bail!(
            "results come from different tool versions ({}); rerun them with one version",
            versions.into_iter().collect::<Vec<_>>().join(", ")
        );
    }

    let inputs: Vec<Inputs> = loaded
        .iter()
        .map(|(rel, rob, res)| Inputs {
            variant: rel.variant,
            label: rel.variant_label.clone(),
            eens: rel.body.indicators.eens,
            eens_converged: rel.body.indicators.converged,
            mc_years: rel.body.indicators.n_years,
            mean_sd: rob.body.mean_final_sd,
            ens: res.body.ens_mwh,
        })
        .collect();
    let rows = build_rows(&inputs)?;
    let report = R3Report {
        schema: SCHEMA.into(),
        tool_version: versions.into_iter().next().unwrap_or_else(|| TOOL_VERSION.into()),
        base_variant: 1,
        rows,
        inputs: inputs_ref,
        notes: published::NOTES.iter().map(|s| s.to_string()).collect(),
    };

    let dir = out.join("report");
    std::fs::create_dir_all(&dir)?;
    write_json(&dir.join("report.json"), &report)?;
    let table = text_table(&report.rows);
    std::fs::write(dir.join("table.txt"), &table)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.rows {
        w.serialize(ScatterRow {
            variant: r.variant,
            label: r.label.clone(),
            delta_eens_pct: r.delta_eens_pct,
            delta_sd_pct: r.delta_sd_pct,
            delta_ens_pct: r.delta_ens_pct,
        })?;
    }
    std::fs::write(dir.join("r3_scatter.csv"), w.into_inner()?)?;

    let curves: Vec<(String, Vec<(f64, f64)>)> = loaded
        .iter()
        .map(|(_, _, res)| {
            let mut pts = vec![(0.0, res.body.initial_rd_mw)];
            pts.extend(res.body.steps.iter().map(|s| (s.minutes, s.rd_mw)));
            (res.variant_label.clone(), pts)
        })
        .collect();
    std::fs::write(dir.join("recovery_curves.svg"), charts::recovery_curves(&curves)?)?;
    let dispersion: Vec<(String, Vec<f64>, f64)> = loaded
        .iter()
        .map(|(_, rob, _)| {
            (
                rob.variant_label.clone(),
                rob.body.scenarios.iter().map(|s| s.final_sd).collect(),
                rob.body.mean_final_sd,
            )
        })
        .collect();
    std::fs::write(dir.join("sd_dispersion.svg"), charts::sd_dispersion(&dispersion)?)?;
    let points: Vec<(String, f64, f64, f64)> = report
        .rows
        .iter()
        .map(|r| {
            (
                r.variant.to_string(),
                r.delta_eens_pct.unwrap_or(0.0),
                r.delta_sd_pct.unwrap_or(0.0),
                r.delta_ens_pct.unwrap_or(0.0),
            )
        })
        .collect();
    std::fs::write(dir.join("r3_scatter.svg"), charts::r3_scatter(&points)?)?;
    println!("{table}");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(variant: u8, eens: f64, sd: f64, ens: f64) -> Inputs {
        Inputs {
            variant,
            label: format!("Case {variant}"),
            eens,
            eens_converged: true,
            mc_years: 10,
            mean_sd: sd,
            ens,
        }
    }

    #[test]
    fn delta_formulas() {
        assert_eq!(delta_eens_pct(100.0, 90.0), Some(10.0));
        assert_eq!(delta_sd_pct(0.5, 0.55).map(|x| (x * 1e9).round() / 1e9), Some(10.0));
        assert_eq!(delta_ens_pct(200.0, 50.0), Some(75.0));
        assert_eq!(delta_eens_pct(0.0, 0.0), Some(0.0));
        assert_eq!(delta_eens_pct(0.0, 5.0), None);
    }

    #[test]
    fn base_row_is_exactly_zero_and_ranks_follow_deltas() {
        let rows = build_rows(&[input(1, 100.0, 0.5, 300.0), input(2, 90.0, 0.4, 100.0), input(3, 95.0, 0.6, 400.0)]).unwrap();
        let r1 = &rows[0];
        assert_eq!((r1.delta_eens_pct, r1.delta_sd_pct, r1.delta_ens_pct), (Some(0.0), Some(0.0), Some(0.0)));
        assert_eq!(rows.iter().map(|r| r.rank_reliability).collect::<Vec<_>>(), vec![3, 1, 2]);
        assert_eq!(rows.iter().map(|r| r.rank_robustness).collect::<Vec<_>>(), vec![2, 3, 1]);
        assert_eq!(rows.iter().map(|r| r.rank_resilience).collect::<Vec<_>>(), vec![2, 1, 3]);
        assert_eq!(rows[1].published.unwrap().delta_eens_pct, 5.732);
        assert!(text_table(&rows).contains("Case 3"));
    }

    #[test]
    fn base_variant_required() {
        assert!(build_rows(&[input(2, 1.0, 1.0, 1.0)]).is_err());
    }
}
