//! The six reliability indicators and the EENS convergence statistic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::HOURS_PER_YEAR;

use super::curtailment::DisruptionRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityIndicators {
    /// Expected energy not supplied, MWh/yr.
    pub eens: f64,
    /// Expected demand not supplied, MW.
    pub edns: f64,
    /// Expected frequency of load curtailment, outages/yr.
    pub eflc: f64,
    /// Loss of load expectation, h/yr.
    pub lole: f64,
    /// Loss of load probability.
    pub lolp: f64,
    /// Average duration of load curtailment, h/outage.
    pub adlc: f64,
    /// Set when no curtailment occurred and `adlc` is reported as 0.
    pub adlc_undefined: bool,
    pub n_years: usize,
    /// Standard error of the EENS estimate over its mean; `None` when it is
    /// undefined (a single year with non-zero ENS).
    pub cov_eens: Option<f64>,
    pub converged: bool,
}

/// Per-year totals; enough to recompute every indicator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct YearSummary {
    pub ens_mwh: f64,
    pub curtailed_hours: f64,
    pub disruptions: usize,
}

impl YearSummary {
    pub fn from_records(records: &[DisruptionRecord]) -> Self {
        YearSummary {
            ens_mwh: records.iter().map(|r| r.energy_not_supplied_mwh).sum(),
            curtailed_hours: records.iter().map(|r| f64::from(r.duration_hours)).sum(),
            disruptions: records.len(),
        }
    }
}

/// Indicators from per-year disruption lists, one list per simulated year.
pub fn compute_indicators(records_per_year: &[Vec<DisruptionRecord>]) -> Result<ReliabilityIndicators> {
    let summaries: Vec<YearSummary> = records_per_year
        .iter()
        .map(|r| YearSummary::from_records(r))
        .collect();
    indicators_from_summaries(&summaries)
}

pub fn indicators_from_summaries(years: &[YearSummary]) -> Result<ReliabilityIndicators> {
    let n = years.len();
    if n == 0 {
        return Err(Error::Precondition("at least one year is required".into()));
    }
    let ny = n as f64;
    let eens = years.iter().map(|y| y.ens_mwh).sum::<f64>() / ny;
    let eflc = years.iter().map(|y| y.disruptions as f64).sum::<f64>() / ny;
    let lole = years.iter().map(|y| y.curtailed_hours).sum::<f64>() / ny;
    let (adlc, adlc_undefined) = if eflc > 0.0 { (lole / eflc, false) } else { (0.0, true) };
    Ok(ReliabilityIndicators {
        eens,
        edns: eens / HOURS_PER_YEAR,
        eflc,
        lole,
        lolp: lole / HOURS_PER_YEAR,
        adlc,
        adlc_undefined,
        n_years: n,
        cov_eens: coefficient_of_variation(years.iter().map(|y| y.ens_mwh)),
        converged: false,
    })
}

/// `(s / √N) / mean` of the yearly ENS samples.
pub(crate) fn coefficient_of_variation(samples: impl Iterator<Item = f64> + Clone) -> Option<f64> {
    let n = samples.clone().count();
    let mean = samples.clone().sum::<f64>() / n as f64;
    if mean == 0.0 {
        return Some(0.0);
    }
    if n < 2 {
        return None;
    }
    let var = samples.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some(var.sqrt() / (n as f64).sqrt() / mean)
}

/// Running sums for checking convergence after each added year.
#[derive(Debug, Clone, Default)]
pub(crate) struct RunningEens {
    n: usize,
    mean: f64,
    m2: f64,
}

impl RunningEens {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn cov(&self) -> Option<f64> {
        if self.mean == 0.0 {
            return Some(0.0);
        }
        if self.n < 2 {
            return None;
        }
        let s = (self.m2 / (self.n - 1) as f64).sqrt();
        Some(s / (self.n as f64).sqrt() / self.mean)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rec(hours: u32, mwh: f64) -> DisruptionRecord {
        DisruptionRecord {
            start_hour: 0,
            duration_hours: hours,
            energy_not_supplied_mwh: mwh,
        }
    }

    #[test]
    fn two_year_hand_example() {
        let ind = compute_indicators(&[vec![rec(10, 50.0)], vec![]]).unwrap();
        assert_relative_eq!(ind.eens, 25.0);
        assert_relative_eq!(ind.edns, 25.0 / 8760.0);
        assert_relative_eq!(ind.eflc, 0.5);
        assert_relative_eq!(ind.lole, 5.0);
        assert_relative_eq!(ind.lolp, 5.0 / 8760.0);
        assert_relative_eq!(ind.adlc, 10.0);
        assert!(!ind.adlc_undefined);
        // samples 50, 0: s = 35.355, se = 25, cov = 1
        assert_relative_eq!(ind.cov_eens.unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn no_disruptions_gives_zeros() {
        let ind = compute_indicators(&[vec![], vec![], vec![]]).unwrap();
        assert_eq!((ind.eens, ind.edns, ind.eflc, ind.lole, ind.lolp, ind.adlc), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert!(ind.adlc_undefined);
        assert_eq!(ind.cov_eens, Some(0.0));
    }

    #[test]
    fn edns_from_reference_eens() {
        let ind = indicators_from_summaries(&[YearSummary {
            ens_mwh: 126985.4,
            curtailed_hours: 1.0,
            disruptions: 1,
        }])
        .unwrap();
        assert!((ind.edns - 14.496).abs() < 5e-4);
        assert_eq!(ind.cov_eens, None);
    }

    #[test]
    fn running_matches_batch() {
        let xs = [3.0, 0.0, 12.5, 7.0, 0.0, 1.0];
        let mut r = RunningEens::default();
        for x in xs {
            r.push(x);
        }
        let batch = coefficient_of_variation(xs.iter().copied()).unwrap();
        assert_relative_eq!(r.cov().unwrap(), batch, max_relative = 1e-12);
    }

    #[test]
    fn zero_years_rejected() {
        assert!(compute_indicators(&[]).is_err());
    }
}
