//! Network data model: buses, lines, generators, loads and topology states.
//!
//! Identifiers are 1-based and contiguous once a case has been built, so
//! `id.index()` addresses the corresponding vector slot directly.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hours in the simulated year.
pub const HOURS_PER_YEAR: f64 = 8760.0;

macro_rules! id_newtype {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            /// Zero-based slot of this id in a normalized case.
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize - 1
            }

            #[inline]
            pub fn from_index(index: usize) -> Self {
                $name(index as u32 + 1)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_newtype!(BusId, "Bus identifier.");
id_newtype!(LineId, "Line (or transformer) identifier.");
id_newtype!(GenId, "Generating unit identifier.");

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: BusId,
    pub name: String,
}

/// A transmission line or transformer, both modeled as a series susceptance.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub id: LineId,
    pub from_bus: BusId,
    pub to_bus: BusId,
    /// Series susceptance in per unit on the case MVA base.
    pub susceptance: f64,
    /// Thermal rating, MW.
    pub rating: f64,
    /// Failures per year.
    pub failure_rate: f64,
    /// Repairs per year.
    pub repair_rate: f64,
}

impl Line {
    /// Whether `bus` is one of the two terminals.
    pub fn touches(&self, bus: BusId) -> bool {
        self.from_bus == bus || self.to_bus == bus
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub id: GenId,
    pub bus: BusId,
    pub p_min: f64,
    pub p_max: f64,
    pub failure_rate: f64,
    pub repair_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Load {
    pub bus: BusId,
    pub p_peak: f64,
}

/// A validated, immutable network case.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkCase {
    base_mva: f64,
    buses: Vec<Bus>,
    lines: Vec<Line>,
    generators: Vec<Generator>,
    loads: Vec<Load>,
    load_profile: Option<Vec<f64>>,
    variant_label: Option<String>,
    /// Peak demand per bus, MW.
    bus_demand: Vec<f64>,
}

impl NetworkCase {
    /// Builds a case, checking every model invariant.
    ///
    /// Buses, lines and generators must already carry contiguous 1-based
    /// ids in vector order; [`crate::case_file::load_case`] renumbers raw
    /// input before calling this.
    pub fn new(
        base_mva: f64,
        buses: Vec<Bus>,
        lines: Vec<Line>,
        generators: Vec<Generator>,
        loads: Vec<Load>,
        load_profile: Option<Vec<f64>>,
        variant_label: Option<String>,
    ) -> Result<Self> {
        if !(base_mva.is_finite() && base_mva > 0.0) {
            return Err(Error::validation("base_mva", "must be positive"));
        }
        if buses.is_empty() {
            return Err(Error::validation("buses", "at least one bus is required"));
        }
        for (i, bus) in buses.iter().enumerate() {
            if bus.id != BusId::from_index(i) {
                return Err(Error::validation(
                    format!("buses[{i}]"),
                    format!("id {} is not contiguous (expected {})", bus.id, i + 1),
                ));
            }
        }
        let n_bus = buses.len();
        let known = |b: BusId| b.0 >= 1 && b.index() < n_bus;

        for (i, line) in lines.iter().enumerate() {
            let rec = format!("lines[{i}] (id {})", line.id);
            if line.id != LineId::from_index(i) {
                return Err(Error::validation(rec, "line ids must be contiguous from 1"));
            }
            for b in [line.from_bus, line.to_bus] {
                if !known(b) {
                    return Err(Error::validation(rec, format!("references unknown bus {b}")));
                }
            }
            if line.from_bus == line.to_bus {
                return Err(Error::validation(rec, "from and to bus coincide"));
            }
            if !(line.susceptance.is_finite() && line.susceptance > 0.0) {
                return Err(Error::validation(rec, "b_pu must be positive"));
            }
            if !(line.rating.is_finite() && line.rating > 0.0) {
                return Err(Error::validation(rec, "rating_mw must be positive"));
            }
            check_rates(&rec, line.failure_rate, line.repair_rate)?;
        }
        for (i, g) in generators.iter().enumerate() {
            let rec = format!("generators[{i}] (id {})", g.id);
            if g.id != GenId::from_index(i) {
                return Err(Error::validation(rec, "generator ids must be contiguous from 1"));
            }
            if !known(g.bus) {
                return Err(Error::validation(rec, format!("references unknown bus {}", g.bus)));
            }
            if !(g.p_min.is_finite() && g.p_max.is_finite() && 0.0 <= g.p_min && g.p_min <= g.p_max)
            {
                return Err(Error::validation(rec, "requires 0 <= pmin_mw <= pmax_mw"));
            }
            check_rates(&rec, g.failure_rate, g.repair_rate)?;
        }
        let mut bus_demand = vec![0.0; n_bus];
        for (i, load) in loads.iter().enumerate() {
            let rec = format!("loads[{i}] (bus {})", load.bus);
            if !known(load.bus) {
                return Err(Error::validation(rec, format!("references unknown bus {}", load.bus)));
            }
            if !(load.p_peak.is_finite() && load.p_peak >= 0.0) {
                return Err(Error::validation(rec, "peak_mw must be non-negative"));
            }
            bus_demand[load.bus.index()] += load.p_peak;
        }
        if let Some(profile) = &load_profile {
            if profile.len() != 8760 {
                return Err(Error::validation(
                    "profile_8760",
                    format!("expected 8760 factors, found {}", profile.len()),
                ));
            }
            if let Some(h) = profile.iter().position(|f| !(f.is_finite() && *f >= 0.0)) {
                return Err(Error::validation(
                    format!("profile_8760[{h}]"),
                    "factor must be finite and non-negative",
                ));
            }
        }

        Ok(NetworkCase {
            base_mva,
            buses,
            lines,
            generators,
            loads,
            load_profile,
            variant_label,
            bus_demand,
        })
    }

    pub fn base_mva(&self) -> f64 {
        self.base_mva
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn loads(&self) -> &[Load] {
        &self.loads
    }

    pub fn load_profile(&self) -> Option<&[f64]> {
        self.load_profile.as_deref()
    }

    pub fn variant_label(&self) -> Option<&str> {
        self.variant_label.as_deref()
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn line(&self, id: LineId) -> Result<&Line> {
        if id.0 == 0 {
            return Err(Error::UnknownLine(id));
        }
        self.lines.get(id.index()).ok_or(Error::UnknownLine(id))
    }

    pub fn has_bus(&self, id: BusId) -> bool {
        id.0 >= 1 && id.index() < self.buses.len()
    }

    /// Peak demand aggregated per bus, MW.
    pub fn bus_demand(&self) -> &[f64] {
        &self.bus_demand
    }

    pub fn total_peak_load(&self) -> f64 {
        self.loads.iter().map(|l| l.p_peak).sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.generators.iter().map(|g| g.p_max).sum()
    }

    /// Hourly load factor; constant 1.0 without a profile.
    pub fn load_factor(&self, hour: usize) -> f64 {
        match &self.load_profile {
            Some(p) => p[hour % p.len()],
            None => 1.0,
        }
    }

    pub(crate) fn with_extra_lines(&self, extra: Vec<Line>, label: Option<String>) -> Result<Self> {
        let mut lines = self.lines.clone();
        lines.extend(extra);
        NetworkCase::new(
            self.base_mva,
            self.buses.clone(),
            lines,
            self.generators.clone(),
            self.loads.clone(),
            self.load_profile.clone(),
            label,
        )
    }

    /// A copy of this case with the hourly profile replaced (or removed).
    pub fn with_load_profile(&self, profile: Option<Vec<f64>>) -> Result<Self> {
        NetworkCase::new(
            self.base_mva,
            self.buses.clone(),
            self.lines.clone(),
            self.generators.clone(),
            self.loads.clone(),
            profile,
            self.variant_label.clone(),
        )
    }
}

fn check_rates(record: &str, lambda: f64, mu: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::validation(record, "lambda_per_yr must be non-negative"));
    }
    if !(mu.is_finite() && mu >= 0.0) || (lambda > 0.0 && mu <= 0.0) {
        return Err(Error::validation(
            record,
            "mu_per_yr must be positive when lambda_per_yr is positive",
        ));
    }
    Ok(())
}

/// Line closure and generator availability for one operating condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopologyState {
    /// `true` = closed.
    pub line_status: Vec<bool>,
    /// `true` = available.
    pub generator_status: Vec<bool>,
}

impl TopologyState {
    /// Every line closed, every unit available.
    pub fn intact(case: &NetworkCase) -> Self {
        TopologyState {
            line_status: vec![true; case.line_count()],
            generator_status: vec![true; case.generator_count()],
        }
    }

    pub fn all_open(case: &NetworkCase) -> Self {
        TopologyState {
            line_status: vec![false; case.line_count()],
            generator_status: vec![true; case.generator_count()],
        }
    }

    pub fn check_against(&self, case: &NetworkCase) -> Result<()> {
        if self.line_status.len() != case.line_count() {
            return Err(Error::Precondition(format!(
                "topology state has {} line entries, case has {} lines",
                self.line_status.len(),
                case.line_count()
            )));
        }
        if self.generator_status.len() != case.generator_count() {
            return Err(Error::Precondition(format!(
                "topology state has {} generator entries, case has {} generators",
                self.generator_status.len(),
                case.generator_count()
            )));
        }
        Ok(())
    }

    pub fn is_closed(&self, line: LineId) -> bool {
        self.line_status[line.index()]
    }

    pub fn open_lines(&self) -> Vec<LineId> {
        self.line_status
            .iter()
            .enumerate()
            .filter(|(_, closed)| !**closed)
            .map(|(i, _)| LineId::from_index(i))
            .collect()
    }

    pub fn all_lines_closed(&self) -> bool {
        self.line_status.iter().all(|c| *c)
    }

    pub fn with_lines_open(mut self, lines: impl IntoIterator<Item = LineId>) -> Self {
        for l in lines {
            self.line_status[l.index()] = false;
        }
        self
    }

    pub fn with_lines_closed(mut self, lines: impl IntoIterator<Item = LineId>) -> Self {
        for l in lines {
            self.line_status[l.index()] = true;
        }
        self
    }
}

/// Buses grouped into islands, plus the isolated single buses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IslandPartition {
    /// Connected components in ascending order of their smallest bus id;
    /// each island is sorted. Singletons are included.
    pub islands: Vec<Vec<BusId>>,
    /// Buses with no closed incident line.
    pub isolated: Vec<BusId>,
}

impl IslandPartition {
    pub fn island_count(&self) -> usize {
        self.islands.len()
    }

    /// Island index of every bus.
    pub fn membership(&self, n_bus: usize) -> Vec<usize> {
        let mut of = vec![usize::MAX; n_bus];
        for (k, island) in self.islands.iter().enumerate() {
            for b in island {
                of[b.index()] = k;
            }
        }
        of
    }

    /// Islands are disjoint and cover exactly `n_bus` buses.
    pub fn is_partition_of(&self, n_bus: usize) -> bool {
        let mut seen = HashSet::new();
        for b in self.islands.iter().flatten() {
            if !seen.insert(*b) {
                return false;
            }
        }
        seen.len() == n_bus
    }
}
