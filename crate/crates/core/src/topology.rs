//! Topology queries: line incidence and island detection.

use crate::error::{Error, Result};
use crate::model::{BusId, IslandPartition, LineId, NetworkCase, TopologyState};

/// Lines with `bus` as one terminal, ascending by id.
pub fn incident_lines(case: &NetworkCase, bus: BusId) -> Result<Vec<LineId>> {
    if !case.has_bus(bus) {
        return Err(Error::UnknownBus(bus));
    }
    Ok(case
        .lines()
        .iter()
        .filter(|l| l.touches(bus))
        .map(|l| l.id)
        .collect())
}

/// Partitions buses into islands over closed lines using depth-first search.
///
/// Islands are ordered by their smallest bus id and each island is sorted.
pub fn connected_components(case: &NetworkCase, state: &TopologyState) -> IslandPartition {
    components_by_status(case, &state.line_status)
}

pub(crate) fn components_by_status(case: &NetworkCase, line_closed: &[bool]) -> IslandPartition {
    let n = case.bus_count();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (line, closed) in case.lines().iter().zip(line_closed) {
        if *closed {
            let (a, b) = (line.from_bus.index(), line.to_bus.index());
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }

    let mut visited = vec![false; n];
    let mut islands = Vec::new();
    let mut isolated = Vec::new();
    let mut stack = Vec::new();
    // Scanning roots in ascending order yields islands ordered by minimum id.
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        stack.push(root);
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(BusId::from_index(u));
            for &v in &adjacency[u] {
                if !visited[v] {
                    visited[v] = true;
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        if adjacency[root].is_empty() {
            isolated.push(BusId::from_index(root));
        }
        islands.push(members);
    }

    IslandPartition { islands, isolated }
}
