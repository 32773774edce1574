//! Full enumeration of orientations for tiny topologies.

use crate::graph::{rows_diameter, Distance, GraphTopology, Orientation, VertexSet};
use crate::par;

use super::{Result, SearchError};

pub const BRUTE_FORCE_MAX_EDGES: usize = 20;
pub const ENUMERATE_MAX_EDGES: usize = 16;

fn check_edges(t: &GraphTopology, cap: usize) -> Result<usize> {
    let edges = t.edge_count();
    if edges > cap {
        return Err(SearchError::TooManyEdges { edges, cap });
    }
    Ok(edges)
}

/// Out-rows of orientation number `code`: bit `E - 1 - e` of `code` is the
/// value of edge `e` (lexicographic edge order), `1` meaning `lo -> hi`.
/// Counting `code` upward therefore walks orientations in lexicographic
/// order of their edge values.
fn rows_for(edges: &[(usize, usize)], n: usize, code: u64) -> Vec<VertexSet> {
    let m = edges.len();
    let mut rows = vec![0u64; n];
    for (e, &(lo, hi)) in edges.iter().enumerate() {
        if code >> (m - 1 - e) & 1 == 1 {
            rows[lo] |= 1 << hi;
        } else {
            rows[hi] |= 1 << lo;
        }
    }
    rows
}

/// Calls `visit` on every orientation of `t`, in lexicographic order.
/// Sequential; meant for test oracles.
pub fn for_each_orientation(t: &GraphTopology, mut visit: impl FnMut(&Orientation)) -> Result<()> {
    let m = check_edges(t, BRUTE_FORCE_MAX_EDGES)?;
    let edges = t.edges();
    for code in 0..1u64 << m {
        let d = Orientation::from_out_rows(t.clone(), rows_for(&edges, t.n_vertices(), code));
        visit(&d);
    }
    Ok(())
}

/// Oriented diameter by exhaustive enumeration. `Infinite` when no
/// orientation is strong.
pub fn brute_force_min_diameter(t: &GraphTopology, threads: usize) -> Result<Distance> {
    let m = check_edges(t, BRUTE_FORCE_MAX_EDGES)?;
    let edges = t.edges();
    let n = t.n_vertices();
    let per_chunk = par::map_chunks(1u64 << m, threads, |range| {
        let mut best = Distance::Infinite;
        for code in range {
            best = best.min(rows_diameter(&rows_for(&edges, n, code)));
        }
        best
    });
    Ok(per_chunk.into_iter().min().unwrap_or(Distance::Infinite))
}

/// Orientations of diameter exactly 2, in lexicographic order, stopping
/// after `limit` when one is given.
pub fn enumerate_diameter2(
    t: &GraphTopology,
    limit: Option<usize>,
    threads: usize,
) -> Result<Vec<Orientation>> {
    let m = check_edges(t, ENUMERATE_MAX_EDGES)?;
    let edges = t.edges();
    let n = t.n_vertices();
    let per_chunk = par::map_chunks(1u64 << m, threads, |range| {
        let mut found = Vec::new();
        for code in range {
            let rows = rows_for(&edges, n, code);
            if rows_diameter(&rows) == Distance::Finite(2) {
                found.push(Orientation::from_out_rows(t.clone(), rows));
                if limit.is_some_and(|l| found.len() >= l) {
                    break;
                }
            }
        }
        found
    });
    let mut all: Vec<Orientation> = per_chunk.into_iter().flatten().collect();
    if let Some(l) = limit {
        all.truncate(l);
    }
    Ok(all)
}
