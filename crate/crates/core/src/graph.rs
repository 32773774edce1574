//! Complete multipartite topologies, orientations over them, and exact
//! directed distances.
//!
//! Vertices are indexed part-major: part 0 occupies `[0, p0)`, part 1 the
//! next `p1` indices, and so on. Adjacency and orientations are stored as
//! one `u64` bitset per vertex, which caps a topology at [`MAX_VERTICES`].

use std::fmt;

use thiserror::Error;

/// Largest vertex count a topology may have (one machine word per row).
pub const MAX_VERTICES: usize = 64;

pub type VertexSet = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("part list is empty")]
    EmptyParts,
    #[error("part {0} has size zero")]
    ZeroPart(usize),
    #[error("{0} vertices exceed the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("arc {0}->{0} is a self loop")]
    SelfLoop(usize),
    #[error("arc {0}->{1} joins two vertices of the same part")]
    IntraPartArc(usize, usize),
    #[error("edge {{{0},{1}}} is oriented more than once")]
    DoubleOrientation(usize, usize),
    #[error("edge {{{0},{1}}} has no orientation")]
    MissingEdge(usize, usize),
    #[error("vertex set to keep is empty")]
    EmptyKeep,
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// A complete multipartite graph `K(p1, ..., pn)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphTopology {
    parts: Vec<usize>,
    part_of: Vec<usize>,
    part_start: Vec<usize>,
    part_mask: Vec<VertexSet>,
}

impl GraphTopology {
    pub fn new(parts: &[usize]) -> Result<Self> {
        if parts.is_empty() {
            return Err(GraphError::EmptyParts);
        }
        if let Some(i) = parts.iter().position(|&p| p == 0) {
            return Err(GraphError::ZeroPart(i));
        }
        let n: usize = parts.iter().sum();
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut part_of = Vec::with_capacity(n);
        let mut part_start = Vec::with_capacity(parts.len());
        let mut part_mask = Vec::with_capacity(parts.len());
        for (i, &p) in parts.iter().enumerate() {
            let start = part_of.len();
            part_start.push(start);
            part_mask.push(range_mask(start, start + p));
            part_of.extend(std::iter::repeat_n(i, p));
        }
        Ok(Self {
            parts: parts.to_vec(),
            part_of,
            part_start,
            part_mask,
        })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.part_of.len()
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v]
    }

    /// Vertex indices of part `i`.
    pub fn part_range(&self, i: usize) -> std::ops::Range<usize> {
        let s = self.part_start[i];
        s..s + self.parts[i]
    }

    pub fn part_mask(&self, i: usize) -> VertexSet {
        self.part_mask[i]
    }

    pub fn all_mask(&self) -> VertexSet {
        range_mask(0, self.n_vertices())
    }

    /// Neighbours of `v`: every vertex outside its part.
    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.all_mask() & !self.part_mask[self.part_of[v]]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.part_of[u] != self.part_of[v]
    }

    /// `(n^2 - sum p_i^2) / 2`.
    pub fn edge_count(&self) -> usize {
        let n = self.n_vertices();
        let sq: usize = self.parts.iter().map(|p| p * p).sum();
        (n * n - sq) / 2
    }

    /// All edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_vertices();
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..n {
            for v in u + 1..n {
                if self.adjacent(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Human label in the x/y/z naming: `x1`, `y3`, `z10`, ...
    pub fn label(&self, v: usize) -> String {
        const LETTERS: [char; 6] = ['x', 'y', 'z', 'w', 'u', 't'];
        let part = self.part_of[v];
        let idx = v - self.part_start[part] + 1;
        match LETTERS.get(part) {
            Some(c) => format!("{c}{idx}"),
            None => format!("p{}_{idx}", part + 1),
        }
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n_vertices() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v))
        }
    }
}

impl fmt::Display for GraphTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "K({})", parts.join(","))
    }
}

pub fn make_complete_multipartite(parts: &[usize]) -> Result<GraphTopology> {
    GraphTopology::new(parts)
}

pub(crate) fn range_mask(lo: usize, hi: usize) -> VertexSet {
    debug_assert!(lo <= hi && hi <= MAX_VERTICES);
    let upto = |k: usize| if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
    upto(hi) & !upto(lo)
}

pub(crate) fn bits(mut set: VertexSet) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let i = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(i)
        }
    })
}

/// Directed distance; `Infinite` sorts above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Infinite,
}

impl Distance {
    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// One direction for every inter-part edge of a topology.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orientation {
    topology: GraphTopology,
    out_adj: Vec<VertexSet>,
    in_adj: Vec<VertexSet>,
}

impl Orientation {
    /// Validates an arc list against `topology`.
    pub fn new(topology: GraphTopology, arcs: &[(usize, usize)]) -> Result<Self> {
        let n = topology.n_vertices();
        let mut out_adj = vec![0u64; n];
        let mut in_adj = vec![0u64; n];
        for &(u, v) in arcs {
            topology.check_vertex(u)?;
            topology.check_vertex(v)?;
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !topology.adjacent(u, v) {
                return Err(GraphError::IntraPartArc(u, v));
            }
            let covered = (out_adj[u] | in_adj[u]) >> v & 1 == 1;
            if covered {
                return Err(GraphError::DoubleOrientation(u.min(v), u.max(v)));
            }
            out_adj[u] |= 1 << v;
            in_adj[v] |= 1 << u;
        }
        for u in 0..n {
            let missing = topology.neighbors(u) & !(out_adj[u] | in_adj[u]);
            if missing != 0 {
                let v = missing.trailing_zeros() as usize;
                return Err(GraphError::MissingEdge(u.min(v), u.max(v)));
            }
        }
        Ok(Self {
            topology,
            out_adj,
            in_adj,
        })
    }

    /// Builds from out-neighbourhood rows that are already known to be a
    /// valid orientation.
    pub(crate) fn from_out_rows(topology: GraphTopology, out_adj: Vec<VertexSet>) -> Self {
        let n = topology.n_vertices();
        let mut in_adj = vec![0u64; n];
        for (u, &row) in out_adj.iter().enumerate() {
            for v in bits(row) {
                in_adj[v] |= 1 << u;
            }
        }
        debug_assert!((0..n).all(|u| {
            out_adj[u] & in_adj[u] == 0 && out_adj[u] | in_adj[u] == topology.neighbors(u)
        }));
        Self {
            topology,
            out_adj,
            in_adj,
        }
    }

    pub fn topology(&self) -> &GraphTopology {
        &self.topology
    }

    pub fn n_vertices(&self) -> usize {
        self.topology.n_vertices()
    }

    pub fn out_neighbors(&self, u: usize) -> VertexSet {
        self.out_adj[u]
    }

    pub fn in_neighbors(&self, v: usize) -> VertexSet {
        self.in_adj[v]
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out_adj[u] >> v & 1 == 1
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.topology.edge_count());
        for (u, &row) in self.out_adj.iter().enumerate() {
            out.extend(bits(row).map(|v| (u, v)));
        }
        out
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<Distance> {
        self.topology.check_vertex(u)?;
        self.topology.check_vertex(v)?;
        Ok(self.distance_unchecked(u, v))
    }

    fn distance_unchecked(&self, u: usize, v: usize) -> Distance {
        if u == v {
            return Distance::Finite(0);
        }
        let target = 1u64 << v;
        let mut seen = 1u64 << u;
        let mut frontier = seen;
        let mut d = 0;
        while frontier != 0 {
            d += 1;
            let next = self.expand(frontier) & !seen;
            if next & target != 0 {
                return Distance::Finite(d);
            }
            seen |= next;
            frontier = next;
        }
        Distance::Infinite
    }

    fn expand(&self, frontier: VertexSet) -> VertexSet {
        expand(&self.out_adj, frontier)
    }

    /// Eccentricity of `u`: the largest distance from `u`.
    pub fn eccentricity(&self, u: usize) -> Distance {
        eccentricity(&self.out_adj, u)
    }

    pub fn diameter(&self) -> Distance {
        rows_diameter(&self.out_adj)
    }

    /// `diameter() <= 2`, via `v in out(u)` or `out(u) & in(v) != 0`.
    pub fn has_diameter_at_most_2(&self) -> bool {
        let n = self.n_vertices();
        (0..n).all(|u| {
            (0..n).all(|v| u == v || self.has_arc(u, v) || self.out_adj[u] & self.in_adj[v] != 0)
        })
    }

    pub fn is_strong(&self) -> bool {
        let n = self.n_vertices();
        if n <= 1 {
            return true;
        }
        let all = self.topology.all_mask();
        let reach = |adj: &[VertexSet]| {
            let mut seen = 1u64;
            let mut frontier = seen;
            while frontier != 0 {
                let next = bits(frontier).fold(0, |acc, w| acc | adj[w]) & !seen;
                seen |= next;
                frontier = next;
            }
            seen
        };
        reach(&self.out_adj) == all && reach(&self.in_adj) == all
    }

    /// Restriction to `keep`. Empty parts are dropped and the result is
    /// re-indexed canonically; the returned map sends each new vertex index
    /// to its index in `self`.
    pub fn induced(&self, keep: &[usize]) -> Result<(Orientation, Vec<usize>)> {
        let mut mask = 0u64;
        for &v in keep {
            self.topology.check_vertex(v)?;
            mask |= 1 << v;
        }
        self.induced_mask(mask)
    }

    pub fn induced_mask(&self, keep: VertexSet) -> Result<(Orientation, Vec<usize>)> {
        let keep = keep & self.topology.all_mask();
        if keep == 0 {
            return Err(GraphError::EmptyKeep);
        }
        let map: Vec<usize> = bits(keep).collect();
        let parts: Vec<usize> = (0..self.topology.n_parts())
            .map(|i| (self.topology.part_mask(i) & keep).count_ones() as usize)
            .filter(|&c| c > 0)
            .collect();
        let topology = GraphTopology::new(&parts)?;
        let mut rows = vec![0u64; map.len()];
        for (i, &u) in map.iter().enumerate() {
            for (j, &v) in map.iter().enumerate() {
                if self.has_arc(u, v) {
                    rows[i] |= 1 << j;
                }
            }
        }
        Ok((Orientation::from_out_rows(topology, rows), map))
    }

    /// Every arc flipped.
    pub fn reverse(&self) -> Orientation {
        Orientation {
            topology: self.topology.clone(),
            out_adj: self.in_adj.clone(),
            in_adj: self.out_adj.clone(),
        }
    }
}

fn expand(rows: &[VertexSet], frontier: VertexSet) -> VertexSet {
    bits(frontier).fold(0, |acc, w| acc | rows[w])
}

fn eccentricity(rows: &[VertexSet], u: usize) -> Distance {
    let all = range_mask(0, rows.len());
    let mut seen = 1u64 << u;
    let mut frontier = seen;
    let mut d = 0;
    while seen != all {
        let next = expand(rows, frontier) & !seen;
        if next == 0 {
            return Distance::Infinite;
        }
        d += 1;
        seen |= next;
        frontier = next;
    }
    Distance::Finite(d)
}

/// Diameter of the digraph given by out-neighbourhood rows.
pub(crate) fn rows_diameter(rows: &[VertexSet]) -> Distance {
    let mut best = Distance::Finite(0);
    for u in 0..rows.len() {
        let e = eccentricity(rows, u);
        if e == Distance::Infinite {
            return e;
        }
        best = best.max(e);
    }
    best
}

pub fn orient(topology: GraphTopology, arcs: &[(usize, usize)]) -> Result<Orientation> {
    Orientation::new(topology, arcs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3_cycle() -> Orientation {
        let t = GraphTopology::new(&[1, 1, 1]).unwrap();
        Orientation::new(t, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn topology_counts() {
        let t = GraphTopology::new(&[3, 3, 6]).unwrap();
        assert_eq!(t.n_vertices(), 12);
        assert_eq!(t.edge_count(), 45);
        assert_eq!(t.edges().len(), 45);
        let t = GraphTopology::new(&[1, 1, 1]).unwrap();
        assert_eq!(t.edge_count(), 3);
        let t = GraphTopology::new(&[3, 4, 11]).unwrap();
        assert_eq!((t.n_vertices(), t.edge_count()), (18, 89));
        assert_eq!(t.part_range(1), 3..7);
        assert_eq!(t.label(7), "z1");
    }

    #[test]
    fn topology_errors() {
        assert_eq!(GraphTopology::new(&[]), Err(GraphError::EmptyParts));
        assert_eq!(GraphTopology::new(&[2, 0]), Err(GraphError::ZeroPart(1)));
        assert_eq!(
            GraphTopology::new(&[40, 30]),
            Err(GraphError::TooManyVertices(70))
        );
        assert!(GraphTopology::new(&[32, 32]).is_ok());
    }

    #[test]
    fn orient_errors() {
        let k3 = GraphTopology::new(&[1, 1, 1]).unwrap();
        assert_eq!(
            Orientation::new(k3.clone(), &[(0, 1), (1, 0), (1, 2), (2, 0)]),
            Err(GraphError::DoubleOrientation(0, 1))
        );
        assert_eq!(
            Orientation::new(k3.clone(), &[(0, 0)]),
            Err(GraphError::SelfLoop(0))
        );
        assert_eq!(
            Orientation::new(k3, &[(0, 5)]),
            Err(GraphError::VertexOutOfRange(5))
        );
        let k12 = GraphTopology::new(&[1, 2]).unwrap();
        assert_eq!(
            Orientation::new(k12.clone(), &[(0, 1)]),
            Err(GraphError::MissingEdge(0, 2))
        );
        assert_eq!(
            Orientation::new(k12, &[(1, 2)]),
            Err(GraphError::IntraPartArc(1, 2))
        );
    }

    #[test]
    fn cycle_distances() {
        let d = k3_cycle();
        assert_eq!(d.distance(0, 2).unwrap(), Distance::Finite(2));
        assert_eq!(d.distance(1, 1).unwrap(), Distance::Finite(0));
        assert_eq!(d.diameter(), Distance::Finite(2));
        assert!(d.is_strong());
        assert!(d.has_diameter_at_most_2());
        assert_eq!(d.reverse().arcs(), vec![(0, 2), (1, 0), (2, 1)]);
        assert_eq!(d.reverse().reverse(), d);
    }

    #[test]
    fn sink_is_infinite() {
        // every arc points into vertex 0
        let t = GraphTopology::new(&[1, 3]).unwrap();
        let d = Orientation::new(t, &[(1, 0), (2, 0), (3, 0)]).unwrap();
        assert_eq!(d.distance(0, 1).unwrap(), Distance::Infinite);
        assert_eq!(d.diameter(), Distance::Infinite);
        assert!(!d.is_strong());
        // a source is just as bad
        let r = d.reverse();
        assert!(!r.is_strong());
        assert_eq!(r.eccentricity(1), Distance::Infinite);
    }

    #[test]
    fn induced_drops_empty_parts() {
        let d = k3_cycle();
        let (sub, map) = d.induced(&[2]).unwrap();
        assert_eq!(sub.topology().parts(), &[1]);
        assert_eq!(sub.arcs(), vec![]);
        assert_eq!(map, vec![2]);
        let (sub, map) = d.induced(&[2, 0]).unwrap();
        assert_eq!(map, vec![0, 2]);
        assert_eq!(sub.arcs(), vec![(1, 0)]);
        assert_eq!(d.induced(&[]), Err(GraphError::EmptyKeep));
    }

    #[test]
    fn distance_ordering() {
        assert!(Distance::Finite(u32::MAX) < Distance::Infinite);
        assert_eq!(Distance::Infinite.to_string(), "inf");
    }
}
