//! DIMACS encoding of "some orientation has diameter at most 2".
//!
//! Variables, in numbering order:
//!
//! 1. one per edge `(lo, hi)` in lexicographic order, true meaning `lo -> hi`;
//! 2. one 2-path variable `a(u,w,v)` per ordered pair `(u, v)` (pairs in
//!    lexicographic order) and common neighbour `w` (ascending), with
//!    `a(u,w,v) <-> (u -> w and w -> v)`;
//! 3. prefix-equality variables for the lexicographic row constraints
//!    between consecutive vertices of the same part.
//!
//! With `P` path variables, `n` vertices and row constraints over `m_k`
//! positions, the instance has `E + P + sum (m_k - 1)` variables and
//! `n(n-1) + 3P + sum (3 m_k - 2)` clauses.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::graph::{bits, GraphTopology, Orientation};

use super::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CnfStats {
    pub variables: usize,
    pub clauses: usize,
    pub edge_variables: usize,
    pub path_variables: usize,
    pub symmetry_variables: usize,
}

#[derive(Debug, Clone)]
pub struct Cnf {
    pub topology: GraphTopology,
    pub clauses: Vec<Vec<i32>>,
    pub stats: CnfStats,
}

struct EdgeVars {
    n: usize,
    index: Vec<i32>,
}

impl EdgeVars {
    fn new(t: &GraphTopology) -> Self {
        let n = t.n_vertices();
        let mut index = vec![0; n * n];
        for (e, (lo, hi)) in t.edges().into_iter().enumerate() {
            index[lo * n + hi] = e as i32 + 1;
        }
        Self { n, index }
    }

    /// Literal true iff `u -> v`.
    fn arc(&self, u: usize, v: usize) -> i32 {
        if u < v {
            self.index[u * self.n + v]
        } else {
            -self.index[v * self.n + u]
        }
    }
}

pub fn encode_cnf(t: &GraphTopology) -> Cnf {
    let n = t.n_vertices();
    let edges = t.edge_count();
    let ev = EdgeVars::new(t);
    let mut next_var = edges as i32;
    let mut clauses = Vec::new();

    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let mut cover = Vec::new();
            if t.adjacent(u, v) {
                cover.push(ev.arc(u, v));
            }
            for w in bits(t.neighbors(u) & t.neighbors(v)) {
                next_var += 1;
                let a = next_var;
                let (uw, wv) = (ev.arc(u, w), ev.arc(w, v));
                clauses.push(vec![-a, uw]);
                clauses.push(vec![-a, wv]);
                clauses.push(vec![a, -uw, -wv]);
                cover.push(a);
            }
            clauses.push(cover);
        }
    }
    let path_variables = next_var as usize - edges;

    for a in 0..n.saturating_sub(1) {
        let b = a + 1;
        if t.part_of(a) != t.part_of(b) {
            continue;
        }
        let row: Vec<(i32, i32)> = bits(t.neighbors(a))
            .map(|w| (ev.arc(a.min(w), a.max(w)), ev.arc(b.min(w), b.max(w))))
            .collect();
        let mut prefix_equal: Option<i32> = None;
        for (k, &(x, y)) in row.iter().enumerate() {
            let guard: Vec<i32> = prefix_equal.map(|e| -e).into_iter().collect();
            clauses.push([guard.as_slice(), &[-x, y]].concat());
            if k + 1 < row.len() {
                next_var += 1;
                let e = next_var;
                clauses.push([guard.as_slice(), &[x, y, e]].concat());
                clauses.push([guard.as_slice(), &[-x, -y, e]].concat());
                prefix_equal = Some(e);
            }
        }
    }

    let variables = next_var as usize;
    let stats = CnfStats {
        variables,
        clauses: clauses.len(),
        edge_variables: edges,
        path_variables,
        symmetry_variables: variables - edges - path_variables,
    };
    Cnf {
        topology: t.clone(),
        clauses,
        stats,
    }
}

impl Cnf {
    pub fn write_dimacs<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "c orientation of {} with diameter at most 2",
            self.topology
        )?;
        writeln!(
            w,
            "c variables 1..{} are edges (lo,hi) in lexicographic order, true = lo->hi",
            self.stats.edge_variables
        )?;
        writeln!(w, "p cnf {} {}", self.stats.variables, self.stats.clauses)?;
        for clause in &self.clauses {
            for lit in clause {
                write!(w, "{lit} ")?;
            }
            writeln!(w, "0")?;
        }
        Ok(())
    }
}

pub fn export_cnf(parts: &[usize], out: &Path) -> Result<CnfStats> {
    let t = GraphTopology::new(parts)?;
    let cnf = encode_cnf(&t);
    let file = std::fs::File::create(out)?;
    let mut w = io::BufWriter::new(file);
    cnf.write_dimacs(&mut w)?;
    w.flush()?;
    Ok(cnf.stats)
}

/// Reads the orientation off a model; `model[i]` is the value of variable
/// `i + 1`.
pub fn decode_model(t: &GraphTopology, model: &[bool]) -> Orientation {
    let n = t.n_vertices();
    let mut rows = vec![0u64; n];
    for (e, (lo, hi)) in t.edges().into_iter().enumerate() {
        if model[e] {
            rows[lo] |= 1 << hi;
        } else {
            rows[hi] |= 1 << lo;
        }
    }
    Orientation::from_out_rows(t.clone(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_counts() {
        let t = GraphTopology::new(&[1, 1, 1]).unwrap();
        let cnf = encode_cnf(&t);
        // 6 ordered pairs, one middle vertex each
        assert_eq!(cnf.stats.edge_variables, 3);
        assert_eq!(cnf.stats.path_variables, 6);
        assert_eq!(cnf.stats.symmetry_variables, 0);
        assert_eq!(cnf.stats.clauses, 6 + 18);
    }

    #[test]
    fn dimacs_header() {
        let t = GraphTopology::new(&[1, 2]).unwrap();
        let cnf = encode_cnf(&t);
        let mut buf = Vec::new();
        cnf.write_dimacs(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = format!("p cnf {} {}", cnf.stats.variables, cnf.stats.clauses);
        assert!(text.lines().any(|l| l == header));
        let body = text
            .lines()
            .filter(|l| !l.starts_with('c') && !l.starts_with('p'));
        assert_eq!(body.clone().count(), cnf.stats.clauses);
        assert!(body.into_iter().all(|l| l.ends_with('0')));
    }
}
