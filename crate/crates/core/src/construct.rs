//! Explicit diameter-2 orientations of `K(3,3,q)` (`3 <= q <= 6`) and
//! `K(3,4,q)` (`4 <= q <= 11`), middle-layer orientations of `K(p,q)`, and
//! small-diameter tournaments.
//!
//! Every builder checks the diameter of what it built before returning it.
//! Where a recipe leaves arc directions open, the builder fixes a default,
//! and only if that default fails searches the open arcs; both the default
//! and any fallback land in the completion log.

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{binomial, SignVector};
use crate::graph::{Distance, GraphError, GraphTopology, Orientation, VertexSet};
use crate::search::{self, SearchConfig, SearchError, Verdict};

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("q = {q} is outside the supported range {lo}..={hi}")]
    QOutOfRange { q: usize, lo: usize, hi: usize },
    #[error("q = {q} exceeds the antichain threshold C({p},{}) = {limit}", p / 2)]
    ThresholdExceeded { p: usize, q: usize, limit: u64 },
    #[error("n = {0} is too small, need n >= 3")]
    NTooSmall(usize),
    #[error("no construction for parts {0:?}")]
    NoScheme(Vec<usize>),
    #[error("built orientation has diameter {got}, expected {want}")]
    WrongDiameter { got: Distance, want: Distance },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub type Result<T, E = ConstructError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    K33q,
    K34q,
    MiddleLayerBipartite,
    CompleteGraph,
}

/// A built orientation together with the choices made while building it.
#[derive(Debug, Clone)]
pub struct Construction {
    pub family: Family,
    pub q: usize,
    pub orientation: Orientation,
    pub completion_log: Vec<String>,
}

/// Accumulates arcs as out-rows over a fixed topology.
struct ArcBuilder {
    topology: GraphTopology,
    rows: Vec<VertexSet>,
}

impl ArcBuilder {
    fn new(parts: &[usize]) -> Result<Self> {
        let topology = GraphTopology::new(parts)?;
        let rows = vec![0; topology.n_vertices()];
        Ok(Self { topology, rows })
    }

    fn arc(&mut self, u: usize, v: usize) {
        debug_assert!(self.rows[v] >> u & 1 == 0, "{u}->{v} set both ways");
        self.rows[u] |= 1 << v;
    }

    fn arcs(&mut self, from: &[usize], to: &[usize]) {
        for &u in from {
            for &v in to {
                self.arc(u, v);
            }
        }
    }

    fn cycle4(&mut self, a: usize, b: usize, c: usize, d: usize) {
        self.arc(a, b);
        self.arc(b, c);
        self.arc(c, d);
        self.arc(d, a);
    }

    /// Orients the anchor edges of `z` according to its sign vector.
    fn signs(&mut self, anchors: [usize; 3], z: usize, s: SignVector) {
        for (k, &x) in anchors.iter().enumerate() {
            if s.sign(k) {
                self.arc(x, z);
            } else {
                self.arc(z, x);
            }
        }
    }

    fn finish(self) -> Result<Orientation> {
        let arcs: Vec<(usize, usize)> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(u, &row)| crate::graph::bits(row).map(move |v| (u, v)))
            .collect();
        Ok(Orientation::new(self.topology, &arcs)?)
    }
}

fn sv(s: &str) -> SignVector {
    s.parse().expect("literal sign vector")
}

fn expect_diameter(d: &Orientation, want: u32) -> Result<()> {
    let got = d.diameter();
    if got == Distance::Finite(want) {
        Ok(())
    } else {
        Err(ConstructError::WrongDiameter {
            got,
            want: Distance::Finite(want),
        })
    }
}

/// Flips subsets of `open` arcs (as listed, then reversed) until the
/// diameter is 2. Returns the flip mask used.
fn complete_open_arcs(base: &Orientation, open: &[(usize, usize)]) -> Result<(Orientation, u64)> {
    assert!(open.len() <= 16);
    for mask in 0..1u64 << open.len() {
        let mut arcs = base.arcs();
        for (i, &(u, v)) in open.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let pos = arcs
                    .iter()
                    .position(|&a| a == (u, v))
                    .expect("open arc present");
                arcs[pos] = (v, u);
            }
        }
        let d = Orientation::new(base.topology().clone(), &arcs)?;
        if d.diameter() == Distance::Finite(2) {
            return Ok((d, mask));
        }
    }
    Err(ConstructError::WrongDiameter {
        got: base.diameter(),
        want: Distance::Finite(2),
    })
}

fn check_range(q: usize, lo: usize, hi: usize) -> Result<()> {
    if (lo..=hi).contains(&q) {
        Ok(())
    } else {
        Err(ConstructError::QOutOfRange { q, lo, hi })
    }
}

const X: [usize; 3] = [0, 1, 2];

/// Diameter-2 orientation of `K(3,3,3)` found by `decide_diameter2` with
/// default settings, stored as out-rows.
const K333_ROWS: [VertexSet; 9] = [448, 288, 400, 7, 67, 197, 14, 26, 56];

fn k333() -> Result<Construction> {
    let t = GraphTopology::new(&[3, 3, 3])?;
    let arcs: Vec<(usize, usize)> = K333_ROWS
        .iter()
        .enumerate()
        .flat_map(|(u, &row)| crate::graph::bits(row).map(move |v| (u, v)))
        .collect();
    let d = Orientation::new(t, &arcs)?;
    expect_diameter(&d, 2)?;
    Ok(Construction {
        family: Family::K33q,
        q: 3,
        orientation: d,
        completion_log: vec![
            "q=3: fixed arc table taken from an exhaustive diameter-2 search of K(3,3,3)".into(),
        ],
    })
}

/// `K(3,3,6)`. Part 3 order: `+++`, `+--` (2), `-+-` (2), `---`.
fn k336() -> Result<Construction> {
    let mut b = ArcBuilder::new(&[3, 3, 6])?;
    let (y1, y2, y3) = (3, 4, 5);
    let z: Vec<usize> = (6..12).collect();
    b.arcs(&[y2, y3], &[X[0], X[1]]);
    b.arcs(&[X[0], X[1]], &[y1]);
    b.arc(y1, X[2]);
    b.arcs(&[X[2]], &[y2, y3]);
    for (&zi, s) in z.iter().zip(["+++", "+--", "+--", "-+-", "-+-", "---"]) {
        b.signs(X, zi, sv(s));
    }
    b.arc(z[0], y1);
    b.arcs(&[y1], &z[1..]);
    b.arcs(&[z[0]], &[y2, y3]);
    b.arcs(&[y2, y3], &[z[5]]);
    b.cycle4(y2, z[1], y3, z[2]);
    b.cycle4(y2, z[3], y3, z[4]);
    let base = b.finish()?;
    let mut log = vec![
        "q=6: 4-cycles y2->z2->y3->z3->y2 (class +--) and y2->z4->y3->z5->y2 (class -+-)".into(),
    ];
    let d = if base.diameter() == Distance::Finite(2) {
        base
    } else {
        let open: Vec<(usize, usize)> = [y2, y3]
            .iter()
            .flat_map(|&y| z[1..5].iter().map(move |&zz| (y, zz)))
            .map(|(y, zz)| {
                if base.has_arc(y, zz) {
                    (y, zz)
                } else {
                    (zz, y)
                }
            })
            .collect();
        let (d, mask) = complete_open_arcs(&base, &open)?;
        log.push(format!(
            "q=6: default 4-cycles failed; flipped open arcs by mask {mask:#b}"
        ));
        d
    };
    expect_diameter(&d, 2)?;
    Ok(Construction {
        family: Family::K33q,
        q: 6,
        orientation: d,
        completion_log: log,
    })
}

/// `K(3,3,4)`. Part 3 order: `+++`, `++-`, `+-+`, `+--`.
fn k334() -> Result<Construction> {
    let mut b = ArcBuilder::new(&[3, 3, 4])?;
    let (y1, y2, y3) = (3, 4, 5);
    let z = [6, 7, 8, 9];
    b.arcs(&[y1, y2, y3], &[X[0]]);
    b.arcs(&[y2, y3], &[X[1]]);
    b.arc(X[1], y1);
    b.arcs(&[y1, y3], &[X[2]]);
    b.arc(X[2], y2);
    for (&zi, s) in z.iter().zip(["+++", "++-", "+-+", "+--"]) {
        b.signs(X, zi, sv(s));
    }
    b.arcs(&[z[0], z[1]], &[y1]);
    b.arcs(&[y1], &[z[2], z[3]]);
    b.arcs(&[z[0], z[2]], &[y2]);
    b.arcs(&[y2], &[z[1], z[3]]);
    b.arcs(&z, &[y3]);
    let d = b.finish()?;
    expect_diameter(&d, 2)?;
    Ok(Construction {
        family: Family::K33q,
        q: 4,
        orientation: d,
        completion_log: Vec::new(),
    })
}

/// Diameter-2 orientation of `K(3,3,q)` for `3 <= q <= 6`.
pub fn construct_33q(q: usize) -> Result<Construction> {
    check_range(q, 3, 6)?;
    match q {
        3 => k333(),
        4 => k334(),
        5 => {
            let six = k336()?;
            // drop the --- vertex, the last one
            let keep: Vec<usize> = (0..11).collect();
            let (d, _) = six.orientation.induced(&keep)?;
            expect_diameter(&d, 2)?;
            let mut log = six.completion_log;
            log.push("q=5: the q=6 orientation without its --- vertex (z6)".into());
            Ok(Construction {
                family: Family::K33q,
                q: 5,
                orientation: d,
                completion_log: log,
            })
        }
        _ => k336(),
    }
}

/// Vertex indices of `K(3,4,10)` under the names used by its recipe.
pub mod k3410 {
    pub const Z_PLUS: usize = 7;
    /// `z1..z8`.
    pub const Z: [usize; 8] = [8, 9, 10, 11, 12, 13, 14, 15];
    pub const Z_MINUS: usize = 16;
}

fn k3410() -> Result<Orientation> {
    use k3410::{Z, Z_MINUS, Z_PLUS};
    let mut b = ArcBuilder::new(&[3, 4, 10])?;
    let y = [3, 4, 5, 6];
    let (y1, y2, y3, y4) = (y[0], y[1], y[2], y[3]);
    b.arcs(&[y3, y4], &[X[0], X[1]]);
    b.arcs(&[X[0], X[1]], &[y1, y2]);
    b.arcs(&[y1, y2], &[X[2]]);
    b.arcs(&[X[2]], &[y3, y4]);
    let classes = [
        (Z_PLUS, "+++"),
        (Z[0], "+-+"),
        (Z[1], "+-+"),
        (Z[2], "-++"),
        (Z[3], "-++"),
        (Z[4], "+--"),
        (Z[5], "+--"),
        (Z[6], "-+-"),
        (Z[7], "-+-"),
        (Z_MINUS, "---"),
    ];
    for (zi, s) in classes {
        b.signs(X, zi, sv(s));
    }
    b.arcs(&[Z_PLUS], &y);
    b.arcs(&y, &[Z_MINUS]);
    b.arcs(&[y1, y2], &Z[4..8]);
    b.arcs(&Z[0..4], &[y3, y4]);
    b.cycle4(y1, Z[0], y2, Z[1]);
    b.cycle4(y1, Z[2], y2, Z[3]);
    b.cycle4(y3, Z[4], y4, Z[5]);
    b.cycle4(y3, Z[6], y4, Z[7]);
    b.finish()
}

/// `K(3,4,11)`. Part 3 order: `+++`, `++-` (2), `+-+` (2), `+--` (6).
fn k3411() -> Result<Construction> {
    let mut b = ArcBuilder::new(&[3, 4, 11])?;
    let y = [3, 4, 5, 6];
    let (y1, y2, y3, y4) = (y[0], y[1], y[2], y[3]);
    let z: Vec<usize> = (7..18).collect();
    b.arcs(&y, &[X[0]]);
    b.arc(y4, X[1]);
    b.arcs(&[X[1]], &[y1, y2, y3]);
    b.arc(y1, X[2]);
    b.arcs(&[X[2]], &[y2, y3, y4]);
    let signs = ["+++", "++-", "++-", "+-+", "+-+"];
    for (&zi, s) in z
        .iter()
        .zip(signs.iter().copied().chain(std::iter::repeat("+--")))
    {
        b.signs(X, zi, sv(s));
    }
    b.arcs(&[z[0]], &y);
    b.arcs(&z[1..5], &[y1, y4]);
    b.cycle4(y2, z[1], y3, z[2]);
    b.cycle4(y2, z[3], y3, z[4]);
    // V2 <-> V3^{+--}: z gets the k-th 2-subset of {y1..y4} in lex order
    for (k, s) in two_subsets(4).into_iter().enumerate() {
        let zk = z[5 + k];
        for (i, &yi) in y.iter().enumerate() {
            if s >> i & 1 == 1 {
                b.arc(zk, yi);
            } else {
                b.arc(yi, zk);
            }
        }
    }
    let base = b.finish()?;
    let mut log = vec![
        "q=11: 4-cycles y2->z2->y3->z3->y2 (class ++-) and y2->z4->y3->z5->y2 (class +-+)".into(),
        "q=11: z6..z11 take the 2-subsets {y1,y2},{y1,y3},{y1,y4},{y2,y3},{y2,y4},{y3,y4} as out-sets into V2".into(),
    ];
    let d = if base.diameter() == Distance::Finite(2) {
        base
    } else {
        let open: Vec<(usize, usize)> = [y2, y3]
            .iter()
            .flat_map(|&yy| z[1..5].iter().map(move |&zz| (yy, zz)))
            .map(|(yy, zz)| {
                if base.has_arc(yy, zz) {
                    (yy, zz)
                } else {
                    (zz, yy)
                }
            })
            .collect();
        let (d, mask) = complete_open_arcs(&base, &open)?;
        log.push(format!(
            "q=11: default 4-cycles failed; flipped open arcs by mask {mask:#b}"
        ));
        d
    };
    expect_diameter(&d, 2)?;
    Ok(Construction {
        family: Family::K34q,
        q: 11,
        orientation: d,
        completion_log: log,
    })
}

/// Vertices of `K(3,4,10)` removed to get `K(3,4,q)`, `4 <= q <= 9`.
pub fn k3410_deletions(q: usize) -> Vec<usize> {
    use k3410::{Z, Z_MINUS, Z_PLUS};
    match q {
        9 => vec![Z_MINUS],
        8 => vec![Z_PLUS, Z_MINUS],
        7 => vec![Z[6], Z[7], Z_MINUS],
        6 => vec![Z[6], Z[7], Z_PLUS, Z_MINUS],
        5 => vec![Z[0], Z[1], Z[6], Z[7], Z_MINUS],
        4 => vec![Z[0], Z[1], Z[6], Z[7], Z_PLUS, Z_MINUS],
        _ => Vec::new(),
    }
}

/// Diameter-2 orientation of `K(3,4,q)` for `4 <= q <= 11`.
pub fn construct_34q(q: usize) -> Result<Construction> {
    check_range(q, 4, 11)?;
    if q == 11 {
        return k3411();
    }
    let ten = k3410()?;
    let mut log = vec!["q=10: part 3 is ordered z+, z1..z8, z- of the recipe".to_string()];
    let d = if q == 10 {
        ten
    } else {
        let gone = k3410_deletions(q);
        let keep: Vec<usize> = (0..17).filter(|v| !gone.contains(v)).collect();
        let labels: Vec<String> = gone.iter().map(|&v| recipe_label_3410(v)).collect();
        log.push(format!(
            "q={q}: the q=10 orientation without {}",
            labels.join(", ")
        ));
        ten.induced(&keep)?.0
    };
    expect_diameter(&d, 2)?;
    Ok(Construction {
        family: Family::K34q,
        q,
        orientation: d,
        completion_log: log,
    })
}

fn recipe_label_3410(v: usize) -> String {
    use k3410::{Z, Z_MINUS, Z_PLUS};
    match v {
        Z_PLUS => "z+".into(),
        Z_MINUS => "z-".into(),
        _ => format!("z{}", Z.iter().position(|&z| z == v).unwrap() + 1),
    }
}

/// All `k`-subsets of `0..n` as masks, in lexicographic order of their
/// sorted element lists.
fn subsets_of_size(n: usize, k: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, k: usize, acc: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i >= k {
                rec(i + 1, n, k - 1, acc | 1 << i, out);
            }
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut out);
    out
}

fn two_subsets(n: usize) -> Vec<u64> {
    subsets_of_size(n, 2)
}

/// Orientation of `K(p, q)` in which the `k`-th vertex of the `q`-side
/// points exactly at the `k`-th `floor(p/2)`-subset of the `p`-side.
pub fn middle_layer_bipartite(p: usize, q: usize) -> Result<Construction> {
    let limit = binomial(p, p / 2);
    if p == 0 || q == 0 {
        return Err(GraphError::ZeroPart(if p == 0 { 0 } else { 1 }).into());
    }
    if q as u64 > limit {
        return Err(ConstructError::ThresholdExceeded { p, q, limit });
    }
    let mut b = ArcBuilder::new(&[p, q])?;
    for (k, s) in subsets_of_size(p, p / 2).into_iter().take(q).enumerate() {
        let z = p + k;
        for y in 0..p {
            if s >> y & 1 == 1 {
                b.arc(z, y);
            } else {
                b.arc(y, z);
            }
        }
    }
    Ok(Construction {
        family: Family::MiddleLayerBipartite,
        q,
        orientation: b.finish()?,
        completion_log: Vec::new(),
    })
}

/// Tournament on `n` vertices with diameter `f(K_n)`: rotational for odd
/// `n`; for `n = 4` the best orientation found by enumeration; for even
/// `n >= 6`, the rotational tournament on `n - 1` vertices plus one vertex
/// pointing at the even residues.
pub fn complete_graph_orientation(n: usize) -> Result<Construction> {
    if n < 3 {
        return Err(ConstructError::NTooSmall(n));
    }
    let parts = vec![1; n];
    let rotational = |m: usize, b: &mut ArcBuilder| {
        for i in 0..m {
            for s in 1..=(m - 1) / 2 {
                b.arc(i, (i + s) % m);
            }
        }
    };
    let mut log = Vec::new();
    let d = if n % 2 == 1 {
        let mut b = ArcBuilder::new(&parts)?;
        rotational(n, &mut b);
        log.push(format!("rotational tournament i -> i+1..i+{}", (n - 1) / 2));
        b.finish()?
    } else if n == 4 {
        let t = GraphTopology::new(&parts)?;
        let mut best: Option<Orientation> = None;
        search::for_each_orientation(&t, |d| {
            if d.is_strong() && best.as_ref().is_none_or(|b| d.diameter() < b.diameter()) {
                best = Some(d.clone());
            }
        })?;
        log.push("n=4: first orientation of least diameter in lexicographic order".into());
        best.expect("K4 has a strong orientation")
    } else {
        let m = n - 1;
        let mut b = ArcBuilder::new(&parts)?;
        rotational(m, &mut b);
        for i in 0..m {
            if i % 2 == 0 {
                b.arc(m, i);
            } else {
                b.arc(i, m);
            }
        }
        log.push(format!(
            "rotational tournament on {m} vertices plus vertex {m} -> even residues"
        ));
        b.finish()?
    };
    let want = if n == 4 { 3 } else { 2 };
    expect_diameter(&d, want)?;
    Ok(Construction {
        family: Family::CompleteGraph,
        q: n,
        orientation: d,
        completion_log: log,
    })
}

/// Dispatches on the shape of `parts`: `[3,3,q]`, `[3,4,q]`, `[1; n]` or
/// `[p, q]`.
pub fn construct_for_parts(parts: &[usize]) -> Result<Construction> {
    match parts {
        [3, 3, q] => construct_33q(*q),
        [3, 4, q] => construct_34q(*q),
        [p, q] => middle_layer_bipartite(*p, *q),
        ones if ones.len() >= 3 && ones.iter().all(|&p| p == 1) => {
            complete_graph_orientation(ones.len())
        }
        other => Err(ConstructError::NoScheme(other.to_vec())),
    }
}

/// Finds a diameter-2 orientation with the search engine; used to produce
/// the stored `K(3,3,3)` table.
pub fn searched_witness(parts: &[usize]) -> Result<Option<Orientation>> {
    let out = search::decide_diameter2(parts, &SearchConfig::default())?;
    Ok(match out.verdict {
        Verdict::Exists => out.witness,
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sign_partition;

    #[test]
    fn k33q_range() {
        for q in 3..=6 {
            let c = construct_33q(q).unwrap();
            assert_eq!(c.orientation.topology().parts(), &[3, 3, q]);
            assert_eq!(c.orientation.diameter(), Distance::Finite(2));
        }
        assert!(matches!(
            construct_33q(7),
            Err(ConstructError::QOutOfRange { q: 7, lo: 3, hi: 6 })
        ));
        assert!(construct_33q(2).is_err());
    }

    #[test]
    fn k334_classes_are_singletons() {
        let d = construct_33q(4).unwrap().orientation;
        let v3 = &sign_partition(&d, 0).unwrap()[1];
        for s in ["+++", "++-", "+-+", "+--"] {
            assert_eq!(v3.size(sv(s)), 1, "{s}");
        }
    }

    #[test]
    fn k336_classes() {
        let d = construct_33q(6).unwrap().orientation;
        let v3 = &sign_partition(&d, 0).unwrap()[1];
        let sizes: Vec<_> = v3.sizes().into_iter().filter(|&(_, n)| n > 0).collect();
        assert_eq!(
            sizes,
            vec![
                (sv("+++"), 1),
                (sv("+--"), 2),
                (sv("-+-"), 2),
                (sv("---"), 1)
            ]
        );
    }

    #[test]
    fn k34q_range() {
        for q in 4..=11 {
            let c = construct_34q(q).unwrap();
            assert_eq!(c.orientation.topology().parts(), &[3, 4, q]);
            assert_eq!(c.orientation.diameter(), Distance::Finite(2), "q = {q}");
        }
        let c = construct_34q(11).unwrap();
        assert_eq!(
            sign_partition(&c.orientation, 0).unwrap()[1].size(sv("+--")),
            6
        );
        assert!(construct_34q(12).is_err());
        assert!(construct_34q(3).is_err());
    }

    #[test]
    fn middle_layer() {
        let c = middle_layer_bipartite(3, 3).unwrap();
        let d = &c.orientation;
        for a in 3..6 {
            for b in 3..6 {
                assert!(d.distance(a, b).unwrap() <= Distance::Finite(2));
            }
        }
        assert!(matches!(
            middle_layer_bipartite(2, 3),
            Err(ConstructError::ThresholdExceeded {
                p: 2,
                q: 3,
                limit: 2
            })
        ));
        assert_eq!(
            subsets_of_size(4, 2),
            vec![0b11, 0b101, 0b1001, 0b110, 0b1010, 0b1100]
        );
    }

    #[test]
    fn tournaments() {
        for (n, want) in [
            (3, 2),
            (4, 3),
            (5, 2),
            (6, 2),
            (7, 2),
            (8, 2),
            (10, 2),
            (12, 2),
        ] {
            let c = complete_graph_orientation(n).unwrap();
            assert_eq!(c.orientation.diameter(), Distance::Finite(want), "n = {n}");
        }
        assert!(matches!(
            complete_graph_orientation(2),
            Err(ConstructError::NTooSmall(2))
        ));
    }

    #[test]
    fn dispatch() {
        assert_eq!(
            construct_for_parts(&[3, 4, 10]).unwrap().family,
            Family::K34q
        );
        assert_eq!(
            construct_for_parts(&[1, 1, 1, 1, 1]).unwrap().family,
            Family::CompleteGraph
        );
        assert!(matches!(
            construct_for_parts(&[2, 2, 2]),
            Err(ConstructError::NoScheme(_))
        ));
    }
}
