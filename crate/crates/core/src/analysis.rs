//! Sign-vector partitions relative to an anchor triple, the structural
//! checks every diameter-2 orientation of `K(3,p,q)` must pass, case
//! signatures, and antichain utilities for bipartite suborientations.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{bits, Distance, Orientation, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("part {0} does not exist")]
    NoSuchPart(usize),
    #[error("anchor part {part} has {size} vertices, expected 3")]
    AnchorNotSize3 { part: usize, size: usize },
    #[error("expected a tripartite orientation, found {0} parts")]
    NotTripartite(usize),
    #[error("first part has {0} vertices, expected 3")]
    FirstPartNotSize3(usize),
    #[error("orientation has diameter {0}, the structural check needs diameter 2")]
    DiameterNotTwo(Distance),
    #[error("expected a bipartite orientation, found {0} parts")]
    NotBipartite(usize),
    #[error("antichain search is exhaustive only up to a 5-element ground set, got {0}")]
    PTooLarge(usize),
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;

/// In/out pattern of a vertex against the three anchors: bit `k` is set
/// iff the `k`-th anchor has an arc into the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(u8);

impl SignVector {
    /// The eight vectors in display order: `+++ ++- +-+ -++ +-- -+- --+ ---`.
    pub const ALL: [SignVector; 8] = [
        SignVector(0b111),
        SignVector(0b011),
        SignVector(0b101),
        SignVector(0b110),
        SignVector(0b001),
        SignVector(0b010),
        SignVector(0b100),
        SignVector(0b000),
    ];
    pub const PLUS: SignVector = SignVector(0b111);
    pub const MINUS: SignVector = SignVector(0b000);

    pub fn from_signs(signs: [bool; 3]) -> Self {
        SignVector(signs.iter().enumerate().map(|(k, &s)| (s as u8) << k).sum())
    }

    pub fn sign(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn complement(self) -> Self {
        SignVector(!self.0 & 0b111)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..3 {
            f.write_str(if self.sign(k) { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for SignVector {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 3 || chars.iter().any(|c| *c != '+' && *c != '-') {
            return Err(format!("bad sign vector {s:?}"));
        }
        Ok(SignVector::from_signs([
            chars[0] == '+',
            chars[1] == '+',
            chars[2] == '+',
        ]))
    }
}

/// The eight sign classes of one non-anchor part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPartition {
    pub part_index: usize,
    classes: [VertexSet; 8],
}

impl SignPartition {
    pub fn class(&self, s: SignVector) -> VertexSet {
        self.classes[s.0 as usize]
    }

    pub fn size(&self, s: SignVector) -> usize {
        self.class(s).count_ones() as usize
    }

    pub fn sizes(&self) -> Vec<(SignVector, usize)> {
        SignVector::ALL.iter().map(|&s| (s, self.size(s))).collect()
    }

    pub fn vertices(&self, s: SignVector) -> Vec<usize> {
        bits(self.class(s)).collect()
    }
}

fn anchor_vertices(d: &Orientation, anchor_part: usize) -> Result<[usize; 3]> {
    let t = d.topology();
    if anchor_part >= t.n_parts() {
        return Err(AnalysisError::NoSuchPart(anchor_part));
    }
    let r = t.part_range(anchor_part);
    if r.len() != 3 {
        return Err(AnalysisError::AnchorNotSize3 {
            part: anchor_part,
            size: r.len(),
        });
    }
    Ok([r.start, r.start + 1, r.start + 2])
}

pub fn sign_vector_of(d: &Orientation, anchors: [usize; 3], v: usize) -> SignVector {
    SignVector::from_signs(anchors.map(|x| d.has_arc(x, v)))
}

/// Partitions every part other than `anchor_part` by sign vector.
pub fn sign_partition(d: &Orientation, anchor_part: usize) -> Result<Vec<SignPartition>> {
    let anchors = anchor_vertices(d, anchor_part)?;
    let t = d.topology();
    Ok((0..t.n_parts())
        .filter(|&i| i != anchor_part)
        .map(|i| {
            let mut classes = [0u64; 8];
            for v in t.part_range(i) {
                classes[sign_vector_of(d, anchors, v).0 as usize] |= 1 << v;
            }
            SignPartition {
                part_index: i,
                classes,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `z -> y` with `y` in the all-plus class of `part`.
    PlusNotDominating {
        part: usize,
        y: usize,
        z: usize,
    },
    PlusNotSingleton {
        part: usize,
        size: usize,
    },
    /// `y -> z` with `y` in the all-minus class of `part`.
    MinusNotDominated {
        part: usize,
        y: usize,
        z: usize,
    },
    MinusNotSingleton {
        part: usize,
        size: usize,
    },
    PlusInBothParts,
    MinusInBothParts,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PlusNotDominating { part, y, z } => {
                write!(f, "V{}^+++ does not dominate: {z} -> {y}", part + 1)
            }
            Violation::PlusNotSingleton { part, size } => {
                write!(f, "|V{}^+++| = {size}, expected 1", part + 1)
            }
            Violation::MinusNotDominated { part, y, z } => {
                write!(f, "V{}^--- is not dominated: {y} -> {z}", part + 1)
            }
            Violation::MinusNotSingleton { part, size } => {
                write!(f, "|V{}^---| = {size}, expected 1", part + 1)
            }
            Violation::PlusInBothParts => f.write_str("both non-anchor parts have a +++ vertex"),
            Violation::MinusInBothParts => f.write_str("both non-anchor parts have a --- vertex"),
        }
    }
}

/// Checks the four structural conclusions that hold in any diameter-2
/// orientation of a tripartite graph with a size-3 anchor part:
///
/// * a non-empty `+++` class is a single vertex dominating the other part;
/// * a non-empty `---` class is a single vertex dominated by the other part;
/// * the two non-anchor parts do not both have a `+++` vertex;
/// * nor both a `---` vertex.
///
/// Returns the (possibly empty) list of violated conclusions.
pub fn lemma21_check(d: &Orientation, anchor_part: usize) -> Result<Vec<Violation>> {
    let t = d.topology();
    if t.n_parts() != 3 {
        return Err(AnalysisError::NotTripartite(t.n_parts()));
    }
    anchor_vertices(d, anchor_part)?;
    let diam = d.diameter();
    if diam > Distance::Finite(2) {
        return Err(AnalysisError::DiameterNotTwo(diam));
    }
    let partition = sign_partition(d, anchor_part)?;
    let mut out = Vec::new();
    for (me, other) in [
        (&partition[0], &partition[1]),
        (&partition[1], &partition[0]),
    ] {
        let other_mask = t.part_mask(other.part_index);
        let plus = me.class(SignVector::PLUS);
        for y in bits(plus) {
            if let Some(z) = bits(d.in_neighbors(y) & other_mask).next() {
                out.push(Violation::PlusNotDominating {
                    part: me.part_index,
                    y,
                    z,
                });
            }
        }
        if plus.count_ones() > 1 {
            out.push(Violation::PlusNotSingleton {
                part: me.part_index,
                size: plus.count_ones() as usize,
            });
        }
        let minus = me.class(SignVector::MINUS);
        for y in bits(minus) {
            if let Some(z) = bits(d.out_neighbors(y) & other_mask).next() {
                out.push(Violation::MinusNotDominated {
                    part: me.part_index,
                    y,
                    z,
                });
            }
        }
        if minus.count_ones() > 1 {
            out.push(Violation::MinusNotSingleton {
                part: me.part_index,
                size: minus.count_ones() as usize,
            });
        }
    }
    let both = |s| partition.iter().all(|p| p.class(s) != 0);
    if both(SignVector::PLUS) {
        out.push(Violation::PlusInBothParts);
    }
    if both(SignVector::MINUS) {
        out.push(Violation::MinusInBothParts);
    }
    Ok(out)
}

/// Out-degrees `(i, j, k)` of the three vertices of part 0 into part 1,
/// and the class of that triple under sorting and global reversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CaseSignature {
    pub raw: [usize; 3],
    pub canonical: [usize; 3],
    pub p: usize,
}

/// Lexicographically smallest of `sort(raw)` and `sort(p - raw)`.
pub fn canonical_case(raw: [usize; 3], p: usize) -> [usize; 3] {
    let mut a = raw;
    a.sort_unstable();
    let mut b = raw.map(|i| p - i);
    b.sort_unstable();
    a.min(b)
}

/// All canonical case classes for a second part of size `p`, sorted.
pub fn canonical_classes(p: usize) -> Vec<[usize; 3]> {
    let mut out: Vec<[usize; 3]> = (0..=p)
        .flat_map(|i| (0..=p).flat_map(move |j| (0..=p).map(move |k| [i, j, k])))
        .map(|raw| canonical_case(raw, p))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Every raw triple whose canonical class is `class`.
pub fn raw_members(class: [usize; 3], p: usize) -> Vec<[usize; 3]> {
    (0..=p)
        .flat_map(|i| (0..=p).flat_map(move |j| (0..=p).map(move |k| [i, j, k])))
        .filter(|&raw| canonical_case(raw, p) == class)
        .collect()
}

pub fn case_signature(d: &Orientation) -> Result<CaseSignature> {
    let t = d.topology();
    if t.parts()[0] != 3 {
        return Err(AnalysisError::FirstPartNotSize3(t.parts()[0]));
    }
    if t.n_parts() < 2 {
        return Err(AnalysisError::NotTripartite(t.n_parts()));
    }
    let second = t.part_mask(1);
    let p = t.parts()[1];
    let raw = [0, 1, 2].map(|x| (d.out_neighbors(x) & second).count_ones() as usize);
    Ok(CaseSignature {
        raw,
        canonical: canonical_case(raw, p),
        p,
    })
}

/// Out-neighbourhoods of one side of a bipartite orientation, restricted
/// to the other side and written in that side's local indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AntichainReport {
    pub family: Vec<u64>,
    pub is_antichain: bool,
    /// First ordered pair `(i, j)`, `i != j`, with `family[i] ⊆ family[j]`.
    pub violating_pair: Option<(usize, usize)>,
    pub all_nonempty_proper: bool,
}

pub fn antichain_report(family: Vec<u64>, ground: usize) -> AntichainReport {
    let full = if ground >= 64 {
        u64::MAX
    } else {
        (1u64 << ground) - 1
    };
    let mut violating_pair = None;
    'outer: for (i, &a) in family.iter().enumerate() {
        for (j, &b) in family.iter().enumerate() {
            if i != j && a & !b == 0 {
                violating_pair = Some((i, j));
                break 'outer;
            }
        }
    }
    let all_nonempty_proper = family.iter().all(|&s| s != 0 && s != full);
    AntichainReport {
        family,
        is_antichain: violating_pair.is_none(),
        violating_pair,
        all_nonempty_proper,
    }
}

/// Antichain report for the out-sets of part `big_side` of a bipartite
/// orientation. All ordered pairs on `big_side` are within distance 2
/// exactly when the report is an antichain.
pub fn out_neighborhood_family(f: &Orientation, big_side: usize) -> Result<AntichainReport> {
    let t = f.topology();
    if t.n_parts() != 2 {
        return Err(AnalysisError::NotBipartite(t.n_parts()));
    }
    if big_side > 1 {
        return Err(AnalysisError::NoSuchPart(big_side));
    }
    let small = t.part_range(1 - big_side);
    let family = t
        .part_range(big_side)
        .map(|z| (f.out_neighbors(z) & t.part_mask(1 - big_side)) >> small.start)
        .collect();
    Ok(antichain_report(family, small.len()))
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Sperner bound `C(p, floor(p/2))`.
pub fn sperner_bound(p: usize) -> u64 {
    binomial(p, p / 2)
}

/// Visits every antichain of subsets of a `p`-set (including the empty
/// family). Subsets are `u32` masks; families are built in increasing
/// mask order.
pub fn for_each_antichain(p: usize, mut visit: impl FnMut(&[u32])) -> Result<()> {
    if p > 5 {
        return Err(AnalysisError::PTooLarge(p));
    }
    fn rec(next: u32, limit: u32, chosen: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        visit(chosen);
        for s in next..limit {
            let comparable = chosen.iter().any(|&c| c & !s == 0 || s & !c == 0);
            if !comparable {
                chosen.push(s);
                rec(s + 1, limit, chosen, visit);
                chosen.pop();
            }
        }
    }
    rec(0, 1 << p, &mut Vec::new(), &mut visit);
    Ok(())
}

/// Largest antichain over a `p`-set, found by exhaustive enumeration.
pub fn max_antichain(p: usize) -> Result<(usize, Vec<u32>)> {
    let mut best: Vec<u32> = Vec::new();
    for_each_antichain(p, |fam| {
        if fam.len() > best.len() {
            best = fam.to_vec();
        }
    })?;
    Ok((best.len(), best))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Enumerated,
    FormulaUnverified,
}

/// Largest antichain size: enumerated for `p <= 5`, binomial otherwise.
pub fn antichain_threshold(p: usize) -> (u64, Provenance) {
    match max_antichain(p) {
        Ok((size, _)) => (size as u64, Provenance::Enumerated),
        Err(_) => (sperner_bound(p), Provenance::FormulaUnverified),
    }
}
