//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::time::{Duration, Instant};

use oriented_diameter::analysis::{
    canonical_classes, for_each_antichain, lemma21_check, max_antichain, out_neighborhood_family,
    sign_partition, SignVector,
};
use oriented_diameter::construct::{construct_33q, construct_34q, k3410_deletions};
use oriented_diameter::search::{
    brute_force_min_diameter, decide_diameter2, enumerate_diameter2, export_cnf,
    for_each_diameter2, for_each_orientation, SearchConfig, Verdict,
};
use oriented_diameter::{Distance, GraphTopology, Orientation};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn two() -> Distance {
    Distance::Finite(2)
}

fn c1_k33q() -> Outcome {
    let start = Instant::now();
    for q in 3..=6 {
        let d = construct_33q(q).map_err(|e| e.to_string())?.orientation;
        check(d.diameter() == two(), || {
            format!("q={q}: diameter {}", d.diameter())
        })?;
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("q=3..6 all diameter 2 in {:.2?}", start.elapsed()))
}

fn c2_k34q() -> Outcome {
    let start = Instant::now();
    let d10 = construct_34q(10).map_err(|e| e.to_string())?.orientation;
    for q in 4..=11 {
        let d = construct_34q(q).map_err(|e| e.to_string())?.orientation;
        check(d.diameter() == two(), || {
            format!("q={q}: diameter {}", d.diameter())
        })?;
        if q <= 9 {
            let gone = k3410_deletions(q);
            let kept: Vec<usize> = (0..17).filter(|v| !gone.contains(v)).collect();
            for (i, &a) in kept.iter().enumerate() {
                for (j, &b) in kept.iter().enumerate() {
                    check(d.has_arc(i, j) == d10.has_arc(a, b), || {
                        format!("q={q}: arc ({a},{b}) differs from D10")
                    })?;
                }
            }
        }
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!(
        "q=4..11 all diameter 2, q<=9 are restrictions of q=10, in {:.2?}",
        start.elapsed()
    ))
}

fn c3_k337() -> Outcome {
    let cfg = SearchConfig {
        node_budget: 1_000_000_000,
        time_budget: Duration::from_secs(600),
        ..SearchConfig::default()
    };
    let out = decide_diameter2(&[3, 3, 7], &cfg).map_err(|e| e.to_string())?;
    check(out.verdict == Verdict::None, || {
        format!("verdict {:?}", out.verdict)
    })?;
    check(out.stats.cases_enumerated.len() == 10, || {
        format!("{} of 10 cases closed", out.stats.cases_enumerated.len())
    })?;
    Ok(format!(
        "K(3,3,7) None after {} nodes, {:.3} s, 10/10 cases; with 2 <= f <= 3 gives f=3",
        out.stats.nodes, out.stats.wall_time_secs
    ))
}

fn c4_k3412_cnf() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("k34_12.cnf");
    let stats = export_cnf(&[3, 4, 12], &path).map_err(|e| e.to_string())?;
    // E = 96; P = sum over ordered pairs of common neighbours; row
    // constraints over m = n - p positions for each consecutive same-part pair
    let parts = [3usize, 4, 12];
    let n = 19;
    let mut paths = 0;
    for (i, &pi) in parts.iter().enumerate() {
        for (j, &pj) in parts.iter().enumerate() {
            paths += if i == j {
                pi * (pi - 1) * (n - pi)
            } else {
                pi * pj * (n - pi - pj)
            };
        }
    }
    let sym_vars: usize = parts.iter().map(|&p| (p - 1) * (n - p - 1)).sum();
    let sym_clauses: usize = parts.iter().map(|&p| (p - 1) * (3 * (n - p) - 2)).sum();
    let want_vars = 96 + paths + sym_vars;
    let want_clauses = n * (n - 1) + 3 * paths + sym_clauses;
    check(stats.edge_variables == 96, || {
        format!("{} edge variables", stats.edge_variables)
    })?;
    check(
        (stats.variables, stats.clauses) == (want_vars, want_clauses),
        || {
            format!(
                "stats {}/{} vs formula {want_vars}/{want_clauses}",
                stats.variables, stats.clauses
            )
        },
    )?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let header = format!("p cnf {want_vars} {want_clauses}");
    check(text.lines().any(|l| l == header), || {
        "missing header".into()
    })?;
    let body = text
        .lines()
        .filter(|l| !l.starts_with('c') && !l.starts_with('p'));
    let mut clauses = 0;
    for line in body {
        check(line.ends_with(" 0") || line == "0", || {
            format!("bad line {line:?}")
        })?;
        clauses += 1;
    }
    check(clauses == want_clauses, || {
        format!("{clauses} clause lines")
    })?;

    let cfg = SearchConfig {
        node_budget: 100_000_000,
        time_budget: Duration::from_secs(120),
        ..SearchConfig::default()
    };
    let internal = decide_diameter2(&[3, 4, 12], &cfg).map_err(|e| e.to_string())?;
    check(internal.verdict != Verdict::Exists, || {
        "internal search found a witness".into()
    })?;
    Ok(format!(
        "DIMACS {want_vars} vars / {want_clauses} clauses match the formulas; internal search: {:?} after {} nodes, {:.2} s",
        internal.verdict, internal.stats.nodes, internal.stats.wall_time_secs
    ))
}

/// Every ordered part list with at least two parts and at most 16 edges.
fn small_topologies() -> Vec<Vec<usize>> {
    fn grow(parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts.len() >= 2 {
            out.push(parts.clone());
        }
        for next in 1..=16 {
            parts.push(next);
            let fits = GraphTopology::new(parts).unwrap().edge_count() <= 16;
            if fits {
                grow(parts, out);
            }
            parts.pop();
            if !fits {
                break;
            }
        }
    }
    let mut out = Vec::new();
    for first in 1..=16 {
        grow(&mut vec![first], &mut out);
    }
    out
}

fn c5_oracle() -> Outcome {
    let start = Instant::now();
    let all = small_topologies();
    for named in [
        &[1, 1, 1][..],
        &[1, 1, 1, 1],
        &[1, 1, 2],
        &[2, 2, 2],
        &[1, 2, 2],
        &[3, 2, 2],
        &[2, 3],
        &[2, 4],
        &[3, 3],
    ] {
        check(all.iter().any(|p| p == named), || {
            format!("{named:?} not listed")
        })?;
    }
    let mut exists = 0;
    for parts in &all {
        let t = GraphTopology::new(parts).unwrap();
        let truth = brute_force_min_diameter(&t, 1).map_err(|e| e.to_string())? <= two();
        for sym in [true, false] {
            let cfg = SearchConfig {
                symmetry_breaking: sym,
                thread_count: 1,
                ..SearchConfig::default()
            };
            let out = decide_diameter2(parts, &cfg).map_err(|e| e.to_string())?;
            let want = if truth {
                Verdict::Exists
            } else {
                Verdict::None
            };
            check(out.verdict == want, || {
                format!(
                    "{parts:?} symmetry={sym}: {:?}, brute force says {want:?}",
                    out.verdict
                )
            })?;
        }
        exists += usize::from(truth);
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "{} topologies ({exists} with diameter 2), symmetry on/off agree, {:.2?}",
        all.len(),
        start.elapsed()
    ))
}

fn c6_baselines() -> Outcome {
    let mut row = Vec::new();
    for (parts, want) in [
        (&[1, 1, 1, 1][..], 3),
        (&[1, 1, 1, 1, 1], 2),
        (&[2, 2], 3),
        (&[2, 3], 4),
    ] {
        let t = GraphTopology::new(parts).unwrap();
        let f = brute_force_min_diameter(&t, 1).map_err(|e| e.to_string())?;
        check(f == Distance::Finite(want), || {
            format!("f({t}) = {f}, expected {want}")
        })?;
        row.push(format!("f({t})={f}"));
    }
    Ok(row.join(", "))
}

fn structure_and_duality(d: &Orientation) -> Result<(), String> {
    let r = d.reverse();
    let t = d.topology();
    for a in (0..t.n_parts()).filter(|&i| t.parts()[i] == 3) {
        let v = lemma21_check(d, a).map_err(|e| e.to_string())?;
        check(v.is_empty(), || {
            format!("violations {v:?} on {:?}", d.arcs())
        })?;
        let vr = lemma21_check(&r, a).map_err(|e| e.to_string())?;
        check(vr.is_empty(), || format!("reverse violates {vr:?}"))?;
        let fwd = sign_partition(d, a).map_err(|e| e.to_string())?;
        let rev = sign_partition(&r, a).map_err(|e| e.to_string())?;
        for (pf, pr) in fwd.iter().zip(&rev) {
            for s in SignVector::ALL {
                check(pr.class(s.complement()) == pf.class(s), || {
                    format!("class {s} not complemented under reversal")
                })?;
            }
        }
    }
    Ok(())
}

fn c7_structure() -> Outcome {
    let start = Instant::now();
    let t = GraphTopology::new(&[3, 2, 2]).unwrap();
    let listed = enumerate_diameter2(&t, None, 1).map_err(|e| e.to_string())?;
    for d in &listed {
        structure_and_duality(d)?;
    }
    // the K(3,2,2) list is empty, so also run the larger pieces of K(3,p,q), p,q <= 3
    let mut extra = Vec::new();
    for parts in [[3, 2, 3], [3, 3, 2], [3, 3, 3]] {
        let mut count = 0;
        let mut err = None;
        for_each_diameter2(&parts, |d| {
            count += 1;
            err = structure_and_duality(d).err();
            err.is_none()
        })
        .map_err(|e| e.to_string())?;
        if let Some(e) = err {
            return Err(e);
        }
        extra.push(format!("{}: {count}", GraphTopology::new(&parts).unwrap()));
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "K(3,2,2): {} diameter-2 orientations (f=3, so the check is vacuous); also {} all pass with duality, {:.2?}",
        listed.len(),
        extra.join(", "),
        start.elapsed()
    ))
}

fn c8_sperner() -> Outcome {
    let sizes: Vec<usize> = (1..=5)
        .map(|p| max_antichain(p).map(|(s, _)| s))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    check(sizes == [1, 2, 3, 6, 10], || format!("sizes {sizes:?}"))?;
    let mut of_six = Vec::new();
    for_each_antichain(4, |fam| {
        if fam.len() == 6 {
            of_six.push(fam.to_vec());
        }
    })
    .map_err(|e| e.to_string())?;
    let middle: Vec<u32> = (0u32..16).filter(|s| s.count_ones() == 2).collect();
    check(of_six == [middle], || {
        format!("size-6 antichains: {of_six:?}")
    })?;
    let mut checked = 0;
    for parts in [[2usize, 3], [3, 3]] {
        let t = GraphTopology::new(&parts).unwrap();
        let mut bad = None;
        for_each_orientation(&t, |f| {
            let side = 1;
            let r = t.part_range(side);
            let close = r.clone().all(|a| {
                r.clone()
                    .all(|b| a == b || f.distance(a, b).unwrap() <= two())
            });
            let rep = out_neighborhood_family(f, side).unwrap();
            if close != (rep.is_antichain && rep.all_nonempty_proper) && bad.is_none() {
                bad = Some(f.arcs());
            }
            checked += 1;
        })
        .map_err(|e| e.to_string())?;
        if let Some(arcs) = bad {
            return Err(format!("K{parts:?}: equivalence fails on {arcs:?}"));
        }
    }
    Ok(format!(
        "max antichain 1,2,3,6,10; size 6 over a 4-set only the middle layer; equivalence on {checked} orientations of K(2,3), K(3,3)"
    ))
}

fn c9_cases() -> Outcome {
    let (a, b) = (canonical_classes(3).len(), canonical_classes(4).len());
    check((a, b) == (10, 19), || format!("{a} and {b} classes"))?;
    Ok("10 classes for |V2|=3, 19 for |V2|=4".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 K(3,3,q) constructions", c1_k33q),
        ("2 K(3,4,q) constructions", c2_k34q),
        ("3 K(3,3,7) refutation", c3_k337),
        ("4 K(3,4,12) CNF export", c4_k3412_cnf),
        ("5 oracle equivalence", c5_oracle),
        ("6 baselines", c6_baselines),
        ("7 lemma21_check suite", c7_structure),
        ("8 Sperner suite", c8_sperner),
        ("9 case counts", c9_cases),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
