use std::fmt::Write as _;
use std::io::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use oriented_diameter::analysis::{case_signature, lemma21_check, sign_partition, SignVector};
use oriented_diameter::claims::{verify_claims, ClaimFamily};
use oriented_diameter::construct::{construct_for_parts, searched_witness};
use oriented_diameter::io::{orientation_dot, orientation_json, read_orientation};
use oriented_diameter::par::default_threads;
use oriented_diameter::search::{
    brute_force_min_diameter, decide_diameter2, enumerate_diameter2, export_cnf, SearchConfig,
    Verdict,
};
use oriented_diameter::{Distance, GraphTopology, Orientation};
use serde_json::{json, Value};

const EXIT_CLAIM_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(
    name = "odiam",
    version,
    about = "Orientations of complete multipartite graphs"
)]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Accepted for compatibility; every procedure is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for search and brute force.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    /// The explicit recipes (K(3,3,q), K(3,4,q), K(p,q), K_n).
    Paper,
    /// Whatever the exhaustive search finds first.
    Search,
}

#[derive(Subcommand)]
enum Command {
    /// Build a diameter-2 orientation.
    Construct {
        #[arg(long, value_delimiter = ',', required = true)]
        parts: Vec<usize>,
        #[arg(long, value_enum, default_value = "paper")]
        scheme: Scheme,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diameter of an orientation file.
    Diameter {
        #[arg(long)]
        file: PathBuf,
    },
    /// Sign classes, structure check and case signature.
    Analyze {
        #[arg(long)]
        file: PathBuf,
        /// Index of a size-3 part.
        #[arg(long, default_value_t = 0)]
        anchor: usize,
    },
    /// Decide whether a diameter-2 orientation exists.
    Decide {
        #[arg(long, value_delimiter = ',', required = true)]
        parts: Vec<usize>,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        no_symmetry: bool,
        #[arg(long)]
        no_case_split: bool,
    },
    /// List orientations of diameter exactly 2 (at most 16 edges).
    Enumerate {
        #[arg(long, value_delimiter = ',', required = true)]
        parts: Vec<usize>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Oriented diameter by full enumeration (at most 20 edges).
    BruteForce {
        #[arg(long, value_delimiter = ',', required = true)]
        parts: Vec<usize>,
    },
    /// Write the diameter-2 question as DIMACS CNF.
    ExportCnf {
        #[arg(long, value_delimiter = ',', required = true)]
        parts: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce the f-value tables.
    VerifyClaims {
        /// 33q, 34q or baselines.
        #[arg(long)]
        family: String,
        /// `A..B`, `A-B` or a single value.
        #[arg(long, value_parser = parse_range)]
        q_range: Option<RangeInclusive<usize>>,
        /// Where CNF files for undecided cases go.
        #[arg(long, default_value = ".")]
        cnf_dir: PathBuf,
        #[command(flatten)]
        budget: Budget,
        /// Drop the timing column so the table is reproducible.
        #[arg(long)]
        no_timings: bool,
    },
}

#[derive(clap::Args)]
struct Budget {
    #[arg(long, default_value_t = 600)]
    budget_seconds: u64,
    #[arg(long, default_value_t = 1_000_000_000)]
    budget_nodes: u64,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (lo, hi) = match s.split_once("..").or_else(|| s.split_once('-')) {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: usize = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(lo..=hi)
}

struct Ctx {
    format: Option<Format>,
    threads: usize,
}

impl Ctx {
    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

type CmdResult = Result<u8, String>;

fn distance_json(d: Distance) -> Value {
    match d {
        Distance::Finite(x) => json!(x),
        Distance::Infinite => json!("inf"),
    }
}

fn orientation_value(d: &Orientation) -> Value {
    serde_json::from_str(&orientation_json(d, None)).expect("own output parses")
}

fn config(
    budget: &Budget,
    threads: usize,
    symmetry: bool,
    split: bool,
) -> Result<SearchConfig, String> {
    if budget.budget_seconds == 0 || budget.budget_nodes == 0 {
        return Err("budgets must be positive".into());
    }
    Ok(SearchConfig {
        node_budget: budget.budget_nodes,
        time_budget: Duration::from_secs(budget.budget_seconds),
        symmetry_breaking: symmetry,
        use_case_split: split,
        thread_count: threads,
    })
}

fn topology(parts: &[usize]) -> Result<GraphTopology, String> {
    GraphTopology::new(parts).map_err(|e| e.to_string())
}

fn arcs_text(d: &Orientation) -> String {
    let t = d.topology();
    let mut s = String::new();
    for (u, v) in d.arcs() {
        let _ = writeln!(s, "{} -> {}", t.label(u), t.label(v));
    }
    s
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

fn cmd_construct(ctx: &Ctx, parts: &[usize], scheme: Scheme, out: Option<&Path>) -> CmdResult {
    let (d, log) = match scheme {
        Scheme::Paper => {
            let c = construct_for_parts(parts).map_err(|e| e.to_string())?;
            (c.orientation, c.completion_log)
        }
        Scheme::Search => match searched_witness(parts).map_err(|e| e.to_string())? {
            Some(d) => (d, vec!["found by exhaustive search".to_string()]),
            None => {
                return Err(format!(
                    "{} has no diameter-2 orientation",
                    topology(parts)?
                ))
            }
        },
    };
    let text = match ctx.format(Format::Json) {
        Format::Json => orientation_json(&d, Some(&log)),
        Format::Dot => orientation_dot(&d),
        Format::Text => {
            let mut s = format!("{}: diameter {}\n", d.topology(), d.diameter());
            for line in &log {
                let _ = writeln!(s, "# {line}");
            }
            s + &arcs_text(&d)
        }
    };
    emit(&text, out)?;
    Ok(0)
}

fn load(file: &Path) -> Result<Orientation, String> {
    read_orientation(file)
        .map(|doc| doc.orientation)
        .map_err(|e| format!("{}: {e}", file.display()))
}

fn cmd_diameter(ctx: &Ctx, file: &Path) -> CmdResult {
    let d = load(file)?;
    let diameter = d.diameter();
    let text = match ctx.format(Format::Text) {
        Format::Text => format!("{diameter}\n"),
        Format::Json => {
            let v = json!({
                "parts": d.topology().parts(),
                "diameter": distance_json(diameter),
                "strong": d.is_strong(),
            });
            format!("{v:#}\n")
        }
        Format::Dot => orientation_dot(&d),
    };
    emit(&text, None)?;
    Ok(0)
}

fn cmd_analyze(ctx: &Ctx, file: &Path, anchor: usize) -> CmdResult {
    let d = load(file)?;
    let t = d.topology().clone();
    let partition = sign_partition(&d, anchor).map_err(|e| e.to_string())?;
    let check = lemma21_check(&d, anchor);
    let signature = case_signature(&d).ok();
    if ctx.format(Format::Text) == Format::Json {
        let parts: Vec<Value> = partition
            .iter()
            .map(|p| {
                let classes: serde_json::Map<String, Value> = SignVector::ALL
                    .iter()
                    .map(|&s| (s.to_string(), json!(p.vertices(s))))
                    .collect();
                json!({ "part": p.part_index, "classes": classes })
            })
            .collect();
        let check = match &check {
            Ok(v) => json!({ "applicable": true, "violations": v }),
            Err(e) => json!({ "applicable": false, "reason": e.to_string() }),
        };
        let v = json!({
            "parts": t.parts(),
            "anchor": anchor,
            "diameter": distance_json(d.diameter()),
            "sign_partition": parts,
            "structure_check": check,
            "case_signature": signature,
        });
        emit(&format!("{v:#}\n"), None)?;
        return Ok(0);
    }
    let mut s = format!("{t}, diameter {}, anchor V{}\n", d.diameter(), anchor + 1);
    for p in &partition {
        let _ = writeln!(s, "V{}:", p.part_index + 1);
        for sv in SignVector::ALL {
            let labels: Vec<String> = p.vertices(sv).iter().map(|&v| t.label(v)).collect();
            let _ = writeln!(s, "  {sv}  {:>2}  {}", labels.len(), labels.join(" "));
        }
    }
    match &check {
        Ok(v) if v.is_empty() => s.push_str("structure check: no violations\n"),
        Ok(v) => {
            s.push_str("structure check: violations\n");
            for x in v {
                let _ = writeln!(s, "  {x}");
            }
        }
        Err(e) => {
            let _ = writeln!(s, "structure check: not applicable ({e})");
        }
    }
    if let Some(c) = signature {
        let _ = writeln!(
            s,
            "case signature: raw ({},{},{}), canonical ({},{},{})",
            c.raw[0], c.raw[1], c.raw[2], c.canonical[0], c.canonical[1], c.canonical[2]
        );
    }
    emit(&s, None)?;
    Ok(0)
}

fn cmd_decide(ctx: &Ctx, parts: &[usize], cfg: SearchConfig) -> CmdResult {
    let out = decide_diameter2(parts, &cfg).map_err(|e| e.to_string())?;
    let code = if out.verdict == Verdict::Unknown {
        EXIT_UNKNOWN
    } else {
        0
    };
    let text = match ctx.format(Format::Json) {
        Format::Json => {
            let v = json!({
                "parts": parts,
                "verdict": out.verdict,
                "witness": out.witness.as_ref().map(orientation_value),
                "stats": out.stats,
                "config": cfg,
            });
            format!("{v:#}\n")
        }
        Format::Dot => match &out.witness {
            Some(w) => orientation_dot(w),
            None => format!("// no witness: {:?}\n", out.verdict),
        },
        Format::Text => {
            let mut s = format!(
                "{}: {:?} ({} nodes, {:.3} s)\n",
                topology(parts)?,
                out.verdict,
                out.stats.nodes,
                out.stats.wall_time_secs
            );
            if let Some(w) = &out.witness {
                s += &arcs_text(w);
            }
            s
        }
    };
    emit(&text, None)?;
    Ok(code)
}

fn cmd_enumerate(ctx: &Ctx, parts: &[usize], limit: Option<usize>) -> CmdResult {
    let t = topology(parts)?;
    let all = enumerate_diameter2(&t, limit, ctx.threads).map_err(|e| e.to_string())?;
    let text = match ctx.format(Format::Json) {
        Format::Json => {
            let v: Vec<Value> = all.iter().map(orientation_value).collect();
            format!("{:#}\n", Value::Array(v))
        }
        Format::Dot => all.iter().map(orientation_dot).collect(),
        Format::Text => {
            let mut s = format!("{t}: {} orientations of diameter 2\n", all.len());
            for (i, d) in all.iter().enumerate() {
                let _ = writeln!(s, "#{}", i + 1);
                s += &arcs_text(d);
            }
            s
        }
    };
    emit(&text, None)?;
    Ok(0)
}

fn cmd_brute_force(ctx: &Ctx, parts: &[usize]) -> CmdResult {
    let t = topology(parts)?;
    let f = brute_force_min_diameter(&t, ctx.threads).map_err(|e| e.to_string())?;
    let text = match ctx.format(Format::Text) {
        Format::Json => format!("{:#}\n", json!({ "parts": parts, "f": distance_json(f) })),
        _ => format!("f({t}) = {f}\n"),
    };
    emit(&text, None)?;
    Ok(0)
}

fn cmd_export_cnf(ctx: &Ctx, parts: &[usize], out: &Path) -> CmdResult {
    let stats = export_cnf(parts, out).map_err(|e| e.to_string())?;
    let text = match ctx.format(Format::Text) {
        Format::Json => format!("{:#}\n", json!({ "file": out, "stats": stats })),
        _ => format!(
            "{}: {} variables ({} edges, {} paths, {} row order), {} clauses\n",
            out.display(),
            stats.variables,
            stats.edge_variables,
            stats.path_variables,
            stats.symmetry_variables,
            stats.clauses
        ),
    };
    emit(&text, None)?;
    Ok(0)
}

fn cmd_verify_claims(
    ctx: &Ctx,
    family: &str,
    q_range: Option<RangeInclusive<usize>>,
    cnf_dir: &Path,
    cfg: SearchConfig,
    timings: bool,
) -> CmdResult {
    let family: ClaimFamily = family
        .parse()
        .map_err(|e: oriented_diameter::claims::ClaimError| e.to_string())?;
    std::fs::create_dir_all(cnf_dir).map_err(|e| format!("{}: {e}", cnf_dir.display()))?;
    let report = verify_claims(family, q_range, &cfg, Some(cnf_dir)).map_err(|e| e.to_string())?;
    let text = match ctx.format(Format::Text) {
        Format::Json => {
            let mut v = serde_json::to_value(&report).map_err(|e| e.to_string())?;
            if !timings {
                if let Some(claims) = v["claims"].as_array_mut() {
                    for c in claims {
                        c.as_object_mut().map(|o| o.remove("wall_time_secs"));
                    }
                }
            }
            format!("{v:#}\n")
        }
        _ => report.to_table(timings),
    };
    emit(&text, None)?;
    Ok(match report.exit_code {
        0 => 0,
        1 => EXIT_CLAIM_FAILED,
        _ => EXIT_UNKNOWN,
    })
}

fn run(cli: Cli) -> CmdResult {
    let _ = cli.seed;
    let threads = cli.threads.unwrap_or_else(default_threads);
    if threads == 0 {
        return Err("--threads must be positive".into());
    }
    let ctx = Ctx {
        format: cli.format,
        threads,
    };
    match cli.command {
        Command::Construct { parts, scheme, out } => {
            cmd_construct(&ctx, &parts, scheme, out.as_deref())
        }
        Command::Diameter { file } => cmd_diameter(&ctx, &file),
        Command::Analyze { file, anchor } => cmd_analyze(&ctx, &file, anchor),
        Command::Decide {
            parts,
            budget,
            no_symmetry,
            no_case_split,
        } => {
            let cfg = config(&budget, threads, !no_symmetry, !no_case_split)?;
            cmd_decide(&ctx, &parts, cfg)
        }
        Command::Enumerate { parts, limit } => cmd_enumerate(&ctx, &parts, limit),
        Command::BruteForce { parts } => cmd_brute_force(&ctx, &parts),
        Command::ExportCnf { parts, out } => cmd_export_cnf(&ctx, &parts, &out),
        Command::VerifyClaims {
            family,
            q_range,
            cnf_dir,
            budget,
            no_timings,
        } => {
            let cfg = config(&budget, threads, true, true)?;
            cmd_verify_claims(&ctx, &family, q_range, &cnf_dir, cfg, !no_timings)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
