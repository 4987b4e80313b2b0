//! The `flopcalc` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::dynkin::{parse_diagram, DynkinDiagram, NodeSubset};
use crate::enumerative::{
    ctc_residual, dim_after_mutation, dim_contraction, pole_diagnostics, presets, quantum_potential, track_gv, GVTable,
};
use crate::error::FlopError;
use crate::oracle::{verify_chamber_count, verify_flop_matrix, verify_restriction_lemma};
use crate::plot::{render_finite, render_fundamental_regions, render_infinite, PlotSpec, Window};
use crate::rational::{format_list, parse_rational, parse_rational_list};
use crate::restriction::{enhanced_arrangement, restricted_positive_roots};
use crate::wallcross::{enumerate_chambers, flop_at, DEFAULT_CHAMBER_LIMIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "flopcalc", version, about = "Exact Dynkin combinatorics of 3-fold flops")]
pub struct Cli {
    /// Print results and errors as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Ambient {
    /// Diagram such as A2, D4 or E8.
    pub diagram: String,
    /// Comma separated node ids of I, e.g. "1,2,4,5,6,7". Empty for I = ∅.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub subset: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Positive roots, or restricted roots when --subset is given.
    Roots {
        diagram: String,
        #[arg(long)]
        subset: Option<String>,
    },
    /// The enhanced finite arrangement of (Δ, I).
    Arrangement(Ambient),
    /// Enumerate Cham(Δ, I) and its flop graph.
    Chambers {
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long)]
        limit: Option<usize>,
        /// Print Graphviz DOT instead of text or JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Wall crossing and flop matrices at one curve.
    Flop {
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long)]
        at: usize,
    },
    /// Transport a GV table along a chain of flops.
    GvTrack {
        #[arg(long)]
        table: PathBuf,
        /// Curve labels to flop, in order.
        #[arg(long, default_value = "")]
        path: String,
        /// Write the final table here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contraction algebra dimension.
    Dim {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        mutate: Option<usize>,
    },
    /// Quantum potential, pole diagnostics and the crepant transformation check.
    Qp {
        #[arg(long)]
        table: PathBuf,
        /// Divisor coordinates; give once for all three slots or three times.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Vec<String>,
        /// Novikov point, e.g. "1/3,1/5".
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// List the supported classes with β·p ∈ ℤ at this point instead.
        #[arg(long, allow_hyphen_values = true)]
        poles_at: Option<String>,
        /// Compare both sides of the crepant transformation identity.
        #[arg(long, requires = "at")]
        check_ctc: bool,
        #[arg(long)]
        at: Option<usize>,
    },
    /// Brute-force checks.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// SVG pictures of rank-two arrangements.
    Plot {
        kind: PlotKind,
        #[command(flatten)]
        ambient: Ambient,
        /// xmin,xmax,ymin,ymax
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, default_value_t = 480)]
        size: u32,
        #[arg(long, default_value = "1")]
        stroke: String,
        #[arg(long)]
        no_labels: bool,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a named GV table.
    Preset {
        #[command(subcommand)]
        preset: PresetCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Restricted roots agree exactly when W_I-orbits agree. Sweeps every subset if --subset is omitted.
    Lemma {
        diagram: String,
        #[arg(long)]
        subset: Option<String>,
    },
    /// Structure of M_i.
    Matrix {
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long)]
        at: usize,
    },
    /// Chamber count against an independent count.
    Chambers {
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum PlotKind {
    Finite,
    Infinite,
    Regions,
}

#[derive(Subcommand, Debug)]
pub enum PresetCommand {
    /// n_10 = n_01 = 1, n_11 = k on A2.
    Ca2 {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every n_kC set to --value for a single curve of the given length.
    SingleCurve {
        #[arg(long)]
        length: u32,
        #[arg(long, default_value_t = 1)]
        value: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Domain(FlopError),
    Verification(Value),
}

impl From<FlopError> for Failure {
    fn from(e: FlopError) -> Self {
        Failure::Domain(e)
    }
}

type CliResult = Result<(), Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

impl Io<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }

    fn value(&mut self, v: &Value) {
        self.line(serde_json::to_string_pretty(v).expect("JSON values print"));
    }
}

/// Runs the CLI on `args` (including the program name), returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let json = cli.json;
    let mut io = Io { out, json };
    match dispatch(cli.command, &mut io) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            report_error(&mut io, err, "usage", &msg);
            EXIT_USAGE
        }
        Err(Failure::Domain(e)) => {
            report_error(&mut io, err, e.kind(), &e.to_string());
            EXIT_DOMAIN
        }
        Err(Failure::Verification(report)) => {
            io.value(&report);
            let _ = writeln!(err, "verification failed");
            EXIT_VERIFY
        }
    }
}

fn report_error(io: &mut Io<'_>, err: &mut dyn Write, kind: &str, msg: &str) {
    if io.json {
        io.value(&json!({ "error": { "kind": kind, "message": msg } }));
    } else {
        let _ = writeln!(err, "error: {msg}");
    }
}

fn ambient(a: &Ambient) -> Result<(DynkinDiagram, NodeSubset), Failure> {
    let d = parse_diagram(&a.diagram)?;
    let s = NodeSubset::parse(&a.subset)?;
    d.check_subset(&s)?;
    Ok((d, s))
}

fn chamber_limit(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(l) = flag {
        return Ok(l);
    }
    match std::env::var("FLOPCALC_LIMIT") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("FLOPCALC_LIMIT={v:?} is not a positive integer"))),
        Err(_) => Ok(DEFAULT_CHAMBER_LIMIT),
    }
}

fn read_table(path: &Path) -> Result<GVTable, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(GVTable::from_json_str(&text)?)
}

fn write_text(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn parse_labels(s: &str) -> Result<Vec<usize>, Failure> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| Failure::Usage(format!("bad curve label {:?}", p.trim())))
        })
        .collect()
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> CliResult {
    match cmd {
        Command::Roots { diagram, subset } => {
            let d = parse_diagram(&diagram)?;
            let (subset, roots): (Option<NodeSubset>, Vec<Vec<i64>>) = match subset {
                Some(s) => {
                    let s = NodeSubset::parse(&s)?;
                    let r = restricted_positive_roots(&d, &s)?;
                    (Some(s), r.into_iter().map(|b| b.0).collect())
                }
                None => (None, d.positive_roots().iter().map(|r| r.0.clone()).collect()),
            };
            if io.json {
                io.value(&json!({ "diagram": d.to_string(), "subset": subset, "roots": roots }));
            } else {
                for r in roots {
                    let parts: Vec<String> = r.iter().map(i64::to_string).collect();
                    io.line(format!("({})", parts.join(",")));
                }
            }
        }
        Command::Arrangement(a) => {
            let (d, s) = ambient(&a)?;
            let arr = enhanced_arrangement(&d, &s)?;
            if io.json {
                io.value(&to_json(&arr));
            } else {
                for ray in &arr.rays {
                    let m: Vec<String> = ray.multiplicities.iter().map(i64::to_string).collect();
                    io.line(format!("{} [{}]", ray.primitive, m.join(",")));
                }
            }
        }
        Command::Chambers { ambient: a, limit, dot } => {
            let (d, s) = ambient(&a)?;
            let g = enumerate_chambers(&d, &s, chamber_limit(limit)?)?;
            if dot {
                let _ = write!(io.out, "{}", g.to_dot());
            } else if io.json {
                io.value(&g.to_json());
            } else {
                io.line(format!("{} chambers", g.len()));
                for (id, c) in g.chambers.iter().enumerate() {
                    let nbrs: Vec<String> = g.edges[id]
                        .iter()
                        .map(|e| format!("{}->{}", e.node, e.target))
                        .collect();
                    io.line(format!(
                        "{id}: subset {} length {} [{}]",
                        c.subset,
                        c.rep.length(),
                        nbrs.join(" ")
                    ));
                }
            }
        }
        Command::Flop { ambient: a, at } => {
            let (d, s) = ambient(&a)?;
            let step = flop_at(&d, &s, at)?;
            if io.json {
                io.value(&to_json(&step));
            } else {
                io.line(format!("omega_{at}({s}) = {}", step.target.subset()));
                io.line(format!("new node: {}", step.new_node));
                io.line(format!("M = {}", step.matrix.forward));
                io.line(format!("M^-1 = {}", step.matrix.inverse));
                io.line(format!("N = {}", step.matrix.dual));
            }
        }
        Command::GvTrack { table, path, out } => {
            let t = read_table(&table)?;
            let labels = parse_labels(&path)?;
            let tables = track_gv(&t, &labels)?;
            let last = tables.last().unwrap_or(&t).clone();
            if io.json {
                let steps: Vec<Value> = labels
                    .iter()
                    .zip(&tables)
                    .map(|(l, tb)| json!({ "curve": l, "subset": tb.subset(), "table": tb.to_json() }))
                    .collect();
                io.value(&json!({ "steps": steps }));
            } else {
                for (l, tb) in labels.iter().zip(&tables) {
                    let node = tb.chart().node_of(*l).expect("labels persist across flops");
                    io.line(format!(
                        "flop curve {l}: subset {} (curve {l} now at node {node})",
                        tb.subset()
                    ));
                }
                io.line(last.to_json_string());
            }
            if let Some(p) = out {
                write_text(&p, &format!("{}\n", last.to_json_string()))?;
            }
        }
        Command::Dim { table, mutate } => {
            let t = read_table(&table)?;
            let dim = dim_contraction(&t);
            let after = mutate.map(|i| dim_after_mutation(&t, i)).transpose()?;
            if io.json {
                let mut v = json!({ "dim": dim.to_string() });
                if let (Some(i), Some(a)) = (mutate, &after) {
                    v["after_mutation"] = json!({ "curve": i, "dim": a.to_string() });
                }
                io.value(&v);
            } else {
                io.line(dim.to_string());
                if let Some(a) = after {
                    io.line(a.to_string());
                }
            }
        }
        Command::Qp {
            table,
            gamma,
            q,
            poles_at,
            check_ctc,
            at,
        } => {
            let t = read_table(&table)?;
            if let Some(p) = poles_at {
                let p = parse_rational_list(&p)?;
                let poles = pole_diagnostics(&t, &p)?;
                if io.json {
                    io.value(
                        &json!({ "point": p.iter().map(ToString::to_string).collect::<Vec<_>>(), "poles": poles }),
                    );
                } else {
                    for b in poles {
                        io.line(b.to_string());
                    }
                }
                return Ok(());
            }
            let gammas: Vec<Vec<BigRational>> =
                gamma.iter().map(|g| parse_rational_list(g)).collect::<Result<_, _>>()?;
            let gammas: [Vec<BigRational>; 3] = match gammas.len() {
                1 => [gammas[0].clone(), gammas[0].clone(), gammas[0].clone()],
                3 => [gammas[0].clone(), gammas[1].clone(), gammas[2].clone()],
                n => {
                    return Err(Failure::Usage(format!(
                        "--gamma must be given once or three times, not {n}"
                    )))
                }
            };
            let q = q.ok_or_else(|| Failure::Usage("--q is required".into()))?;
            let q = parse_rational_list(&q)?;
            let g = [gammas[0].as_slice(), gammas[1].as_slice(), gammas[2].as_slice()];
            if check_ctc {
                let label = at.expect("clap enforces --at");
                let res = ctc_residual(&t, label, g, &q)?;
                let v = json!({ "lhs": res.lhs.to_string(), "rhs": res.rhs.to_string(), "holds": res.holds() });
                if !res.holds() {
                    return Err(Failure::Verification(v));
                }
                if io.json {
                    io.value(&v);
                } else {
                    io.line(format!("lhs = {}", res.lhs));
                    io.line(format!("rhs = {}", res.rhs));
                }
            } else {
                let v = quantum_potential(&t, g, &q)?;
                if io.json {
                    io.value(&json!({ "q": format_list(&q), "value": v.to_string() }));
                } else {
                    io.line(v.to_string());
                }
            }
        }
        Command::Verify { check } => verify(check, io)?,
        Command::Plot {
            kind,
            ambient: a,
            window,
            size,
            stroke,
            no_labels,
            limit,
            out,
        } => {
            let (d, s) = ambient(&a)?;
            let mut spec = PlotSpec {
                size,
                stroke_scale: parse_rational(&stroke)?,
                labels: !no_labels,
                ..PlotSpec::default()
            };
            if size == 0 {
                return Err(Failure::Usage("--size must be positive".into()));
            }
            if let Some(w) = window {
                let v = parse_rational_list(&w)?;
                if v.len() != 4 {
                    return Err(Failure::Usage("--window takes xmin,xmax,ymin,ymax".into()));
                }
                spec.window = Window::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone())?;
            }
            let svg = match kind {
                PlotKind::Finite => render_finite(&d, &s, &spec)?,
                PlotKind::Infinite => render_infinite(&d, &s, &spec)?,
                PlotKind::Regions => render_fundamental_regions(&d, &s, &spec, chamber_limit(limit)?)?,
            };
            match out {
                Some(p) => write_text(&p, &svg)?,
                None => {
                    let _ = write!(io.out, "{svg}");
                }
            }
        }
        Command::Preset { preset } => {
            let (t, out) = match preset {
                PresetCommand::Ca2 { k, out } => (presets::ca2(k), out),
                PresetCommand::SingleCurve { length, value, out } => (presets::single_curve(length, value)?, out),
            };
            let text = format!("{}\n", t.to_json_string());
            match out {
                Some(p) => write_text(&p, &text)?,
                None => {
                    let _ = write!(io.out, "{text}");
                }
            }
        }
    }
    Ok(())
}

fn verify(check: VerifyCommand, io: &mut Io<'_>) -> CliResult {
    let (value, passed) = match check {
        VerifyCommand::Lemma { diagram, subset } => {
            let d = parse_diagram(&diagram)?;
            match subset {
                Some(s) => {
                    let r = verify_restriction_lemma(&d, &NodeSubset::parse(&s)?)?;
                    (to_json(&r), r.passed)
                }
                None => {
                    let mut reports = Vec::new();
                    let mut ok = true;
                    for mask in 0u64..(1u64 << d.rank()) {
                        let s: NodeSubset = d.nodes().filter(|i| mask >> (i - 1) & 1 == 1).collect();
                        let r = verify_restriction_lemma(&d, &s)?;
                        ok &= r.passed;
                        reports.push(json!({
                            "subset": r.subset,
                            "pairs": r.pairs,
                            "orbits": r.orbits,
                            "violations": r.violations.len(),
                            "passed": r.passed,
                        }));
                    }
                    (
                        json!({ "diagram": d.to_string(), "subsets": reports, "passed": ok }),
                        ok,
                    )
                }
            }
        }
        VerifyCommand::Matrix { ambient: a, at } => {
            let (d, s) = ambient(&a)?;
            let r = verify_flop_matrix(&d, &s, at)?;
            (to_json(&r), r.passed)
        }
        VerifyCommand::Chambers { ambient: a, limit } => {
            let (d, s) = ambient(&a)?;
            let r = verify_chamber_count(&d, &s, chamber_limit(limit)?)?;
            (to_json(&r), r.passed)
        }
    };
    if !passed {
        return Err(Failure::Verification(value));
    }
    io.value(&value);
    Ok(())
}
