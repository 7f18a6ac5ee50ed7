use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use mixlin::budget::{self, Limits};
use mixlin::harness::{self, System};
use mixlin::omega::{self, Counterexample, Options, Report, Verdict};
use mixlin::parser::{self, Scope};
use mixlin::{separation, Assignment, Error, Relation};

const YES: u8 = 0;
const NO: u8 = 1;
const USAGE: u8 = 2;
const PRECONDITION: u8 = 3;
const RESOURCE: u8 = 4;

#[derive(Parser)]
#[command(name = "mixlin", version, about = "Decide ω-chain existence for transitive mixed linear relations")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Print a JSON report on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Length of the witness prefix (0 disables extraction)
    #[arg(long, value_name = "N", default_value_t = 5, global = true)]
    witness: usize,
    /// Skip the transitivity precheck
    #[arg(long, global = true)]
    trust_transitive: bool,
    /// Give up with exit code 4 after this many seconds
    #[arg(long, value_name = "SECONDS", global = true)]
    timeout: Option<f64>,
    /// Give up with exit code 4 after this many elimination branches
    #[arg(long, value_name = "N", global = true)]
    max_branches: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a relation has an ω-chain
    Decide { file: PathBuf },
    /// Check a relation for transitivity
    Transitive { file: PathBuf },
    /// Find a model of a formula document
    Sat { file: PathBuf },
    /// Eliminate the quantifiers of a formula document
    Qe { file: PathBuf },
    /// Print the canonical separated disjuncts of a relation
    Separate { file: PathBuf },
    /// k-safety of a system: no run from init meets the safe formulas in order
    Safety { file: PathBuf },
    /// k-liveness of a system: some run from init meets every live formula infinitely often
    Liveness { file: PathBuf },
    /// Some infinite run from init passes through a formula
    Eventuality {
        file: PathBuf,
        /// Target formula (defaults to the first live formula)
        #[arg(long, value_name = "FORMULA")]
        target: Option<String>,
    },
    /// Boundedness of the system's bound terms
    Bound {
        file: PathBuf,
        /// Ask for a bound on every configuration reachable from init
        #[arg(long, conflicts_with = "uniform")]
        reachable: bool,
        /// Uniform bounds over all executions (not supported)
        #[arg(long)]
        uniform: bool,
    },
    /// Exhaustive finite-box oracle for integer relations
    Oracle {
        file: PathBuf,
        /// One interval per variable, e.g. `0:3,-2:2`
        #[arg(long = "box", value_name = "LO:HI,...")]
        bounds: String,
        /// Maximum number of box points
        #[arg(long, default_value_t = 4096)]
        cap: usize,
    },
}

struct Outcome {
    code: u8,
    json: Value,
    text: String,
}

impl Outcome {
    fn new(code: u8, verdict: &str, text: String) -> Self {
        Outcome {
            code,
            json: report_json(verdict, Value::Null, Value::Null, Value::Null, &Map::new()),
            text,
        }
    }
}

fn report_json(verdict: &str, disjunct: Value, modes: Value, prefix: Value, stats: &Map<String, Value>) -> Value {
    let mut st = json!({"disjuncts": 0, "mode_vectors_checked": 0, "elapsed_ms": 0});
    for (k, v) in stats {
        st[k] = v.clone();
    }
    json!({
        "verdict": verdict,
        "disjunct": disjunct,
        "modes": modes,
        "prefix": prefix,
        "stats": st,
    })
}

fn assignment_json(a: &Assignment) -> Value {
    Value::Object(a.iter().map(|(v, x)| (v.to_string(), Value::String(x.to_string()))).collect())
}

fn counterexample_json(cx: &Counterexample) -> Value {
    json!([assignment_json(&cx.a), assignment_json(&cx.b), assignment_json(&cx.c)])
}

fn counterexample_text(cx: &Counterexample) -> String {
    format!("counterexample: a = {}, b = {}, c = {}", cx.a, cx.b, cx.c)
}

fn verdict_outcome(rep: &Report, yes: &str, no: &str) -> Outcome {
    let stats: Map<String, Value> = [
        ("disjuncts".to_string(), json!(rep.stats.disjuncts)),
        ("mode_vectors_checked".to_string(), json!(rep.stats.mode_vectors_checked)),
        ("elapsed_ms".to_string(), json!(rep.stats.elapsed_ms as u64)),
    ]
    .into_iter()
    .collect();
    match &rep.verdict {
        Verdict::HasOmegaChain {
            disjunct,
            modes,
            prefix,
        } => {
            let d = &rep.disjuncts[*disjunct];
            let vars: Map<String, Value> = modes
                .var_modes(d)
                .into_iter()
                .map(|(v, m)| (v.to_string(), json!(m.name())))
                .collect();
            let terms: Map<String, Value> = modes.term_modes().into_iter().map(|(l, m)| (l, json!(m.name()))).collect();
            let modes_json = json!({"vars": vars, "terms": terms});
            let prefix_json = match prefix {
                Some(p) => Value::Array(p.iter().map(assignment_json).collect()),
                None => Value::Null,
            };
            let mut text = format!("{yes}\ndisjunct {disjunct}: {d}\nmodes:");
            for (v, m) in modes.var_modes(d) {
                text.push_str(&format!(" {v}:{m}"));
            }
            for (l, m) in modes.term_modes() {
                text.push_str(&format!(" {l}:{m}"));
            }
            if let Some(p) = prefix {
                text.push_str("\nprefix:");
                for a in p {
                    text.push_str(&format!("\n  {a}"));
                }
            }
            Outcome {
                code: YES,
                json: report_json(yes, json!(disjunct), modes_json, prefix_json, &stats),
                text,
            }
        }
        Verdict::NoOmegaChain => Outcome {
            code: NO,
            json: report_json(no, Value::Null, Value::Null, Value::Null, &stats),
            text: no.to_string(),
        },
        Verdict::NotTransitive(cx) => {
            let mut json = report_json("not_transitive", Value::Null, Value::Null, Value::Null, &stats);
            json["counterexample"] = counterexample_json(cx);
            Outcome {
                code: PRECONDITION,
                json,
                text: format!("relation is not transitive\n{}", counterexample_text(cx)),
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Unsupported(format!("cannot read {}: {e}", path.display())))
}

fn relation(path: &Path) -> Result<Relation, Error> {
    Ok(parser::parse_relation(&read(path)?)?)
}

fn system(path: &Path) -> Result<System, Error> {
    Ok(parser::parse_system(&read(path)?)?)
}

fn parse_box(s: &str) -> Result<Vec<(i64, i64)>, Error> {
    s.split(',')
        .map(|part| {
            let bad = || Error::Unsupported(format!("bad interval `{part}`, expected LO:HI"));
            let (lo, hi) = part.trim().split_once(':').ok_or_else(bad)?;
            let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok((lo, hi))
        })
        .collect()
}

fn run(cmd: &Cmd, opts: &Options) -> Result<Outcome, Error> {
    let start = Instant::now();
    let timed = |mut o: Outcome| {
        if o.json["stats"]["elapsed_ms"] == json!(0) {
            o.json["stats"]["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
        }
        o
    };
    let out = match cmd {
        Cmd::Decide { file } => verdict_outcome(&omega::decide(&relation(file)?, opts)?, "has_omega_chain", "no_omega_chain"),
        Cmd::Transitive { file } => match omega::check_transitive(&relation(file)?)? {
            None => Outcome::new(YES, "transitive", "transitive".into()),
            Some(cx) => {
                let mut o = Outcome::new(NO, "not_transitive", format!("not transitive\n{}", counterexample_text(&cx)));
                o.json["counterexample"] = counterexample_json(&cx);
                o
            }
        },
        Cmd::Sat { file } => {
            let r = relation(file)?;
            match separation::mixed_model(&r.body)? {
                Some(m) => {
                    let mut o = Outcome::new(YES, "sat", format!("sat\n{m}"));
                    o.json["model"] = assignment_json(&m);
                    o
                }
                None => Outcome::new(NO, "unsat", "unsat".into()),
            }
        }
        Cmd::Qe { file } => {
            let r = relation(file)?;
            let f = separation::mixed_qe(&r.body)?;
            let printed = parser::print_formula(&f);
            let mut o = Outcome::new(YES, "eliminated", printed.clone());
            o.json["formula"] = json!(printed);
            o
        }
        Cmd::Separate { file } => {
            let r = relation(file)?;
            let ds = separation::to_canonical(&r)?;
            let lines: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
            let mut text = format!("{} disjunct(s)", ds.len());
            for (i, l) in lines.iter().enumerate() {
                text.push_str(&format!("\n[{i}] {l}"));
            }
            let mut o = Outcome::new(YES, "separated", text);
            o.json["stats"]["disjuncts"] = json!(ds.len());
            o.json["canonical"] = json!(lines);
            o
        }
        Cmd::Safety { file } => {
            if harness::decide_k_safety(&system(file)?, opts)? {
                Outcome::new(YES, "safe", "safe".into())
            } else {
                Outcome::new(NO, "unsafe", "unsafe".into())
            }
        }
        Cmd::Liveness { file } => verdict_outcome(&harness::decide_k_liveness(&system(file)?, opts)?, "live", "not_live"),
        Cmd::Eventuality { file, target } => {
            let sys = system(file)?;
            let p = match target {
                Some(t) => parser::parse_formula(t, &Scope::new(&sys.reach.vars(), false))?,
                None => sys
                    .live
                    .first()
                    .cloned()
                    .ok_or_else(|| Error::Unsupported("eventuality needs --target or a (live ...) formula".into()))?,
            };
            verdict_outcome(&harness::decide_eventuality(&sys, &p, opts)?, "reaches", "never_reaches")
        }
        Cmd::Bound {
            file,
            reachable,
            uniform,
        } => {
            if *uniform {
                return Err(Error::Unsupported(
                    "uniform bounds over all executions have no known decision procedure; use --reachable or the default per-run boundedness".into(),
                ));
            }
            let sys = system(file)?;
            if *reachable {
                if harness::decide_reachable_bound(&sys, opts)? {
                    Outcome::new(YES, "bounded", "bounded".into())
                } else {
                    Outcome::new(NO, "unbounded", "unbounded".into())
                }
            } else {
                if sys.bounds.is_empty() {
                    return Err(Error::Unsupported("bound query without (bound ...) terms".into()));
                }
                let mut out = Outcome::new(YES, "bounded", "bounded".into());
                for (i, l) in sys.bounds.iter().enumerate() {
                    let rep = harness::exists_unbounded_execution(&sys, l, opts)?;
                    if rep.verdict.has_chain() {
                        let mut o = verdict_outcome(&rep, "unbounded", "bounded");
                        o.code = NO;
                        o.text = format!("{}\nterm {i} ({}) grows without bound", o.text, parser::print_term(l));
                        o.json["term"] = json!(i);
                        out = o;
                        break;
                    }
                }
                out
            }
        }
        Cmd::Oracle { file, bounds, cap } => {
            let r = relation(file)?;
            let b = parse_box(bounds)?;
            if harness::finite_domain_oracle(&r, &b, *cap)? {
                Outcome::new(YES, "has_omega_chain", "has_omega_chain (reflexive point in box)".into())
            } else {
                Outcome::new(NO, "no_omega_chain", "no_omega_chain (no reflexive point in box)".into())
            }
        }
    };
    Ok(timed(out))
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::NotTransitive => PRECONDITION,
        Error::ResourceLimit(_) | Error::BoxTooLarge(_) => RESOURCE,
        Error::Internal(_) => 70,
        _ => USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { YES });
        }
    };
    let c = &cli.common;
    if let Some(t) = c.timeout {
        if !(t.is_finite() && t >= 0.0) {
            eprintln!("error: --timeout must be a non-negative number of seconds");
            return ExitCode::from(USAGE);
        }
    }
    let opts = Options {
        check_transitivity: !c.trust_transitive,
        witness: (c.witness > 0).then_some(c.witness),
        ..Options::default()
    };
    let limits = Limits {
        timeout: c.timeout.map(Duration::from_secs_f64),
        max_branches: c.max_branches,
    };
    match budget::with_limits(limits, || run(&cli.cmd, &opts)) {
        Ok(out) => {
            if c.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
