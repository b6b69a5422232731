//! The `puc` command line.
//!
//! Exit codes: 0 success (valid, satisfiable, proof ok, formula true),
//! 1 the negative answer, 2 a bound-limited decider verdict, 64 usage,
//! 65 unreadable or malformed input, 70 a search or rewrite budget ran out.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::checker::check;
use crate::corpus;
use crate::decider::{decide_sat, decide_valid, Options, Outcome, DEFAULT_BUDGET, DEFAULT_MAX_WORLDS};
use crate::normalizer::{normalize_within, NormError, DEFAULT_STEPS};
use crate::parser::{
    parse_context, parse_formula, parse_model, parse_proof, proof_to_json, render_context, render_formula,
    render_formula_unicode,
};
use crate::proof::{Derivation, Profile};
use crate::semantics::{evaluate, resolves, EvalError};
use crate::syntax::{classify, label_rank};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_BOUNDED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_BUDGET: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "puc", version, about = "Labelled formulas of conditional logic: parse, evaluate, check, normalize, decide")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Output {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula (or a context) and print its sort and canonical form.
    Parse {
        text: String,
        /// Read TEXT as a context such as `[N,u]`.
        #[arg(long)]
        context: bool,
        /// Render with mathematical symbols.
        #[arg(long)]
        unicode: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Check a proof JSON file.
    Check {
        proof: PathBuf,
        #[arg(long, default_value = "V")]
        profile: Profile,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate a formula on a model or template JSON file.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// Resolve the formula through this context instead.
        #[arg(long)]
        context: Option<String>,
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Decide validity or satisfiability of an N-sort sentence.
    Decide {
        formula: String,
        #[arg(long, conflicts_with = "sat")]
        valid: bool,
        #[arg(long)]
        sat: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_WORLDS)]
        max_worlds: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Normalize a proof JSON file.
    Normalize {
        proof: PathBuf,
        #[arg(long, default_value = "V")]
        profile: Profile,
        /// Largest number of reductions.
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        budget: usize,
        #[command(flatten)]
        out: Output,
    },
    /// List the bundled proofs, print one, or write them all to a directory.
    Examples {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
}

struct Failure(i32, String);

type Res = Result<i32, Failure>;

fn data<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure(EXIT_DATA, format!("{what}: {e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(data(&path.display().to_string()))
}

fn read_proof(path: &Path) -> Result<Derivation, Failure> {
    parse_proof(&read(path)?).map_err(data(&path.display().to_string()))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

/// Runs one command. Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, w: &mut dyn Write) -> Res {
    let mut say = |s: String| writeln!(w, "{s}").map_err(|e| Failure(EXIT_BUDGET, format!("writing output: {e}")));
    match cmd {
        Command::Parse { text, context, unicode, out } => {
            if context {
                let c = parse_context(&text).map_err(data("context"))?;
                let v = json!({"context": render_context(&c), "sort": c.sort().to_string(), "size": c.len()});
                say(if out.json { pretty(&v) } else { format!("{} context {}", c.sort(), render_context(&c)) })?;
                return Ok(EXIT_OK);
            }
            let f = parse_formula(&text).map_err(data("formula"))?;
            let sort = classify(&f).expect("parsed formulas are well sorted");
            let shown = if unicode { render_formula_unicode(&f) } else { render_formula(&f) };
            let v = json!({
                "sort": sort.to_string(),
                "formula": render_formula(&f),
                "unicode": render_formula_unicode(&f),
                "label_rank": label_rank(&f).to_string(),
                "sentence": f.is_sentence(),
            });
            say(if out.json { pretty(&v) } else { format!("{sort} {shown}") })?;
            Ok(EXIT_OK)
        }
        Command::Check { proof, profile, out } => {
            let d = read_proof(&proof)?;
            let r = check(&d, profile);
            if out.json {
                say(pretty(&serde_json::to_value(&r).expect("report serializes")))?;
            } else if r.ok {
                say(format!("ok under {profile}: {} {}", render_context(d.context()), render_formula(d.formula())))?;
                for h in &r.open_hypotheses {
                    say(format!("  open hypothesis {}: {} {}", h.id, h.context, h.formula))?;
                }
            } else {
                for x in &r.diagnostics {
                    say(format!("{:?}: {}", x.path, x.message))?;
                }
            }
            Ok(if r.ok { EXIT_OK } else { EXIT_NO })
        }
        Command::Eval { model, formula, context, trace, out } => {
            let doc = parse_model(&read(&model)?).map_err(data(&model.display().to_string()))?;
            let f = parse_formula(&formula).map_err(data("formula"))?;
            let value = match context {
                Some(c) => {
                    let ctx = parse_context(&c).map_err(data("context"))?;
                    let Some(m) = (doc.reference_neighbourhood.is_none()).then_some(&doc.model) else {
                        return Err(Failure(EXIT_DATA, "resolution needs a model, not a template".into()));
                    };
                    let v = resolves(m, &ctx, &f, &doc.assignment).map_err(eval_failure)?;
                    json!({"value": v})
                }
                None => {
                    let o = evaluate(&doc.structure(), &f, &doc.assignment, trace).map_err(eval_failure)?;
                    serde_json::to_value(&o).expect("outcome serializes")
                }
            };
            let holds = value["value"].as_bool().unwrap_or(false);
            if out.json {
                say(pretty(&value))?;
            } else {
                say(holds.to_string())?;
                for t in value["trace"].as_array().into_iter().flatten() {
                    say(format!("  {} {} {}", t["structure"].as_str().unwrap_or(""), t["formula"].as_str().unwrap_or(""), t["value"]))?;
                }
            }
            Ok(if holds { EXIT_OK } else { EXIT_NO })
        }
        Command::Decide { formula, valid, sat, max_worlds, budget, out } => {
            if !valid && !sat {
                return Err(Failure(EXIT_USAGE, "pass --valid or --sat".into()));
            }
            let f = parse_formula(&formula).map_err(data("formula"))?;
            let opts = Options { max_worlds, budget };
            let v = if valid { decide_valid(&f, opts) } else { decide_sat(&f, opts) }.map_err(data("decide"))?;
            if out.json {
                say(pretty(&serde_json::to_value(&v).expect("verdict serializes")))?;
            } else {
                let tag = serde_json::to_value(v.outcome).expect("outcome serializes");
                let mut line = tag.as_str().unwrap_or_default().to_string();
                if v.bound_limited {
                    line.push_str(&format!(" (bound-limited to {max_worlds} worlds)"));
                }
                if !v.fragment_certified {
                    line.push_str(" (outside the certified fragment)");
                }
                say(line)?;
                if let Some(m) = &v.model {
                    say(pretty(&crate::parser::model_to_json(m)))?;
                }
            }
            Ok(match (v.bound_limited, v.outcome) {
                (true, _) => EXIT_BOUNDED,
                (_, Outcome::Valid | Outcome::Sat) => EXIT_OK,
                _ => EXIT_NO,
            })
        }
        Command::Normalize { proof, profile, budget, out } => {
            let d = read_proof(&proof)?;
            let r = check(&d, profile);
            if !r.ok {
                for x in &r.diagnostics {
                    say(format!("{:?}: {}", x.path, x.message))?;
                }
                return Ok(EXIT_NO);
            }
            let n = match normalize_within(&d, budget) {
                Ok(n) => n,
                Err(e @ NormError::Budget(_)) => return Err(Failure(EXIT_BUDGET, e.to_string())),
                Err(e) => return Err(Failure(EXIT_BUDGET, format!("internal: {e}"))),
            };
            if out.json {
                let v = json!({
                    "before": proof_to_json(&d),
                    "after": proof_to_json(&n.derivation),
                    "log": n.log,
                    "residual": n.residual,
                });
                say(pretty(&v))?;
            } else {
                for r in &n.log {
                    say(format!("{} at {:?}", r.kind.name(), r.path))?;
                }
                say(format!("{} reductions, {} residual absurd sites", n.log.len(), n.residual.len()))?;
                say(pretty(&proof_to_json(&n.derivation)))?;
            }
            Ok(EXIT_OK)
        }
        Command::Examples { name, out_dir, out } => {
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir).map_err(data(&dir.display().to_string()))?;
                for e in corpus::ENTRIES {
                    let p = dir.join(format!("{}.proof.json", e.name));
                    std::fs::write(&p, pretty(&proof_to_json(&e.derivation())) + "\n").map_err(data(&p.display().to_string()))?;
                    say(p.display().to_string())?;
                }
                return Ok(EXIT_OK);
            }
            match name {
                Some(n) => {
                    let e = corpus::get(&n).ok_or_else(|| Failure(EXIT_USAGE, format!("no bundled proof `{n}`")))?;
                    say(pretty(&proof_to_json(&e.derivation())))?;
                }
                None if out.json => {
                    let v: Vec<Value> = corpus::ENTRIES
                        .iter()
                        .map(|e| json!({"name": e.name, "profile": e.profile.to_string(), "about": e.about}))
                        .collect();
                    say(pretty(&Value::Array(v)))?;
                }
                None => {
                    for e in corpus::ENTRIES {
                        say(format!("{:<10} {:<3} {}", e.name, e.profile.to_string(), e.about))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn eval_failure(e: EvalError) -> Failure {
    match e {
        EvalError::Budget(_) => Failure(EXIT_BUDGET, e.to_string()),
        _ => Failure(EXIT_DATA, e.to_string()),
    }
}
