//! `kdep`: check, derive and decide inclusion dependencies over annotated
//! databases.
//!
//! Exit codes: 0 yes, 1 no, 2 input error, 3 budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kdep::chase::{
    canonical_start_classical, canonical_start_plus, classical_chase, plus_chase, ChaseConfig,
    ChaseTrace, DEFAULT_STEP_LIMIT,
};
use kdep::entail::{decide_entailment, EntailOptions, Evidence};
use kdep::ind::{parse_ind_list, violations};
use kdep::infer::{derives, RuleSystem};
use kdep::kdb::monoid_from_json;
use kdep::monoid::{FiniteTable, DEFAULT_K_BOUND};
use kdep::oracle::{
    brute_force_balanced_entails, brute_force_entails, SearchSpace, DEFAULT_SEARCH_CAP,
};
use kdep::{Error, Ind, KDatabase, MonoidSpec, Schema};

#[derive(Parser)]
#[command(name = "kdep", version, about)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a database against a list of INDs.
    Check {
        /// Database JSON file.
        db: PathBuf,
        /// IND list, one per line.
        inds: PathBuf,
    },
    /// Decide whether Σ entails τ over a monoid.
    Entail {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value = "naturals")]
        monoid: String,
        /// Only consider balanced databases.
        #[arg(long)]
        balanced: bool,
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
        step_limit: usize,
    },
    /// Search for a derivation of τ from Σ.
    Derive {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, value_enum, default_value_t = System::Standard)]
        system: System,
    },
    /// Run the classical chase, or the ⊕-chase with `--plus`.
    Chase {
        /// IND list Σ.
        sigma: PathBuf,
        /// Start from this database.
        #[arg(
            long,
            conflicts_with = "canonical",
            required_unless_present = "canonical"
        )]
        start: Option<PathBuf>,
        /// Start from the canonical database of this IND.
        #[arg(long)]
        canonical: Option<String>,
        /// Schema JSON; inferred from the INDs when absent.
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        plus: bool,
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
        step_limit: usize,
        /// Write the trace JSON here.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Report the absorption properties of a monoid.
    Classify {
        /// Builtin name or path to a table JSON file.
        monoid: String,
    },
    /// Search small databases for a counterexample to Σ ⊨ τ.
    Oracle {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value = "boolean")]
        monoid: String,
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        adom: Vec<String>,
        /// Nonzero weights to try; defaults to every nonzero element of a
        /// finite monoid.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<String>,
        #[arg(long, default_value_t = 4)]
        max_tuples: usize,
        /// Bound the support of each relation rather than of the database.
        #[arg(long)]
        per_relation: bool,
        #[arg(long)]
        balanced: bool,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u128,
    },
}

#[derive(Args)]
struct Problem {
    /// IND list Σ.
    sigma: PathBuf,
    /// The goal τ.
    tau: String,
    /// Schema JSON; inferred from the INDs when absent.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Standard,
    Ws,
    Balance,
}

impl From<System> for RuleSystem {
    fn from(s: System) -> Self {
        match s {
            System::Standard => RuleSystem::Standard,
            System::Ws => RuleSystem::StandardWS,
            System::Balance => RuleSystem::StandardBalance,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ChaseBudgetExceeded(_) | Error::SearchSpaceTooLarge { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check { db, inds } => check(cli.json, db, inds),
        Command::Entail {
            problem,
            monoid,
            balanced,
            step_limit,
        } => entail(cli.json, problem, monoid, *balanced, *step_limit),
        Command::Derive { problem, system } => derive(cli.json, problem, *system),
        Command::Chase {
            sigma,
            start,
            canonical,
            schema,
            plus,
            step_limit,
            trace_out,
        } => {
            let sigma_text = read(sigma)?;
            let start_db = match (start, canonical) {
                (Some(path), _) => KDatabase::from_json(&read(path)?)?,
                (None, Some(tau)) => {
                    let tau = Ind::parse(tau)?;
                    let sigma = parse_ind_list(&sigma_text, None)?;
                    let schema = load_schema(schema.as_deref(), &sigma, &tau)?;
                    if *plus {
                        canonical_start_plus(&tau, &schema)?
                    } else {
                        canonical_start_classical(&tau, &schema)?
                    }
                }
                (None, None) => unreachable!("clap requires a start"),
            };
            let sigma = parse_ind_list(&sigma_text, Some(start_db.schema()))?;
            let trace = if *plus {
                plus_chase(
                    &start_db,
                    &sigma,
                    &ChaseConfig::with_step_limit(*step_limit),
                )?
            } else {
                classical_chase(&start_db, &sigma)?
            };
            chase_report(cli.json, &trace, trace_out.as_deref())
        }
        Command::Classify { monoid } => {
            let m = load_monoid(monoid)?;
            let report = m.classify(DEFAULT_K_BOUND)?;
            let value = json!({ "monoid": m.name(), "properties": report });
            print_json(&value);
            Ok(0)
        }
        Command::Oracle {
            problem,
            monoid,
            adom,
            weights,
            max_tuples,
            per_relation,
            balanced,
            cap,
        } => {
            let m = load_monoid(monoid)?;
            let (sigma, tau, schema) = load_problem(problem)?;
            let pool = if weights.is_empty() {
                m.elements()
                    .ok_or_else(|| Failure {
                        code: 2,
                        message: format!("{} is infinite; pass --weights", m.name()),
                    })?
                    .into_iter()
                    .filter(|e| !m.is_zero(e))
                    .collect()
            } else {
                weights
                    .iter()
                    .map(|w| m.parse_element(w))
                    .collect::<kdep::Result<Vec<_>>>()?
            };
            let mut space =
                SearchSpace::new(adom.iter().cloned(), pool, *max_tuples).with_cap(*cap);
            if *per_relation {
                space = space.per_relation();
            }
            let found = if *balanced {
                brute_force_balanced_entails(&sigma, &tau, &m, &schema, &space)?
            } else {
                brute_force_entails(&sigma, &tau, &m, &schema, &space)?
            };
            if cli.json {
                print_json(&json!({
                    "counterexample": found.as_ref().map(KDatabase::to_json),
                    "found": found.is_some(),
                }));
            } else {
                match &found {
                    Some(db) => print!("counterexample found\n{}", db.render_table()),
                    None => println!("no counterexample within the search space"),
                }
            }
            Ok(u8::from(found.is_some()))
        }
    }
}

fn check(as_json: bool, db: &Path, inds: &Path) -> Outcome {
    let db = KDatabase::from_json(&read(db)?)?;
    let inds = parse_ind_list(&read(inds)?, Some(db.schema()))?;
    let m = db.monoid();
    let mut all = true;
    let mut rows = Vec::new();
    for ind in &inds {
        let v = violations(&db, ind)?;
        all &= v.is_empty();
        if !as_json {
            if v.is_empty() {
                println!("ok        {ind}");
            } else {
                println!("violated  {ind}");
                for x in &v {
                    println!(
                        "          at {}: {} > {}",
                        x.key,
                        m.render(&x.lhs),
                        m.render(&x.rhs)
                    );
                }
            }
        }
        rows.push(json!({
            "ind": ind.to_string(),
            "satisfied": v.is_empty(),
            "violations": v.iter().map(|x| json!({
                "key": x.key.values().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "lhs": m.render(&x.lhs),
                "rhs": m.render(&x.rhs),
            })).collect::<Vec<_>>(),
        }));
    }
    if as_json {
        print_json(&json!({ "inds": rows, "satisfied": all }));
    }
    Ok(u8::from(!all))
}

fn entail(
    as_json: bool,
    problem: &Problem,
    monoid: &str,
    balanced: bool,
    step_limit: usize,
) -> Outcome {
    let m = load_monoid(monoid)?;
    let (sigma, tau, schema) = load_problem(problem)?;
    let opts = EntailOptions {
        balanced,
        chase: ChaseConfig::with_step_limit(step_limit),
        ..Default::default()
    };
    let verdict = decide_entailment(&sigma, &tau, &m, &schema, &opts)?;
    if as_json {
        print_json(&verdict.to_json());
    } else {
        let word = if verdict.entailed {
            "entailed"
        } else {
            "not entailed"
        };
        println!("{word} over {} ({})", m.name(), verdict.method.name());
        match &verdict.evidence {
            Evidence::Proof(p) => print!("{}", p.render_text()),
            Evidence::Countermodel(cm) => {
                println!("countermodel ({}):", cm.construction.name());
                print!("{}", cm.database.render_table());
            }
        }
    }
    Ok(u8::from(!verdict.entailed))
}

fn derive(as_json: bool, problem: &Problem, system: System) -> Outcome {
    let (sigma, tau, schema) = load_problem(problem)?;
    let proof = derives(&sigma, &tau, RuleSystem::from(system), &schema)?;
    if as_json {
        print_json(&json!({
            "derivable": proof.is_some(),
            "proof": proof.as_ref().map(|p| p.to_json()),
        }));
    } else {
        match &proof {
            Some(p) => print!("{}", p.render_text()),
            None => println!("not derivable"),
        }
    }
    Ok(u8::from(proof.is_none()))
}

fn chase_report(as_json: bool, trace: &ChaseTrace, trace_out: Option<&Path>) -> Outcome {
    let value = trace.to_json();
    if let Some(path) = trace_out {
        let text = serde_json::to_string_pretty(&value).expect("JSON values serialize") + "\n";
        fs::write(path, text).map_err(|e| Failure {
            code: 2,
            message: format!("{}: {e}", path.display()),
        })?;
    }
    if as_json {
        print_json(&value);
    } else {
        print!("{}", trace.render_table());
    }
    if trace.terminated() {
        Ok(0)
    } else {
        eprintln!("step limit of {} reached", trace.steps.len());
        Ok(3)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON values serialize")
    );
}

/// A builtin name, or a path to a table JSON file.
fn load_monoid(spec: &str) -> Result<MonoidSpec, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = read(path)?;
        let value: Value = serde_json::from_str(&text).map_err(Error::from)?;
        return Ok(match value {
            Value::String(_) => monoid_from_json(&value)?,
            _ => MonoidSpec::table(FiniteTable::from_value(value)?),
        });
    }
    Ok(spec.parse()?)
}

fn load_problem(problem: &Problem) -> Result<(Vec<Ind>, Ind, Schema), Failure> {
    let sigma = parse_ind_list(&read(&problem.sigma)?, None)?;
    let tau = Ind::parse(&problem.tau)?;
    let schema = load_schema(problem.schema.as_deref(), &sigma, &tau)?;
    for ind in sigma.iter().chain(std::iter::once(&tau)) {
        ind.validate(&schema)?;
    }
    Ok((sigma, tau, schema))
}

fn load_schema(path: Option<&Path>, sigma: &[Ind], tau: &Ind) -> Result<Schema, Failure> {
    match path {
        Some(p) => {
            let value: Value = serde_json::from_str(&read(p)?).map_err(Error::from)?;
            Ok(Schema::from_json_value(&value)?)
        }
        None => Ok(infer_schema(sigma.iter().chain(std::iter::once(tau)))?),
    }
}

/// Each relation gets the attributes the INDs mention, in order of first use.
fn infer_schema<'a>(inds: impl Iterator<Item = &'a Ind>) -> kdep::Result<Schema> {
    let mut rels: Vec<(String, Vec<String>)> = Vec::new();
    let mut note = |rel: &str, attrs: &[String]| {
        let i = match rels.iter().position(|(r, _)| r == rel) {
            Some(i) => i,
            None => {
                rels.push((rel.to_string(), Vec::new()));
                rels.len() - 1
            }
        };
        for a in attrs {
            if !rels[i].1.contains(a) {
                rels[i].1.push(a.clone());
            }
        }
    };
    for ind in inds {
        note(&ind.lhs_rel, &ind.lhs_attrs);
        note(&ind.rhs_rel, &ind.rhs_attrs);
    }
    let mut schema = Schema::new();
    for (rel, attrs) in rels {
        schema.add_relation(rel, attrs)?;
    }
    Ok(schema)
}
