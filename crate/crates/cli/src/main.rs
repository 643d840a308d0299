//! `acbench`: command-line front end for the workbench.
//!
//! Exit status: 0 success, 1 mathematical "no", 2 unknown or caps hit,
//! 3 usage or IO error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acbench::ac::{fibonacci_bound, verify_trivialization, MoveTrace};
use acbench::constructions::{build_pw, build_tilde_pw, dagger_lift, gen_v, gen_w, DoublingSpec, IndexedWord};
use acbench::fixtures;
use acbench::search::{bfs_trivialize, explore_sublevel, SearchCaps, SearchOutcome};
use acbench::solvers::area::{area_bfs, area_star_bounded, prove, AreaCaps, AreaResult};
use acbench::solvers::britton::{britton_solve, solve_bm};
use acbench::solvers::certificate::wn_certificate;
use acbench::trivializer::{acc_bounds, seed_family_plan, trivialize_pw};
use acbench::{Error, Presentation, Word};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::{json, Value};

const FORMAT_VERSION: u32 = 1;
/// Refuse constructive certificates past this many steps.
const MAX_CERTIFICATE_STEPS: usize = 1 << 16;

#[derive(Parser)]
#[command(name = "acbench", version, about = "Balanced presentations, Andrews-Curtis moves and word-problem oracles")]
struct Cli {
    /// Print a versioned JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for the searches; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print w_n = x V_m x^-1 V_m^-1 with m = floor(log2 n).
    GenWn {
        #[arg(long)]
        n: u64,
        /// Accepted for symmetry with `solve`; the word does not depend on k.
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Print V_m.
    GenV {
        #[arg(long)]
        m: u32,
    },
    /// Lift a word with zero t-exponent to x_i letters.
    Dagger {
        #[arg(long)]
        word: String,
    },
    /// Build P_w (or the stable-letter form with --tilde) from a seed.
    BuildPw {
        /// Seed presentation: fixture name, file or inline `< .. | .. >`.
        #[arg(long)]
        seed: String,
        #[arg(long)]
        a0: String,
        #[arg(long)]
        a1: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        tilde: bool,
    },
    /// Generator count, relator count, deficiency and total length.
    Measures {
        #[arg(long)]
        input: String,
    },
    /// Delete a generator letter from every relator.
    DeleteLetter {
        #[arg(long)]
        input: String,
        #[arg(long)]
        letter: String,
    },
    /// Decide w = 1 in S_k (group `s<k>`) or B_m (group `b<m>`).
    Solve {
        #[arg(long)]
        group: String,
        #[arg(long)]
        word: String,
        /// Base for `b<m>` groups.
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Exact area by iterative-deepening search.
    Area(WordArgs),
    /// Bound area*(w) over the powers w^1 .. w^n_max.
    AreaStar {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, default_value_t = 2)]
        n_max: u32,
    },
    /// Exact area together with a checked certificate.
    Prove {
        #[command(flatten)]
        word: WordArgs,
        /// Write the certificate JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit an AC trivialization of P_{w_n} for the seed S_k.
    Trivialize {
        /// `s<k>` or `s` with --k.
        #[arg(long, default_value = "s2")]
        seed: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: Option<u32>,
        /// Find the certificate for w_n by exact search instead of the recursion.
        #[arg(long)]
        search: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a trace and check that it ends in trivial form.
    VerifyTrace {
        #[arg(long)]
        trace: PathBuf,
        /// Require r_i = x_i with matching indices.
        #[arg(long)]
        ordered: bool,
    },
    /// F_m with F_0 = 1, F_1 = 2.
    FibBound {
        #[arg(long)]
        m: u64,
    },
    /// Lower bound on the AC length of P_{w_n}, and an upper bound from a trace.
    AccBounds {
        #[arg(long)]
        n: BigUint,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Breadth-first search for an AC trivialization.
    Search {
        #[arg(long)]
        input: String,
        #[command(flatten)]
        caps: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Connected components of the sublevel set of total length <= m.
    Sublevel {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        caps: SearchArgs,
    },
    /// List the built-in presentations, or print one.
    Fixtures {
        name: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
    },
}

#[derive(Args)]
struct WordArgs {
    /// Presentation: fixture name (`s2`, `q1`, `b3`, ..), file or inline text.
    #[arg(long)]
    group: String,
    #[arg(long)]
    word: String,
    #[arg(long, default_value_t = 40)]
    max_len: usize,
    #[arg(long, default_value_t = 2_000_000)]
    max_states: usize,
    #[arg(long, default_value_t = 12)]
    max_depth: usize,
    /// Key visited words by cyclic class (faster, not a proven invariant).
    #[arg(long)]
    cyclic_keys: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 12)]
    max_len: usize,
    #[arg(long, default_value_t = 1)]
    max_conj: usize,
    #[arg(long, default_value_t = 200_000)]
    max_states: usize,
    #[arg(long, default_value_t = 12)]
    max_depth: usize,
}

impl SearchArgs {
    fn caps(&self, threads: usize) -> SearchCaps {
        SearchCaps {
            max_relator_len: self.max_len,
            max_conjugator_len: self.max_conj,
            max_states: self.max_states,
            max_depth: self.max_depth,
            threads,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Status {
    Ok = 0,
    No = 1,
    Unknown = 2,
}

struct Report {
    status: Status,
    text: String,
    json: Value,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Report {
        Report { status: Status::Ok, text: text.into(), json }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Math(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(s) | Failure::Io(s) => f.write_str(s),
            Failure::Math(e) => write!(f, "{e}"),
        }
    }
}

type Outcome = Result<Report, Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("plain data");
    fs::write(path, text + "\n").map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

/// Splits `s2` into `("s", Some(2))`.
fn split_name(spec: &str) -> (&str, Option<usize>) {
    let cut = spec.find(|c: char| c.is_ascii_digit()).unwrap_or(spec.len());
    (&spec[..cut], spec[cut..].parse().ok())
}

/// Resolves a presentation given inline, as a text or JSON file, or by fixture name.
fn load_presentation(spec: &str, k: Option<u32>) -> Result<Presentation, Failure> {
    let spec = spec.trim();
    if spec.starts_with('<') {
        return Ok(spec.parse()?);
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = read_file(path)?;
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())));
        }
        return Ok(text.trim().parse()?);
    }
    let (name, num) = split_name(spec);
    let p = match name {
        "s" | "S" => fixtures::seed_s(num.map(|v| v as u32).or(k).unwrap_or(2))?,
        "b" | "B" => fixtures::b_m(num.ok_or_else(|| Failure::Usage("group `b` needs an index, as in b3".into()))?, k.unwrap_or(2))?,
        _ => fixtures::by_name(spec, None, k).map_err(|_| Failure::Usage(format!("`{spec}` is neither a file nor a known presentation")))?,
    };
    Ok(p)
}

fn load_trace(path: &Path) -> Result<MoveTrace, Failure> {
    serde_json::from_str(&read_file(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn area_caps(a: &WordArgs, threads: usize) -> AreaCaps {
    AreaCaps { max_len: a.max_len, max_states: a.max_states, max_depth: a.max_depth, cyclic_keys: a.cyclic_keys, threads }
}

fn result_text(r: &AreaResult) -> String {
    match r {
        AreaResult::Exact { area } => format!("{area}"),
        AreaResult::Unknown { lower, upper: Some(u) } => format!("unknown: {lower} <= area <= {u}"),
        AreaResult::Unknown { lower, upper: None } => format!("unknown: area >= {lower}"),
    }
}

fn status_of(r: &AreaResult) -> Status {
    if r.exact().is_some() {
        Status::Ok
    } else {
        Status::Unknown
    }
}

fn seed_word(text: &str) -> Result<Word, Failure> {
    Ok(fixtures::seed_alphabet().parse_word(text)?)
}

fn run(cli: &Cli) -> Outcome {
    let threads = cli.threads;
    match &cli.command {
        Command::GenWn { n, .. } => {
            let w = gen_w(*n)?;
            let text = fixtures::seed_alphabet().format_word(&w);
            Ok(Report::ok(text.clone(), json!({ "n": n, "word": text, "length": w.len() })))
        }
        Command::GenV { m } => {
            let v = gen_v(*m);
            let text = fixtures::seed_alphabet().format_word(&v);
            Ok(Report::ok(text.clone(), json!({ "m": m, "word": text, "length": v.len() })))
        }
        Command::Dagger { word } => {
            let lifted = dagger_lift(&seed_word(word)?)?;
            let text = lifted.to_string();
            Ok(Report::ok(text.clone(), json!({ "word": text, "length": lifted.len() })))
        }
        Command::BuildPw { seed, a0, a1, w, tilde } => {
            let seed = load_presentation(seed, None)?;
            let w = seed.word(w)?;
            let spec = DoublingSpec::named(seed, a0, a1, w)?;
            let p = if *tilde { build_tilde_pw(&spec)? } else { build_pw(&spec)?.presentation };
            Ok(Report::ok(p.to_string(), json!({ "presentation": p.to_json_value(), "measures": p.measures() })))
        }
        Command::Measures { input } => {
            let p = load_presentation(input, None)?;
            let m = p.measures();
            let text = format!(
                "generators {}\nrelators {}\ndeficiency {}\nlength {}\nbalanced {}",
                m.generators, m.relators, m.deficiency, m.lambda, m.balanced
            );
            Ok(Report::ok(text, json!({ "measures": m })))
        }
        Command::DeleteLetter { input, letter } => {
            let p = load_presentation(input, None)?;
            let d = p.delete_generator_named(letter)?;
            let text = format!("{}\ndeleted {} letters {:?}", d.presentation, d.total(), d.counts);
            Ok(Report::ok(text, json!({ "presentation": d.presentation.to_json_value(), "counts": d.counts, "total": d.total() })))
        }
        Command::Solve { group, word, k } => {
            let (name, num) = split_name(group);
            let (trivial, detail) = match (name, num) {
                ("s" | "S", Some(sk)) => {
                    let out = britton_solve(&seed_word(word)?, sk as u32)?;
                    (out.trivial, out.to_json_value())
                }
                ("b" | "B", Some(m)) => {
                    let b = fixtures::b_m(m, *k)?;
                    let v = IndexedWord::from_bm_word(&b.word(word)?);
                    (solve_bm(&v, m, *k)?, Value::Null)
                }
                _ => return Err(Failure::Usage(format!("solve handles groups s<k> and b<m>, not `{group}`"))),
            };
            let verdict = if trivial { "trivial" } else { "nontrivial" };
            Ok(Report {
                status: if trivial { Status::Ok } else { Status::No },
                text: verdict.into(),
                json: json!({ "group": group, "trivial": trivial, "reduced": detail }),
            })
        }
        Command::Area(a) => {
            let p = load_presentation(&a.group, None)?;
            let w = p.word(&a.word)?;
            let caps = area_caps(a, threads);
            let r = area_bfs(&p, &w, &caps);
            Ok(Report { status: status_of(&r), text: result_text(&r), json: json!({ "area": r, "caps": caps }) })
        }
        Command::AreaStar { word: a, n_max } => {
            let p = load_presentation(&a.group, None)?;
            let w = p.word(&a.word)?;
            let caps = area_caps(a, threads);
            let r = area_star_bounded(&p, &w, *n_max, &caps);
            let mut text: Vec<String> = r.powers.iter().map(|(n, res)| format!("area(w^{n}) {}", result_text(res))).collect();
            text.push(format!("area*(w) over |n| <= {n_max}: at least {}, at most {:?}", r.exhausted_lower, r.upper));
            let exhausted = r.powers.iter().all(|(_, res)| res.exact().is_some());
            Ok(Report {
                status: if exhausted { Status::Ok } else { Status::Unknown },
                text: text.join("\n"),
                json: json!({ "report": r, "caps": caps }),
            })
        }
        Command::Prove { word: a, out } => {
            let p = load_presentation(&a.group, None)?;
            let w = p.word(&a.word)?;
            let caps = area_caps(a, threads);
            let found = prove(&p, &w, &caps);
            let cert = found.certificate.as_ref().map(|c| c.to_json_value(p.alphabet()));
            if let (Some(path), Some(c)) = (out, &cert) {
                write_file(path, c)?;
            }
            let text = match &cert {
                Some(c) => serde_json::to_string_pretty(c).expect("plain data"),
                None => result_text(&found.result),
            };
            Ok(Report {
                status: status_of(&found.result),
                text,
                json: json!({ "area": found.result, "certificate": cert, "stats": found.stats }),
            })
        }
        Command::Trivialize { seed, n, k, search, out } => {
            let (name, num) = split_name(seed);
            if name != "s" && name != "S" {
                return Err(Failure::Usage(format!("trivialize supports the seeds s<k>, not `{seed}`")));
            }
            let k = num.map(|v| v as u32).or(*k).unwrap_or(2);
            let cert = if *search {
                let s = fixtures::seed_s(k)?;
                let found = prove(&s, &gen_w(*n)?, &AreaCaps { threads, ..AreaCaps::default() });
                match found.certificate {
                    Some(c) => c,
                    None => {
                        return Ok(Report {
                            status: Status::Unknown,
                            text: format!("no certificate for w_{n}: {}", result_text(&found.result)),
                            json: json!({ "area": found.result }),
                        })
                    }
                }
            } else {
                wn_certificate(*n, k, MAX_CERTIFICATE_STEPS)?
            };
            let plan = seed_family_plan(*n, k, cert)?;
            let t = trivialize_pw(&plan)?;
            let trace = t.trace.to_json_value();
            if let Some(path) = out {
                write_file(path, &trace)?;
            }
            let a = &t.audit;
            let text = format!(
                "moves {}\nbudget {}\ncertificate steps {}\ndeleted letters {}\nwithin budget {}",
                a.dihedral_count, a.budget, a.certificate_steps, a.deleted_letters, a.within_budget
            );
            let mut json = json!({ "audit": a });
            if out.is_none() {
                json["trace"] = trace;
            }
            Ok(Report::ok(text, json))
        }
        Command::VerifyTrace { trace, ordered } => {
            let t = load_trace(trace)?;
            let v = verify_trivialization(&t, *ordered)?;
            let text = format!(
                "{}\nmoves {}\nlength weighted {}",
                if v.accepted { "accepted" } else { "rejected" },
                v.dihedral_count,
                v.length_weighted
            );
            Ok(Report {
                status: if v.accepted { Status::Ok } else { Status::No },
                text,
                json: json!({ "verification": v, "final": v.final_presentation.to_json_value() }),
            })
        }
        Command::FibBound { m } => {
            let f = fibonacci_bound(*m).to_string();
            Ok(Report::ok(f.clone(), json!({ "m": m, "bound": f })))
        }
        Command::AccBounds { n, k, trace } => {
            let t = trace.as_deref().map(load_trace).transpose()?;
            let b = acc_bounds(n, *k, t.as_ref())?;
            let upper = b.upper.map_or("none".to_string(), |u| u.to_string());
            Ok(Report::ok(format!("lower {}\nupper {upper}", b.lower), json!({ "bounds": b.to_json_value() })))
        }
        Command::Search { input, caps, out } => {
            let p = load_presentation(input, None)?;
            let caps = caps.caps(threads);
            let outcome = bfs_trivialize(&p, &caps);
            let stats = *outcome.stats();
            match &outcome {
                SearchOutcome::Found { trace, depth, .. } => {
                    let tj = trace.to_json_value();
                    if let Some(path) = out {
                        write_file(path, &tj)?;
                    }
                    Ok(Report::ok(
                        format!("found at depth {depth} ({} moves, {} states expanded)", trace.len(), stats.expanded),
                        json!({ "found": true, "depth": depth, "stats": stats, "caps": caps, "trace": tj }),
                    ))
                }
                SearchOutcome::Unknown { .. } => Ok(Report {
                    status: Status::Unknown,
                    text: format!(
                        "unknown after depth {} ({} states expanded, state cap hit: {})",
                        stats.depth_reached, stats.expanded, stats.state_cap_hit
                    ),
                    json: json!({ "found": false, "stats": stats, "caps": caps }),
                }),
            }
        }
        Command::Sublevel { k, m, caps } => {
            let r = explore_sublevel(*k, *m, &caps.caps(threads));
            let status = if r.truncated || r.capped { Status::Unknown } else { Status::Ok };
            Ok(Report { status, text: r.to_string(), json: r.to_json_value() })
        }
        Command::Fixtures { name, m, k } => match name {
            None => Ok(Report::ok(fixtures::NAMES.join("\n"), json!({ "fixtures": fixtures::NAMES }))),
            Some(name) => {
                let p = fixtures::by_name(name, *m, *k)?;
                Ok(Report::ok(p.to_string(), json!({ "presentation": p.to_json_value() })))
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                let mut doc = json!({ "format_version": FORMAT_VERSION, "status": r.status as u8 });
                if let (Value::Object(d), Value::Object(body)) = (&mut doc, &r.json) {
                    d.extend(body.clone());
                }
                println!("{}", serde_json::to_string_pretty(&doc).expect("plain data"));
            } else {
                println!("{}", r.text);
            }
            ExitCode::from(r.status as u8)
        }
        Err(f) => {
            if cli.json {
                println!("{}", json!({ "format_version": FORMAT_VERSION, "status": 3, "error": f.to_string() }));
            } else {
                eprintln!("error: {f}");
            }
            ExitCode::from(match f {
                Failure::Math(Error::TowerOverflow(_)) => 2,
                _ => 3,
            })
        }
    }
}
