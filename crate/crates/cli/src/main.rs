//! Single binary dispatching every subcommand with deterministic seeding,
//! explicit budgets and stable JSON reports. Identical invocations produce
//! byte-identical output, independent of the thread count.

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fqsing::covers;
use fqsing::criteria;
use fqsing::error::Error;
use fqsing::ffield::Field;
use fqsing::localalg;
use fqsing::poly::VarTable;
use fqsing::powerseries::TruncatedSeries;
use fqsing::report::{self, Envelope};
use fqsing::strata::{self, Section};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_TRUNC: u32 = 8;
const DEFAULT_BUDGET: u64 = 10_000_000;
const BUDGET_ENV: &str = "FQSING_BUDGET";

#[derive(Parser)]
#[command(name = "fqsing", version, about = "Singularity strata, normal forms and irrationality criteria over finite fields")]
struct Cli {
    /// Worker threads for scans and sweeps (0 = all cores)
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output format
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "text"])]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Milnor number, degree bound and Milnor-algebra basis
    Milnor(SeriesArgs),
    /// Determinacy bound 2 r_min
    Determinacy(SeriesArgs),
    /// Right-complete unfolding on the Milnor basis
    Versal(SeriesArgs),
    /// Classify a quadratic form
    ClassifyQf {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: u32,
        /// the form, degree-2 part of this polynomial
        #[arg(long)]
        q: String,
        /// fail on base-field obstructions instead of extending
        #[arg(long)]
        no_extension: bool,
    },
    /// Split off the nondegenerate quadratic part (Morse with parameters)
    Split {
        #[arg(long)]
        field: String,
        /// number of active variables x1..xn
        #[arg(long)]
        n: u32,
        /// number of parameter variables s1..sK
        #[arg(long, default_value_t = 0)]
        params: u32,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = DEFAULT_TRUNC)]
        trunc: u32,
        #[arg(long)]
        no_extension: bool,
    },
    /// Exhaustive Thom-Boardman stratum scan over extensions
    StrataScan {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        e: u32,
        #[arg(long, default_value_t = 2)]
        deg: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        ext_max: u32,
        /// read the section from a file (one polynomial per line) instead of sampling
        #[arg(long)]
        section: Option<String>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Inseparable cover: equations, point counts, singular locus, verdict
    Cover {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: u32,
        /// section file, one polynomial per line
        #[arg(long)]
        section: String,
        /// cross-check: the exponent p must equal the field characteristic
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        ext_max: u32,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Emit Mori-degeneration equations
    Mori {
        #[arg(long = "N")]
        big_n: u32,
        /// comma-separated degrees of the f_i
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<u32>,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Closed-form codimension of a Thom-Boardman stratum
    Codim {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        char2: bool,
    },
    /// Dimensional clauses of the bundle-level theorem
    CheckBundle {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        p: u64,
        /// echo the caller-asserted bigness hypothesis
        #[arg(long)]
        assume_big: Option<bool>,
        /// echo the caller-asserted 2-jet generation hypothesis
        #[arg(long)]
        assume_jets: Option<bool>,
    },
    /// Irrationality criterion for a complete intersection
    CheckCi {
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<u32>,
        #[arg(long, required_unless_present = "auto")]
        p: Option<u64>,
        /// try every prime p <= max(d_i) and report the first witness
        #[arg(long)]
        auto: bool,
    },
    /// The intro-corollary check for one multidegree
    Corollary {
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<u32>,
    },
    /// Exhaustive corollary sweep up to N = max
    Sweep {
        #[arg(long)]
        max: u32,
    },
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long)]
    field: String,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    f: String,
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    trunc: u32,
    /// search cap for the least r with m^r inside jac(f); clamped to trunc - 1
    #[arg(long, default_value_t = 32)]
    cap: u32,
}

fn budget_or_default(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var(BUDGET_ENV).ok().and_then(|s| s.parse().ok()))
        .unwrap_or(DEFAULT_BUDGET)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::InvalidSubcommand | ErrorKind::UnknownArgument => 64,
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return ExitCode::from(code as u8);
        }
    };

    let threads = cli.threads;
    let run = || match run_command(&cli) {
        Ok(output) => {
            println!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            let rep = report::error_report(&err);
            println!("{}", serde_json::to_string_pretty(&rep).expect("error report"));
            let _ = std::io::stdout().flush();
            ExitCode::from(report::exit_code(&err) as u8)
        }
    };

    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(run)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        run()
    }
}

fn parse_series(args: &SeriesArgs) -> Result<(Field, TruncatedSeries), Error> {
    let field = Field::from_literal(&args.field)?;
    let vars = VarTable::xs(args.n);
    let f = TruncatedSeries::parse(&args.f, &vars, args.trunc, &field)?;
    Ok((field, f))
}

fn render(cli: &Cli, env: &Envelope<impl serde::Serialize>) -> String {
    let json = env.to_json();
    if cli.format == "json" {
        json
    } else {
        // the text format is a lossy rendering of the same object
        let value: serde_json::Value = serde_json::from_str(&json).expect("own json");
        let mut out = String::new();
        render_text(&value, 0, &mut out);
        out
    }
}

fn render_text(v: &serde_json::Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        serde_json::Value::Object(map) => {
            for (k, val) in map {
                match val {
                    serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {val}\n")),
                }
            }
        }
        serde_json::Value::Array(items) => {
            for item in items {
                match item {
                    serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {item}\n")),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{v}\n")),
    }
}

fn run_command(cli: &Cli) -> Result<String, Error> {
    match &cli.command {
        Command::Milnor(args) => {
            let (field, f) = parse_series(args)?;
            let res = localalg::milnor_number(&f, args.cap)?;
            let json = report::milnor_json(
                field.literal(),
                args.n,
                args.trunc,
                args.cap,
                args.f.clone(),
                &res,
            );
            Ok(render(cli, &Envelope::new("milnor", json)))
        }
        Command::Determinacy(args) => {
            let (field, f) = parse_series(args)?;
            let res = localalg::milnor_number(&f, args.cap)?;
            let json = report::DeterminacyJson {
                field: field.literal(),
                n: args.n,
                trunc: args.trunc,
                cap: args.cap,
                f: args.f.clone(),
                r_min: res.r_min,
                bound: res.r_min.map(|r| 2 * r),
            };
            Ok(render(cli, &Envelope::new("determinacy", json)))
        }
        Command::Versal(args) => {
            let (field, f) = parse_series(args)?;
            let v = localalg::versal_unfolding(&f, args.cap)?;
            let json = report::versal_json(field.literal(), args.n, args.trunc, args.f.clone(), &v);
            Ok(render(cli, &Envelope::new("versal", json)))
        }
        Command::ClassifyQf { field, n, q, no_extension } => {
            let fld = Field::from_literal(field)?;
            let vars = VarTable::xs(*n);
            let poly = fqsing::poly::parse_poly(q, &vars, &fld)?;
            let form = localalg::QuadraticForm::from_poly(&poly);
            let nf = form.classify(!no_extension)?;
            let json = report::classify_qf_json(fld.literal(), *n, q.clone(), form.polar_rank(), &nf, true);
            Ok(render(cli, &Envelope::new("classify-qf", json)))
        }
        Command::Split { field, n, params, f, trunc, no_extension } => {
            let fld = Field::from_literal(field)?;
            let vars = VarTable::params_xs(*params, *n);
            let series = TruncatedSeries::parse(f, &vars, *trunc, &fld)?;
            let res = localalg::split(&series, *params, !no_extension)?;
            let json = report::split_json(fld.literal(), *params, *n, *trunc, f.clone(), &res, true);
            Ok(render(cli, &Envelope::new("split", json)))
        }
        Command::StrataScan { field, n, e, deg, seed, ext_max, section, budget } => {
            let fld = Field::from_literal(field)?;
            let budget = budget_or_default(*budget);
            let (sec, seed_used) = match section {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|io| Error::BadInput(format!("cannot read {path}: {io}")))?;
                    (Section::parse(&fld, *n, &text, None)?, None)
                }
                None => (Section::sample(&fld, *n, *e, *deg, *seed, true)?, Some(*seed)),
            };
            if sec.ncomponents() != *e {
                return Err(Error::BadInput(format!(
                    "section has {} components, expected e = {e}",
                    sec.ncomponents()
                )));
            }
            let rep = strata::strata_scan_seeded(&sec, *ext_max, budget, seed_used)?;
            Ok(render(cli, &Envelope::new("strata-scan", rep)))
        }
        Command::Cover { field, n, section, p, ext_max, budget } => {
            let fld = Field::from_literal(field)?;
            let budget = budget_or_default(*budget);
            let text = std::fs::read_to_string(section)
                .map_err(|io| Error::BadInput(format!("cannot read {section}: {io}")))?;
            let sec = Section::parse(&fld, *n, &text, None)?;
            let chart = covers::build_cover(&sec, *p)?;
            let mut point_counts = Vec::new();
            let mut singular = Vec::new();
            for m in 1..=*ext_max {
                let count = covers::cover_point_count(&chart, m, budget)?;
                let expected = (fld.order() as u128).pow(m * sec.nvars()) as u64;
                point_counts.push(report::CoverCountJson {
                    m,
                    count,
                    expected,
                    matches: count == expected,
                });
                let sing = covers::cover_singular_points(&chart, m, budget)?;
                let lifted = covers::lifted_critical_points(&chart, m, budget)?;
                let matches = sing == lifted;
                singular.push(report::CoverSingularJson {
                    m,
                    points: sing
                        .iter()
                        .map(|pt| pt.iter().map(|c| c.to_string()).collect())
                        .collect(),
                    matches_lifted_sigma1: matches,
                });
            }
            let scan = strata::strata_scan(&sec, *ext_max, budget)?;
            let verdict = covers::cover_classify(&sec, &scan);
            let json = report::CoverJson {
                field: fld.literal(),
                n: sec.nvars(),
                e: sec.ncomponents(),
                p: fld.characteristic(),
                ext_max: *ext_max,
                budget,
                section: sec.render(),
                equations: chart.render(),
                point_counts,
                singular_points: singular,
                verdict,
            };
            Ok(render(cli, &Envelope::new("cover", json)))
        }
        Command::Mori { big_n, degrees, p, seed } => {
            let sys = covers::mori_equations(*big_n, degrees, *p, *seed)?;
            Ok(render(cli, &Envelope::new("mori", sys)))
        }
        Command::Codim { n, e, i, j, char2 } => {
            let codim = criteria::codim_tb(&criteria::CodimQuery {
                n: *n,
                e: *e,
                i: *i,
                j: *j,
                char2: *char2,
            })?;
            let json = report::CodimJson { n: *n, e: *e, i: *i, j: *j, char2: *char2, codim };
            Ok(render(cli, &Envelope::new("codim", json)))
        }
        Command::CheckBundle { n, e, p, assume_big, assume_jets } => {
            let rep = criteria::check_bundle(*n, *e, *p, *assume_big, *assume_jets);
            Ok(render(cli, &Envelope::new("check-bundle", rep)))
        }
        Command::CheckCi { big_n, degrees, p, auto } => {
            if degrees.is_empty() {
                return Err(Error::BadInput("at least one degree required".into()));
            }
            let json = if *auto {
                let (witness, tried) = criteria::check_ci_auto(*big_n, degrees);
                report::CheckCiJson {
                    report: witness.clone().unwrap_or_else(|| {
                        tried.last().cloned().unwrap_or_else(|| criteria::check_ci(*big_n, degrees, 2))
                    }),
                    auto: Some(report::AutoJson { witness_p: witness.map(|w| w.p), tried }),
                }
            } else {
                report::CheckCiJson {
                    report: criteria::check_ci(*big_n, degrees, p.expect("clap guarantees p")),
                    auto: None,
                }
            };
            Ok(render(cli, &Envelope::new("check-ci", json)))
        }
        Command::Corollary { big_n, degrees } => {
            let rep = criteria::corollary_check(*big_n, degrees);
            Ok(render(cli, &Envelope::new("corollary", rep)))
        }
        Command::Sweep { max } => {
            if *max > 60 {
                return Err(Error::BadInput("sweep budget: max must be <= 60".into()));
            }
            let rep = criteria::corollary_sweep(*max, &criteria::ExceptionSets::standard());
            Ok(render(cli, &Envelope::new("sweep", rep)))
        }
    }
}
