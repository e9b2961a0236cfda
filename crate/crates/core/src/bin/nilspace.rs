//! Command-line front end: catalog generation, homogeneity checks,
//! quotients, cube/polynomial utilities, desk-scale Gowers analysis, and a
//! `verify` command running the full acceptance suite.
//!
//! Exit codes: 0 success, 1 domain failure (a check failed or an operation
//! rejected its input), 2 usage or parse errors.

use clap::{Args, Parser, Subcommand};
use nilspace_core::cube::{complete_corner, cube_count, is_cube};
use nilspace_core::filtration::{classify_cyclic, CyclicClassification};
use nilspace_core::gowers::{
    balance_distance, gowers_norm, gvn_average, inverse_search, ncpoly_check, rank1_decompose,
    rank1_reconstruct, simplex_points, FpFunction,
};
use nilspace_core::homogeneity::{
    check_fibration, enumerate_qpk, lift_morphism, quotient_by_subspace, FilteredHomomorphism,
};
use nilspace_core::poly::is_hom_zpn;
use nilspace_core::report::{Check, Report, ReportBuilder};
use nilspace_core::textform::{
    self, fp_function_from_binary, parse_element, parse_expr, parse_filtration, parse_qpk,
    parse_subspace, BoxJson, CubeJson, FpFunctionJson, NCPolyJson, PolyJson,
};
use nilspace_core::verify::{run as run_verify, Fault, Level};
use serde::Deserialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nilspace",
    about = "Exact filtered-group and cube calculus with a desk-scale analytic layer",
    version
)]
struct Cli {
    /// Seed for every randomized sweep.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the catalog of homogeneous products up to an order bound.
    Catalog(CatalogArgs),
    /// Homogeneity checks, quotients, catalog, and lifting.
    Homog {
        #[command(subcommand)]
        sub: HomogCommand,
    },
    /// Alias of `homog check`.
    CheckHomog { expr: String },
    /// Alias of `homog quotient`.
    Quotient(QuotientArgs),
    /// Cube membership, completion, and counting.
    Cube {
        #[command(subcommand)]
        sub: CubeCommand,
    },
    /// Polynomial map evaluation, differencing, and certification.
    Poly {
        #[command(subcommand)]
        sub: PolyCommand,
    },
    /// Gowers norms, correlation search, multilinear averages, balance,
    /// and rank-one decomposition.
    Gowers {
        #[command(subcommand)]
        sub: GowersCommand,
    },
    /// Alias of `gowers balance`.
    Balance(BalanceArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum HomogCommand {
    /// Decide p-homogeneity of a filtered group expression.
    Check { expr: String },
    /// Quotient a catalog product by a subspace of its top structure group.
    Quotient(QuotientArgs),
    /// Enumerate the catalog (same as the top-level command).
    Catalog(CatalogArgs),
    /// Lift a morphism through the canonical componentwise projection.
    Lift(LiftArgs),
    /// Classify a cyclic filtration by its drop set.
    Classify { expr: String },
}

#[derive(Args)]
struct CatalogArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    bound: u128,
}

#[derive(Args)]
struct QuotientArgs {
    /// The catalog product, e.g. "Z(4,2;3)xZ(4,4;3)".
    #[arg(long, short = 'x')]
    x: String,
    /// Basis of H: vectors separated by ';', entries by ','.
    #[arg(long, short = 'H')]
    h: String,
}

#[derive(Args)]
struct LiftArgs {
    /// Source filtered group (the cover), e.g. "Z(3,1;3)".
    #[arg(long)]
    source: String,
    /// Target filtered group, e.g. "D(1;Z[3])".
    #[arg(long)]
    target: String,
    /// Table of the target morphism on [0,p-1]^n in table order; entries
    /// are elements (residue lists) separated by ';'.
    #[arg(long)]
    values: String,
    /// Domain dimension n.
    #[arg(long, default_value_t = 1)]
    n: u32,
}

#[derive(Subcommand)]
enum CubeCommand {
    /// Test cube membership of a value table.
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        filtration: String,
    },
    /// Complete a corner (table missing the top vertex).
    Complete {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        filtration: String,
    },
    /// Count cubes of the given dimension.
    Count {
        #[arg(long)]
        filtration: String,
        #[arg(long)]
        n: u32,
    },
}

#[derive(Subcommand)]
enum PolyCommand {
    /// Evaluate a polynomial map at an integer point.
    Eval {
        #[arg(long)]
        file: PathBuf,
        /// Comma-separated integer coordinates.
        #[arg(long)]
        x: String,
    },
    /// Difference polynomial along an integer direction.
    Diff {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        h: String,
    },
    /// Check the morphism certificate (coefficient heights in the chain).
    Check {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum GowersCommand {
    /// Gowers U^k norm of a function table (JSON or NSF1 binary).
    Norm {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        k: u32,
        /// Also run the naive 2^k-fold audit evaluation.
        #[arg(long)]
        audit: bool,
    },
    /// Exhaustive correlation search over degree-<=k polynomial phases.
    Search {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u128,
    },
    /// Degree certificate of a non-classical polynomial table.
    Certify {
        #[arg(long)]
        file: PathBuf,
    },
    /// Multilinear average over the simplex S_{k+1,M}.
    Gvn {
        #[arg(long)]
        file: PathBuf,
    },
    /// Balance (total-variation) distance of a morphism table.
    Balance(BalanceArgs),
    /// Rank-one decomposition of a fiber-mean-zero table.
    Rank1 {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Args)]
struct BalanceArgs {
    /// Box JSON table of the morphism on [0,p-1]^D.
    #[arg(long)]
    phi: PathBuf,
    /// Target filtered group expression.
    #[arg(long)]
    target: String,
    #[arg(long)]
    n: u32,
}

#[derive(Args)]
struct VerifyArgs {
    /// quick (~1 min) or full budgets.
    #[arg(default_value = "quick")]
    level: String,
    /// Inject a known fault to exercise the failure path.
    #[arg(long)]
    inject_fault: Option<String>,
}

#[derive(Deserialize)]
struct GvnJson {
    p: u64,
    d: u32,
    m: u32,
    k: u32,
    functions: Vec<GvnEntry>,
}

#[derive(Deserialize)]
struct GvnEntry {
    z: Vec<u32>,
    values: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct Rank1Json {
    m: usize,
    s: usize,
    fibers: Vec<Vec<usize>>,
    values: Vec<[f64; 2]>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // parallelism hint; all operations produce deterministic output
    // regardless of its value
    let threads = std::env::var("NILSPACE_THREADS").ok();
    match dispatch(&cli, threads.as_deref()) {
        Ok(report) => {
            let ok = report.all_passed();
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                render_text(&report);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn render_text(report: &Report) {
    if report.results != serde_json::Value::Null {
        match &report.results {
            serde_json::Value::String(s) => println!("{s}"),
            other => println!("{}", serde_json::to_string_pretty(other).expect("serializable")),
        }
    }
    for check in &report.checks {
        println!(
            "[{}] {}{}",
            check.status,
            check.name,
            check
                .detail
                .as_deref()
                .map(|d| format!(": {d}"))
                .unwrap_or_default()
        );
    }
}

fn read_file(path: &PathBuf) -> nilspace_core::Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| nilspace_core::Error::Parse {
        offset: 0,
        msg: format!("{}: {e}", path.display()),
    })
}

fn parse_json<'a, T: Deserialize<'a>>(bytes: &'a [u8]) -> nilspace_core::Result<T> {
    serde_json::from_slice(bytes).map_err(|e| nilspace_core::Error::Parse {
        offset: e.column(),
        msg: e.to_string(),
    })
}

fn dispatch(cli: &Cli, threads: Option<&str>) -> nilspace_core::Result<Report> {
    match &cli.command {
        Command::Catalog(args)
        | Command::Homog {
            sub: HomogCommand::Catalog(args),
        } => cmd_catalog(args),
        Command::CheckHomog { expr }
        | Command::Homog {
            sub: HomogCommand::Check { expr },
        } => cmd_check(expr),
        Command::Quotient(args)
        | Command::Homog {
            sub: HomogCommand::Quotient(args),
        } => cmd_quotient(args),
        Command::Homog {
            sub: HomogCommand::Lift(args),
        } => cmd_lift(args),
        Command::Homog {
            sub: HomogCommand::Classify { expr },
        } => cmd_classify(expr),
        Command::Cube { sub } => cmd_cube(sub),
        Command::Poly { sub } => cmd_poly(sub),
        Command::Gowers { sub } => cmd_gowers(sub),
        Command::Balance(args) => cmd_balance(args),
        Command::Verify(args) => cmd_verify(args, cli.seed, threads),
    }
}

fn cmd_catalog(args: &CatalogArgs) -> nilspace_core::Result<Report> {
    let prime = args.p >= 2 && (2..args.p).all(|d| d * d > args.p || args.p % d != 0);
    if !prime {
        return Err(nilspace_core::Error::Parse {
            offset: 0,
            msg: format!("--p must be prime, got {}", args.p),
        });
    }
    let mut rb = ReportBuilder::new(format!(
        "catalog --p {} --k {} --bound {}",
        args.p, args.k, args.bound
    ));
    rb.digest_input(format!("{}/{}/{}", args.p, args.k, args.bound).as_bytes());
    let members = enumerate_qpk(args.p, args.k, args.bound)?;
    let items: Vec<serde_json::Value> = members
        .iter()
        .map(|m| {
            json!({
                "multiplicities": m.multiplicities(),
                "order": m.order().to_string(),
                "group": textform::format_group(m.realize().expect("realizable").group()),
            })
        })
        .collect();
    rb.set_results(json!({"count": members.len(), "members": items}));
    rb.push_check(Check::pass("catalog enumerated"));
    Ok(rb.finish())
}

fn cmd_check(expr: &str) -> nilspace_core::Result<Report> {
    let mut rb = ReportBuilder::new(format!("homog check {expr}"));
    rb.digest_input(expr.as_bytes());
    let f = parse_expr(expr).or_else(|_| parse_filtration(expr))?;
    let homog = f.is_p_homogeneous();
    rb.set_results(json!({
        "filtration": textform::format_filtration(&f),
        "p_homogeneous": homog,
        "violation_level": f.first_homogeneity_violation(),
    }));
    rb.push_check(if homog {
        Check::pass("p-homogeneous")
    } else {
        Check::fail(
            "p-homogeneous",
            format!(
                "violated at level {}",
                f.first_homogeneity_violation().expect("violation exists")
            ),
        )
    });
    Ok(rb.finish())
}

fn cmd_classify(expr: &str) -> nilspace_core::Result<Report> {
    let mut rb = ReportBuilder::new(format!("homog classify {expr}"));
    rb.digest_input(expr.as_bytes());
    let f = parse_expr(expr).or_else(|_| parse_filtration(expr))?;
    let result = classify_cyclic(&f)?;
    match &result {
        CyclicClassification::PHomogeneous { delta } => {
            rb.set_results(json!({"delta": delta}));
            rb.push_check(Check::pass("classified"));
        }
        CyclicClassification::NotPHomogeneous { violating_level } => {
            rb.set_results(json!({"violating_level": violating_level}));
            rb.push_check(Check::fail(
                "classified",
                format!("not p-homogeneous at level {violating_level}"),
            ));
        }
    }
    Ok(rb.finish())
}

fn cmd_quotient(args: &QuotientArgs) -> nilspace_core::Result<Report> {
    let mut rb = ReportBuilder::new(format!("homog quotient --x {} --h {}", args.x, args.h));
    rb.digest_input(args.x.as_bytes());
    rb.digest_input(args.h.as_bytes());
    let member = parse_qpk(&args.x)?;
    let ambient: usize = member
        .contributing_slots()
        .iter()
        .map(|s| s.components.len())
        .sum();
    let h = parse_subspace(&args.h, member.p(), ambient)?;
    let outcome = quotient_by_subspace(&member, &h)?;
    rb.set_results(json!({
        "iso_type": outcome.iso_type.to_string(),
        "quotient": textform::format_filtration(&outcome.quotient),
        "certificate": outcome.certificate,
        "kill_counts": outcome.kill_counts,
    }));
    rb.push_check(Check::pass("quotient computed"));
    let fib = check_fibration(&outcome.projection, 2)?;
    rb.push_check(if fib {
        Check::pass("projection is a fibration")
    } else {
        Check::fail("projection is a fibration", "levelwise surjectivity failed")
    });
    Ok(rb.finish())
}

fn cmd_lift(args: &LiftArgs) -> nilspace_core::Result<Report> {
    let mut rb = ReportBuilder::new(format!(
        "homog lift --source {} --target {}",
        args.source, args.target
    ));
    rb.digest_input(args.values.as_bytes());
    let source = parse_expr(&args.source).or_else(|_| parse_filtration(&args.source))?;
    let target = parse_expr(&args.target).or_else(|_| parse_filtration(&args.target))?;
    if source.group().num_components() != target.group().num_components() {
        return Err(nilspace_core::Error::precondition(
            "canonical projection needs matching component counts",
        ));
    }
    // canonical componentwise projection (generator to generator)
    let images = (0..source.group().num_components())
        .map(|j| target.group().generator(j))
        .collect();
    let psi = FilteredHomomorphism::new(source.clone(), target.clone(), images)?;
    let p = target.p();
    let n = args.n as usize;
    let values: Vec<_> = args
        .values
        .split(';')
        .map(|part| parse_element(part.trim(), target.group()))
        .collect::<nilspace_core::Result<_>>()?;
    let f = nilspace_core::cube::BoxMap::new(
        target.group().clone(),
        vec![0; n],
        vec![p as u32 - 1; n],
        values,
    )?;
    let lift = lift_morphism(&psi, &f)?;
    rb.set_results(json!({
        "lift": BoxJson::of_box(&lift),
    }));
    rb.push_check(Check::pass("lift found"));
    Ok(rb.finish())
}

fn cmd_cube(sub: &CubeCommand) -> nilspace_core::Result<Report> {
    match sub {
        CubeCommand::Check { file, filtration } => {
            let mut rb = ReportBuilder::new(format!("cube check {}", file.display()));
            let bytes = read_file(file)?;
            rb.digest_input(&bytes);
            let cube: CubeJson = parse_json(&bytes)?;
            let q = cube.to_cube()?;
            let f = parse_expr(filtration).or_else(|_| parse_filtration(filtration))?;
            let member = is_cube(&q, &f)?;
            rb.set_results(json!({"is_cube": member}));
            rb.push_check(if member {
                Check::pass("cube membership")
            } else {
                Check::fail("cube membership", "some coefficient leaves its chain")
            });
            Ok(rb.finish())
        }
        CubeCommand::Complete { file, filtration } => {
            let mut rb = ReportBuilder::new(format!("cube complete {}", file.display()));
            let bytes = read_file(file)?;
            rb.digest_input(&bytes);
            let corner_json: CubeJson = parse_json(&bytes)?;
            let corner = corner_json.to_corner()?;
            let f = parse_expr(filtration).or_else(|_| parse_filtration(filtration))?;
            let completions = complete_corner(&corner, &f)?;
            rb.set_results(json!({
                "count": completions.len(),
                "completions": completions
                    .iter()
                    .map(textform::format_element)
                    .collect::<Vec<_>>(),
            }));
            rb.push_check(Check::pass("corner completed"));
            Ok(rb.finish())
        }
        CubeCommand::Count { filtration, n } => {
            let mut rb = ReportBuilder::new(format!("cube count --n {n}"));
            rb.digest_input(filtration.as_bytes());
            let f = parse_expr(filtration).or_else(|_| parse_filtration(filtration))?;
            rb.set_results(json!({"count": cube_count(&f, *n).to_string()}));
            rb.push_check(Check::pass("count"));
            Ok(rb.finish())
        }
    }
}

fn cmd_poly(sub: &PolyCommand) -> nilspace_core::Result<Report> {
    match sub {
        PolyCommand::Eval { file, x } => {
            let mut rb = ReportBuilder::new(format!("poly eval {}", file.display()));
            let bytes = read_file(file)?;
            rb.digest_input(&bytes);
            let pj: PolyJson = parse_json(&bytes)?;
            let pm = pj.to_poly()?;
            let point = parse_int_list(x)?;
            let value = pm.eval(&point)?;
            rb.set_results(json!({"value": textform::format_element(&value)}));
            rb.push_check(Check::pass("evaluated"));
            Ok(rb.finish())
        }
        PolyCommand::Diff { file, h } => {
            let mut rb = ReportBuilder::new(format!("poly diff {}", file.display()));
            let bytes = read_file(file)?;
            rb.digest_input(&bytes);
            let pj: PolyJson = parse_json(&bytes)?;
            let pm = pj.to_poly()?;
            let dir = parse_int_list(h)?;
            let diff = pm.derivative(&dir)?;
            rb.set_results(serde_json::to_value(PolyJson::of_poly(&diff, &pj.target)).expect("serializable"));
            rb.push_check(Check::pass("differenced"));
            Ok(rb.finish())
        }
        PolyCommand::Check { file } => {
            let mut rb = ReportBuilder::new(format!("poly check {}", file.display()));
            let bytes = read_file(file)?;
            rb.digest_input(&bytes);
            let pj: PolyJson = parse_json(&bytes)?;
            let pm = pj.to_poly()?;
            let ok = pm.is_morphism();
            rb.set_results(json!({"is_morphism": ok}));
            rb.push_check(if ok {
                Check::pass("morphism certificate")
            } else {
                Check::fail("morphism certificate", "a coefficient leaves its chain")
            });
            Ok(rb.finish())
        }
    }
}

fn parse_int_list(s: &str) -> nilspace_core::Result<Vec<i64>> {
    s.split(',')
        .map(|part| {
            part.trim().parse().map_err(|_| nilspace_core::Error::Parse {
                offset: 0,
                msg: format!("bad integer '{}'", part.trim()),
            })
        })
        .collect()
}

fn load_fp_function(path: &PathBuf) -> nilspace_core::Result<(Vec<u8>, FpFunction)> {
    let bytes = read_file(path)?;
    let f = if bytes.starts_with(textform::FP_BINARY_MAGIC) {
        fp_function_from_binary(&bytes)?
    } else {
        parse_json::<FpFunctionJson>(&bytes)?.to_function()?
    };
    Ok((bytes, f))
}

fn cmd_gowers(sub: &GowersCommand) -> nilspace_core::Result<Report> {
    match sub {
        GowersCommand::Norm { file, k, audit } => {
            let mut rb = ReportBuilder::new(format!("gowers norm --k {k}"));
            let (bytes, f) = load_fp_function(file)?;
            rb.digest_input(&bytes);
            let norm = gowers_norm(&f, *k)?;
            let mut results = json!({
                "norm": {"value": norm, "tol": 1e-9},
                "one_bounded": f.is_one_bounded(),
            });
            if *audit {
                let naive = nilspace_core::gowers::gowers_norm_naive(&f, *k, 1 << 26)?;
                results["audit_norm"] = json!({"value": naive, "tol": 1e-9});
                rb.push_check(if (naive - norm).abs() <= 1e-9 {
                    Check::pass("audit agreement").with_tolerance(1e-9)
                } else {
                    Check::fail("audit agreement", format!("{norm} vs {naive}"))
                        .with_tolerance(1e-9)
                });
            }
            rb.set_results(results);
            rb.push_check(Check::pass("norm computed").with_tolerance(1e-9));
            Ok(rb.finish())
        }
        GowersCommand::Search { file, k, budget } => {
            let mut rb = ReportBuilder::new(format!("gowers search --k {k}"));
            let (bytes, f) = load_fp_function(file)?;
            rb.digest_input(&bytes);
            let res = inverse_search(&f, *k, *budget)?;
            // single-step decomposition: f = lambda e(P) + residual
            let phase = res.best.phase();
            let lambda = {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for (a, b) in f.values().iter().zip(phase.values()) {
                    acc += a * b.conj();
                }
                acc / f.values().len() as f64
            };
            let residual = FpFunction::new(
                f.p(),
                f.n(),
                f.values()
                    .iter()
                    .zip(phase.values())
                    .map(|(a, b)| a - lambda * b)
                    .collect(),
            )?;
            let residual_norm = gowers_norm(&residual, *k + 1)?;
            rb.set_results(json!({
                "correlation": {"value": res.correlation_abs, "tol": 1e-9},
                "candidates": res.candidates,
                "exhausted": res.exhausted,
                "best": serde_json::to_value(NCPolyJson::of_poly(&res.best)).expect("serializable"),
                "residual_norm": {"value": residual_norm, "tol": 1e-9},
            }));
            rb.push_check(if res.exhausted {
                Check::pass("search exhaustive")
            } else {
                Check::fail("search exhaustive", "budget truncated the candidate family")
            });
            Ok(rb.finish())
        }
        GowersCommand::Certify { file } => {
            let mut rb = ReportBuilder::new("gowers certify");
            let bytes = read_file(file)?;
            rb.digest_input(&bytes);
            let pj: NCPolyJson = parse_json(&bytes)?;
            let mut poly = pj.to_poly()?;
            let ok = ncpoly_check(&mut poly)?;
            rb.set_results(json!({"certified": ok, "degree_bound": poly.degree_bound()}));
            rb.push_check(if ok {
                Check::pass("degree certificate")
            } else {
                Check::fail("degree certificate", "a (k+1)-fold difference is nonzero")
            });
            Ok(rb.finish())
        }
        GowersCommand::Gvn { file } => {
            let mut rb = ReportBuilder::new("gowers gvn");
            let bytes = read_file(file)?;
            rb.digest_input(&bytes);
            let gj: GvnJson = parse_json(&bytes)?;
            let fs: Vec<(Vec<u32>, FpFunction)> = gj
                .functions
                .iter()
                .map(|e| {
                    Ok((
                        e.z.clone(),
                        FpFunction::new(
                            gj.p,
                            gj.d,
                            e.values
                                .iter()
                                .map(|[re, im]| num_complex::Complex64::new(*re, *im))
                                .collect(),
                        )?,
                    ))
                })
                .collect::<nilspace_core::Result<_>>()?;
            let avg = gvn_average(gj.p, gj.d, gj.m, gj.k, &fs)?;
            rb.set_results(json!({
                "average": {"re": avg.re, "im": avg.im, "tol": 1e-9},
                "simplex": simplex_points(gj.p, gj.k + 1, gj.m),
            }));
            rb.push_check(Check::pass("average computed").with_tolerance(1e-9));
            Ok(rb.finish())
        }
        GowersCommand::Balance(args) => cmd_balance(args),
        GowersCommand::Rank1 { file } => {
            let mut rb = ReportBuilder::new("gowers rank1");
            let bytes = read_file(file)?;
            rb.digest_input(&bytes);
            let rj: Rank1Json = parse_json(&bytes)?;
            let h: Vec<num_complex::Complex64> = rj
                .values
                .iter()
                .map(|[re, im]| num_complex::Complex64::new(*re, *im))
                .collect();
            let terms = rank1_decompose(rj.m, rj.s, &rj.fibers, &h, 1e-9)?;
            let back = rank1_reconstruct(&terms, rj.m, rj.s);
            let max_err = back
                .iter()
                .zip(&h)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            rb.set_results(json!({
                "terms": terms.len(),
                "reconstruction_error": {"value": max_err, "tol": 1e-9},
            }));
            rb.push_check(if max_err <= 1e-9 {
                Check::pass("reconstruction").with_tolerance(1e-9)
            } else {
                Check::fail("reconstruction", format!("error {max_err}")).with_tolerance(1e-9)
            });
            Ok(rb.finish())
        }
    }
}

fn cmd_balance(args: &BalanceArgs) -> nilspace_core::Result<Report> {
    let mut rb = ReportBuilder::new(format!("balance --n {}", args.n));
    let bytes = read_file(&args.phi)?;
    rb.digest_input(&bytes);
    let bj: BoxJson = parse_json(&bytes)?;
    let phi = bj.to_box()?;
    let target = parse_expr(&args.target).or_else(|_| parse_filtration(&args.target))?;
    if !is_hom_zpn(&phi, &target)? {
        return Err(nilspace_core::Error::precondition(
            "phi is not a morphism into the target",
        ));
    }
    let d = balance_distance(&phi, &target, args.n)?;
    rb.set_results(json!({"distance": {"value": d, "tol": 1e-12}}));
    rb.push_check(Check::pass("balance computed").with_tolerance(1e-12));
    Ok(rb.finish())
}

fn cmd_verify(
    args: &VerifyArgs,
    seed: u64,
    threads: Option<&str>,
) -> nilspace_core::Result<Report> {
    let level = match args.level.as_str() {
        "quick" => Level::Quick,
        "full" => Level::Full,
        other => {
            return Err(nilspace_core::Error::Parse {
                offset: 0,
                msg: format!("unknown level '{other}', expected quick or full"),
            })
        }
    };
    let fault = match args.inject_fault.as_deref() {
        None => None,
        Some("mi-table") => Some(Fault::CorruptMiTable),
        Some(other) => {
            return Err(nilspace_core::Error::Parse {
                offset: 0,
                msg: format!("unknown fault '{other}'"),
            })
        }
    };
    let mut rb = ReportBuilder::new(format!("verify {}", args.level));
    rb.digest_input(format!("seed={seed}").as_bytes());
    let results = run_verify(level, seed, fault);
    for r in &results {
        println!("{}", r.line());
        rb.push_check(if r.passed {
            Check::pass(format!("criterion {}: {}", r.id, r.name))
        } else {
            Check::fail(format!("criterion {}: {}", r.id, r.name), r.detail.clone())
        });
    }
    rb.set_results(json!({
        "passed": results.iter().filter(|r| r.passed).count(),
        "failed": results.iter().filter(|r| !r.passed).count(),
        "threads_hint": threads,
    }));
    Ok(rb.finish())
}
