use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use singhunt_core::cover::{
    chi_cover, cover_canonical_square, euler_term, format_table, pg_cover, reduced_building_data, CoverSpec,
};
use singhunt_core::exactla::parse_rational;
use singhunt_core::fields::FieldCtx;
use singhunt_core::fixture::{godeaux_report, FIXTURE_NAME};
use singhunt_core::hunt::{
    classify, format_member, format_point, hunt_members, HuntConfig, Strategy, DEFAULT_BUDGET, DEFAULT_DEGREE_CAP,
    DEFAULT_SOLUTION_CAP,
};
use singhunt_core::interp::{
    filter_isolated, oversampled_system, vanishing_system, PointSet, DEFAULT_COLUMN_CAP,
};
use singhunt_core::lattice::{
    b2, search_relations, solve_curve_intersections, CurveConstraints, GramLattice, LatticeError,
    RelationTemplate, SearchBounds,
};
use singhunt_core::lift::{
    lift_extension_tuples, lift_rational, lift_unordered_pairs, parse_integer_residues, parse_pair_residues,
    parse_tuple_residues, LiftError, LiftedRational,
};
use singhunt_core::poly::{infer_family_shape, parse_poly_lines, ParametricFamily, VarNames};
use singhunt_core::report::{Report, Section};
use singhunt_core::ring::{Integers, Rationals, Ring};

/// Hunt singular members of hypersurface families over finite fields and
/// verify lattice and cover numerics.
#[derive(Parser, Debug)]
#[command(name = "singhunt", version)]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads; hunts default to all cores, other commands to 1.
    #[arg(long, global = true, env = "SINGHUNT_THREADS")]
    threads: Option<usize>,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Append wall-clock timings; reports are otherwise byte-reproducible.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search a parametric family for singular members.
    Hunt(HuntArgs),
    /// Find the polynomials of a given degree vanishing on a point set.
    Interpolate(InterpArgs),
    /// Reconstruct rationals from residues modulo several primes.
    Lift(LiftArgs),
    /// Label a singular point of a hypersurface.
    Classify(ClassifyArgs),
    /// Intersection lattice computations.
    Lattice(LatticeArgs),
    /// Abelian cover building data and invariants.
    Cover(CoverArgs),
    /// Run a built-in end-to-end verification.
    Fixture {
        #[arg(value_parser = [FIXTURE_NAME])]
        name: String,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StrategyArg {
    Random,
    Solve,
}

#[derive(Args, Debug)]
struct HuntArgs {
    /// File with one polynomial in x0.. and parameters p1..
    #[arg(long)]
    family: PathBuf,
    /// Field as `p` or `p,k`.
    #[arg(long)]
    field: String,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Label each singular point.
    #[arg(long)]
    classify: bool,
    /// Maximum number of projective points scanned per member.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Random)]
    strategy: StrategyArg,
    /// Truncation degree cap for Tjurina numbers.
    #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
    degree_cap: u32,
    /// Parameter points taken from each solved system.
    #[arg(long, default_value_t = DEFAULT_SOLUTION_CAP)]
    solution_cap: usize,
    /// Number of x variables; inferred when omitted.
    #[arg(long)]
    nvars: Option<usize>,
    /// Number of parameters; inferred when omitted.
    #[arg(long)]
    nparams: Option<usize>,
}

#[derive(Args, Debug)]
struct InterpArgs {
    /// One point per line, whitespace-separated field elements.
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    field: String,
    #[arg(long)]
    degree: u32,
    #[arg(long)]
    homogeneous: bool,
    /// Oversample: intersect systems from random subsets of `columns + slack` points.
    #[arg(long)]
    slack: Option<usize>,
    #[arg(long, default_value_t = 3)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_COLUMN_CAP)]
    column_cap: usize,
    /// Print polynomials in p1.. instead of x0..
    #[arg(long)]
    param_names: bool,
    /// Report points where the recovered system has a zero-dimensional tangent space.
    #[arg(long)]
    isolated: bool,
}

#[derive(Args, Debug)]
struct LiftArgs {
    /// Lines `p: payload`.
    #[arg(long)]
    residues: PathBuf,
    /// Payloads are unordered pairs `a,b`.
    #[arg(long, conflicts_with = "tuples")]
    pairs: bool,
    /// Payloads are basis tuples of this length.
    #[arg(long)]
    tuples: Option<usize>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// File with one homogeneous polynomial in x0..
    #[arg(long)]
    poly: PathBuf,
    /// Field as `p` or `p,k`; omit to work over the rationals.
    #[arg(long)]
    field: Option<String>,
    /// Projective point, whitespace-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
    degree_cap: u32,
    /// Number of coordinates; inferred from the highest `x` index otherwise.
    #[arg(long)]
    nvars: Option<usize>,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    /// Lattice file: `names:` line then the Gram matrix.
    #[arg(long)]
    gram: PathBuf,
    #[command(subcommand)]
    action: LatticeAction,
}

#[derive(Subcommand, Debug)]
enum LatticeAction {
    /// Rank, determinant and signature.
    Rank,
    /// Primitive basis of the numerically trivial combinations.
    Radical,
    /// Sample pairings of a new curve and report radical relations.
    Search {
        /// Lines `names: lo..hi`, with `*` and `self` accepted.
        #[arg(long)]
        bounds: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Solve a relation template for a new curve.
    Solve {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        constraints: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct CoverArgs {
    #[arg(long)]
    lattice: PathBuf,
    #[arg(long)]
    cover: PathBuf,
    #[arg(value_enum)]
    action: CoverAction,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum CoverAction {
    Verify,
    Invariants,
}

/// Input or data problem; maps to exit code 3.
struct DataError(String);

impl<E: std::fmt::Display> From<E> for DataError {
    fn from(e: E) -> Self {
        DataError(e.to_string())
    }
}

type Run = Result<Report, DataError>;

fn read(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn with_file<T, E: std::fmt::Display>(path: &Path, r: Result<T, E>) -> Result<T, DataError> {
    r.map_err(|e| DataError(format!("{}: {e}", path.display())))
}

fn inputs(pairs: &[(&str, String)]) -> Section {
    let mut s = Section::new("inputs");
    for (k, v) in pairs {
        s.line(format!("{k}: {v}"));
    }
    s
}

fn run_hunt(a: &HuntArgs) -> Run {
    let text = read(&a.family)?;
    let ctx = FieldCtx::from_spec(&a.field)?;
    let (nv, np) = infer_family_shape(&text);
    let (nvars, nparams) = (a.nvars.unwrap_or(nv), a.nparams.unwrap_or(np));
    let fam = with_file(&a.family, ParametricFamily::<Integers>::parse(&text, nvars, nparams))?.reduce(&ctx);
    let cfg = HuntConfig {
        strategy: match a.strategy {
            StrategyArg::Random => Strategy::RandomParams,
            StrategyArg::Solve => Strategy::SolveAtPoint,
        },
        trials: a.trials,
        seed: a.seed,
        classify: a.classify,
        degree_cap: a.degree_cap,
        budget: a.budget,
        solution_cap: a.solution_cap,
    };
    let members = hunt_members(&fam, &cfg)?;
    let mut report = Report::new("hunt");
    report.push(inputs(&[
        ("family", fam.poly().display(&fam.names()).to_string()),
        ("field", a.field.clone()),
        ("variables", format!("{nvars} x, {nparams} parameters")),
        ("strategy", format!("{:?}", a.strategy).to_lowercase()),
        ("trials", a.trials.to_string()),
        ("seed", a.seed.to_string()),
    ]));
    let mut s = Section::new("singular members");
    s.line(format!("{} members", members.len()));
    for m in &members {
        s.line(format_member(&ctx, m));
    }
    report.push(s);
    Ok(report)
}

fn run_interpolate(a: &InterpArgs) -> Run {
    let ctx = FieldCtx::from_spec(&a.field)?;
    let pts = with_file(&a.points, PointSet::parse(&ctx, &read(&a.points)?, true))?;
    let sys = match a.slack {
        Some(slack) => oversampled_system(&pts, a.degree, a.homogeneous, slack, a.draws, a.seed, a.column_cap)?,
        None => vanishing_system(&pts, a.degree, a.homogeneous, a.column_cap)?,
    };
    let names = if a.param_names { VarNames::params(pts.dim()) } else { VarNames::xs(pts.dim()) };
    let mut report = Report::new("interpolate");
    report.push(inputs(&[
        ("points", format!("{} distinct points in dimension {}", pts.len(), pts.dim())),
        ("field", a.field.clone()),
        ("degree", format!("{}{}", a.degree, if a.homogeneous { " (homogeneous)" } else { "" })),
        ("slack", a.slack.map_or("none".into(), |s| format!("{s}, {} draws, seed {}", a.draws, a.seed))),
    ]));
    let mut s = Section::new("vanishing polynomials");
    s.line(format!("{} columns, dimension {}", sys.monomials.len(), sys.dim()));
    let polys = sys.polys();
    for f in &polys {
        s.line(f.display(&names).to_string());
    }
    report.push(s);
    if a.isolated {
        let kept = filter_isolated(&pts, &polys)?;
        let mut s = Section::new("isolated points");
        let keep: std::collections::BTreeSet<Vec<u64>> =
            kept.points().iter().map(|p| p.iter().map(|e| e.index()).collect()).collect();
        for p in pts.points() {
            if !keep.contains(&p.iter().map(|e| e.index()).collect::<Vec<_>>()) {
                let cs: Vec<String> = p.iter().map(|c| ctx.display(c).to_string()).collect();
                s.line(cs.join(" "));
            }
        }
        s.line(format!("{} of {} points isolated", pts.len() - kept.len(), pts.len()));
        report.push(s);
    }
    Ok(report)
}

fn describe_lift(r: &LiftedRational) -> String {
    match r.held_out {
        Some(p) => format!("{} (held-out prime {p} agrees)", r.value),
        None => format!("{} (no held-out prime)", r.value),
    }
}

fn run_lift(a: &LiftArgs) -> Run {
    let text = read(&a.residues)?;
    let mut report = Report::new("lift");
    let mut s = Section::new("reconstruction");
    let outcome: Result<(), LiftError> = if a.pairs {
        let rs = with_file(&a.residues, parse_pair_residues(&text))?;
        report.push(inputs(&[("primes", format!("{:?}", rs.primes())), ("payload", "unordered pairs".into())]));
        lift_unordered_pairs(&rs).map(|q| {
            s.line(format!("sum: {}", describe_lift(&q.sum)));
            s.line(format!("product: {}", describe_lift(&q.product)));
            s.line(format!("quadratic: {}", q.poly_text()));
            if let Some((r1, r2)) = &q.roots {
                s.line(format!("roots: {r1}, {r2}"));
            }
        })
    } else if let Some(k) = a.tuples {
        let rs = with_file(&a.residues, parse_tuple_residues(&text, k))?;
        report.push(inputs(&[("primes", format!("{:?}", rs.primes())), ("payload", format!("{k}-tuples"))]));
        lift_extension_tuples(&rs).map(|v| {
            for (i, r) in v.iter().enumerate() {
                s.line(format!("component {i}: {}", describe_lift(r)));
            }
        })
    } else {
        let rs = with_file(&a.residues, parse_integer_residues(&text))?;
        report.push(inputs(&[("primes", format!("{:?}", rs.primes())), ("payload", "integers".into())]));
        lift_rational(&rs).map(|r| s.line(format!("value: {}", describe_lift(&r))))
    };
    match outcome {
        Ok(()) => {
            s.check("held-out verification", true, "");
        }
        Err(e @ (LiftError::HeldOutMismatch { .. } | LiftError::NoReconstruction { .. } | LiftError::Component { .. })) => {
            s.check("held-out verification", false, e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    report.push(s);
    Ok(report)
}

fn parse_point<E>(text: &str, f: impl Fn(&str) -> Result<E, String>) -> Result<Vec<E>, DataError> {
    text.split_whitespace().map(|t| f(t).map_err(DataError)).collect()
}

fn run_classify(a: &ClassifyArgs) -> Run {
    let text = read(&a.poly)?;
    let nvars = a.nvars.unwrap_or(infer_family_shape(&text).0);
    let q = match with_file(&a.poly, parse_poly_lines(&text, &VarNames::xs(nvars)))?.as_slice() {
        [q] => q.clone(),
        other => return Err(DataError(format!("{}: expected one polynomial, found {}", a.poly.display(), other.len()))),
    };
    let names = VarNames::xs(nvars);
    let mut report = Report::new("classify");
    report.push(inputs(&[
        ("polynomial", q.display(&names).to_string()),
        ("field", a.field.clone().unwrap_or_else(|| "Q".into())),
        ("point", a.point.clone()),
    ]));
    let mut s = Section::new("singular point");
    match &a.field {
        Some(spec) => {
            let ctx = FieldCtx::from_spec(spec)?;
            let f = q.try_map_ring(&ctx, |c| ctx.from_ratio(c.numer(), c.denom()))?;
            let pt = parse_point(&a.point, |t| ctx.parse_elem(t).map_err(|e| e.to_string()))?;
            let sp = classify(&f, &pt, a.degree_cap)?;
            s.line(format!("point: {}", format_point(&ctx, &sp.coords)));
            s.line(format!("label: {}", sp.label));
            s.line(format!("corank: {}", sp.corank.map_or("?".into(), |c| c.to_string())));
            s.line(format!("tjurina: {}", sp.tjurina.map_or("?".into(), |t| t.to_string())));
        }
        None => {
            let pt = parse_point(&a.point, parse_rational)?;
            let sp = classify(&q, &pt, a.degree_cap)?;
            s.line(format!("point: {}", format_point(&Rationals, &sp.coords)));
            s.line(format!("label: {}", sp.label));
            s.line(format!("corank: {}", sp.corank.map_or("?".into(), |c| c.to_string())));
            s.line(format!("tjurina: {}", sp.tjurina.map_or("?".into(), |t| t.to_string())));
        }
    }
    report.push(s);
    Ok(report)
}

fn run_lattice(a: &LatticeArgs) -> Run {
    let lattice = with_file(&a.gram, GramLattice::parse(&read(&a.gram)?))?;
    let mut report = Report::new("lattice");
    report.push(inputs(&[("classes", lattice.names().join(" "))]));
    let mut s = Section::new("results");
    match &a.action {
        LatticeAction::Rank => {
            let i = lattice.inertia();
            s.line(format!("rank: {}", lattice.rank()));
            s.line(format!("determinant: {}", lattice.determinant()));
            s.line(format!("signature: ({}, {}), nullity {}", i.positive, i.negative, i.zero));
        }
        LatticeAction::Radical => {
            let rad = lattice.radical();
            s.line(format!("radical dimension: {}", rad.len()));
            for v in &rad {
                s.line(lattice.format_relation(v));
            }
        }
        LatticeAction::Search { bounds, seed, trials } => {
            let b = match bounds {
                Some(p) => with_file(p, SearchBounds::parse(&read(p)?, &lattice))?,
                None => SearchBounds::uniform(lattice.len(), singhunt_core::lattice::DEFAULT_SEARCH_RANGE),
            };
            let found = search_relations(&lattice, &b, *seed, *trials)?;
            let ext_names = lattice.extend_with_curve("X", &vec![0; lattice.len()], 0)?;
            s.line(format!("{} relations", found.len()));
            for r in &found {
                s.line(format!(
                    "pairings {:?}, X² = {} | {}",
                    r.pairings,
                    r.self_int,
                    ext_names.format_relation(&r.relation)
                ));
            }
        }
        LatticeAction::Solve { template, constraints } => {
            let t = with_file(template, RelationTemplate::parse(&read(template)?, &lattice))?;
            let c = match constraints {
                Some(p) => with_file(p, CurveConstraints::parse(&read(p)?, &lattice))?,
                None => CurveConstraints::parse("", &lattice)?,
            };
            match solve_curve_intersections(&lattice, &t, &c) {
                Ok(sol) => {
                    s.line(format!("{} solutions in {} symmetry orbits", sol.solutions.len(), sol.orbits.len()));
                    for (k, orbit) in sol.orbits.iter().enumerate() {
                        for &i in orbit {
                            let x = &sol.solutions[i];
                            let mult: Vec<String> = t
                                .unknown
                                .iter()
                                .zip(&x.multiplicities)
                                .map(|((j, _), m)| format!("{}={m}", lattice.names()[*j]))
                                .collect();
                            s.line(format!(
                                "orbit {k}: {} | pairings {:?}, {}² = {}",
                                mult.join(" "),
                                x.pairings,
                                t.curve,
                                x.self_int
                            ));
                        }
                    }
                    s.check("solution unique up to symmetry", sol.orbits.len() == 1, "");
                }
                Err(LatticeError::NoSolution) => {
                    s.check("solution exists", false, LatticeError::NoSolution.to_string());
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    report.push(s);
    Ok(report)
}

fn run_cover(a: &CoverArgs) -> Run {
    let lattice = with_file(&a.lattice, GramLattice::parse(&read(&a.lattice)?))?;
    let spec = with_file(&a.cover, CoverSpec::parse(&read(&a.cover)?, &lattice))?;
    let data = &spec.data;
    let g = &data.group;
    let mut report = Report::new("cover");
    report.push(inputs(&[
        ("group orders", format!("{:?}", g.orders())),
        ("base", format!("chi {} K2 {} q {} pg {}", spec.base.chi, spec.base.k2, spec.base.q, spec.base.pg)),
    ]));
    let mut s = Section::new("building data");
    for chi in data.l.keys() {
        let t = data.branch.coefficient_table(g, chi)?;
        s.line(format!("table {chi}: {}", format_table(&t)));
        let v = reduced_building_data(g, chi, &data.branch, &data.l[chi])?;
        s.check(
            format!("{}·L{chi} numerically equals its branch sum", g.character_order(chi)),
            lattice.in_radical(&v.coeffs)?,
            lattice.format_class(&v),
        );
    }
    let all = match data.derive_all_l() {
        Ok(all) => {
            s.check("all classes derived consistently", true, "");
            all
        }
        Err(e) => {
            s.check("all classes derived consistently", false, e.to_string());
            report.push(s);
            return Ok(report);
        }
    };
    for (chi, l) in &all {
        s.line(format!("L{chi} = {}", lattice.format_class(l)));
    }
    report.push(s);
    if let CoverAction::Invariants = a.action {
        let mut s = Section::new("invariants");
        for (chi, l) in &all {
            s.line(format!("½L{chi}(K+L{chi}) = {}", euler_term(&lattice, l)?));
        }
        let chi = chi_cover(&spec.base, g, &lattice, &all)?;
        s.line(format!("chi: {chi}"));
        let k2 = cover_canonical_square(g.order(), spec.base_k2);
        s.line(format!("K2: {k2} (canonical class pulled back)"));
        match spec.h0_values() {
            Some(h0) => {
                let pg = pg_cover(spec.base.pg, &h0)?;
                let chi: i64 = i64::try_from(&chi)?;
                let q = 1 + pg - chi;
                s.line(format!("pg: {pg}"));
                s.line(format!("q: {q}"));
                let inv = singhunt_core::lattice::SurfaceInvariants::new(k2, q, pg);
                s.line(format!("b2: {}", b2(&inv)));
                s.check("q is non-negative", q >= 0, q.to_string());
            }
            None => s.line("pg: unknown (h0 values not declared)"),
        }
        report.push(s);
    }
    Ok(report)
}

fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Hunt(a) => run_hunt(a),
        Command::Interpolate(a) => run_interpolate(a),
        Command::Lift(a) => run_lift(a),
        Command::Classify(a) => run_classify(a),
        Command::Lattice(a) => run_lattice(a),
        Command::Cover(a) => run_cover(a),
        Command::Fixture { .. } => Ok(godeaux_report()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_threads = match cli.command {
        Command::Hunt(_) => 0,
        _ => 1,
    };
    let threads = cli.threads.unwrap_or(default_threads);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(2);
    }
    let start = Instant::now();
    let mut report = match run(&cli) {
        Ok(r) => r,
        Err(DataError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    if cli.timings {
        let mut s = Section::new("timings");
        s.line(format!("wall: {:.3} s", start.elapsed().as_secs_f64()));
        report.push(s);
    }
    let mut text = if cli.json { report.to_json() } else { report.to_string() };
    text.push('\n');
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{text}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        if let Some(v) = report.verdicts().find(|v| !v.pass) {
            eprintln!("verification failed: {} {}", v.name, v.detail);
        }
        ExitCode::from(1)
    }
}
