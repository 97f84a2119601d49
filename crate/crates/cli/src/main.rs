use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use proxdyn::config::RunConfig;
use proxdyn::exact::rational::{parse_rational, pow2, rational_to_string};
use proxdyn::group::{
    density_in_ball, enumerate_ball, padic_in_ball, torsion_bound, Ball, BallCache, GroupPresentation, Word,
};
use proxdyn::php::verify::{Condition1, Condition2};
use proxdyn::php::{construct_witness, verify_witness, PhpInstance, PhpWitness, VerificationReport};
use proxdyn::position::{noetherian_bound, NoetherianParams};
use proxdyn::proximal::{
    attracting_repelling, cartan, find_loxodromic, is_loxodromic, jordan, theta_estimate, Place, ProximalData,
    ThetaEstimate, WeylVector,
};
use proxdyn::Error;

#[derive(Parser)]
#[command(name = "proxdyn", version, about = "Proximal dynamics and ping-pong witnesses for matrix groups over Q")]
struct Cli {
    /// Print machine-readable JSON instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for cached word balls.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cartan and Jordan projections, loxodromy and fixed flags.
    Analyze(AnalyzeArgs),
    #[command(subcommand)]
    Bounds(BoundsCommand),
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Necessary-condition evidence for Zariski density.
    Density {
        group: PathBuf,
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Largest p-adic absolute value of entries over a word ball.
    Padic {
        group: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        radius: usize,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    group: PathBuf,
    /// Word to analyze; every generator when omitted.
    #[arg(long)]
    element: Option<String>,
    /// Primes for p-adic Cartan projections.
    #[arg(long = "prime")]
    primes: Vec<u64>,
    /// Word radius for the Θ estimate.
    #[arg(long, default_value_t = 3)]
    theta_radius: usize,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Uniform bound on chains of intersections of hypersurfaces.
    Noetherian {
        #[arg(long)]
        dproj: u64,
        #[arg(long)]
        deg: u64,
    },
    /// Exponent killing every finite-order element of GL_d(Q).
    Torsion {
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Build and verify a witness for (F, eps). That the group has trivial amenable
    /// radical is a hypothesis supplied by the user; it is not checked.
    Build {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        eps: String,
        /// F is the set of nonidentity elements of the word ball of this radius.
        #[arg(long = "F-radius", default_value_t = 1)]
        f_radius: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify a stored witness.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(
            Error::NotLoxodromic
            | Error::MisalignedFixedPoints(_)
            | Error::ExceededNMax { .. }
            | Error::NoneFoundWithinRadius { .. }
            | Error::ExhaustedTries { .. }
            | Error::PrecisionFailure { .. }
            | Error::Unsupported(_),
        ) => 1,
        _ => 2,
    }
}

fn load_group(path: &Path) -> anyhow::Result<GroupPresentation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(GroupPresentation::parse_json(&text)?)
}

fn ball(cli: &Cli, group: &GroupPresentation, radius: usize) -> anyhow::Result<Ball> {
    match &cli.cache_dir {
        Some(dir) => Ok(BallCache::new(dir)?.ball(group, radius)?.0),
        None => Ok(enumerate_ball(group, radius)),
    }
}

fn emit<T: Serialize>(cli: &Cli, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<()> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Analyze(args) => analyze(cli, args),
        Command::Bounds(BoundsCommand::Noetherian { dproj, deg }) => {
            if *dproj == 0 {
                anyhow::bail!(Error::PreconditionUnmet("--dproj must be positive".into()));
            }
            let k = noetherian_bound(NoetherianParams { proj_dim: *dproj, max_deg: *deg });
            emit(cli, &serde_json::json!({ "dproj": dproj, "deg": deg, "K": k }), || format!("{k}\n"))?;
            Ok(Outcome::Pass)
        }
        Command::Bounds(BoundsCommand::Torsion { dim }) => {
            if *dim == 0 {
                anyhow::bail!(Error::PreconditionUnmet("--dim must be positive".into()));
            }
            let m = torsion_bound(*dim);
            emit(cli, &serde_json::json!({ "dim": dim, "m": m }), || format!("{m}\n"))?;
            Ok(Outcome::Pass)
        }
        Command::Witness(WitnessCommand::Build { group, eps, f_radius, seed, out }) => {
            let group = load_group(group)?;
            let epsilon = parse_rational(eps)?;
            if *f_radius == 0 {
                anyhow::bail!(Error::PreconditionUnmet("--F-radius must be at least 1".into()));
            }
            let f: Vec<Word> =
                ball(cli, &group, *f_radius)?.entries.iter().filter(|e| !e.word.is_empty()).map(|e| e.word.clone()).collect();
            let instance = PhpInstance::new(group, f, epsilon)?;
            let cfg = RunConfig::with_seed(*seed);
            let witness = construct_witness(&instance, &cfg)?;
            let tmp = out.with_extension("tmp");
            fs::write(&tmp, witness.to_json())?;
            fs::rename(&tmp, out)?;
            let report = verify_witness(&witness, &witness.f, &witness.epsilon, &cfg)?;
            report_outcome(cli, &report, Some(&witness))
        }
        Command::Witness(WitnessCommand::Verify { file, seed }) => {
            let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let witness = PhpWitness::parse_json(&text)?;
            let cfg = RunConfig::with_seed(*seed);
            let report = verify_witness(&witness, &witness.f, &witness.epsilon, &cfg)?;
            report_outcome(cli, &report, None)
        }
        Command::Density { group, radius } => {
            let group = load_group(group)?;
            let r = density_in_ball(&group, &ball(cli, &group, *radius)?);
            emit(cli, &r, || {
                format!(
                    "radius {}\nspan dimension {} of {}\nfull matrix algebra: {}\nloxodromic element found: {}\ninfinite-order element found: {}\n{}\n",
                    r.radius,
                    r.span_dim,
                    group.dim() * group.dim(),
                    r.burnside_full,
                    r.loxodromic_found,
                    r.infinite,
                    r.note
                )
            })?;
            Ok(Outcome::Pass)
        }
        Command::Padic { group, p, radius } => {
            if *p < 2 {
                anyhow::bail!(Error::PreconditionUnmet("--p must be a prime".into()));
            }
            let group = load_group(group)?;
            let r = padic_in_ball(&ball(cli, &group, *radius)?, *p);
            emit(cli, &r, || {
                format!(
                    "p = {}\nmax |entry|_p at radius {}: {}\nmax |entry|_p at radius {}: {}\ntrend: {}\n",
                    r.prime,
                    r.half_radius,
                    rational_to_string(&r.max_abs_half),
                    r.radius,
                    rational_to_string(&r.max_abs),
                    r.trend
                )
            })?;
            Ok(Outcome::Pass)
        }
    }
}

fn report_outcome(cli: &Cli, report: &VerificationReport, built: Option<&PhpWitness>) -> anyhow::Result<Outcome> {
    emit(cli, report, || {
        let mut s = String::new();
        if let Some(w) = built {
            s.push_str(&format!(
                "witness: n = {}, K = {}, gamma0 = {}, powers {:?}\n",
                w.n, w.provenance.k, w.provenance.gamma0, w.provenance.powers
            ));
        }
        s.push_str(&format!("epsilon = {}, n = {}\n", rational_to_string(&report.epsilon), report.n));
        match &report.condition1 {
            Condition1::Pass { sets } => s.push_str(&format!("condition1: pass ({sets} sets pairwise disjoint)\n")),
            Condition1::Fail { first, second, point } => {
                s.push_str(&format!(
                    "condition1: FAIL, {} meets {}",
                    describe(&first.family, first.index, first.translate.as_ref()),
                    describe(&second.family, second.index, second.translate.as_ref())
                ));
                if let Some(p) = point {
                    s.push_str(&format!(" at {p}"));
                }
                s.push('\n');
            }
        }
        let (status, f) = match &report.condition2 {
            Condition2::Pass(f) => ("pass", f),
            Condition2::Fail(f) => ("FAIL", f),
        };
        s.push_str(&format!("condition2: {status}, max multiplicity m = {}, epsilon*sqrt(n) in {}\n", f.m, f.bound));
        s.push_str(&format!("certification: {}\n", serde_json::to_string(&report.certification).unwrap_or_default()));
        s
    })?;
    Ok(if report.passes() { Outcome::Pass } else { Outcome::Fail })
}

fn describe(family: &proxdyn::php::verify::Family, i: usize, a: Option<&Word>) -> String {
    use proxdyn::php::verify::Family;
    let a = a.map(|w| w.to_string()).unwrap_or_default();
    match family {
        Family::TranslatedC => format!("{a}.C_{i}"),
        Family::TranslatedComplementD => format!("{a}.gamma_{i}^-1(X - D_{i})"),
        Family::D => format!("D_{i}"),
        Family::PulledComplementC => format!("gamma_{i}^-1(X - C_{i})"),
    }
}

#[derive(Serialize)]
struct ElementReport {
    word: Word,
    matrix: proxdyn::exact::QMatrix,
    cartan: Vec<WeylVector>,
    jordan: WeylVector,
    loxodromic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    proximal: Option<ProximalData>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    dimension: usize,
    elements: Vec<ElementReport>,
    theta: ThetaEstimate,
    first_loxodromic: Option<Word>,
}

fn analyze(cli: &Cli, args: &AnalyzeArgs) -> anyhow::Result<Outcome> {
    let group = load_group(&args.group)?;
    let cfg = RunConfig::default();
    let words: Vec<Word> = match &args.element {
        Some(w) => vec![w.parse()?],
        None => group.generators().iter().map(|g| Word::from_letters([proxdyn::group::Letter::generator(g.label)])).collect(),
    };
    let eps = pow2(-30);
    let mut elements = Vec::new();
    for w in words {
        let g = group.eval(&w)?;
        let mut cartans = vec![cartan(&g, Place::Real, &eps)?];
        for &p in &args.primes {
            cartans.push(cartan(&g, Place::Padic { p }, &eps)?);
        }
        let lox = is_loxodromic(&g);
        let proximal = if lox { Some(attracting_repelling(&g)?) } else { None };
        elements.push(ElementReport { word: w, jordan: jordan(&g, &eps)?, matrix: g, cartan: cartans, loxodromic: lox, proximal });
    }
    let theta = theta_estimate(&group, args.theta_radius, &cfg)?;
    let first_loxodromic = match find_loxodromic(&group, cfg.loxodromic_radius) {
        Ok((w, _)) => Some(w),
        Err(Error::NoneFoundWithinRadius { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let report = AnalyzeReport { dimension: group.dim(), elements, theta, first_loxodromic };
    emit(cli, &report, || {
        let mut s = format!("dimension {}\n", report.dimension);
        for e in &report.elements {
            s.push_str(&format!("element {} = {}\n", e.word, e.matrix));
            for k in &e.cartan {
                let place = match k.place {
                    Place::Real => "real".to_string(),
                    Place::Padic { p } => format!("{p}-adic"),
                };
                s.push_str(&format!("  cartan ({place}): {}\n", join(&k.entries)));
            }
            s.push_str(&format!("  jordan: {}\n", join(&e.jordan.entries)));
            s.push_str(&format!("  loxodromic: {}\n", e.loxodromic));
            if let Some(p) = &e.proximal {
                s.push_str(&format!("  attracting flag basis: {}\n", p.attracting.basis()));
                s.push_str(&format!("  repelling flag basis: {}\n", p.repelling.basis()));
            }
        }
        s.push_str(&format!(
            "theta estimate at radius {}: suprema {}, flagged roots {:?}\n",
            report.theta.radius,
            join(&report.theta.suprema),
            report.theta.flagged
        ));
        match &report.first_loxodromic {
            Some(w) => s.push_str(&format!("shortest loxodromic word: {w}\n")),
            None => s.push_str(&format!("no loxodromic word up to length {}\n", cfg.loxodromic_radius)),
        }
        s
    })?;
    Ok(Outcome::Pass)
}

fn join(xs: &[proxdyn::exact::IntervalReal]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
