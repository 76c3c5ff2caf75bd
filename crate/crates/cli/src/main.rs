use clap::{Args, Parser, Subcommand};
use crdual::census::{census, wall_crossing_probe, CensusReport, Resolution};
use crdual::contact::{lift, verify_projection_lemmas};
use crdual::duality::{bidual_roundtrip, dual_variety, exceptional_hypersurface_test};
use crdual::export;
use crdual::planes::Slope;
use crdual::surfaces::{classify_exceptional_surface, exceptional_tests, tangent_plane, SurfacePatch};
use crdual::{Error, Result, Tolerances};
use num_complex::Complex64;
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Critical circles, lifts, duals and intersection censuses of real
/// surfaces in the complex projective plane.
#[derive(Parser, Debug)]
#[command(name = "crdual", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tolerance override `name=value` (transv, angle, crit, exc,
    /// legendrian, bidual, wall); repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    /// Catalog surface, or `graph:<file>` for a definition file.
    #[arg(long, conflicts_with = "surface")]
    catalog: Option<String>,
    /// Surface definition file.
    #[arg(long)]
    surface: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Directory receiving the CSV, PLY and JSON files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Wirtinger angle of the tangent plane.
    Angle {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_name = "S,T")]
        at: String,
    },
    /// Critical circle of the tangent plane.
    Circle {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_name = "S,T")]
        at: String,
    },
    /// Semi-legendrian lift.
    Lift {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 32)]
        fiber: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dual cloud.
    Dual {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 32)]
        fiber: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Surface rebuilt from its dual near a critical pair.
    Bidual {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_name = "S,T")]
        at: String,
        /// Slope `λ` (`0.5`, `1-2i`, `inf`).
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exceptionality: of a critical pair with `--at` and `--slope`, of a
    /// whole surface otherwise, of a hypersurface for 3-parameter patches.
    Exceptional {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_name = "S,T")]
        at: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<String>,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Intersection counts over quasi-random lines.
    Census {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        lines: usize,
        #[arg(long, default_value_t = Resolution::default().depth)]
        depth: u32,
        #[arg(long, default_value_t = Resolution::default().budget)]
        budget: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Counts on both sides of the dual hypersurface at a critical pair.
    Wall {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_name = "S,T")]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
        #[arg(long, default_value_t = 0.02)]
        h: f64,
    },
}

fn load(a: &SurfaceArgs) -> Result<SurfacePatch> {
    match (&a.catalog, &a.surface) {
        (Some(c), None) => SurfacePatch::resolve(c),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            SurfacePatch::parse(&p.display().to_string(), &text)
        }
        _ => Err(Error::InvalidInput("give exactly one of --catalog and --surface".into())),
    }
}

fn parse_point(s: &str) -> Result<[f64; 2]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidInput(format!("--at {s}: {e}")))?;
    match v[..] {
        [a, b] => Ok([a, b]),
        _ => Err(Error::InvalidInput(format!("--at expects two numbers, got `{s}`"))),
    }
}

fn parse_slope(s: &str) -> Result<Slope> {
    let t = s.trim();
    if matches!(t, "inf" | "infinity" | "∞") {
        return Ok(Slope::infinity());
    }
    t.parse::<Complex64>()
        .map(Slope::chart)
        .map_err(|_| Error::InvalidInput(format!("slope `{s}` is not a complex number or `inf`")))
}

fn tolerances(overrides: &[String]) -> Result<Tolerances> {
    let mut t = Tolerances::default();
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| Error::InvalidInput(format!("--tol {o}: expected NAME=VALUE")))?;
        let v: f64 = v.parse().map_err(|e| Error::InvalidInput(format!("--tol {o}: {e}")))?;
        let slot = match k {
            "transv" => &mut t.transv,
            "angle" => &mut t.angle,
            "crit" => &mut t.crit,
            "exc" => &mut t.exc,
            "legendrian" => &mut t.legendrian,
            "bidual" => &mut t.bidual,
            "wall" => &mut t.wall,
            _ => return Err(Error::InvalidInput(format!("unknown tolerance `{k}`"))),
        };
        *slot = v;
    }
    t.validate()?;
    Ok(t)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    File::create(&p).map(BufWriter::new).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn write_json(dir: &Path, name: &str, v: &serde_json::Value) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn fmt_slope(s: &Slope) -> String {
    match s.value() {
        Some(l) => format!("{l}"),
        None => "inf".into(),
    }
}

fn run(cli: Cli) -> Result<()> {
    let tol = tolerances(&cli.tol)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidInput("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    match cli.command {
        Command::Angle { surface, at } => {
            let s = load(&surface)?;
            let plane = tangent_plane(&s, parse_point(&at)?)?;
            println!("{}", plane.wirtinger_angle());
        }
        Command::Circle { surface, at } => {
            let s = load(&surface)?;
            let plane = tangent_plane(&s, parse_point(&at)?)?;
            let c = plane.critical_circle();
            println!("form: {} + 2 Re(conj({}) λ) + {} |λ|² = 0", c.a, c.b, c.d);
            println!("kind: {:?}", c.kind(tol.angle));
            if let Some((z, r)) = c.center_radius() {
                println!("center: {z}  radius: {r}");
            } else {
                println!("line through ∞");
            }
        }
        Command::Lift { surface, grid, fiber, out } => {
            let s = load(&surface)?;
            let m = lift(&s, grid, fiber, &tol)?;
            let proj = verify_projection_lemmas(&m, &tol);
            export::lift_csv(&m, create(&out.out, "lift.csv")?)?;
            export::lift_ply(&m, create(&out.out, "lift.ply")?)?;
            write_json(
                &out.out,
                "lift.json",
                &json!({
                    "schema": "crdual.lift.v1",
                    "surface": s.name(),
                    "tolerances": tol,
                    "lift": m,
                    "projection": match &proj { Ok(r) => json!(r), Err(e) => json!({ "error": e.to_string() }) },
                }),
            )?;
            println!("surface: {}  kind: {:?}  samples: {}", s.name(), m.kind, m.samples.len());
            println!("max semi-legendrian defect: {:.3e}", m.max_defect());
            match &proj {
                Ok(r) => println!("dp rank {}  projection residual {:.3e}  lemmas hold: {}", r.rank, r.max_residual, r.holds),
                Err(e) => println!("projection check: {e}"),
            }
            list_exclusions(&m.excluded);
        }
        Command::Dual { surface, grid, fiber, out } => {
            let s = load(&surface)?;
            let d = dual_variety(&s, grid, fiber, &tol)?;
            export::dual_csv(&d, create(&out.out, "dual.csv")?)?;
            export::dual_ply(&d, create(&out.out, "dual.ply")?)?;
            write_json(&out.out, "dual.json", &json!({ "schema": "crdual.dual.v1", "tolerances": tol, "dual": d }))?;
            let mut ranks = std::collections::BTreeMap::new();
            for x in &d.samples {
                *ranks.entry(x.pi_rank).or_insert(0usize) += 1;
            }
            let real = d.samples.iter().all(|x| x.point.xi.iter().all(|z| z.im.abs() < 1e-9));
            println!("surface: {}  samples: {}  max incidence {:.3e}", d.source, d.samples.len(), d.max_incidence());
            println!("pi ranks: {ranks:?}");
            println!("all lines real: {real}");
            list_exclusions(&d.excluded);
        }
        Command::Bidual { surface, at, slope, out } => {
            let s = load(&surface)?;
            let r = bidual_roundtrip(&s, parse_point(&at)?, &parse_slope(&slope)?, &tol)?;
            write_json(&out.out, "bidual.json", &json!({ "schema": "crdual.bidual.v1", "tolerances": tol, "report": r }))?;
            println!("route: {:?}  samples: {}", r.route, r.samples);
            println!("distance: {:.3e}  base error: {:.3e}  margin: {:.3e}", r.distance, r.base_error, r.margin);
            println!("passed: {}", r.passed);
        }
        Command::Exceptional { surface, at, slope, grid, out } => {
            let s = load(&surface)?;
            if s.dim() == 3 {
                let r = exceptional_hypersurface_test(&s, grid, &tol)?;
                write_json(&out.out, "exceptional.json", &json!({ "schema": "crdual.exceptional.v1", "hypersurface": r }))?;
                println!("exceptional hypersurface: {}  dual dimension: {}", r.exceptional, r.dual_dimension);
                if let Some(w) = &r.witness {
                    println!("witness at {:?}: drift {:.3e} (curve found: {})", w.param, w.drift, w.curve);
                }
            } else if let (Some(at), Some(slope)) = (at, slope) {
                let r = exceptional_tests(&s, parse_point(&at)?, &parse_slope(&slope)?, &tol)?;
                write_json(&out.out, "exceptional.json", &json!({ "schema": "crdual.exceptional.v1", "pair": r }))?;
                for (k, (c, m)) in r.conditions.iter().zip(r.margins).enumerate() {
                    println!("condition {}: {c}  margin {m:.3e}", k + 1);
                }
                println!("exceptional: {}  (conditions agree: {})", r.all_true(), r.agree());
            } else {
                let (c, ev) = classify_exceptional_surface(&s, grid, &tol)?;
                write_json(
                    &out.out,
                    "exceptional.json",
                    &json!({ "schema": "crdual.exceptional.v1", "classification": c.name(), "evidence": ev }),
                )?;
                println!("classification: {}", c.name());
                println!("samples: {}  complex: {}  skipped: {}", ev.samples, ev.complex_samples, ev.skipped);
                if let Some(w) = &ev.witness {
                    println!("witness: {:?} slope {}", w.param, fmt_slope(&w.slope));
                }
            }
        }
        Command::Census { surface, seed, lines, depth, budget, out } => {
            let s = load(&surface)?;
            let res = Resolution { depth, budget, ..Resolution::default() };
            let r = census(&s, seed, lines, &res, &tol)?;
            write_json(&out.out, "census.json", &serde_json::to_value(&r).map_err(|e| Error::Io(e.to_string()))?)?;
            export::regions_csv(&r, create(&out.out, "regions.csv")?)?;
            print_census(&r);
        }
        Command::Wall { surface, at, slope, h } => {
            let s = load(&surface)?;
            let r = wall_crossing_probe(&s, parse_point(&at)?, &parse_slope(&slope)?, h, &Resolution::default(), &tol)?;
            println!("n_minus: {}  n_plus: {}  jump by two: {}", r.n_minus, r.n_plus, r.jump_ok);
            println!("margin: {:.3e}  normal ({:?} chart): {:?}", r.margin, r.chart, r.normal);
        }
    }
    Ok(())
}

fn list_exclusions(ex: &[crdual::contact::Exclusion]) {
    if !ex.is_empty() {
        println!("excluded samples: {}", ex.len());
        for e in ex {
            println!("  {:?}: {}", e.param, e.reason);
        }
    }
}

fn print_census(r: &CensusReport) {
    let counts: Vec<String> = r.counts().iter().map(|c| c.to_string()).collect();
    println!("surface: {}  seed: {}  lines: {}", r.surface, r.seed, r.lines.len());
    println!("counts: {{{}}}", counts.join(","));
    println!("accepted: {}  wall samples: {}", r.accepted, r.wall_samples.len());
    for (c, n) in &r.histogram {
        println!("  count {c}: {n} lines ({:.1}%)", 100.0 * r.share(*c));
    }
    println!("case: {:?}  parity constant: {}  classification: {} (consistent: {})", r.case, r.parity_constant, r.classification, r.consistent);
    let mut regions: Vec<_> = r.regions.iter().collect();
    regions.sort_by(|a, b| b.size.cmp(&a.size).then(a.representative.cmp(&b.representative)));
    println!("regions: {}", regions.len());
    println!("  {:>6} {:>6} {:>8}", "count", "size", "rep");
    for g in regions.iter().take(10) {
        println!("  {:>6} {:>6} {:>8}", g.count, g.size, g.representative);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_geometric() { 2 } else { 1 })
        }
    }
}
