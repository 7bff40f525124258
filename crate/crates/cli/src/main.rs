use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use enharmonic::enharmonic::{conductances_of, solve_all_parallel, solve_enharmonic, EnharmonicSolution};
use enharmonic::gallery::{self, Fixture};
use enharmonic::grid::{self, BoundarySpec, EnergyMode, FourArcDomain, Region};
use enharmonic::harmonic::solve_dirichlet;
use enharmonic::io::{self, keyed, num, parse_network, NetworkFile};
use enharmonic::jacobian::jlog_report;
use enharmonic::numtheory::{
    format_rational, params_for_scale, parse_rational, quadratic_discriminant, quadratic_field_params, star_energies,
    Rational, RationalPolynomial,
};
use enharmonic::planar::{
    build_dual_with_terminals, conjugate_with, render_svg, retile_with_areas, smith_diagram, smith_diagram_from,
    CrossPolicy, PlanarEmbedding, RectTiling, SmithDiagram, SvgOptions,
};
use enharmonic::{
    enumerate_compatible_orientations_capped, validate_network, ConstraintSet, Conductances, Error, Network,
    Orientation, DEFAULT_ENUMERATION_CAP,
};

#[derive(Parser)]
#[command(name = "enharmonic", version, about = "Fixed-energy Dirichlet problems on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that every edge lies on a boundary-to-boundary path.
    Validate(NetArg),
    /// List or count the orientations compatible with the boundary values.
    Orientations {
        #[command(flatten)]
        net: NetArg,
        #[arg(long)]
        count: bool,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Solve for one orientation or for all of them.
    Solve {
        #[command(flatten)]
        net: NetArg,
        #[command(flatten)]
        which: Which,
        #[command(flatten)]
        out: OutArg,
    },
    /// Energies of the harmonic extension for given conductances.
    Psi {
        #[command(flatten)]
        net: NetArg,
        #[command(flatten)]
        c: CondArg,
        /// Also report the potential and currents.
        #[arg(long)]
        harmonic: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Conductances that make a potential harmonic with the network's energies.
    Conductances {
        #[command(flatten)]
        net: NetArg,
        /// JSON file with an `h` object keyed by vertex id (e.g. a solution).
        #[arg(long)]
        h: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Compare the predicted log-Jacobian with finite differences.
    JacobianCheck {
        #[command(flatten)]
        net: NetArg,
        #[command(flatten)]
        c: CondArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Smith diagram of a solution on an embedded network.
    Tiling {
        #[command(flatten)]
        net: NetArg,
        /// Orientation as a +/- string in edge order; defaults to the first
        /// compatible orientation.
        #[arg(long)]
        sigma: Option<String>,
        #[command(flatten)]
        out: OutArg,
        #[command(flatten)]
        svg: SvgArg,
    },
    /// Redraw a rectangle tiling with prescribed tile areas.
    Cartogram {
        /// Tiling JSON.
        tiling: PathBuf,
        /// Target areas in tile order, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        areas: Vec<String>,
        #[arg(long, value_enum, default_value_t = Policy::Reject)]
        policy: Policy,
        #[command(flatten)]
        out: OutArg,
        #[command(flatten)]
        svg: SvgArg,
    },
    /// Number-field constructions with exact rational output.
    Fields {
        #[command(subcommand)]
        kind: FieldsCommand,
    },
    /// Scaling experiments on lattice discretizations.
    Grid(GridArgs),
    /// Discrete map of a four-arc domain onto a rectangle.
    RiemannMap {
        #[command(flatten)]
        domain: DomainArgs,
        /// Mesh size (rationals allowed)
        #[arg(long, default_value = "1/20")]
        eps: String,
        /// Include the image of every lattice point.
        #[arg(long)]
        points: bool,
        #[command(flatten)]
        out: OutArg,
        #[command(flatten)]
        svg: SvgArg,
    },
    /// List the built-in fixtures or print one as network JSON.
    Gallery {
        name: Option<String>,
        /// Edge count for `path`, size for `jacobi` and `grid`.
        #[arg(long)]
        n: Option<usize>,
        /// Spoke energies for `jacobi`.
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum FieldsCommand {
    /// Star energies realizing the roots of a polynomial.
    Star {
        /// Coefficients from the leading term down, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        anchors: Vec<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Energies on the small graph whose values generate Q(sqrt D).
    Quadratic {
        #[arg(long)]
        d: u64,
        /// Explicit scale s with D s² in (1/3, 4/9).
        #[arg(long)]
        s: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Discriminant of the small graph's quadratic for energies a,b,c,d,e.
    Discriminant {
        #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
        energies: Vec<String>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct NetArg {
    /// Network JSON.
    network: PathBuf,
}

#[derive(Args)]
struct OutArg {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SvgArg {
    /// Also write an SVG drawing.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Scale the drawing to the unit square.
    #[arg(long)]
    unit_square: bool,
    /// Write tile ids into the drawing
    #[arg(long)]
    labels: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Which {
    #[arg(long)]
    all: bool,
    /// Orientation as a +/- string in edge order.
    #[arg(long)]
    sigma: Option<String>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CondArg {
    /// Conductances in edge order, comma separated.
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<String>>,
    /// JSON file with a `c` object keyed by edge id (e.g. a solution), or
    /// a bare object keyed by edge id.
    #[arg(long)]
    c_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Reject,
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainKind {
    Square,
    Diamond,
    File,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryKind {
    Corners,
    Full,
    FourArc,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyKind {
    Unit,
    Eps2,
}

#[derive(Args)]
struct DomainArgs {
    #[arg(long, value_enum, default_value_t = DomainKind::Square)]
    domain: DomainKind,
    /// Polygon JSON `{"points": [[x, y], ...], "marks": [a, b, c, d]}` for
    /// `--domain file`.
    #[arg(long)]
    domain_file: Option<PathBuf>,
    /// Diamond centre `x,y`.
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0.5,0.5")]
    center: Vec<f64>,
    /// Diamond half-diagonal.
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Subdivision counts; mesh size is 1/n.
    #[arg(long, value_delimiter = ',', conflicts_with = "eps_list")]
    n: Option<Vec<u32>>,
    /// Mesh sizes, comma separated (rationals allowed).
    #[arg(long, value_delimiter = ',')]
    eps_list: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = BoundaryKind::Corners)]
    boundary: BoundaryKind,
    #[arg(long, value_enum, default_value_t = EnergyKind::Unit)]
    energy: EnergyKind,
    /// Include the interpolated samples of every level.
    #[arg(long)]
    samples: bool,
    #[command(flatten)]
    out: OutArg,
    /// Smith diagram of the finest level.
    #[command(flatten)]
    svg: SvgArg,
}

enum Failure {
    Domain(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: Io: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn threads() -> usize {
    std::env::var("ENHARMONIC_THREADS").ok().and_then(|s| s.parse().ok()).filter(|&n| n > 0).unwrap_or(1)
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the destination directory.
fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io_err = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn emit(out: &OutArg, value: &Value) -> CliResult<()> {
    emit_text(out, &io::to_pretty(value))
}

fn emit_text(out: &OutArg, text: &str) -> CliResult<()> {
    match &out.out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_svg(svg: &SvgArg, diagram: &SmithDiagram) -> CliResult<()> {
    if let Some(path) = &svg.svg {
        write_atomic(path, &render_svg(diagram, SvgOptions { unit_square: svg.unit_square, labels: svg.labels }))?;
    }
    Ok(())
}

fn load(arg: &NetArg) -> CliResult<NetworkFile> {
    Ok(parse_network(&read(&arg.network)?)?)
}

fn parse_f64(s: &str) -> CliResult<f64> {
    parse_rational(s.trim()).map(|q| enharmonic::numtheory::to_f64(&q)).map_err(Failure::Domain)
}

fn parse_list(items: &[String]) -> CliResult<Vec<f64>> {
    items.iter().map(|s| parse_f64(s)).collect()
}

fn parse_rationals(items: &[String]) -> CliResult<Vec<Rational>> {
    Ok(items.iter().map(|s| parse_rational(s.trim())).collect::<enharmonic::Result<Vec<_>>>()?)
}

fn conductances(net: &Network, arg: &CondArg) -> CliResult<Conductances> {
    let values = match (&arg.c, &arg.c_file) {
        (Some(list), _) => {
            let v = parse_list(list)?;
            if v.len() != net.edge_count() {
                return Err(Failure::Usage(format!("--c needs {} values, got {}", net.edge_count(), v.len())));
            }
            v
        }
        (None, Some(path)) => {
            let doc: Value = serde_json::from_str(&read(path)?)
                .map_err(|e| Failure::Domain(Error::InvalidInput(format!("conductance JSON: {e}"))))?;
            io::parse_edge_values(net, doc.get("c").unwrap_or(&doc))?
        }
        (None, None) => unreachable!("clap requires one of --c and --c-file"),
    };
    Ok(Conductances::new(net, values)?)
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Validate(arg) => {
            let f = load(&arg)?;
            let report = validate_network(&f.net);
            let violations: Vec<Value> = report.violations.iter().map(|v| Value::String(v.to_string())).collect();
            println!("{}", io::to_pretty(&json!({ "valid": report.is_ok(), "violations": violations })).trim_end());
            if report.is_ok() {
                Ok(())
            } else {
                Err(Failure::Domain(Error::InvalidNetwork(report.violations[0].to_string())))
            }
        }
        Command::Orientations { net, count, cap, out } => {
            let f = load(&net)?;
            let all = enumerate_compatible_orientations_capped(&f.net, f.require_u()?, cap)?;
            if count {
                emit_text(&out, &format!("{}\n", all.len()))
            } else {
                let list: Vec<Value> = all.iter().map(|s| Value::String(s.to_sign_string())).collect();
                emit(&out, &json!({ "edges": edge_ids(&f.net), "orientations": list }))
            }
        }
        Command::Solve { net, which, out } => {
            let f = load(&net)?;
            let (u, e) = (f.require_u()?, f.require_energies()?);
            if let Some(s) = which.sigma {
                let sigma = orientation(&f.net, &s)?;
                let sol = solve_enharmonic(&f.net, &ConstraintSet::from_boundary(&f.net, u), e, &sigma)?;
                emit(&out, &io::solution_json(&f.net, &sol))
            } else {
                let sols = solve_all_parallel(&f.net, u, e, threads())?;
                let list: Vec<Value> = sols.iter().map(|s| io::solution_json(&f.net, s)).collect();
                emit(&out, &json!({ "count": list.len(), "solutions": list }))
            }
        }
        Command::Psi { net, c, harmonic, out } => {
            let f = load(&net)?;
            let c = conductances(&f.net, &c)?;
            let sol = solve_dirichlet(&f.net, f.require_u()?, &c)?;
            let energies: Vec<f64> = c.values().iter().zip(f.net.differential(&sol.h)).map(|(c, d)| c * d * d).collect();
            let mut m = Map::new();
            m.insert("energies".into(), keyed(&edge_ids(&f.net), &energies));
            if harmonic {
                m.insert("h".into(), keyed(f.net.vertex_ids(), &sol.h));
                m.insert("omega".into(), keyed(&edge_ids(&f.net), &sol.omega));
            }
            emit(&out, &Value::Object(m))
        }
        Command::Conductances { net, h, out } => {
            let f = load(&net)?;
            let doc: Value = serde_json::from_str(&read(&h)?)
                .map_err(|e| Failure::Domain(Error::InvalidInput(format!("potential JSON: {e}"))))?;
            let map = doc.get("h").and_then(Value::as_object).ok_or_else(|| {
                Failure::Domain(Error::InvalidInput("expected an \"h\" object keyed by vertex id".into()))
            })?;
            let values = f
                .net
                .vertex_ids()
                .iter()
                .map(|id| {
                    map.get(id)
                        .and_then(Value::as_f64)
                        .ok_or_else(|| Failure::Domain(Error::InvalidInput(format!("\"h\" is missing {id:?}"))))
                })
                .collect::<CliResult<Vec<f64>>>()?;
            let c = conductances_of(&f.net, f.require_energies()?, &values)?;
            emit(&out, &json!({ "c": keyed(&edge_ids(&f.net), c.values()) }))
        }
        Command::JacobianCheck { net, c, out } => {
            let f = load(&net)?;
            let c = conductances(&f.net, &c)?;
            let r = jlog_report(&f.net, f.require_u()?, &c)?;
            emit(
                &out,
                &json!({
                    "edges": edge_ids(&f.net),
                    "predicted": matrix_json(r.predicted.nrows(), |i, j| r.predicted[(i, j)]),
                    "finite_difference": matrix_json(r.finite_difference.nrows(), |i, j| r.finite_difference[(i, j)]),
                    "max_deviation": num(r.max_deviation),
                    "involution_defect": num(r.involution_defect),
                    "multiplicity_minus": r.multiplicity_minus,
                    "multiplicity_plus": r.multiplicity_plus,
                    "det_predicted": num(r.det_predicted),
                    "det_finite_difference": num(r.det_finite_difference),
                }),
            )
        }
        Command::Tiling { net, sigma, out, svg } => {
            let f = load(&net)?;
            let sol = pick_solution(&f, sigma.as_deref())?;
            let emb = PlanarEmbedding::new(&f.net, f.require_rotation()?.to_vec())?;
            let diagram = smith_diagram(&emb, &sol)?;
            emit_svg(&svg, &diagram)?;
            emit(&out, &io::tiling_json(&RectTiling::from_diagram(&diagram)?))
        }
        Command::Cartogram { tiling, areas, policy, out, svg } => {
            let t = io::parse_tiling(&read(&tiling)?)?;
            let areas = parse_list(&areas)?;
            if areas.len() != t.tiles.len() {
                return Err(Failure::Usage(format!("--areas needs {} values, got {}", t.tiles.len(), areas.len())));
            }
            let policy = match policy {
                Policy::Reject => CrossPolicy::Reject,
                Policy::Horizontal => CrossPolicy::HorizontalSplit,
                Policy::Vertical => CrossPolicy::VerticalSplit,
            };
            let diagram = retile_with_areas(&t, &areas, policy)?;
            emit_svg(&svg, &diagram)?;
            emit(&out, &io::tiling_json(&RectTiling::from_diagram(&diagram)?))
        }
        Command::Fields { kind } => fields(kind),
        Command::Grid(args) => grid_command(args),
        Command::RiemannMap { domain, eps, points, out, svg } => {
            let d = domain_shape(&domain)?;
            let eps = parse_f64(&eps)?;
            let map = grid::riemann_map(&d, eps)?;
            let emb = map.problem.embedding()?;
            emit_svg(&svg, &smith_diagram_from(&emb, &map.dual, &map.solution.h, &map.conjugate))?;
            let mut m = Map::new();
            m.insert("eps".into(), num(eps));
            m.insert("vertices".into(), Value::from(map.problem.net.vertex_count()));
            m.insert("edges".into(), Value::from(map.problem.net.edge_count()));
            m.insert("R".into(), num(map.r_eps));
            m.insert("two_area".into(), num(2.0 * d.area()));
            m.insert("relative_error".into(), num((map.r_eps - 2.0 * d.area()) / (2.0 * d.area())));
            m.insert("within_bounds".into(), Value::Bool(map.within_bounds));
            m.insert("iterations".into(), Value::from(map.solution.iterations));
            m.insert("residual".into(), num(map.solution.residual));
            if points {
                let pts: Map<String, Value> = map
                    .problem
                    .net
                    .vertex_ids()
                    .iter()
                    .zip(&map.mapped)
                    .map(|(id, &(x, y))| (id.clone(), json!([num(x), num(y)])))
                    .collect();
                m.insert("mapped".into(), Value::Object(pts));
            }
            emit(&out, &Value::Object(m))
        }
        Command::Gallery { name, n, a, b, out } => {
            let Some(name) = name else {
                return emit_text(&out, &format!("{}\n", gallery::FIXTURE_NAMES.join("\n")));
            };
            let fixture = match (name.as_str(), n) {
                ("path", Some(k)) => gallery::make_path(k)?,
                ("grid", Some(k)) => gallery::make_grid(k)?,
                ("jacobi", _) if n.is_some() || a.is_some() || b.is_some() => {
                    gallery::make_jacobi(n.unwrap_or(2), a.unwrap_or(1.0), b.unwrap_or(1.0))?
                }
                _ => gallery::by_name(&name)?,
            };
            emit(&out, &fixture_json(&fixture))
        }
    }
}

fn fixture_json(f: &Fixture) -> Value {
    io::network_json(&f.net, Some(&f.u), Some(&f.energies), f.rotation.as_deref())
}

fn edge_ids(net: &Network) -> Vec<String> {
    net.edges().iter().map(|e| e.id.clone()).collect()
}

fn matrix_json(n: usize, at: impl Fn(usize, usize) -> f64) -> Value {
    Value::Array((0..n).map(|i| Value::Array((0..n).map(|j| num(at(i, j))).collect())).collect())
}

fn orientation(net: &Network, s: &str) -> CliResult<Orientation> {
    let sigma = Orientation::from_sign_string(s)?;
    if sigma.len() != net.edge_count() {
        return Err(Failure::Usage(format!("--sigma needs {} signs, got {}", net.edge_count(), sigma.len())));
    }
    Ok(sigma)
}

fn pick_solution(f: &NetworkFile, sigma: Option<&str>) -> CliResult<EnharmonicSolution> {
    let (u, e) = (f.require_u()?, f.require_energies()?);
    match sigma {
        Some(s) => {
            let sigma = orientation(&f.net, s)?;
            Ok(solve_enharmonic(&f.net, &ConstraintSet::from_boundary(&f.net, u), e, &sigma)?)
        }
        None => solve_all_parallel(&f.net, u, e, threads())?
            .into_iter()
            .next()
            .ok_or(Failure::Domain(Error::Infeasible)),
    }
}

fn fields(kind: FieldsCommand) -> CliResult<()> {
    match kind {
        FieldsCommand::Star { coeffs, anchors, out } => {
            let mut c = parse_rationals(&coeffs)?;
            c.reverse();
            let p = RationalPolynomial::new(c)?;
            let anchors = parse_rationals(&anchors)?;
            let star = star_energies(&p, &anchors)?;
            let fixture = gallery::make_star(
                &anchors.iter().map(enharmonic::numtheory::to_f64).collect::<Vec<_>>(),
                &star.energies.iter().map(enharmonic::numtheory::to_f64).collect::<Vec<_>>(),
            )?;
            let mut values: Vec<f64> = solve_all_parallel(&fixture.net, &fixture.u, &fixture.energies, threads())?
                .iter()
                .map(|s| s.h[fixture.net.vertex_index("z").unwrap()])
                .collect();
            values.sort_by(f64::total_cmp);
            emit(
                &out,
                &json!({
                    "polynomial": p.to_string(),
                    "anchors": anchors.iter().map(format_rational).collect::<Vec<_>>(),
                    "energies": star.energies.iter().map(format_rational).collect::<Vec<_>>(),
                    "centre_values": values.into_iter().map(num).collect::<Vec<_>>(),
                }),
            )
        }
        FieldsCommand::Quadratic { d, s, out } => {
            let params = match s {
                Some(s) => params_for_scale(d, &parse_rational(&s)?)?,
                None => quadratic_field_params(d)?,
            };
            let one = enharmonic::numtheory::rat(1, 1);
            let delta = quadratic_discriminant(&one, &one, &one, &params.e_d, &params.e_e)?;
            emit(
                &out,
                &json!({
                    "D": d,
                    "s": format_rational(&params.s),
                    "d_prime": format_rational(&params.d_prime),
                    "energies": {
                        "a": "1", "b": "1", "c": "1",
                        "d": format_rational(&params.e_d),
                        "e": format_rational(&params.e_e),
                    },
                    "discriminant": format_rational(&delta),
                }),
            )
        }
        FieldsCommand::Discriminant { energies, out } => {
            let e = parse_rationals(&energies)?;
            if e.len() != 5 {
                return Err(Failure::Usage(format!("--energies needs 5 values, got {}", e.len())));
            }
            let delta = quadratic_discriminant(&e[0], &e[1], &e[2], &e[3], &e[4])?;
            emit(&out, &json!({ "discriminant": format_rational(&delta) }))
        }
    }
}

#[derive(serde::Deserialize)]
struct PolygonDoc {
    points: Vec<[f64; 2]>,
    marks: [usize; 4],
}

fn domain_shape(args: &DomainArgs) -> CliResult<FourArcDomain> {
    Ok(match args.domain {
        DomainKind::Square => FourArcDomain::unit_square(),
        DomainKind::Diamond => {
            if args.center.len() != 2 {
                return Err(Failure::Usage("--center needs two values".into()));
            }
            FourArcDomain::diamond(args.center[0], args.center[1], args.radius)
        }
        DomainKind::File => {
            let path = args
                .domain_file
                .as_ref()
                .ok_or_else(|| Failure::Usage("--domain file needs --domain-file".into()))?;
            let doc: PolygonDoc = serde_json::from_str(&read(path)?)
                .map_err(|e| Failure::Domain(Error::InvalidInput(format!("domain JSON: {e}"))))?;
            let [a, b, c, d] = doc.marks;
            FourArcDomain::new(doc.points.into_iter().map(|[x, y]| (x, y)).collect(), a, b, c, d)?
        }
    })
}

fn grid_command(args: GridArgs) -> CliResult<()> {
    let domain = domain_shape(&args.domain)?;
    let eps: Vec<f64> = match (&args.n, &args.eps_list) {
        (Some(ns), _) => ns.iter().map(|&n| if n == 0 { f64::NAN } else { 1.0 / n as f64 }).collect(),
        (None, Some(list)) => parse_list(list)?,
        (None, None) => vec![0.1],
    };
    if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Failure::Usage("mesh sizes must be positive".into()));
    }
    let spec = match args.boundary {
        BoundaryKind::Corners => BoundarySpec::Corners,
        BoundaryKind::Full => BoundarySpec::Full(Arc::new(|x, y| (x + y) / 2.0)),
        BoundaryKind::FourArc => BoundarySpec::FourArc,
    };
    let energy = match args.energy {
        EnergyKind::Unit => EnergyMode::Unit,
        EnergyKind::Eps2 => EnergyMode::EpsSquared,
    };
    let report = grid::solve_grid_sequence(&domain, &spec, energy, &eps, threads())?;
    let levels: Vec<Value> = report
        .levels
        .iter()
        .map(|l| {
            let mut m = Map::new();
            m.insert("eps".into(), num(l.eps));
            m.insert("vertices".into(), Value::from(l.vertices));
            m.insert("edges".into(), Value::from(l.edges));
            m.insert("iterations".into(), Value::from(l.iterations));
            m.insert("residual".into(), num(l.residual));
            m.insert("pde_residual".into(), l.pde_residual.map(num).unwrap_or(Value::Null));
            if args.samples {
                m.insert(
                    "samples".into(),
                    Value::Array(l.samples.iter().map(|&v| if v.is_finite() { num(v) } else { Value::Null }).collect()),
                );
            }
            Value::Object(m)
        })
        .collect();
    if args.svg.svg.is_some() {
        let finest = eps.iter().copied().fold(f64::INFINITY, f64::min);
        let problem = grid::GridProblem::new(grid::build_grid(&domain, finest)?, &spec, energy)?;
        let sol = problem.solve()?;
        let emb = problem.embedding()?;
        let dual = build_dual_with_terminals(&emb, &problem.constraints.fixed_vertices())?;
        let g = conjugate_with(&emb, &dual, &sol.h, &problem.energies, dual.arc_vertex(0))?;
        emit_svg(&args.svg, &smith_diagram_from(&emb, &dual, &sol.h, &g))?;
    }
    let bbox = domain.bbox();
    emit(
        &args.out,
        &json!({
            "bbox": bbox.iter().map(|&v| num(v)).collect::<Vec<_>>(),
            "sample_side": grid::SAMPLE_SIDE,
            "levels": levels,
            "sup_distances": report.sup_distances.iter().map(|&d| num(d)).collect::<Vec<_>>(),
        }),
    )
}
