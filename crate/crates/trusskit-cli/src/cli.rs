use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use trusskit::btp::{self, BtpNode};
use trusskit::continuum::{boundary_limit_check, hexagon_limit_check, StrainField};
use trusskit::damage::{assess_damage, asymptotic_compatibility, PeriodicCellSpec};
use trusskit::development::{develop, Seed};
use trusskit::io::{parse_truss, rows_to_csv, serialize_truss, ParseWarning};
use trusskit::lattice::{self, HoleSpec, PatchSpec};
use trusskit::rigidity::{analyze, compatibility_basis, BasisMethod};
use trusskit::statics::{solve_displacement_form, solve_elongation_form};
use trusskit::svg::{render_svg, Coloring};
use trusskit::wagon::{curve_sum, wagon_rows};
use trusskit::{Point, Truss};

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "trusskit", version, about = "Compatibility analysis of planar trusses")]
pub struct Cli {
    /// Singular-value cutoff, relative to the largest singular value.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a lattice patch.
    Gen(GenArgs),
    /// Rank, compatibility count, Maxwell number and flexes.
    Analyze(AnalyzeArgs),
    /// Compatibility basis as CSV.
    Compat(CompatArgs),
    /// Wagon-wheel rows of interior vertices.
    Wagon(WagonArgs),
    /// Curve sum over a region of interior vertices.
    Curvesum(CurvesumArgs),
    /// Lay out a flat length assignment in the plane.
    Develop(DevelopArgs),
    /// Effect of removing bars.
    Damage(DamageArgs),
    /// Asymptotic compatibility of a periodic cell.
    Ac(AcArgs),
    /// Hookean statics.
    Statics(StaticsArgs),
    /// Continuum-limit probes.
    Limit(LimitArgs),
    /// Render a truss as SVG.
    Svg(SvgArgs),
    /// Serve the JSON API.
    Serve(ServeArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Shape {
    Hexstar,
    Rhombus,
    Cell,
    Parallelogram,
    Hexagon,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    pub shape: Shape,
    /// Rhombus size.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Cell size.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub na: usize,
    #[arg(long, default_value_t = 2)]
    pub nb: usize,
    /// Hexagon side.
    #[arg(long, default_value_t = 2)]
    pub side: usize,
    /// Holes for `cell`; see `parse_holes`.
    #[arg(long)]
    pub holes: Option<String>,
    /// Tile the cell `N x N` times.
    #[arg(long)]
    pub periodic: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Read a construction tree instead of a truss file.
    #[arg(long)]
    pub btp: bool,
    /// Exit with code 2 unless the truss is infinitesimally rigid.
    #[arg(long)]
    pub require_rigid: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Method {
    LeftNull,
    Projector,
}

#[derive(Args, Debug)]
pub struct CompatArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "left-null")]
    pub method: Method,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WagonArgs {
    pub file: PathBuf,
    /// Comma-separated centres; all interior vertices by default.
    #[arg(long)]
    pub centers: Option<String>,
}

#[derive(Args, Debug)]
pub struct CurvesumArgs {
    pub file: PathBuf,
    /// Comma-separated interior vertices.
    #[arg(long)]
    pub region: String,
}

#[derive(Args, Debug)]
pub struct DevelopArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub seed_edge: Option<usize>,
    /// Put the first face below the axis.
    #[arg(long)]
    pub flip: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DamageArgs {
    pub file: PathBuf,
    /// Comma-separated edge ids.
    #[arg(long)]
    pub remove: String,
    /// JSON array of survivor elongations in active-edge order.
    #[arg(long)]
    pub elongations: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct AcArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "")]
    pub holes: String,
    /// Measure tilings of 1..=N cells per side.
    #[arg(long)]
    pub empirical: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Form {
    Displacement,
    Elongation,
}

#[derive(Args, Debug)]
pub struct StaticsArgs {
    pub file: PathBuf,
    /// JSON array with two entries per vertex.
    #[arg(long)]
    pub loads: PathBuf,
    /// JSON array with one entry per active edge, or a single number.
    #[arg(long)]
    pub springs: PathBuf,
    #[arg(long, value_enum, default_value = "displacement")]
    pub form: Form,
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    #[command(subcommand)]
    pub probe: LimitProbe,
}

#[derive(Subcommand, Debug)]
pub enum LimitProbe {
    /// Rim-minus-spoke sums on shrinking regular hexagons.
    Hexagon {
        /// Strain field, e.g. `e11=y^2;e12=0;e22=0`.
        #[arg(long)]
        ink_field: String,
        #[arg(long, default_value = "0.2,0.1,0.05")]
        deltas: String,
        #[arg(long, default_value = "0,0")]
        center: String,
    },
    /// Boundary functional on shrinking pieces at the origin.
    Boundary {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value = "0.04,0.02,0.01,0.005")]
        rs: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Color {
    None,
    Sigma,
    Elongation,
    Flex,
}

#[derive(Args, Debug)]
pub struct SvgArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    pub color: Color,
    /// Region for `sigma`.
    #[arg(long)]
    pub region: Option<String>,
    /// JSON array per edge id for `elongation`.
    #[arg(long)]
    pub values: Option<PathBuf>,
    /// Which flex to draw for `flex`.
    #[arg(long, default_value_t = 0)]
    pub flex_index: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Base truss; hexstar when absent.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

pub fn parse_list<T: std::str::FromStr>(src: &str, what: &str) -> CliResult<Vec<T>> {
    src.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| CliError::input(format!("{what}: cannot parse '{s}'"))))
        .collect()
}

fn pair(src: &str, what: &str) -> CliResult<(i64, i64)> {
    match parse_list::<i64>(src, what)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::input(format!("{what}: expected two integers in '{src}'"))),
    }
}

/// Holes as JSON (`[{"kind":...}]`) or `;`-separated items:
/// `hex:A,B` unit hexagon, `hex:A,B:S` hexagon of side S,
/// `par:A,B:NA,NB` parallelogram, `edge:A,B:C,D` one lattice edge.
pub fn parse_holes(src: &str) -> CliResult<Vec<HoleSpec>> {
    let src = src.trim();
    if src.starts_with('[') {
        return Ok(serde_json::from_str(src)?);
    }
    let mut out = Vec::new();
    for item in src.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let hole = match parts.as_slice() {
            ["hex", c] => HoleSpec::HexagonCenters { centers: vec![pair(c, "hole centre")?] },
            ["hex", c, s] => HoleSpec::Hexagon {
                center: pair(c, "hole centre")?,
                side: s.trim().parse().map_err(|_| CliError::input(format!("hole side '{s}'")))?,
            },
            ["par", at, size] => {
                let (na, nb) = pair(size, "parallelogram size")?;
                if na < 1 || nb < 1 {
                    return Err(CliError::input(format!("parallelogram size in '{item}'")));
                }
                HoleSpec::Parallelogram { at: pair(at, "parallelogram corner")?, na: na as usize, nb: nb as usize }
            }
            ["edge", p, q] => HoleSpec::Edges { edges: vec![(pair(p, "edge end")?, pair(q, "edge end")?)] },
            _ => return Err(CliError::input(format!("unrecognised hole '{item}'"))),
        };
        out.push(hole);
    }
    Ok(out)
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_truss(path: &Path) -> CliResult<Truss> {
    let parsed = parse_truss(&read(path)?).map_err(|e| CliError { message: format!("{}: {e}", path.display()), ..e.into() })?;
    for w in &parsed.warnings {
        match w {
            ParseWarning::LengthMismatch { edge, prescribed, geometric } => {
                eprintln!("warning: edge {edge} length {prescribed} differs from endpoint distance {geometric}");
            }
        }
    }
    Ok(parsed.truss)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::internal(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn gen_spec(a: &GenArgs) -> CliResult<PatchSpec> {
    Ok(match a.shape {
        Shape::Hexstar => PatchSpec::Hexstar,
        Shape::Rhombus => PatchSpec::Rhombus { n: a.n },
        Shape::Cell => PatchSpec::Cell { k: a.k, holes: parse_holes(a.holes.as_deref().unwrap_or(""))? },
        Shape::Parallelogram => PatchSpec::Parallelogram { na: a.na, nb: a.nb },
        Shape::Hexagon => PatchSpec::Hexagon { side: a.side },
    })
}

#[derive(Serialize)]
struct BtpSummary {
    predicted_compat: i64,
    degenerate: bool,
    warnings: Vec<btp::BtpWarning>,
}

#[derive(Serialize)]
struct AnalyzeOutput {
    analysis: trusskit::rigidity::AnalysisReport<f64>,
    topology: Option<trusskit::truss::TopologyReport>,
    btp: Option<BtpSummary>,
}

fn cmd_analyze(a: &AnalyzeArgs, tol: f64) -> CliResult<String> {
    let (truss, summary) = if a.btp {
        let node: BtpNode<f64> = read_json(&a.file)?;
        let asm = btp::assemble(&node)?;
        for w in &asm.warnings {
            eprintln!("warning: {w:?}");
        }
        let s = BtpSummary { predicted_compat: btp::predicted_compat(&node), degenerate: asm.degenerate, warnings: asm.warnings };
        (asm.truss, Some(s))
    } else {
        (load_truss(&a.file)?, None)
    };
    let analysis = analyze(&truss, tol)?;
    if a.require_rigid && !analysis.is_inf_rigid {
        return Err(CliError::math(format!("truss is not infinitesimally rigid (nullity {})", analysis.nullity)));
    }
    // topology needs a surface; bare frameworks simply have none
    let topology = truss.topology().ok();
    to_json(&AnalyzeOutput { analysis, topology, btp: summary })
}

/// One line per row: `center: edge=coeff,...` with shortest round-trip numbers.
pub fn format_wagon(rows: &[trusskit::wagon::WagonWheelRow<f64>]) -> String {
    let mut out = String::new();
    for r in rows {
        let body: Vec<String> = r.coefficients.iter().map(|(e, c)| format!("{e}={c}")).collect();
        out.push_str(&format!("{}: {}\n", r.center, body.join(",")));
    }
    out
}

fn class_name(c: trusskit::wagon::EdgeClass) -> String {
    serde_json::to_value(c).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_else(|| format!("{c:?}"))
}

fn cmd_develop(a: &DevelopArgs, tol: f64) -> CliResult<String> {
    let t = load_truss(&a.file)?;
    if let Some(id) = a.seed_edge {
        if id >= t.num_edges() {
            return Err(CliError::input(format!("seed edge {id} does not exist")));
        }
    }
    let seed = a.seed_edge.map(|edge| Seed { edge, flip: a.flip });
    let d = develop(&t, seed, tol)?;
    eprintln!("developed {} faces, max mismatch {:e}", d.order.len(), d.max_mismatch);
    Ok(serialize_truss(&t.with_positions(d.positions)?))
}

fn cmd_damage(a: &DamageArgs, tol: f64) -> CliResult<String> {
    let t = load_truss(&a.file)?;
    let removed: Vec<usize> = parse_list(&a.remove, "--remove")?;
    let survivors: Option<Vec<f64>> = a.elongations.as_deref().map(read_json).transpose()?;
    let rep = assess_damage(&t, &removed, survivors.as_deref(), tol)?;
    if a.json {
        return to_json(&rep);
    }
    let mut s = format!(
        "removed {:?}\nrecoverable {}\nc {} -> {}\nnullity {}\ndisconnected {}\n",
        rep.removed, rep.recoverable, rep.original_c, rep.reduced_c, rep.nullity, rep.disconnected
    );
    if !rep.flexes.is_empty() {
        s.push_str(&format!("flexes {}\n", rep.flexes.len()));
    }
    if let Some(r) = &rep.reconstructed {
        for (id, v) in r {
            s.push_str(&format!("edge {id} elongation {v}\n"));
        }
    }
    Ok(s)
}

fn cmd_ac(a: &AcArgs, tol: f64) -> CliResult<String> {
    let spec = PeriodicCellSpec { k: a.k, holes: parse_holes(&a.holes)? };
    let ns: Vec<usize> = (1..=a.empirical.unwrap_or(0)).collect();
    let rep = asymptotic_compatibility(&spec, &ns, tol)?;
    if a.json {
        return to_json(&rep);
    }
    let mut s = format!("formula {}\nhole sizes {:?}\n", rep.formula, rep.hole_sizes);
    if !rep.empirical.is_empty() {
        s.push_str("n\tc\tarea\tratio\n");
        for e in &rep.empirical {
            s.push_str(&format!("{}\t{}\t{}\t{}\n", e.n, e.c, e.area, e.ratio));
        }
    }
    Ok(s)
}

#[derive(Serialize)]
struct StaticsOutput {
    #[serde(rename = "U")]
    u: Vec<f64>,
    lambda: Vec<f64>,
    energy: f64,
    residuals: Residuals,
}

#[derive(Serialize)]
struct Residuals {
    force: f64,
    compatibility: f64,
}

fn cmd_statics(a: &StaticsArgs, tol: f64) -> CliResult<String> {
    let t = load_truss(&a.file)?;
    let loads: Vec<f64> = read_json(&a.loads)?;
    let springs_v: serde_json::Value = read_json(&a.springs)?;
    let springs: Vec<f64> = match springs_v {
        serde_json::Value::Number(n) => vec![n.as_f64().unwrap_or(f64::NAN); t.num_active()],
        other => serde_json::from_value(other)?,
    };
    let sol = match a.form {
        Form::Displacement => solve_displacement_form(&t, &springs, &loads, tol)?,
        Form::Elongation => solve_elongation_form(&t, &springs, &loads, tol)?,
    };
    to_json(&StaticsOutput {
        u: sol.displacement,
        lambda: sol.elongations,
        energy: sol.energy,
        residuals: Residuals { force: sol.force_residual, compatibility: sol.compatibility_residual },
    })
}

fn cmd_limit(a: &LimitArgs) -> CliResult<String> {
    match &a.probe {
        LimitProbe::Hexagon { ink_field, deltas, center } => {
            let eps = StrainField::parse(ink_field)?;
            let (x, y) = match parse_list::<f64>(center, "--center")?.as_slice() {
                [x, y] => (*x, *y),
                _ => return Err(CliError::input("--center needs x,y")),
            };
            to_json(&hexagon_limit_check(&eps, Point::new(x, y), &parse_list::<f64>(deltas, "--deltas")?)?)
        }
        LimitProbe::Boundary { kappa, b, eps, rs } => {
            let eps = StrainField::parse(eps)?;
            to_json(&boundary_limit_check(&eps, *kappa, *b, &parse_list::<f64>(rs, "--rs")?)?)
        }
    }
}

fn cmd_svg(a: &SvgArgs, tol: f64) -> CliResult<String> {
    let t = load_truss(&a.file)?;
    let coloring = match a.color {
        Color::None => Coloring::None,
        Color::Sigma => {
            let region = a.region.as_deref().ok_or_else(|| CliError::input("--color sigma needs --region"))?;
            let cs = curve_sum(&t, &parse_list::<usize>(region, "--region")?)?;
            Coloring::Sigma((0..t.num_edges()).map(|e| cs.sigma(e)).collect())
        }
        Color::Elongation => {
            let p = a.values.as_deref().ok_or_else(|| CliError::input("--color elongation needs --values"))?;
            Coloring::Elongation(read_json(p)?)
        }
        Color::Flex => {
            let rep = analyze(&t, tol)?;
            let f = rep
                .flex_basis
                .get(a.flex_index)
                .ok_or_else(|| CliError::math(format!("no flex {} (truss has {})", a.flex_index, rep.flex_basis.len())))?;
            Coloring::Flex(f.clone())
        }
    };
    Ok(render_svg(&t, &coloring)?)
}

fn cmd_serve(a: &ServeArgs) -> CliResult<()> {
    let base = match &a.file {
        Some(p) => load_truss(p)?,
        None => lattice::gen_patch(&PatchSpec::Hexstar)?,
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::internal(e.to_string()))?;
    rt.block_on(crate::api::serve(a.port, base))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let tol = cli.tol;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::input("--tol must lie in (0, 1)"));
    }
    match &cli.command {
        Command::Gen(a) => {
            let mut t: Truss = lattice::gen_patch(&gen_spec(a)?)?;
            if let Some(n) = a.periodic {
                t = lattice::gen_periodic(&t, n)?;
            }
            emit(&a.output, &serialize_truss(&t))
        }
        Command::Analyze(a) => emit(&None, &cmd_analyze(a, tol)?),
        Command::Compat(a) => {
            let t = load_truss(&a.file)?;
            let method = match a.method {
                Method::LeftNull => BasisMethod::LeftNull,
                Method::Projector => BasisMethod::Projector,
            };
            let b = compatibility_basis(&t, method, tol)?;
            emit(&a.output, &rows_to_csv(&b.rows, &b.edge_order))
        }
        Command::Wagon(a) => {
            let t = load_truss(&a.file)?;
            let centers = match &a.centers {
                Some(c) => parse_list(c, "--centers")?,
                None => t.interior_vertices()?,
            };
            emit(&None, &format_wagon(&wagon_rows(&t, &centers)?))
        }
        Command::Curvesum(a) => {
            let t = load_truss(&a.file)?;
            let cs = curve_sum(&t, &parse_list(&a.region, "--region")?)?;
            let mut s = String::new();
            for e in &cs.edges {
                s.push_str(&format!("{}: {} {}\n", e.edge, class_name(e.class), e.sigma));
            }
            emit(&None, &s)
        }
        Command::Develop(a) => emit(&a.output, &cmd_develop(a, tol)?),
        Command::Damage(a) => emit(&None, &cmd_damage(a, tol)?),
        Command::Ac(a) => emit(&None, &cmd_ac(a, tol)?),
        Command::Statics(a) => emit(&None, &cmd_statics(a, tol)?),
        Command::Limit(a) => emit(&None, &cmd_limit(a)?),
        Command::Svg(a) => emit(&a.output, &cmd_svg(a, tol)?),
        Command::Serve(a) => cmd_serve(a),
    }
}
