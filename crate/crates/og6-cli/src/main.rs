//! Command-line front end: lattice/vector invariants, orbit tests and
//! transport, isometry membership and decomposition, wall classification,
//! cone-chamber queries, the lagrangian detector, the mod-8 scan, and the
//! `verify-claims` battery.
//!
//! Exit codes: 0 = computed, 2 = precondition violation (bad input), 1 =
//! internal assertion failure or failed claims.

use og6_cli::{claims, Scale};

use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde_json::{json, Value};

use og6::cones::{
    birational_kahler_closure_query, classify_divisor, detect_lagrangian,
    isotropic_div2_scan, kahler_chamber_query, ChamberReport,
    PicardData, WallKind,
};
use og6::isometry::Isometry;
use og6::json as wire;
use og6::lattice::{discriminant_group, Lattice, Vector};
use og6::mukai::{decompose_monodromy, is_monodromy, o_plus_generator_pool, signature};
use og6::orbits::{
    decompose_so_plus_u2, orbit_invariants, orbit_oracle_bfs, same_orbit_o_plus_og6,
    same_orbit_sotilde_plus, transport, DecomposeU2, DECOMPOSE_U2_DEFAULT_DEPTH,
};
use og6::Error;

#[derive(Parser)]
#[command(
    name = "og6",
    about = "Exact computations in the even lattice U^3 + (-2)^2: orbits, \
             isometries, walls, cones and lagrangian fibrations"
)]
struct Cli {
    /// Emit machine-readable JSON on stdout instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized battery; output is deterministic given it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice-level invariants.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// Vector-level invariants.
    Vector {
        #[command(subcommand)]
        cmd: VectorCmd,
    },
    /// Orbit classification, transport and the BFS oracle.
    Orbit {
        #[command(subcommand)]
        cmd: OrbitCmd,
    },
    /// Isometry membership and decomposition.
    Isometry {
        #[command(subcommand)]
        cmd: IsometryCmd,
    },
    /// Wall-divisor classification.
    Divisor {
        #[command(subcommand)]
        cmd: DivisorCmd,
    },
    /// Chamber queries in a Picard sublattice.
    Cone {
        #[command(subcommand)]
        cmd: ConeCmd,
    },
    /// Lagrangian-fibration detection from an isotropic divisor class.
    Lagrangian {
        #[command(subcommand)]
        cmd: LagrangianCmd,
    },
    /// Exhaustive verification scans.
    Scan {
        #[command(subcommand)]
        cmd: ScanCmd,
    },
    /// Re-run every desk-checkable claim and report pass/fail per claim.
    VerifyClaims(VerifyClaimsArgs),
}

#[derive(Args)]
struct LatticeArg {
    /// Lattice: an id (og6, u3, mukai, standard(k,m)), inline JSON, or @file.
    #[arg(long, default_value = "og6")]
    lattice: String,
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Rank, determinant, signature and discriminant form.
    Info(LatticeArg),
}

#[derive(Subcommand)]
enum VectorCmd {
    /// Norm, divisibility, primitivity and discriminant class.
    Invariants {
        #[command(flatten)]
        lattice: LatticeArg,
        /// Coordinates: comma-separated integers, inline JSON, or @file.
        #[arg(long)]
        vector: String,
    },
}

#[derive(Subcommand)]
enum OrbitCmd {
    /// Decide whether two primitive vectors lie in the same orbit.
    Test {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
        /// Group: "sotilde" (Eichler criterion) or "oplus" (OG6 lattice only).
        #[arg(long, default_value = "sotilde")]
        group: String,
    },
    /// Produce an explicit transvection word carrying v to w.
    Transport {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
    },
    /// Breadth-first orbit closure of v inside a coordinate box.
    Oracle {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        v: String,
        /// Coordinate box bound for the BFS.
        #[arg(long, default_value_t = 2)]
        box_bound: i64,
        /// JSON array of isometry documents (or @file); defaults to the
        /// built-in generator pool on the OG6 lattice.
        #[arg(long)]
        generators: Option<String>,
    },
}

#[derive(Subcommand)]
enum IsometryCmd {
    /// Determinant, spinor-orientation and discriminant-action membership.
    Check {
        /// Isometry document (inline JSON or @file).
        #[arg(long)]
        isometry: String,
    },
    /// Factor an isometry into generators: monodromy factorization on the
    /// OG6 lattice, transvection words on U^2 (standard(2,0)).
    Decompose {
        #[arg(long)]
        isometry: String,
        /// Depth cap for the U^2 word search.
        #[arg(long, default_value_t = DECOMPOSE_U2_DEFAULT_DEPTH)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum DivisorCmd {
    /// Classify a primitive divisor class by (square, divisibility).
    Classify {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        vector: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConeMode {
    /// Kahler chamber (open): walls of square -2, and square -4 with
    /// divisibility 2.
    Kahler,
    /// Birational-Kahler closure: only divisibility-2 walls; boundary
    /// incidence counts as inside.
    Bk,
}

#[derive(Subcommand)]
enum ConeCmd {
    /// Locate x relative to the chamber of the reference class k.
    Query {
        /// Picard data: {"lattice": ..., "basis": [[int]...]} or @file.
        #[arg(long)]
        pic: String,
        /// Rational coefficients of x in the Picard basis, e.g. "5/2,1/2".
        #[arg(long)]
        x: String,
        /// Rational coefficients of k in the Picard basis.
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value_t = ConeMode::Kahler)]
        mode: ConeMode,
    },
}

#[derive(Subcommand)]
enum LagrangianCmd {
    /// Report the fibration data attached to an isotropic divisor class.
    Check {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        vector: String,
    },
}

#[derive(Subcommand)]
enum ScanCmd {
    /// Exhaustive mod-8 scan over primitive divisibility-2 vectors.
    IsoDiv2 {
        /// Coordinate box bound.
        #[arg(long, default_value_t = 2)]
        box_bound: i64,
    },
}

#[derive(Args)]
struct VerifyClaimsArgs {
    #[arg(long, value_enum, default_value_t = Scale::Smoke)]
    scale: Scale,
    /// Negative control: corrupt a Gram entry so lattice claims must fail.
    #[arg(long, hide = true)]
    tamper: bool,
}

// ---------------------------------------------------------------------------
// Error plumbing
// ---------------------------------------------------------------------------

enum CliError {
    /// Bad input / violated precondition: exit 2.
    Precondition(String),
    /// Internal assertion failure: exit 1.
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::InternalCaseFailure(_) | Error::NonIntegralResult => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Precondition(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn precondition(msg: impl Into<String>) -> CliError {
    CliError::Precondition(msg.into())
}

// ---------------------------------------------------------------------------
// Argument parsing helpers
// ---------------------------------------------------------------------------

/// Reads an argument that may be inline JSON or a @file reference.
fn arg_json(s: &str) -> CliResult<Value> {
    let text = if let Some(path) = s.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| precondition(format!("cannot read {path}: {e}")))?
    } else {
        s.to_string()
    };
    serde_json::from_str(&text).map_err(|e| precondition(format!("bad JSON: {e}")))
}

fn parse_lattice(arg: &LatticeArg) -> CliResult<Arc<Lattice>> {
    if let Ok(l) = wire::lattice_by_name(&arg.lattice) {
        return Ok(l);
    }
    Ok(wire::lattice_from_json(&arg_json(&arg.lattice)?)?)
}

/// Vector given as comma-separated integers, inline JSON, or @file.
fn parse_vector(s: &str, lattice: &Arc<Lattice>) -> CliResult<Vector> {
    if !s.starts_with('@') && !s.starts_with('[') && !s.starts_with('{') {
        let coords: Vec<i64> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|_| precondition(format!("bad coordinate '{p}'")))
            })
            .collect::<CliResult<_>>()?;
        if coords.len() != lattice.rank() {
            return Err(precondition(format!(
                "vector has {} coordinates but the lattice has rank {}",
                coords.len(),
                lattice.rank()
            )));
        }
        return Ok(lattice.vector(coords));
    }
    Ok(wire::vector_from_json_in(&arg_json(s)?, lattice)?)
}

fn parse_rationals(s: &str, expected: usize) -> CliResult<Vec<BigRational>> {
    let parts: Vec<BigRational> = s
        .split(',')
        .map(|p| {
            BigRational::from_str(p.trim())
                .map_err(|_| precondition(format!("bad rational '{p}'")))
        })
        .collect::<CliResult<_>>()?;
    if parts.len() != expected {
        return Err(precondition(format!(
            "expected {expected} rational coefficients, got {}",
            parts.len()
        )));
    }
    Ok(parts)
}

fn parse_picard(s: &str) -> CliResult<PicardData> {
    let doc = arg_json(s)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| precondition("picard data: expected an object"))?;
    let lattice = match obj.get("lattice") {
        Some(v) => wire::lattice_from_json(v)?,
        None => og6::mukai::og6_lattice(),
    };
    let rows = obj
        .get("basis")
        .and_then(Value::as_array)
        .ok_or_else(|| precondition("picard data: missing 'basis' array"))?;
    let basis = rows
        .iter()
        .map(|r| wire::vector_from_json_in(r, &lattice).map_err(CliError::from))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(PicardData::new(basis)?)
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

struct Output {
    json: bool,
}

impl Output {
    fn emit(&self, doc: Value, human: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        } else {
            println!("{}", human());
        }
    }
}

fn wall_kind_str(kind: WallKind) -> &'static str {
    match kind {
        WallKind::StablyPrimeExceptional => "stably-prime-exceptional",
        WallKind::WallNotExceptional => "wall-not-exceptional",
        WallKind::NotAWall => "not-a-wall",
        WallKind::NotNegative => "not-negative",
    }
}

fn chamber_json(rep: &ChamberReport) -> Value {
    json!({
        "in_chamber": rep.in_chamber,
        "on_boundary": rep.on_boundary,
        "separating_walls": rep
            .separating_walls
            .iter()
            .map(|w| json!(w.coords()))
            .collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> CliResult<()> {
    let out = Output { json: cli.json };
    match &cli.command {
        Command::Lattice { cmd: LatticeCmd::Info(arg) } => {
            let l = parse_lattice(arg)?;
            let (pos, neg) = signature(&l);
            let disc = discriminant_group(&l);
            let orders = disc.orders().to_vec();
            let mut q_values = Vec::new();
            let n = orders.len();
            let total: i64 = orders.iter().product();
            for idx in 0..total {
                let mut coeffs = vec![0i64; n];
                let mut rem = idx;
                for (i, &o) in orders.iter().enumerate() {
                    coeffs[i] = rem % o;
                    rem /= o;
                }
                let el = disc.element(coeffs.clone());
                q_values.push(json!({
                    "coeffs": coeffs,
                    "q": el.q_value().to_string(),
                }));
            }
            out.emit(
                json!({
                    "rank": l.rank(),
                    "det": l.det(),
                    "signature": [pos, neg],
                    "discriminant_orders": orders,
                    "discriminant_q": q_values,
                    "lattice": wire::lattice_to_json(&l),
                }),
                || {
                    format!(
                        "rank {}  det {}  signature ({}, {})\ndiscriminant group: {}",
                        l.rank(),
                        l.det(),
                        pos,
                        neg,
                        if orders.is_empty() {
                            "trivial".to_string()
                        } else {
                            orders
                                .iter()
                                .map(|o| format!("Z/{o}"))
                                .collect::<Vec<_>>()
                                .join(" x ")
                        }
                    )
                },
            );
        }
        Command::Vector { cmd: VectorCmd::Invariants { lattice, vector } } => {
            let l = parse_lattice(lattice)?;
            let v = parse_vector(vector, &l)?;
            if v.is_zero() {
                return Err(Error::ZeroVector.into());
            }
            let norm = v.norm();
            let div = v.divisibility()?;
            let primitive = v.is_primitive()?;
            let group = discriminant_group(&l);
            let disc = og6::lattice::disc_class(&group, &v)?;
            out.emit(
                json!({
                    "coords": v.coords(),
                    "norm": norm,
                    "divisibility": div,
                    "primitive": primitive,
                    "disc_class": disc.coeffs(),
                }),
                || {
                    format!(
                        "norm {norm}  divisibility {div}  primitive {primitive}  \
                         discriminant class {:?}",
                        disc.coeffs()
                    )
                },
            );
        }
        Command::Orbit { cmd } => run_orbit(cmd, &out)?,
        Command::Isometry { cmd } => run_isometry(cmd, &out)?,
        Command::Divisor { cmd: DivisorCmd::Classify { lattice, vector } } => {
            let l = parse_lattice(lattice)?;
            let v = parse_vector(vector, &l)?;
            let c = classify_divisor(&v)?;
            out.emit(
                json!({
                    "kind": wall_kind_str(c.kind),
                    "norm": c.norm,
                    "div": c.div,
                    "witness": c.witness,
                }),
                || format!("{}: {}", wall_kind_str(c.kind), c.witness),
            );
        }
        Command::Cone { cmd: ConeCmd::Query { pic, x, k, mode } } => {
            let pic = parse_picard(pic)?;
            let x = parse_rationals(x, pic.rank())?;
            let k = parse_rationals(k, pic.rank())?;
            let rep = match mode {
                ConeMode::Kahler => kahler_chamber_query(&pic, &x, &k)?,
                ConeMode::Bk => birational_kahler_closure_query(&pic, &x, &k)?,
            };
            out.emit(chamber_json(&rep), || {
                let status = if rep.in_chamber {
                    "inside"
                } else if rep.on_boundary {
                    "on the boundary of"
                } else {
                    "outside"
                };
                let mut s = format!("x is {status} the chamber of k");
                if !rep.separating_walls.is_empty() {
                    s.push_str("\nseparating walls:");
                    for w in &rep.separating_walls {
                        s.push_str(&format!("\n  {:?}", w.coords()));
                    }
                }
                s
            });
        }
        Command::Lagrangian { cmd: LagrangianCmd::Check { lattice, vector } } => {
            let l = parse_lattice(lattice)?;
            let v = parse_vector(vector, &l)?;
            let rep = detect_lagrangian(&v)?;
            out.emit(
                json!({
                    "primitive_part": rep.primitive_part.coords(),
                    "divisibility": rep.divisibility,
                    "fibration_exists": rep.fibration_exists,
                    "base": rep.base,
                    "fiber_polarization": [
                        rep.fiber_polarization.0,
                        rep.fiber_polarization.1,
                        rep.fiber_polarization.2
                    ],
                }),
                || {
                    format!(
                        "lagrangian fibration over {} with ({},{},{})-polarized abelian \
                         fibers; primitive part {:?}, divisibility {}",
                        rep.base,
                        rep.fiber_polarization.0,
                        rep.fiber_polarization.1,
                        rep.fiber_polarization.2,
                        rep.primitive_part.coords(),
                        rep.divisibility
                    )
                },
            );
        }
        Command::Scan { cmd: ScanCmd::IsoDiv2 { box_bound } } => {
            if *box_bound < 1 {
                return Err(precondition("box bound must be at least 1"));
            }
            let rep = isotropic_div2_scan(*box_bound);
            out.emit(
                json!({
                    "box": rep.box_bound,
                    "primitive_div2_count": rep.primitive_div2_count,
                    "isotropic_count": rep.isotropic_count,
                    "residues_mod_8": rep
                        .residues_mod_8
                        .iter()
                        .map(|(k, v)| (k.to_string(), json!(v)))
                        .collect::<serde_json::Map<_, _>>(),
                }),
                || {
                    format!(
                        "box {}: {} primitive divisibility-2 vectors, {} isotropic; \
                         norms mod 8: {:?}",
                        rep.box_bound,
                        rep.primitive_div2_count,
                        rep.isotropic_count,
                        rep.residues_mod_8
                    )
                },
            );
        }
        Command::VerifyClaims(args) => {
            let results = claims::verify_claims(cli.seed, args.scale, args.tamper);
            let all_pass = results.iter().all(|r| r.pass);
            out.emit(
                json!({
                    "seed": cli.seed,
                    "claims": results
                        .iter()
                        .map(|r| json!({
                            "id": r.id,
                            "status": if r.pass { "pass" } else { "fail" },
                            "detail": r.detail,
                            "runtime_ms": r.runtime_ms,
                        }))
                        .collect::<Vec<_>>(),
                    "all_pass": all_pass,
                }),
                || {
                    let mut s = String::new();
                    for r in &results {
                        s.push_str(&format!(
                            "{} {} ({} ms): {}\n",
                            if r.pass { "PASS" } else { "FAIL" },
                            r.id,
                            r.runtime_ms,
                            r.detail
                        ));
                    }
                    s.push_str(if all_pass { "all claims pass" } else { "SOME CLAIMS FAILED" });
                    s
                },
            );
            if !all_pass {
                return Err(CliError::Internal("claim battery failed".into()));
            }
        }
    }
    Ok(())
}

fn run_orbit(cmd: &OrbitCmd, out: &Output) -> CliResult<()> {
    match cmd {
        OrbitCmd::Test { lattice, v, w, group } => {
            let l = parse_lattice(lattice)?;
            let v = parse_vector(v, &l)?;
            let w = parse_vector(w, &l)?;
            let same = match group.as_str() {
                "sotilde" => same_orbit_sotilde_plus(&v, &w)?,
                "oplus" => same_orbit_o_plus_og6(&v, &w)?,
                other => {
                    return Err(precondition(format!(
                        "unknown group '{other}' (expected sotilde or oplus)"
                    )))
                }
            };
            let inv_v = orbit_invariants(&v)?;
            let inv_w = orbit_invariants(&w)?;
            out.emit(
                json!({
                    "same_orbit": same,
                    "group": group,
                    "v": { "norm": inv_v.norm, "div": inv_v.div, "disc": inv_v.disc.coeffs() },
                    "w": { "norm": inv_w.norm, "div": inv_w.div, "disc": inv_w.disc.coeffs() },
                }),
                || format!("same orbit ({group}): {same}"),
            );
        }
        OrbitCmd::Transport { lattice, v, w } => {
            let l = parse_lattice(lattice)?;
            let v = parse_vector(v, &l)?;
            let w = parse_vector(w, &l)?;
            let word = transport(&v, &w)?;
            let g = word.evaluate()?;
            let maps = g.apply(&v)?.coords() == w.coords();
            out.emit(
                json!({
                    "word": wire::word_to_json(&word),
                    "length": word.len(),
                    "maps_v_to_w": maps,
                }),
                || format!("transport word of length {} (verified: {})", word.len(), maps),
            );
        }
        OrbitCmd::Oracle { lattice, v, box_bound, generators } => {
            let l = parse_lattice(lattice)?;
            let v = parse_vector(v, &l)?;
            let gens: Vec<Isometry> = match generators {
                Some(spec) => arg_json(spec)?
                    .as_array()
                    .ok_or_else(|| precondition("generators: expected a JSON array"))?
                    .iter()
                    .map(|g| wire::isometry_from_json(g).map_err(CliError::from))
                    .collect::<CliResult<_>>()?,
                None => {
                    if *l == *og6::mukai::og6_lattice() {
                        o_plus_generator_pool(&l)
                    } else {
                        return Err(precondition(
                            "no default generator pool for this lattice; pass --generators",
                        ));
                    }
                }
            };
            let orbit = orbit_oracle_bfs(&gens, &v, *box_bound)?;
            out.emit(
                json!({
                    "box": box_bound,
                    "orbit_size": orbit.len(),
                    "orbit": orbit.iter().map(|u| json!(u.coords())).collect::<Vec<_>>(),
                }),
                || format!("orbit within box {}: {} vectors", box_bound, orbit.len()),
            );
        }
    }
    Ok(())
}

fn run_isometry(cmd: &IsometryCmd, out: &Output) -> CliResult<()> {
    match cmd {
        IsometryCmd::Check { isometry } => {
            let g = wire::isometry_from_json(&arg_json(isometry)?)?;
            let m = g.membership()?;
            out.emit(
                json!({
                    "det": g.det(),
                    "in_o_plus": m.in_o_plus,
                    "in_so": m.in_so,
                    "in_so_plus": m.in_so_plus,
                    "in_otilde": m.in_otilde,
                    "in_sotilde_plus": m.in_sotilde_plus,
                }),
                || {
                    format!(
                        "det {}  O+ {}  SO {}  SO+ {}  O~ {}  SO~+ {}",
                        g.det(),
                        m.in_o_plus,
                        m.in_so,
                        m.in_so_plus,
                        m.in_otilde,
                        m.in_sotilde_plus
                    )
                },
            );
        }
        IsometryCmd::Decompose { isometry, depth } => {
            let g = wire::isometry_from_json(&arg_json(isometry)?)?;
            let l = g.lattice();
            if **l == *og6::mukai::og6_lattice() {
                let monodromy = is_monodromy(&g)?;
                let word = decompose_monodromy(&g)?;
                let recomposed = word.evaluate()?;
                out.emit(
                    json!({
                        "kind": "monodromy-factorization",
                        "is_monodromy": monodromy,
                        "word": wire::word_to_json(&word),
                        "recomposes": recomposed.matrix() == g.matrix(),
                    }),
                    || {
                        format!(
                            "monodromy factorization with {} factors (recomposes: {})",
                            word.len(),
                            recomposed.matrix() == g.matrix()
                        )
                    },
                );
            } else if **l == *Lattice::standard(2, 0) {
                match decompose_so_plus_u2(&g, *depth)? {
                    DecomposeU2::Word(word) => {
                        let recomposed = word.evaluate()?;
                        out.emit(
                            json!({
                                "kind": "u2-transvection-word",
                                "word": wire::word_to_json(&word),
                                "recomposes": recomposed.matrix() == g.matrix(),
                            }),
                            || format!("transvection word of length {}", word.len()),
                        );
                    }
                    DecomposeU2::DepthExceeded { depth_cap } => {
                        out.emit(
                            json!({
                                "kind": "u2-transvection-word",
                                "depth_exceeded": depth_cap,
                            }),
                            || format!("no word found within depth {depth_cap}"),
                        );
                    }
                }
            } else {
                return Err(precondition(
                    "decomposition is supported on the OG6 lattice and on standard(2,0)",
                ));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Precondition(msg)) => {
            let doc = json!({ "error": { "kind": "precondition", "message": msg } });
            eprintln!("{}", serde_json::to_string(&doc).expect("serializable"));
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            let doc = json!({ "error": { "kind": "internal", "message": msg } });
            eprintln!("{}", serde_json::to_string(&doc).expect("serializable"));
            ExitCode::from(1)
        }
    }
}
