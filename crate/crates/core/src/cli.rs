//! The `toricq` command-line front end: argument schema, fan loading,
//! report rendering, and exit-code mapping.
//!
//! Exit codes are a stable contract: 0 success, 1 I/O or parse problems,
//! 2 invalid fan, 3 out-of-regime request (non-ample polarization,
//! non-small or non-invertible mirror map, compare-pn on a fan that is
//! not projective space), 4 comparison mismatch.
//!
//! All JSON payloads go through [`crate::jsonio::to_canonical_string`],
//! so equal configurations produce byte-identical output. Machine-facing
//! JSON uses 0-based ray and cone indices; human-readable text uses the
//! 1-based `rho_i` names that fan files use.

use crate::cohomology::{build_ring, CohClass, RingPresentation};
use crate::fan::{Fan, FanError};
use crate::ifunction::{
    big_i_k0, closed_form_j_pn, compose_mirror, identity_mirror_map, invert_mirror_map, j_from_i,
    mirror_map, small_i, IFunctionRequest, IFunctionSeries, NovCap, NovTPoly, Part,
};
use crate::jsonio::{
    builtin_fan, builtin_names, coh_class_json, ifunction_series_json, mirror_map_json,
    parse_fan_json, rat_to_string, series_entries_json, to_canonical_string, ReadFanError,
};
use crate::picard::{
    degree, is_ample, is_fano, is_nef, wall_curve_classes, weight_matrix, CurveClass,
    DivisorClass, WeightMatrix,
};
use crate::series::TPoly;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO_PARSE: i32 = 1;
pub const EXIT_INVALID_FAN: i32 = 2;
pub const EXIT_OUT_OF_REGIME: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

pub const DEFAULT_DEGREE_BOUND: i64 = 2;
pub const DEFAULT_T_TRUNC: u32 = 1;

const AFTER_HELP: &str = "\
Fans: --fan takes a JSON file path, or one of the built-in names: \
p1, p2, p3, p4, p1xp1, f2.

Polarization: \"pic:c1,..,cr\" gives Picard coordinates in the basis-cone \
basis; \"ray:a1,..,al\" gives the class sum(a_i * D_i) over the rays. \
Ampleness is always re-verified. The default is the anticanonical class \
when it is ample; otherwise --polarization is required.

z floor: the default is -(n + degree_bound*D_max + t_trunc + 2), where \
D_max is the largest positive part of a wall-curve ray-degree vector. \
That window retains every Laurent level the requested bounds can \
populate; arithmetic is exact regardless, the floor only trims output.

Environment: TORICQ_THREADS caps worker threads (default 1). Output for \
a given configuration is byte-identical across runs and platforms.

Exit codes: 0 success, 1 I/O or parse error, 2 invalid fan, 3 \
out-of-regime request, 4 comparison mismatch.";

#[derive(Parser, Debug)]
#[command(
    name = "toricq",
    version,
    about = "Exact-arithmetic toolkit for smooth complete toric varieties",
    after_help = AFTER_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that a fan file is a complete nonsingular fan.
    Validate(RunConfig),
    /// Print weight matrix, wall curves, positivity verdicts, Betti
    /// numbers, and primitive collections.
    Info(RunConfig),
    /// Compute the small I-function (or the k=0 big-I part) as canonical
    /// JSON.
    Ifun(RunConfig),
    /// Compute the mirror map, invert it, and change variables in the
    /// I-function.
    Mirror(RunConfig),
    /// Compare the small I-function on a projective-space fan against
    /// the closed-form J-function.
    #[command(name = "compare-pn")]
    ComparePn(RunConfig),
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Fan file path, or a built-in fan name.
    #[arg(long)]
    pub fan: String,

    /// Maximal-cone index (0-based) whose complement rays give the
    /// Picard basis. Default: cone 0.
    #[arg(long)]
    pub basis_cone: Option<usize>,

    /// Polarization as "pic:c1,..,cr" or "ray:a1,..,al".
    #[arg(long)]
    pub polarization: Option<String>,

    /// Largest polarization degree of enumerated curve classes.
    #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND, allow_negative_numbers = true)]
    pub degree_bound: i64,

    /// Total-degree cap on the deformation parameters t_0..t_r.
    #[arg(long, default_value_t = DEFAULT_T_TRUNC)]
    pub t_trunc: u32,

    /// Lowest retained z exponent; see the default formula under --help.
    #[arg(long, allow_negative_numbers = true)]
    pub z_floor: Option<i64>,

    /// Which series `ifun` emits.
    #[arg(long, value_enum, default_value_t = PartArg::SmallI)]
    pub part: PartArg,

    /// Write the payload to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Payload format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

impl RunConfig {
    /// A config with the command-line defaults, for programmatic callers.
    pub fn new(fan: impl Into<String>) -> RunConfig {
        RunConfig {
            fan: fan.into(),
            basis_cone: None,
            polarization: None,
            degree_bound: DEFAULT_DEGREE_BOUND,
            t_trunc: DEFAULT_T_TRUNC,
            z_floor: None,
            part: PartArg::SmallI,
            out: None,
            format: FormatArg::Json,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartArg {
    #[value(name = "small_I")]
    SmallI,
    #[value(name = "big_I_k0")]
    BigIK0,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

/// Payload plus exit code; only compare-pn uses a nonzero success code.
type CmdOutput = (String, i32);

/// Runs one parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let (config, result) = match &cli.command {
        Command::Validate(c) => (c, cmd_validate(c)),
        Command::Info(c) => (c, cmd_info(c)),
        Command::Ifun(c) => (c, cmd_ifun(c)),
        Command::Mirror(c) => (c, cmd_mirror(c)),
        Command::ComparePn(c) => (c, cmd_compare_pn(c)),
    };
    match result {
        Ok((payload, code)) => {
            if code != EXIT_OK {
                eprintln!("comparison mismatch (diff in payload)");
            }
            match write_payload(config, &payload) {
                Ok(()) => code,
                Err(f) => {
                    eprintln!("error: {}", f.message);
                    f.code
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn write_payload(config: &RunConfig, payload: &str) -> Result<(), Failure> {
    match &config.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| fail(EXIT_IO_PARSE, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

pub fn fan_error_label(e: &FanError) -> &'static str {
    match e {
        FanError::DimensionMismatch(_) => "DimensionMismatch",
        FanError::NonPrimitiveRay { .. } => "NonPrimitiveRay",
        FanError::NonUnimodularCone { .. } => "NonUnimodularCone",
        FanError::NotComplete(_) => "NotComplete",
        FanError::NotAFan(_) => "NotAFan",
    }
}

/// Resolves --fan: an existing file path wins, then a built-in name.
pub fn load_fan(spec: &str) -> Result<Fan, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| fail(EXIT_IO_PARSE, format!("cannot read {spec}: {e}")))?;
        let stem = path.file_stem().and_then(|s| s.to_str());
        return parse_fan_json(&text, stem).map_err(|e| match &e {
            ReadFanError::Parse(_) => fail(EXIT_IO_PARSE, e.to_string()),
            ReadFanError::Invalid(fe) => {
                fail(EXIT_INVALID_FAN, format!("invalid fan [{}]: {fe}", fan_error_label(fe)))
            }
        });
    }
    builtin_fan(spec).ok_or_else(|| {
        fail(
            EXIT_IO_PARSE,
            format!(
                "{spec:?} is neither an existing file nor a built-in fan (built-ins: {})",
                builtin_names().join(", ")
            ),
        )
    })
}

pub fn fan_name(fan: &Fan) -> &str {
    fan.name().unwrap_or("unnamed")
}

/// Everything the computing commands need, with bounds checked and the
/// polarization resolved and re-verified ample.
pub struct Prepared {
    pub fan: Fan,
    pub weights: WeightMatrix,
    pub ring: RingPresentation,
    pub polarization: DivisorClass,
    pub degree_bound: i64,
    pub t_trunc: u32,
    pub z_floor: i64,
}

fn checked_weights(fan: &Fan, config: &RunConfig) -> Result<WeightMatrix, Failure> {
    if let Some(k) = config.basis_cone {
        if k >= fan.max_cones().len() {
            return Err(fail(
                EXIT_IO_PARSE,
                format!(
                    "basis cone index {k} out of range (fan has {} maximal cones)",
                    fan.max_cones().len()
                ),
            ));
        }
    }
    Ok(weight_matrix(fan, config.basis_cone))
}

pub fn prepare(fan: &Fan, config: &RunConfig) -> Result<Prepared, Failure> {
    if config.degree_bound < 0 {
        return Err(fail(EXIT_IO_PARSE, "degree bound must be nonnegative"));
    }
    let weights = checked_weights(fan, config)?;
    let polarization = resolve_polarization(fan, &weights, config.polarization.as_deref())?;
    let ring = build_ring(fan, &weights);
    let z_floor = config
        .z_floor
        .unwrap_or_else(|| default_z_floor(fan, &weights, config.degree_bound, config.t_trunc));
    Ok(Prepared {
        fan: fan.clone(),
        weights,
        ring,
        polarization,
        degree_bound: config.degree_bound,
        t_trunc: config.t_trunc,
        z_floor,
    })
}

fn parse_int_list(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("bad integer {p:?}: {e}")))
        .collect()
}

/// Parses "pic:..." / "ray:..." into Picard coordinates. Does not check
/// ampleness; callers do.
pub fn parse_polarization_spec(
    spec: &str,
    weights: &WeightMatrix,
) -> Result<DivisorClass, String> {
    if let Some(rest) = spec.strip_prefix("pic:") {
        let coords = parse_int_list(rest)?;
        if coords.len() != weights.rank() {
            return Err(format!(
                "pic: expects {} coordinates, got {}",
                weights.rank(),
                coords.len()
            ));
        }
        Ok(DivisorClass { coords })
    } else if let Some(rest) = spec.strip_prefix("ray:") {
        let alphas = parse_int_list(rest)?;
        if alphas.len() != weights.n_rays() {
            return Err(format!(
                "ray: expects {} coefficients, got {}",
                weights.n_rays(),
                alphas.len()
            ));
        }
        let mut coords = vec![0i64; weights.rank()];
        for (rho, &al) in alphas.iter().enumerate() {
            for (c, v) in coords.iter_mut().zip(&weights.ray_divisor_class(rho).coords) {
                *c += al * v;
            }
        }
        Ok(DivisorClass { coords })
    } else {
        Err(format!("polarization {spec:?} must start with \"pic:\" or \"ray:\""))
    }
}

fn resolve_polarization(
    fan: &Fan,
    weights: &WeightMatrix,
    spec: Option<&str>,
) -> Result<DivisorClass, Failure> {
    let class = match spec {
        Some(s) => parse_polarization_spec(s, weights).map_err(|m| fail(EXIT_IO_PARSE, m))?,
        None => {
            let c1 = weights.anticanonical();
            if !is_ample(fan, weights, &c1) {
                return Err(fail(
                    EXIT_OUT_OF_REGIME,
                    "the anticanonical class is not ample here; pass --polarization explicitly",
                ));
            }
            c1
        }
    };
    if !is_ample(fan, weights, &class) {
        return Err(fail(
            EXIT_OUT_OF_REGIME,
            format!(
                "polarization {:?} is not ample (nonpositive on some wall curve)",
                class.coords
            ),
        ));
    }
    Ok(class)
}

/// Default presentation window: deep enough that no Laurent level the
/// bounds can populate is trimmed away.
pub fn default_z_floor(fan: &Fan, weights: &WeightMatrix, degree_bound: i64, t_trunc: u32) -> i64 {
    let d_max = wall_curve_classes(fan, weights)
        .iter()
        .map(|beta| weights.ray_degrees(beta).iter().map(|&d| d.max(0)).sum::<i64>())
        .max()
        .unwrap_or(0);
    -(fan.dim() as i64 + degree_bound * d_max + i64::from(t_trunc) + 2)
}

fn cmd_validate(config: &RunConfig) -> Result<CmdOutput, Failure> {
    let fan = load_fan(&config.fan)?;
    fan.revalidate()
        .map_err(|e| fail(EXIT_INVALID_FAN, format!("invalid fan [{}]: {e}", fan_error_label(&e))))?;
    Ok((validate_payload(&fan, config.format), EXIT_OK))
}

/// The validate report for an already-validated fan.
pub fn validate_payload(fan: &Fan, format: FormatArg) -> String {
    match format {
        FormatArg::Text => format!(
            "{}: smooth, complete, l={}, r={}\n",
            fan_name(fan),
            fan.n_rays(),
            fan.picard_rank()
        ),
        FormatArg::Json => to_canonical_string(&json!({
            "command": "validate",
            "fan": fan_name(fan),
            "status": "valid",
            "smooth": true,
            "complete": true,
            "dim": fan.dim(),
            "l": fan.n_rays(),
            "r": fan.picard_rank(),
            "max_cones": fan.max_cones().len(),
        })),
    }
}

fn rho_set(rays: &[usize]) -> String {
    let names: Vec<String> = rays.iter().map(|&r| format!("rho_{}", r + 1)).collect();
    format!("{{{}}}", names.join(", "))
}

fn int_list(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(","))
}

/// "A = [1,1,1]" for rank 1, nested rows otherwise.
pub fn weight_matrix_string(a: &WeightMatrix) -> String {
    let rows: Vec<String> = a.entries().iter().map(|row| int_list(row)).collect();
    if rows.len() == 1 {
        rows.into_iter().next().unwrap()
    } else {
        format!("[{}]", rows.join(","))
    }
}

fn mono_string(exp: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exp.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{}", i + 1)),
            _ => parts.push(format!("x{}^{e}", i + 1)),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn class_text(ring: &RingPresentation, class: &CohClass) -> String {
    let mut parts = Vec::new();
    for d in 0..=ring.dim() {
        let monos = ring.basis_monomials(d);
        for (i, c) in class.coeffs[d].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = mono_string(monos[i]);
            if m == "1" {
                parts.push(rat_to_string(c));
            } else if c.is_one() {
                parts.push(m);
            } else {
                parts.push(format!("{}*{}", rat_to_string(c), m));
            }
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

struct WallRow {
    f: Vec<i64>,
    ray_degrees: Vec<i64>,
    c1_degree: i64,
    count: usize,
}

fn wall_rows(fan: &Fan, weights: &WeightMatrix) -> Vec<WallRow> {
    let c1 = weights.anticanonical();
    let mut counts: BTreeMap<CurveClass, usize> = BTreeMap::new();
    for beta in wall_curve_classes(fan, weights) {
        *counts.entry(beta).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(beta, count)| WallRow {
            ray_degrees: weights.ray_degrees(&beta),
            c1_degree: degree(&beta, &c1),
            f: beta.f,
            count,
        })
        .collect()
}

fn cmd_info(config: &RunConfig) -> Result<CmdOutput, Failure> {
    let fan = load_fan(&config.fan)?;
    Ok((info_payload(&fan, config)?, EXIT_OK))
}

/// The info report: weight matrix, wall curves, verdicts, Betti numbers,
/// primitive collections, and the cohomology basis listing.
pub fn info_payload(fan: &Fan, config: &RunConfig) -> Result<String, Failure> {
    let weights = checked_weights(fan, config)?;
    let ring = build_ring(fan, &weights);
    let c1 = weights.anticanonical();
    let rows = wall_rows(fan, &weights);
    let betti = ring.betti();
    let collections = fan.primitive_collections();
    let basis: Vec<Vec<String>> = (0..=ring.dim())
        .map(|d| ring.basis_monomials(d).iter().map(|m| mono_string(m)).collect())
        .collect();

    let payload = match config.format {
        FormatArg::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "fan: {} (dim {}, {} rays, {} maximal cones)",
                fan_name(fan),
                fan.dim(),
                fan.n_rays(),
                fan.max_cones().len()
            );
            let ray_strs: Vec<String> = fan
                .rays()
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let coords: Vec<String> = r.iter().map(i64::to_string).collect();
                    format!("rho_{}=({})", i + 1, coords.join(","))
                })
                .collect();
            let _ = writeln!(s, "rays: {}", ray_strs.join(", "));
            let _ = writeln!(
                s,
                "basis_cone = sigma_{} = {}",
                weights.basis_cone(),
                rho_set(fan.max_cones()[weights.basis_cone()].as_slice())
            );
            let basis_divs: Vec<String> =
                weights.basis_rays().iter().map(|&r| format!("O(D_{})", r + 1)).collect();
            let _ = writeln!(s, "Picard basis: ({})", basis_divs.join(", "));
            let _ = writeln!(s, "A = {}", weight_matrix_string(&weights));
            let _ = writeln!(s, "anticanonical class: {}", int_list(&c1.coords));
            let _ = writeln!(s, "wall curve classes:");
            for row in &rows {
                let _ = writeln!(
                    s,
                    "  f={} ray-degrees={} c1-degree={} walls={}",
                    int_list(&row.f),
                    int_list(&row.ray_degrees),
                    row.c1_degree,
                    row.count
                );
            }
            let _ = writeln!(s, "ray divisors:");
            for rho in 0..fan.n_rays() {
                let d = weights.ray_divisor_class(rho);
                let _ = writeln!(
                    s,
                    "  D_{}: pic={} nef={} ample={}",
                    rho + 1,
                    int_list(&d.coords),
                    is_nef(fan, &weights, &d),
                    is_ample(fan, &weights, &d)
                );
            }
            let _ = writeln!(
                s,
                "anticanonical: nef={} ample={}",
                is_nef(fan, &weights, &c1),
                is_ample(fan, &weights, &c1)
            );
            let _ = writeln!(s, "Fano: {}", is_fano(fan, &weights));
            let betti_strs: Vec<String> = betti.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "Betti ({})", betti_strs.join(","));
            let coll_strs: Vec<String> = collections.iter().map(|c| rho_set(c)).collect();
            let _ = writeln!(s, "primitive collections: {}", coll_strs.join(", "));
            let _ = writeln!(s, "cohomology basis:");
            for (d, names) in basis.iter().enumerate() {
                let _ = writeln!(s, "  deg {d}: {}", names.join(", "));
            }
            s
        }
        FormatArg::Json => {
            let walls: Vec<Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "f": row.f,
                        "ray_degrees": row.ray_degrees,
                        "c1_degree": row.c1_degree,
                        "walls": row.count,
                    })
                })
                .collect();
            let ray_divisors: Vec<Value> = (0..fan.n_rays())
                .map(|rho| {
                    let d = weights.ray_divisor_class(rho);
                    json!({
                        "ray": rho,
                        "pic": d.coords,
                        "nef": is_nef(fan, &weights, &d),
                        "ample": is_ample(fan, &weights, &d),
                    })
                })
                .collect();
            to_canonical_string(&json!({
                "command": "info",
                "fan": fan_name(fan),
                "dim": fan.dim(),
                "l": fan.n_rays(),
                "r": fan.picard_rank(),
                "rays": fan.rays(),
                "basis_cone": weights.basis_cone(),
                "basis_rays": weights.basis_rays(),
                "weight_matrix": weights.entries(),
                "anticanonical": c1.coords,
                "anticanonical_nef": is_nef(fan, &weights, &c1),
                "anticanonical_ample": is_ample(fan, &weights, &c1),
                "fano": is_fano(fan, &weights),
                "wall_curves": walls,
                "ray_divisors": ray_divisors,
                "betti": betti,
                "primitive_collections": collections,
                "cohomology_basis": basis,
            }))
        }
    };
    Ok(payload)
}

fn series_request<'a>(p: &'a Prepared, part: Part) -> IFunctionRequest<'a> {
    IFunctionRequest {
        fan: &p.fan,
        weights: &p.weights,
        ring: &p.ring,
        polarization: p.polarization.clone(),
        degree_bound: p.degree_bound,
        t_trunc: p.t_trunc,
        z_floor: p.z_floor,
        include_exp_factor: part == Part::SmallI,
    }
}

fn series_text(p: &Prepared, series: &IFunctionSeries) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "part: {}", series.part.as_str());
    let _ = writeln!(
        s,
        "fan: {}, basis_cone: {}, polarization: {}",
        fan_name(&p.fan),
        p.weights.basis_cone(),
        int_list(&series.polarization.coords)
    );
    let _ = writeln!(
        s,
        "degree_bound: {}, t_trunc: {}, z_floor: {}",
        series.degree_bound, series.trunc.t_trunc, series.trunc.z_floor
    );
    let pol = &series.polarization.coords;
    let mut entries: Vec<(&Vec<i64>, &crate::series::ZSeries)> = series.terms.iter().collect();
    entries.sort_by_key(|(f, _)| {
        (f.iter().zip(pol).map(|(&a, &b)| a * b).sum::<i64>(), (*f).clone())
    });
    for (beta, zs) in entries {
        let _ = writeln!(s, "Q^{}:", int_list(beta));
        let mut keys: Vec<(&(i64, Vec<u32>), &CohClass)> = zs.terms().collect();
        keys.sort_by(|a, b| b.0 .0.cmp(&a.0 .0).then_with(|| a.0 .1.cmp(&b.0 .1)));
        for ((z, t_exp), class) in keys {
            let t_strs: Vec<String> = t_exp.iter().map(u32::to_string).collect();
            let _ = writeln!(
                s,
                "  z^{z} * t^[{}]: {}",
                t_strs.join(","),
                class_text(&p.ring, class)
            );
        }
    }
    s
}

fn cmd_ifun(config: &RunConfig) -> Result<CmdOutput, Failure> {
    let fan = load_fan(&config.fan)?;
    Ok((ifun_payload(&fan, config)?, EXIT_OK))
}

/// The wrapped small-I or k=0 big-I series payload.
pub fn ifun_payload(fan: &Fan, config: &RunConfig) -> Result<String, Failure> {
    let p = prepare(fan, config)?;
    let part = match config.part {
        PartArg::SmallI => Part::SmallI,
        PartArg::BigIK0 => Part::BigIK0,
    };
    let req = series_request(&p, part);
    let series = match part {
        Part::SmallI => small_i(&req),
        _ => big_i_k0(&req),
    }
    .map_err(|e| fail(EXIT_OUT_OF_REGIME, e.to_string()))?;
    let payload = match config.format {
        FormatArg::Json => to_canonical_string(&ifunction_series_json(
            &series,
            &p.fan,
            p.weights.basis_cone(),
        )),
        FormatArg::Text => series_text(&p, &series),
    };
    Ok(payload)
}

fn tmono_string(exp: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exp.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("t_{i}")),
            _ => parts.push(format!("t_{i}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn tpoly_text(p: &TPoly) -> String {
    let mut parts = Vec::new();
    for (exp, c) in p.terms() {
        if c.is_zero() {
            continue;
        }
        let m = tmono_string(exp);
        if m == "1" {
            parts.push(rat_to_string(c));
        } else if c.is_one() {
            parts.push(m);
        } else {
            parts.push(format!("{}*{}", rat_to_string(c), m));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn nov_tpoly_text(p: &NovTPoly) -> String {
    let mut parts = Vec::new();
    for (key, poly) in &p.terms {
        if key.iter().all(|&k| k == 0) {
            parts.push(tpoly_text(poly));
        } else {
            parts.push(format!("Q^{}*({})", int_list(key), tpoly_text(poly)));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn cmd_mirror(config: &RunConfig) -> Result<CmdOutput, Failure> {
    let fan = load_fan(&config.fan)?;
    Ok((mirror_payload(&fan, config)?, EXIT_OK))
}

/// Mirror map, inverse, round-trip verdict, and the substituted series.
pub fn mirror_payload(fan: &Fan, config: &RunConfig) -> Result<String, Failure> {
    let p = prepare(fan, config)?;
    let req = series_request(&p, Part::SmallI);
    let series = small_i(&req).map_err(|e| fail(EXIT_OUT_OF_REGIME, e.to_string()))?;
    let tau = mirror_map(&series, &p.ring).map_err(|e| fail(EXIT_OUT_OF_REGIME, e.to_string()))?;
    let cap = NovCap { polarization: p.polarization.clone(), degree_bound: p.degree_bound };
    let inv =
        invert_mirror_map(&tau, &cap).map_err(|e| fail(EXIT_OUT_OF_REGIME, e.to_string()))?;
    let r = p.weights.rank();
    let round_trip = if compose_mirror(&inv, &tau, &cap) == identity_mirror_map(r, p.t_trunc) {
        "ok"
    } else {
        "failed"
    };
    let j = j_from_i(&series, &tau, &cap).map_err(|e| fail(EXIT_OUT_OF_REGIME, e.to_string()))?;
    let payload = match config.format {
        FormatArg::Json => {
            let mut obj = Map::new();
            obj.insert("part".into(), json!("mirror_map"));
            obj.insert("fan".into(), json!(fan_name(&p.fan)));
            obj.insert("basis_cone".into(), json!(p.weights.basis_cone()));
            obj.insert("polarization".into(), json!(p.polarization.coords));
            obj.insert("degree_bound".into(), json!(p.degree_bound));
            obj.insert("t_trunc".into(), json!(p.t_trunc));
            obj.insert("z_floor".into(), json!(p.z_floor));
            obj.insert("tau".into(), mirror_map_json(&tau));
            obj.insert("inverse".into(), mirror_map_json(&inv));
            obj.insert("round_trip".into(), json!(round_trip));
            obj.insert("j_from_i".into(), series_entries_json(&j));
            to_canonical_string(&Value::Object(obj))
        }
        FormatArg::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "part: mirror_map");
            let _ = writeln!(
                s,
                "fan: {}, basis_cone: {}, polarization: {}",
                fan_name(&p.fan),
                p.weights.basis_cone(),
                int_list(&p.polarization.coords)
            );
            let _ = writeln!(
                s,
                "degree_bound: {}, t_trunc: {}, z_floor: {}",
                p.degree_bound, p.t_trunc, p.z_floor
            );
            for (i, comp) in tau.components.iter().enumerate() {
                let _ = writeln!(s, "tau_{i} = {}", nov_tpoly_text(comp));
            }
            for (i, comp) in inv.components.iter().enumerate() {
                let _ = writeln!(s, "inverse_{i} = {}", nov_tpoly_text(comp));
            }
            let _ = writeln!(s, "round_trip: {round_trip}");
            s.push_str(&series_text(&p, &j));
            s
        }
    };
    Ok(payload)
}

/// Recognizes a projective-space fan: n+1 rays summing to zero with
/// every n-element ray subset a maximal cone. Returns n.
pub fn recognize_pn(fan: &Fan) -> Option<usize> {
    let n = fan.dim();
    if fan.n_rays() != n + 1 {
        return None;
    }
    for coord in 0..n {
        if fan.rays().iter().map(|r| r[coord]).sum::<i64>() != 0 {
            return None;
        }
    }
    let mut cones: Vec<Vec<usize>> = fan
        .max_cones()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .collect();
    cones.sort();
    let mut expected: Vec<Vec<usize>> =
        (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    expected.sort();
    (cones == expected).then_some(n)
}

struct Mismatch {
    beta: Vec<i64>,
    z: i64,
    t_exp: Vec<u32>,
    expected: Value,
    got: Value,
}

/// Compares every retained coefficient of the two series. Returns the
/// number of compared (beta, z, t) slots and the mismatches.
fn diff_series(got: &IFunctionSeries, want: &IFunctionSeries) -> (usize, Vec<Mismatch>) {
    let zero = CohClass { coeffs: Vec::new() };
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    let betas: std::collections::BTreeSet<&Vec<i64>> =
        got.terms.keys().chain(want.terms.keys()).collect();
    for beta in betas {
        let empty_got;
        let g = match got.terms.get(beta) {
            Some(s) => s,
            None => {
                empty_got = crate::series::ZSeries::zero(got.trunc);
                &empty_got
            }
        };
        let empty_want;
        let w = match want.terms.get(beta) {
            Some(s) => s,
            None => {
                empty_want = crate::series::ZSeries::zero(want.trunc);
                &empty_want
            }
        };
        let keys: std::collections::BTreeSet<&(i64, Vec<u32>)> =
            g.terms().map(|(k, _)| k).chain(w.terms().map(|(k, _)| k)).collect();
        for key in keys {
            checked += 1;
            let gv = g.get(key.0, &key.1);
            let wv = w.get(key.0, &key.1);
            let eq = match (gv, wv) {
                (Some(a), Some(b)) => a == b,
                (None, None) => true,
                (Some(a), None) => a.is_zero(),
                (None, Some(b)) => b.is_zero(),
            };
            if !eq {
                mismatches.push(Mismatch {
                    beta: beta.clone(),
                    z: key.0,
                    t_exp: key.1.clone(),
                    expected: coh_class_json(wv.unwrap_or(&zero)),
                    got: coh_class_json(gv.unwrap_or(&zero)),
                });
            }
        }
    }
    (checked, mismatches)
}

fn cmd_compare_pn(config: &RunConfig) -> Result<CmdOutput, Failure> {
    let fan = load_fan(&config.fan)?;
    compare_pn_payload(&fan, config)
}

/// Per-coefficient comparison against the closed-form series; the exit
/// code distinguishes identical (0) from mismatch (4).
pub fn compare_pn_payload(fan: &Fan, config: &RunConfig) -> Result<CmdOutput, Failure> {
    let n = recognize_pn(fan).ok_or_else(|| {
        fail(
            EXIT_OUT_OF_REGIME,
            "fan is not a projective-space fan (need n+1 rays summing to zero \
             with every n-element subset a maximal cone)",
        )
    })?;
    if config.polarization.is_some() {
        return Err(fail(
            EXIT_IO_PARSE,
            "compare-pn fixes the polarization to pic:1; drop --polarization",
        ));
    }
    let weights = checked_weights(fan, config)?;
    let ring = build_ring(fan, &weights);
    let polarization = DivisorClass { coords: vec![1] };
    if config.degree_bound < 0 {
        return Err(fail(EXIT_IO_PARSE, "degree bound must be nonnegative"));
    }
    let z_floor = config
        .z_floor
        .unwrap_or_else(|| default_z_floor(fan, &weights, config.degree_bound, config.t_trunc));
    let req = IFunctionRequest {
        fan,
        weights: &weights,
        ring: &ring,
        polarization,
        degree_bound: config.degree_bound,
        t_trunc: config.t_trunc,
        z_floor,
        include_exp_factor: true,
    };
    let got = small_i(&req).map_err(|e| fail(EXIT_OUT_OF_REGIME, e.to_string()))?;
    let want = closed_form_j_pn(n, config.degree_bound, config.t_trunc, z_floor);
    let (checked, mismatches) = diff_series(&got, &want);
    let identical = mismatches.is_empty();
    let code = if identical { EXIT_OK } else { EXIT_MISMATCH };
    let payload = match config.format {
        FormatArg::Json => {
            let diffs: Vec<Value> = mismatches
                .iter()
                .map(|m| {
                    json!({
                        "beta": m.beta,
                        "z": m.z,
                        "t_exp": m.t_exp,
                        "expected": m.expected,
                        "got": m.got,
                    })
                })
                .collect();
            to_canonical_string(&json!({
                "command": "compare-pn",
                "fan": fan_name(fan),
                "n": n,
                "polarization": [1],
                "degree_bound": config.degree_bound,
                "t_trunc": config.t_trunc,
                "z_floor": z_floor,
                "checked_coefficients": checked,
                "identical": identical,
                "mismatches": diffs,
            }))
        }
        FormatArg::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "compare-pn: {} vs closed-form J (n={n}, degree_bound {}, t_trunc {}, z_floor {})",
                fan_name(fan),
                config.degree_bound,
                config.t_trunc,
                z_floor
            );
            if identical {
                let _ = writeln!(s, "identical: 100% ({checked} coefficients)");
            } else {
                let _ = writeln!(
                    s,
                    "MISMATCH: {} of {checked} coefficients differ",
                    mismatches.len()
                );
                for m in &mismatches {
                    let t_strs: Vec<String> = m.t_exp.iter().map(u32::to_string).collect();
                    let _ = writeln!(
                        s,
                        "  beta={} z^{} t^[{}]: expected {} got {}",
                        int_list(&m.beta),
                        m.z,
                        t_strs.join(","),
                        m.expected,
                        m.got
                    );
                }
            }
            s
        }
    };
    Ok((payload, code))
}
