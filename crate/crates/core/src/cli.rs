//! Batch front end: parses a job spec, runs one task, and renders the report.
//!
//! Every report is a fixed-order JSON document so that identical specs produce
//! identical bytes. Validation problems exit with status 2 and an error object
//! `{code, message, path}`; internal invariant violations (including a
//! disagreement between the closed forms and their oracles) exit with status 3.

use std::fmt::Write as _;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::cochain::triangulate;
use crate::error::Error;
use crate::forms::{level_classify, quad_from_bilinear, BilinearData, LevelClassReport};
use crate::frac::Frac1;
use crate::global::{
    block_report, bunt_report, commutator_pairing, commutator_pairing_oracle, section_space,
    BunTReport, ComponentSelection, GerbeBlock, LevelInput, SectionSpaceInvariants,
};
use crate::lattice::{FgAbGroup, IntMatrix};
use crate::localcat::{hexagon_check, standard_refinement};
use crate::surface::{invariants_coinvariants_check, twisted_cohomology, LatticeLocalSystem, SurfaceSummary};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TWIST_BOUND: u32 = 3;
const MAX_TWIST_ENTRIES: u64 = 100_000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Local,
    Surface,
    Global,
    Bunt,
    Selfcheck,
}

impl Task {
    fn parse(s: &str) -> Option<Task> {
        match s {
            "local" => Some(Task::Local),
            "surface" => Some(Task::Surface),
            "global" => Some(Task::Global),
            "bunt" => Some(Task::Bunt),
            "selfcheck" => Some(Task::Selfcheck),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Machine-readable failure: `{code, message, path}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub path: String,
    #[serde(skip)]
    pub internal: bool,
}

impl CliError {
    fn new(code: &str, message: impl Into<String>, path: impl Into<String>) -> Self {
        CliError {
            code: code.into(),
            message: message.into(),
            path: path.into(),
            internal: false,
        }
    }

    fn from_error(e: Error, path: impl Into<String>) -> Self {
        CliError {
            code: e.code().into(),
            message: e.to_string(),
            path: path.into(),
            internal: e.is_internal(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: "invariant_violation".into(),
            message: message.into(),
            path: String::new(),
            internal: true,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.internal {
            EXIT_INTERNAL
        } else {
            EXIT_VALIDATION
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub genus: usize,
    pub rank: usize,
    pub monodromy: Option<Vec<IntMatrix>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    pub c_matrix: IntMatrix,
    pub zeta: Frac1,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JobSpec {
    pub task: Option<Task>,
    pub surface: Option<SurfaceSpec>,
    pub level: Option<LevelSpec>,
    pub components: Option<Vec<Vec<BigInt>>>,
    pub bound: Option<u32>,
    pub output_format: Option<Format>,
}

fn object<'a>(v: &'a Value, path: &str) -> CliResult<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| CliError::new("invalid_type", "expected an object", path))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], prefix: &str) -> CliResult<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::new(
            "unknown_field",
            format!("unknown field {k:?}"),
            join(prefix, k),
        )),
        None => Ok(()),
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str, prefix: &str) -> CliResult<&'a Value> {
    obj.get(key)
        .ok_or_else(|| CliError::new("missing_field", format!("missing field {key:?}"), join(prefix, key)))
}

fn as_i64(v: &Value, path: &str) -> CliResult<i64> {
    v.as_i64()
        .ok_or_else(|| CliError::new("invalid_type", "expected an integer", path))
}

fn as_usize(v: &Value, path: &str) -> CliResult<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| CliError::new("invalid_type", "expected a non-negative integer", path))
}

fn as_array<'a>(v: &'a Value, path: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| CliError::new("invalid_type", "expected an array", path))
}

/// A square matrix given either as nested rows or as a flat row-major list.
fn parse_matrix(v: &Value, rank: Option<usize>, path: &str) -> CliResult<IntMatrix> {
    let items = as_array(v, path)?;
    let nested = items.first().is_some_and(Value::is_array);
    let (n, flat) = if nested {
        let mut flat = Vec::new();
        for (i, row) in items.iter().enumerate() {
            let row_path = format!("{path}[{i}]");
            let row = as_array(row, &row_path)?;
            if row.len() != items.len() {
                return Err(CliError::new(
                    "non_square_matrix",
                    format!("row has {} entries, expected {}", row.len(), items.len()),
                    row_path,
                ));
            }
            for (j, x) in row.iter().enumerate() {
                flat.push(as_i64(x, &format!("{row_path}[{j}]"))?);
            }
        }
        (items.len(), flat)
    } else {
        let flat = items
            .iter()
            .enumerate()
            .map(|(i, x)| as_i64(x, &format!("{path}[{i}]")))
            .collect::<CliResult<Vec<_>>>()?;
        let n = match rank {
            Some(r) => r,
            None => (0..=flat.len()).find(|k| k * k >= flat.len()).unwrap_or(0),
        };
        if n * n != flat.len() {
            return Err(CliError::new(
                "non_square_matrix",
                format!("flat matrix has {} entries, not a square of the rank", flat.len()),
                path,
            ));
        }
        (n, flat)
    };
    if let Some(r) = rank {
        if r != n {
            return Err(CliError::from_error(
                Error::DimensionMismatch { expected: r, found: n },
                path,
            ));
        }
    }
    Ok(IntMatrix::from_i64(n, n, &flat))
}

impl JobSpec {
    pub fn parse(text: &str) -> CliResult<JobSpec> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| CliError::new("invalid_json", e.to_string(), ""))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> CliResult<JobSpec> {
        let obj = object(v, "")?;
        reject_unknown(
            obj,
            &["task", "surface", "level", "components", "bound", "output_format"],
            "",
        )?;
        let mut spec = JobSpec::default();
        if let Some(t) = obj.get("task") {
            let s = t
                .as_str()
                .ok_or_else(|| CliError::new("invalid_type", "expected a string", "task"))?;
            spec.task = Some(
                Task::parse(s)
                    .ok_or_else(|| CliError::new("unknown_task", format!("unknown task {s:?}"), "task"))?,
            );
        }
        if let Some(f) = obj.get("output_format") {
            spec.output_format = Some(match f.as_str() {
                Some("json") => Format::Json,
                Some("text") => Format::Text,
                _ => {
                    return Err(CliError::new(
                        "invalid_format",
                        "output_format must be \"json\" or \"text\"",
                        "output_format",
                    ))
                }
            });
        }
        if let Some(s) = obj.get("surface") {
            let so = object(s, "surface")?;
            reject_unknown(so, &["genus", "rank", "monodromy"], "surface")?;
            let genus = as_usize(required(so, "genus", "surface")?, "surface.genus")?;
            let rank = as_usize(required(so, "rank", "surface")?, "surface.rank")?;
            let monodromy = match so.get("monodromy") {
                None | Some(Value::Null) => None,
                Some(m) => Some(
                    as_array(m, "surface.monodromy")?
                        .iter()
                        .enumerate()
                        .map(|(i, x)| parse_matrix(x, Some(rank), &format!("surface.monodromy[{i}]")))
                        .collect::<CliResult<Vec<_>>>()?,
                ),
            };
            spec.surface = Some(SurfaceSpec {
                genus,
                rank,
                monodromy,
            });
        }
        if let Some(l) = obj.get("level") {
            let lo = object(l, "level")?;
            reject_unknown(lo, &["c_matrix", "zeta"], "level")?;
            let rank = spec.surface.as_ref().map(|s| s.rank);
            let c_matrix = parse_matrix(required(lo, "c_matrix", "level")?, rank, "level.c_matrix")?;
            let zeta_value = required(lo, "zeta", "level")?;
            let zeta_str = zeta_value.as_str().ok_or_else(|| {
                CliError::new("malformed_fraction", "zeta must be a \"num/den\" string", "level.zeta")
            })?;
            let zeta: Frac1 = zeta_str
                .parse()
                .map_err(|e| CliError::from_error(e, "level.zeta"))?;
            spec.level = Some(LevelSpec { c_matrix, zeta });
        }
        if let Some(c) = obj.get("components") {
            let mut comps = Vec::new();
            for (i, row) in as_array(c, "components")?.iter().enumerate() {
                let p = format!("components[{i}]");
                let row = as_array(row, &p)?
                    .iter()
                    .enumerate()
                    .map(|(j, x)| as_i64(x, &format!("{p}[{j}]")).map(BigInt::from))
                    .collect::<CliResult<Vec<_>>>()?;
                comps.push(row);
            }
            spec.components = Some(comps);
        }
        if let Some(b) = obj.get("bound") {
            let b = as_usize(b, "bound")?;
            spec.bound = Some(
                u32::try_from(b).map_err(|_| CliError::new("invalid_type", "bound is too large", "bound"))?,
            );
        }
        Ok(spec)
    }

    fn local_system(&self) -> CliResult<LatticeLocalSystem> {
        let s = self
            .surface
            .as_ref()
            .ok_or_else(|| CliError::new("missing_field", "missing field \"surface\"", "surface"))?;
        match &s.monodromy {
            None => Ok(LatticeLocalSystem::trivial(s.genus, s.rank)),
            Some(m) => LatticeLocalSystem::new(s.genus, s.rank, m.clone()).map_err(|e| {
                let path = match e {
                    Error::NonUnimodular { index } | Error::NonInvertibleMonodromy { index } => {
                        format!("surface.monodromy[{index}]")
                    }
                    _ => "surface.monodromy".into(),
                };
                CliError::from_error(e, path)
            }),
        }
    }

    fn bilinear(&self) -> CliResult<BilinearData> {
        let l = self
            .level
            .as_ref()
            .ok_or_else(|| CliError::new("missing_field", "missing field \"level\"", "level"))?;
        BilinearData::new(l.c_matrix.clone(), l.zeta).map_err(|e| CliError::from_error(e, "level.c_matrix"))
    }

    fn level_input(&self) -> CliResult<LevelInput> {
        let rho = self.local_system()?;
        let bilinear = self.bilinear()?;
        LevelInput::new(bilinear, rho).map_err(|e| {
            let path = match e {
                Error::DimensionMismatch { .. } => "level.c_matrix",
                _ => "level",
            };
            CliError::from_error(e, path)
        })
    }
}

#[derive(Serialize)]
struct LevelEcho {
    c_matrix: IntMatrix,
    zeta: Frac1,
}

impl From<&BilinearData> for LevelEcho {
    fn from(b: &BilinearData) -> Self {
        LevelEcho {
            c_matrix: b.c.clone(),
            zeta: b.zeta,
        }
    }
}

#[derive(Serialize)]
struct TwistEntry {
    lambda: Vec<i64>,
    theta: Frac1,
}

#[derive(Serialize)]
struct Braiding {
    refinement: &'static str,
    beta: Vec<Vec<Frac1>>,
}

#[derive(Serialize)]
struct LocalChecks {
    twist_equals_quadratic_form: bool,
    double_braiding_equals_polarization: bool,
    hexagon: bool,
    balancing: bool,
}

#[derive(Serialize)]
struct LocalReport {
    task: Task,
    level: LevelEcho,
    classification: LevelClassReport,
    braiding: Braiding,
    twist_bound: u32,
    twist_table: Vec<TwistEntry>,
    double_braiding: Vec<Vec<Frac1>>,
    checks: LocalChecks,
}

#[derive(Serialize)]
struct CohomologyGroups {
    h0: FgAbGroup,
    h1: FgAbGroup,
    h2: FgAbGroup,
}

#[derive(Serialize)]
struct SurfaceChecks {
    euler_characteristic: bool,
    invariants_coinvariants: bool,
}

#[derive(Serialize)]
struct SurfaceReport {
    task: Task,
    surface: SurfaceSummary,
    cohomology: CohomologyGroups,
    euler_characteristic: i64,
    checks: SurfaceChecks,
}

#[derive(Serialize)]
struct Conventions {
    orientation_sign: i64,
    orientation_normalization: &'static str,
    refinement: &'static str,
    omega_source: &'static str,
    gerbe_data: &'static str,
}

fn conventions() -> Conventions {
    Conventions {
        orientation_sign: triangulate(1).map(|t| t.orientation_sign()).unwrap_or(1),
        orientation_normalization: "<a* cup b*, [T^2]> = +1 for trivial integer coefficients",
        refinement: "upper_triangular",
        omega_source: "polarization b of the level",
        gerbe_data: "reports omega and the pi_2 characters only; no per-component quadratic refinement",
    }
}

#[derive(Serialize)]
struct GlobalChecks {
    omega_matches_cochain_oracle: bool,
}

#[derive(Serialize)]
struct GlobalReport {
    task: Task,
    surface: SurfaceSummary,
    level: LevelEcho,
    section_space: SectionSpaceInvariants,
    blocks: Vec<GerbeBlock>,
    conventions: Conventions,
    checks: GlobalChecks,
}

#[derive(Serialize)]
struct BunTEnvelope {
    task: Task,
    surface: SurfaceSummary,
    level: LevelEcho,
    bun_t: BunTReport,
    conventions: Conventions,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfcheckCase {
    pub family: String,
    pub genus: usize,
    pub rank: usize,
    pub c_matrix: IntMatrix,
    pub zeta: Frac1,
}

#[derive(Serialize)]
struct SelfcheckReport {
    task: Task,
    seed: u64,
    configurations: usize,
    agreements: usize,
    disagreements: Vec<SelfcheckCase>,
}

fn local_report(spec: &JobSpec) -> CliResult<LocalReport> {
    let bilinear = spec.bilinear()?;
    if let Some(s) = &spec.surface {
        if s.rank != bilinear.rank() {
            return Err(CliError::from_error(
                Error::DimensionMismatch {
                    expected: s.rank,
                    found: bilinear.rank(),
                },
                "level.c_matrix",
            ));
        }
    }
    let q = quad_from_bilinear(&bilinear).map_err(|e| CliError::from_error(e, "level"))?;
    let r = q.rank();
    let bound = spec.bound.unwrap_or(DEFAULT_TWIST_BOUND);
    let side = 2 * u64::from(bound) + 1;
    let entries = u32::try_from(r)
        .ok()
        .and_then(|r| side.checked_pow(r))
        .unwrap_or(u64::MAX);
    if entries > MAX_TWIST_ENTRIES {
        return Err(CliError::new(
            "bound_too_large",
            format!("twist table would have {entries} entries"),
            "bound",
        ));
    }
    let braided = standard_refinement(&q);
    let internal = |e: Error| CliError::from_error(e, "");

    let b = bound as i64;
    let mut lambdas: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..r {
        lambdas = lambdas
            .into_iter()
            .flat_map(|v| {
                (-b..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    let mut twist_ok = true;
    let mut twist_table = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let theta = braided.twist(&lambda).map_err(internal)?;
        twist_ok &= theta == q.evaluate(&lambda).map_err(internal)?;
        twist_table.push(TwistEntry { lambda, theta });
    }

    let basis: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    let b_form = q.polarize();
    let mut double = vec![vec![Frac1::ZERO; r]; r];
    let mut db_ok = true;
    let mut hex_ok = true;
    let mut bal_ok = true;
    for i in 0..r {
        for j in 0..r {
            double[i][j] = braided.double_braiding(&basis[i], &basis[j]).map_err(internal)?;
            db_ok &= double[i][j] == b_form.eval(&basis[i], &basis[j]).map_err(internal)?;
            bal_ok &= braided.balancing_check(&basis[i], &basis[j]).map_err(internal)?;
            for k in 0..r {
                hex_ok &= hexagon_check(&braided, &basis[i], &basis[j], &basis[k]).map_err(internal)?;
            }
        }
    }
    if !(twist_ok && db_ok && hex_ok && bal_ok) {
        return Err(CliError::internal("local braiding checks failed"));
    }
    Ok(LocalReport {
        task: Task::Local,
        level: LevelEcho::from(&bilinear),
        classification: level_classify(&q),
        braiding: Braiding {
            refinement: "upper_triangular",
            beta: braided.beta().to_vec(),
        },
        twist_bound: bound,
        twist_table,
        double_braiding: double,
        checks: LocalChecks {
            twist_equals_quadratic_form: twist_ok,
            double_braiding_equals_polarization: db_ok,
            hexagon: hex_ok,
            balancing: bal_ok,
        },
    })
}

fn surface_report(spec: &JobSpec) -> CliResult<SurfaceReport> {
    let rho = spec.local_system()?;
    let internal = |e: Error| CliError::from_error(e, "");
    let coh = twisted_cohomology(&rho).map_err(internal)?;
    let chi = coh.euler_characteristic();
    let expected = (2 - 2 * rho.genus() as i64) * rho.rank() as i64;
    let inv = invariants_coinvariants_check(&rho).map_err(internal)?;
    if chi != expected || !inv {
        return Err(CliError::internal("cohomology cross-checks failed"));
    }
    Ok(SurfaceReport {
        task: Task::Surface,
        surface: SurfaceSummary::from(&rho),
        cohomology: CohomologyGroups {
            h0: coh.h0,
            h1: coh.h1,
            h2: coh.h2,
        },
        euler_characteristic: chi,
        checks: SurfaceChecks {
            euler_characteristic: true,
            invariants_coinvariants: true,
        },
    })
}

fn component_selection(spec: &JobSpec, input: &LevelInput) -> CliResult<ComponentSelection> {
    if let Some(c) = &spec.components {
        return Ok(ComponentSelection::Explicit(c.clone()));
    }
    let h2 = section_space(&input.rho)
        .map_err(|e| CliError::from_error(e, ""))?
        .pi0;
    match spec.bound {
        Some(bound) => Ok(ComponentSelection::Range { bound }),
        None if h2.free_rank == 0 => Ok(ComponentSelection::Range { bound: 0 }),
        None => Err(CliError::new(
            "components_required",
            format!("H^2 = {h2} is infinite; supply \"components\" or a \"bound\""),
            "components",
        )),
    }
}

fn block_error(e: Error) -> CliError {
    let path = match e {
        Error::BadComponent { .. } => "components",
        Error::TooManyComponents(_) => "bound",
        _ => "",
    };
    CliError::from_error(e, path)
}

fn oracle_agrees(input: &LevelInput) -> CliResult<()> {
    let internal = |e: Error| CliError::from_error(e, "");
    let closed = commutator_pairing(input).map_err(internal)?;
    let oracle = commutator_pairing_oracle(input).map_err(internal)?;
    if closed != oracle {
        return Err(CliError::internal(
            "commutator pairing disagrees with the cochain-level cup product",
        ));
    }
    Ok(())
}

fn global_report(spec: &JobSpec) -> CliResult<GlobalReport> {
    let input = spec.level_input()?;
    let selection = component_selection(spec, &input)?;
    oracle_agrees(&input)?;
    let blocks = block_report(&input, &selection).map_err(block_error)?;
    Ok(GlobalReport {
        task: Task::Global,
        surface: SurfaceSummary::from(&input.rho),
        level: LevelEcho::from(&input.bilinear),
        section_space: section_space(&input.rho).map_err(|e| CliError::from_error(e, ""))?,
        blocks,
        conventions: conventions(),
        checks: GlobalChecks {
            omega_matches_cochain_oracle: true,
        },
    })
}

fn bunt(spec: &JobSpec) -> CliResult<BunTEnvelope> {
    let input = spec.level_input()?;
    let selection = component_selection(spec, &input)?;
    oracle_agrees(&input)?;
    Ok(BunTEnvelope {
        task: Task::Bunt,
        surface: SurfaceSummary::from(&input.rho),
        level: LevelEcho::from(&input.bilinear),
        bun_t: bunt_report(&input, &selection).map_err(block_error)?,
        conventions: conventions(),
    })
}

/// Monodromy families used by the self-check: `trivial`, `sign` (`b_1 -> -1`),
/// and `unipotent` (`a_1 -> [[1,1],[0,1]]` in the first two coordinates).
pub fn monodromy_family(family: &str, genus: usize, rank: usize) -> Option<LatticeLocalSystem> {
    let n = 2 * genus;
    let mut mats = vec![IntMatrix::identity(rank); n];
    match family {
        "trivial" => {}
        "sign" if genus > 0 => mats[1] = -&IntMatrix::identity(rank),
        "unipotent" if genus > 0 && rank >= 2 => mats[0][(0, 1)] = BigInt::from(1),
        _ => return None,
    }
    LatticeLocalSystem::new(genus, rank, mats).ok()
}

fn random_unimodular(rng: &mut ChaCha8Rng, rank: usize) -> IntMatrix {
    let mut p = IntMatrix::identity(rank);
    if rank < 2 {
        return p;
    }
    for _ in 0..4 {
        let i = rng.gen_range(0..rank);
        let j = (i + rng.gen_range(1..rank)) % rank;
        let k: i64 = rng.gen_range(-2..=2);
        let mut e = IntMatrix::identity(rank);
        e[(i, j)] = BigInt::from(k);
        p = &p * &e;
    }
    p
}

/// All configurations of the oracle-equivalence suite: genus 1 and 2, rank 1 and
/// 2, the three monodromy families, integer matrices with entries in `{0, 1}`
/// and `zeta` with denominator at most 6, keeping the monodromy-invariant levels.
pub fn oracle_grid() -> Vec<(String, LevelInput)> {
    let zetas = crate::frac::fractions_up_to(6);
    let mut out = Vec::new();
    for genus in 1..=2 {
        for rank in 1..=2usize {
            for family in ["trivial", "sign", "unipotent"] {
                let Some(rho) = monodromy_family(family, genus, rank) else {
                    continue;
                };
                for mask in 0..(1u32 << (rank * rank)) {
                    let entries: Vec<i64> = (0..rank * rank).map(|k| i64::from(mask >> k & 1)).collect();
                    let c = IntMatrix::from_i64(rank, rank, &entries);
                    for &zeta in &zetas {
                        let Ok(bilinear) = BilinearData::new(c.clone(), zeta) else {
                            continue;
                        };
                        if let Ok(input) = LevelInput::new(bilinear, rho.clone()) {
                            out.push((family.to_string(), input));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Seeded extra configurations: families conjugated by random unimodular
/// matrices, with random small levels.
pub fn oracle_random(seed: u64, count: usize) -> Vec<(String, LevelInput)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zetas = crate::frac::fractions_up_to(6);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 50 * count {
        attempts += 1;
        let genus = rng.gen_range(1..=2);
        let rank = rng.gen_range(1..=2usize);
        let family = ["trivial", "sign", "unipotent"][rng.gen_range(0..3)];
        let Some(rho) = monodromy_family(family, genus, rank) else {
            continue;
        };
        let Ok(rho) = rho.conjugate(&random_unimodular(&mut rng, rank)) else {
            continue;
        };
        let entries: Vec<i64> = (0..rank * rank).map(|_| rng.gen_range(-3..=3)).collect();
        let zeta = zetas[rng.gen_range(0..zetas.len())];
        let Ok(bilinear) = BilinearData::new(IntMatrix::from_i64(rank, rank, &entries), zeta) else {
            continue;
        };
        if let Ok(input) = LevelInput::new(bilinear, rho) {
            out.push((format!("{family}-conjugated"), input));
        }
    }
    out
}

fn selfcheck(seed: u64) -> CliResult<SelfcheckReport> {
    let mut cases = oracle_grid();
    cases.extend(oracle_random(seed, 40));
    let results: Vec<(SelfcheckCase, bool)> = {
        use rayon::prelude::*;
        cases
            .par_iter()
            .map(|(family, input)| {
                let agree = match (commutator_pairing(input), commutator_pairing_oracle(input)) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                };
                let case = SelfcheckCase {
                    family: family.clone(),
                    genus: input.rho.genus(),
                    rank: input.rho.rank(),
                    c_matrix: input.bilinear.c.clone(),
                    zeta: input.bilinear.zeta,
                };
                (case, agree)
            })
            .collect()
    };
    let agreements = results.iter().filter(|(_, ok)| *ok).count();
    Ok(SelfcheckReport {
        task: Task::Selfcheck,
        seed,
        configurations: results.len(),
        agreements,
        disagreements: results.into_iter().filter(|(_, ok)| !ok).map(|(c, _)| c).collect(),
    })
}

/// Rendered output together with the process exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub exit_code: i32,
}

fn render<T: Serialize>(value: &T, format: Format) -> Vec<u8> {
    let v = serde_json::to_value(value).expect("reports serialize to JSON");
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&v).expect("JSON values serialize");
            out.push(b'\n');
            out
        }
        Format::Text => {
            let mut out = String::new();
            render_text(&v, 0, &mut out);
            out.into_bytes()
        }
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_object() && is_flat(x)),
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_flat(x) {
                    let _ = writeln!(out, "{pad}{k}: {}", inline(x));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    render_text(x, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_flat(x) {
                    let _ = writeln!(out, "{pad}- {}", inline(x));
                } else {
                    let _ = writeln!(out, "{pad}-");
                    render_text(x, indent + 1, out);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", inline(other));
        }
    }
}

/// Runs `task` on the spec text. `input` may be `None` only for `selfcheck`.
pub fn run(task: Task, input: Option<&str>, format: Option<Format>, seed: Option<u64>) -> Outcome {
    let spec = match input {
        Some(text) => JobSpec::parse(text),
        None if task == Task::Selfcheck => Ok(JobSpec::default()),
        None => Err(CliError::new("missing_input", "no job spec supplied", "")),
    };
    let format = format
        .or_else(|| spec.as_ref().ok().and_then(|s| s.output_format))
        .unwrap_or_default();
    let result = spec.and_then(|spec| {
        if let Some(t) = spec.task {
            if t != task {
                return Err(CliError::new(
                    "task_mismatch",
                    format!("spec is for task {t:?}, command is {task:?}"),
                    "task",
                ));
            }
        }
        match task {
            Task::Local => local_report(&spec).map(|r| render(&r, format)),
            Task::Surface => surface_report(&spec).map(|r| render(&r, format)),
            Task::Global => global_report(&spec).map(|r| render(&r, format)),
            Task::Bunt => bunt(&spec).map(|r| render(&r, format)),
            Task::Selfcheck => {
                let report = selfcheck(seed.unwrap_or(DEFAULT_SEED))?;
                let code = if report.disagreements.is_empty() {
                    EXIT_OK
                } else {
                    EXIT_INTERNAL
                };
                return Ok(Outcome {
                    bytes: render(&report, format),
                    exit_code: code,
                });
            }
        }
        .map(|bytes| Outcome {
            bytes,
            exit_code: EXIT_OK,
        })
    });
    match result {
        Ok(o) => o,
        Err(e) => Outcome {
            bytes: render(&e, format),
            exit_code: e.exit_code(),
        },
    }
}
