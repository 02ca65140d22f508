//! JSON-facing report types. JSON is the output contract: identical inputs
//! must produce byte-identical reports, so every type here serializes with
//! a fixed field order, carries the schema version, and echoes the seeds
//! and budgets that produced it.

use serde::Serialize;

use crate::covers::{CoverVerdict, MoriSystem};
use crate::criteria::{BundleReport, CorollaryReport, CriterionReport, SweepReport};
use crate::error::Error;
use crate::localalg::{MilnorResult, Mu, QFNormalForm, SplitResult, VersalUnfolding};
use crate::poly::VarTable;
use crate::strata::StrataReport;

pub const SCHEMA_VERSION: &str = "1.0.0";

pub fn schema_version() -> &'static str {
    SCHEMA_VERSION
}

#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &'static str, result: T) -> Envelope<T> {
        Envelope { schema: SCHEMA_VERSION, command, result }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub schema: &'static str,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
}

pub fn error_report(err: &Error) -> ErrorReport {
    let kind = match err {
        Error::BudgetExceeded { .. } => "budget-exceeded",
        Error::Parse(_) => "parse-error",
        Error::NotPrime(_) => "not-prime",
        Error::InsufficientPrecision { .. } => "insufficient-precision",
        Error::InfiniteMilnor { .. } => "infinite-milnor-number",
        Error::QfObstruction(_) => "qf-obstruction",
        _ => "precondition-violation",
    };
    ErrorReport {
        schema: SCHEMA_VERSION,
        error: ErrorBody { kind, message: err.to_string() },
    }
}

/// Exit code contract: 0 success, 2 precondition violation, 3 budget
/// exceeded, 64 unknown subcommand.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded { .. } => 3,
        _ => 2,
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum MuJson {
    Finite(u64),
    Infinite { infinite_at_least: u32 },
}

#[derive(Debug, Serialize)]
pub struct MilnorJson {
    pub field: String,
    pub n: u32,
    pub trunc: u32,
    pub cap: u32,
    pub f: String,
    pub mu: MuJson,
    pub r_min: Option<u32>,
    pub basis: Vec<String>,
}

pub fn milnor_json(
    field: String,
    n: u32,
    trunc: u32,
    cap: u32,
    f: String,
    res: &MilnorResult,
) -> MilnorJson {
    let vars = VarTable::xs(n);
    MilnorJson {
        field,
        n,
        trunc,
        cap,
        f,
        mu: match res.mu {
            Mu::Finite(v) => MuJson::Finite(v),
            Mu::InfiniteAtLeast(c) => MuJson::Infinite { infinite_at_least: c },
        },
        r_min: res.r_min,
        basis: res.basis.iter().map(|m| render_monomial(m, &vars)).collect(),
    }
}

pub fn render_monomial(m: &crate::poly::Monomial, vars: &VarTable) -> String {
    if m.total_degree() == 0 {
        return "1".into();
    }
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars.name(i).to_string()),
            _ => parts.push(format!("{}^{}", vars.name(i), e)),
        }
    }
    parts.join("*")
}

#[derive(Debug, Serialize)]
pub struct DeterminacyJson {
    pub field: String,
    pub n: u32,
    pub trunc: u32,
    pub cap: u32,
    pub f: String,
    pub r_min: Option<u32>,
    pub bound: Option<u32>,
}

#[derive(Debug, Serialize)]
pub struct VersalJson {
    pub field: String,
    pub n: u32,
    pub trunc: u32,
    pub f: String,
    pub mu: u64,
    pub basis: Vec<String>,
    /// the unfolding over s1..s_mu, x1..xn
    pub unfolding: String,
}

pub fn versal_json(field: String, n: u32, trunc: u32, f: String, v: &VersalUnfolding) -> VersalJson {
    let xvars = VarTable::xs(n);
    let uvars = VarTable::params_xs(v.param_count, n);
    VersalJson {
        field,
        n,
        trunc,
        f,
        mu: v.mu,
        basis: v.basis.iter().map(|m| render_monomial(m, &xvars)).collect(),
        unfolding: v.unfolding.render(&uvars),
    }
}

#[derive(Debug, Serialize)]
pub struct ClassifyQfJson {
    pub field: String,
    pub n: u32,
    pub q: String,
    pub polar_rank: u32,
    pub rank: u32,
    pub tag: String,
    pub extension_degree: u32,
    pub working_field: String,
    /// row i is the image of x_i under the certifying substitution
    pub transform: Vec<String>,
    pub normal_form: String,
    pub verified: bool,
}

pub fn classify_qf_json(
    field: String,
    n: u32,
    q_text: String,
    polar_rank: u32,
    nf: &QFNormalForm,
    verified: bool,
) -> ClassifyQfJson {
    let vars = VarTable::xs(n);
    let transform = nf
        .transform
        .iter()
        .map(|row| {
            let mut p = crate::poly::Poly::zero(&nf.field, n);
            for (j, c) in row.iter().enumerate() {
                p.add_term(crate::poly::Monomial::var(n as usize, j), c.clone());
            }
            p.render(&vars)
        })
        .collect();
    ClassifyQfJson {
        field,
        n,
        q: q_text,
        polar_rank,
        rank: nf.rank,
        tag: nf.tag.name().into(),
        extension_degree: nf.extension_degree,
        working_field: nf.field.literal(),
        transform,
        normal_form: crate::localalg::normal_form_poly(&nf.field, n, nf.rank, nf.tag).render(&vars),
        verified,
    }
}

#[derive(Debug, Serialize)]
pub struct SplitJson {
    pub field: String,
    pub params: u32,
    pub n: u32,
    pub trunc: u32,
    pub f: String,
    pub rank: u32,
    pub tag: String,
    pub extension_degree: u32,
    pub working_field: String,
    /// images of the variables under the certifying automorphism
    pub phi: Vec<String>,
    pub quadratic: String,
    pub residual: String,
    pub verified: bool,
}

pub fn split_json(
    field: String,
    params: u32,
    nx: u32,
    trunc: u32,
    f_text: String,
    res: &SplitResult,
    verified: bool,
) -> SplitJson {
    let vars = VarTable::params_xs(params, nx);
    SplitJson {
        field,
        params,
        n: nx,
        trunc,
        f: f_text,
        rank: res.rank,
        tag: res.q_tag.name().into(),
        extension_degree: res.extension_degree,
        working_field: res.phi.field().literal(),
        phi: res.phi.images().iter().map(|s| s.render(&vars)).collect(),
        quadratic: res.quadratic.render(&vars),
        residual: res.residual.render(&vars),
        verified,
    }
}

#[derive(Debug, Serialize)]
pub struct CoverJson {
    pub field: String,
    pub n: u32,
    pub e: u32,
    pub p: u64,
    pub ext_max: u32,
    pub budget: u64,
    pub section: Vec<String>,
    pub equations: Vec<String>,
    pub point_counts: Vec<CoverCountJson>,
    pub singular_points: Vec<CoverSingularJson>,
    pub verdict: CoverVerdict,
}

#[derive(Debug, Serialize)]
pub struct CoverCountJson {
    pub m: u32,
    pub count: u64,
    pub expected: u64,
    pub matches: bool,
}

#[derive(Debug, Serialize)]
pub struct CoverSingularJson {
    pub m: u32,
    pub points: Vec<Vec<String>>,
    pub matches_lifted_sigma1: bool,
}

#[derive(Debug, Serialize)]
pub struct CodimJson {
    pub n: u32,
    pub e: u32,
    pub i: u32,
    pub j: Option<u32>,
    pub char2: bool,
    pub codim: i64,
}

#[derive(Debug, Serialize)]
pub struct CheckCiJson {
    pub report: CriterionReport,
    pub auto: Option<AutoJson>,
}

#[derive(Debug, Serialize)]
pub struct AutoJson {
    pub witness_p: Option<u64>,
    pub tried: Vec<CriterionReport>,
}

// re-exported envelope payloads so the CLI needs only this module
pub type StrataJson = StrataReport;
pub type SweepJson = SweepReport;
pub type MoriJson = MoriSystem;
pub type BundleJson = BundleReport;
pub type CorollaryJson = CorollaryReport;
