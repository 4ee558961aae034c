//! JSON report schema. Field order is fixed by the struct definitions so
//! identical runs serialize byte-identically; wall-clock entries appear only
//! when timestamps are enabled.

use serde::Serialize;

use gnlab_core::algebra::NormTriple;
use gnlab_core::grid::GridSpec;
use gnlab_core::params::Params;
use gnlab_core::solver::SolveReport;
use gnlab_core::verify::{IdentityReport, Tolerances};

pub const REPORT_FORMAT: u32 = 1;

#[derive(Serialize)]
pub struct ParamsSection {
    pub dim: u32,
    pub s: f64,
    pub p: f64,
}

impl From<&Params> for ParamsSection {
    fn from(p: &Params) -> Self {
        ParamsSection { dim: p.dim(), s: p.s(), p: p.p() }
    }
}

#[derive(Serialize)]
pub struct GridSection {
    pub n: usize,
    pub half_width: f64,
    pub spacing: f64,
}

impl From<GridSpec> for GridSection {
    fn from(g: GridSpec) -> Self {
        GridSection { n: g.n(), half_width: g.half_width(), spacing: g.spacing() }
    }
}

#[derive(Serialize)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iter: usize,
    pub gamma: f64,
    pub dealias: bool,
    pub init: InitSection,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

#[derive(Serialize)]
pub struct InitSection {
    pub amplitude: f64,
    pub width: f64,
}

#[derive(Serialize)]
pub struct BestConstantSection {
    #[serde(rename = "from_Q")]
    pub from_q: f64,
    pub from_c: f64,
}

#[derive(Serialize)]
pub struct ConvergenceSection {
    pub iterations: usize,
    pub residuals: Vec<f64>,
}

#[derive(Serialize)]
pub struct VersionsSection {
    pub format: u32,
    pub name: &'static str,
    pub version: &'static str,
}

impl VersionsSection {
    pub fn current() -> Self {
        VersionsSection {
            format: REPORT_FORMAT,
            name: "gnlab",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Full report of a solve run.
#[derive(Serialize)]
pub struct SolveDocument {
    pub params: ParamsSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub triple: NormTriple,
    pub energy_c: f64,
    pub best_constant: BestConstantSection,
    pub identities: IdentityReport,
    pub gn_sample_min: Option<f64>,
    pub convergence: ConvergenceSection,
    pub versions: VersionsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[allow(clippy::too_many_arguments)]
pub fn solve_document(
    params: &Params,
    grid: GridSpec,
    tol: f64,
    max_iter: usize,
    gamma: f64,
    dealias: bool,
    init: InitSection,
    report: &SolveReport,
    from_c: f64,
    gn_sample_min: Option<f64>,
    with_times: bool,
) -> SolveDocument {
    SolveDocument {
        params: params.into(),
        grid: grid.into(),
        solver: SolverSection {
            tol,
            max_iter,
            gamma,
            dealias,
            init,
            converged: report.converged,
            wall_time: with_times.then_some(report.wall_time),
        },
        triple: report.final_triple,
        energy_c: report.energy_c,
        best_constant: BestConstantSection { from_q: report.best_constant, from_c },
        identities: report.identity_report.clone(),
        gn_sample_min,
        convergence: ConvergenceSection {
            iterations: report.iterations,
            residuals: report.residual_history.clone(),
        },
        versions: VersionsSection::current(),
        timestamp: with_times.then(now_unix),
    }
}

/// Report of a verify run.
#[derive(Serialize)]
pub struct VerifyDocument {
    pub params: ParamsSection,
    pub grid: GridSection,
    pub triple: NormTriple,
    pub identities: IdentityReport,
    pub tolerances: Tolerances,
    pub pass: bool,
    pub versions: VersionsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

pub fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}
