use std::path::Path;

use cluster_torsion::cluster::ClusterError;
use cluster_torsion::quiver::{build_quiver, torus_reference_order, QuiverError};
use cluster_torsion::surface::{MappingWord, SurfaceError, Triangulation};
use cluster_torsion::torsion::{
    full_pipeline, Chart, MultistartOptions, PipelineError, PipelineOptions, SeedStrategy, TorsionError,
};
use num_complex::Complex64;
use serde_json::json;

pub const VALIDATION: u8 = 2;
pub const DIAGNOSIS: u8 = 3;
pub const INTERNAL: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
    pub details: Vec<String>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: VALIDATION, message: message.into(), details: Vec::new() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { code: INTERNAL, message: message.into(), details: Vec::new() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": self.message, "exit_code": self.code, "details": self.details })
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        let details = match &e {
            SurfaceError::Invalid(issues) => issues.iter().map(|i| i.to_string()).collect(),
            _ => Vec::new(),
        };
        let message = match &e {
            SurfaceError::Invalid(_) => "invalid triangulation".to_string(),
            other => other.to_string(),
        };
        CliError { code: VALIDATION, message, details }
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> Self {
        let code = match &e {
            ClusterError::Surface(s) => return s.clone().into(),
            ClusterError::Quiver(QuiverError::RankTooSmall(_)) | ClusterError::LengthMismatch { .. } => VALIDATION,
            ClusterError::ZeroCoordinate(_) => VALIDATION,
            ClusterError::Singular { .. } => DIAGNOSIS,
            _ => INTERNAL,
        };
        CliError { code, message: e.to_string(), details: Vec::new() }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let code = match &e.error {
            TorsionError::Cluster(c) => CliError::from(c.clone()).code,
            TorsionError::Quadratic(_) => VALIDATION,
            _ => DIAGNOSIS,
        };
        CliError { code, message: e.to_string(), details: Vec::new() }
    }
}

/// Text to print and the exit code to finish with.
pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn json_text(v: &serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("JSON values serialize"))
}

pub fn load_surface(spec: &str) -> Result<Triangulation, CliError> {
    if let Some(t) = Triangulation::builtin(spec) {
        return Ok(t);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::validation(format!(
            "unknown surface {spec:?}: not a built-in (once-punctured-torus, four-punctured-sphere) or an existing file"
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("cannot read {spec}: {e}")))?;
    Ok(Triangulation::from_json(&text)?)
}

/// An L/R word, or a path to a flip-program JSON file.
pub fn load_word(spec: &str) -> Result<MappingWord, CliError> {
    if spec.chars().all(|c| "LRlr \t".contains(c)) {
        return Ok(MappingWord::parse_torus(spec)?);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Ok(MappingWord::parse_torus(spec)?);
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("cannot read {spec}: {e}")))?;
    Ok(MappingWord::from_json(&text)?)
}

fn check_rank(n: usize) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::validation(format!("rank n must be at least 2, got {n}")));
    }
    Ok(())
}

pub fn quiver(surface: &str, n: usize, as_json: bool) -> Result<Output, CliError> {
    check_rank(n)?;
    let tri = load_surface(surface)?;
    let mut q = build_quiver(&tri, n).map_err(ClusterError::from)?;
    if tri == Triangulation::once_punctured_torus() {
        if let Some(order) = torus_reference_order(n) {
            q = q.pull_back(&order).map_err(ClusterError::from)?;
        }
    }
    if as_json {
        return Ok(Output::ok(json_text(&q.to_json())));
    }
    let mut text = format!("{} vertices, rank {}\n", q.len(), n);
    for (i, v) in q.vertices().iter().enumerate() {
        text.push_str(&format!("y{} = {}\n", i + 1, serde_json::to_string(v).expect("vertex serializes")));
    }
    text.push_str(&q.arrow_list());
    Ok(Output::ok(text))
}

pub fn map(surface: &str, word: &str, n: usize, symbolic: bool, as_json: bool) -> Result<Output, CliError> {
    check_rank(n)?;
    let tri = load_surface(surface)?;
    let word = load_word(word)?;
    let chart = Chart::new(&tri, &word, n)?;
    if symbolic {
        let s = chart.map.symbolic()?;
        if as_json {
            let components: Vec<String> = s.components.iter().map(|c| c.to_string()).collect();
            return Ok(Output::ok(json_text(&json!({
                "labeling": chart.labeling(),
                "components": components,
                "reduced": s.reduced,
            }))));
        }
        return Ok(Output::ok(s.render()));
    }
    if as_json {
        return Ok(Output::ok(json_text(&chart.map.to_json())));
    }
    let mut text = format!(
        "{} variables ({} labeling), {} mutations\n",
        chart.map.dimension(),
        chart.labeling(),
        chart.map.mutation_count()
    );
    for step in chart.map.steps() {
        text.push_str(&serde_json::to_string(step).expect("step serializes"));
        text.push('\n');
    }
    Ok(Output::ok(text))
}

pub enum Seed {
    Auto,
    Lift,
    Multistart,
    Point(String),
}

pub struct TorsionJob<'a> {
    pub surface: &'a str,
    pub word: &'a str,
    pub n: usize,
    pub exact: Option<i64>,
    pub seed: u64,
    pub starts: usize,
    pub strategy: Seed,
}

fn parse_point(text: &str) -> Result<Vec<Complex64>, CliError> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)
        .map_err(|e| CliError::validation(format!("--point must be a JSON array of [re, im] pairs: {e}")))?;
    Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

pub fn torsion(job: &TorsionJob<'_>, as_json: bool) -> Result<Output, CliError> {
    check_rank(job.n)?;
    let tri = load_surface(job.surface)?;
    let word = load_word(job.word)?;
    let ms = MultistartOptions { starts: job.starts, seed: job.seed, ..MultistartOptions::default() };
    let strategy = match &job.strategy {
        Seed::Auto => SeedStrategy::default_for(job.n, job.seed),
        Seed::Lift => SeedStrategy::Lift(ms),
        Seed::Multistart => SeedStrategy::Multistart(ms),
        Seed::Point(p) => SeedStrategy::Point(parse_point(p)?),
    };
    let opts = PipelineOptions { exact: job.exact, ..PipelineOptions::default() };
    let report = full_pipeline(&tri, &word, job.n, &strategy, &opts)?;
    let code = if report.is_regular() { 0 } else { DIAGNOSIS };
    let text = if as_json { json_text(&report.to_json()) } else { report.render() };
    Ok(Output { text, code })
}
