//! `liegeo`: curvature tables, algebra audits and hypersurface verification.
//!
//! Exit status: 0 when every verdict is consistent or passed, 1 when any is
//! violated or failed, 2 on usage or input errors.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};
use serde::Serialize;

use liegeo_core::algebra::{Sectional, DEFAULT_TOL};
use liegeo_core::catalog::{self, CatalogId};
use liegeo_core::chart::ImmersionChart;
use liegeo_core::format;
use liegeo_core::surface::{self, LemmaSet, VerifyOptions};
use liegeo_core::theorem::{self, ReportOptions, Verdict};
use liegeo_core::{Exact, MetricLieAlgebra, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    AlgebraCheck,
    AlgebraCurvature,
    AlgebraReport,
    SurfaceVerify,
    TheoremReport,
    CatalogList,
    Export,
}

#[derive(Debug, Parser)]
#[command(name = "liegeo", version, about = "Geometry of bi-invariant Lie groups and their hypersurfaces")]
struct RunConfig {
    command: Command,
    /// Catalog id, e.g. `oscillator:m=2` or `sphere:r=1.5,ambient=euclidean:n=3`.
    #[arg(long, conflicts_with = "input")]
    catalog: Option<String>,
    /// Algebra JSON document; `-` reads standard input.
    #[arg(long)]
    input: Option<String>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    #[arg(long, default_value_t = surface::DEFAULT_H, allow_hyphen_values = true)]
    h: f64,
    /// Tolerance; command default when unset.
    #[arg(long, env = "LIEGEO_TOL", allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact arithmetic in Q(√2).
    #[arg(long)]
    exact: bool,
    /// Output file, replaced atomically; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lorentzian plane samples.
    #[arg(long, default_value_t = 10_000)]
    planes: usize,
    /// Lemma selection for `surface-verify`: all, 31, 32, 34, 35.
    #[arg(long, default_value = "all")]
    lemma: String,
    /// Skip the `h/2` rerun of `surface-verify`.
    #[arg(long)]
    no_convergence: bool,
    /// Reference element coordinates, comma separated; default per fixture.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    /// Plain-text table instead of JSON (`algebra-curvature` only).
    #[arg(long)]
    text: bool,
}

struct Output {
    body: String,
    ok: bool,
}

impl Output {
    fn json<T: Serialize>(value: &T, ok: bool) -> Self {
        let mut body = serde_json::to_string_pretty(value).expect("plain data");
        body.push('\n');
        Self { body, ok }
    }
}

impl RunConfig {
    fn validate(&self) -> anyhow::Result<()> {
        if self.grid < 4 {
            bail!("--grid must be at least 4, got {}", self.grid);
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            bail!("--h must be positive, got {}", self.h);
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                bail!("--tol must be positive, got {t}");
            }
        }
        if self.planes == 0 {
            bail!("--planes must be positive");
        }
        if self.text && self.command != Command::AlgebraCurvature {
            bail!("--text is only available for algebra-curvature");
        }
        Ok(())
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn catalog_id(&self) -> anyhow::Result<Option<CatalogId>> {
        self.catalog.as_deref().map(|s| s.parse::<CatalogId>().map_err(Into::into)).transpose()
    }

    fn algebra(&self) -> anyhow::Result<MetricLieAlgebra<Exact>> {
        if let Some(id) = self.catalog_id()? {
            if catalog::is_immersion_name(&id.name) {
                bail!("{id} is an immersion, an algebra is required");
            }
            return Ok(catalog::catalog_algebra(&id)?);
        }
        let Some(input) = &self.input else { bail!("one of --catalog or --input is required") };
        let text = if input == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
            s
        } else {
            std::fs::read_to_string(input).with_context(|| format!("reading {input}"))?
        };
        Ok(format::read_algebra(&text)?)
    }

    fn immersion(&self) -> anyhow::Result<ImmersionChart> {
        let Some(id) = self.catalog_id()? else { bail!("--catalog with an immersion id is required") };
        if !catalog::is_immersion_name(&id.name) {
            bail!("{id} is not an immersion");
        }
        Ok(catalog::catalog_immersion(&id)?)
    }

    fn reference(&self, chart: &ImmersionChart) -> anyhow::Result<Option<[f64; liegeo_core::chart::MAX_DIM]>> {
        Ok(match &self.x {
            Some(c) => Some(theorem::unit_reference(chart, c)?),
            None => None,
        })
    }
}

#[derive(Serialize)]
struct PlaneValue {
    plane: String,
    value: String,
}

#[derive(Serialize)]
struct FamilyJson {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<String>,
    expected: String,
    computed: String,
    agrees: bool,
}

#[derive(Serialize)]
struct CurvatureReport {
    algebra: String,
    arithmetic: &'static str,
    labels: Vec<String>,
    sectional: Vec<PlaneValue>,
    killing: Vec<Vec<String>>,
    ricci: Vec<Vec<String>>,
    ricci_routes_agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    einstein_constant: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    families: Vec<FamilyJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plane_sup: Option<theorem::PlaneSupReport>,
}

fn oscillator_m(alg: &MetricLieAlgebra<Exact>) -> Option<usize> {
    let id: CatalogId = alg.name().parse().ok()?;
    if id.name != "oscillator" || id.params.get("literal").is_some_and(|v| v != "false") {
        return None;
    }
    id.params.get("m").map_or(Some(1), |m| m.parse().ok())
}

fn curvature_table<S: Scalar>(alg: &MetricLieAlgebra<S>, tol: f64, m: Option<usize>) -> anyhow::Result<CurvatureReport> {
    let d = alg.dim();
    let labels = alg.labels().to_vec();
    let render = |m: Vec<Vec<S>>| m.iter().map(|r| r.iter().map(Scalar::render).collect()).collect();
    let mut sectional = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let value = match alg.sectional_curvature(&alg.basis_vector(j), &alg.basis_vector(i), tol)? {
                Sectional::Value(k) => k.render(),
                Sectional::UndefinedNullBracket => "undefined".into(),
            };
            sectional.push(PlaneValue { plane: format!("K({},{})", labels[j], labels[i]), value });
        }
    }
    let mut ricci_routes_agree = true;
    for i in 0..d {
        for j in 0..d {
            let (v, w) = (alg.basis_vector(i), alg.basis_vector(j));
            let diff = alg.ricci(&v, &w)? - alg.ricci_by_contraction(&v, &w)?;
            ricci_routes_agree &= diff.is_zero_within(tol);
        }
    }
    let families = match m {
        Some(m) => theorem::oscillator_families(alg, m, &theorem::family_parameters::<S>(), tol)?
            .into_iter()
            .map(|r| {
                let agrees = r.computed.as_ref().is_some_and(|c| (c.clone() - r.expected.clone()).is_zero_within(tol));
                FamilyJson {
                    family: r.family,
                    a: r.a.as_ref().map(Scalar::render),
                    expected: r.expected.render(),
                    computed: r.computed.as_ref().map_or_else(|| "undefined".into(), Scalar::render),
                    agrees,
                }
            })
            .collect(),
        None => vec![],
    };
    Ok(CurvatureReport {
        algebra: alg.name().into(),
        arithmetic: if S::EXACT { "exact" } else { "float" },
        labels,
        sectional,
        killing: render(alg.killing_matrix()),
        ricci: render(alg.ricci_matrix()),
        ricci_routes_agree,
        einstein_constant: theorem::einstein_constant(alg).map(|c| c.render()),
        families,
        plane_sup: None,
    })
}

/// Float cells rounded to 12 significant digits; exact cells unchanged.
fn cell(v: &str) -> String {
    match v.parse::<f64>() {
        Ok(x) if v.contains('.') || v.contains('e') || x == 0.0 => {
            let r: f64 = format!("{x:.11e}").parse().expect("formatted float");
            if r == 0.0 { "0".into() } else { r.to_string() }
        }
        _ => v.to_string(),
    }
}

fn curvature_text(r: &CurvatureReport) -> String {
    let mut s = format!("algebra {} ({})\n", r.algebra, r.arithmetic);
    let width = r.sectional.iter().map(|p| p.plane.len()).max().unwrap_or(0);
    s.push_str("\nsectional curvature, basis planes\n");
    for p in &r.sectional {
        s.push_str(&format!("  {:<width$}  {}\n", p.plane, cell(&p.value)));
    }
    s.push_str("\nricci\n");
    for row in &r.ricci {
        s.push_str(&format!("  {}\n", row.iter().map(|c| cell(c)).collect::<Vec<_>>().join("  ")));
    }
    s.push_str(&format!("ricci routes agree: {}\n", r.ricci_routes_agree));
    if let Some(c) = &r.einstein_constant {
        s.push_str(&format!("einstein constant: {}\n", cell(c)));
    }
    if !r.families.is_empty() {
        s.push_str("\noscillator families\n");
        for f in &r.families {
            let name = match &f.a {
                Some(a) => format!("{} a={}", f.family, cell(a)),
                None => f.family.clone(),
            };
            let mark = if f.agrees { "ok" } else { "MISMATCH" };
            s.push_str(&format!("  {name:<24}  {:<20}  expected {:<20}  {mark}\n", cell(&f.computed), cell(&f.expected)));
        }
    }
    if let Some(p) = &r.plane_sup {
        s.push_str(&format!(
            "\nlorentzian plane sup: {:e} over {} samples (seed {}, rejected {})\n",
            p.sup, p.samples, p.seed, p.rejected
        ));
    }
    s
}

fn run(cfg: &RunConfig) -> anyhow::Result<Output> {
    cfg.validate()?;
    Ok(match cfg.command {
        Command::CatalogList => Output::json(&catalog::catalog_entries(), true),
        Command::Export => {
            let alg = cfg.algebra()?;
            Output { body: format::write_algebra(&alg), ok: true }
        }
        Command::AlgebraCheck => {
            let alg = cfg.algebra()?;
            let report = if cfg.exact { alg.validate(0.0) } else { alg.to_f64().validate(cfg.tol_or(DEFAULT_TOL)) };
            Output::json(&report, report.passed)
        }
        Command::AlgebraCurvature => {
            let alg = cfg.algebra()?;
            let m = oscillator_m(&alg);
            let mut report = if cfg.exact {
                curvature_table(&alg, 0.0, m)?
            } else {
                curvature_table(&alg.to_f64(), cfg.tol_or(1e-12), m)?
            };
            if alg.signature().is_lorentzian() {
                let mut sup = theorem::lorentz_plane_sup(&alg, cfg.planes, cfg.seed)?;
                sup.families.clear();
                report.plane_sup = Some(sup);
            }
            let ok = report.ricci_routes_agree && report.families.iter().all(|f| f.agrees);
            if cfg.text {
                Output { body: curvature_text(&report), ok }
            } else {
                Output::json(&report, ok)
            }
        }
        Command::AlgebraReport => {
            let alg = cfg.algebra()?;
            let report = theorem::algebra_report(&alg)?;
            let ok = report.verdict != Verdict::Violated;
            Output::json(&report, ok)
        }
        Command::SurfaceVerify => {
            let chart = cfg.immersion()?;
            let opts = VerifyOptions {
                grid: cfg.grid,
                h: cfg.h,
                tol: cfg.tol_or(1e-6),
                x: cfg.reference(&chart)?,
                lemmas: cfg.lemma.parse::<LemmaSet>()?,
                convergence: !cfg.no_convergence,
            };
            let run = surface::verify(&chart, &opts)?;
            Output::json(&run.report, run.report.passed())
        }
        Command::TheoremReport => {
            let is_immersion = cfg.catalog_id()?.is_some_and(|id| catalog::is_immersion_name(&id.name));
            if is_immersion {
                let chart = cfg.immersion()?;
                let opts = ReportOptions {
                    grid: cfg.grid,
                    h: cfg.h,
                    tol: cfg.tol_or(1e-6),
                    x: cfg.reference(&chart)?,
                    seed: cfg.seed,
                    planes: cfg.planes,
                };
                let report = theorem::hypersurface_report(&chart, &opts)?;
                let ok = report.verdicts.iter().all(|v| v.verdict != Verdict::Violated);
                Output::json(&report, ok)
            } else {
                let report = theorem::algebra_report(&cfg.algebra()?)?;
                let ok = report.verdict != Verdict::Violated;
                Output::json(&report, ok)
            }
        }
    })
}

fn write_atomic(path: &Path, body: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(body.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cfg.out {
        Some(p) => write_atomic(p, &out.body),
        None => std::io::stdout().write_all(out.body.as_bytes()).map_err(Into::into),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(if out.ok { 0 } else { 1 })
}
