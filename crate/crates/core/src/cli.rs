//! The `dunkl` command line.
//!
//! Exit codes: 0 when every check came out as expected, 1 when a check failed,
//! 2 for invalid flags or parameters. Artifacts go to `--output` or stdout; notices
//! go to stderr.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::forms::{closed_norm, gram, pairing, FormKind, GramMatrix};
use crate::harmonic::{degree_basis_labeled, degree_labels, is_exceptional, BasisLabel, BasisStyle};
use crate::polyalg::{Term, VectorPoly};
use crate::quadrature::{AngularRule, KernelTable, DEFAULT_LEVEL, DEFAULT_NODES};
use crate::scalars::Params;
use crate::verify::{self, VerifyConfig};
use crate::weight::k_at;
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "dunkl", version, about = "Dunkl harmonics and the matrix weight for dihedral groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Harmonic basis polynomials of every degree up to --degree.
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = BasisStyle::Orthogonal)]
        style: BasisStyle,
    },
    /// Closed-form norms next to the operator-computed pairing.
    Norms {
        #[command(flatten)]
        common: Common,
    },
    /// Gram matrix of the basis through --degree.
    Gram {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = BasisStyle::Orthogonal)]
        style: BasisStyle,
        #[arg(long, value_enum, default_value_t = GramForm::Algebraic)]
        form: GramForm,
        /// Angular refinement for --form quadrature.
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
    },
    /// The weight in the complex basis on a grid of angles.
    Weight {
        #[command(flatten)]
        common: Common,
        /// Grid size; angles are 2 pi (i + offset) / points.
        #[arg(long, default_value_t = 24)]
        points: usize,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        offset: f64,
    },
    /// Run the verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, default_value_t = DEFAULT_LEVEL)]
        level: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random polynomials for the operator checks.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Random points per polynomial.
        #[arg(long, default_value_t = 20)]
        sample_points: usize,
        /// Replace every tolerance (expert use).
        #[arg(long)]
        tol_override: Option<f64>,
        /// Record wall-clock time per check in the report.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Highest degree; defaults to 2m + 2.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Common {
    fn params(&self) -> Result<Params, Error> {
        let p = Params::new(self.m, self.ell, self.kappa)?;
        p.require_integrable()?;
        Ok(p)
    }

    fn degree(&self) -> usize {
        self.degree.unwrap_or(2 * self.m + 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    /// Lossy tabular view.
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GramForm {
    Algebraic,
    Gaussian,
    /// The Gaussian form by numerical integration against the weight.
    Quadrature,
}

#[derive(Debug, Serialize)]
pub struct BasisEntry {
    pub degree: usize,
    pub label: String,
    pub terms: Vec<Term>,
}

#[derive(Debug, Serialize)]
pub struct NormRow {
    pub label: String,
    pub family: u8,
    pub degree: usize,
    pub exceptional: bool,
    pub closed: f64,
    pub computed: f64,
    pub rel_err: f64,
}

#[derive(Debug, Serialize)]
pub struct GramOutput {
    pub form: String,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<Complex64>>,
    pub normalized_eigenvalues: Vec<f64>,
    pub positive_definite: bool,
}

#[derive(Debug, Serialize)]
pub struct WeightRow {
    pub theta: f64,
    pub k11: f64,
    pub k12_re: f64,
    pub k12_im: f64,
    pub k22: f64,
    pub det: f64,
    pub min_eig: f64,
}

#[derive(Debug, Serialize)]
struct BasisCsvRow<'a> {
    degree: usize,
    label: &'a str,
    a: u32,
    b: u32,
    component: &'static str,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct GramCsvRow<'a> {
    row: &'a str,
    col: &'a str,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct CheckCsvRow<'a> {
    name: &'a str,
    status: &'static str,
    computed: f64,
    expected: f64,
    abs_err: f64,
    rel_err: f64,
    tolerance: f64,
}

/// Failure categories mapped onto exit codes.
enum Failure {
    Invalid(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Basis { common, style } => {
            let p = common.params()?;
            let entries = basis_entries(&p, common.degree(), style)?;
            let bytes = match common.format {
                Format::Json => to_json(&entries)?,
                Format::Csv => {
                    let mut rows = Vec::new();
                    for e in &entries {
                        for t in &e.terms {
                            rows.push(BasisCsvRow {
                                degree: e.degree,
                                label: &e.label,
                                a: t.a,
                                b: t.b,
                                component: component_name(t),
                                re: t.re,
                                im: t.im,
                            });
                        }
                    }
                    to_csv(&rows)?
                }
            };
            emit(&common, &bytes, stdout)?;
            Ok(0)
        }
        Command::Norms { common } => {
            let p = common.params()?;
            let rows = norm_rows(&p, common.degree())?;
            let bytes = match common.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => to_csv(&rows)?,
            };
            emit(&common, &bytes, stdout)?;
            Ok(0)
        }
        Command::Gram { common, style, form, nodes } => {
            let p = common.params()?;
            let out = gram_output(&p, common.degree(), style, form, nodes)?;
            let bytes = match common.format {
                Format::Json => to_json(&out)?,
                Format::Csv => {
                    let mut rows = Vec::new();
                    for (i, r) in out.labels.iter().enumerate() {
                        for (j, c) in out.labels.iter().enumerate() {
                            let v = out.entries[i][j];
                            rows.push(GramCsvRow { row: r, col: c, re: v.re, im: v.im });
                        }
                    }
                    to_csv(&rows)?
                }
            };
            emit(&common, &bytes, stdout)?;
            Ok(0)
        }
        Command::Weight { common, points, offset } => {
            let p = common.params()?;
            if points == 0 {
                return Err(Failure::Invalid("--points must be positive".into()));
            }
            let mut rows = Vec::with_capacity(points);
            for i in 0..points {
                let theta = 2.0 * PI * (i as f64 + offset) / points as f64;
                match k_at(Complex64::from_polar(1.0, theta), &p) {
                    Ok(k) => {
                        let (lo, _) = k.hermitian_eigenvalues();
                        rows.push(WeightRow {
                            theta,
                            k11: k.get(0, 0).re,
                            k12_re: k.get(0, 1).re,
                            k12_im: k.get(0, 1).im,
                            k22: k.get(1, 1).re,
                            det: k.det().re,
                            min_eig: lo,
                        });
                    }
                    Err(Error::OnMirror { .. }) => {
                        let _ = writeln!(stderr, "notice: theta = {theta} lies on a mirror line; row skipped");
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let bytes = match common.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => to_csv(&rows)?,
            };
            emit(&common, &bytes, stdout)?;
            Ok(0)
        }
        Command::Verify { common, nodes, level, seed, samples, sample_points, tol_override, timings } => {
            common.params()?;
            if nodes == 0 || level == 0 || level > 20 {
                return Err(Failure::Invalid("--nodes must be positive and --level in 1..=20".into()));
            }
            let cfg = VerifyConfig {
                m: common.m,
                ell: common.ell,
                kappa: common.kappa,
                degree: common.degree,
                nodes,
                level,
                seed,
                samples,
                points: sample_points,
                tol_override,
                timings,
            };
            let report = verify::run(&cfg)?;
            for line in report.summary_lines() {
                let _ = writeln!(stderr, "{line}");
            }
            let _ = writeln!(stderr, "{}", if report.pass { "verify: all checks as expected" } else { "verify: FAILED" });
            let bytes = match common.format {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    let rows: Vec<CheckCsvRow> = report
                        .checks
                        .iter()
                        .map(|c| CheckCsvRow {
                            name: &c.name,
                            status: c.status(),
                            computed: c.computed,
                            expected: c.expected,
                            abs_err: c.abs_err,
                            rel_err: c.rel_err,
                            tolerance: c.tolerance,
                        })
                        .collect();
                    to_csv(&rows)?
                }
            };
            emit(&common, &bytes, stdout)?;
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn component_name(t: &Term) -> &'static str {
    match t.component {
        crate::polyalg::Component::T => "t",
        crate::polyalg::Component::Tbar => "tbar",
    }
}

/// Degree 0 carries the constants `t`, `tbar`; higher degrees the four harmonics.
pub fn basis_entries(p: &Params, degree: usize, style: BasisStyle) -> Result<Vec<BasisEntry>, Error> {
    let mut out = vec![
        BasisEntry { degree: 0, label: "t".into(), terms: VectorPoly::t().terms() },
        BasisEntry { degree: 0, label: "tbar".into(), terms: VectorPoly::tbar().terms() },
    ];
    for n in 1..=degree {
        for (l, f) in degree_basis_labeled(n, p, style)? {
            out.push(BasisEntry { degree: n, label: l.to_string(), terms: f.terms() });
        }
    }
    Ok(out)
}

/// Every orthogonal-style label plus `f_n` at exceptional degrees.
pub fn norm_rows(p: &Params, degree: usize) -> Result<Vec<NormRow>, Error> {
    let mut rows = Vec::new();
    for n in 1..=degree {
        let mut labels = degree_labels(n, p, BasisStyle::Orthogonal);
        for family in [1u8, 2] {
            if is_exceptional(family, n, p) {
                labels.push(BasisLabel::F { family, n });
            }
        }
        for l in labels {
            let f = l.build(p)?;
            let computed = pairing(&f, &f, p)?;
            let closed = closed_norm(&l, p)?;
            rows.push(NormRow {
                label: l.to_string(),
                family: l.family(),
                degree: n,
                exceptional: is_exceptional(l.family(), n, p),
                closed,
                computed: computed.re,
                rel_err: (computed - closed).norm() / closed.abs(),
            });
        }
    }
    Ok(rows)
}

pub fn gram_output(p: &Params, degree: usize, style: BasisStyle, form: GramForm, nodes: usize) -> Result<GramOutput, Error> {
    let mut labels = Vec::new();
    let mut polys = Vec::new();
    for n in 1..=degree {
        for (l, f) in degree_basis_labeled(n, p, style)? {
            labels.push(l.to_string());
            polys.push(f);
        }
    }
    let g = match form {
        GramForm::Algebraic => gram(&polys, labels, p, FormKind::Algebraic)?,
        GramForm::Gaussian => gram(&polys, labels, p, FormKind::Gaussian)?,
        GramForm::Quadrature => {
            let table = KernelTable::new(p, &AngularRule::new(p.m, nodes.max(1)))?;
            GramMatrix { labels, entries: table.gaussian_gram(&polys) }
        }
    };
    let form = match form {
        GramForm::Algebraic => "algebraic",
        GramForm::Gaussian => "gaussian",
        GramForm::Quadrature => "quadrature",
    };
    Ok(GramOutput {
        form: form.into(),
        normalized_eigenvalues: g.normalized_eigenvalues(),
        positive_definite: g.is_positive_definite(0.0),
        labels: g.labels,
        entries: g.entries,
    })
}

fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>, Failure> {
    let mut s = serde_json::to_vec_pretty(v).map_err(|e| Failure::Io(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Failure::Io(e.to_string()))
}

fn emit(common: &Common, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    match &common.output {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(bytes).map_err(|e| Failure::Io(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let mut full = vec!["dunkl"];
        full.extend_from_slice(args);
        let code = run(full, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn basis_contains_zt() {
        let (code, out, _) = call(&["basis", "--m", "3", "--ell", "1", "--kappa", "0.25", "--degree", "2", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let p1 = v.as_array().unwrap().iter().find(|e| e["label"] == "p1_1").unwrap();
        let want = serde_json::json!({"a": 1, "b": 0, "component": "t", "re": 1.0, "im": 0.0});
        assert!(p1["terms"].as_array().unwrap().contains(&want));
    }

    #[test]
    fn degree_zero_is_constants() {
        let (code, out, _) = call(&["basis", "--degree", "0"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let labels: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["label"].as_str().unwrap()).collect();
        assert_eq!(labels, ["t", "tbar"]);
    }

    #[test]
    fn validation_exit_codes() {
        let (code, _, err) = call(&["basis", "--kappa", "0.6"]);
        assert_eq!(code, 2);
        assert!(err.contains("< 1/2"), "{err}");
        assert_eq!(call(&["norms", "--m", "2"]).0, 2);
        assert_eq!(call(&["norms", "--m", "5", "--ell", "3"]).0, 2);
        assert_eq!(call(&["nonsense"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn norms_rows() {
        let (code, out, _) = call(&["norms", "--m", "3", "--ell", "1", "--kappa", "0.0", "--degree", "4"]);
        assert_eq!(code, 0);
        let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
        for r in &rows {
            let n = r["degree"].as_u64().unwrap();
            let base = 2f64.powi(n as i32 + 1) * (1..=n).product::<u64>() as f64;
            let closed = r["closed"].as_f64().unwrap();
            if r["label"].as_str().unwrap().starts_with('p') && !r["label"].as_str().unwrap().contains('+') && !r["label"].as_str().unwrap().contains(" - ") {
                assert_eq!(closed, base);
            }
            assert!(r["rel_err"].as_f64().unwrap() <= 1e-12);
        }
        assert!(rows.iter().any(|r| r["label"].as_str().unwrap().contains('+')));
    }

    #[test]
    fn weight_grid_skips_walls() {
        let (code, out, err) = call(&["weight", "--m", "3", "--kappa", "0", "--points", "12", "--offset", "0"]);
        assert_eq!(code, 0);
        assert!(err.contains("mirror"));
        let rows: Vec<WeightRow> = serde_json::from_str::<Vec<serde_json::Value>>(&out)
            .unwrap()
            .into_iter()
            .map(|v| WeightRow {
                theta: v["theta"].as_f64().unwrap(),
                k11: v["k11"].as_f64().unwrap(),
                k12_re: v["k12_re"].as_f64().unwrap(),
                k12_im: v["k12_im"].as_f64().unwrap(),
                k22: v["k22"].as_f64().unwrap(),
                det: v["det"].as_f64().unwrap(),
                min_eig: v["min_eig"].as_f64().unwrap(),
            })
            .collect();
        assert_eq!(rows.len(), 6);
        for r in rows {
            // kappa = 0: K^C = B (I / 2 pi) B* = I / pi
            assert!((r.k11 - 1.0 / PI).abs() < 1e-14 && r.k12_re.abs() < 1e-14 && r.k12_im.abs() < 1e-14);
        }
    }

    #[test]
    fn csv_views() {
        let (code, out, _) = call(&["gram", "--degree", "2", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("row,col,re,im"));
        let (code, out, _) = call(&["weight", "--format", "csv", "--points", "4"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("theta,k11,k12_re,k12_im,k22,det,min_eig"));
    }
}
