//! Matrix Market ingestion and export, run configuration and the JSON/CSV
//! report files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::{spectral_summary, BoundReport, ProblemOptions, SaddleProblem, SpectralSummary, DEFAULT_ANGLE_TOL};
use crate::error::{Error, Result};
use crate::harness::{
    Certification, SweepResult, DEFAULT_CERT_SLACK, DEFAULT_GRID_MAX, DEFAULT_GRID_MIN, DEFAULT_GRID_POINTS,
    DEFAULT_SIZE_CAP,
};
use crate::linalg::{default_rel_tol, RectMatrix, SymmetricMatrix};
use crate::problems::GeneratorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmLayout {
    Coordinate,
    Array,
}

/// A dense matrix read from a Matrix Market file.
#[derive(Debug, Clone, PartialEq)]
pub struct MmMatrix {
    pub matrix: DMatrix<f64>,
    /// The file declared `symmetric` storage.
    pub symmetric: bool,
}

fn parse_err(path: &str, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Parses real/integer `coordinate` or `array` data in `general` or
/// `symmetric` storage. `label` names the source in error messages.
pub fn parse_matrix_market(text: &str, label: &str) -> Result<MmMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(label, 1, 1, "empty file"))?;
    let head = tokens(header);
    if head.len() != 5 || !head[0].1.eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(parse_err(
            label,
            hline,
            1,
            "expected header `%%MatrixMarket matrix <format> <field> <symmetry>`",
        ));
    }
    if !head[1].1.eq_ignore_ascii_case("matrix") {
        return Err(parse_err(label, hline, head[1].0, "only `matrix` objects are supported"));
    }
    let layout = match head[2].1.to_ascii_lowercase().as_str() {
        "coordinate" => MmLayout::Coordinate,
        "array" => MmLayout::Array,
        other => return Err(parse_err(label, hline, head[2].0, format!("unknown format `{other}`"))),
    };
    match head[3].1.to_ascii_lowercase().as_str() {
        "real" | "integer" | "double" => {}
        other => {
            return Err(parse_err(
                label,
                hline,
                head[3].0,
                format!("unsupported field `{other}` (need real or integer)"),
            ))
        }
    }
    let symmetric = match head[4].1.to_ascii_lowercase().as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_err(
                label,
                hline,
                head[4].0,
                format!("unsupported symmetry `{other}` (need general or symmetric)"),
            ))
        }
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim_start();
        !t.is_empty() && !t.starts_with('%')
    });

    let (sline, size) = data
        .next()
        .ok_or_else(|| parse_err(label, hline + 1, 1, "missing size line"))?;
    let size_toks = tokens(size);
    let want = if layout == MmLayout::Coordinate { 3 } else { 2 };
    if size_toks.len() != want {
        return Err(parse_err(label, sline, 1, format!("size line needs {want} integers")));
    }
    let mut dims = [0usize; 3];
    for (k, (col, tok)) in size_toks.iter().enumerate() {
        dims[k] = tok
            .parse()
            .map_err(|_| parse_err(label, sline, *col, format!("invalid integer `{tok}`")))?;
    }
    let (rows, cols) = (dims[0], dims[1]);
    if symmetric && rows != cols {
        return Err(parse_err(label, sline, 1, "symmetric storage requires a square matrix"));
    }

    let parse_value = |line: usize, col: usize, tok: &str| -> Result<f64> {
        let v: f64 = tok
            .parse()
            .map_err(|_| parse_err(label, line, col, format!("invalid number `{tok}`")))?;
        if !v.is_finite() {
            return Err(parse_err(label, line, col, "non-finite value"));
        }
        Ok(v)
    };

    let mut matrix = DMatrix::zeros(rows, cols);
    match layout {
        MmLayout::Coordinate => {
            let nnz = dims[2];
            let mut seen = 0;
            for (ln, line) in data {
                let toks = tokens(line);
                if toks.len() != 3 {
                    return Err(parse_err(label, ln, 1, "coordinate entry needs `row col value`"));
                }
                let mut idx = [0usize; 2];
                for k in 0..2 {
                    let (col, tok) = toks[k];
                    let v: usize = tok
                        .parse()
                        .map_err(|_| parse_err(label, ln, col, format!("invalid index `{tok}`")))?;
                    let bound = if k == 0 { rows } else { cols };
                    if v == 0 || v > bound {
                        return Err(parse_err(label, ln, col, format!("index {v} outside 1..={bound}")));
                    }
                    idx[k] = v - 1;
                }
                let v = parse_value(ln, toks[2].0, toks[2].1)?;
                let (i, j) = (idx[0], idx[1]);
                if symmetric && j > i {
                    return Err(parse_err(
                        label,
                        ln,
                        toks[1].0,
                        "symmetric storage lists the lower triangle only",
                    ));
                }
                matrix[(i, j)] += v;
                if symmetric && i != j {
                    matrix[(j, i)] += v;
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(
                    label,
                    sline,
                    size_toks[2].0,
                    format!("declared {nnz} entries, found {seen}"),
                ));
            }
        }
        MmLayout::Array => {
            // Column-major; symmetric files store the lower triangle.
            let slots: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| {
                    let start = if symmetric { j } else { 0 };
                    (start..rows).map(move |i| (i, j))
                })
                .collect();
            let mut k = 0;
            for (ln, line) in data {
                for (col, tok) in tokens(line) {
                    let Some(&(i, j)) = slots.get(k) else {
                        return Err(parse_err(label, ln, col, "more values than the declared size"));
                    };
                    let v = parse_value(ln, col, tok)?;
                    matrix[(i, j)] = v;
                    if symmetric {
                        matrix[(j, i)] = v;
                    }
                    k += 1;
                }
            }
            if k != slots.len() {
                return Err(parse_err(
                    label,
                    sline,
                    1,
                    format!("declared {} values, found {k}", slots.len()),
                ));
            }
        }
    }
    Ok(MmMatrix { matrix, symmetric })
}

pub fn read_matrix_market(path: &Path) -> Result<MmMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text, &path.display().to_string())
}

/// Coordinate-format text with shortest round-trip values; symmetric
/// storage writes the lower triangle. Exact zeros are omitted.
pub fn to_matrix_market(matrix: &DMatrix<f64>, symmetric: bool) -> String {
    let (rows, cols) = matrix.shape();
    let mut entries = Vec::new();
    for j in 0..cols {
        let start = if symmetric { j } else { 0 };
        for i in start..rows {
            let v = matrix[(i, j)];
            if v != 0.0 {
                entries.push((i + 1, j + 1, v));
            }
        }
    }
    let mut out = String::new();
    let sym = if symmetric { "symmetric" } else { "general" };
    let _ = writeln!(out, "%%MatrixMarket matrix coordinate real {sym}");
    let _ = writeln!(out, "{rows} {cols} {}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{i} {j} {v:e}");
    }
    out
}

pub fn write_matrix_market(path: &Path, matrix: &DMatrix<f64>, symmetric: bool) -> Result<()> {
    fs::write(path, to_matrix_market(matrix, symmetric)).map_err(|e| Error::io(path, e))
}

/// Where a problem's matrices come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemFileSet {
    Blocks { a: PathBuf, b: PathBuf },
    /// A pre-assembled `K` split after row/column `n`.
    Assembled { k: PathBuf, n: usize },
}

fn structure(invariant: &'static str, message: impl Into<String>) -> Error {
    Error::Structure {
        invariant,
        message: message.into(),
    }
}

/// Maps validation failures onto the named structural invariant.
fn as_structure_error(e: Error) -> Error {
    match e {
        Error::RankDeficientB { .. } => structure("rank", e.to_string()),
        Error::SingularK { .. } => structure("nonsingular-K", e.to_string()),
        Error::NotPositiveSemidefinite { .. } => structure("psd", e.to_string()),
        Error::NotSymmetric { .. } => structure("symmetry", e.to_string()),
        Error::DimensionMismatch(msg) => structure("dimensions", msg),
        other => other,
    }
}

/// Splits an assembled `K` into `(A, B)` after checking the zero (2,2) block
/// and the transpose relation between the off-diagonal blocks.
pub fn split_assembled(k: &DMatrix<f64>, n: usize, rel_tol: Option<f64>) -> Result<(SymmetricMatrix, RectMatrix)> {
    if !k.is_square() {
        return Err(structure("dimensions", format!("K is {}x{}, not square", k.nrows(), k.ncols())));
    }
    let total = k.nrows();
    if n == 0 || n >= total {
        return Err(structure("dimensions", format!("split index n = {n} must lie in 1..{total}")));
    }
    let m = total - n;
    let tol = rel_tol.unwrap_or_else(|| default_rel_tol(total)) * k.norm();
    let corner = k.view((n, n), (m, m)).amax();
    if corner > tol {
        return Err(structure(
            "zero-block",
            format!("(2,2) block has entry of magnitude {corner:e} > {tol:e}"),
        ));
    }
    let upper = k.view((0, n), (n, m)).transpose();
    let lower = k.view((n, 0), (m, n));
    let mismatch = (upper - lower).amax();
    if mismatch > tol {
        return Err(structure(
            "transpose-blocks",
            format!("off-diagonal blocks differ from transposes by {mismatch:e} > {tol:e}"),
        ));
    }
    let a = SymmetricMatrix::new(k.view((0, 0), (n, n)).into_owned()).map_err(as_structure_error)?;
    let b = RectMatrix::new(lower.into_owned())?;
    Ok((a, b))
}

pub fn read_problem(fs: &ProblemFileSet, opts: ProblemOptions) -> Result<SaddleProblem> {
    let (a, b) = match fs {
        ProblemFileSet::Blocks { a, b } => {
            let am = read_matrix_market(a)?;
            let bm = read_matrix_market(b)?;
            let a = SymmetricMatrix::new(am.matrix).map_err(as_structure_error)?;
            (a, RectMatrix::new(bm.matrix)?)
        }
        ProblemFileSet::Assembled { k, n } => {
            let km = read_matrix_market(k)?;
            split_assembled(&km.matrix, *n, opts.rel_tol)?
        }
    };
    SaddleProblem::with_options(a, b, opts).map_err(as_structure_error)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            min: DEFAULT_GRID_MIN,
            max: DEFAULT_GRID_MAX,
            points: DEFAULT_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    /// `None` selects `(n + m) * eps`.
    pub rel_tol: Option<f64>,
    pub angle_tol: f64,
    pub cert_slack: f64,
    pub grid: GridSpec,
    pub format: OutputFormat,
    pub seed: Option<u64>,
    pub size_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            rel_tol: None,
            angle_tol: DEFAULT_ANGLE_TOL,
            cert_slack: DEFAULT_CERT_SLACK,
            grid: GridSpec::default(),
            format: OutputFormat::Json,
            seed: None,
            size_cap: DEFAULT_SIZE_CAP,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !self.rel_tol.is_none_or(positive) || !positive(self.angle_tol) || !positive(self.cert_slack) {
            return Err(Error::ParameterOutOfRange("tolerances must be positive".into()));
        }
        if !(self.grid.min > 0.0 && self.grid.min < self.grid.max) || self.grid.points == 0 {
            return Err(Error::ParameterOutOfRange(format!(
                "gamma grid needs 0 < min < max and points > 0, got {:?}",
                self.grid
            )));
        }
        Ok(())
    }

    pub fn problem_options(&self) -> ProblemOptions {
        ProblemOptions {
            rel_tol: self.rel_tol,
            angle_tol: self.angle_tol,
            strict_psd: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemSource {
    Generated { spec: GeneratorSpec },
    Files { files: ProblemFileSet },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProblemInfo {
    pub source: ProblemSource,
    pub n: usize,
    pub m: usize,
    pub lowest_rank: bool,
    pub rel_tol: f64,
    pub angle_tol: f64,
    pub summary: SpectralSummary,
}

impl ProblemInfo {
    pub fn new(source: ProblemSource, p: &SaddleProblem) -> Self {
        Self {
            source,
            n: p.n(),
            m: p.m(),
            lowest_rank: p.is_lowest_rank(),
            rel_tol: p.rel_tol(),
            angle_tol: p.angle_tol(),
            summary: spectral_summary(p),
        }
    }
}

/// The JSON report written for `bound` and `sweep` runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportEnvelope {
    pub problem: ProblemInfo,
    pub config: RunConfig,
    pub bounds: Vec<BoundReport>,
    /// Absent when `n + m` exceeds the oracle size cap.
    pub certification: Option<Vec<Certification>>,
    pub sweep: Option<SweepResult>,
}

impl ReportEnvelope {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub const BOUNDS_CSV_HEADER: &str = "name,value,status,slack,warnings";

/// One line per bound; certification columns are empty without an oracle.
pub fn bounds_csv(bounds: &[BoundReport], certs: Option<&[Certification]>) -> String {
    let mut out = String::from(BOUNDS_CSV_HEADER);
    out.push('\n');
    for (i, r) in bounds.iter().enumerate() {
        let cert = certs.and_then(|c| c.get(i));
        let status = cert
            .and_then(|c| serde_json::to_value(c.status).ok())
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let slack = cert.map(|c| format!("{:.16e}", c.slack)).unwrap_or_default();
        let warnings: Vec<String> = r
            .warnings
            .iter()
            .filter_map(|w| serde_json::to_value(w).ok().and_then(|v| v.as_str().map(str::to_owned)))
            .collect();
        let _ = writeln!(
            out,
            "{},{:.16e},{},{},{}",
            r.name.as_str(),
            r.lower_bound(),
            status,
            slack,
            warnings.join(";")
        );
    }
    out
}

/// Writes `report.json`, plus `sweep.csv` when a sweep is present and
/// `bounds.csv` for CSV output. Returns the written paths.
pub fn write_report(out_dir: &Path, envelope: &ReportEnvelope, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, contents: String| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    put("report.json", envelope.to_json()?)?;
    if let Some(sweep) = &envelope.sweep {
        put("sweep.csv", sweep.to_csv())?;
    }
    if format == OutputFormat::Csv {
        put(
            "bounds.csv",
            bounds_csv(&envelope.bounds, envelope.certification.as_deref()),
        )?;
    }
    Ok(written)
}
