//! File formats and the end-to-end runs behind the `rn-spectra` binary.
//!
//! Input is a two-column tab-separated `x f` file; lines starting with `|`
//! are comments. Every output file is tab-separated with LF endings and
//! starts with `|` comment lines. Reals are written with 17 significant
//! digits so outputs are byte-stable and re-parse to identical values.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::{dual_form_gap, Analysis};
use crate::error::{Error, Result};
use crate::models::{gen_multistage_exp, gen_runge, gen_two_stage, StageSpec};
use crate::moments::{DxMode, PairKind, Timeserie};
use crate::orthopoly::{Family, MAX_DIMENSION};

pub const RN_INTERPOLATED: &str = "RN_interpolated.dat";
pub const EV_RN_INTERPOLATED: &str = "EV_RN_interpolated.dat";

/// Interpolation files whose columns must agree to this scaled tolerance.
pub const DUAL_FORM_TOL: f64 = 1e-8;

/// Spectrum files in output order.
pub const SPECTRUM_FILES: [(PairKind, &str); 4] = [
    (PairKind::Value, "QQf_QQ_spectrum.dat"),
    (PairKind::Derivative, "QQdf_QQ_spectrum.dat"),
    (PairKind::DerivativeByParts, "QQdfbyparts_QQ_spectrum.dat"),
    (PairKind::RelaxRate, "QQdf_QQf_spectrum.dat"),
];

const INTERPOLATION_COLUMNS: &str =
    "x\tf_orig\tf_RN\tf_LS\tdf_RN\tdf_LS\tdf_RN_byparts\tdf_LS_byparts";

/// Fixed-width real formatting shared by every output file.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn parse_timeserie(path: &Path) -> Result<Timeserie> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_timeserie_str(&text, path)
}

/// Parses file contents; `path` is only used in error messages.
pub fn parse_timeserie_str(text: &str, path: &Path) -> Result<Timeserie> {
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.starts_with('|') || line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let mut next = |name: &str| -> Result<f64> {
            let raw = fields
                .next()
                .ok_or_else(|| parse_err(lineno, format!("missing {name} column")))?
                .trim();
            raw.parse::<f64>()
                .map_err(|e| parse_err(lineno, format!("bad {name} value {raw:?}: {e}")))
        };
        let x = next("x")?;
        let f = next("f")?;
        if let Some(&prev) = xs.last() {
            if x < prev {
                return Err(parse_err(lineno, format!("x decreases ({prev} then {x})")));
            }
        }
        xs.push(x);
        fs.push(f);
    }
    Timeserie::new(xs, fs)
}

pub fn write_timeserie(mut w: impl Write, ts: &Timeserie, header: &str) -> std::io::Result<()> {
    let mut out = String::with_capacity(ts.len() * 50);
    writeln!(out, "| {header}").unwrap();
    for (x, f) in ts.xs().iter().zip(ts.fs()) {
        writeln!(out, "{}\t{}", format_real(*x), format_real(*f)).unwrap();
    }
    w.write_all(out.as_bytes())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub n: usize,
    pub dx_mode: DxMode,
    pub basis: Family,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_DIMENSION {
            return Err(Error::InvalidDimension {
                n: self.n,
                max: MAX_DIMENSION,
            });
        }
        Ok(())
    }

    fn header(&self) -> String {
        let name = self
            .input_path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let dx = match self.dx_mode {
            DxMode::SampleDX => "sample",
            DxMode::AnalyticalDX => "analytical",
        };
        format!("input={name} n={} dx={dx} basis={}", self.n, self.basis)
    }
}

/// What a run produced, for reporting.
#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub files: Vec<PathBuf>,
    /// Scaled max difference between the two interpolation files.
    pub dual_form_discrepancy: f64,
    /// Relative max difference between direct and by-parts derivative moments.
    pub byparts_discrepancy: f64,
    /// Pencils whose right-hand matrix was indefinite.
    pub defective: Vec<PairKind>,
}

/// Reads the input, runs the analysis and writes the six output files.
pub fn run_analysis(cfg: &RunConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let ts = parse_timeserie(&cfg.input_path)?;
    let analysis = Analysis::new(&ts, cfg.basis, cfg.n, cfg.dx_mode)?;
    fs::create_dir_all(&cfg.output_dir).map_err(|source| Error::Io {
        path: cfg.output_dir.clone(),
        source,
    })?;

    let header = cfg.header();
    let direct: Vec<_> = ts
        .xs()
        .iter()
        .map(|&x| analysis.interpolate_direct(x))
        .collect();
    let eigen: Vec<_> = ts
        .xs()
        .iter()
        .map(|&x| analysis.interpolate_eigenbasis(x))
        .collect();

    let mut files = Vec::new();
    for (name, rows) in [(RN_INTERPOLATED, &direct), (EV_RN_INTERPOLATED, &eigen)] {
        let mut out = format!("| {header}\n| {INTERPOLATION_COLUMNS}\n");
        for (r, f) in rows.iter().zip(ts.fs()) {
            write!(out, "{}\t{}", format_real(r.x), format_real(*f)).unwrap();
            for v in r.values() {
                write!(out, "\t{}", format_real(v)).unwrap();
            }
            out.push('\n');
        }
        files.push(write_file(&cfg.output_dir, name, &out)?);
    }

    let mut defective = Vec::new();
    for (kind, name) in SPECTRUM_FILES {
        if analysis.spectrum(kind).is_some_and(|s| s.defective) {
            defective.push(kind);
        }
        let mut out = format!("| {header} pair={kind:?}\n| index\tlambda\tx_est\n");
        for (i, lambda, x_est) in analysis.spectrum_table(kind) {
            writeln!(out, "{i}\t{}\t{}", format_real(lambda), format_real(x_est)).unwrap();
        }
        files.push(write_file(&cfg.output_dir, name, &out)?);
    }

    let dual_form_discrepancy = dual_form_gap(&direct, &eigen);

    Ok(AnalysisReport {
        files,
        dual_form_discrepancy,
        byparts_discrepancy: analysis.moments.byparts_discrepancy(),
        defective,
    })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Model signal to write as an input file.
#[derive(Clone, Debug, PartialEq)]
pub enum Fixture {
    TwoStage(StageSpec),
    MultiExp(StageSpec),
    Runge(usize),
}

impl Fixture {
    pub fn generate(&self) -> Result<Timeserie> {
        match self {
            Fixture::TwoStage(s) => gen_two_stage(s),
            Fixture::MultiExp(s) => gen_multistage_exp(s),
            Fixture::Runge(m) => gen_runge(*m),
        }
    }

    pub fn header(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Fixture::TwoStage(s) | Fixture::MultiExp(s) => format!(
                "{} rates={} lengths={} step={}",
                if matches!(self, Fixture::TwoStage(_)) {
                    "two-stage"
                } else {
                    "multi-exp"
                },
                list(&s.rates),
                list(&s.lengths),
                s.step
            ),
            Fixture::Runge(m) => format!("runge count={m}"),
        }
    }
}

/// Writes a fixture to `path`, or to stdout when `path` is `None`.
pub fn gen_fixture(fixture: &Fixture, path: Option<&Path>) -> Result<Timeserie> {
    let ts = fixture.generate()?;
    let header = fixture.header();
    match path {
        Some(p) => {
            let file = fs::File::create(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            write_timeserie(std::io::BufWriter::new(file), &ts, &header)
        }
        None => write_timeserie(std::io::stdout().lock(), &ts, &header),
    }
    .map_err(|source| Error::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    })?;
    Ok(ts)
}
