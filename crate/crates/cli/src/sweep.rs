use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use wdistill::branching::totals;
use wdistill::{CavityParams, Classification, ProtocolKind, WCoefficients};

use crate::coeffs::parse_number;
use crate::report::Analytic;
use crate::CliError;

pub const HEADER: &str = "a2,b2,c2,p_w,p_bell,p_fail,p_w_simulated,max_abs_error";

/// `lo:hi:n`, inclusive, `n ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Range {
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got {s:?}"));
        };
        let n: usize = n.trim().parse().map_err(|_| format!("bad point count in {s:?}"))?;
        if n == 0 {
            return Err(format!("point count must be at least 1 in {s:?}"));
        }
        Ok(Self {
            lo: parse_number(lo)?,
            hi: parse_number(hi)?,
            n,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Grid {
    /// `b²` and `c²` free, `a² = 1 − b² − c²`.
    Plane { b2: Range, c2: Range },
    /// `a = b`, so `a² = b² = (1 − c²)/2`.
    EqualAb { c2: Range },
}

impl Grid {
    /// Grid points inside the ordered region, sorted by `(c², b²)`.
    pub fn coefficients(&self) -> Vec<WCoefficients> {
        let mut pts: Vec<(f64, f64, f64)> = match self {
            Grid::Plane { b2, c2 } => c2
                .points()
                .into_iter()
                .flat_map(|c| b2.points().into_iter().map(move |b| (1.0 - b - c, b, c)))
                .collect(),
            Grid::EqualAb { c2 } => c2
                .points()
                .into_iter()
                .map(|c| ((1.0 - c) / 2.0, (1.0 - c) / 2.0, c))
                .collect(),
        };
        pts.sort_by(|x, y| x.2.total_cmp(&y.2).then(x.1.total_cmp(&y.1)));
        pts.into_iter()
            .filter_map(|(a2, b2, c2)| WCoefficients::from_squares(a2, b2, c2).ok())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    pub analytic: Analytic,
    pub p_w_simulated: f64,
    pub max_abs_error: f64,
}

impl Row {
    pub fn compute(protocol: ProtocolKind, w: &WCoefficients, params: &CavityParams) -> wdistill::Result<Self> {
        let t = totals(&protocol.run(w, params)?);
        let analytic = Analytic::new(protocol, w);
        let want = [analytic.p_w, analytic.p_bell, analytic.p_fail];
        let max_abs_error = Classification::ALL
            .iter()
            .map(|c| (t[c.index()] - want[c.index()]).abs())
            .fold(0.0, f64::max);
        let (a2, b2, c2) = w.squares();
        Ok(Self {
            a2,
            b2,
            c2,
            analytic,
            p_w_simulated: t[Classification::WSuccess.index()],
            max_abs_error,
        })
    }

    fn fields(&self) -> [String; 8] {
        [
            self.a2,
            self.b2,
            self.c2,
            self.analytic.p_w,
            self.analytic.p_bell,
            self.analytic.p_fail,
            self.p_w_simulated,
            self.max_abs_error,
        ]
        .map(|x| format!("{x:.16e}"))
    }
}

pub fn run(protocol: ProtocolKind, grid: &Grid, params: &CavityParams) -> Result<Vec<Row>, CliError> {
    let coeffs = grid.coefficients();
    if coeffs.is_empty() {
        return Err(CliError::Usage("sweep grid is empty after restricting to a >= b >= c".into()));
    }
    coeffs
        .par_iter()
        .map(|w| Row::compute(protocol, w, params))
        .collect::<wdistill::Result<Vec<_>>>()
        .map_err(CliError::Core)
}

pub fn to_csv(rows: &[Row]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(HEADER.split(','))?;
    for row in rows {
        writer.write_record(row.fields())?;
    }
    writer.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
