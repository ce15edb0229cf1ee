//! ETT-style multivariate series: CSV ingestion, chronological splits,
//! per-feature normalization and sliding windows.

use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime, TimeDelta};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::Matrix;

/// Feature columns of an ETT file, in canonical order.
pub const ETT_FEATURES: [&str; 7] = ["HUFL", "HULL", "MUFL", "MULL", "LUFL", "LULL", "OT"];

pub const DATE_COLUMN: &str = "date";

const WRITE_FORMAT: &str = "%Y-%m-%d %H:%M:%S";
const READ_FORMATS: [&str; 4] = ["%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M"];

/// Timestamped rows of named features.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSeries {
    pub timestamps: Vec<NaiveDateTime>,
    pub names: Vec<String>,
    /// `T × names.len()`.
    pub features: Matrix,
    /// Rows dropped at ingestion because a cell failed to parse.
    pub rejected_rows: usize,
}

impl RawSeries {
    /// Builds a series, checking shapes and strictly increasing timestamps.
    pub fn new(timestamps: Vec<NaiveDateTime>, names: Vec<String>, features: Matrix) -> Result<Self> {
        if features.rows() != timestamps.len() || features.cols() != names.len() {
            return Err(Error::Shape {
                op: "series",
                left: features.shape(),
                right: (timestamps.len(), names.len()),
            });
        }
        check_increasing(&timestamps)?;
        Ok(Self {
            timestamps,
            names,
            features,
            rejected_rows: 0,
        })
    }

    /// Series on a uniform grid starting at `start` with spacing `step`.
    pub fn uniform(start: NaiveDateTime, step: TimeDelta, names: Vec<String>, features: Matrix) -> Result<Self> {
        let timestamps = (0..features.rows()).map(|i| start + step * i as i32).collect();
        Self::new(timestamps, names, features)
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    /// Rows `start..end` as a new series.
    pub fn slice(&self, start: usize, end: usize) -> RawSeries {
        RawSeries {
            timestamps: self.timestamps[start..end].to_vec(),
            names: self.names.clone(),
            features: self.features.slice_rows(start, end),
            rejected_rows: 0,
        }
    }
}

fn check_increasing(ts: &[NaiveDateTime]) -> Result<()> {
    for (i, w) in ts.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::Data(format!(
                "timestamps not strictly increasing at row {} ({} after {})",
                i + 1,
                w[1],
                w[0]
            )));
        }
    }
    Ok(())
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    READ_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .or_else(|| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().and_then(|d| d.and_hms_opt(0, 0, 0)))
}

/// Reads an ETT CSV. Columns are located by header name and returned in
/// canonical [`ETT_FEATURES`] order. Rows with a malformed cell are dropped
/// and counted in `rejected_rows`.
///
/// Spacing must be uniform; when rows were dropped, gaps that are whole
/// multiples of the base step are tolerated.
pub fn load_csv(path: impl AsRef<Path>) -> Result<RawSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file).map_err(|e| e.context(format!("reading {}", path.display())))
}

pub fn read_csv(reader: impl std::io::Read) -> Result<RawSeries> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();

    let find = |name: &str| header.iter().position(|h| h == name);
    let date_col = find(DATE_COLUMN).ok_or_else(|| Error::Schema(format!("missing column '{DATE_COLUMN}'")))?;
    let mut cols = Vec::with_capacity(ETT_FEATURES.len());
    for name in ETT_FEATURES {
        cols.push(find(name).ok_or_else(|| Error::Schema(format!("missing column '{name}'")))?);
    }
    if let Some(extra) = header.iter().find(|h| *h != DATE_COLUMN && !ETT_FEATURES.contains(&h.as_str())) {
        return Err(Error::Schema(format!("unexpected column '{extra}'")));
    }
    if header.len() != ETT_FEATURES.len() + 1 {
        return Err(Error::Schema("duplicate columns in header".into()));
    }

    let mut timestamps = Vec::new();
    let mut data = Vec::new();
    let mut rejected = 0;
    let mut row = Vec::with_capacity(cols.len());
    for record in rdr.records() {
        let record = record?;
        if record.len() != header.len() {
            rejected += 1;
            continue;
        }
        let Some(ts) = parse_timestamp(&record[date_col]) else {
            rejected += 1;
            continue;
        };
        row.clear();
        for &c in &cols {
            match record[c].parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => break,
            }
        }
        if row.len() != cols.len() {
            rejected += 1;
            continue;
        }
        timestamps.push(ts);
        data.extend_from_slice(&row);
    }
    if timestamps.is_empty() {
        return Err(Error::Data("no valid data rows".into()));
    }
    check_increasing(&timestamps)?;
    check_spacing(&timestamps, rejected > 0)?;

    let features = Matrix::from_vec(timestamps.len(), cols.len(), data)?;
    Ok(RawSeries {
        timestamps,
        names: ETT_FEATURES.iter().map(|s| s.to_string()).collect(),
        features,
        rejected_rows: rejected,
    })
}

fn check_spacing(ts: &[NaiveDateTime], allow_gaps: bool) -> Result<()> {
    let Some(step) = ts.windows(2).map(|w| w[1] - w[0]).min() else {
        return Ok(());
    };
    let step_s = step.num_seconds();
    for (i, w) in ts.windows(2).enumerate() {
        let d = (w[1] - w[0]).num_seconds();
        let ok = if allow_gaps { step_s > 0 && d % step_s == 0 } else { d == step_s };
        if !ok {
            return Err(Error::Data(format!(
                "non-uniform spacing at row {}: {}s after a {}s step",
                i + 1,
                d,
                step_s
            )));
        }
    }
    Ok(())
}

/// Writes a series with a `date` column followed by its feature names.
/// Floats use shortest round-trip formatting, so reloading is bit-exact.
pub fn save_csv(series: &RawSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header = vec![DATE_COLUMN.to_string()];
    header.extend(series.names.iter().cloned());
    w.write_record(&header)?;
    let mut rec = Vec::with_capacity(header.len());
    for (i, ts) in series.timestamps.iter().enumerate() {
        rec.clear();
        rec.push(ts.format(WRITE_FORMAT).to_string());
        rec.extend(series.features.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Month-based chronological split, with a month taken as
/// `T / span_months` rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitPolicy {
    pub train_months: usize,
    pub val_months: usize,
    pub test_months: usize,
    pub span_months: usize,
}

impl Default for SplitPolicy {
    fn default() -> Self {
        Self {
            train_months: 16,
            val_months: 4,
            test_months: 4,
            span_months: 24,
        }
    }
}

/// Row ranges `[start, end)` of the three splits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRanges {
    pub train: (usize, usize),
    pub val: (usize, usize),
    pub test: (usize, usize),
}

impl SplitPolicy {
    pub fn ranges(&self, total: usize) -> Result<SplitRanges> {
        let used = self.train_months + self.val_months + self.test_months;
        if self.span_months == 0 || used > self.span_months || self.train_months == 0 {
            return Err(Error::Config(format!(
                "split policy {}/{}/{} of {} months is inconsistent",
                self.train_months, self.val_months, self.test_months, self.span_months
            )));
        }
        if total < self.span_months {
            return Err(Error::Data(format!(
                "series of {total} rows is shorter than the {}-month policy span",
                self.span_months
            )));
        }
        let at = |months: usize| total * months / self.span_months;
        let a = at(self.train_months);
        let b = at(self.train_months + self.val_months);
        let c = at(used);
        let ranges = SplitRanges {
            train: (0, a),
            val: (a, b),
            test: (b, c),
        };
        for (name, months, (s, e)) in [
            ("train", self.train_months, ranges.train),
            ("val", self.val_months, ranges.val),
            ("test", self.test_months, ranges.test),
        ] {
            if months > 0 && e == s {
                return Err(Error::Data(format!(
                    "series of {total} rows is too short for a {months}-month {name} split"
                )));
            }
        }
        Ok(ranges)
    }
}

pub fn split_chronological(series: &RawSeries, policy: &SplitPolicy) -> Result<(RawSeries, RawSeries, RawSeries)> {
    let r = policy.ranges(series.len())?;
    Ok((
        series.slice(r.train.0, r.train.1),
        series.slice(r.val.0, r.val.1),
        series.slice(r.test.0, r.test.1),
    ))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Zscore,
    MinMax,
}

/// Per-feature affine map `(x - shift) / scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub method: Normalization,
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
}

/// Lower bound on the per-feature scale.
pub const SCALE_FLOOR: f64 = 1e-8;

impl NormStats {
    /// Statistics of the columns of `train`. Z-score uses the population
    /// standard deviation; min-max maps the train range onto [0, 1].
    pub fn fit(train: &Matrix, method: Normalization) -> Result<Self> {
        if train.rows() == 0 {
            return Err(Error::Data("cannot fit normalization on an empty split".into()));
        }
        let n = train.rows() as f64;
        let cols = train.cols();
        let (shift, scale) = match method {
            Normalization::Zscore => {
                let mean: Vec<f64> = train.column_sums().iter().map(|s| s / n).collect();
                let mut var = vec![0.0; cols];
                for r in train.iter_rows() {
                    for c in 0..cols {
                        var[c] += (r[c] - mean[c]).powi(2);
                    }
                }
                let std = var.iter().map(|v| (v / n).sqrt().max(SCALE_FLOOR)).collect();
                (mean, std)
            }
            Normalization::MinMax => {
                let mut lo = vec![f64::INFINITY; cols];
                let mut hi = vec![f64::NEG_INFINITY; cols];
                for r in train.iter_rows() {
                    for c in 0..cols {
                        lo[c] = lo[c].min(r[c]);
                        hi[c] = hi[c].max(r[c]);
                    }
                }
                let range = lo.iter().zip(&hi).map(|(l, h)| (h - l).max(SCALE_FLOOR)).collect();
                (lo, range)
            }
        };
        Ok(Self { method, shift, scale })
    }

    fn check(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.shift.len() {
            return Err(Error::Shape {
                op: "normalize",
                left: x.shape(),
                right: (1, self.shift.len()),
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        self.check(x)?;
        let mut out = x.clone();
        for r in 0..out.rows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = (*v - self.shift[c]) / self.scale[c];
            }
        }
        Ok(out)
    }

    pub fn denormalize(&self, x: &Matrix) -> Result<Matrix> {
        self.check(x)?;
        let mut out = x.clone();
        for r in 0..out.rows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = *v * self.scale[c] + self.shift[c];
            }
        }
        Ok(out)
    }
}

/// Fits statistics on `train` only and applies them to all three splits.
pub fn normalize(
    train: &Matrix,
    val: &Matrix,
    test: &Matrix,
    method: Normalization,
) -> Result<(NormStats, Matrix, Matrix, Matrix)> {
    let stats = NormStats::fit(train, method)?;
    let (a, b, c) = (stats.apply(train)?, stats.apply(val)?, stats.apply(test)?);
    Ok((stats, a, b, c))
}

/// Layout tag for flattened history windows.
pub const INPUT_LAYOUT: &str = "timestep-major: x[t * n_features + f]";

/// Supervised pairs cut from one split.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedSeries {
    /// `N × (history · F)`, timestep-major.
    pub x: Matrix,
    /// `N × (horizon · F)`, timestep-major.
    pub y: Matrix,
    pub history: usize,
    pub horizon: usize,
    pub n_features: usize,
}

impl WindowedSeries {
    pub fn len(&self) -> usize {
        self.x.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.rows() == 0
    }
}

/// Number of windows a split of `t` rows yields.
pub fn window_count(t: usize, history: usize, horizon: usize) -> usize {
    (t + 1).saturating_sub(history + horizon)
}

/// Every `(history, horizon)` pair in `rows`, ordered by start index.
/// Window `i` takes rows `i..i+history` as input and the next `horizon`
/// rows as target.
pub fn window(rows: &Matrix, history: usize, horizon: usize) -> Result<WindowedSeries> {
    if history == 0 || horizon == 0 {
        return Err(Error::Config("history and horizon must be positive".into()));
    }
    let need = history + horizon;
    let t = rows.rows();
    if t < need {
        return Err(Error::Data(format!(
            "split has {t} rows, windowing needs at least {need} ({history} history + {horizon} horizon)"
        )));
    }
    let f = rows.cols();
    let n = window_count(t, history, horizon);
    let src = rows.as_slice();
    let mut x = Vec::with_capacity(n * history * f);
    let mut y = Vec::with_capacity(n * horizon * f);
    for i in 0..n {
        x.extend_from_slice(&src[i * f..(i + history) * f]);
        y.extend_from_slice(&src[(i + history) * f..(i + need) * f]);
    }
    Ok(WindowedSeries {
        x: Matrix::from_vec(n, history * f, x)?,
        y: Matrix::from_vec(n, horizon * f, y)?,
        history,
        horizon,
        n_features: f,
    })
}
