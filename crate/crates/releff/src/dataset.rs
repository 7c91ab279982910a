//! Data model, CSV ingestion, validation, and empirical summaries.
//!
//! External data come as one CSV row per observation: an outcome column `y`
//! (plus `delta` for survival data) and covariate columns described by a
//! [`CovariateSchema`]. All dataset types are immutable after construction and
//! safe to share across threads.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("column `{0}` is missing from the header")]
    MissingColumn(String),
    #[error("row {row}: outcome {value} outside 1..={k}")]
    BadLevel { row: usize, value: i64, k: usize },
    #[error("row {row}, column `{column}`: value `{value}` is not usable ({reason})")]
    NonFiniteValue {
        row: usize,
        column: String,
        value: String,
        reason: String,
    },
    #[error("file contains no data rows")]
    EmptyFile,
    #[error("row {row}: delta must be 0 or 1, got `{value}`")]
    BadDelta { row: usize, value: String },
    #[error("schema invalid: {0}")]
    BadSchema(String),
    #[error("survival grid must be strictly increasing and positive")]
    BadGrid,
    #[error("survival data must contain at least one event")]
    NoEvents,
    #[error("treatment arm {arm} is empty")]
    EmptyArm { arm: u8 },
    #[error("treatment probability must lie strictly in (0,1), got {0}")]
    BadPi(f64),
    #[error("io error reading `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Kind of a covariate column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnKind {
    /// Categorical with a fixed set of distinct level labels.
    Discrete { levels: Vec<String> },
    Continuous,
}

/// Declares the covariate columns (names and kinds) of a dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovariateSchema {
    pub columns: Vec<(String, ColumnKind)>,
}

impl CovariateSchema {
    pub fn new(columns: Vec<(String, ColumnKind)>) -> Result<Self, DataError> {
        let mut seen = std::collections::HashSet::new();
        for (name, kind) in &columns {
            if !seen.insert(name.clone()) {
                return Err(DataError::BadSchema(format!("duplicate column `{name}`")));
            }
            if let ColumnKind::Discrete { levels } = kind {
                if levels.is_empty() {
                    return Err(DataError::BadSchema(format!(
                        "discrete column `{name}` has no levels"
                    )));
                }
                let distinct: std::collections::HashSet<_> = levels.iter().collect();
                if distinct.len() != levels.len() {
                    return Err(DataError::BadSchema(format!(
                        "discrete column `{name}` has repeated levels"
                    )));
                }
            }
        }
        Ok(CovariateSchema { columns })
    }

    /// Number of covariate columns.
    pub fn d(&self) -> usize {
        self.columns.len()
    }

    /// True when every covariate column is discrete.
    pub fn all_discrete(&self) -> bool {
        self.columns
            .iter()
            .all(|(_, k)| matches!(k, ColumnKind::Discrete { .. }))
    }

    /// Dimension of the one-hot design encoding (reference level dropped per
    /// discrete column, continuous columns passed through).
    pub fn design_dim(&self) -> usize {
        self.columns
            .iter()
            .map(|(_, k)| match k {
                ColumnKind::Discrete { levels } => levels.len() - 1,
                ColumnKind::Continuous => 1,
            })
            .sum()
    }

    /// One-hot design row for a covariate tuple (no intercept column).
    pub fn design_row(&self, w: &[Covariate]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.design_dim());
        for ((_, kind), value) in self.columns.iter().zip(w) {
            match (kind, value) {
                (ColumnKind::Discrete { levels }, Covariate::Discrete(idx)) => {
                    for l in 1..levels.len() {
                        out.push(if *idx == l { 1.0 } else { 0.0 });
                    }
                }
                (ColumnKind::Continuous, Covariate::Continuous(x)) => out.push(*x),
                _ => panic!("covariate tuple does not conform to schema"),
            }
        }
        out
    }

    /// Compact label for the discrete part of a covariate tuple, used to key
    /// strata. Levels are joined with `|` in schema order.
    pub fn stratum_label(&self, w: &[Covariate]) -> String {
        let mut parts = Vec::new();
        for ((_, kind), value) in self.columns.iter().zip(w) {
            if let (ColumnKind::Discrete { levels }, Covariate::Discrete(idx)) = (kind, value) {
                parts.push(levels[*idx].clone());
            }
        }
        parts.join("|")
    }
}

/// One covariate value. Discrete values store the level index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Covariate {
    Discrete(usize),
    Continuous(f64),
}

/// A covariate tuple for one observation.
pub type CovRow = Vec<Covariate>;

/// Identifier of the exact discrete covariate cell of a row. Rows with any
/// continuous covariate cannot be assigned a cell.
pub fn cell_key(w: &[Covariate]) -> Option<Vec<usize>> {
    w.iter()
        .map(|c| match c {
            Covariate::Discrete(i) => Some(*i),
            Covariate::Continuous(_) => None,
        })
        .collect()
}

/// Ordinal outcome data: `y` in `1..=k` plus covariates.
#[derive(Debug, Clone)]
pub struct OrdinalDataset {
    pub k: usize,
    pub schema: Arc<CovariateSchema>,
    pub y: Vec<usize>,
    pub w: Vec<CovRow>,
}

impl OrdinalDataset {
    pub fn new(
        k: usize,
        schema: Arc<CovariateSchema>,
        y: Vec<usize>,
        w: Vec<CovRow>,
    ) -> Result<Self, DataError> {
        if k < 2 {
            return Err(DataError::BadSchema("ordinal K must be >= 2".into()));
        }
        if y.is_empty() {
            return Err(DataError::EmptyFile);
        }
        assert_eq!(y.len(), w.len());
        for (i, &yi) in y.iter().enumerate() {
            if yi < 1 || yi > k {
                return Err(DataError::BadLevel {
                    row: i + 1,
                    value: yi as i64,
                    k,
                });
            }
        }
        Ok(OrdinalDataset { k, schema, y, w })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Subset by row indices (used by sample splitting).
    pub fn subset(&self, idx: &[usize]) -> OrdinalDataset {
        OrdinalDataset {
            k: self.k,
            schema: self.schema.clone(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            w: idx.iter().map(|&i| self.w[i].clone()).collect(),
        }
    }
}

/// Continuous outcome data.
#[derive(Debug, Clone)]
pub struct ContinuousDataset {
    pub schema: Arc<CovariateSchema>,
    pub y: Vec<f64>,
    pub w: Vec<CovRow>,
    /// Observed outcome range, recording the bounded-support assumption.
    pub y_range: (f64, f64),
}

impl ContinuousDataset {
    pub fn new(schema: Arc<CovariateSchema>, y: Vec<f64>, w: Vec<CovRow>) -> Result<Self, DataError> {
        if y.is_empty() {
            return Err(DataError::EmptyFile);
        }
        assert_eq!(y.len(), w.len());
        for (i, &yi) in y.iter().enumerate() {
            if !yi.is_finite() {
                return Err(DataError::NonFiniteValue {
                    row: i + 1,
                    column: "y".into(),
                    value: format!("{yi}"),
                    reason: "outcome must be finite".into(),
                });
            }
        }
        let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(ContinuousDataset {
            schema,
            y,
            w,
            y_range: (lo, hi),
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn subset(&self, idx: &[usize]) -> ContinuousDataset {
        let y: Vec<f64> = idx.iter().map(|&i| self.y[i]).collect();
        let w = idx.iter().map(|&i| self.w[i].clone()).collect();
        ContinuousDataset::new(self.schema.clone(), y, w).expect("subset of valid data")
    }
}

/// Right-censored survival data on a discrete time grid.
///
/// `y` stores the grid index (1-based) of the observed time and `delta` is 1
/// for an event, 0 for censoring.
#[derive(Debug, Clone)]
pub struct SurvivalDataset {
    pub grid: Vec<f64>,
    pub schema: Arc<CovariateSchema>,
    pub y: Vec<usize>,
    pub delta: Vec<u8>,
    pub w: Vec<CovRow>,
}

impl SurvivalDataset {
    pub fn new(
        grid: Vec<f64>,
        schema: Arc<CovariateSchema>,
        y: Vec<usize>,
        delta: Vec<u8>,
        w: Vec<CovRow>,
    ) -> Result<Self, DataError> {
        if grid.is_empty() || grid[0] <= 0.0 || grid.windows(2).any(|p| p[1] <= p[0]) {
            return Err(DataError::BadGrid);
        }
        if y.is_empty() {
            return Err(DataError::EmptyFile);
        }
        let k = grid.len();
        for (i, &yi) in y.iter().enumerate() {
            if yi < 1 || yi > k {
                return Err(DataError::BadLevel {
                    row: i + 1,
                    value: yi as i64,
                    k,
                });
            }
        }
        if !delta.iter().any(|&d| d == 1) {
            return Err(DataError::NoEvents);
        }
        Ok(SurvivalDataset {
            grid,
            schema,
            y,
            delta,
            w,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn k(&self) -> usize {
        self.grid.len()
    }

    /// Grid index for a time value on this grid; `None` if `t` exceeds the
    /// last grid point (beyond the horizon).
    pub fn grid_index_of(&self, t: f64) -> Option<usize> {
        bin_to_grid(&self.grid, t)
    }

    pub fn subset(&self, idx: &[usize]) -> SurvivalDataset {
        SurvivalDataset {
            grid: self.grid.clone(),
            schema: self.schema.clone(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            delta: idx.iter().map(|&i| self.delta[i]).collect(),
            w: idx.iter().map(|&i| self.w[i].clone()).collect(),
        }
    }
}

/// Map a raw time to the smallest grid point >= t (1-based index). A small
/// relative tolerance keeps already-binned times on their own grid point.
pub fn bin_to_grid(grid: &[f64], t: f64) -> Option<usize> {
    let eps = 1e-9 * t.abs().max(1.0);
    grid.iter().position(|&g| t <= g + eps).map(|p| p + 1)
}

/// How the outcome column(s) should be interpreted when loading a CSV.
#[derive(Debug, Clone)]
pub enum OutcomeSpec {
    Ordinal { k: usize },
    Continuous,
    Survival(GridSpec),
}

/// Time grid for survival ingestion: explicit grid points, or a bin width
/// (grid `h, 2h, ...` out to the horizon, defaulting to the largest observed
/// time).
#[derive(Debug, Clone)]
pub enum GridSpec {
    Explicit(Vec<f64>),
    BinWidth { width: f64, horizon: Option<f64> },
}

/// A loaded dataset of any outcome kind.
#[derive(Debug, Clone)]
pub enum Dataset {
    Ordinal(OrdinalDataset),
    Continuous(ContinuousDataset),
    Survival(SurvivalDataset),
}

/// Load a CSV file and validate it against the schema and outcome spec.
///
/// The header must contain `y` (and `delta` for survival) plus every schema
/// column. Validation errors report 1-based data row numbers.
pub fn load_csv(
    path: &Path,
    schema: &CovariateSchema,
    outcome: &OutcomeSpec,
) -> Result<Dataset, DataError> {
    let file = std::fs::File::open(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    let col_index = |name: &str| -> Result<usize, DataError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };

    let y_col = col_index("y")?;
    let delta_col = match outcome {
        OutcomeSpec::Survival(_) => Some(col_index("delta")?),
        _ => None,
    };
    let cov_cols: Vec<usize> = schema
        .columns
        .iter()
        .map(|(name, _)| col_index(name))
        .collect::<Result<_, _>>()?;

    let mut raw_y: Vec<String> = Vec::new();
    let mut raw_delta: Vec<String> = Vec::new();
    let mut covs: Vec<CovRow> = Vec::new();

    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record?;
        raw_y.push(record.get(y_col).unwrap_or("").to_string());
        if let Some(dc) = delta_col {
            raw_delta.push(record.get(dc).unwrap_or("").to_string());
        }
        let mut w = Vec::with_capacity(schema.d());
        for (ci, (name, kind)) in cov_cols.iter().zip(&schema.columns) {
            let raw = record.get(*ci).unwrap_or("").trim();
            match kind {
                ColumnKind::Discrete { levels } => {
                    let idx = levels.iter().position(|l| l == raw).ok_or_else(|| {
                        DataError::NonFiniteValue {
                            row,
                            column: name.clone(),
                            value: raw.to_string(),
                            reason: "not a declared level".into(),
                        }
                    })?;
                    w.push(Covariate::Discrete(idx));
                }
                ColumnKind::Continuous => {
                    let v: f64 = raw.parse().map_err(|_| DataError::NonFiniteValue {
                        row,
                        column: name.clone(),
                        value: raw.to_string(),
                        reason: "not a number".into(),
                    })?;
                    if !v.is_finite() {
                        return Err(DataError::NonFiniteValue {
                            row,
                            column: name.clone(),
                            value: raw.to_string(),
                            reason: "not finite".into(),
                        });
                    }
                    w.push(Covariate::Continuous(v));
                }
            }
        }
        covs.push(w);
    }
    if raw_y.is_empty() {
        return Err(DataError::EmptyFile);
    }

    let schema = Arc::new(schema.clone());
    match outcome {
        OutcomeSpec::Ordinal { k } => {
            let mut y = Vec::with_capacity(raw_y.len());
            for (i, raw) in raw_y.iter().enumerate() {
                let v: i64 = raw.trim().parse().map_err(|_| DataError::NonFiniteValue {
                    row: i + 1,
                    column: "y".into(),
                    value: raw.clone(),
                    reason: "not an integer level".into(),
                })?;
                if v < 1 || v as usize > *k {
                    return Err(DataError::BadLevel {
                        row: i + 1,
                        value: v,
                        k: *k,
                    });
                }
                y.push(v as usize);
            }
            Ok(Dataset::Ordinal(OrdinalDataset::new(*k, schema, y, covs)?))
        }
        OutcomeSpec::Continuous => {
            let mut y = Vec::with_capacity(raw_y.len());
            for (i, raw) in raw_y.iter().enumerate() {
                let v: f64 = raw.trim().parse().map_err(|_| DataError::NonFiniteValue {
                    row: i + 1,
                    column: "y".into(),
                    value: raw.clone(),
                    reason: "not a number".into(),
                })?;
                if !v.is_finite() {
                    return Err(DataError::NonFiniteValue {
                        row: i + 1,
                        column: "y".into(),
                        value: raw.clone(),
                        reason: "not finite".into(),
                    });
                }
                y.push(v);
            }
            Ok(Dataset::Continuous(ContinuousDataset::new(schema, y, covs)?))
        }
        OutcomeSpec::Survival(grid_spec) => {
            let mut times = Vec::with_capacity(raw_y.len());
            for (i, raw) in raw_y.iter().enumerate() {
                let v: f64 = raw.trim().parse().map_err(|_| DataError::NonFiniteValue {
                    row: i + 1,
                    column: "y".into(),
                    value: raw.clone(),
                    reason: "not a number".into(),
                })?;
                if !v.is_finite() || v <= 0.0 {
                    return Err(DataError::NonFiniteValue {
                        row: i + 1,
                        column: "y".into(),
                        value: raw.clone(),
                        reason: "survival time must be positive and finite".into(),
                    });
                }
                times.push(v);
            }
            let mut deltas = Vec::with_capacity(raw_delta.len());
            for (i, raw) in raw_delta.iter().enumerate() {
                match raw.trim() {
                    "0" => deltas.push(0u8),
                    "1" => deltas.push(1u8),
                    other => {
                        return Err(DataError::BadDelta {
                            row: i + 1,
                            value: other.to_string(),
                        })
                    }
                }
            }
            let grid = match grid_spec {
                GridSpec::Explicit(g) => g.clone(),
                GridSpec::BinWidth { width, horizon } => {
                    if *width <= 0.0 {
                        return Err(DataError::BadGrid);
                    }
                    let max_t = horizon.unwrap_or_else(|| {
                        times.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    });
                    let k = ((max_t / width) - 1e-9).ceil().max(1.0) as usize;
                    (1..=k).map(|j| j as f64 * width).collect()
                }
            };
            let (y, delta) = bin_survival(&grid, &times, &deltas);
            Ok(Dataset::Survival(SurvivalDataset::new(
                grid, schema, y, delta, covs,
            )?))
        }
    }
}

/// Bin raw times onto the grid. Times beyond the last grid point are
/// right-censored at the horizon.
pub fn bin_survival(grid: &[f64], times: &[f64], deltas: &[u8]) -> (Vec<usize>, Vec<u8>) {
    let k = grid.len();
    let mut y = Vec::with_capacity(times.len());
    let mut d = Vec::with_capacity(times.len());
    for (&t, &delta) in times.iter().zip(deltas) {
        match bin_to_grid(grid, t) {
            Some(j) => {
                y.push(j);
                d.push(delta);
            }
            None => {
                y.push(k);
                d.push(0);
            }
        }
    }
    (y, d)
}

/// Empirical summary of an ordinal outcome: level frequencies, CDF, and the
/// midrank transform eta(k) = F(k) - p_k/2.
#[derive(Debug, Clone, Serialize)]
pub struct Empirical {
    pub counts: Vec<usize>,
    pub p: Vec<f64>,
    pub f_cdf: Vec<f64>,
    pub eta: Vec<f64>,
}

impl Empirical {
    pub fn k(&self) -> usize {
        self.p.len()
    }
}

/// Empirical summary from raw level data.
pub fn empirical_summary(data: &OrdinalDataset) -> Empirical {
    empirical_from_counts(data.k, &level_counts(data.k, &data.y))
}

pub fn level_counts(k: usize, y: &[usize]) -> Vec<usize> {
    let mut counts = vec![0usize; k];
    for &yi in y {
        counts[yi - 1] += 1;
    }
    counts
}

/// Summary from level counts. The CDF is computed from cumulative counts so
/// that `F(K) = 1` holds exactly.
pub fn empirical_from_counts(k: usize, counts: &[usize]) -> Empirical {
    assert_eq!(counts.len(), k);
    let n: usize = counts.iter().sum();
    let nf = n as f64;
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let mut cum = 0usize;
    let mut f_cdf = Vec::with_capacity(k);
    let mut eta = Vec::with_capacity(k);
    for &c in counts {
        // eta(k) = F(k-1) + p_k / 2, from integer counts for exactness
        eta.push((2 * cum + c) as f64 / (2.0 * nf));
        cum += c;
        f_cdf.push(cum as f64 / nf);
    }
    Empirical {
        counts: counts.to_vec(),
        p,
        f_cdf,
        eta,
    }
}

/// Trial data with an ordinal outcome.
#[derive(Debug, Clone)]
pub struct OrdinalTrial {
    pub k: usize,
    pub schema: Arc<CovariateSchema>,
    pub y: Vec<usize>,
    pub a: Vec<u8>,
    pub w: Vec<CovRow>,
    pub pi: f64,
}

/// Trial data with a continuous outcome.
#[derive(Debug, Clone)]
pub struct ContinuousTrial {
    pub schema: Arc<CovariateSchema>,
    pub y: Vec<f64>,
    pub a: Vec<u8>,
    pub w: Vec<CovRow>,
    pub pi: f64,
}

/// Check the trial preconditions: both arms non-empty and pi in (0,1).
pub fn validate_trial(a: &[u8], pi: f64) -> Result<(), DataError> {
    if !(pi > 0.0 && pi < 1.0) {
        return Err(DataError::BadPi(pi));
    }
    for arm in [0u8, 1u8] {
        if !a.iter().any(|&ai| ai == arm) {
            return Err(DataError::EmptyArm { arm });
        }
    }
    Ok(())
}

/// Group row indices by exact discrete covariate cell. Returns `None` when a
/// continuous covariate is present.
pub fn group_by_cell(w: &[CovRow]) -> Option<HashMap<Vec<usize>, Vec<usize>>> {
    let mut map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (i, row) in w.iter().enumerate() {
        map.entry(cell_key(row)?).or_default().push(i);
    }
    Some(map)
}
