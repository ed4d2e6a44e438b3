//! CSV reading and writing.
//!
//! Files are plain comma-separated text: optional `# key=value` metadata
//! lines, one header line naming the columns, then numeric rows.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::trace::{CovarianceCurve, CurveKind, LaplaceCurve, Trace};

/// Number formatting for written tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    /// 17 significant digits; parses back to the identical double.
    Exact,
    /// 9 significant digits for human-facing summaries.
    Summary,
}

impl Precision {
    fn fmt(self, v: f64) -> String {
        match self {
            Precision::Exact => format!("{v:.16e}"),
            Precision::Summary => format!("{v:.8e}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn column_at(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn write_to<W: Write>(&self, mut w: W, precision: Precision) -> Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&precision.fmt(*v));
            }
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path, precision: Precision) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?), precision)
    }

    pub fn read_from<R: Read>(r: R) -> Result<Table> {
        let mut table = Table::default();
        let mut have_header = false;
        for (i, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    table
                        .meta
                        .push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if !have_header {
                let cols: Vec<String> = trimmed.split(',').map(|c| c.trim().to_string()).collect();
                if cols
                    .iter()
                    .any(|c| c.is_empty() || c.parse::<f64>().is_ok())
                {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "expected a header line naming the columns".into(),
                    });
                }
                table.columns = cols;
                have_header = true;
                continue;
            }
            let row = trimmed
                .split(',')
                .map(|c| {
                    let c = c.trim();
                    c.parse::<f64>().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("not a number: {c:?}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != table.columns.len() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!(
                        "expected {} fields, found {}",
                        table.columns.len(),
                        row.len()
                    ),
                });
            }
            table.rows.push(row);
        }
        if !have_header {
            return Err(Error::Parse {
                line: 0,
                msg: "missing header line".into(),
            });
        }
        Ok(table)
    }

    pub fn read(path: &Path) -> Result<Table> {
        Table::read_from(File::open(path)?)
    }
}

pub fn trace_table(trace: &Trace) -> Table {
    let mut t = Table::new(&["time", "value"]);
    t.meta.push(("dt".into(), format!("{:e}", trace.dt())));
    for (k, v) in &trace.meta {
        if k != "dt" {
            t.meta.push((k.clone(), v.clone()));
        }
    }
    t.rows = trace
        .times()
        .zip(trace.values())
        .map(|(time, v)| vec![time, *v])
        .collect();
    t
}

pub fn write_trace_csv(path: &Path, trace: &Trace) -> Result<()> {
    trace_table(trace).write(path, Precision::Exact)
}

/// Builds a trace from a table with a time column and one value column.
///
/// The step comes from the `dt` metadata when present, otherwise from the
/// time column, which must then be uniform.
pub fn trace_from_table(table: &Table) -> Result<Trace> {
    let parse_err = |msg: String| Error::Parse { line: 0, msg };
    if table.columns.len() < 2 {
        return Err(parse_err(
            "a trace needs a time column and a value column".into(),
        ));
    }
    if table.rows.is_empty() {
        return Err(parse_err("trace file has no samples".into()));
    }
    let times = table.column_at(0);
    let values = table.column_at(1);
    let dt = match table.get_meta("dt") {
        Some(s) => s
            .parse::<f64>()
            .map_err(|_| parse_err(format!("bad dt metadata {s:?}")))?,
        None if times.len() >= 2 => {
            let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
            for (k, w) in times.windows(2).enumerate() {
                if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.abs() {
                    return Err(parse_err(format!(
                        "time column is not uniform near row {}",
                        k + 2
                    )));
                }
            }
            dt
        }
        None => 1.0,
    };
    let mut trace = Trace::with_start(dt, times[0], values)?;
    for (k, v) in &table.meta {
        if k != "dt" {
            trace.meta.insert(k.clone(), v.clone());
        }
    }
    Ok(trace)
}

pub fn read_trace_csv(path: &Path) -> Result<Trace> {
    trace_from_table(&Table::read(path)?)
}

pub fn curve_table(curve: &CovarianceCurve) -> Table {
    let mut cols = vec!["lag", "value"];
    if curve.stderr.is_some() {
        cols.push("stderr");
    }
    let mut t = Table::new(&cols).meta("kind", curve.kind.name());
    for (i, (lag, v)) in curve.lags.iter().zip(&curve.values).enumerate() {
        let mut row = vec![*lag, *v];
        if let Some(se) = &curve.stderr {
            row.push(se[i]);
        }
        t.push(row);
    }
    t
}

/// Reads a `lag,value[,stderr]` table as a covariance curve.
pub fn curve_from_table(table: &Table, kind: CurveKind) -> Result<CovarianceCurve> {
    if table.columns.len() < 2 {
        return Err(Error::Parse {
            line: 0,
            msg: "a curve needs a lag column and a value column".into(),
        });
    }
    let mut c = CovarianceCurve::new(table.column_at(0), table.column_at(1), kind)?;
    if table.columns.len() >= 3 {
        c.stderr = Some(table.column_at(2));
    }
    Ok(c)
}

pub fn laplace_table(curve: &LaplaceCurve) -> Table {
    let mut t = Table::new(&["s", "value"]);
    t.rows = curve
        .s()
        .iter()
        .zip(curve.values())
        .map(|(s, v)| vec![*s, *v])
        .collect();
    t
}
