//! CSV form of a [`Trajectory`]: header `t,x1,...,xn[,v1,...,vn]`, one row
//! per sample, every number with 17 significant digits.

use std::io::{Read, Write};

use crate::dynamics::Trajectory;
use crate::error::TrajectoryIoError;
use crate::parse::indexed_name;

/// Round-trip formatting used for every number the toolkit writes to CSV.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the trajectory, optionally followed by per-sample `eym` and `jls`
/// columns.
pub fn write_csv<W: Write>(
    traj: &Trajectory,
    observables: Option<&[(f64, f64)]>,
    out: W,
) -> Result<(), TrajectoryIoError> {
    let n = traj.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    if traj.vs.is_some() {
        header.extend((1..=n).map(|i| format!("v{i}")));
    }
    if observables.is_some() {
        header.push("eym".into());
        header.push("jls".into());
    }
    w.write_record(&header)?;
    for k in 0..traj.len() {
        let mut row = Vec::with_capacity(header.len());
        row.push(fmt_f64(traj.times[k]));
        row.extend(traj.xs[k].iter().map(|v| fmt_f64(*v)));
        if let Some(vs) = &traj.vs {
            row.extend(vs[k].iter().map(|v| fmt_f64(*v)));
        }
        if let Some(obs) = observables {
            row.push(fmt_f64(obs[k].0));
            row.push(fmt_f64(obs[k].1));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trajectory written by [`write_csv`] (or by hand). Columns other
/// than `t`, `x<i>` and `v<i>` are ignored.
pub fn read_csv<R: Read>(input: R) -> Result<Trajectory, TrajectoryIoError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers()?.clone();
    let mut t_col = None;
    let mut x_cols: Vec<(usize, usize)> = Vec::new();
    let mut v_cols: Vec<(usize, usize)> = Vec::new();
    for (col, name) in header.iter().enumerate() {
        if name == "t" {
            t_col = Some(col);
        } else if let Some(Ok(i)) = indexed_name(name, 'x') {
            x_cols.push((i, col));
        } else if let Some(Ok(i)) = indexed_name(name, 'v') {
            v_cols.push((i, col));
        }
    }
    let t_col = t_col.ok_or_else(|| TrajectoryIoError::Format("missing `t` column".into()))?;
    let x_cols = contiguous(x_cols, 'x')?;
    if x_cols.is_empty() {
        return Err(TrajectoryIoError::Format("no `x1..xn` columns".into()));
    }
    let v_cols = contiguous(v_cols, 'v')?;
    if !v_cols.is_empty() && v_cols.len() != x_cols.len() {
        return Err(TrajectoryIoError::Format(format!(
            "{} velocity columns for {} position columns",
            v_cols.len(),
            x_cols.len()
        )));
    }

    let mut times = Vec::new();
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (row_idx, record) in r.records().enumerate() {
        let record = record?;
        let cell = |col: usize| -> Result<f64, TrajectoryIoError> {
            let raw = record.get(col).unwrap_or("");
            let v: f64 = raw
                .parse()
                .map_err(|_| TrajectoryIoError::Format(format!("row {}: `{raw}` is not a number", row_idx + 2)))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(TrajectoryIoError::Format(format!(
                    "row {}: non-finite value",
                    row_idx + 2
                )))
            }
        };
        times.push(cell(t_col)?);
        xs.push(x_cols.iter().map(|&c| cell(c)).collect::<Result<Vec<_>, _>>()?);
        if !v_cols.is_empty() {
            vs.push(v_cols.iter().map(|&c| cell(c)).collect::<Result<Vec<_>, _>>()?);
        }
    }
    Ok(Trajectory {
        times,
        xs,
        vs: (!v_cols.is_empty()).then_some(vs),
    })
}

fn contiguous(mut cols: Vec<(usize, usize)>, prefix: char) -> Result<Vec<usize>, TrajectoryIoError> {
    cols.sort();
    for (expected, (i, _)) in (1..).zip(&cols) {
        if *i != expected {
            return Err(TrajectoryIoError::Format(format!(
                "`{prefix}` columns must run {prefix}1..{prefix}n without gaps or repeats"
            )));
        }
    }
    Ok(cols.into_iter().map(|(_, c)| c).collect())
}
