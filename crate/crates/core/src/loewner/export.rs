//! Trajectory CSV: `s, r_t, y_t, xi_1, xi_plus, xi_minus, lambda, defect`.
//!
//! Numbers are written as `{:.16e}` (17 significant digits, so reading and
//! re-writing reproduces the file byte for byte); quantities a run does not
//! have are left empty.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{ThreeSlitTrajectory, Trajectory};
use crate::{Error, Result};

pub const TRAJECTORY_COLUMNS: [&str; 8] = ["s", "r_t", "y_t", "xi_1", "xi_plus", "xi_minus", "lambda", "defect"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub s: f64,
    pub r_t: f64,
    pub y_t: Option<f64>,
    pub xi_1: f64,
    pub xi_plus: Option<f64>,
    pub xi_minus: Option<f64>,
    pub lambda: Option<f64>,
    pub defect: Option<f64>,
}

impl From<&Trajectory> for Vec<TrajectoryRow> {
    fn from(tr: &Trajectory) -> Self {
        tr.states
            .iter()
            .map(|st| TrajectoryRow {
                s: st.t,
                r_t: st.r_t,
                y_t: st.y_t,
                xi_1: st.driving,
                xi_plus: None,
                xi_minus: None,
                lambda: None,
                defect: None,
            })
            .collect()
    }
}

impl From<&ThreeSlitTrajectory> for Vec<TrajectoryRow> {
    fn from(tr: &ThreeSlitTrajectory) -> Self {
        tr.states
            .iter()
            .map(|st| TrajectoryRow {
                s: st.s,
                r_t: st.r_t,
                y_t: Some(st.y_tau),
                xi_1: st.xi_1,
                xi_plus: Some(st.xi_plus),
                xi_minus: Some(st.xi_minus),
                lambda: st.lambda,
                defect: Some(st.defect),
            })
            .collect()
    }
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Domain(format!("I/O error: {io}")),
        other => Error::Domain(format!("malformed trajectory CSV: {other:?}")),
    }
}

pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_COLUMNS)?;
    for r in rows {
        w.write_record([
            format_number(r.s),
            format_number(r.r_t),
            opt(r.y_t),
            format_number(r.xi_1),
            opt(r.xi_plus),
            opt(r.xi_minus),
            opt(r.lambda),
            opt(r.defect),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers().map_err(csv_error)?.clone();
    if headers.iter().ne(TRAJECTORY_COLUMNS.iter().copied()) {
        return Err(Error::Domain(format!("unexpected trajectory header {headers:?}")));
    }
    let num = |field: &str| -> Result<Option<f64>> {
        if field.is_empty() {
            Ok(None)
        } else {
            field
                .parse::<f64>()
                .map(Some)
                .map_err(|e| Error::Domain(format!("bad number {field:?}: {e}")))
        }
    };
    let req = |field: &str| -> Result<f64> {
        num(field)?.ok_or_else(|| Error::Domain("missing required trajectory field".into()))
    };
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_error)?;
        rows.push(TrajectoryRow {
            s: req(&rec[0])?,
            r_t: req(&rec[1])?,
            y_t: num(&rec[2])?,
            xi_1: req(&rec[3])?,
            xi_plus: num(&rec[4])?,
            xi_minus: num(&rec[5])?,
            lambda: num(&rec[6])?,
            defect: num(&rec[7])?,
        });
    }
    Ok(rows)
}
