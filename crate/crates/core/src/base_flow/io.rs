//! CSV formats: inflow `Y,u1`; base-flow export `x,y,u0,v0,du0_dy,d2u0_dy2`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::flow::BaseFlow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct InflowRow {
    #[serde(rename = "Y")]
    y: f64,
    u1: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowRow {
    pub x: f64,
    pub y: f64,
    pub u0: f64,
    pub v0: f64,
    pub du0_dy: f64,
    pub d2u0_dy2: f64,
}

pub fn read_inflow_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut y = Vec::new();
    let mut u = Vec::new();
    for row in rdr.deserialize::<InflowRow>() {
        let row = row?;
        y.push(row.y);
        u.push(row.u1);
    }
    if y.is_empty() {
        return Err(Error::invalid(format!("{} has no rows", path.display())));
    }
    Ok((y, u))
}

pub fn write_inflow_csv(path: &Path, y: &[f64], u1: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for (&y, &u1) in y.iter().zip(u1) {
        w.serialize(InflowRow { y, u1 })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_baseflow_csv(path: &Path, flow: &BaseFlow) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for (i, &x) in flow.xgrid.nodes().iter().enumerate() {
        for (j, &y) in flow.ygrid.nodes().iter().enumerate() {
            w.serialize(FlowRow {
                x,
                y,
                u0: flow.u0[i][j],
                v0: flow.v0[i][j],
                du0_dy: flow.du0_dy[i][j],
                d2u0_dy2: flow.d2u0_dy2[i][j],
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_baseflow_csv(path: &Path) -> Result<Vec<FlowRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inflow_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("inflow.csv");
        let y = vec![0.0, 0.5, 1.0];
        let u = vec![0.0, 0.25, 0.5];
        write_inflow_csv(&p, &y, &u).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("Y,u1"));
        assert_eq!(read_inflow_csv(&p).unwrap(), (y, u));
    }
}
