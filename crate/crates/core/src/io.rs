//! CSV and JSON files written by the command-line tool.
//!
//! Reals are printed with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::Point3;

/// 17 significant digits in scientific notation.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Path of the JSON sidecar accompanying a CSV file.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes `x,y,z` rows.
pub fn write_points_csv(path: &Path, points: &[Point3]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "z"])?;
    for p in points {
        w.write_record([fmt_real(p.x), fmt_real(p.y), fmt_real(p.z)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `x,y,z,w` rows.
pub fn write_weighted_points_csv(path: &Path, points: &[Point3], weights: &[f64]) -> Result<()> {
    if points.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} weights", points.len()),
            got: format!("{}", weights.len()),
        });
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "z", "w"])?;
    for (p, wt) in points.iter().zip(weights) {
        w.write_record([fmt_real(p.x), fmt_real(p.y), fmt_real(p.z), fmt_real(*wt)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV with header `x,y,z` (extra trailing columns are ignored).
pub fn read_points_csv(path: &Path) -> Result<Vec<Point3>> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let headers = r.headers()?.clone();
    if headers.len() < 3 || &headers[0] != "x" || &headers[1] != "y" || &headers[2] != "z" {
        return Err(Error::InvalidArgument(format!(
            "{}: expected header x,y,z",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut xyz = [0.0; 3];
        for (slot, field) in xyz.iter_mut().zip(rec.iter()) {
            *slot = field.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{}: bad number '{field}'", path.display()))
            })?;
        }
        out.push(Point3::from(xyz));
    }
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_format_round_trips() {
        for v in [
            0.1,
            -1.0 / 3.0,
            1e-300,
            6.123233995736766e-17,
            f64::MAX,
            0.0,
        ] {
            assert_eq!(fmt_real(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn points_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pts.csv");
        let pts = vec![
            Point3::new(0.1, -0.2, 1.0 / 7.0),
            Point3::new(-1.0, 0.0, 1e-17),
        ];
        write_points_csv(&path, &pts).unwrap();
        assert_eq!(read_points_csv(&path).unwrap(), pts);
        assert_eq!(sidecar_path(&path), dir.path().join("pts.json"));
    }

    #[test]
    fn bad_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "a,b,c\n1,2,3\n").unwrap();
        assert!(read_points_csv(&path).is_err());
    }
}
