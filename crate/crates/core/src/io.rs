//! CSV point clouds.
//!
//! One row per support point with a header `x1,...,xd[,weight]`. Without a
//! `weight` column every point gets weight `1/n`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub measure: DiscreteMeasure,
    /// False when weights were defaulted to uniform.
    pub weighted: bool,
}

pub fn read_csv<R: Read>(reader: R) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e))?.clone();
    let weighted = header.iter().next_back().is_some_and(|h| h.eq_ignore_ascii_case("weight"));
    let dim = header.len() - usize::from(weighted);
    if dim == 0 {
        return Err(Error::Parse { line: 1, message: "header names no coordinate columns".into() });
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::Parse { line, message: format!("expected {} fields, found {}", header.len(), record.len()) });
        }
        for (c, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse { line, message: format!("invalid number {field:?}") })?;
            if !value.is_finite() {
                return Err(Error::Parse { line, message: format!("non-finite value {field:?}") });
            }
            if weighted && c == dim {
                if value < 0.0 {
                    return Err(Error::Parse { line, message: format!("negative weight {value}") });
                }
                weights.push(value);
            } else {
                points.push(value);
            }
        }
    }
    let n = points.len() / dim;
    if n == 0 {
        return Err(Error::Parse { line: 2, message: "no data rows".into() });
    }
    if !weighted {
        weights = vec![1.0 / n as f64; n];
    }
    Ok(PointCloud { measure: DiscreteMeasure::new(dim, points, weights)?, weighted })
}

pub fn read_csv_file(path: &Path) -> Result<PointCloud> {
    let file = std::fs::File::open(path).map_err(|e| Error::Parse { line: 0, message: format!("{}: {e}", path.display()) })?;
    read_csv(std::io::BufReader::new(file))
}

/// Writes `measure` in the CSV format; floats use shortest round-trip form.
pub fn write_csv<W: Write>(measure: &DiscreteMeasure, weighted: bool, writer: W) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=measure.dim()).map(|c| format!("x{c}")).collect();
    if weighted {
        header.push("weight".into());
    }
    wtr.write_record(&header)?;
    for i in 0..measure.len() {
        let mut row: Vec<String> = measure.point(i).iter().map(|x| format!("{x:?}")).collect();
        if weighted {
            row.push(format!("{:?}", measure.weights()[i]));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()
}

fn parse_err(line: u64, e: impl std::fmt::Display) -> Error {
    Error::Parse { line, message: e.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_without_weight_column() {
        let pc = read_csv("x1,x2\n0,1\n2.5,-1e-3\n".as_bytes()).unwrap();
        assert!(!pc.weighted);
        assert_eq!(pc.measure.dim(), 2);
        assert_eq!(pc.measure.points(), &[0.0, 1.0, 2.5, -1e-3]);
        assert_eq!(pc.measure.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn weight_column() {
        let pc = read_csv("x1,weight\n1,0.25\n3,0.75\n".as_bytes()).unwrap();
        assert!(pc.weighted);
        assert_eq!(pc.measure.dim(), 1);
        assert_eq!(pc.measure.weights(), &[0.25, 0.75]);
    }

    #[test]
    fn parse_error_reports_line() {
        let err = read_csv("x1,x2\n0,1\n2,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = read_csv("x1,x2\n0,1\n2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        assert!(matches!(read_csv("x1\n".as_bytes()), Err(Error::Parse { .. })));
        assert!(matches!(read_csv("x1,weight\n1,-2\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn write_then_read() {
        let m = DiscreteMeasure::new(2, vec![0.1, 1.0 / 3.0, -2.0, 5e-300], vec![0.3, 0.7]).unwrap();
        let mut buf = Vec::new();
        write_csv(&m, true, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap().measure, m);
    }
}
