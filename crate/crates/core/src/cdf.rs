//! Empirical CDFs written as `label,value,cumulative_fraction` CSV.

use std::path::Path;

use crate::{Error, Result};

/// Sorted `(value, fraction of samples ≤ value)` steps. Repeated values collapse
/// to a single step at the highest fraction. NaNs are dropped.
pub fn cdf_points(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let fraction = (i + 1) as f64 / n;
        match points.last_mut() {
            Some(last) if last.0 == v => last.1 = fraction,
            _ => points.push((v, fraction)),
        }
    }
    points
}

pub fn write_cdf(values: &[f64], label: &str, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut out = csv::Writer::from_path(path)?;
    out.write_record(["label", "value", "cumulative_fraction"])?;
    for (value, fraction) in cdf_points(values) {
        out.write_record([label, &value.to_string(), &fraction.to_string()])?;
    }
    out.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_collapse_duplicates() {
        assert_eq!(cdf_points(&[0.0, 0.0, 1.0]), vec![(0.0, 2.0 / 3.0), (1.0, 1.0)]);
        assert_eq!(cdf_points(&[0.5, 0.1, 0.5, 0.5]), vec![(0.1, 0.25), (0.5, 1.0)]);
    }

    #[test]
    fn empty_input_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/empty.csv");
        write_cdf(&[], "bce", &path).unwrap();
        assert_eq!(std::fs::read_to_string(path).unwrap(), "label,value,cumulative_fraction\n");
    }

    #[test]
    fn rows_are_labelled() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write_cdf(&[1.0, 0.0, 0.0], "did, words", &path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let rows: Vec<_> = text.lines().skip(1).collect();
        assert_eq!(rows, vec!["\"did, words\",0,0.6666666666666666", "\"did, words\",1,1"]);
    }
}
