//! CSV datasets with columns `time, delta, covariate` (optionally `id`), the
//! bundled larynx-cancer data, and Weibull QQ-plot coordinates.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::{CensoredSample, Observation};

const LARYNX_CSV: &str = include_str!("../data/larynx.csv");

/// A loaded sample, keeping row identifiers when the file has an `id` column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub sample: CensoredSample,
    pub ids: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub uncensored: usize,
    pub covariate_median: f64,
    /// Sample standard deviation (divisor `n - 1`); `None` for a single row.
    pub covariate_sd: Option<f64>,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

pub fn sample_sd(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Some((ss / (n - 1.0)).sqrt())
}

impl Dataset {
    pub fn summary(&self) -> DatasetSummary {
        let xs: Vec<f64> = self.sample.covariates().collect();
        DatasetSummary {
            n: self.sample.len(),
            uncensored: self.sample.uncensored_count(),
            covariate_median: median(&xs).expect("sample is nonempty"),
            covariate_sd: sample_sd(&xs),
        }
    }

    /// Writes the dataset with header `[id,]time,delta,covariate`. Floats use
    /// the shortest representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        match &self.ids {
            Some(_) => w.write_record(["id", "time", "delta", "covariate"]),
            None => w.write_record(["time", "delta", "covariate"]),
        }
        .map_err(io)?;
        for (i, o) in self.sample.observations().iter().enumerate() {
            let mut rec = Vec::with_capacity(4);
            if let Some(ids) = &self.ids {
                rec.push(ids[i].clone());
            }
            rec.push(o.z.to_string());
            rec.push(if o.delta { "1" } else { "0" }.to_string());
            rec.push(o.x.to_string());
            w.write_record(&rec).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name))
}

fn parse_number(field: &str, name: &str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_error(line, format!("{name}: cannot parse {field:?} as a number")))
}

/// Parses a dataset from any reader. Unknown columns are ignored; every row
/// must have as many fields as the header.
pub fn parse_csv<R: Read>(input: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| parse_error(1, e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Err(Error::EmptyFile);
    }
    let find = |name: &str| {
        column(&headers, name).ok_or_else(|| parse_error(1, format!("missing required column `{name}`")))
    };
    let (t_col, d_col, x_col) = (find("time")?, find("delta")?, find("covariate")?);
    let id_col = column(&headers, "id");

    let mut observations = Vec::new();
    let mut ids = id_col.map(|_| Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let z = parse_number(&rec[t_col], "time", line)?;
        let x = parse_number(&rec[x_col], "covariate", line)?;
        let delta = match rec[d_col].trim() {
            "1" => true,
            "0" => false,
            other => return Err(parse_error(line, format!("delta must be 0 or 1, got {other:?}"))),
        };
        let obs = Observation::new(x, z, delta).map_err(|e| parse_error(line, e.to_string()))?;
        observations.push(obs);
        if let (Some(ids), Some(c)) = (ids.as_mut(), id_col) {
            ids.push(rec[c].trim().to_string());
        }
    }
    if observations.is_empty() {
        return Err(Error::EmptyFile);
    }
    Ok(Dataset { sample: CensoredSample::new(observations)?, ids })
}

pub fn load_csv(path: &Path) -> Result<Dataset> {
    let bytes = fs::read(path)?;
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(Error::EmptyFile);
    }
    parse_csv(bytes.as_slice())
}

/// The larynx-cancer data: 90 patients, age at diagnosis as covariate.
pub fn larynx() -> Dataset {
    parse_csv(LARYNX_CSV.as_bytes()).expect("bundled dataset parses")
}

pub fn larynx_csv() -> &'static str {
    LARYNX_CSV
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    /// `log log(n / i)`
    pub u: f64,
    /// `log Z_{n-i+1,n}`
    pub v: f64,
}

/// Weibull QQ-plot coordinates for the top `k` observed times, `i = 1..=k`.
pub fn qq_points(sample: &CensoredSample, k: usize) -> Result<Vec<QqPoint>> {
    let n = sample.len();
    if k < 1 || k >= n {
        return Err(Error::InvalidK { k, available: n });
    }
    let nf = n as f64;
    Ok(sample
        .iter_sorted()
        .rev()
        .take(k)
        .enumerate()
        .map(|(i, o)| QqPoint { u: (nf / (i + 1) as f64).ln().ln(), v: o.z.ln() })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn larynx_summary() {
        let d = larynx();
        let s = d.summary();
        assert_eq!((s.n, s.uncensored), (90, 50));
        assert_eq!(s.covariate_median, 65.0);
        let sd = s.covariate_sd.unwrap();
        assert!((s.covariate_median - sd - 54.20).abs() < 0.05);
        assert!((s.covariate_median + sd - 75.80).abs() < 0.05);
        assert_eq!(d.ids.as_ref().unwrap()[0], "1");
    }

    #[test]
    fn single_row_has_no_sd() {
        let d = parse_csv("time,delta,covariate\n2.5,1,40\n".as_bytes()).unwrap();
        let s = d.summary();
        assert_eq!(s.n, 1);
        assert_eq!(s.covariate_median, 40.0);
        assert_eq!(s.covariate_sd, None);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "time,delta,covariate\n1,1,3\n2,x,4\n";
        assert_eq!(
            parse_csv(bad.as_bytes()).unwrap_err(),
            Error::Parse { line: 3, message: "delta must be 0 or 1, got \"x\"".into() }
        );
        let neg = "time,delta,covariate\n1,1,3\n2,1,4\n-1,0,2\n";
        assert!(matches!(parse_csv(neg.as_bytes()), Err(Error::Parse { line: 4, .. })));
        let ragged = "time,delta,covariate\n1,1,3\n2,1\n";
        assert!(matches!(parse_csv(ragged.as_bytes()), Err(Error::Parse { line: 3, .. })));
        let missing = "time,covariate\n1,3\n";
        assert!(matches!(parse_csv(missing.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(parse_csv("".as_bytes()).unwrap_err(), Error::EmptyFile);
        assert_eq!(parse_csv("time,delta,covariate\n".as_bytes()).unwrap_err(), Error::EmptyFile);
    }

    #[test]
    fn extra_columns_ignored_in_any_order() {
        let d = parse_csv("note,covariate,delta,time\nabc,3.5,0,7\n".as_bytes()).unwrap();
        assert_eq!(*d.sample.get(0), Observation { x: 3.5, z: 7.0, delta: false });
        assert_eq!(d.ids, None);
    }

    #[test]
    fn write_then_read_round_trips() {
        let d = larynx();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(parse_csv(buf.as_slice()).unwrap(), d);

        let odd = CensoredSample::from_columns(
            &[0.1 + 0.2, -1e-300, 1.0 / 3.0],
            &[std::f64::consts::PI, 5e-324, 1e300],
            &[true, false, true],
        )
        .unwrap();
        let d = Dataset { sample: odd, ids: None };
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(parse_csv(buf.as_slice()).unwrap(), d);
    }

    #[test]
    fn qq_examples() {
        let d = larynx();
        let pts = qq_points(&d.sample, 54).unwrap();
        assert_eq!(pts.len(), 54);
        assert_eq!(pts[0].u, 90f64.ln().ln());
        assert_eq!(pts[0].v, 10.7f64.ln());
        assert!(pts.windows(2).all(|w| w[1].u < w[0].u && w[1].v <= w[0].v));

        let ten: Vec<f64> = (1..=10).map(f64::from).collect();
        let s = CensoredSample::from_columns(&ten, &ten, &[true; 10]).unwrap();
        assert!((qq_points(&s, 1).unwrap()[0].u - 0.83403).abs() < 1e-5);
        assert!(qq_points(&s, 10).is_err());
        assert!(qq_points(&s, 0).is_err());
    }
}
