//! CSV run logs.
//!
//! Header: `algorithm,instance,seed,runtime_seconds,censored,captime_seconds`,
//! optionally followed by `quality`. Times are written with 9 decimals, `inf`
//! for runs that never stop.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::quality::QualitySample;
use crate::scoring::RuntimeSample;
use crate::{Error, ExtendedTime, Result};

pub const HEADER: [&str; 6] = [
    "algorithm",
    "instance",
    "seed",
    "runtime_seconds",
    "censored",
    "captime_seconds",
];
pub const QUALITY_COLUMN: &str = "quality";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub instance: String,
    pub seed: u64,
    pub runtime: ExtendedTime,
    pub censored: bool,
    pub captime: ExtendedTime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<f64>,
}

impl RunRecord {
    pub fn sample(&self) -> RuntimeSample {
        RuntimeSample {
            observed: self.runtime,
            censored: self.censored,
            captime_used: self.captime,
        }
    }

    /// Missing quality means `q1`; censored runs always carry `q0`.
    pub fn quality_sample(&self, q0: f64, q1: f64) -> QualitySample {
        QualitySample {
            runtime: self.runtime,
            quality: if self.censored { q0 } else { self.quality.unwrap_or(q1) },
            censored: self.censored,
            captime_used: self.captime,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunLog {
    pub records: Vec<RunRecord>,
    pub has_quality: bool,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_time(s: &str, line: usize, col: &str) -> Result<ExtendedTime> {
    s.trim()
        .parse::<ExtendedTime>()
        .map_err(|e| parse_err(line, format!("{col}: {e}")))
}

fn parse_bool(s: &str, line: usize) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => Err(parse_err(line, format!("censored: expected true or false, got {other:?}"))),
    }
}

impl RunLog {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
        let mut rows = rdr.records();
        let header = match rows.next() {
            Some(h) => h.map_err(|e| parse_err(1, e.to_string()))?,
            None => return Err(parse_err(1, "empty run log")),
        };
        let cols: Vec<&str> = header.iter().collect();
        let has_quality = if cols == HEADER {
            false
        } else if cols.len() == 7 && cols[..6] == HEADER && cols[6] == QUALITY_COLUMN {
            true
        } else {
            return Err(parse_err(
                1,
                format!("header must be {}[,{QUALITY_COLUMN}], got {}", HEADER.join(","), cols.join(",")),
            ));
        };
        let width = cols.len();
        let mut records = Vec::new();
        for (i, row) in rows.enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| parse_err(line, e.to_string()))?;
            if row.len() == 1 && row[0].trim().is_empty() {
                continue;
            }
            if row.len() != width {
                return Err(parse_err(line, format!("expected {width} fields, got {}", row.len())));
            }
            let seed = row[2]
                .trim()
                .parse::<u64>()
                .map_err(|e| parse_err(line, format!("seed: {e}")))?;
            let runtime = parse_time(&row[3], line, "runtime_seconds")?;
            let censored = parse_bool(&row[4], line)?;
            let captime = parse_time(&row[5], line, "captime_seconds")?;
            let quality = if has_quality && !row[6].trim().is_empty() {
                let q: f64 = row[6]
                    .trim()
                    .parse()
                    .map_err(|e| parse_err(line, format!("quality: {e}")))?;
                if !q.is_finite() {
                    return Err(parse_err(line, "quality must be finite"));
                }
                Some(q)
            } else {
                None
            };
            let rec = RunRecord {
                algorithm: row[0].to_string(),
                instance: row[1].to_string(),
                seed,
                runtime,
                censored,
                captime,
                quality,
            };
            rec.sample().validate().map_err(|e| parse_err(line, e.to_string()))?;
            records.push(rec);
        }
        Ok(RunLog { records, has_quality })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(writer);
        let mut header: Vec<&str> = HEADER.to_vec();
        if self.has_quality {
            header.push(QUALITY_COLUMN);
        }
        w.write_record(&header).map_err(csv_io)?;
        for r in &self.records {
            let mut row = vec![
                r.algorithm.clone(),
                r.instance.clone(),
                r.seed.to_string(),
                r.runtime.to_string(),
                r.censored.to_string(),
                r.captime.to_string(),
            ];
            if self.has_quality {
                row.push(r.quality.map(|q| q.to_string()).unwrap_or_default());
            }
            w.write_record(&row).map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Algorithms in order of first appearance.
    pub fn algorithms(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.algorithm.as_str()) {
                out.push(&r.algorithm);
            }
        }
        out
    }

    pub fn records_of<'a>(&'a self, algorithm: &'a str) -> impl Iterator<Item = &'a RunRecord> + 'a {
        self.records.iter().filter(move |r| r.algorithm == algorithm)
    }

    /// Capped samples grouped per algorithm, in order of first appearance.
    pub fn samples_by_algorithm(&self) -> Vec<(String, Vec<RuntimeSample>)> {
        self.algorithms()
            .into_iter()
            .map(|a| (a.to_string(), self.records_of(a).map(RunRecord::sample).collect()))
            .collect()
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOG: &str = "algorithm,instance,seed,runtime_seconds,censored,captime_seconds\n\
                       a,i1,0,0.500000000,false,2.000000000\n\
                       b,i1,0,2.000000000,true,2.000000000\n\
                       a,i2,1,inf,true,inf\n";

    #[test]
    fn round_trip() {
        let log = RunLog::from_reader(LOG.as_bytes()).unwrap();
        assert_eq!(log.algorithms(), vec!["a", "b"]);
        assert!(log.records[2].runtime.is_infinite());
        let mut out = Vec::new();
        log.write(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), LOG);
    }

    #[test]
    fn bad_header() {
        let e = RunLog::from_reader("algo,instance\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn line_numbers() {
        let bad = format!("{}a,i1,x,1,false,2\n", HEADER.join(",") + "\n");
        assert!(matches!(RunLog::from_reader(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let bad = format!("{}a,i1,0,1,false,2\na,i1,0,1,true,2\n", HEADER.join(",") + "\n");
        assert!(matches!(RunLog::from_reader(bad.as_bytes()), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn quality_column() {
        let s = format!("{},quality\na,i,0,1,false,2,0.7\na,i,1,2,true,2,\n", HEADER.join(","));
        let log = RunLog::from_reader(s.as_bytes()).unwrap();
        assert!(log.has_quality);
        assert_eq!(log.records[0].quality, Some(0.7));
        assert_eq!(log.records[1].quality_sample(0.1, 1.0).quality, 0.1);
    }
}
