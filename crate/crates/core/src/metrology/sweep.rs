//! Parallel parameter sweeps with an append-only JSON-lines checkpoint.
//!
//! Points are evaluated independently; rows are returned in input order
//! whatever the completion order. A checkpoint written by an interrupted run
//! is reused on restart for every row whose index and parameters match.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::FitResult;
use crate::{Error, Result};

/// Serializes non-finite floats as strings so they survive JSON.
pub mod lossless_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("invalid number {other:?}"))),
            },
        }
    }
}

/// Named parameter values of one sweep point.
pub type Params = Vec<(String, f64)>;

/// What a sweep task reports for its point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub t_star: f64,
    #[serde(with = "lossless_f64")]
    pub delta_omega_star: f64,
    pub diverged: bool,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub params: Params,
    #[serde(with = "lossless_f64")]
    pub t_star: f64,
    #[serde(with = "lossless_f64")]
    pub delta_omega_star: f64,
    pub diverged: bool,
    pub seed: Option<u64>,
    /// Failure message; the numeric fields are NaN when set.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub rows: Vec<SweepRow>,
    pub fits: Vec<(String, FitResult)>,
}

impl SweepRecord {
    pub fn ok_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.is_ok())
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    pub checkpoint: Option<PathBuf>,
}

fn load_checkpoint(path: &PathBuf) -> Result<HashMap<usize, SweepRow>> {
    let mut rows = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(rows),
        Err(e) => return Err(e.into()),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // a torn final line from an interrupted run is skipped
        if let Ok(row) = serde_json::from_str::<SweepRow>(&line) {
            rows.insert(row.index, row);
        }
    }
    Ok(rows)
}

fn terminate_last_line(f: &mut File) -> Result<()> {
    use std::io::{Read, Seek, SeekFrom};
    let len = f.metadata()?.len();
    if len == 0 {
        return Ok(());
    }
    f.seek(SeekFrom::Start(len - 1))?;
    let mut last = [0u8; 1];
    f.read_exact(&mut last)?;
    if last[0] != b'\n' {
        f.write_all(b"\n")?;
    }
    Ok(())
}

pub fn sweep<F>(points: &[Params], options: &SweepOptions, task: F) -> Result<SweepRecord>
where
    F: Fn(usize, &Params) -> Result<SweepOutcome> + Sync,
{
    let done = match &options.checkpoint {
        Some(p) => load_checkpoint(p)?,
        None => HashMap::new(),
    };
    let writer = match &options.checkpoint {
        Some(p) => {
            let mut f = OpenOptions::new().create(true).read(true).append(true).open(p)?;
            terminate_last_line(&mut f)?;
            Some(Mutex::new(f))
        }
        None => None,
    };
    let run = || -> Result<Vec<SweepRow>> {
        points
            .par_iter()
            .enumerate()
            .map(|(index, params)| {
                if let Some(row) = done.get(&index) {
                    if &row.params == params {
                        return Ok(row.clone());
                    }
                }
                let row = match task(index, params) {
                    Ok(o) => SweepRow {
                        index,
                        params: params.clone(),
                        t_star: o.t_star,
                        delta_omega_star: o.delta_omega_star,
                        diverged: o.diverged,
                        seed: o.seed,
                        error: None,
                    },
                    Err(e) => SweepRow {
                        index,
                        params: params.clone(),
                        t_star: f64::NAN,
                        delta_omega_star: f64::NAN,
                        diverged: false,
                        seed: None,
                        error: Some(e.to_string()),
                    },
                };
                if let Some(w) = &writer {
                    let mut line = serde_json::to_string(&row)?;
                    line.push('\n');
                    let mut f = w.lock().expect("checkpoint writer poisoned");
                    f.write_all(line.as_bytes())?;
                    f.flush()?;
                }
                Ok(row)
            })
            .collect()
    };
    let rows = match options.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok(SweepRecord { rows, fits: Vec::new() })
}

/// Cartesian product of named axes, last axis fastest.
pub fn grid(axes: &[(&str, Vec<f64>)]) -> Vec<Params> {
    let mut out: Vec<Params> = vec![Vec::new()];
    for (name, values) in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((name.to_string(), v));
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(_: usize, p: &Params) -> Result<SweepOutcome> {
        let x = p[0].1;
        if x < 0.0 {
            return Err(Error::InvalidParameter("negative".into()));
        }
        Ok(SweepOutcome {
            t_star: 1.0 / (x + 0.1),
            delta_omega_star: if x == 0.0 { f64::INFINITY } else { x.sqrt() / 3.0 },
            diverged: x == 0.0,
            seed: Some(7),
        })
    }

    #[test]
    fn resumed_sweep_matches_uninterrupted() {
        let points = grid(&[("x", vec![0.0, 0.3, -1.0, 1.7, 2.9])]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let full = sweep(&points, &SweepOptions::default(), task).unwrap();
        // simulate an interruption after two rows with a torn third line
        let partial = sweep(
            &points[..2],
            &SweepOptions { jobs: Some(1), checkpoint: Some(path.clone()) },
            task,
        )
        .unwrap();
        assert_eq!(partial.rows.len(), 2);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"index\": 2, \"par").unwrap();
        let resumed = sweep(
            &points,
            &SweepOptions { jobs: Some(2), checkpoint: Some(path) },
            |i, p| {
                assert!(i >= 2, "point {i} should come from the checkpoint");
                task(i, p)
            },
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&full).unwrap(),
            serde_json::to_string(&resumed).unwrap()
        );
        assert!(resumed.rows[2].error.is_some());
        assert!(resumed.rows[0].delta_omega_star.is_infinite());
    }

    #[test]
    fn grid_order() {
        let g = grid(&[("a", vec![1.0, 2.0]), ("b", vec![3.0, 4.0, 5.0])]);
        assert_eq!(g.len(), 6);
        assert_eq!(g[1], vec![("a".to_string(), 1.0), ("b".to_string(), 4.0)]);
    }
}
