//! Scaling series and the efficiency factor.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{Engine, EngineConfig, SchedulerMode, TaskContext};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "op,order,density,domain,workers,seconds,efficiency_pct";

/// One row of a scaling series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub op: String,
    pub order: usize,
    pub density: f64,
    pub domain: String,
    pub workers: usize,
    pub seconds: f64,
    pub efficiency_pct: f64,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{:.2}",
            self.op, self.order, self.density, self.domain, self.workers, self.seconds, self.efficiency_pct
        )
    }
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

/// Efficiency of `n` workers taking `t_n` seconds relative to a baseline of
/// `k` workers taking `t_k`: `(t_k * k) / (t_n * n) * 100`. Ideal scaling
/// (`t * workers` constant) gives exactly 100.
pub fn efficiency_factor(t_n: f64, n: usize, t_k: f64, k: usize) -> f64 {
    (t_k * k as f64) / (t_n * n as f64) * 100.0
}

/// What a series measures; copied into every record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesLabel {
    pub op: String,
    pub order: usize,
    pub density: f64,
    pub domain: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub worker_counts: Vec<usize>,
    pub repetitions: usize,
    pub mode: SchedulerMode,
    pub inline_below: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            worker_counts: vec![1, 2, 4, 8],
            repetitions: 3,
            mode: SchedulerMode::Multidispatch,
            inline_below: super::DEFAULT_INLINE_BELOW,
        }
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Runs `op` under every worker count (`repetitions` times each, median wall
/// time) and checks that every run produced the same output before any
/// timing is reported.
pub fn scaling_series<O: PartialEq>(
    label: &SeriesLabel,
    cfg: &SeriesConfig,
    op: impl Fn(&TaskContext) -> Result<O>,
) -> Result<Vec<BenchRecord>> {
    if cfg.worker_counts.is_empty() || cfg.worker_counts.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig("worker counts must be nonempty and ascending".into()));
    }
    if cfg.worker_counts[0] == 0 || cfg.repetitions == 0 {
        return Err(Error::InvalidConfig("worker counts and repetitions must be positive".into()));
    }
    let mut reference: Option<O> = None;
    let mut timings = Vec::with_capacity(cfg.worker_counts.len());
    for &workers in &cfg.worker_counts {
        let engine = Engine::new(EngineConfig::new(workers, cfg.mode).with_inline_below(cfg.inline_below));
        let mut times = Vec::with_capacity(cfg.repetitions);
        for _ in 0..cfg.repetitions {
            let start = Instant::now();
            let out = engine.run(&op)?;
            times.push(start.elapsed().as_secs_f64());
            match &reference {
                None => reference = Some(out),
                Some(r) if *r == out => {}
                Some(_) => {
                    return Err(Error::ResultMismatch { baseline: cfg.worker_counts[0], workers });
                }
            }
        }
        timings.push((workers, median(times)));
    }
    let (k, t_k) = timings[0];
    Ok(timings
        .into_iter()
        .map(|(n, t_n)| BenchRecord {
            op: label.op.clone(),
            order: label.order,
            density: label.density,
            domain: label.domain.clone(),
            workers: n,
            seconds: t_n,
            efficiency_pct: if n == k && t_n == t_k { 100.0 } else { efficiency_factor(t_n, n, t_k, k) },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn efficiency_examples() {
        assert_eq!(efficiency_factor(12.5, 8, 100.0, 1), 100.0);
        assert_eq!(efficiency_factor(25.0, 8, 100.0, 1), 50.0);
        assert_eq!(efficiency_factor(60.0, 2, 60.0, 2), 100.0);
    }

    #[test]
    fn baseline_only_series() {
        let label = SeriesLabel { op: "noop".into(), order: 1, density: 1.0, domain: "int".into() };
        let cfg = SeriesConfig { worker_counts: vec![1], repetitions: 3, ..Default::default() };
        let recs = scaling_series(&label, &cfg, |_| Ok(42)).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].efficiency_pct, 100.0);
        let csv = to_csv(&recs);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn mismatch_is_fatal() {
        let label = SeriesLabel { op: "faulty".into(), order: 1, density: 1.0, domain: "int".into() };
        let cfg = SeriesConfig { worker_counts: vec![1, 2], repetitions: 1, ..Default::default() };
        let err = scaling_series(&label, &cfg, |ctx| Ok(ctx.worker_count())).unwrap_err();
        assert_eq!(err, Error::ResultMismatch { baseline: 1, workers: 2 });
    }

    #[test]
    fn rejects_unsorted_counts() {
        let label = SeriesLabel { op: "x".into(), order: 1, density: 1.0, domain: "int".into() };
        let cfg = SeriesConfig { worker_counts: vec![2, 1], ..Default::default() };
        assert!(matches!(scaling_series(&label, &cfg, |_| Ok(())), Err(Error::InvalidConfig(_))));
    }
}
