//! Wall-clock scaling of the ladder over a geometric grid of targets.
//!
//! This only gathers evidence about how run time grows with the target
//! precision. The fitted log-log slope is a sanity figure, not a bound.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::corrector::{run_ladder, TruncationPolicy};
use crate::error::{Error, Result};

pub const MIN_BENCH_BITS: u64 = 1 << 10;

/// Repeat a grid point until this much time has been spent on it.
const MIN_SAMPLE_TIME: Duration = Duration::from_millis(30);
const MAX_REPEATS: usize = 5;

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub n_bits: u64,
    pub policy: TruncationPolicy,
    /// Fastest of the repeats.
    pub wall: Duration,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub max_bits: u64,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn series(&self, policy: TruncationPolicy) -> Vec<&BenchRow> {
        self.rows.iter().filter(|r| r.policy == policy).collect()
    }

    /// Times never decrease as `n_bits` grows.
    pub fn is_monotone(&self, policy: TruncationPolicy) -> bool {
        self.series(policy)
            .windows(2)
            .all(|w| w[1].wall >= w[0].wall)
    }

    pub fn total(&self, policy: TruncationPolicy) -> Duration {
        self.series(policy).iter().map(|r| r.wall).sum()
    }

    /// Least-squares slope of `ln t` against `ln n` over the top decade of
    /// the grid (the last two points if the decade holds fewer).
    pub fn top_decade_slope(&self, policy: TruncationPolicy) -> Option<f64> {
        let series = self.series(policy);
        let mut top: Vec<_> = series
            .iter()
            .filter(|r| r.n_bits * 10 >= self.max_bits)
            .collect();
        if top.len() < 2 {
            top = series.iter().rev().take(2).collect();
        }
        if top.len() < 2 {
            return None;
        }
        let pts: Vec<(f64, f64)> = top
            .iter()
            .map(|r| ((r.n_bits as f64).ln(), r.wall.as_secs_f64().max(1e-9).ln()))
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    }

    /// `n_bits,policy,wall_ms`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_bits,policy,wall_ms\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.3}",
                r.n_bits,
                r.policy,
                r.wall.as_secs_f64() * 1e3
            )
            .unwrap();
        }
        out
    }
}

/// `points` targets spaced geometrically from 1024 bits to `max_bits`.
pub fn grid(max_bits: u64, points: usize) -> Result<Vec<u64>> {
    if max_bits < MIN_BENCH_BITS {
        return Err(Error::ArgumentOutOfRange(format!(
            "max_bits must be at least {MIN_BENCH_BITS}"
        )));
    }
    if points < 2 {
        return Err(Error::ArgumentOutOfRange(
            "need at least two grid points".into(),
        ));
    }
    let ratio = (max_bits as f64 / MIN_BENCH_BITS as f64).powf(1.0 / (points - 1) as f64);
    let mut out: Vec<u64> = (0..points)
        .map(|i| (MIN_BENCH_BITS as f64 * ratio.powi(i as i32)).round() as u64)
        .collect();
    *out.last_mut().unwrap() = max_bits;
    out.dedup();
    Ok(out)
}

fn time_ladder(n_bits: u64, policy: TruncationPolicy) -> Duration {
    let mut best = Duration::MAX;
    let mut spent = Duration::ZERO;
    for _ in 0..MAX_REPEATS {
        let start = Instant::now();
        let ladder = run_ladder(n_bits, policy);
        let t = start.elapsed();
        std::hint::black_box(ladder);
        best = best.min(t);
        spent += t;
        if spent >= MIN_SAMPLE_TIME {
            break;
        }
    }
    best
}

/// Times the ladder at every grid point under both policies.
pub fn run(max_bits: u64, points: usize) -> Result<BenchReport> {
    let targets = grid(max_bits, points)?;
    let mut rows = Vec::new();
    for policy in [TruncationPolicy::Third, TruncationPolicy::Full] {
        for &n_bits in &targets {
            rows.push(BenchRow {
                n_bits,
                policy,
                wall: time_ladder(n_bits, policy),
            });
        }
    }
    Ok(BenchReport { max_bits, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        assert_eq!(
            grid(1 << 20, 6).unwrap(),
            vec![1024, 4096, 16384, 65536, 262144, 1 << 20]
        );
        assert_eq!(grid(1024, 3).unwrap(), vec![1024]);
        assert!(grid(512, 4).is_err());
        assert!(grid(4096, 1).is_err());
    }

    #[test]
    fn slope_of_synthetic_quadratic() {
        let rows = [1_000u64, 10_000, 100_000]
            .iter()
            .map(|&n| BenchRow {
                n_bits: n,
                policy: TruncationPolicy::Third,
                wall: Duration::from_nanos(n * n / 1000),
            })
            .collect();
        let report = BenchReport {
            max_bits: 100_000,
            rows,
        };
        let s = report.top_decade_slope(TruncationPolicy::Third).unwrap();
        assert!((s - 2.0).abs() < 1e-6);
        assert!(report.is_monotone(TruncationPolicy::Third));
        assert!(report.top_decade_slope(TruncationPolicy::Full).is_none());
    }
}
