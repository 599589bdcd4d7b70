//! OSPA distance, run summaries and quantile statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rfs::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OspaParams {
    pub c: f64,
    pub p: f64,
}

impl Default for OspaParams {
    fn default() -> Self {
        Self { c: 100.0, p: 1.0 }
    }
}

impl OspaParams {
    pub fn new(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0) || !(p >= 1.0) {
            return Err(Error::Config(format!("ospa: need c > 0 and p >= 1, got c={c}, p={p}")));
        }
        Ok(Self { c, p })
    }
}

/// Minimum-cost perfect assignment of rows to columns of a square cost
/// matrix (row-major, `n x n`). Returns `assignment[row] = column`.
pub fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    // potentials method, 1-based with a virtual column 0
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Cut-off distance raised to `p`, on `[x, y]`.
fn cut_cost(a: &[f64; 2], b: &[f64; 2], params: &OspaParams) -> f64 {
    let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    d.min(params.c).powf(params.p)
}

/// OSPA distance between two sets of positions.
pub fn ospa_positions(x: &[[f64; 2]], y: &[[f64; 2]], params: &OspaParams) -> f64 {
    let (small, large) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let (m, n) = (small.len(), large.len());
    if n == 0 {
        return 0.0;
    }
    // pad the small side with dummies at cost c^p
    let cp = params.c.powf(params.p);
    let mut cost = vec![cp; n * n];
    for (i, a) in small.iter().enumerate() {
        for (j, b) in large.iter().enumerate() {
            cost[i * n + j] = cut_cost(a, b, params);
        }
    }
    let assignment = hungarian(&cost, n);
    let total: f64 = assignment.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
    debug_assert!(total >= (n - m) as f64 * cp - 1e-9 * cp.max(1.0));
    (total / n as f64).powf(1.0 / params.p)
}

/// OSPA on the position components of state vectors.
pub fn ospa(x: &[StateVector], y: &[StateVector], params: &OspaParams) -> f64 {
    let pos = |s: &[StateVector]| s.iter().map(|v| [v[0], v[1]]).collect::<Vec<_>>();
    ospa_positions(&pos(x), &pos(y), params)
}

/// Per-scan record of one Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub run_id: u64,
    pub scan: usize,
    pub true_n: usize,
    pub est_n: usize,
    pub ospa: f64,
    pub scan_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub run_id: u64,
    pub ospa: Vec<f64>,
    pub true_n: Vec<usize>,
    pub est_n: Vec<usize>,
    pub scan_ms: Vec<f64>,
}

impl RunSummary {
    pub fn push(&mut self, record: &ScanRecord) {
        self.ospa.push(record.ospa);
        self.true_n.push(record.true_n);
        self.est_n.push(record.est_n);
        self.scan_ms.push(record.scan_ms);
    }

    pub fn time_averaged_ospa(&self) -> f64 {
        mean(&self.ospa)
    }

    pub fn mean_scan_ms(&self) -> f64 {
        mean(&self.scan_ms)
    }

    pub fn records(&self) -> Vec<ScanRecord> {
        (0..self.ospa.len())
            .map(|k| ScanRecord {
                run_id: self.run_id,
                scan: k,
                true_n: self.true_n[k],
                est_n: self.est_n[k],
                ospa: self.ospa[k],
                scan_ms: self.scan_ms[k],
            })
            .collect()
    }
}

/// Groups scan records by run, in order of first appearance.
pub fn runs_from_records(records: &[ScanRecord]) -> Vec<RunSummary> {
    let mut runs: Vec<RunSummary> = Vec::new();
    for r in records {
        match runs.iter_mut().find(|s| s.run_id == r.run_id) {
            Some(s) => s.push(r),
            None => {
                let mut s = RunSummary { run_id: r.run_id, ..Default::default() };
                s.push(r);
                runs.push(s);
            }
        }
    }
    runs
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Quantile of `values` at `q ∈ [0, 1]` by linear interpolation between
/// order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub mean_scan_ms: f64,
    /// Per scan: true cardinality (from the first run) and mean/std of the
    /// estimated cardinality over runs.
    pub true_n: Vec<usize>,
    pub card_mean: Vec<f64>,
    pub card_std: Vec<f64>,
    pub time_averaged: Vec<f64>,
}

pub fn summarize(runs: &[RunSummary]) -> Result<Summary> {
    if runs.is_empty() {
        return Err(Error::Config("summarize: need at least one run".into()));
    }
    let time_averaged: Vec<f64> = runs.iter().map(RunSummary::time_averaged_ospa).collect();
    let scans = runs.iter().map(|r| r.est_n.len()).min().unwrap_or(0);
    let mut card_mean = Vec::with_capacity(scans);
    let mut card_std = Vec::with_capacity(scans);
    for k in 0..scans {
        let v: Vec<f64> = runs.iter().map(|r| r.est_n[k] as f64).collect();
        let m = mean(&v);
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64;
        card_mean.push(m);
        card_std.push(var.sqrt());
    }
    Ok(Summary {
        median: quantile(&time_averaged, 0.5),
        q1: quantile(&time_averaged, 0.25),
        q3: quantile(&time_averaged, 0.75),
        mean_scan_ms: mean(&runs.iter().map(RunSummary::mean_scan_ms).collect::<Vec<_>>()),
        true_n: runs[0].true_n[..scans].to_vec(),
        card_mean,
        card_std,
        time_averaged,
    })
}
