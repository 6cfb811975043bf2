//! Rate reports: raw metric rows, per-level aggregates, log-log slope fits
//! and their CSV serialization.
//!
//! CSV layout is fixed: the row file has the columns
//! `experiment,scenario,level,mesh,metric,replicate,value` and the companion
//! summary file `metric,slope,r2,levels,replicates`. Rows are sorted by
//! `(metric, level, replicate)`, floats are printed in exponent form, lines
//! end with `\n` — identical configs and seeds give byte-identical files.

use crate::config::ExperimentConfig;

/// One observation: a metric value for a replicate at an approximation level.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub metric: String,
    pub level: u32,
    pub mesh: f64,
    pub replicate: u32,
    pub value: f64,
}

/// Replicate aggregate of one metric at one level.
#[derive(Debug, Clone)]
pub struct Aggregate {
    pub metric: String,
    pub level: u32,
    pub mesh: f64,
    pub median: f64,
    pub mean: f64,
    pub rms: f64,
    /// Interquartile range across replicates.
    pub spread: f64,
    pub count: usize,
}

/// Least-squares slope of `log value` against `log mesh`.
#[derive(Debug, Clone)]
pub struct SlopeFit {
    pub metric: String,
    pub slope: f64,
    pub r2: f64,
    pub levels: usize,
    /// False when the fit quality is too poor to quote (R² < 0.9) or there
    /// were not enough usable levels.
    pub conclusive: bool,
}

#[derive(Debug, Clone)]
pub struct RateReport {
    pub experiment: String,
    pub scenario: String,
    pub rows: Vec<MetricRow>,
    pub aggregates: Vec<Aggregate>,
    pub fits: Vec<SlopeFit>,
    /// Replicates dropped because a solve diverged.
    pub divergent: usize,
    pub attempted: usize,
    pub runtime_secs: f64,
    pub notes: Vec<String>,
    pub config: ExperimentConfig,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn quartiles(sorted: &[f64]) -> (f64, f64) {
    let n = sorted.len();
    if n < 4 {
        return (sorted[0], sorted[n - 1]);
    }
    (sorted[n / 4], sorted[3 * n / 4])
}

/// Ordinary least squares of `ln y` on `ln x`; returns `(slope, r2)`.
/// The slope is reported for decreasing meshes, i.e. positive when the value
/// shrinks with the mesh.
pub fn fit_loglog(meshes: &[f64], values: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = meshes
        .iter()
        .zip(values)
        .filter(|(m, v)| **m > 0.0 && **v > 1e-300 && v.is_finite())
        .map(|(m, v)| (m.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let slope = sxy / sxx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let fit = my + slope * (p.0 - mx);
            (p.1 - fit) * (p.1 - fit)
        })
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 0.0 };
    (slope, r2)
}

impl RateReport {
    /// Builds aggregates and slope fits from raw rows. Each metric gets a
    /// median-based fit under its own name and a mean-based fit suffixed
    /// `_mean`; slopes quote the decay rate in the mesh. Experiment and
    /// scenario labels come from the config.
    pub fn assemble(
        mut rows: Vec<MetricRow>,
        divergent: usize,
        attempted: usize,
        runtime_secs: f64,
        notes: Vec<String>,
        config: ExperimentConfig,
    ) -> Self {
        rows.sort_by(|a, b| {
            (&a.metric, a.level, a.replicate).cmp(&(&b.metric, b.level, b.replicate))
        });
        let mut aggregates: Vec<Aggregate> = Vec::new();
        let mut i = 0;
        while i < rows.len() {
            let j = rows[i..]
                .iter()
                .position(|r| r.metric != rows[i].metric || r.level != rows[i].level)
                .map(|k| i + k)
                .unwrap_or(rows.len());
            let mut vals: Vec<f64> = rows[i..j].iter().map(|r| r.value).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = vals.len();
            let med = if n % 2 == 1 { vals[n / 2] } else { 0.5 * (vals[n / 2 - 1] + vals[n / 2]) };
            let mean = vals.iter().sum::<f64>() / n as f64;
            let rms = (vals.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
            let (q1, q3) = quartiles(&vals);
            aggregates.push(Aggregate {
                metric: rows[i].metric.clone(),
                level: rows[i].level,
                mesh: rows[i].mesh,
                median: med,
                mean,
                rms,
                spread: q3 - q1,
                count: n,
            });
            i = j;
        }

        let mut fits = Vec::new();
        let metrics: Vec<String> = {
            let mut m: Vec<String> = aggregates.iter().map(|a| a.metric.clone()).collect();
            m.dedup();
            m
        };
        for metric in metrics {
            let per_level: Vec<&Aggregate> =
                aggregates.iter().filter(|a| a.metric == metric).collect();
            let meshes: Vec<f64> = per_level.iter().map(|a| a.mesh).collect();
            for (suffix, vals) in [
                ("", per_level.iter().map(|a| a.median).collect::<Vec<_>>()),
                ("_mean", per_level.iter().map(|a| a.mean).collect::<Vec<_>>()),
            ] {
                let (slope, r2) = fit_loglog(&meshes, &vals);
                fits.push(SlopeFit {
                    metric: format!("{metric}{suffix}"),
                    slope,
                    r2,
                    levels: per_level.len(),
                    conclusive: slope.is_finite() && r2.is_finite() && r2 >= 0.9 && per_level.len() >= 3,
                });
            }
        }

        RateReport {
            experiment: config.experiment.clone(),
            scenario: config.scenario.clone(),
            rows,
            aggregates,
            fits,
            divergent,
            attempted,
            runtime_secs,
            notes,
            config,
        }
    }

    pub fn divergence_fraction(&self) -> f64 {
        if self.attempted == 0 {
            return 0.0;
        }
        self.divergent as f64 / self.attempted as f64
    }

    pub fn aggregate(&self, metric: &str, level: u32) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.metric == metric && a.level == level)
    }

    pub fn fit(&self, metric: &str) -> Option<&SlopeFit> {
        self.fits.iter().find(|f| f.metric == metric)
    }

    /// Row CSV (fixed schema, deterministic bytes).
    pub fn csv_rows(&self) -> String {
        let mut out = String::from("experiment,scenario,level,mesh,metric,replicate,value\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:e},{},{},{:e}\n",
                self.experiment, self.scenario, r.level, r.mesh, r.metric, r.replicate, r.value
            ));
        }
        out
    }

    /// Summary CSV with one line per slope fit.
    pub fn csv_summary(&self) -> String {
        let mut out = String::from("metric,slope,r2,levels,replicates\n");
        for f in &self.fits {
            out.push_str(&format!(
                "{},{:e},{:e},{},{}\n",
                f.metric, f.slope, f.r2, f.levels, self.config.replicates
            ));
        }
        out
    }

    /// One human line: experiment, scenario, primary fits, divergence count.
    pub fn summary_line(&self) -> String {
        let mut parts = vec![format!(
            "{} scenario={} levels={:?} replicates={}",
            self.experiment, self.scenario, self.config.levels, self.config.replicates
        )];
        for f in self.fits.iter().filter(|f| !f.metric.ends_with("_mean")) {
            let tag = if f.conclusive { "" } else { " (inconclusive)" };
            parts.push(format!("slope[{}]={:.3} r2={:.3}{}", f.metric, f.slope, f.r2, tag));
        }
        if self.divergent > 0 {
            parts.push(format!("divergent={}/{}", self.divergent, self.attempted));
        }
        parts.push(format!("runtime={:.1}s", self.runtime_secs));
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exact_power_law() {
        let meshes: Vec<f64> = (2..=8).map(|k| 2f64.powi(-k)).collect();
        let values: Vec<f64> = meshes.iter().map(|m| 3.0 * m.powf(1.5)).collect();
        let (slope, r2) = fit_loglog(&meshes, &values);
        assert!((slope - 1.5).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_values_are_inconclusive() {
        let meshes: Vec<f64> = (2..=6).map(|k| 2f64.powi(-k)).collect();
        let values = vec![1.0; 5];
        let (slope, r2) = fit_loglog(&meshes, &values);
        assert!(slope.abs() < 1e-12);
        assert_eq!(r2, 0.0);
    }

    #[test]
    fn assemble_sorts_and_aggregates() {
        let rows = vec![
            MetricRow { metric: "b".into(), level: 4, mesh: 0.0625, replicate: 1, value: 2.0 },
            MetricRow { metric: "a".into(), level: 5, mesh: 0.03125, replicate: 0, value: 1.0 },
            MetricRow { metric: "b".into(), level: 4, mesh: 0.0625, replicate: 0, value: 4.0 },
            MetricRow { metric: "a".into(), level: 4, mesh: 0.0625, replicate: 0, value: 2.0 },
        ];
        let mut cfg = ExperimentConfig::defaults("wz");
        cfg.scenario = "s".into();
        let rep = RateReport::assemble(rows, 0, 2, 0.0, vec![], cfg);
        assert_eq!(rep.rows[0].metric, "a");
        let agg = rep.aggregate("b", 4).unwrap();
        assert_eq!(agg.median, 3.0);
        assert_eq!(agg.mean, 3.0);
        assert_eq!(agg.count, 2);
        let csv = rep.csv_rows();
        assert!(csv.starts_with("experiment,scenario,level,mesh,metric,replicate,value\n"));
        assert!(csv.contains("wz,s,4,6.25e-2,b,0,4e0\n"));
    }
}
