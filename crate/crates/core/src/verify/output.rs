// SPDX-License-Identifier: MIT OR Apache-2.0

//! File renderings of experiment results: one CSV row per replication and a
//! summary without the raw samples.

use serde::Serialize;

use crate::error::Result;
use crate::io::{csv_string, fmt_num, to_json_pretty};
use crate::verify::counterexample::CounterexampleReport;
use crate::verify::experiments::{CpWeakConvergence, RateStudy, RATE_QUANTILES};
use crate::verify::theorem1::Theorem1Report;

/// Named text files making up one experiment's output.
pub trait Emit {
    type Summary: Serialize;

    fn summary(&self) -> Self::Summary;

    /// CSV files as `(file name, contents)`.
    fn csv_files(&self) -> Result<Vec<(&'static str, String)>>;

    /// CSV files followed by `summary.json`.
    fn files(&self) -> Result<Vec<(&'static str, String)>> {
        let mut files = self.csv_files()?;
        files.push(("summary.json", to_json_pretty(&self.summary())?));
        Ok(files)
    }
}

fn flag(b: bool) -> String {
    b.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleSummary {
    pub paths: usize,
    pub records: usize,
    pub all_half_relations: bool,
    pub all_dist_bounds: bool,
    pub min_pure_jump_dist: f64,
    pub pure_jump_bounded_below: bool,
    pub passed: bool,
}

impl Emit for CounterexampleReport {
    type Summary = CounterexampleSummary;

    fn summary(&self) -> CounterexampleSummary {
        CounterexampleSummary {
            paths: self.records.iter().map(|r| r.path + 1).max().unwrap_or(0),
            records: self.records.len(),
            all_half_relations: self.all_half_relations,
            all_dist_bounds: self.all_dist_bounds,
            min_pure_jump_dist: self.min_pure_jump_dist,
            pure_jump_bounded_below: self.pure_jump_bounded_below,
            passed: self.passed(),
        }
    }

    fn csv_files(&self) -> Result<Vec<(&'static str, String)>> {
        let header = [
            "path",
            "n",
            "t_minus1",
            "t_plus1",
            "sargmax_psi_n",
            "largmax_psi_n",
            "sargmax_psi0",
            "largmax_psi0",
            "skorohod_dist",
            "dist_bound",
            "pure_jump_dist",
            "half_relation",
            "dist_ok",
        ];
        let rows = self.records.iter().map(|r| {
            vec![
                r.path.to_string(),
                r.n.to_string(),
                fmt_num(r.t_minus1),
                fmt_num(r.t_plus1),
                fmt_num(r.sargmax_psi_n),
                fmt_num(r.largmax_psi_n),
                fmt_num(r.sargmax_psi0),
                fmt_num(r.largmax_psi0),
                fmt_num(r.skorohod_dist),
                fmt_num(r.dist_bound),
                fmt_num(r.pure_jump_dist),
                flag(r.half_relation),
                flag(r.dist_ok),
            ]
        });
        Ok(vec![("counterexample.csv", csv_string(&header, rows)?)])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsSummaryRow {
    pub n: usize,
    pub samples: usize,
    pub failures: usize,
    pub ks: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CpSummary {
    pub oracle_draws: usize,
    pub rows: Vec<KsSummaryRow>,
}

impl Emit for CpWeakConvergence {
    type Summary = CpSummary;

    fn summary(&self) -> CpSummary {
        CpSummary {
            oracle_draws: self.oracle.len(),
            rows: self
                .rows
                .iter()
                .map(|r| KsSummaryRow {
                    n: r.n,
                    samples: r.samples.len(),
                    failures: r.failures,
                    ks: r.ks,
                })
                .collect(),
        }
    }

    fn csv_files(&self) -> Result<Vec<(&'static str, String)>> {
        let samples = self
            .rows
            .iter()
            .flat_map(|r| r.samples.iter().map(move |&v| vec![r.n.to_string(), fmt_num(v)]));
        let oracle = self.oracle.iter().map(|&v| vec![fmt_num(v)]);
        Ok(vec![
            ("samples.csv", csv_string(&["n", "scaled_error"], samples)?),
            ("oracle.csv", csv_string(&["sargmax"], oracle)?),
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSummaryRow {
    pub n: usize,
    pub samples: usize,
    pub failures: usize,
    pub separated: usize,
    pub quantile_probs: [f64; 5],
    pub quantiles: [f64; 5],
    pub iqr: f64,
    pub iqr_sqrt_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSummary {
    pub rows: Vec<RateSummaryRow>,
    pub iqr_ratio: f64,
    pub iqr_ratio_sqrt_n: f64,
}

impl Emit for RateStudy {
    type Summary = RateSummary;

    fn summary(&self) -> RateSummary {
        RateSummary {
            rows: self
                .rows
                .iter()
                .map(|r| RateSummaryRow {
                    n: r.n,
                    samples: r.samples.len(),
                    failures: r.failures,
                    separated: r.separated,
                    quantile_probs: RATE_QUANTILES,
                    quantiles: r.quantiles,
                    iqr: r.iqr,
                    iqr_sqrt_n: r.iqr_sqrt_n,
                })
                .collect(),
            iqr_ratio: self.iqr_ratio,
            iqr_ratio_sqrt_n: self.iqr_ratio_sqrt_n,
        }
    }

    fn csv_files(&self) -> Result<Vec<(&'static str, String)>> {
        let samples = self
            .rows
            .iter()
            .flat_map(|r| r.samples.iter().map(move |&v| vec![r.n.to_string(), fmt_num(v)]));
        Ok(vec![("samples.csv", csv_string(&["n", "scaled_error"], samples)?)])
    }
}

impl Emit for Theorem1Report {
    type Summary = Theorem1Report;

    fn summary(&self) -> Theorem1Report {
        self.clone()
    }

    fn csv_files(&self) -> Result<Vec<(&'static str, String)>> {
        let header = [
            "n",
            "tilde_dist",
            "pure_jump_dist",
            "jump_counts_match",
            "sargmax_err",
            "largmax_err",
            "neg_tilde_dist",
            "neg_pure_jump_dist",
            "neg_sargmax_gap",
        ];
        let rows = self.rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                fmt_num(r.tilde_dist),
                fmt_num(r.pure_jump_dist),
                flag(r.jump_counts_match),
                fmt_num(r.sargmax_err),
                fmt_num(r.largmax_err),
                fmt_num(r.neg_tilde_dist),
                fmt_num(r.neg_pure_jump_dist),
                fmt_num(r.neg_sargmax_gap),
            ]
        });
        Ok(vec![("theorem1.csv", csv_string(&header, rows)?)])
    }
}
