//! Sweeps over `(h, eps)` cells. Cells run independently on the rayon pool and
//! rows are sorted after the join, so output does not depend on scheduling.

use std::cmp::Ordering;
use std::path::Path;

use anyhow::Context;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use zswkb::direct::{direct_spectrum_complex, direct_spectrum_real};
use zswkb::quantize::{select_branch, wkb_spectrum, Branch};
use zswkb::{EigenvalueRecord64, StokesGraph64, SymmetryClass};

use crate::config::ExperimentConfig;
use crate::table::{fmt_f64, fmt_opt, parse_opt, Table};

/// Rows plus the number of cells that failed numerically.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub failed_cells: usize,
}

fn cells(cfg: &ExperimentConfig) -> Vec<(f64, f64)> {
    cfg.h_list.iter().flat_map(|&h| cfg.eps_list.iter().map(move |&e| (h, e))).collect()
}

fn base_table(cfg: &ExperimentConfig, subcommand: &str, header: &[&str]) -> anyhow::Result<Table> {
    let mut t = Table::new(header);
    t.meta("tool", concat!("zswkb ", env!("CARGO_PKG_VERSION")));
    t.meta("subcommand", subcommand);
    t.meta("config_sha256", cfg.hash());
    t.meta("seed_metadata", &cfg.seed_metadata);
    let tol = serde_json::to_value(cfg.effective_tolerances()?)?;
    for (k, v) in tol.as_object().expect("object") {
        t.meta(&format!("tol.{k}"), v);
    }
    Ok(t)
}

fn by_f64(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}

fn cx_key(z: Option<Complex64>) -> (f64, f64) {
    z.map_or((f64::INFINITY, f64::INFINITY), |z| (z.re, z.im))
}

/// Direct spectrum of one cell: the real scan at `eps = 0`, otherwise the
/// complex search with its winding certificate.
#[derive(Debug, Clone)]
pub struct DirectCell {
    pub records: Vec<EigenvalueRecord64>,
    pub winding: Option<i64>,
    pub complete: bool,
}

pub fn direct_cell(cfg: &ExperimentConfig, h: f64, eps: f64, complex: bool) -> anyhow::Result<DirectCell> {
    let p = cfg.problem(h, eps)?;
    if eps == 0.0 && !complex {
        return Ok(DirectCell { records: direct_spectrum_real(&p)?, winding: None, complete: true });
    }
    let s = direct_spectrum_complex(&p)?;
    Ok(DirectCell { complete: s.is_complete(), winding: Some(s.zero_count.winding), records: s.records })
}

pub fn run_wkb(cfg: &ExperimentConfig) -> anyhow::Result<RunOutput> {
    let mut t = base_table(cfg, "wkb", &["h", "eps", "k", "branch", "lambda_re", "lambda_im", "residual", "error"])?;
    let results: Vec<_> = cells(cfg)
        .par_iter()
        .map(|&(h, eps)| (h, eps, cfg.problem(h, eps).and_then(|p| Ok(wkb_spectrum(&p)?))))
        .collect();
    let mut rows = Vec::new();
    let mut failed = 0;
    for (h, eps, r) in results {
        match r {
            Ok(s) => {
                failed += usize::from(!s.failures.is_empty());
                for rec in s.records {
                    rows.push((h, eps, rec.k, Some(rec), String::new()));
                }
                for (k, e) in s.failures {
                    rows.push((h, eps, k, None, e.to_string()));
                }
            }
            Err(e) => {
                failed += 1;
                rows.push((h, eps, i64::MIN, None, format!("{e:#}")));
            }
        }
    }
    rows.sort_by(|a, b| by_f64(a.0, b.0).then(by_f64(a.1, b.1)).then(a.2.cmp(&b.2)).then(a.4.cmp(&b.4)));
    for (h, eps, k, rec, err) in rows {
        t.rows.push(vec![
            fmt_f64(h),
            fmt_f64(eps),
            if k == i64::MIN { String::new() } else { k.to_string() },
            rec.map(|r| r.branch.as_str().to_string()).unwrap_or_default(),
            fmt_opt(rec.map(|r| r.lambda.re)),
            fmt_opt(rec.map(|r| r.lambda.im)),
            fmt_opt(rec.map(|r| r.residual)),
            err,
        ]);
    }
    Ok(RunOutput { table: t, failed_cells: failed })
}

pub fn run_direct(cfg: &ExperimentConfig) -> anyhow::Result<RunOutput> {
    let mut t = base_table(
        cfg,
        "direct",
        &["h", "eps", "k", "lambda_re", "lambda_im", "residual", "winding", "complete", "error"],
    )?;
    let results: Vec<_> = cells(cfg).par_iter().map(|&(h, eps)| (h, eps, direct_cell(cfg, h, eps, false))).collect();
    let mut rows = Vec::new();
    let mut failed = 0;
    for (h, eps, r) in results {
        match r {
            Ok(c) => {
                failed += usize::from(!c.complete);
                let winding = c.winding.map(|w| w.to_string()).unwrap_or_default();
                for rec in &c.records {
                    rows.push((h, eps, Some(*rec), winding.clone(), c.complete, String::new()));
                }
            }
            Err(e) => {
                failed += 1;
                rows.push((h, eps, None, String::new(), false, format!("{e:#}")));
            }
        }
    }
    rows.sort_by(|a, b| {
        by_f64(a.0, b.0)
            .then(by_f64(a.1, b.1))
            .then_with(|| {
                let (x, y) = (cx_key(a.2.map(|r| r.lambda)), cx_key(b.2.map(|r| r.lambda)));
                by_f64(x.0, y.0).then(by_f64(x.1, y.1))
            })
    });
    for (h, eps, rec, winding, complete, err) in rows {
        t.rows.push(vec![
            fmt_f64(h),
            fmt_f64(eps),
            rec.map(|r| r.k.to_string()).unwrap_or_default(),
            fmt_opt(rec.map(|r| r.lambda.re)),
            fmt_opt(rec.map(|r| r.lambda.im)),
            fmt_opt(rec.map(|r| r.residual)),
            winding,
            complete.to_string(),
            err,
        ]);
    }
    Ok(RunOutput { table: t, failed_cells: failed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub h: f64,
    pub eps: f64,
    /// Index of the matched WKB record, or of the direct record if unmatched.
    pub k_proxy: Option<i64>,
    pub lambda_wkb: Option<Complex64>,
    pub lambda_direct: Option<Complex64>,
    pub abs_diff: Option<f64>,
    pub im_lambda_direct: Option<f64>,
    pub branch: Branch,
    pub error: String,
}

const COMPARE_HEADER: [&str; 11] = [
    "h",
    "eps",
    "k_proxy",
    "lambda_wkb_re",
    "lambda_wkb_im",
    "lambda_direct_re",
    "lambda_direct_im",
    "abs_diff",
    "im_lambda_direct",
    "branch",
    "error",
];

impl ComparisonRow {
    fn to_record(&self) -> Vec<String> {
        vec![
            fmt_f64(self.h),
            fmt_f64(self.eps),
            self.k_proxy.map(|k| k.to_string()).unwrap_or_default(),
            fmt_opt(self.lambda_wkb.map(|z| z.re)),
            fmt_opt(self.lambda_wkb.map(|z| z.im)),
            fmt_opt(self.lambda_direct.map(|z| z.re)),
            fmt_opt(self.lambda_direct.map(|z| z.im)),
            fmt_opt(self.abs_diff),
            fmt_opt(self.im_lambda_direct),
            self.branch.as_str().to_string(),
            self.error.clone(),
        ]
    }

    /// Parses one CSV row; `abs_diff` is recomputed from the two eigenvalues
    /// rather than trusted.
    pub fn from_record(r: &[String]) -> anyhow::Result<Self> {
        anyhow::ensure!(r.len() == COMPARE_HEADER.len(), "expected {} fields", COMPARE_HEADER.len());
        let num = |i: usize| parse_opt(&r[i]);
        let pair = |i: usize| -> anyhow::Result<Option<Complex64>> {
            Ok(match (num(i)?, num(i + 1)?) {
                (Some(re), Some(im)) => Some(Complex64::new(re, im)),
                _ => None,
            })
        };
        let lambda_wkb = pair(3)?;
        let lambda_direct = pair(5)?;
        let branch = match r[9].as_str() {
            "half-integer" => Branch::HalfInteger,
            "integer" => Branch::Integer,
            other => anyhow::bail!("unknown branch {other:?}"),
        };
        Ok(ComparisonRow {
            h: num(0)?.context("missing h")?,
            eps: num(1)?.context("missing eps")?,
            k_proxy: if r[2].is_empty() { None } else { Some(r[2].parse()?) },
            abs_diff: lambda_wkb.zip(lambda_direct).map(|(a, b)| (a - b).norm()),
            lambda_wkb,
            lambda_direct,
            im_lambda_direct: num(8)?,
            branch,
            error: r[10].clone(),
        })
    }
}

pub fn load_comparison(table: &Table) -> anyhow::Result<Vec<ComparisonRow>> {
    anyhow::ensure!(table.header == COMPARE_HEADER, "not a comparison table");
    table.rows.iter().map(|r| ComparisonRow::from_record(r)).collect()
}

/// Mutual nearest neighbours between `a` and `b`; everything else is left
/// unmatched. Returns index pairs with `None` on the missing side.
pub fn match_nearest(a: &[Complex64], b: &[Complex64]) -> Vec<(Option<usize>, Option<usize>)> {
    let nearest = |z: Complex64, set: &[Complex64]| {
        set.iter()
            .enumerate()
            .min_by(|x, y| by_f64((*x.1 - z).norm(), (*y.1 - z).norm()))
            .map(|(i, _)| i)
    };
    let mut out = Vec::new();
    let mut b_used = vec![false; b.len()];
    for (i, &z) in a.iter().enumerate() {
        match nearest(z, b) {
            Some(j) if nearest(b[j], a) == Some(i) => {
                b_used[j] = true;
                out.push((Some(i), Some(j)));
            }
            _ => out.push((Some(i), None)),
        }
    }
    out.extend(b_used.iter().enumerate().filter(|(_, u)| !**u).map(|(j, _)| (None, Some(j))));
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<_> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// Fitted over distinct `h` at `eps = 0`.
    pub slope: Option<f64>,
    /// `(h, max abs_diff)` at `eps = 0`.
    pub max_diff_by_h: Vec<(f64, f64)>,
    pub failed_cells: usize,
}

impl Comparison {
    pub fn table(&self, cfg: &ExperimentConfig) -> anyhow::Result<Table> {
        let mut t = base_table(cfg, "compare", &COMPARE_HEADER)?;
        t.meta("slope", fmt_opt(self.slope));
        for r in &self.rows {
            t.rows.push(r.to_record());
        }
        Ok(t)
    }
}

fn compare_cell(cfg: &ExperimentConfig, h: f64, eps: f64, branch: Branch) -> Vec<ComparisonRow> {
    let row = |k_proxy, w: Option<&EigenvalueRecord64>, d: Option<&EigenvalueRecord64>| ComparisonRow {
        h,
        eps,
        k_proxy,
        lambda_wkb: w.map(|r| r.lambda),
        lambda_direct: d.map(|r| r.lambda),
        abs_diff: w.zip(d).map(|(a, b)| (a.lambda - b.lambda).norm()),
        im_lambda_direct: d.map(|r| r.lambda.im),
        branch,
        error: String::new(),
    };
    let fail = |msg: String| ComparisonRow {
        h,
        eps,
        k_proxy: None,
        lambda_wkb: None,
        lambda_direct: None,
        abs_diff: None,
        im_lambda_direct: None,
        branch,
        error: msg,
    };
    let wkb = match cfg.problem(h, eps).and_then(|p| Ok(wkb_spectrum(&p)?)) {
        Ok(s) => s,
        Err(e) => return vec![fail(format!("wkb: {e:#}"))],
    };
    let direct = match direct_cell(cfg, h, eps, false) {
        Ok(c) => c,
        Err(e) => return vec![fail(format!("direct: {e:#}"))],
    };
    let a: Vec<_> = wkb.records.iter().map(|r| r.lambda).collect();
    let b: Vec<_> = direct.records.iter().map(|r| r.lambda).collect();
    let mut rows: Vec<_> = match_nearest(&a, &b)
        .into_iter()
        .map(|(i, j)| {
            let w = i.map(|i| &wkb.records[i]);
            let d = j.map(|j| &direct.records[j]);
            row(w.or(d).map(|r| r.k), w, d)
        })
        .collect();
    for (k, e) in &wkb.failures {
        rows.push(ComparisonRow { k_proxy: Some(*k), ..fail(format!("wkb: {e}")) });
    }
    if !direct.complete {
        rows.push(fail("direct: winding count exceeds roots found".into()));
    }
    rows
}

pub fn run_compare(cfg: &ExperimentConfig) -> anyhow::Result<Comparison> {
    let branch = select_branch(&cfg.problem(cfg.h_list[0], 0.0)?.a1);
    let mut all = cells(cfg);
    if !cfg.eps_list.contains(&0.0) {
        all.extend(cfg.h_list.iter().map(|&h| (h, 0.0)));
    }
    let per_cell: Vec<Vec<ComparisonRow>> =
        all.par_iter().map(|&(h, eps)| compare_cell(cfg, h, eps, branch)).collect();
    let failed_cells = per_cell.iter().filter(|c| c.iter().any(|r| !r.error.is_empty())).count();
    let mut rows: Vec<_> = per_cell.into_iter().flatten().collect();
    let key = |r: &ComparisonRow| cx_key(r.lambda_wkb.or(r.lambda_direct));
    rows.sort_by(|a, b| {
        by_f64(a.h, b.h)
            .then(by_f64(a.eps, b.eps))
            .then_with(|| by_f64(key(a).0, key(b).0).then(by_f64(key(a).1, key(b).1)))
            .then_with(|| a.error.cmp(&b.error))
    });

    let mut hs: Vec<f64> = cfg.h_list.clone();
    hs.dedup();
    let max_diff_by_h: Vec<(f64, f64)> = hs
        .iter()
        .filter_map(|&h| {
            rows.iter()
                .filter(|r| r.h == h && r.eps == 0.0)
                .filter_map(|r| r.abs_diff)
                .max_by(|a, b| by_f64(*a, *b))
                .map(|m| (h, m))
        })
        .collect();
    Ok(Comparison { slope: loglog_slope(&max_diff_by_h), max_diff_by_h, rows, failed_cells })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtRow {
    pub eps: f64,
    pub h: f64,
    pub max_im: Option<f64>,
    pub symmetry: SymmetryClass,
    pub winding: Option<i64>,
    pub found: usize,
    pub complete: bool,
    pub error: String,
}

impl PtRow {
    /// Rows for potentials without the parity pairing are a control, not a
    /// check of the reality statement.
    pub fn exploratory(&self) -> bool {
        self.symmetry == SymmetryClass::None
    }
}

pub fn run_pt_sweep(cfg: &ExperimentConfig) -> anyhow::Result<(Vec<PtRow>, Table)> {
    let symmetry = cfg.problem(cfg.h_list[0], 0.0)?.symmetry;
    let mut rows: Vec<PtRow> = cells(cfg)
        .par_iter()
        .map(|&(h, eps)| match direct_cell(cfg, h, eps, true) {
            Ok(c) => PtRow {
                eps,
                h,
                max_im: c.records.iter().map(|r| r.lambda.im.abs()).max_by(|a, b| by_f64(*a, *b)),
                symmetry,
                winding: c.winding,
                found: c.records.len(),
                complete: c.complete,
                error: String::new(),
            },
            Err(e) => PtRow {
                eps,
                h,
                max_im: None,
                symmetry,
                winding: None,
                found: 0,
                complete: false,
                error: format!("{e:#}"),
            },
        })
        .collect();
    rows.sort_by(|a, b| by_f64(a.eps, b.eps).then(by_f64(a.h, b.h)));
    let mut t = base_table(
        cfg,
        "pt-sweep",
        &["eps", "h", "max_abs_im_lambda", "symmetry_class", "winding", "found", "complete", "exploratory", "error"],
    )?;
    for r in &rows {
        t.rows.push(vec![
            fmt_f64(r.eps),
            fmt_f64(r.h),
            fmt_opt(r.max_im),
            r.symmetry.as_str().to_string(),
            r.winding.map(|w| w.to_string()).unwrap_or_default(),
            r.found.to_string(),
            r.complete.to_string(),
            r.exploratory().to_string(),
            r.error.clone(),
        ]);
    }
    Ok((rows, t))
}

/// Stokes graph with the provenance fields every output carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesFile {
    pub config_sha256: String,
    pub tolerances: serde_json::Value,
    #[serde(flatten)]
    pub graph: StokesGraph64,
}

pub fn run_stokes(cfg: &ExperimentConfig, lambda: Complex64, eps: f64, out: &Path) -> anyhow::Result<StokesFile> {
    let p = cfg.problem(cfg.h_list[0], eps)?;
    let graph = zswkb::stokes::build_graph(&p, lambda)?;
    let file = StokesFile {
        config_sha256: cfg.hash(),
        tolerances: serde_json::to_value(cfg.effective_tolerances()?)?,
        graph,
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(out, serde_json::to_vec(&file)?).with_context(|| format!("writing {}", out.display()))?;
    Ok(file)
}
