//! Seeded experiment runners emitting CSV (or JSON with `--json`).

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::ValueEnum;
use opstrata::matcore::{eigh, expm, gauge_norm, ComplexMatrix, GaugeNorm};
use opstrata::monotone::{
    make_sqrt, matrix_eval_spectral, series_tail_bound, taylor_remainder_bound, taylor_term, MonotoneFunction,
};
use opstrata::pinv::moore_penrose;
use opstrata::polar::{
    modulus_map, polar_decompose, polar_factor_map, trivialize_alpha, trivialize_v, untrivialize_alpha,
    untrivialize_v,
};
use opstrata::random;
use opstrata::strata::{continuity_report, stratum_index};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{num, read_matrix, CmdResult, ExperimentConfig, Failure, Table};

/// `e^{tX} A e^{−tY}` for random directions, `t` halved until `‖· − A‖_g < radius`.
fn curve_point(r: &mut ChaCha8Rng, a: &ComplexMatrix, radius: f64, g: GaugeNorm) -> ComplexMatrix {
    let x = random::direction(r, a.rows(), a.rows(), 1.0);
    let y = random::direction(r, a.cols(), a.cols(), 1.0);
    let mut t: f64 = r.gen_range(0.1..1.0);
    loop {
        let b = &(&expm(&x.scale_re(t)) * a) * &expm(&y.scale_re(-t));
        if gauge_norm(&(&b - a), g) < radius || t < 1e-12 {
            return b;
        }
        t *= 0.5;
    }
}

fn json_body(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Both,
    InStratum,
    Jump,
}

pub struct ContinuityArgs {
    pub rank: Option<usize>,
    pub terms: usize,
    pub n0: usize,
    pub family: FamilyKind,
}

pub fn continuity(cfg: &ExperimentConfig, args: &ContinuityArgs) -> CmdResult {
    let d = cfg.dimension;
    let rank = args.rank.unwrap_or(d / 2);
    if rank > d {
        return Err(Failure::usage(format!("--rank {rank} exceeds --dim {d}")));
    }
    if args.family != FamilyKind::InStratum && rank == d {
        return Err(Failure::usage("jump families need --rank below --dim"));
    }
    if args.terms == 0 || args.n0 >= args.terms {
        return Err(Failure::usage("--n0 must be smaller than --terms"));
    }
    let kinds: &[(FamilyKind, &str)] = match args.family {
        FamilyKind::Both => &[(FamilyKind::InStratum, "in-stratum"), (FamilyKind::Jump, "jump")],
        FamilyKind::InStratum => &[(FamilyKind::InStratum, "in-stratum")],
        FamilyKind::Jump => &[(FamilyKind::Jump, "jump")],
    };

    let mut reports = Vec::new();
    for trial in 0..cfg.trials {
        let mut r = cfg.trial_rng(trial);
        let b = random::with_rank(&mut r, d, d, rank, 0.5, 2.0);
        for &(kind, name) in kinds {
            let seq = match kind {
                FamilyKind::Jump => random::jump_family(&mut r, &b, args.terms, 1.0, &cfg.tolerances)?,
                _ => random::in_stratum_family(&mut r, &b, args.terms, 0.5),
            };
            reports.push((trial, name, continuity_report(&b, &seq, args.n0, cfg.gauge, &cfg.tolerances)?));
        }
    }
    let all_consistent = reports.iter().all(|(_, _, rep)| rep.consistent);

    if cfg.json {
        let fams: Vec<_> =
            reports.iter().map(|(t, name, rep)| json!({ "trial": t, "family": name, "report": rep })).collect();
        cfg.emit(&json_body(&json!({ "all_consistent": all_consistent, "families": fams })))?;
    } else {
        let mut table = Table::new(&[
            "trial",
            "family",
            "row",
            "n",
            "index",
            "pinv_norm",
            "pinv_gap",
            "nullproj_gap_gauge",
            "nullproj_gap_op",
            "intersection_dim",
            "index_zero",
            "pinv_bounded",
            "pinv_converges",
            "nullproj_gauge",
            "nullproj_op",
            "trivial_intersection",
            "consistent",
        ])?;
        for (trial, name, rep) in &reports {
            for t in &rep.terms {
                let mut row = vec![
                    trial.to_string(),
                    name.to_string(),
                    "term".into(),
                    t.n.to_string(),
                    t.index.to_string(),
                    num(t.pinv_norm),
                    num(t.pinv_gap),
                    num(t.nullproj_gap_gauge),
                    num(t.nullproj_gap_op),
                    t.intersection_dim.to_string(),
                ];
                row.extend(std::iter::repeat(String::new()).take(7));
                table.row(&row)?;
            }
            let mut row = vec![trial.to_string(), name.to_string(), "summary".into()];
            row.extend(std::iter::repeat(String::new()).take(7));
            row.extend(rep.verdicts.as_array().iter().map(|v| v.to_string()));
            row.push(rep.consistent.to_string());
            table.row(&row)?;
        }
        cfg.emit(&table.finish()?)?;
    }
    if !all_consistent {
        return Err(Failure::inconsistent("continuity verdicts disagree within a family"));
    }
    Ok(())
}

pub struct TaylorArgs {
    pub function: String,
    pub m_max: usize,
    pub ratio: f64,
    pub noise: f64,
}

fn parse_function(spec: &str) -> CmdResult<MonotoneFunction> {
    if spec == "sqrt" {
        return Ok(make_sqrt());
    }
    if let Some(path) = spec.strip_prefix("atomic:") {
        let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
        return MonotoneFunction::from_json(&text).map_err(|e| Failure::usage(format!("{path}: {e}")));
    }
    Err(Failure::usage(format!("unknown function '{spec}' (expected sqrt or atomic:<file>)")))
}

fn ratio_of(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

pub fn taylor(cfg: &ExperimentConfig, args: &TaylorArgs) -> CmdResult {
    let f = parse_function(&args.function)?;
    if args.m_max == 0 {
        return Err(Failure::usage("--m-max must be at least 1"));
    }
    if !(args.ratio >= 0.0 && args.ratio.is_finite()) || !(args.noise >= 0.0 && args.noise.is_finite()) {
        return Err(Failure::usage("--ratio and --noise must be finite and nonnegative"));
    }
    let (tol, g, d) = (&cfg.tolerances, cfg.gauge, cfg.dimension);
    let mut rows = Vec::new();
    for trial in 0..cfg.trials {
        let mut r = cfg.trial_rng(trial);
        let c = &ComplexMatrix::identity(d) + &random::psd(&mut r, d, d, 0.0, args.noise);
        let gamma = eigh(&c)?.eigenvalues[0];
        let h = random::hermitian(&mut r, d);
        let hn = gauge_norm(&h, g);
        let delta = if args.ratio == 0.0 || hn == 0.0 { ComplexMatrix::zeros(d, d) } else { h.scale_re(args.ratio * gamma / hn) };

        let base = matrix_eval_spectral(&f, &c, tol)?;
        let target = matrix_eval_spectral(&f, &(&c + &delta), tol)?;
        let mut partial = base.clone();
        let mut prev = gauge_norm(&(&target - &base), g);
        for m in 1..=args.m_max {
            // radius check first so out-of-range perturbations fail with a clear error
            taylor_remainder_bound(&f, &c, &delta, m, g, tol)?;
            partial += &taylor_term(&f, &c, &delta, m, tol)?;
            let rem = gauge_norm(&(&target - &partial), g);
            let bound = series_tail_bound(&f, &c, &delta, m, g, tol)?;
            rows.push((trial, m, rem, bound, ratio_of(rem, bound), ratio_of(rem, prev)));
            prev = rem;
        }
    }
    let ok = rows.iter().all(|row| row.4 <= 1.0 + 1e-6);

    if cfg.json {
        let items: Vec<_> = rows
            .iter()
            .map(|&(t, m, rem, b, q, dec)| {
                json!({ "trial": t, "m": m, "remainder_gauge": rem, "bound_gauge": b, "ratio": q, "decay": dec })
            })
            .collect();
        cfg.emit(&json_body(&json!({ "within_bound": ok, "rows": items })))?;
    } else {
        let mut table = Table::new(&["trial", "m", "remainder_gauge", "bound_gauge", "ratio", "decay"])?;
        for &(t, m, rem, b, q, dec) in &rows {
            table.row(&[t.to_string(), m.to_string(), num(rem), num(b), num(q), num(dec)])?;
        }
        cfg.emit(&table.finish()?)?;
    }
    if !ok {
        return Err(Failure::inconsistent("a Taylor remainder exceeded its bound"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CensusModel {
    /// `A + s·G` with Gaussian `G`.
    Dense,
    /// Alternates in-stratum curves with dense rank-raising perturbations.
    Bumps,
}

pub struct CensusArgs {
    pub input: Option<PathBuf>,
    pub rank: Option<usize>,
    pub scale: f64,
    pub model: CensusModel,
}

pub fn census(cfg: &ExperimentConfig, args: &CensusArgs) -> CmdResult {
    if !(args.scale > 0.0 && args.scale.is_finite()) {
        return Err(Failure::usage("--scale must be positive"));
    }
    let a = match &args.input {
        Some(p) => read_matrix(p)?,
        None => {
            let d = cfg.dimension;
            let rank = args.rank.unwrap_or(d);
            if rank > d {
                return Err(Failure::usage(format!("--rank {rank} exceeds --dim {d}")));
            }
            // the reference matrix does not depend on the trial streams
            let mut r = cfg.trial_rng(usize::MAX);
            random::with_rank(&mut r, d, d, rank, 0.5, 2.0)
        }
    };
    let (m, n) = a.shape();
    let mut rows = Vec::new();
    let mut hist: BTreeMap<i64, usize> = BTreeMap::new();
    for trial in 0..cfg.trials {
        let mut r = cfg.trial_rng(trial);
        let b = match (args.model, trial % 2) {
            (CensusModel::Bumps, 0) => curve_point(&mut r, &a, args.scale, cfg.gauge),
            _ => &a + &random::direction(&mut r, m, n, args.scale),
        };
        let k = stratum_index(&b, &a, &cfg.tolerances)?;
        let pn = moore_penrose(&b, &cfg.tolerances)?.pinv_norm();
        *hist.entry(k).or_default() += 1;
        rows.push((trial, k, pn, gauge_norm(&(&b - &a), cfg.gauge)));
    }

    if cfg.json {
        let items: Vec<_> =
            rows.iter().map(|&(t, k, p, dist)| json!({ "trial": t, "k": k, "pinv_norm": p, "dist_gauge": dist })).collect();
        let h: BTreeMap<String, usize> = hist.iter().map(|(k, c)| (k.to_string(), *c)).collect();
        return cfg.emit(&json_body(&json!({ "histogram": h, "rows": items })));
    }
    let mut table = Table::new(&["trial", "k", "pinv_norm", "dist_gauge"])?;
    for &(t, k, p, dist) in &rows {
        table.row(&[t.to_string(), k.to_string(), num(p), num(dist)])?;
    }
    for (k, c) in &hist {
        eprintln!("k={k}: {c}");
    }
    cfg.emit(&table.finish()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FiberModel {
    /// `e^{tX} A e^{−tY}`, staying in the stratum of `A`.
    Curve,
    /// `A + s·G`, which generally leaves the stratum when `A` is rank deficient.
    Additive,
}

pub struct FiberArgs {
    pub rank: Option<usize>,
    pub scale: f64,
    pub model: FiberModel,
}

pub fn fiber(cfg: &ExperimentConfig, args: &FiberArgs) -> CmdResult {
    let d = cfg.dimension;
    let rank = args.rank.unwrap_or(d);
    if rank == 0 || rank > d {
        return Err(Failure::usage(format!("--rank must lie in 1..={d}")));
    }
    if !(args.scale >= 0.0 && args.scale.is_finite()) {
        return Err(Failure::usage("--scale must be finite and nonnegative"));
    }
    let tol = &cfg.tolerances;
    let (mut max_alpha, mut max_v) = (0.0f64, 0.0f64);
    let (mut in_chart, mut outside) = (0usize, 0usize);
    let mut exact = true;
    for trial in 0..cfg.trials {
        let mut r = cfg.trial_rng(trial);
        let a = random::with_rank(&mut r, d, d, rank, 0.5, 2.0);
        let gamma = moore_penrose(&a, tol)?.gamma;
        let b = match args.model {
            _ if args.scale == 0.0 => a.clone(),
            FiberModel::Curve => curve_point(&mut r, &a, args.scale * gamma, cfg.gauge),
            FiberModel::Additive => {
                let g = random::ginibre(&mut r, d, d);
                &a + &g.scale_re(args.scale * gamma / gauge_norm(&g, cfg.gauge))
            }
        };
        let c0 = polar_decompose(&a, tol)?.modulus;
        let v0 = polar_factor_map(&a, &a, tol)?;
        let (ta, tv) = match (trivialize_alpha(&b, &c0, &a, tol), trivialize_v(&b, &v0, &a, tol)) {
            (Ok(ta), Ok(tv)) => (ta, tv),
            _ => {
                outside += 1;
                continue;
            }
        };
        in_chart += 1;
        exact &= ta.0 == modulus_map(&b, &a, tol)? && tv.0 == polar_factor_map(&b, &a, tol)?;
        max_alpha = max_alpha.max(untrivialize_alpha(&ta.0, &ta.1, &c0, tol)?.dist(&b));
        max_v = max_v.max(untrivialize_v(&tv.0, &tv.1, &v0, tol)?.dist(&b));
    }
    let max_residual = max_alpha.max(max_v);
    let report = json!({
        "trials": cfg.trials,
        "in_chart": in_chart,
        "outside_chart": outside,
        "max_residual_alpha": max_alpha,
        "max_residual_v": max_v,
        "max_residual": max_residual,
        "first_components_exact": exact,
    });
    cfg.emit(&json_body(&report))?;
    if max_residual > 1e-7 || !exact {
        return Err(Failure::inconsistent(format!("fiber round trip residual {max_residual:e}")));
    }
    Ok(())
}
