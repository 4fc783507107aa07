//! Commands acting on matrices supplied as JSON files.

use std::path::PathBuf;

use opstrata::codim::{codimension_parts, direct_rotation, essential_codimension, gap, Projector};
use opstrata::matcore::{gauge_norm, ComplexMatrix};
use opstrata::pinv::{moore_penrose, penrose_residual};
use opstrata::polar::polar_decompose;
use opstrata::strata::{index_range, stratum_index};
use serde_json::json;

use crate::config::{read_matrix, CmdResult, ExperimentConfig};

fn key_values(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn pinv(cfg: &ExperimentConfig, input: &PathBuf) -> CmdResult {
    let a = read_matrix(input)?;
    let r = moore_penrose(&a, &cfg.tolerances)?;
    let residual = penrose_residual(&a, &r.pinv);
    if cfg.json {
        return cfg.emit(&pretty(&json!({
            "pinv": r.pinv,
            "gamma": r.gamma,
            "rank": r.rank,
            "pinv_norm": r.pinv_norm(),
            "penrose_residual": residual,
        })));
    }
    eprint!(
        "{}",
        key_values(&[
            ("gamma", r.gamma.to_string()),
            ("rank", r.rank.to_string()),
            ("penrose_residual", format!("{residual:e}")),
        ])
    );
    cfg.emit(&format!("{}\n", r.pinv.to_json()))
}

pub fn polar(cfg: &ExperimentConfig, input: &PathBuf) -> CmdResult {
    let a = read_matrix(input)?;
    let parts = polar_decompose(&a, &cfg.tolerances)?;
    let residual = (&parts.polar_factor * &parts.modulus).dist(&a);
    let rank = moore_penrose(&a, &cfg.tolerances)?.rank;
    let mut body = json!({ "polar_factor": parts.polar_factor, "modulus": parts.modulus });
    if cfg.json {
        body["reconstruction_residual"] = json!(residual);
        body["rank"] = json!(rank);
    } else {
        eprint!("{}", key_values(&[("rank", rank.to_string()), ("reconstruction_residual", format!("{residual:e}"))]));
    }
    cfg.emit(&pretty(&body))
}

pub fn codim(cfg: &ExperimentConfig, p: &PathBuf, q: &PathBuf) -> CmdResult {
    let p = Projector::new(read_matrix(p)?.hermitian_part())?;
    let q = Projector::new(read_matrix(q)?.hermitian_part())?;
    let k = essential_codimension(&p, &q, &cfg.tolerances)?;
    let (nq_rp, rq_np) = codimension_parts(&p, &q)?;
    let g = gap(&p, &q);
    // the rotation exists only below gap 1; report its absence rather than failing
    let rotation = direct_rotation(&p, &q, &cfg.tolerances).ok();
    if cfg.json {
        return cfg.emit(&pretty(&json!({
            "codimension": k,
            "dim_nq_cap_rp": nq_rp,
            "dim_rq_cap_np": rq_np,
            "gap": g,
            "rotation": rotation,
        })));
    }
    cfg.emit(&key_values(&[
        ("codimension", k.to_string()),
        ("dim_nq_cap_rp", nq_rp.to_string()),
        ("dim_rq_cap_np", rq_np.to_string()),
        ("gap", g.to_string()),
        ("rotation", if rotation.is_some() { "available" } else { "none" }.to_string()),
    ]))
}

pub fn stratify(cfg: &ExperimentConfig, a: &PathBuf, b: &PathBuf) -> CmdResult {
    let a: ComplexMatrix = read_matrix(a)?;
    let b: ComplexMatrix = read_matrix(b)?;
    let k = stratum_index(&b, &a, &cfg.tolerances)?;
    let range = index_range(&a, &cfg.tolerances)?;
    let pa = moore_penrose(&a, &cfg.tolerances)?;
    let pb = moore_penrose(&b, &cfg.tolerances)?;
    let dist = gauge_norm(&(&b - &a), cfg.gauge);
    if cfg.json {
        return cfg.emit(&pretty(&json!({
            "index": k,
            "range": range,
            "pinv_norm_a": pa.pinv_norm(),
            "pinv_norm_b": pb.pinv_norm(),
            "dist_gauge": dist,
            "gauge": cfg.gauge.to_string(),
        })));
    }
    cfg.emit(&key_values(&[
        ("index", k.to_string()),
        ("k_min", range.k_min.to_string()),
        ("k_max", range.k_max.to_string()),
        ("pinv_norm_a", pa.pinv_norm().to_string()),
        ("pinv_norm_b", pb.pinv_norm().to_string()),
        ("dist_gauge", dist.to_string()),
    ]))
}
