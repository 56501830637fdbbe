//! Deterministic JSON/CSV reports.

use crate::{CommonFlags, InputArgs};
use num_complex::Complex64;
use oclab_core::catalog::VerifyReport;
use oclab_core::congruence::{Branch, BranchClass};
use oclab_core::invariants::{st, ts, InvError};
use oclab_core::spacetime::{bach, curvature, einstein_residual, petrov, weyl_spinors, Metric4};
use oclab_core::Congruence64;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn cpx(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn header(kind: &str, input: &InputArgs, flags: &CommonFlags) -> Value {
    json!({
        "tool": "oclab",
        "version": env!("CARGO_PKG_VERSION"),
        "kind": kind,
        "input": input.catalog.clone()
            .or_else(|| input.file.clone())
            .or_else(|| input.metric_file.clone()),
        "params": input.param,
        "points": flags.points,
        "order": flags.order,
        "tol": flags.tol,
        "seed": flags.seed,
    })
}

pub fn classify_report(input: &InputArgs, flags: &CommonFlags, cls: &BranchClass) -> Value {
    let mut v = header("classify", input, flags);
    v["branch"] = json!(cls.branch);
    v["witness"] = json!({
        "max_abs_a": cls.max_abs_a,
        "max_abs_s": cls.max_abs_s,
        "scale": cls.scale,
        "tol": cls.tol,
        "points_used": cls.points_used,
    });
    v
}

pub fn invariants_report(
    c: &Congruence64,
    input: &InputArgs,
    flags: &CommonFlags,
) -> Result<Value, InvError> {
    let cls = c.classify_branch(flags.points.max(8), flags.tol.min(1e-6))?;
    let pts = c.sample_points(flags.points)?;
    let mut rows = Vec::new();
    for pt in &pts {
        let mut row = json!({ "point": pt });
        match cls.branch {
            Branch::TwistOnly => {
                let inv = ts::ts_invariants(c, pt, flags.order, 1.0, 0.0)?;
                row["k1"] = cpx(c64(inv.k1));
                row["k2"] = cpx(c64(inv.k2));
                row["K1_at_rho1"] = cpx(c64(inv.big_k1));
                row["K2_at_rho1"] = cpx(c64(inv.big_k2));
                row["residual"] = json!(inv.residuals.max());
                match ts::ts_reduce_k1_branch(c, pt, flags.order.max(7)) {
                    Ok(red) => {
                        row["A1"] = cpx(c64(red.a1));
                        row["B1"] = cpx(c64(red.b1));
                        row["K1_sign"] = json!(red.sign);
                        row["reduction_residual"] = json!(red.residuals.max());
                    }
                    Err(InvError::BranchMismatch(_)) => {
                        if let Ok(red) = ts::ts_reduce_k2_branch(c, pt, flags.order.max(7)) {
                            row["K1"] = cpx(c64(red.big_k1));
                            row["Z0"] = cpx(c64(red.z0));
                            row["Z1"] = cpx(c64(red.z1));
                            row["Z2"] = cpx(c64(red.z2));
                            row["reduction_residual"] = json!(red.residuals.max());
                        }
                    }
                    Err(InvError::A1Zero) => {
                        row["A1"] = cpx(Complex64::new(0.0, 0.0));
                    }
                    Err(e) => return Err(e),
                }
            }
            Branch::ShearOnly => {
                let inv = st::st_invariants(c, pt, flags.order, 1.0, 0)?;
                row["T0"] = json!(inv.t0);
                row["t1"] = cpx(c64(inv.t1));
                row["k0"] = json!(inv.k0);
                row["k1"] = cpx(c64(inv.k1));
                row["residual"] = json!(inv.residuals.max());
                if let Ok(red) = st::st_reduce(c, pt, flags.order.max(7)) {
                    row["variant"] = json!(red.variant);
                    row["A"] = json!(red.a);
                    row["B"] = json!(red.b);
                    row["C"] = json!(red.c);
                    row["reduction_residual"] = json!(red.residuals.max());
                }
            }
            Branch::Generic => {
                let inv = oclab_core::invariants::generic::generic_invariants(c, pt, flags.order)?;
                row["k1"] = cpx(c64(inv.k1));
                row["k2"] = cpx(c64(inv.k2));
                row["k3"] = cpx(c64(inv.k3));
                row["residual"] = json!(inv.residuals.max());
            }
            Branch::TwistFreeShearFree => {}
        }
        rows.push(row);
    }
    let mut v = header("invariants", input, flags);
    v["branch"] = json!(cls.branch);
    v["per_point"] = json!(rows);
    Ok(v)
}

pub fn curvature_report(
    g: &Metric4<f64>,
    input: &InputArgs,
    flags: &CommonFlags,
    with_bach: bool,
    lambda: f64,
) -> Result<Value, oclab_core::forms::FormsError> {
    if with_bach && flags.order < 4 {
        return Err(oclab_core::forms::FormsError::Invalid(format!(
            "--bach needs --order >= 4 (got {})",
            flags.order
        )));
    }
    let pts = g.sample_points(flags.points)?;
    let mut rows = Vec::new();
    for pt in &pts {
        let cb = curvature(g, pt, flags.order.clamp(2, 4))?;
        let ws = weyl_spinors(&cb)?;
        let rep = petrov(&ws, flags.tol.min(1e-6));
        let er = einstein_residual(g, &cb, lambda)?;
        let mut row = json!({
            "point": pt,
            "ricci_norm": cb.ricci_norm(),
            "ricci_scalar": cb.ricci_scalar.value().re,
            "psi": ws.psi.iter().map(|p| cpx(*p)).collect::<Vec<_>>(),
            "petrov": rep.petrov,
            "einstein_residual": er.residual_norm,
            "phi": er.phi,
        });
        if with_bach {
            let b = bach(g, pt, 4)?;
            let mx = b.bach.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs()));
            row["bach_norm"] = json!(mx);
            row["bach"] = json!(b.bach);
        }
        rows.push(row);
    }
    let mut v = header("curvature", input, flags);
    v["lambda"] = json!(lambda);
    v["per_point"] = json!(rows);
    Ok(v)
}

fn c64(c: num_complex::Complex<f64>) -> Complex64 {
    Complex64::new(c.re, c.im)
}

pub fn emit(v: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(v).unwrap()),
        Format::Csv => print_csv(v),
    }
}

/// CSV: one row per sampled point, fixed column order (the union of keys
/// in the first row, sorted), complex values split into _re/_im.
fn print_csv(v: &Value) {
    let Some(rows) = v.get("per_point").and_then(|p| p.as_array()) else {
        // headerless single-row summary
        let mut cols: Vec<(&String, &Value)> = v.as_object().unwrap().iter().collect();
        cols.sort_by_key(|(k, _)| k.to_string());
        println!(
            "{}",
            cols.iter()
                .map(|(k, _)| k.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        println!(
            "{}",
            cols.iter()
                .map(|(_, val)| flat_value(val))
                .collect::<Vec<_>>()
                .join(",")
        );
        return;
    };
    let mut keys: Vec<String> = Vec::new();
    for row in rows {
        for k in row.as_object().unwrap().keys() {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    keys.sort();
    println!("{}", keys.join(","));
    for row in rows {
        let cells: Vec<String> = keys
            .iter()
            .map(|k| row.get(k).map(flat_value).unwrap_or_default())
            .collect();
        println!("{}", cells.join(","));
    }
}

fn flat_value(v: &Value) -> String {
    match v {
        Value::Array(a) => a.iter().map(flat_value).collect::<Vec<_>>().join(";"),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    tool: &'static str,
    version: &'static str,
    kind: &'static str,
    points: usize,
    order: usize,
    reports: &'a [VerifyReport],
    pass: bool,
}

pub fn emit_verify(rows: &[VerifyReport], flags: &CommonFlags) {
    let pass = rows.iter().all(|r| r.pass);
    match flags.format {
        Format::Json => {
            let s = VerifySummary {
                tool: "oclab",
                version: env!("CARGO_PKG_VERSION"),
                kind: "verify",
                points: flags.points,
                order: flags.order,
                reports: rows,
                pass,
            };
            println!("{}", serde_json::to_string_pretty(&s).unwrap());
        }
        Format::Csv => {
            println!("entry,pass,max_check_err,max_residual,petrov_pass");
            for r in rows {
                let worst = r
                    .checks
                    .iter()
                    .map(|c| c.max_rel_err)
                    .fold(0.0f64, f64::max);
                println!(
                    "{},{},{:.3e},{:.3e},{}",
                    r.entry, r.pass, worst, r.max_residual, r.petrov_pass
                );
            }
        }
    }
    let mut sorted: Vec<&VerifyReport> = rows.iter().collect();
    sorted.sort_by_key(|r| r.entry.clone());
    for r in sorted {
        eprintln!("{}: {}", r.entry, if r.pass { "ok" } else { "FAIL" });
    }
    let _ = BTreeMap::<String, ()>::new();
}
