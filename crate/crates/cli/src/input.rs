//! Structure and metric definition files, and catalog loading.

use crate::{parse_params, CliError, InputArgs};
use oclab_core::catalog::{self, CatalogObject};
use oclab_core::expr::Predicate;
use oclab_core::forms::{Chart, OneForm, ScalarField};
use oclab_core::spacetime::Metric4;
use oclab_core::Congruence64;
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Deserialize)]
pub struct ChartSpec {
    pub vars: Vec<String>,
    #[serde(default)]
    pub domain: String,
    pub bounds: Vec<[f64; 2]>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Deserialize)]
pub struct StructureFile {
    pub chart: ChartSpec,
    pub lambda: Vec<String>,
    pub mu: Vec<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
pub struct MetricSpec {
    pub chart: ChartSpec,
    pub coframe: Vec<Vec<String>>,
    pub eta: [[f64; 4]; 4],
}

#[derive(Deserialize)]
pub struct MetricFile {
    pub metric: MetricSpec,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

fn build_chart(spec: &ChartSpec, seed: Option<u64>) -> Result<Chart, CliError> {
    if spec.vars.len() != spec.bounds.len() {
        return Err(CliError::Input(
            "chart vars and bounds must have the same length".into(),
        ));
    }
    let predicate = Predicate::parse(&spec.domain)
        .map_err(|e| CliError::Input(format!("domain predicate: {e}")))?;
    Ok(Chart {
        names: spec.vars.clone(),
        bounds: spec.bounds.iter().map(|b| (b[0], b[1])).collect(),
        predicate,
        seed: seed.unwrap_or(spec.seed),
    })
}

fn parse_form(texts: &[String], dim: usize, what: &str) -> Result<OneForm<f64>, CliError> {
    if texts.len() != dim {
        return Err(CliError::Input(format!(
            "{what} must have {dim} components, got {}",
            texts.len()
        )));
    }
    let mut comps = Vec::new();
    for t in texts {
        let e = oclab_core::expr::parse(t)
            .map_err(|e| CliError::Input(format!("{what} component '{t}': {e}")))?;
        comps.push(ScalarField::Expr(e));
    }
    Ok(OneForm { comps })
}

pub fn load_congruence(input: &InputArgs, seed: Option<u64>) -> Result<Congruence64, CliError> {
    if let Some(name) = &input.catalog {
        let params = parse_params(&input.param).map_err(CliError::Input)?;
        match catalog::catalog_get::<f64>(name, &params)
            .map_err(|e| CliError::Input(e.to_string()))?
        {
            CatalogObject::Congruence(mut c) => {
                if let Some(s) = seed {
                    c.chart.seed = s;
                }
                Ok(c)
            }
            CatalogObject::Metric(_) => Err(CliError::Input(format!(
                "catalog entry '{name}' is a metric; use the curvature command"
            ))),
        }
    } else if let Some(path) = &input.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("reading {path}: {e}")))?;
        let sf: StructureFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("parsing {path}: {e}")))?;
        let chart = build_chart(&sf.chart, seed)?;
        let dim = chart.dim();
        if dim != 3 {
            return Err(CliError::Input(
                "structure charts must have 3 variables".into(),
            ));
        }
        Ok(Congruence64 {
            lambda: parse_form(&sf.lambda, dim, "lambda")?,
            mu: parse_form(&sf.mu, dim, "mu")?,
            chart,
            params: sf.params,
        })
    } else {
        Err(CliError::Input(
            "provide --catalog NAME or --file structure.json".into(),
        ))
    }
}

pub fn load_metric(input: &InputArgs, seed: Option<u64>) -> Result<Metric4<f64>, CliError> {
    if let Some(name) = &input.catalog {
        let params = parse_params(&input.param).map_err(CliError::Input)?;
        match catalog::catalog_get::<f64>(name, &params)
            .map_err(|e| CliError::Input(e.to_string()))?
        {
            CatalogObject::Metric(mut g) => {
                if let Some(s) = seed {
                    g.chart.seed = s;
                }
                Ok(g)
            }
            CatalogObject::Congruence(_) => Err(CliError::Input(format!(
                "catalog entry '{name}' is a congruence; use classify/invariants"
            ))),
        }
    } else if let Some(path) = &input.metric_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("reading {path}: {e}")))?;
        let mf: MetricFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("parsing {path}: {e}")))?;
        let chart = build_chart(&mf.metric.chart, seed)?;
        if chart.dim() != 4 {
            return Err(CliError::Input(
                "metric charts must have 4 variables".into(),
            ));
        }
        if mf.metric.coframe.len() != 4 {
            return Err(CliError::Input("coframe must have 4 forms".into()));
        }
        let mut coframe = Vec::new();
        for (i, f) in mf.metric.coframe.iter().enumerate() {
            coframe.push(parse_form(f, 4, &format!("coframe form {i}"))?);
        }
        Ok(Metric4 {
            chart,
            coframe,
            eta: mf.metric.eta,
            params: mf.params,
        })
    } else {
        Err(CliError::Input(
            "provide --catalog NAME or --metric-file metric.json".into(),
        ))
    }
}
