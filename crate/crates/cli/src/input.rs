//! Reading instances, graphs and weights documents from disk.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clonewt::metric::load_instance_with_tol;
use clonewt::{Caps, Density, Graph, MetricInstance, Rule, WeightsDocument};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// JSON instance document, or a CSV distance matrix when the file ends in `.csv`.
pub fn instance(path: &Path, tol: f64) -> Result<MetricInstance> {
    let text = read(path)?;
    let inst = if is_csv(path) {
        clonewt::metric::load_instance_csv(&text, tol)
    } else {
        load_instance_with_tol(&text, tol)
    };
    inst.with_context(|| format!("invalid instance {}", path.display()))
}

pub fn graph(path: &Path) -> Result<Graph> {
    Graph::parse_edge_list(&read(path)?).with_context(|| format!("invalid edge list {}", path.display()))
}

pub fn weights(path: &Path) -> Result<WeightsDocument> {
    let text = read(path)?;
    let doc = if is_csv(path) {
        WeightsDocument::from_csv(&text, "unknown", None)
    } else {
        WeightsDocument::from_json_str(&text)
    };
    doc.with_context(|| format!("invalid weights document {}", path.display()))
}

/// Default caps raised by `CLONEWT_CAPS=cliques=N,partitions=M`.
pub fn caps() -> Result<Caps> {
    match std::env::var("CLONEWT_CAPS") {
        Ok(spec) => Ok(Caps::default().raised_by(&spec).context("bad CLONEWT_CAPS")?),
        Err(std::env::VarError::NotPresent) => Ok(Caps::default()),
        Err(e) => bail!("bad CLONEWT_CAPS: {e}"),
    }
}

pub fn rule(spec: &str) -> Result<Rule> {
    Ok(Rule::parse(spec)?.with_caps(caps()?))
}

pub fn density(spec: &str, alpha: Option<f64>) -> Result<Density> {
    let Some(alpha) = alpha else { bail!("--alpha is required") };
    if !(alpha > 0.0 && alpha.is_finite()) {
        bail!("--alpha must be positive, got {alpha}");
    }
    Ok(Density::parse(spec, alpha)?)
}
