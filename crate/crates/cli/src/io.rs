//! File reading with diagnostics anchored at `path:line:column`.

use anyhow::{anyhow, Context, Result};
use netpred_core::error::Error;
use netpred_core::graph::WeightedGraph;
use netpred_core::instance::{parse_predictions, parse_requests, InstanceFile};
use netpred_core::request::{PredictionSet, Request};
use netpred_core::Exact;
use std::fs;
use std::path::Path;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).with_context(|| format!("{}: cannot create directory", parent.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("{}: cannot write", path.display()))
}

/// `e` located in `path`. JSON errors carry their own position.
pub fn located(path: &Path, e: Error) -> anyhow::Error {
    match e {
        Error::Json(j) if j.line() > 0 => {
            let msg = j.to_string();
            let suffix = format!(" at line {} column {}", j.line(), j.column());
            let msg = msg.strip_suffix(&suffix).unwrap_or(&msg).to_string();
            anyhow!("{}:{}:{}: {msg}", path.display(), j.line(), j.column())
        }
        other => anyhow!("{}: {other}", path.display()),
    }
}

pub fn instance(path: &Path) -> Result<(InstanceFile, WeightedGraph<Exact>)> {
    let text = read(path)?;
    let file = InstanceFile::parse(&text).map_err(|e| located(path, e))?;
    let graph = file.to_graph().map_err(|e| located(path, e))?;
    Ok((file, graph))
}

pub fn requests(path: &Path, graph: &WeightedGraph<Exact>) -> Result<Vec<Request>> {
    let text = read(path)?;
    let requests = parse_requests(&text).map_err(|e| located(path, e))?;
    for r in &requests {
        r.demand.validate(graph).map_err(|e| anyhow!("{}: request {}: {e}", path.display(), r.arrival_index))?;
    }
    Ok(requests)
}

pub fn predictions(path: &Path, graph: &WeightedGraph<Exact>) -> Result<PredictionSet> {
    let text = read(path)?;
    let set = parse_predictions(&text).map_err(|e| located(path, e))?;
    for (i, d) in set.items.iter().enumerate() {
        d.validate(graph).map_err(|e| anyhow!("{}: prediction {i}: {e}", path.display()))?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_errors_keep_position() {
        let e = parse_requests("[\n  {\"terminal\": }\n]").unwrap_err();
        let msg = located(Path::new("r.json"), e).to_string();
        assert!(msg.starts_with("r.json:2:"), "{msg}");
        assert!(!msg.contains(" at line "), "{msg}");
    }

    #[test]
    fn out_of_range_request_names_its_index() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        fs::write(&p, r#"[{"arrival_index":0,"terminal":1},{"arrival_index":1,"terminal":9}]"#).unwrap();
        let g = WeightedGraph::<Exact>::new(3);
        let msg = requests(&p, &g).unwrap_err().to_string();
        assert!(msg.contains("request 1:"), "{msg}");
    }

    #[test]
    fn write_creates_parents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b/c.txt");
        write(&p, "x").unwrap();
        assert_eq!(read(&p).unwrap(), "x");
    }
}
