//! Block-diagram graphs: JSON model, validation into a topological plan,
//! and whole-buffer execution.

mod blocks;
mod catalog;
mod value;

pub use catalog::{
    block_catalog, find_block, BlockDescriptor, ParamKind, ParamSpec, ParamValue, PortSpec, MAX_SERIES_LEN,
};
pub use value::{LabelVector, Scalar, Series, Value, ValueKind};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::DspError;
use crate::rng::derive_seed;

pub const GRAPH_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockInstance {
    pub id: String,
    #[serde(rename = "type")]
    pub type_name: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wire {
    pub from: String,
    pub to: String,
}

/// Version-1 graph document. A top-level `ui` object is carried through
/// untouched; any other unknown key is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Graph {
    pub version: u64,
    #[serde(default)]
    pub blocks: Vec<BlockInstance>,
    #[serde(default)]
    pub wires: Vec<Wire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ui: Option<serde_json::Value>,
}

impl Graph {
    pub fn block(&self, id: &str) -> Option<&BlockInstance> {
        self.blocks.iter().find(|b| b.id == id)
    }

    /// Copy of the graph without `id` and its incident wires.
    pub fn without_block(&self, id: &str) -> Graph {
        let prefix = format!("{id}.");
        Graph {
            version: self.version,
            blocks: self.blocks.iter().filter(|b| b.id != id).cloned().collect(),
            wires: self
                .wires
                .iter()
                .filter(|w| !w.from.starts_with(&prefix) && !w.to.starts_with(&prefix))
                .cloned()
                .collect(),
            ui: self.ui.clone(),
        }
    }

    /// Blocks with no outgoing wire.
    pub fn sinks(&self) -> Vec<String> {
        let sources: BTreeSet<&str> =
            self.wires.iter().filter_map(|w| w.from.split_once('.').map(|(b, _)| b)).collect();
        let mut out: Vec<String> =
            self.blocks.iter().filter(|b| !sources.contains(b.id.as_str())).map(|b| b.id.clone()).collect();
        out.sort();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("unsupported graph version {0} (expected 1)")]
    UnsupportedVersion(u64),
    #[error("invalid block id {0:?}")]
    InvalidBlockId(String),
    #[error("duplicate block id {0:?}")]
    DuplicateBlockId(String),
    #[error("block {block_id}: unknown block type {type_name:?}")]
    UnknownBlockType { block_id: String, type_name: String },
    #[error("block {block_id}: unknown parameter {param:?}")]
    UnknownParam { block_id: String, param: String },
    #[error("block {block_id}: parameter {param}: {detail}")]
    ParamOutOfBounds { block_id: String, param: String, detail: String },
    #[error("wire {from} -> {to}: {detail}")]
    DanglingWire { from: String, to: String, detail: String },
    #[error("wire {from} -> {to}: {from_kind} cannot feed {to_kind}")]
    KindMismatch { from: String, to: String, from_kind: String, to_kind: String },
    #[error("input {to} has more than one wire")]
    DuplicateInputWire { to: String },
    #[error("cycle through blocks {}", cycle.join(" -> "))]
    CycleDetected { cycle: Vec<String> },
    #[error("block {block_id}: required input {port:?} is not wired")]
    MissingInput { block_id: String, port: String },
    #[error("block {block_id}: {cause}")]
    BlockRuntimeError { block_id: String, cause: DspError },
    #[error("block {block_id}: output {port} has {len} samples, limit is {limit}")]
    ResourceLimit { block_id: String, port: String, len: usize, limit: usize },
    #[error("plan does not match graph: {0}")]
    PlanMismatch(String),
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::MalformedGraph(_) => "MalformedGraph",
            GraphError::UnsupportedVersion(_) => "UnsupportedVersion",
            GraphError::InvalidBlockId(_) => "InvalidBlockId",
            GraphError::DuplicateBlockId(_) => "DuplicateBlockId",
            GraphError::UnknownBlockType { .. } => "UnknownBlockType",
            GraphError::UnknownParam { .. } => "UnknownParam",
            GraphError::ParamOutOfBounds { .. } => "ParamOutOfBounds",
            GraphError::DanglingWire { .. } => "DanglingWire",
            GraphError::KindMismatch { .. } => "KindMismatch",
            GraphError::DuplicateInputWire { .. } => "DuplicateInputWire",
            GraphError::CycleDetected { .. } => "CycleDetected",
            GraphError::MissingInput { .. } => "MissingInput",
            GraphError::BlockRuntimeError { .. } => "BlockRuntimeError",
            GraphError::ResourceLimit { .. } => "ResourceLimit",
            GraphError::PlanMismatch(_) => "PlanMismatch",
        }
    }

    pub fn block_id(&self) -> Option<&str> {
        match self {
            GraphError::DuplicateBlockId(id) | GraphError::InvalidBlockId(id) => Some(id),
            GraphError::UnknownBlockType { block_id, .. }
            | GraphError::UnknownParam { block_id, .. }
            | GraphError::ParamOutOfBounds { block_id, .. }
            | GraphError::MissingInput { block_id, .. }
            | GraphError::BlockRuntimeError { block_id, .. }
            | GraphError::ResourceLimit { block_id, .. } => Some(block_id),
            _ => None,
        }
    }

    /// Engine faults as opposed to problems with the submitted graph.
    pub fn is_engine_fault(&self) -> bool {
        matches!(self, GraphError::BlockRuntimeError { .. } | GraphError::PlanMismatch(_))
    }
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let graph: Graph = serde_json::from_str(text).map_err(|e| GraphError::MalformedGraph(e.to_string()))?;
    if graph.version != GRAPH_VERSION {
        return Err(GraphError::UnsupportedVersion(graph.version));
    }
    Ok(graph)
}

pub type ResolvedParams = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionPlan {
    pub order: Vec<String>,
    pub resolved_params: BTreeMap<String, ResolvedParams>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn split_endpoint(endpoint: &str) -> Option<(&str, &str)> {
    endpoint.split_once('.').filter(|(b, p)| !b.is_empty() && !p.is_empty())
}

struct Checked<'g> {
    descriptors: BTreeMap<&'g str, BlockDescriptor>,
    /// (from block, to block) per wire.
    edges: Vec<(&'g str, &'g str)>,
}

fn check_structure(graph: &Graph) -> Result<(Checked<'_>, BTreeMap<String, ResolvedParams>), GraphError> {
    if graph.version != GRAPH_VERSION {
        return Err(GraphError::UnsupportedVersion(graph.version));
    }
    let mut descriptors = BTreeMap::new();
    let mut resolved = BTreeMap::new();
    for b in &graph.blocks {
        if !valid_id(&b.id) {
            return Err(GraphError::InvalidBlockId(b.id.clone()));
        }
        let desc = find_block(&b.type_name).ok_or_else(|| GraphError::UnknownBlockType {
            block_id: b.id.clone(),
            type_name: b.type_name.clone(),
        })?;
        if descriptors.contains_key(b.id.as_str()) {
            return Err(GraphError::DuplicateBlockId(b.id.clone()));
        }
        if let Some(unknown) = b.params.keys().find(|k| desc.param(k).is_none()) {
            return Err(GraphError::UnknownParam { block_id: b.id.clone(), param: unknown.clone() });
        }
        let mut params = ResolvedParams::new();
        for spec in &desc.params {
            let value = match b.params.get(&spec.name) {
                Some(raw) => spec.resolve(raw).map_err(|detail| GraphError::ParamOutOfBounds {
                    block_id: b.id.clone(),
                    param: spec.name.clone(),
                    detail,
                })?,
                None => spec.default.clone(),
            };
            params.insert(spec.name.clone(), value);
        }
        resolved.insert(b.id.clone(), params);
        descriptors.insert(b.id.as_str(), desc);
    }

    let mut wired_inputs = BTreeSet::new();
    let mut edges = Vec::new();
    for w in &graph.wires {
        let dangling = |detail: String| GraphError::DanglingWire { from: w.from.clone(), to: w.to.clone(), detail };
        let (fb, fp) = split_endpoint(&w.from).ok_or_else(|| dangling("source must be blockId.port".into()))?;
        let (tb, tp) = split_endpoint(&w.to).ok_or_else(|| dangling("destination must be blockId.port".into()))?;
        let fd = descriptors.get(fb).ok_or_else(|| dangling(format!("no block {fb:?}")))?;
        let td = descriptors.get(tb).ok_or_else(|| dangling(format!("no block {tb:?}")))?;
        let out = fd.output(fp).ok_or_else(|| dangling(format!("{} has no output {fp:?}", fd.type_name)))?;
        let inp = td.input(tp).ok_or_else(|| dangling(format!("{} has no input {tp:?}", td.type_name)))?;
        if out.kind != inp.kind {
            return Err(GraphError::KindMismatch {
                from: w.from.clone(),
                to: w.to.clone(),
                from_kind: out.kind.name().into(),
                to_kind: inp.kind.name().into(),
            });
        }
        if !wired_inputs.insert(w.to.as_str()) {
            return Err(GraphError::DuplicateInputWire { to: w.to.clone() });
        }
        edges.push((fb, tb));
    }
    for (id, desc) in &descriptors {
        for port in desc.inputs.iter().filter(|p| !p.optional) {
            if !wired_inputs.contains(format!("{id}.{}", port.name).as_str()) {
                return Err(GraphError::MissingInput { block_id: id.to_string(), port: port.name.clone() });
            }
        }
    }
    Ok((Checked { descriptors, edges }, resolved))
}

/// Finds one cycle among blocks left over by Kahn's algorithm, listed in
/// wire direction starting from its smallest id.
fn extract_cycle(remaining: &BTreeSet<&str>, edges: &[(&str, &str)]) -> Vec<String> {
    let pred = |node: &str| -> Option<&str> {
        edges.iter().filter(|(f, t)| *t == node && remaining.contains(f)).map(|(f, _)| *f).min()
    };
    let mut path: Vec<&str> = Vec::new();
    let mut cur = *remaining.iter().next().expect("non-empty remainder");
    while !path.contains(&cur) {
        path.push(cur);
        match pred(cur) {
            Some(p) => cur = p,
            None => break,
        }
    }
    let start = path.iter().position(|n| *n == cur).unwrap_or(0);
    let mut cycle: Vec<&str> = path[start..].to_vec();
    cycle.reverse();
    if let Some(min_pos) = cycle.iter().enumerate().min_by_key(|(_, n)| **n).map(|(i, _)| i) {
        cycle.rotate_left(min_pos);
    }
    cycle.into_iter().map(String::from).collect()
}

/// Type-checks the graph and orders it topologically; ready blocks are
/// taken in lexicographic id order.
pub fn validate_and_plan(graph: &Graph) -> Result<ExecutionPlan, GraphError> {
    let (checked, resolved_params) = check_structure(graph)?;
    let mut indegree: BTreeMap<&str, usize> = checked.descriptors.keys().map(|k| (*k, 0)).collect();
    for (_, t) in &checked.edges {
        *indegree.get_mut(t).expect("known block") += 1;
    }
    let mut ready: BTreeSet<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(next) = ready.pop_first() {
        order.push(next.to_string());
        for (_, t) in checked.edges.iter().filter(|(f, _)| *f == next) {
            let d = indegree.get_mut(t).expect("known block");
            *d -= 1;
            if *d == 0 {
                ready.insert(t);
            }
        }
    }
    if order.len() < indegree.len() {
        let remaining: BTreeSet<&str> = indegree.iter().filter(|(_, d)| **d > 0).map(|(k, _)| *k).collect();
        return Err(GraphError::CycleDetected { cycle: extract_cycle(&remaining, &checked.edges) });
    }
    Ok(ExecutionPlan { order, resolved_params })
}

pub type BlockOutputs = BTreeMap<String, Value>;
pub type RunOutputs = BTreeMap<String, BlockOutputs>;

/// Evaluates every block once in plan order. Block `id` draws randomness
/// from `derive_seed(seed, id)`.
pub fn execute_plan(plan: &ExecutionPlan, graph: &Graph, seed: u64) -> Result<RunOutputs, GraphError> {
    let mut results = RunOutputs::new();
    for id in &plan.order {
        let inst = graph.block(id).ok_or_else(|| GraphError::PlanMismatch(format!("no block {id:?}")))?;
        let desc = find_block(&inst.type_name).ok_or_else(|| GraphError::UnknownBlockType {
            block_id: id.clone(),
            type_name: inst.type_name.clone(),
        })?;
        let params = plan
            .resolved_params
            .get(id)
            .ok_or_else(|| GraphError::PlanMismatch(format!("no parameters for {id:?}")))?;
        let mut inputs = BTreeMap::new();
        for port in &desc.inputs {
            let target = format!("{id}.{}", port.name);
            let wire = graph.wires.iter().find(|w| w.to == target);
            let value = wire.and_then(|w| {
                let (b, p) = split_endpoint(&w.from)?;
                results.get(b)?.get(p).cloned()
            });
            match value {
                Some(v) => {
                    inputs.insert(port.name.clone(), v);
                }
                None if port.optional && wire.is_none() => {}
                None => return Err(GraphError::MissingInput { block_id: id.clone(), port: port.name.clone() }),
            }
        }
        let outputs = blocks::run(&desc.type_name, params, &inputs, derive_seed(seed, id))
            .map_err(|cause| GraphError::BlockRuntimeError { block_id: id.clone(), cause })?;
        for port in &desc.outputs {
            let v = outputs.get(&port.name).ok_or_else(|| GraphError::BlockRuntimeError {
                block_id: id.clone(),
                cause: DspError::NumericalFailure(format!("output {} not produced", port.name)),
            })?;
            if v.series_len() > MAX_SERIES_LEN {
                return Err(GraphError::ResourceLimit {
                    block_id: id.clone(),
                    port: port.name.clone(),
                    len: v.series_len(),
                    limit: MAX_SERIES_LEN,
                });
            }
            if !v.is_finite() {
                return Err(GraphError::BlockRuntimeError {
                    block_id: id.clone(),
                    cause: DspError::NumericalFailure(format!("output {} is not finite", port.name)),
                });
            }
        }
        results.insert(id.clone(), outputs);
    }
    Ok(results)
}

/// Validate and execute in one step.
pub fn run_graph(graph: &Graph, seed: u64) -> Result<RunOutputs, GraphError> {
    let plan = validate_and_plan(graph)?;
    execute_plan(&plan, graph, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn graph(v: serde_json::Value) -> Graph {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn empty_graph_plans_empty() {
        let g = graph(json!({"version": 1, "blocks": [], "wires": []}));
        assert!(validate_and_plan(&g).unwrap().order.is_empty());
    }

    #[test]
    fn parse_rejects_unknown_fields_but_keeps_ui() {
        assert!(parse_graph(r#"{"version":1,"blocks":[],"wires":[],"extra":1}"#).is_err());
        assert!(parse_graph(r#"{"version":2,"blocks":[],"wires":[]}"#).is_err());
        let g = parse_graph(r#"{"version":1,"blocks":[],"wires":[],"ui":{"gen":{"x":1}}}"#).unwrap();
        assert!(g.ui.is_some());
        assert!(parse_graph(r#"{"version":1,"blocks":[{"id":"a","type":"Fft","bogus":1}],"wires":[]}"#).is_err());
    }

    #[test]
    fn chain_order() {
        let g = graph(json!({"version": 1,
            "blocks": [
                {"id": "snr", "type": "SnrMeter"},
                {"id": "ifft", "type": "Ifft"},
                {"id": "fft", "type": "Fft"},
                {"id": "gen", "type": "SignalGenerator"}],
            "wires": [
                {"from": "gen.out", "to": "fft.in"},
                {"from": "fft.out", "to": "ifft.in"},
                {"from": "ifft.out", "to": "snr.estimate"},
                {"from": "gen.out", "to": "snr.reference"}]}));
        assert_eq!(validate_and_plan(&g).unwrap().order, vec!["gen", "fft", "ifft", "snr"]);
        let out = run_graph(&g, 0).unwrap();
        match &out["snr"]["snr"] {
            Value::Scalar(s) => assert!(s.value > 200.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_cycle_detected() {
        let g = graph(json!({"version": 1,
            "blocks": [{"id": "B", "type": "Window"}, {"id": "A", "type": "Window"}],
            "wires": [{"from": "A.out", "to": "B.in"}, {"from": "B.out", "to": "A.in"}]}));
        assert_eq!(validate_and_plan(&g), Err(GraphError::CycleDetected { cycle: vec!["A".into(), "B".into()] }));
    }

    #[test]
    fn validation_errors() {
        let base = |blocks: serde_json::Value, wires: serde_json::Value| {
            validate_and_plan(&graph(json!({"version": 1, "blocks": blocks, "wires": wires}))).unwrap_err().code()
        };
        assert_eq!(base(json!([{"id": "x", "type": "Nope"}]), json!([])), "UnknownBlockType");
        assert_eq!(base(json!([{"id": "g", "type": "SignalGenerator", "params": {"bogus": 1}}]), json!([])), "UnknownParam");
        assert_eq!(base(json!([{"id": "g", "type": "SignalGenerator", "params": {"length": 0}}]), json!([])), "ParamOutOfBounds");
        assert_eq!(
            base(json!([{"id": "g", "type": "SignalGenerator"}, {"id": "w", "type": "Window"}]), json!([{"from": "g.out", "to": "x.in"}])),
            "DanglingWire"
        );
        assert_eq!(
            base(json!([{"id": "g", "type": "SignalGenerator"}, {"id": "p", "type": "PoleZero"}]), json!([{"from": "g.out", "to": "p.tf"}])),
            "KindMismatch"
        );
        assert_eq!(
            base(
                json!([{"id": "g", "type": "SignalGenerator"}, {"id": "h", "type": "SignalGenerator"}, {"id": "w", "type": "Window"}]),
                json!([{"from": "g.out", "to": "w.in"}, {"from": "h.out", "to": "w.in"}])
            ),
            "DuplicateInputWire"
        );
        assert_eq!(base(json!([{"id": "w", "type": "Window"}]), json!([])), "MissingInput");
        assert_eq!(base(json!([{"id": "g", "type": "SampleSource"}, {"id": "g", "type": "SampleSource"}]), json!([])), "DuplicateBlockId");
        assert_eq!(base(json!([{"id": "a.b", "type": "SampleSource"}]), json!([])), "InvalidBlockId");
    }

    #[test]
    fn unstable_filter_halts_when_asked() {
        let g = graph(json!({"version": 1,
            "blocks": [
                {"id": "gen", "type": "SignalGenerator", "params": {"kind": "impulse", "length": 8}},
                {"id": "filt", "type": "FirIirFilter", "params": {"b": [1.0], "a": [1.0, -1.5], "halt_on_unstable": true}}],
            "wires": [{"from": "gen.out", "to": "filt.in"}]}));
        let err = run_graph(&g, 0).unwrap_err();
        assert_eq!(err.code(), "BlockRuntimeError");
        assert_eq!(err.block_id(), Some("filt"));
    }
}
