use std::collections::{BTreeMap, BTreeSet};

use base64::Engine as _;
use jdsp_core::design::{design_iir, FirDesignRequest, IirSpec};
use jdsp_core::graph::{execute_plan, find_block, validate_and_plan, Graph, GraphError, Value};
use jdsp_core::quantum::{qft_codec, CodecConfig, CodecReport, NoiseModel};
use jdsp_core::signal::read_wav;
use jdsp_core::{DspError, TransferFunction, ENGINE_VERSION};
use serde::{Deserialize, Serialize};

/// Error body shared by the HTTP service and CLI messages.
#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{error}: {detail}")]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub error: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_id: Option<String>,
}

impl ApiError {
    pub fn client(code: &str, detail: impl Into<String>) -> Self {
        ApiError { status: 400, error: code.into(), detail: detail.into(), block_id: None }
    }

    pub fn is_client_error(&self) -> bool {
        self.status < 500
    }
}

impl From<GraphError> for ApiError {
    fn from(e: GraphError) -> Self {
        ApiError {
            status: if e.is_engine_fault() { 500 } else { 400 },
            error: e.code().into(),
            detail: e.to_string(),
            block_id: e.block_id().map(String::from),
        }
    }
}

impl From<DspError> for ApiError {
    fn from(e: DspError) -> Self {
        let engine = matches!(e, DspError::NumericalFailure(_) | DspError::NoConvergence { .. });
        ApiError { status: if engine { 500 } else { 400 }, error: e.code().into(), detail: e.to_string(), block_id: None }
    }
}

pub fn malformed(e: serde_json::Error) -> ApiError {
    ApiError::client("MalformedRequest", e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateRequest {
    pub graph: Graph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateResponse {
    pub valid: bool,
    pub order: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRequest {
    pub graph: Graph,
    #[serde(default)]
    pub seed: u64,
    /// `blockId.port` entries; all outputs of sink blocks when absent.
    #[serde(default)]
    pub outputs: Option<Vec<String>>,
}

/// Wall-clock timing is left out of the body so identical requests give
/// byte-identical responses; the HTTP layer reports it in a header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResponse {
    pub engine_version: String,
    pub seed: u64,
    pub order: Vec<String>,
    pub outputs: BTreeMap<String, Value>,
}

pub fn validate(req: &ValidateRequest) -> Result<ValidateResponse, ApiError> {
    let plan = validate_and_plan(&req.graph)?;
    Ok(ValidateResponse { valid: true, order: plan.order })
}

fn requested_outputs(graph: &Graph, outputs: &Option<Vec<String>>) -> Result<Vec<(String, String)>, ApiError> {
    match outputs {
        Some(list) => list
            .iter()
            .map(|entry| {
                let unknown = || ApiError::client("UnknownOutput", format!("no output {entry:?} in the graph"));
                let (b, p) = entry.split_once('.').ok_or_else(unknown)?;
                let inst = graph.block(b).ok_or_else(unknown)?;
                find_block(&inst.type_name).and_then(|d| d.output(p).cloned()).ok_or_else(unknown)?;
                Ok((b.to_string(), p.to_string()))
            })
            .collect(),
        None => Ok(graph
            .sinks()
            .into_iter()
            .flat_map(|id| {
                let ports = graph
                    .block(&id)
                    .and_then(|b| find_block(&b.type_name))
                    .map(|d| d.outputs.into_iter().map(|p| p.name).collect::<Vec<_>>())
                    .unwrap_or_default();
                ports.into_iter().map(move |p| (id.clone(), p))
            })
            .collect()),
    }
}

/// The requested blocks and everything upstream of them.
fn upstream_subgraph(graph: &Graph, wanted: &BTreeSet<&str>) -> Graph {
    let mut keep: BTreeSet<String> = wanted.iter().map(|s| s.to_string()).collect();
    loop {
        let before = keep.len();
        for w in &graph.wires {
            let (from, to) = (w.from.split('.').next().unwrap_or(""), w.to.split('.').next().unwrap_or(""));
            if keep.contains(to) {
                keep.insert(from.to_string());
            }
        }
        if keep.len() == before {
            break;
        }
    }
    let mut g = graph.clone();
    g.blocks.retain(|b| keep.contains(&b.id));
    g.wires.retain(|w| keep.contains(w.to.split('.').next().unwrap_or("")));
    g
}

/// Validates the whole graph, then runs only what the requested outputs
/// depend on. Per-block seeding makes the pruned run agree with a full one.
pub fn execute(req: &RunRequest) -> Result<RunResponse, ApiError> {
    let full_plan = validate_and_plan(&req.graph)?;
    let wanted = requested_outputs(&req.graph, &req.outputs)?;
    let ids: BTreeSet<&str> = wanted.iter().map(|(b, _)| b.as_str()).collect();
    let sub = upstream_subgraph(&req.graph, &ids);
    let plan = validate_and_plan(&sub)?;
    let mut results = execute_plan(&plan, &sub, req.seed)?;
    let mut outputs = BTreeMap::new();
    for (b, p) in wanted {
        let value = results.get_mut(&b).and_then(|o| o.remove(&p)).ok_or_else(|| ApiError {
            status: 500,
            error: "PlanMismatch".into(),
            detail: format!("output {b}.{p} was not produced"),
            block_id: Some(b.clone()),
        })?;
        outputs.insert(format!("{b}.{p}"), value);
    }
    Ok(RunResponse { engine_version: ENGINE_VERSION.into(), seed: req.seed, order: full_plan.order, outputs })
}

pub fn design_fir(req: &FirDesignRequest) -> Result<TransferFunction, ApiError> {
    Ok(req.design()?)
}

pub fn design_iir_tf(spec: &IirSpec) -> Result<TransferFunction, ApiError> {
    Ok(design_iir(spec)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodecRequest {
    pub n_qubits: usize,
    pub peaks: usize,
    #[serde(default = "NoiseModel::noiseless")]
    pub noise: NoiseModel,
    #[serde(default)]
    pub samples: Option<Vec<f64>>,
    #[serde(default)]
    pub wav_base64: Option<String>,
}

/// Runs the codec on at most `2^n_qubits` leading samples.
pub fn codec_report(samples: &[f64], cfg: &CodecConfig) -> Result<CodecReport, ApiError> {
    cfg.validate()?;
    let take = samples.len().min(1 << cfg.n_qubits);
    Ok(qft_codec(&samples[..take], cfg)?.report(cfg))
}

pub fn codec(req: &CodecRequest) -> Result<CodecReport, ApiError> {
    let samples = match (&req.samples, &req.wav_base64) {
        (Some(s), None) => s.clone(),
        (None, Some(b64)) => {
            let bytes = base64::engine::general_purpose::STANDARD
                .decode(b64.trim())
                .map_err(|e| ApiError::client("MalformedRequest", format!("wav_base64: {e}")))?;
            read_wav(&bytes)?.samples
        }
        _ => return Err(ApiError::client("MalformedRequest", "give exactly one of samples or wav_base64")),
    };
    codec_report(&samples, &CodecConfig { n_qubits: req.n_qubits, peaks: req.peaks, noise: req.noise })
}
