use std::fs;
use std::path::Path;

use base64::Engine as _;
use jdsp_cli::api::{self, RunRequest};
use jdsp_cli::http::{router, Service};
use jdsp_core::graph::{block_catalog, parse_graph};
use jdsp_core::signal::{write_wav, Signal};
use serde_json::json;
use tokio::io::{AsyncReadExt, AsyncWriteExt};

fn demo() -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../graphs/filter_demo.json");
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn post(svc: &Service, path: &str, body: &serde_json::Value) -> (u16, serde_json::Value) {
    let r = svc.handle("POST", path, body.to_string().as_bytes());
    (r.status, r.json_body())
}

#[test]
fn catalog_is_a_pass_through() {
    let r = Service::default().handle("GET", "/api/catalog", b"");
    assert_eq!(r.status, 200);
    assert_eq!(r.body, serde_json::to_vec(&block_catalog()).unwrap());
}

#[test]
fn errors_map_to_status_codes() {
    let svc = Service::default();
    let cyclic = json!({"graph": {"version": 1,
        "blocks": [{"id": "a", "type": "Window"}, {"id": "b", "type": "Window"}],
        "wires": [{"from": "a.out", "to": "b.in"}, {"from": "b.out", "to": "a.in"}]}, "seed": 0});
    let (status, body) = post(&svc, "/api/graph/execute", &cyclic);
    assert_eq!(status, 400);
    assert_eq!(body["error"], "CycleDetected");

    let r = svc.handle("POST", "/api/graph/execute", b"{not json");
    assert_eq!(r.status, 400);
    assert_eq!(r.json_body()["error"], "MalformedRequest");

    let unstable = json!({"graph": {"version": 1,
        "blocks": [{"id": "src", "type": "SampleSource"},
                   {"id": "filt", "type": "FirIirFilter", "params": {"a": [1, -1.5], "halt_on_unstable": true}}],
        "wires": [{"from": "src.out", "to": "filt.in"}]}});
    let (status, body) = post(&svc, "/api/graph/execute", &unstable);
    assert_eq!(status, 500);
    assert_eq!(body["error"], "BlockRuntimeError");
    assert_eq!(body["block_id"], "filt");

    let huge = json!({"graph": {"version": 1,
        "blocks": [{"id": "gen", "type": "SignalGenerator", "params": {"length": 4194304}},
                   {"id": "up", "type": "Upsampler"}],
        "wires": [{"from": "gen.out", "to": "up.in"}]}});
    let (status, body) = post(&svc, "/api/graph/execute", &huge);
    assert_eq!(status, 400);
    assert_eq!(body["error"], "ResourceLimit");
    assert_eq!(body["block_id"], "up");

    let (status, body) = post(&svc, "/api/graph/execute", &json!({"graph": demo(), "outputs": ["fft.nope"]}));
    assert_eq!(status, 400);
    assert_eq!(body["error"], "UnknownOutput");

    assert_eq!(svc.handle("GET", "/api/graph/execute", b"").status, 405);
    assert_eq!(svc.handle("GET", "/api/nothing", b"").status, 404);
}

#[test]
fn validate_reports_the_plan() {
    let (status, body) = post(&Service::default(), "/api/graph/validate", &json!({"graph": demo()}));
    assert_eq!(status, 200);
    assert_eq!(body["order"], json!(["design", "gen", "filter", "fft", "pz", "response"]));
    let bad = json!({"graph": {"version": 2, "blocks": [], "wires": []}});
    let (status, body) = post(&Service::default(), "/api/graph/validate", &bad);
    assert_eq!(status, 400);
    assert_eq!(body["error"], "UnsupportedVersion");
}

#[test]
fn service_is_stateless() {
    let svc = Service::default();
    let requests = [
        ("/api/graph/execute", json!({"graph": demo(), "seed": 42})),
        ("/api/graph/execute", json!({"graph": demo(), "seed": 7, "outputs": ["gen.out", "pz.pz"]})),
        ("/api/design/iir", json!({"family": "butterworth", "kind": "lowpass", "order": 4, "cutoff": 1.0})),
        ("/api/qft/codec", json!({"n_qubits": 4, "peaks": 2, "samples": [1, 0.5, -0.25, 0, 0.75],
                                  "noise": {"depolarizing_p": 0.05, "shots": 100, "seed": 9}})),
    ];
    let forward: Vec<Vec<u8>> = requests.iter().map(|(p, b)| svc.handle("POST", p, b.to_string().as_bytes()).body).collect();
    let mut backward: Vec<Vec<u8>> =
        requests.iter().rev().map(|(p, b)| svc.handle("POST", p, b.to_string().as_bytes()).body).collect();
    backward.reverse();
    assert_eq!(forward, backward);
}

#[test]
fn pruned_outputs_match_a_full_run() {
    let graph = parse_graph(&demo().to_string()).unwrap();
    let full = api::execute(&RunRequest { graph: graph.clone(), seed: 5, outputs: None }).unwrap();
    let some = api::execute(&RunRequest { graph, seed: 5, outputs: Some(vec!["fft.out".into()]) }).unwrap();
    assert_eq!(some.outputs["fft.out"], full.outputs["fft.out"]);
    assert_eq!(some.outputs.len(), 1);
}

#[test]
fn design_and_codec_endpoints() {
    let svc = Service::default();
    let (status, tf) = post(&svc, "/api/design/fir", &json!({"method": "kaiser", "passband_edge": 0.6283185307179586,
        "stopband_edge": 0.9424777960769379, "stopband_atten_db": 60, "kind": "lowpass"}));
    assert_eq!(status, 200);
    assert_eq!(tf["a"], json!([1.0]));
    let (status, body) = post(&svc, "/api/design/iir", &json!({"family": "elliptic", "kind": "lowpass", "order": 4, "cutoff": 1.0}));
    assert_eq!(status, 400);
    assert_eq!(body["error"], "InvalidSpec");

    let x: Vec<f64> = (0..64).map(|n| (2.0 * std::f64::consts::PI * 5.0 * n as f64 / 64.0).cos() * 0.5).collect();
    let wav = write_wav(&Signal::new(x.clone(), 8000.0).unwrap()).unwrap();
    let b64 = base64::engine::general_purpose::STANDARD.encode(wav);
    let (status, from_wav) = post(&svc, "/api/qft/codec", &json!({"n_qubits": 6, "peaks": 1, "wav_base64": b64}));
    assert_eq!(status, 200, "{from_wav}");
    assert_eq!(from_wav["retained_bins"], json!([5, 59]));
    let (status, _) = post(&svc, "/api/qft/codec", &json!({"n_qubits": 6, "peaks": 1}));
    assert_eq!(status, 400);
    let (status, from_samples) = post(&svc, "/api/qft/codec", &json!({"n_qubits": 6, "peaks": 1, "samples": x}));
    assert_eq!(status, 200);
    let snr = &from_samples["snr_db"];
    assert!(snr == "inf" || snr.as_f64().unwrap() >= 120.0, "{snr}");
}

#[test]
fn static_assets_are_served_from_the_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("index.html"), "<!doctype html>").unwrap();
    fs::write(tmp.path().join("app.js"), "run()").unwrap();
    let svc = Service::new(Some(tmp.path().to_path_buf()));
    let index = svc.handle("GET", "/", b"");
    assert_eq!((index.status, index.content_type), (200, "text/html; charset=utf-8"));
    assert_eq!(index.body, b"<!doctype html>");
    assert_eq!(svc.handle("GET", "/app.js", b"").content_type, "text/javascript; charset=utf-8");
    assert_eq!(svc.handle("GET", "/../secret", b"").status, 404);
    assert_eq!(svc.handle("GET", "/missing.css", b"").status, 404);
    assert_eq!(Service::default().handle("GET", "/", b"").status, 404);
}

#[tokio::test(flavor = "multi_thread")]
async fn axum_wrapper_serves_over_tcp() {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(Service::default())).await.unwrap() });

    let body = json!({"graph": demo(), "seed": 42, "outputs": ["pz.pz"]}).to_string();
    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    let request = format!(
        "POST /api/graph/execute HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    stream.write_all(request.as_bytes()).await.unwrap();
    let mut raw = String::new();
    stream.read_to_string(&mut raw).await.unwrap();
    let (head, payload) = raw.split_once("\r\n\r\n").unwrap();
    assert!(head.starts_with("HTTP/1.1 200"), "{head}");
    assert!(head.to_ascii_lowercase().contains("x-timing-ms:"), "{head}");
    assert!(head.contains("application/json"));
    let direct = Service::default().handle("POST", "/api/graph/execute", body.as_bytes());
    assert_eq!(payload.as_bytes(), direct.body.as_slice());
}
