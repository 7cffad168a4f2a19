use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use jdsp_core::design::{EquirippleSpec, FirDesignRequest, FirKind, FirSpec, IirFamily, IirSpec};
use jdsp_core::graph::{block_catalog, parse_graph};
use jdsp_core::ml::{classify_features, parse_features_csv};
use jdsp_core::quantum::{CodecConfig, NoiseModel};
use jdsp_core::signal::read_wav;

use crate::api::{self, ApiError, RunRequest};
use crate::fsio::write_atomic;
use crate::http::{self, Service};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "jdsp", version, about = "Block-diagram DSP engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the block catalog
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Execute a graph file and write one file per sink output
    Run {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "jdsp-out")]
        out: PathBuf,
    },
    /// Design a filter and write its transfer function as JSON
    #[command(subcommand)]
    Design(DesignCommand),
    /// QFT peak-picking analysis-synthesis of a WAV file
    QftCodec(CodecArgs),
    /// k-means classification of a labeled features CSV
    Kmeans {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API and the UI bundle
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FirMethod {
    Kaiser,
    Sampling,
    Equiripple,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Lowpass,
    Highpass,
}

impl From<Kind> for FirKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Lowpass => FirKind::Lowpass,
            Kind::Highpass => FirKind::Highpass,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Butterworth,
    Cheby1,
    Cheby2,
    Elliptic,
}

impl From<Family> for IirFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Butterworth => IirFamily::Butterworth,
            Family::Cheby1 => IirFamily::Chebyshev1,
            Family::Cheby2 => IirFamily::Chebyshev2,
            Family::Elliptic => IirFamily::Elliptic,
        }
    }
}

/// Accepts rad/sample as a number or as a multiple of π (`0.2pi`).
fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, scale) = match t.strip_suffix("pi").or_else(|| t.strip_suffix('π')) {
        Some(n) => (n.trim_end_matches('*'), std::f64::consts::PI),
        None => (t, 1.0),
    };
    let v: f64 = if num.is_empty() { 1.0 } else { num.parse().map_err(|_| format!("not an angle: {s:?}"))? };
    Ok(v * scale)
}

#[derive(Debug, Subcommand)]
enum DesignCommand {
    Fir {
        #[arg(long, value_enum)]
        method: FirMethod,
        #[arg(long, value_enum, default_value_t = Kind::Lowpass)]
        kind: Kind,
        /// rad/sample, or a multiple of pi such as 0.2pi
        #[arg(long, value_parser = angle, default_value = "0.2pi")]
        passband_edge: f64,
        #[arg(long, value_parser = angle, default_value = "0.3pi")]
        stopband_edge: f64,
        #[arg(long, default_value_t = 60.0)]
        atten: f64,
        #[arg(long, default_value_t = 31)]
        numtaps: usize,
        /// Comma-separated magnitudes at ω_k = 2πk/N (frequency sampling)
        #[arg(long, value_delimiter = ',')]
        desired_mag: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Iir {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        order: usize,
        #[arg(long, value_parser = angle)]
        cutoff: f64,
        #[arg(long, value_enum, default_value_t = Kind::Lowpass)]
        kind: Kind,
        #[arg(long)]
        ripple: Option<f64>,
        #[arg(long)]
        atten: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CodecArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    qubits: usize,
    #[arg(long)]
    peaks: usize,
    #[arg(long, default_value_t = 0.0)]
    noise_p: f64,
    #[arg(long, default_value_t = 0)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        let mut msg = format!("{}: {}", e.error, e.detail);
        if let Some(b) = &e.block_id {
            msg.push_str(&format!(" (block {b})"));
        }
        Failure::Runtime(msg)
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Failure::Usage(format!("file not found: {}", path.display())),
        _ => Failure::Usage(format!("cannot read {}: {e}", path.display())),
    })
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read_input(path)?).map_err(|_| Failure::Usage(format!("{} is not UTF-8", path.display())))
}

fn write_out(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    write_atomic(path, contents).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `out` when given, otherwise to stdout.
fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(p) => write_out(p, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Runtime(e.to_string())),
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn catalog(json: bool, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cat = block_catalog();
    let text = if json {
        pretty(&cat)
    } else {
        let mut s = String::new();
        for d in &cat {
            let ports = |ps: &[jdsp_core::graph::PortSpec]| {
                ps.iter()
                    .map(|p| format!("{}{}:{}", p.name, if p.optional { "?" } else { "" }, p.kind.name()))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            s.push_str(&format!("{:<18} ({}) -> ({})\n", d.type_name, ports(&d.inputs), ports(&d.outputs)));
            s.push_str(&format!("    {}\n", d.description));
            if !d.params.is_empty() {
                let names: Vec<&str> = d.params.iter().map(|p| p.name.as_str()).collect();
                s.push_str(&format!("    params: {}\n", names.join(", ")));
            }
        }
        s
    };
    stdout.write_all(text.as_bytes()).map_err(|e| Failure::Runtime(e.to_string()))
}

fn run(graph_path: &Path, seed: u64, out: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = read_text(graph_path)?;
    let graph = parse_graph(&text).map_err(ApiError::from)?;
    let resp = api::execute(&RunRequest { graph, seed, outputs: None })?;
    std::fs::create_dir_all(out).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", out.display())))?;
    for (name, value) in &resp.outputs {
        let path = out.join(format!("{name}.{}", value.extension()));
        write_out(&path, value.render().as_bytes())?;
        let _ = writeln!(stdout, "{}", path.display());
    }
    Ok(())
}

fn design(cmd: DesignCommand, stdout: &mut dyn Write) -> Result<(), Failure> {
    let (tf, out) = match cmd {
        DesignCommand::Fir { method, kind, passband_edge, stopband_edge, atten, numtaps, desired_mag, out } => {
            let req = match method {
                FirMethod::Kaiser => FirDesignRequest::Kaiser(FirSpec {
                    passband_edge,
                    stopband_edge,
                    stopband_atten_db: atten,
                    kind: kind.into(),
                }),
                FirMethod::Equiripple => FirDesignRequest::Equiripple(EquirippleSpec::two_band(
                    numtaps,
                    kind.into(),
                    passband_edge,
                    stopband_edge,
                )),
                FirMethod::Sampling => {
                    if desired_mag.is_empty() {
                        return Err(Failure::Usage("--desired-mag is required for the sampling method".into()));
                    }
                    FirDesignRequest::Sampling { desired_mag }
                }
            };
            (api::design_fir(&req)?, out)
        }
        DesignCommand::Iir { family, order, cutoff, kind, ripple, atten, out } => {
            let spec = IirSpec {
                family: family.into(),
                kind: kind.into(),
                order,
                cutoff,
                passband_ripple_db: ripple,
                stopband_atten_db: atten,
            };
            (api::design_iir_tf(&spec)?, out)
        }
    };
    emit(&out, &pretty(&tf), stdout)
}

fn qft_codec(args: CodecArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let bytes = read_input(&args.input)?;
    let signal = read_wav(&bytes).map_err(ApiError::from)?;
    let cfg = CodecConfig {
        n_qubits: args.qubits,
        peaks: args.peaks,
        noise: NoiseModel { depolarizing_p: args.noise_p, shots: args.shots, seed: args.seed },
    };
    let report = api::codec_report(&signal.samples, &cfg)?;
    emit(&args.out, &pretty(&report), stdout)
}

fn kmeans(input: &Path, k: usize, seed: u64, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = read_text(input)?;
    let features = parse_features_csv(&text).map_err(ApiError::from)?;
    let result = classify_features(&features, k, seed).map_err(ApiError::from)?;
    emit(out, &result.confusion.to_csv(), stdout)?;
    if out.is_some() {
        let _ = writeln!(stdout, "accuracy {}", result.confusion.accuracy);
    }
    Ok(())
}

fn serve(port: u16, host: &str, assets: Option<PathBuf>) -> Result<(), Failure> {
    if let Some(dir) = &assets {
        if !dir.is_dir() {
            return Err(Failure::Usage(format!("file not found: {}", dir.display())));
        }
    }
    let addr: SocketAddr =
        format!("{host}:{port}").parse().map_err(|_| Failure::Usage(format!("bad address {host}:{port}")))?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Runtime(e.to_string()))?;
    rt.block_on(http::serve(addr, Service::new(assets))).map_err(|e| Failure::Runtime(e.to_string()))
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            } else {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            };
        }
    };
    let result = match cli.command {
        Command::Catalog { json } => catalog(json, stdout),
        Command::Run { graph, seed, out } => run(&graph, seed, &out, stdout),
        Command::Design(cmd) => design(cmd, stdout),
        Command::QftCodec(args) => qft_codec(args, stdout),
        Command::Kmeans { input, k, seed, out } => kmeans(&input, k, seed, &out, stdout),
        Command::Serve { port, host, assets } => serve(port, &host, assets),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}
