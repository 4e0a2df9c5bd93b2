use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nnq::analyze::{influence_set, scaling_report};
use nnq::circuit::{depth, size, width, AdaptiveCircuit, Gate, Mat2, StepKind};
use nnq::compactor::{control_circuit_kd, fanout_circuit};
use nnq::format::{parse_document, serialize, CircuitDocument, CircuitMeta};
use nnq::geom::GridPoint;
use nnq::render::{render, Panel, RenderSpec};
use nnq::teleport::{interact, reorder, reorder_chains, simulate_ccac, InteractionSpec, ReorderSpec, PHASE_DEPTH};
use nnq::verify::{designated_sim, reorder_destinations, verify, Sim, VerifyOptions};

/// Environment variable naming the directory for relative `--out` paths.
const OUT_DIR_VAR: &str = "NNQ_OUT_DIR";

#[derive(Parser)]
#[command(name = "nnq", version, about = "Circuit synthesis and verification for nearest-neighbor qubit grids")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimArg {
    Boolean,
    Stabilizer,
    Dense,
}

impl From<SimArg> for Sim {
    fn from(s: SimArg) -> Self {
        match s {
            SimArg::Boolean => Sim::Boolean,
            SimArg::Stabilizer => Sim::Stabilizer,
            SimArg::Dense => Sim::Dense,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Multi-controlled single-qubit gate on an m^dim hypercube.
    CompileControl {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Gate name (X, Y, Z, H, S, SDG) or a JSON matrix [[re,im],[re,im],[re,im],[re,im]].
        #[arg(long, default_value = "X")]
        gate: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fan-out from the center to every control position.
    CompileFanout {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constant-depth permutation of column 0 from a JSON reorder request.
    CompileReorder {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One routed interaction step from a JSON interaction request.
    CompileInteract {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile an abstract-model circuit document onto a grid.
    CompileCcac {
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a circuit against its metadata.
    Verify {
        circuit: PathBuf,
        /// Defaults to the simulator designated for the circuit kind.
        #[arg(long, value_enum)]
        sim: Option<SimArg>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Depth, size and width after physical expansion.
    Stats {
        circuit: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Light-cone report for one output qubit.
    Analyze {
        circuit: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, value_parser = parse_point)]
        target: GridPoint,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Metrics of controlled-X and fan-out for m = 3, 5, ..., m-max.
    Scaling {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 17)]
        m_max: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a planar circuit as SVG.
    Render {
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "svg")]
        format: Format,
    },
}

#[derive(Debug)]
enum Failure {
    /// Bad input or arguments.
    Usage(String),
    /// A verification ran and found a mismatch.
    Mismatch,
}

impl From<nnq::Error> for Failure {
    fn from(e: nnq::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn parse_point(s: &str) -> Result<GridPoint, String> {
    s.split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("bad coordinate {c:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(GridPoint::new)
}

fn parse_gate(s: &str) -> CliResult<Mat2> {
    if let Some(u) = Gate::named_unitary(s) {
        return Ok(u);
    }
    let u: Mat2 = serde_json::from_str(s).map_err(|e| Failure::Usage(format!("--gate: not a gate name or matrix: {e}")))?;
    if !u.is_unitary() {
        return Err(Failure::Usage("--gate: matrix is not unitary".into()));
    }
    Ok(u)
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Write to `out`, or to `default_name` inside the output directory when
/// that is configured, or to stdout.
fn emit(bytes: &[u8], out: Option<&Path>, default_name: &str) -> CliResult<()> {
    let target = match out {
        Some(p) => Some(resolve_out(p)),
        None => std::env::var_os(OUT_DIR_VAR).map(|d| Path::new(&d).join(default_name)),
    };
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, bytes)?;
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn print(bytes: &[u8]) -> CliResult<()> {
    use std::io::Write;
    std::io::stdout().write_all(bytes)?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let bytes = std::fs::read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_document(path: &Path) -> CliResult<CircuitDocument> {
    let bytes = std::fs::read(path)?;
    parse_document(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn json_line<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

#[derive(Serialize)]
struct Stats {
    model: String,
    dim: usize,
    timesteps: usize,
    logical_steps: usize,
    depth: usize,
    size: usize,
    width: usize,
    measurements: u32,
}

fn stats(circuit: &AdaptiveCircuit) -> Stats {
    Stats {
        model: format!("{:?}", circuit.model),
        dim: circuit.dim,
        timesteps: circuit.timesteps.len(),
        logical_steps: circuit.timesteps.iter().filter(|s| s.kind == StepKind::Logical).count(),
        depth: depth(circuit),
        size: size(circuit),
        width: width(circuit),
        measurements: circuit.measurement_count,
    }
}

fn render_spec(doc: &CircuitDocument) -> RenderSpec {
    let column = |n: usize| (0..n as i64).map(|j| GridPoint::xy(0, j)).collect::<BTreeSet<_>>();
    match &doc.meta {
        Some(CircuitMeta::Reorder { spec }) => {
            let panels = reorder_chains(spec)
                .into_iter()
                .filter(|chains| !chains.is_empty())
                .enumerate()
                .map(|(i, chains)| Panel {
                    steps: i * PHASE_DEPTH..(i + 1) * PHASE_DEPTH,
                    chains,
                })
                .collect();
            let mut data = column(spec.n);
            data.extend(reorder_destinations(spec));
            RenderSpec {
                panels,
                data,
                grid_side: None,
            }
        }
        Some(CircuitMeta::Interact { spec }) => RenderSpec {
            data: column(spec.n),
            ..RenderSpec::default()
        },
        Some(CircuitMeta::Ccac { .. }) => RenderSpec {
            data: column(doc.grid_side.unwrap_or(0)),
            ..RenderSpec::default()
        },
        Some(CircuitMeta::ControlledU { m, dim, .. } | CircuitMeta::Fanout { m, dim }) => {
            let data = nnq::geom::control_layout(*m, *dim)
                .map(|l| {
                    let mut d = l.controls;
                    d.insert(l.target);
                    d
                })
                .unwrap_or_default();
            RenderSpec {
                data,
                ..RenderSpec::default()
            }
        }
        None => RenderSpec::default(),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::CompileControl { m, dim, gate, out } => {
            let u = parse_gate(&gate)?;
            let circuit = control_circuit_kd(m, dim, u)?;
            let bytes = serialize(&circuit, Some(CircuitMeta::ControlledU { m, dim, u }));
            emit(&bytes, out.as_deref(), &format!("control_m{m}_d{dim}.json"))
        }
        Command::CompileFanout { m, dim, out } => {
            let circuit = fanout_circuit(m, dim)?;
            let bytes = serialize(&circuit, Some(CircuitMeta::Fanout { m, dim }));
            emit(&bytes, out.as_deref(), &format!("fanout_m{m}_d{dim}.json"))
        }
        Command::CompileReorder { spec, out } => {
            let spec: ReorderSpec = read_json(&spec)?;
            let circuit = reorder(&spec)?;
            let name = format!("reorder_n{}.json", spec.n);
            emit(&serialize(&circuit, Some(CircuitMeta::Reorder { spec })), out.as_deref(), &name)
        }
        Command::CompileInteract { spec, out } => {
            let spec: InteractionSpec = read_json(&spec)?;
            let circuit = interact(&spec)?;
            let name = format!("interact_n{}.json", spec.n);
            emit(&serialize(&circuit, Some(CircuitMeta::Interact { spec })), out.as_deref(), &name)
        }
        Command::CompileCcac { circuit, out } => {
            let source = read_document(&circuit)?;
            let compiled = simulate_ccac(&source.circuit())?;
            let name = format!("ccac_n{}.json", compiled.grid_side.unwrap_or(0));
            let meta = CircuitMeta::Ccac { source: Box::new(source) };
            emit(&serialize(&compiled, Some(meta)), out.as_deref(), &name)
        }
        Command::Verify {
            circuit,
            sim,
            shots,
            seed,
            format,
        } => {
            let doc = read_document(&circuit)?;
            let meta = doc
                .meta
                .as_ref()
                .ok_or_else(|| Failure::Usage("circuit carries no metadata to verify against".into()))?;
            let opts = VerifyOptions {
                sim: sim.map(Sim::from).unwrap_or_else(|| designated_sim(meta)),
                shots,
                seed,
            };
            let report = verify(&doc, &opts)?;
            let text = match format {
                Format::Json => json_line(&report),
                _ => format!("{report}\n").into_bytes(),
            };
            print(&text)?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Mismatch)
            }
        }
        Command::Stats { circuit, format } => {
            let s = stats(&read_document(&circuit)?.circuit());
            let bytes = match format {
                Format::Json => json_line(&s),
                Format::Csv => format!(
                    "model,dim,timesteps,logical_steps,depth,size,width,measurements\n{},{},{},{},{},{},{},{}\n",
                    s.model, s.dim, s.timesteps, s.logical_steps, s.depth, s.size, s.width, s.measurements
                )
                .into_bytes(),
                _ => format!(
                    "model {}\ndim {}\ntimesteps {}\nlogical steps {}\ndepth {}\nsize {}\nwidth {}\nmeasurements {}\n",
                    s.model, s.dim, s.timesteps, s.logical_steps, s.depth, s.size, s.width, s.measurements
                )
                .into_bytes(),
            };
            print(&bytes)
        }
        Command::Analyze { circuit, target, format } => {
            let cert = influence_set(&read_document(&circuit)?.circuit(), &target)?;
            let bytes = match format {
                Format::Json => json_line(&cert),
                _ => {
                    let mut s = String::new();
                    let _ = writeln!(s, "target {}", cert.target);
                    let _ = writeln!(s, "depth {}", cert.depth);
                    let _ = writeln!(s, "active operations {}", cert.active_ops.len());
                    let _ = writeln!(s, "influence {} qubits", cert.influence.len());
                    let _ = writeln!(s, "depth bound from influence {}", cert.depth_bound);
                    let _ = writeln!(s, "contained in l1 ball of radius depth: {}", cert.contained_in_ball());
                    s.into_bytes()
                }
            };
            print(&bytes)
        }
        Command::Scaling { dim, m_max, format, out } => {
            let ms: Vec<usize> = (3..=m_max).step_by(2).collect();
            if ms.is_empty() {
                return Err(Failure::Usage("--m-max must be at least 3".into()));
            }
            let report = scaling_report(&ms, dim)?;
            let bytes = match format {
                Format::Json => json_line(&report),
                _ => {
                    let mut s = String::from("m,n,depth,size,width,depth_bound,fanout_depth,fanout_size\n");
                    for r in &report.rows {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{},{},{}",
                            r.m, r.n, r.depth, r.size, r.width, r.depth_bound, r.fanout_depth, r.fanout_size
                        );
                    }
                    s.into_bytes()
                }
            };
            let ext = if format == Format::Json { "json" } else { "csv" };
            emit(&bytes, out.as_deref(), &format!("scaling_d{dim}.{ext}"))
        }
        Command::Render { circuit, out, format } => {
            if format != Format::Svg {
                return Err(Failure::Usage("render only produces svg".into()));
            }
            let doc = read_document(&circuit)?;
            let svg = render(&doc.circuit(), &render_spec(&doc))?;
            let stem = circuit.file_stem().and_then(|s| s.to_str()).unwrap_or("circuit");
            emit(svg.as_bytes(), out.as_deref(), &format!("{stem}.svg"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
