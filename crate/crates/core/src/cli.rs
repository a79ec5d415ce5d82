//! Command-line front end.
//!
//! Every subcommand builds a JSON report; `--json` prints it as-is, otherwise
//! it is rendered as indented `key: value` text.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::correlation::{
    canonical_basis, joint_distribution, quantum_index_per_qubit, reduced_entropy, shannon_index,
    LogBase, MeasurementBasis,
};
use crate::error::{Error, Result};
use crate::hidden_vars::{check_refinement, random_model, ModelSizes};
use crate::io::{read_dataset, read_model, read_state, write_dataset, write_state};
use crate::linalg::{ComplexMatrix, C64};
use crate::pauli_hs::{
    hs_decompose, named_params, rotate_frame, so3_from_axis_angle, su2_from_axis_angle, LocalRotation,
    Mat3,
};
use crate::schmidt::{parse_letters, relative_state, schmidt, subsystem_letter, Bipartition};
use crate::states::{
    fidelity, fidelity_with_pure, make_named_state, purity_report, DensityMatrix, NamedState, State,
    PURE_DEFECT_THRESHOLD,
};
use crate::tomography::{estimate_expectations, reconstruct, simulate_dataset};

const PAULI_BASIS: &str = "Pauli products I, s1, s2, s3 (subsystem a first)";

#[derive(Debug, Parser)]
#[command(name = "entangled", version, about = "Correlation and tomography tools for few-qubit states")]
pub struct Cli {
    /// Print the machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create states.
    #[command(subcommand)]
    State(StateCommand),
    /// Hilbert-Schmidt (Pauli) decomposition.
    #[command(subcommand)]
    Hs(HsCommand),
    /// Schmidt decomposition across a bipartition.
    Schmidt {
        #[command(flatten)]
        input: InputArg,
        /// Bipartition such as `a|bc`.
        #[arg(long)]
        split: String,
    },
    /// State of the complement relative to a state of the given subsystem.
    Relative {
        #[command(flatten)]
        input: InputArg,
        /// State document for the conditioning subsystem.
        #[arg(long)]
        eta: PathBuf,
        /// Conditioning subsystem letters, e.g. `b` or `bc`.
        #[arg(long)]
        subsystem: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Classical and quantum correlation indices.
    Correlate {
        #[command(flatten)]
        input: InputArg,
        /// `schmidt`, `z` or `random:SEED`.
        #[arg(long, default_value = "schmidt")]
        basis: String,
        #[arg(long, default_value = "nats")]
        unit: LogBase,
    },
    /// Hidden-variable refinement checks.
    #[command(subcommand)]
    Hv(HvCommand),
    /// Pauli tomography.
    #[command(subcommand)]
    Tomo(TomoCommand),
}

#[derive(Debug, Args)]
struct InputArg {
    /// Input document; standard input when omitted or `-`.
    #[arg(short, long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum StateCommand {
    /// Write a named state document.
    Make {
        /// `singlet`, `triplet_m0`, `ghz:N` or `state17`.
        #[arg(long)]
        name: String,
        /// `re,im` amplitude of |1>_a|2>_b for `state17`.
        #[arg(long, allow_hyphen_values = true)]
        c1: Option<String>,
        /// `re,im` amplitude of |2>_a|1>_b for `state17`.
        #[arg(long, allow_hyphen_values = true)]
        c2: Option<String>,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum HsCommand {
    /// Named parameters and the purity identity.
    Decompose {
        #[command(flatten)]
        input: InputArg,
        /// Local rotation `SITE:AXIS,ANGLE` with AXIS one of x, y, z or
        /// `nx,ny,nz`; angle in radians. Repeatable.
        #[arg(long, num_args = 1.., allow_hyphen_values = true)]
        rotate: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
enum HvCommand {
    /// Check one model document.
    Check {
        #[arg(long)]
        model: PathBuf,
    },
    /// Random models for seeds `0..N`.
    Sweep {
        #[arg(long)]
        seeds: u64,
        /// `L,di,dj`: hidden values and the two outcome counts.
        #[arg(long)]
        sizes: ModelSizes,
    },
}

#[derive(Debug, Subcommand)]
enum TomoCommand {
    /// Sample every local Pauli setting.
    Simulate {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        /// Dataset file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Linear-inversion reconstruction.
    Reconstruct {
        #[command(flatten)]
        input: InputArg,
        /// Clip negative eigenvalues and renormalize.
        #[arg(long)]
        repair: bool,
        /// State document to compare against.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Write the reconstructed state document here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code: 0 on success, 1 for rejected input, 2 for numerical failure.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli, stdin, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<()> {
    let report = match &cli.command {
        Command::State(StateCommand::Make {
            name,
            c1,
            c2,
            output,
        }) => {
            let psi = make_named_state(parse_named_state(name, c1.as_deref(), c2.as_deref())?)?;
            let text = write_state(&State::Pure(psi))?;
            match output {
                Some(path) => {
                    fs::write(path, text)?;
                    json!({ "state": name, "written": path.display().to_string() })
                }
                None => {
                    stdout.write_all(text.as_bytes())?;
                    return Ok(());
                }
            }
        }
        Command::Hs(HsCommand::Decompose { input, rotate }) => {
            let state = read_state(&read_input(input, stdin)?)?;
            hs_report(&state, rotate)?
        }
        Command::Schmidt { input, split } => {
            let state = read_state(&read_input(input, stdin)?)?;
            schmidt_report(&state, split)?
        }
        Command::Relative {
            input,
            eta,
            subsystem,
            output,
        } => {
            let state = read_state(&read_input(input, stdin)?)?;
            let eta = read_state(&fs::read_to_string(eta)?)?;
            relative_report(&state, &eta, subsystem, output.as_deref())?
        }
        Command::Correlate { input, basis, unit } => {
            let state = read_state(&read_input(input, stdin)?)?;
            correlate_report(&state, basis, *unit)?
        }
        Command::Hv(HvCommand::Check { model }) => {
            let model = read_model(&fs::read_to_string(model)?)?;
            let r = check_refinement(&model)?;
            json!({
                "unit": "nats",
                "hidden_values": model.n_hidden(),
                "outcomes": [model.dim_a(), model.dim_b()],
                "i_hv": r.i_hv,
                "i_shann": r.i_shann,
                "gap": r.gap,
                "equality": r.equality,
            })
        }
        Command::Hv(HvCommand::Sweep { seeds, sizes }) => sweep_report(*seeds, *sizes)?,
        Command::Tomo(TomoCommand::Simulate {
            input,
            shots,
            seed,
            output,
        }) => {
            let rho = read_state(&read_input(input, stdin)?)?.to_density();
            let data = simulate_dataset(&rho, *shots, *seed)?;
            let text = write_dataset(&data)?;
            match output {
                Some(path) => {
                    fs::write(path, text)?;
                    json!({
                        "basis": "local Pauli eigenbases, outcome 0 = +1",
                        "n_qubits": data.n_qubits,
                        "settings": data.records.len(),
                        "shots_per_setting": data.shots_per_setting,
                        "seed": seed,
                        "written": path.display().to_string(),
                    })
                }
                None => {
                    stdout.write_all(text.as_bytes())?;
                    return Ok(());
                }
            }
        }
        Command::Tomo(TomoCommand::Reconstruct {
            input,
            repair,
            reference,
            output,
        }) => {
            let data = read_dataset(&read_input(input, stdin)?)?;
            reconstruct_report(&data, *repair, reference.as_deref(), output.as_deref())?
        }
    };
    let text = if cli.json {
        let mut s = serde_json::to_string_pretty(&report).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        render_text(&report)
    };
    stdout.write_all(text.as_bytes())?;
    Ok(())
}

fn read_input(input: &InputArg, stdin: &mut dyn Read) -> Result<String> {
    match input.input.as_deref() {
        Some(path) if path != Path::new("-") => Ok(fs::read_to_string(path)?),
        _ => {
            let mut text = String::new();
            stdin.read_to_string(&mut text)?;
            Ok(text)
        }
    }
}

fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').collect();
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("cannot parse {s:?} as re,im")))
    };
    match parts[..] {
        [re] => Ok(C64::new(parse(re)?, 0.0)),
        [re, im] => Ok(C64::new(parse(re)?, parse(im)?)),
        _ => Err(Error::InvalidArgument(format!("cannot parse {s:?} as re,im"))),
    }
}

fn parse_named_state(name: &str, c1: Option<&str>, c2: Option<&str>) -> Result<NamedState> {
    if name != "state17" && (c1.is_some() || c2.is_some()) {
        return Err(Error::InvalidArgument("--c1/--c2 only apply to state17".into()));
    }
    match name {
        "singlet" => Ok(NamedState::Singlet),
        "triplet_m0" => Ok(NamedState::TripletM0),
        "state17" => {
            let (Some(c1), Some(c2)) = (c1, c2) else {
                return Err(Error::InvalidArgument("state17 needs --c1 and --c2".into()));
            };
            Ok(NamedState::SingleExcitation {
                c1: parse_complex(c1)?,
                c2: parse_complex(c2)?,
            })
        }
        other => match other.strip_prefix("ghz:") {
            Some(n) => n
                .parse()
                .map(NamedState::Ghz)
                .map_err(|_| Error::InvalidArgument(format!("bad GHZ size {n:?}"))),
            None => Err(Error::InvalidArgument(format!(
                "unknown state {other:?}; expected singlet, triplet_m0, ghz:N or state17"
            ))),
        },
    }
}

/// `SITE:AXIS,ANGLE` → site index, axis, angle.
fn parse_rotation(text: &str) -> Result<(usize, [f64; 3], f64)> {
    let bad = || Error::InvalidArgument(format!("rotation {text:?} must be SITE:AXIS,ANGLE"));
    let (site, rest) = text.split_once(':').ok_or_else(bad)?;
    let site = match parse_letters(site)?[..] {
        [q] => q,
        _ => return Err(bad()),
    };
    let fields: Vec<&str> = rest.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let (axis, angle) = match fields[..] {
        [axis, angle] => {
            let axis = match axis {
                "x" | "1" => [1.0, 0.0, 0.0],
                "y" | "2" => [0.0, 1.0, 0.0],
                "z" | "3" => [0.0, 0.0, 1.0],
                _ => return Err(bad()),
            };
            (axis, num(angle)?)
        }
        [x, y, z, angle] => {
            let v = [num(x)?, num(y)?, num(z)?];
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::InvalidArgument(format!("rotation {text:?} has a zero axis")));
            }
            (v.map(|c| c / norm), num(angle)?)
        }
        _ => return Err(bad()),
    };
    Ok((site, axis, angle))
}

fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn hs_report(state: &State, rotations: &[String]) -> Result<Value> {
    let n = state.n_qubits();
    let rho = state.to_density();
    let mut tensor = hs_decompose(&rho);
    let mut applied = Vec::new();
    if !rotations.is_empty() {
        let mut sites = LocalRotation::identity(n).sites().to_vec();
        for text in rotations {
            let (site, axis, angle) = parse_rotation(text)?;
            if site >= n {
                return Err(Error::InvalidArgument(format!(
                    "rotation site {} outside a {n}-qubit state",
                    subsystem_letter(site)
                )));
            }
            sites[site] = mat3_mul(&so3_from_axis_angle(axis, angle)?, &sites[site]);
            applied.push(text.clone());
        }
        tensor = rotate_frame(&tensor, &LocalRotation::new(sites)?)?;
    }
    let params: Map<String, Value> = match named_params(&tensor) {
        Ok(named) => named.entries().into_iter().map(|(k, v)| (k, json!(v))).collect(),
        Err(_) => tensor.non_identity().map(|(w, v)| (w.label(), json!(v))).collect(),
    };
    let purity = purity_report(&rho);
    let dim = (1usize << n) as f64;
    Ok(json!({
        "basis": PAULI_BASIS,
        "unit": "dimensionless",
        "n_qubits": n,
        "rotations": applied,
        "parameters": params,
        "nonzero_count": tensor.non_identity().filter(|(_, v)| v.abs() > 1e-12).count(),
        "purity_identity": {
            "coefficient_square_sum": tensor.square_sum(),
            "pure_state_value": dim,
            "purity": purity.purity,
            "pure_defect": purity.pure_defect,
            "is_pure": purity.is_pure,
        },
    }))
}

fn pure_input(state: &State) -> Result<&crate::states::PureState> {
    state
        .as_pure()
        .ok_or_else(|| Error::InvalidArgument("this command needs a pure-state document".into()))
}

fn vector_json(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn schmidt_report(state: &State, split: &str) -> Result<Value> {
    let psi = pure_input(state)?;
    let bip = Bipartition::parse(psi.n_qubits(), split)?;
    let dec = schmidt(psi, &bip)?;
    Ok(json!({
        "basis": "computational, subsystem order within each part",
        "unit": "nats",
        "split": bip.to_string(),
        "coefficients": dec.coefficients,
        "entropy": dec.entropy(),
        "basis_a": dec.basis_a.iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
        "basis_b": dec.basis_b.iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
    }))
}

fn relative_report(state: &State, eta: &State, subsystem: &str, output: Option<&Path>) -> Result<Value> {
    let psi = pure_input(state)?;
    let eta = pure_input(eta)?;
    let n = psi.n_qubits();
    let part_b = parse_letters(subsystem)?;
    let part_a: Vec<usize> = (0..n).filter(|q| !part_b.contains(q)).collect();
    let bip = Bipartition::new(n, &part_a)?;
    if bip.part_b() != part_b.as_slice() {
        let mut sorted = part_b.clone();
        sorted.sort_unstable();
        if bip.part_b() != sorted.as_slice() {
            return Err(Error::InvalidArgument(format!("bad subsystem {subsystem:?}")));
        }
    }
    let rel = relative_state(psi, eta, &bip)?;
    let mut report = json!({
        "basis": "computational",
        "unit": "dimensionless",
        "split": bip.to_string(),
        "amplitudes": vector_json(rel.amplitudes()),
    });
    if let Some(path) = output {
        fs::write(path, write_state(&State::Pure(rel))?)?;
        report["written"] = json!(path.display().to_string());
    }
    Ok(report)
}

fn correlate_report(state: &State, basis: &str, unit: LogBase) -> Result<Value> {
    let n = state.n_qubits();
    let (measurement, description) = match basis {
        "schmidt" => {
            let desc = if n == 2 && state.as_pure().is_some() {
                "schmidt".to_string()
            } else {
                "schmidt (per-qubit eigenbases of the reduced states)".to_string()
            };
            (canonical_basis(state)?, desc)
        }
        "z" => (MeasurementBasis::z(n), "z".to_string()),
        other => match other.strip_prefix("random:") {
            Some(seed) => {
                let seed: u64 = seed
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad seed {seed:?}")))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (MeasurementBasis::random_product(n, &mut rng), format!("random product, seed {seed}"))
            }
            None => {
                return Err(Error::InvalidArgument(format!(
                    "unknown basis {other:?}; expected schmidt, z or random:SEED"
                )))
            }
        },
    };
    let rho = state.to_density();
    let table = joint_distribution(state, &measurement)?;
    let i_shann = shannon_index(&table, unit);
    let i_c = unit.from_nats(quantum_index_per_qubit(&rho)?);
    let entropies = (0..n)
        .map(|q| Ok((subsystem_letter(q).to_string(), json!(unit.from_nats(reduced_entropy(&rho, &[q])?)))))
        .collect::<Result<Map<String, Value>>>()?;
    let ratio = if i_c.abs() > 1e-12 { json!(i_shann / i_c) } else { Value::Null };
    Ok(json!({
        "basis": description,
        "unit": unit.unit(),
        "i_shann": i_shann,
        "subsystem_entropies": entropies,
        "i_c": i_c,
        "ratio": ratio,
    }))
}

fn sweep_report(seeds: u64, sizes: ModelSizes) -> Result<Value> {
    if seeds == 0 {
        return Err(Error::InvalidArgument("--seeds must be at least 1".into()));
    }
    let mut gaps = Vec::with_capacity(seeds as usize);
    let mut equality = 0usize;
    for seed in 0..seeds {
        let r = check_refinement(&random_model(seed, sizes)?)?;
        gaps.push(r.gap);
        equality += usize::from(r.equality);
    }
    let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    Ok(json!({
        "unit": "nats",
        "models": seeds,
        "sizes": [sizes.n_hidden, sizes.dim_a, sizes.dim_b],
        "gap_min": min,
        "gap_mean": mean,
        "gap_max": max,
        "violations": gaps.iter().filter(|&&g| g < -1e-12).count(),
        "equality_count": equality,
    }))
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_json(&m.row(i))).collect())
}

fn reconstruct_report(
    data: &crate::tomography::TomographyDataset,
    repair: bool,
    reference: Option<&Path>,
    output: Option<&Path>,
) -> Result<Value> {
    let estimates = estimate_expectations(data)?;
    let rec = reconstruct(&estimates, repair)?;
    let matrix = rec.matrix().clone();
    let mut report = json!({
        "basis": "computational (linear inversion over local Pauli settings)",
        "unit": "dimensionless",
        "n_qubits": data.n_qubits,
        "shots_per_setting": data.shots_per_setting,
        "repaired": repair,
        "raw_min_eigenvalue": rec.raw_min_eigenvalue,
        "min_eigenvalue": rec.min_eigenvalue,
        "pure_defect": rec.pure_defect,
        "is_pure": rec.pure_defect <= PURE_DEFECT_THRESHOLD,
    });
    if let Some(path) = reference {
        let reference = read_state(&fs::read_to_string(path)?)?;
        if reference.n_qubits() != data.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "reference has {} qubits, dataset {}",
                reference.n_qubits(),
                data.n_qubits
            )));
        }
        let f = match &reference {
            State::Pure(psi) => fidelity_with_pure(psi, &matrix),
            State::Density(sigma) => fidelity(&matrix, sigma.matrix())?,
        };
        report["fidelity"] = json!(f);
    }
    match output {
        Some(path) => {
            let rho = DensityMatrix::new(matrix).map_err(|e| {
                Error::InvalidState(format!("reconstruction is not a density matrix ({e}); rerun with --repair"))
            })?;
            fs::write(path, write_state(&State::Density(rho))?)?;
            report["written"] = json!(path.display().to_string());
        }
        None => report["matrix"] = matrix_json(&matrix),
    }
    Ok(report)
}

fn format_number(x: f64) -> String {
    if x == 0.0 || x.abs() < 1e-13 {
        return "0".into();
    }
    if !(1e-4..1e6).contains(&x.abs()) {
        return format!("{x:.6e}");
    }
    let s = format!("{x:.12}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn inline(v: &Value) -> String {
    match v {
        Value::Null => "n/a".into(),
        Value::Number(n) => n
            .as_f64()
            .filter(|_| n.is_f64())
            .map_or_else(|| n.to_string(), format_number),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(inline).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Object(map) => {
            let parts: Vec<String> = map.iter().map(|(k, v)| format!("{k}: {}", inline(v))).collect();
            format!("{{{}}}", parts.join(", "))
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn render_into(out: &mut String, map: &Map<String, Value>, indent: usize) {
    let pad = " ".repeat(indent);
    for (key, value) in map {
        match value {
            Value::Object(inner) => {
                out.push_str(&format!("{pad}{key}:\n"));
                render_into(out, inner, indent + 2);
            }
            Value::Array(items) if !items.iter().all(is_scalar) && !items.is_empty() => {
                out.push_str(&format!("{pad}{key}:\n"));
                for item in items {
                    out.push_str(&format!("{pad}  {}\n", inline(item)));
                }
            }
            other => out.push_str(&format!("{pad}{key}: {}\n", inline(other))),
        }
    }
}

/// Indented `key: value` lines.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    match report {
        Value::Object(map) => render_into(&mut out, map, 0),
        other => out.push_str(&inline(other)),
    }
    out
}

/// SU(2) element for a rotation flag, exposed for tests of the flag syntax.
pub fn rotation_unitary(text: &str) -> Result<(usize, ComplexMatrix)> {
    let (site, axis, angle) = parse_rotation(text)?;
    Ok((site, su2_from_axis_angle(axis, angle)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["entangled"];
        full.extend_from_slice(args);
        let code = run(full, &mut input, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn named_state_parsing() {
        assert_eq!(parse_named_state("singlet", None, None).unwrap(), NamedState::Singlet);
        assert_eq!(parse_named_state("ghz:4", None, None).unwrap(), NamedState::Ghz(4));
        assert!(parse_named_state("ghz:x", None, None).is_err());
        assert!(parse_named_state("state17", Some("1,0"), None).is_err());
        assert!(parse_named_state("singlet", Some("1,0"), None).is_err());
        let s = parse_named_state("state17", Some("0.6,0"), Some("0,-0.8")).unwrap();
        assert_eq!(
            s,
            NamedState::SingleExcitation {
                c1: C64::new(0.6, 0.0),
                c2: C64::new(0.0, -0.8)
            }
        );
    }

    #[test]
    fn rotation_parsing() {
        assert_eq!(parse_rotation("b:z,0.5").unwrap(), (1, [0.0, 0.0, 1.0], 0.5));
        assert_eq!(parse_rotation("a:0,2,0,-1").unwrap(), (0, [0.0, 1.0, 0.0], -1.0));
        assert!(parse_rotation("a:0,0,0,1").is_err());
        assert!(parse_rotation("a:w,1").is_err());
        assert!(parse_rotation("ab:z,1").is_err());
        assert!(parse_rotation("z,1").is_err());
        let (site, u) = rotation_unitary("c:x,1.0").unwrap();
        assert_eq!(site, 2);
        assert!(u.is_unitary(1e-12));
    }

    #[test]
    fn text_rendering() {
        let v = json!({"unit": "bits", "x": 0.5, "tiny": 1e-16, "nested": {"k": [1.0, 2.0]}, "rows": [[1, 2], [3, 4]]});
        let text = render_text(&v);
        assert!(text.contains("unit: bits\n"));
        assert!(text.contains("x: 0.5\n"));
        assert!(text.contains("tiny: 0\n"));
        assert!(text.contains("nested:\n  k: [1, 2]\n"));
        assert!(text.contains("rows:\n  [1, 2]\n  [3, 4]\n"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["--help"], "").0, 0);
        assert_eq!(run_args(&["bogus"], "").0, 1);
        assert_eq!(run_args(&["hs", "decompose"], "{").0, 1);
        let (code, _, err) = run_args(&["state", "make", "--name", "nope"], "");
        assert_eq!(code, 1);
        assert!(err.contains("unknown state"));
    }

    #[test]
    fn pipeline_through_stdin() {
        let (code, doc, _) = run_args(&["state", "make", "--name", "singlet"], "");
        assert_eq!(code, 0);
        let (code, out, _) = run_args(&["--json", "hs", "decompose"], &doc);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        for k in ["t11", "t22", "t33"] {
            assert!((v["parameters"][k].as_f64().unwrap() + 1.0).abs() < 1e-12);
        }
        assert_eq!(v["nonzero_count"], 3);
        assert_eq!(v["parameters"].as_object().unwrap().len(), 15);
    }
}
