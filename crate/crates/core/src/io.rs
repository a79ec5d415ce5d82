//! JSON documents for states, tomography datasets and hidden-variable models.
//!
//! State documents write every real number with 17 significant digits, so a
//! write/read cycle reproduces each binary64 value exactly. Complex numbers
//! are `[re, im]` pairs.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hidden_vars::HVModel;
use crate::linalg::{ComplexMatrix, C64};
use crate::states::{DensityMatrix, PureState, State, MAX_QUBITS};
use crate::tomography::{SettingRecord, TomographyDataset};

pub const FORMAT_VERSION: &str = "1";
pub const DATASET_KIND: &str = "tomography_dataset";

/// `{:.16e}`: one leading digit plus sixteen decimals.
pub fn format_f64(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("cannot serialize non-finite value {x}")));
    }
    Ok(format!("{x:.16e}"))
}

fn write_complex(out: &mut String, z: C64) -> Result<()> {
    write!(out, "[{}, {}]", format_f64(z.re)?, format_f64(z.im)?).expect("write to String");
    Ok(())
}

pub fn write_state(state: &State) -> Result<String> {
    let mut out = String::new();
    let n = state.n_qubits();
    match state {
        State::Pure(psi) => {
            write!(
                out,
                "{{\n  \"format_version\": \"{FORMAT_VERSION}\",\n  \"kind\": \"pure\",\n  \"n_qubits\": {n},\n  \"amplitudes\": ["
            )
            .expect("write to String");
            for (k, &z) in psi.amplitudes().iter().enumerate() {
                out.push_str(if k == 0 { "\n    " } else { ",\n    " });
                write_complex(&mut out, z)?;
            }
            out.push_str("\n  ]\n}\n");
        }
        State::Density(rho) => {
            write!(
                out,
                "{{\n  \"format_version\": \"{FORMAT_VERSION}\",\n  \"kind\": \"density\",\n  \"n_qubits\": {n},\n  \"matrix\": ["
            )
            .expect("write to String");
            let m = rho.matrix();
            for i in 0..m.rows() {
                out.push_str(if i == 0 { "\n    [" } else { ",\n    [" });
                for j in 0..m.cols() {
                    if j > 0 {
                        out.push_str(", ");
                    }
                    write_complex(&mut out, m.get(i, j))?;
                }
                out.push(']');
            }
            out.push_str("\n  ]\n}\n");
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStateDocument {
    format_version: String,
    kind: String,
    n_qubits: usize,
    amplitudes: Option<Vec<[f64; 2]>>,
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::document(
            format!("line {}, column {}", e.line(), e.column()),
            strip_position(&e.to_string()),
        )
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(pos) => msg[..pos].to_string(),
        None => msg.to_string(),
    }
}

fn check_version(version: &str) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::document(
            "format_version",
            format!("unsupported version {version:?}, expected {FORMAT_VERSION:?}"),
        ));
    }
    Ok(())
}

fn complex(pair: [f64; 2]) -> C64 {
    C64::new(pair[0], pair[1])
}

pub fn read_state(text: &str) -> Result<State> {
    let raw: RawStateDocument = parse_json(text)?;
    check_version(&raw.format_version)?;
    let n = raw.n_qubits;
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::document("n_qubits", format!("must be 1..={MAX_QUBITS}, got {n}")));
    }
    let dim = 1usize << n;
    match raw.kind.as_str() {
        "pure" => {
            if raw.matrix.is_some() {
                return Err(Error::document("matrix", "not allowed in a pure-state document"));
            }
            let amps = raw
                .amplitudes
                .ok_or_else(|| Error::document("amplitudes", "missing field"))?;
            if amps.len() != dim {
                return Err(Error::document(
                    "amplitudes",
                    format!("{} entries for {n} qubits, expected {dim}", amps.len()),
                ));
            }
            PureState::new(amps.into_iter().map(complex).collect())
                .map(State::Pure)
                .map_err(|e| Error::document("amplitudes", e.to_string()))
        }
        "density" => {
            if raw.amplitudes.is_some() {
                return Err(Error::document("amplitudes", "not allowed in a density document"));
            }
            let rows = raw
                .matrix
                .ok_or_else(|| Error::document("matrix", "missing field"))?;
            if rows.len() != dim {
                return Err(Error::document(
                    "matrix",
                    format!("{} rows for {n} qubits, expected {dim}", rows.len()),
                ));
            }
            let mut data = Vec::with_capacity(dim * dim);
            for (i, row) in rows.into_iter().enumerate() {
                if row.len() != dim {
                    return Err(Error::document(
                        format!("matrix[{i}]"),
                        format!("{} entries, expected {dim}", row.len()),
                    ));
                }
                data.extend(row.into_iter().map(complex));
            }
            let m = ComplexMatrix::new(dim, dim, data)?;
            DensityMatrix::new(m)
                .map(State::Density)
                .map_err(|e| Error::document("matrix", e.to_string()))
        }
        other => Err(Error::document(
            "kind",
            format!("unknown kind {other:?}, expected \"pure\" or \"density\""),
        )),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetDocument {
    format_version: String,
    kind: String,
    n_qubits: usize,
    shots_per_setting: u64,
    records: Vec<SettingRecord>,
}

pub fn write_dataset(data: &TomographyDataset) -> Result<String> {
    let doc = DatasetDocument {
        format_version: FORMAT_VERSION.into(),
        kind: DATASET_KIND.into(),
        n_qubits: data.n_qubits,
        shots_per_setting: data.shots_per_setting,
        records: data.records.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn read_dataset(text: &str) -> Result<TomographyDataset> {
    let doc: DatasetDocument = parse_json(text)?;
    check_version(&doc.format_version)?;
    if doc.kind != DATASET_KIND {
        return Err(Error::document("kind", format!("expected {DATASET_KIND:?}, got {:?}", doc.kind)));
    }
    TomographyDataset::new(doc.n_qubits, doc.shots_per_setting, doc.records)
        .map_err(|e| Error::document("records", e.to_string()))
}

pub fn write_model(model: &HVModel) -> Result<String> {
    let mut text = serde_json::to_string_pretty(model)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn read_model(text: &str) -> Result<HVModel> {
    let model: HVModel = parse_json(text)?;
    model
        .validate()
        .map_err(|e| Error::document("model", e.to_string()))?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{density_from_pure, make_named_state, random_pure_state, NamedState};
    use crate::tomography::simulate_dataset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn location(err: Error) -> String {
        match err {
            Error::Document { location, .. } => location,
            other => panic!("expected a document error, got {other:?}"),
        }
    }

    #[test]
    fn format_has_17_significant_digits() {
        assert_eq!(format_f64(0.1).unwrap(), "1.0000000000000001e-1");
        assert_eq!(format_f64(-0.5).unwrap(), "-5.0000000000000000e-1");
        assert!(format_f64(f64::NAN).is_err());
    }

    #[test]
    fn pure_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3 {
            let state = State::Pure(random_pure_state(n, &mut rng));
            let back = read_state(&write_state(&state).unwrap()).unwrap();
            assert_eq!(back, state);
        }
    }

    #[test]
    fn density_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let state = State::Density(density_from_pure(&random_pure_state(2, &mut rng)));
        let text = write_state(&state).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["kind"], "density");
        assert_eq!(read_state(&text).unwrap(), state);
    }

    #[test]
    fn malformed_state_documents() {
        let singlet = State::Pure(make_named_state(NamedState::Singlet).unwrap());
        let good = write_state(&singlet).unwrap();

        let bad = good.replace("\"1\"", "\"2\"");
        assert_eq!(location(read_state(&bad).unwrap_err()), "format_version");
        let bad = good.replace("\"pure\"", "\"mixed\"");
        assert_eq!(location(read_state(&bad).unwrap_err()), "kind");
        let bad = good.replace("\"n_qubits\": 2", "\"n_qubits\": 3");
        assert_eq!(location(read_state(&bad).unwrap_err()), "amplitudes");
        let bad = good.replacen("0.0000000000000000e0", "9e-1", 1);
        assert_eq!(location(read_state(&bad).unwrap_err()), "amplitudes");
        let bad = good.replace("\"kind\"", "\"extra\": 1, \"kind\"");
        assert!(location(read_state(&bad).unwrap_err()).starts_with("line 3"));
        assert!(location(read_state("{").unwrap_err()).starts_with("line 1"));
    }

    #[test]
    fn malformed_density_rows() {
        let doc = r#"{"format_version": "1", "kind": "density", "n_qubits": 1,
            "matrix": [[[1, 0], [0, 0]], [[0, 0]]]}"#;
        assert_eq!(location(read_state(doc).unwrap_err()), "matrix[1]");
        let doc = r#"{"format_version": "1", "kind": "density", "n_qubits": 1,
            "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}"#;
        assert_eq!(location(read_state(doc).unwrap_err()), "matrix");
    }

    #[test]
    fn dataset_round_trip() {
        let rho = density_from_pure(&make_named_state(NamedState::Singlet).unwrap());
        let data = simulate_dataset(&rho, 50, 4).unwrap();
        let text = write_dataset(&data).unwrap();
        assert_eq!(read_dataset(&text).unwrap(), data);
        let bad = text.replacen("\"shots_per_setting\": 50", "\"shots_per_setting\": 51", 1);
        assert_eq!(location(read_dataset(&bad).unwrap_err()), "records");
    }

    #[test]
    fn model_round_trip() {
        let model = HVModel::copier(3).unwrap();
        assert_eq!(read_model(&write_model(&model).unwrap()).unwrap(), model);
        let bad = r#"{"weights": [0.5, 0.4], "cond_a": [[1], [1]], "cond_b": [[1], [1]]}"#;
        assert_eq!(location(read_model(bad).unwrap_err()), "model");
    }
}
