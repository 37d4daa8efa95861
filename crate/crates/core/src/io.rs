//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs. Matrices are arrays of rows.
//!
//! ```text
//! state:    {"dim": d, "amplitudes": [[re, im], ...]}
//! density:  {"dim": d, "rows": [[[re, im], ...], ...]}
//! channel:  {"dim_in": d, "dim_out": d, "kraus": [<rows>, ...]}
//! profile:  [p_1, ..., p_d]
//! chain:    [{"i": 1, "j": 3, "t": 0.5}, ...]      (1-based indices)
//! ```
//!
//! Every number written by this module is rounded to 15 significant
//! digits first, so output is byte-stable across platforms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::error::CoherenceError;
use crate::majorization::TTransform;
use crate::measures::Observable;
use crate::model::{CMatrix, Channel, DensityMatrix, KrausOperator, ProbabilityProfile, PureState};
use crate::synthesis::SynthesisPlan;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },

    #[error(transparent)]
    Domain(#[from] CoherenceError),
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        field: field.into(),
        message: message.into(),
    }
}

type Pair = [f64; 2];
type Rows = Vec<Vec<Pair>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dim: usize,
    amplitudes: Vec<Pair>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityFile {
    dim: usize,
    rows: Rows,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Rows>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TTransformJson {
    i: usize,
    j: usize,
    t: f64,
}

#[derive(Debug, Serialize)]
struct PlanFile {
    chain: Vec<TTransformJson>,
    pre_unitary: Rows,
    post_unitary: Rows,
}

/// Rounds to 15 significant digits; `-0.0` becomes `0.0`.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn pair(z: Complex64) -> Pair {
    [round15(z.re), round15(z.im)]
}

fn matrix_rows(m: &CMatrix) -> Rows {
    m.row_iter()
        .map(|r| r.iter().map(|&z| pair(z)).collect())
        .collect()
}

fn rows_matrix(
    rows: &Rows,
    nrows: usize,
    ncols: usize,
    field: &str,
) -> Result<CMatrix, FormatError> {
    if rows.len() != nrows {
        return Err(field_err(
            field,
            format!("expected {nrows} rows, found {}", rows.len()),
        ));
    }
    let mut m = DMatrix::zeros(nrows, ncols);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(field_err(
                format!("{field}[{r}]"),
                format!("expected {ncols} entries, found {}", row.len()),
            ));
        }
        for (c, &[re, im]) in row.iter().enumerate() {
            m[(r, c)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

pub fn state_to_value(s: &PureState) -> Value {
    serde_json::to_value(StateFile {
        dim: s.dim(),
        amplitudes: s.amplitudes().iter().map(|&z| pair(z)).collect(),
    })
    .expect("serializable")
}

fn state_from_file(f: StateFile, tol: &ToleranceConfig) -> Result<PureState, FormatError> {
    if f.amplitudes.len() != f.dim {
        return Err(field_err(
            "amplitudes",
            format!(
                "expected {} entries (dim), found {}",
                f.dim,
                f.amplitudes.len()
            ),
        ));
    }
    let amps = f
        .amplitudes
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    PureState::with_tolerance(amps, tol).map_err(|e| field_err("amplitudes", e.to_string()))
}

pub fn state_from_str(text: &str, tol: &ToleranceConfig) -> Result<PureState, FormatError> {
    state_from_file(serde_json::from_str(text)?, tol)
}

pub fn density_to_value(rho: &DensityMatrix) -> Value {
    serde_json::to_value(DensityFile {
        dim: rho.dim(),
        rows: matrix_rows(rho.matrix()),
    })
    .expect("serializable")
}

fn density_from_file(f: DensityFile, tol: &ToleranceConfig) -> Result<DensityMatrix, FormatError> {
    let m = rows_matrix(&f.rows, f.dim, f.dim, "rows")?;
    DensityMatrix::with_tolerance(m, tol).map_err(|e| field_err("rows", e.to_string()))
}

pub fn density_from_str(text: &str, tol: &ToleranceConfig) -> Result<DensityMatrix, FormatError> {
    density_from_file(serde_json::from_str(text)?, tol)
}

/// Accepts either a density-matrix file or a state file (`|s><s|`).
pub fn density_or_state_from_str(
    text: &str,
    tol: &ToleranceConfig,
) -> Result<DensityMatrix, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    if v.get("amplitudes").is_some() {
        Ok(DensityMatrix::from_pure(&state_from_file(
            serde_json::from_value(v)?,
            tol,
        )?))
    } else {
        density_from_file(serde_json::from_value(v)?, tol)
    }
}

/// Accepts a bare profile array, a state file (its profile) or a diagonal
/// density-matrix file (its diagonal).
pub fn profile_from_str(
    text: &str,
    tol: &ToleranceConfig,
) -> Result<ProbabilityProfile, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    match v {
        Value::Array(_) => {
            let entries: Vec<f64> = serde_json::from_value(v)?;
            ProbabilityProfile::with_tolerance(entries, tol)
                .map_err(|e| field_err("profile", e.to_string()))
        }
        Value::Object(ref o) if o.contains_key("amplitudes") => {
            Ok(state_from_file(serde_json::from_value(v)?, tol)?.profile())
        }
        Value::Object(ref o) if o.contains_key("rows") => {
            let rho = density_from_file(serde_json::from_value(v)?, tol)?;
            let off = rho.max_off_diagonal();
            if off > tol.herm_tol {
                return Err(field_err(
                    "rows",
                    format!("state is not incoherent (off-diagonal {off:e})"),
                ));
            }
            ProbabilityProfile::with_tolerance(rho.diagonal_entries(), tol)
                .map_err(|e| field_err("rows", e.to_string()))
        }
        _ => Err(field_err(
            "(root)",
            "expected a profile array or an object with `amplitudes` or `rows`",
        )),
    }
}

/// Accepts a bare array (a diagonal observable) or `{"dim", "rows"}`.
pub fn observable_from_str(text: &str, tol: &ToleranceConfig) -> Result<Observable, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    if v.is_array() {
        let diag: Vec<f64> = serde_json::from_value(v)?;
        if diag.is_empty() || diag.iter().any(|x| !x.is_finite()) {
            return Err(field_err(
                "observable",
                "expected a nonempty array of finite numbers",
            ));
        }
        return Ok(Observable::diagonal(&diag));
    }
    let f: DensityFile = serde_json::from_value(v)?;
    let m = rows_matrix(&f.rows, f.dim, f.dim, "rows")?;
    Observable::new(m, tol).map_err(|e| field_err("rows", e.to_string()))
}

pub fn profile_to_value(p: &ProbabilityProfile) -> Value {
    Value::from(
        p.entries()
            .iter()
            .map(|&x| round15(x))
            .collect::<Vec<f64>>(),
    )
}

pub fn channel_to_value(ch: &Channel) -> Value {
    serde_json::to_value(ChannelFile {
        dim_in: ch.dim_in(),
        dim_out: ch.dim_out(),
        kraus: ch.kraus().iter().map(|k| matrix_rows(k.matrix())).collect(),
    })
    .expect("serializable")
}

pub fn channel_from_str(text: &str, tol: &ToleranceConfig) -> Result<Channel, FormatError> {
    let f: ChannelFile = serde_json::from_str(text)?;
    if f.kraus.is_empty() {
        return Err(field_err(
            "kraus",
            "at least one Kraus operator is required",
        ));
    }
    let kraus = f
        .kraus
        .iter()
        .enumerate()
        .map(|(n, rows)| {
            rows_matrix(rows, f.dim_out, f.dim_in, &format!("kraus[{n}]")).map(KrausOperator)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Channel::with_tolerance(kraus, tol).map_err(|e| field_err("kraus", e.to_string()))
}

pub fn chain_to_value(chain: &[TTransform]) -> Value {
    serde_json::to_value(chain.iter().map(t_json).collect::<Vec<_>>()).expect("serializable")
}

fn t_json(t: &TTransform) -> TTransformJson {
    TTransformJson {
        i: t.i + 1,
        j: t.j + 1,
        t: round15(t.t),
    }
}

pub fn chain_from_str(text: &str) -> Result<Vec<TTransform>, FormatError> {
    let raw: Vec<TTransformJson> = serde_json::from_str(text)?;
    raw.iter()
        .enumerate()
        .map(|(n, t)| {
            if t.i == 0 || t.j == 0 {
                return Err(field_err(format!("[{n}].i"), "indices are 1-based"));
            }
            TTransform::new(t.i - 1, t.j - 1, t.t)
                .map_err(|e| field_err(format!("[{n}]"), e.to_string()))
        })
        .collect()
}

/// The sidecar written next to a synthesized channel.
pub fn plan_to_value(plan: &SynthesisPlan) -> Value {
    serde_json::to_value(PlanFile {
        chain: plan.chain.iter().map(t_json).collect(),
        pre_unitary: matrix_rows(plan.pre_unitary.matrix()),
        post_unitary: matrix_rows(plan.post_unitary.matrix()),
    })
    .expect("serializable")
}

/// Rounds every number in an arbitrary JSON value to 15 significant digits.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !(n.is_i64() || n.is_u64()) => serde_json::Number::from_f64(round15(x))
                .map(Value::Number)
                .unwrap_or(Value::Null),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}
