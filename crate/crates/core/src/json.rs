//! JSON documents for parameters, states and Fuchsian coefficients.
//!
//! Every number is a string in the backend's text form (`"p/q"`,
//! `"p/q+r/s*i"` for exact values, decimals for approximate ones), so exact
//! values never pass through floats.

use serde_json::{json, Map, Value};

use crate::backlund::{Extended, ExtendedState, TimeConfig};
use crate::error::{Error, Result};
use crate::fuchsian::{FuchsianCoeffs, Pole};
use crate::scalar::{ApproxScalar, ExactScalar, FieldKind, Scalar};
use crate::weyl::{Kappa, ThetaVec};

const INF: &str = "inf";

fn text<S: Scalar>(z: &S) -> Value {
    Value::String(z.to_text())
}

fn field_str<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    v.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field `{key}`")))?
        .as_str()
        .ok_or_else(|| Error::Parse(format!("field `{key}` must be a string")))
}

fn scalar_at<S: Scalar>(v: &Value, key: &str) -> Result<S> {
    S::parse_text(field_str(v, key)?)
}

pub fn kappa_to_json<S: Scalar>(k: &Kappa<S>) -> Value {
    let mut m = Map::new();
    for (i, z) in k.as_array().iter().enumerate() {
        m.insert(format!("k{i}"), text(z));
    }
    Value::Object(m)
}

/// Reads `{k0..k4}`; the Fuchs relation is enforced.
pub fn kappa_from_json<S: Scalar>(v: &Value) -> Result<Kappa<S>> {
    let k = [
        scalar_at(v, "k0")?,
        scalar_at(v, "k1")?,
        scalar_at(v, "k2")?,
        scalar_at(v, "k3")?,
        scalar_at(v, "k4")?,
    ];
    Kappa::new(k)
}

pub fn theta_to_json<S: Scalar>(th: &ThetaVec<S>) -> Value {
    let mut m = Map::new();
    for (i, z) in th.th.iter().enumerate() {
        m.insert(format!("th{}", i + 1), text(z));
    }
    Value::Object(m)
}

pub fn theta_from_json<S: Scalar>(v: &Value) -> Result<ThetaVec<S>> {
    Ok(ThetaVec {
        th: [
            scalar_at(v, "th1")?,
            scalar_at(v, "th2")?,
            scalar_at(v, "th3")?,
            scalar_at(v, "th4")?,
        ],
    })
}

pub fn state_to_json<S: Scalar>(st: &ExtendedState<S>, field: FieldKind) -> Value {
    let t = st.t.t123();
    let t4 = match st.t.t4() {
        Extended::Finite(z) => text(z),
        Extended::Infinity => Value::String(INF.into()),
    };
    json!({
        "field": field,
        "kappa": kappa_to_json(&st.kappa),
        "t": [text(&t[0]), text(&t[1]), text(&t[2]), t4],
        "q": text(&st.q),
        "p": text(&st.p),
    })
}

fn state_from_json<S: Scalar>(v: &Value) -> Result<ExtendedState<S>> {
    let kappa = kappa_from_json(v.get("kappa").ok_or_else(|| Error::Parse("missing field `kappa`".into()))?)?;
    let ts = v
        .get("t")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("field `t` must be an array".into()))?;
    if ts.len() != 4 {
        return Err(Error::Parse(format!("`t` needs 4 entries, got {}", ts.len())));
    }
    let mut finite = Vec::with_capacity(3);
    for z in &ts[..3] {
        let s = z.as_str().ok_or_else(|| Error::Parse("time entries must be strings".into()))?;
        finite.push(S::parse_text(s)?);
    }
    let t4 = match ts[3].as_str() {
        Some(INF) => Extended::Infinity,
        Some(s) => Extended::Finite(S::parse_text(s)?),
        None => return Err(Error::Parse("time entries must be strings".into())),
    };
    let t123: [S; 3] = finite.try_into().map_err(|_| Error::Parse("bad t".into()))?;
    let t = TimeConfig::new(t123, t4)?;
    ExtendedState::new(kappa, t, scalar_at(v, "q")?, scalar_at(v, "p")?)
}

/// A state document in either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyState {
    Exact(ExtendedState<ExactScalar>),
    Approx(ExtendedState<ApproxScalar>),
}

impl AnyState {
    pub fn from_json(v: &Value) -> Result<Self> {
        let field: FieldKind = serde_json::from_value(
            v.get("field").cloned().ok_or_else(|| Error::Parse("missing field `field`".into()))?,
        )
        .map_err(|e| Error::Parse(format!("field: {e}")))?;
        Ok(match field {
            FieldKind::Exact => AnyState::Exact(state_from_json(v)?),
            FieldKind::Approx => AnyState::Approx(state_from_json(v)?),
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyState::Exact(s) => state_to_json(s, FieldKind::Exact),
            AnyState::Approx(s) => state_to_json(s, FieldKind::Approx),
        }
    }

    pub fn field(&self) -> FieldKind {
        match self {
            AnyState::Exact(_) => FieldKind::Exact,
            AnyState::Approx(_) => FieldKind::Approx,
        }
    }

    pub fn to_c64(&self) -> ExtendedState<ApproxScalar> {
        match self {
            AnyState::Exact(s) => s.to_c64(),
            AnyState::Approx(s) => s.clone(),
        }
    }
}

/// `{"field", "poles": [{at, c1, c2_first, c2_second}, ..., {at: "inf", ...}]}`.
/// The infinity entry is derived from the finite poles.
pub fn coeffs_to_json<S: Scalar>(c: &FuchsianCoeffs<S>, field: FieldKind) -> Value {
    let mut poles: Vec<Value> = c
        .poles
        .iter()
        .map(|p| json!({"at": text(&p.at), "c1": text(&p.c1), "c2_first": text(&p.c2_first), "c2_second": text(&p.c2_second)}))
        .collect();
    let inf = c.at_infinity();
    poles.push(json!({"at": INF, "c1": text(&inf.c1), "c2_first": text(&inf.c2_first), "c2_second": text(&inf.c2_second)}));
    json!({"field": field, "poles": poles})
}

/// Reads the poles back; an `inf` entry, if present, must agree with the
/// finite ones to `tol`.
pub fn coeffs_from_json<S: Scalar>(v: &Value, tol: f64) -> Result<FuchsianCoeffs<S>> {
    let arr = v
        .get("poles")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("field `poles` must be an array".into()))?;
    let mut poles = Vec::new();
    let mut inf = None;
    for p in arr {
        let read = || -> Result<(S, S, S)> { Ok((scalar_at(p, "c1")?, scalar_at(p, "c2_first")?, scalar_at(p, "c2_second")?)) };
        if field_str(p, "at")? == INF {
            inf = Some(read()?);
        } else {
            let (c1, c2_first, c2_second) = read()?;
            poles.push(Pole {
                at: scalar_at(p, "at")?,
                c1,
                c2_first,
                c2_second,
            });
        }
    }
    let c = FuchsianCoeffs::new(poles)?;
    if let Some((c1, c2_first, c2_second)) = inf {
        let d = c.at_infinity();
        let off = (d.c1 - c1).to_c64().norm() + (d.c2_first - c2_first).to_c64().norm() + (d.c2_second - c2_second).to_c64().norm();
        if off > tol {
            return Err(Error::Parse(format!("`inf` entry disagrees with the finite poles by {off:.3e}")));
        }
    }
    Ok(c)
}
