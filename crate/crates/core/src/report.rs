//! Serialization helpers shared by the JSON reports.

use serde::Serializer;

use crate::exact::Q;

pub fn ser_rational<S: Serializer>(value: &Q, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&format!("{}/{}", value.numer(), value.denom()))
}

/// Rounds to 15 significant digits so printed momenta are stable.
pub fn sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Finite values rounded by [`sig15`]; infinities and NaN become `null`.
pub fn ser_sig15_vec<S: Serializer>(values: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = serializer.serialize_seq(Some(values.len()))?;
    for &v in values {
        if v.is_finite() {
            seq.serialize_element(&sig15(v))?;
        } else {
            seq.serialize_element(&Option::<f64>::None)?;
        }
    }
    seq.end()
}
