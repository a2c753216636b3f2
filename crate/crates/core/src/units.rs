//! Length parsing for configuration files: plain numbers are meters, and
//! strings may carry an `m`, `mm`, `um` or `µm` suffix.

use serde::de::{self, Deserializer, Visitor};

use crate::error::{Error, Result};

pub fn parse_length(text: &str) -> Result<f64> {
    let t = text.trim();
    let (number, divisor): (&str, f64) = if let Some(v) = t.strip_suffix("mm") {
        (v, 1e3)
    } else if let Some(v) = t.strip_suffix("um").or_else(|| t.strip_suffix("µm")) {
        (v, 1e6)
    } else if let Some(v) = t.strip_suffix('m') {
        (v, 1.0)
    } else {
        (t, 1.0)
    };
    let value: f64 =
        number.trim().parse().map_err(|_| Error::InvalidParams(format!("cannot parse length '{text}'")))?;
    if !value.is_finite() {
        return Err(Error::InvalidParams(format!("length '{text}' is not finite")));
    }
    // Dividing by an exact power of ten lands "2.25mm" on the double 2.25e-3.
    Ok(value / divisor)
}

pub fn deserialize_length<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    struct LengthVisitor;

    impl Visitor<'_> for LengthVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a length in meters or a string with an m/mm/um suffix")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<f64, E> {
            parse_length(v).map_err(E::custom)
        }
    }

    d.deserialize_any(LengthVisitor)
}
