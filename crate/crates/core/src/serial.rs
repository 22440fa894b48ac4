//! Serde helpers shared by the model file formats.

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A log-probability written as a JSON number, or the token `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogValue(pub f64);

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for LogValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct LogValueVisitor;

        impl Visitor<'_> for LogValueVisitor {
            type Value = LogValue;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a finite number or \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<LogValue, E> {
                Ok(LogValue(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<LogValue, E> {
                Ok(LogValue(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<LogValue, E> {
                Ok(LogValue(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<LogValue, E> {
                match v {
                    "-inf" => Ok(LogValue(f64::NEG_INFINITY)),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(LogValueVisitor)
    }
}

pub(crate) fn log_pair(v: [f64; 2]) -> [LogValue; 2] {
    v.map(LogValue)
}

pub(crate) fn unlog_pair(v: [LogValue; 2]) -> [f64; 2] {
    v.map(|x| x.0)
}

/// Reads `format_version` before committing to a document layout.
pub(crate) fn check_version(text: &str, expected: u32) -> crate::Result<serde_json::Value> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| crate::Error::Format(e.to_string()))?;
    let found = doc
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| crate::Error::Format("missing format_version".into()))?;
    if found != expected as u64 {
        return Err(crate::Error::FormatVersionMismatch {
            found: found.min(u32::MAX as u64) as u32,
            expected,
        });
    }
    Ok(doc)
}
