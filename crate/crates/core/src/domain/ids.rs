//! Typed identifiers. Each entity kind has its own id space rendered with a
//! short prefix (`P001`, `M000042`, ...), so ids stay readable in exported
//! tables while ordering stays numeric.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed {kind} id `{text}`")]
pub struct IdParseError {
    pub kind: &'static str,
    pub text: String,
}

macro_rules! entity_id {
    ($(#[$meta:meta])* $name:ident, $prefix:literal, $width:literal, $kind:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub const PREFIX: &'static str = $prefix;

            pub fn index(self) -> u32 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.pad(&format!("{}{:0w$}", $prefix, self.0, w = $width))
            }
        }

        impl FromStr for $name {
            type Err = IdParseError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.strip_prefix($prefix)
                    .filter(|digits| !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|digits| digits.parse().ok())
                    .map($name)
                    .ok_or_else(|| IdParseError { kind: $kind, text: s.to_owned() })
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let text = String::deserialize(deserializer)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

entity_id!(PatientId, "P", 3, "patient");
entity_id!(HcpId, "H", 2, "hcp");
entity_id!(MeasurementId, "M", 6, "measurement");
entity_id!(AlertId, "A", 5, "alert");
entity_id!(ResponseId, "R", 5, "response");
entity_id!(MedicationChangeId, "MC", 4, "medication change");
entity_id!(AdmissionId, "AD", 3, "admission");
entity_id!(ConsultationId, "C", 5, "consultation");
