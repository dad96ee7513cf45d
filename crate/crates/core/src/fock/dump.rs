use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use super::basis::enumerate_basis;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::numeric::C64;

/// Entries with modulus at or below this are omitted from dumps.
pub const DUMP_THRESHOLD: f64 = 1e-15;

/// JSON dump: `{"modes": M, "cutoff": N, "amplitudes": [[[occ...], re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub modes: usize,
    pub cutoff: usize,
    pub amplitudes: Vec<DumpEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DumpEntry {
    pub occupation: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

impl Serialize for DumpEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(3)?;
        t.serialize_element(&self.occupation)?;
        t.serialize_element(&self.re)?;
        t.serialize_element(&self.im)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for DumpEntry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EntryVisitor;

        impl<'de> Visitor<'de> for EntryVisitor {
            type Value = DumpEntry;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("[[occupations...], re, im]")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<DumpEntry, A::Error> {
                let occupation = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let re = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let im = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(2, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(4, &self));
                }
                Ok(DumpEntry { occupation, re, im })
            }
        }

        deserializer.deserialize_seq(EntryVisitor)
    }
}

impl StateDump {
    pub fn from_state(state: &StateVector) -> Self {
        let basis = state.basis();
        let amplitudes = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > DUMP_THRESHOLD)
            .map(|(i, a)| DumpEntry { occupation: basis.occupation(i).to_vec(), re: a.re, im: a.im })
            .collect();
        Self { modes: basis.modes(), cutoff: basis.cutoff(), amplitudes }
    }

    pub fn to_state(&self) -> Result<StateVector> {
        let basis = enumerate_basis(self.modes, self.cutoff)?;
        let mut amps = vec![C64::new(0.0, 0.0); basis.dimension()];
        for e in &self.amplitudes {
            let i = basis.index_of(&e.occupation).ok_or_else(|| {
                Error::InvalidParameter(format!("dump entry {:?} is outside the declared basis", e.occupation))
            })?;
            amps[i] = C64::new(e.re, e.im);
        }
        StateVector::new(basis, amps)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
