//! Transcript interchange format.
//!
//! Adversary view: `{"instance", "p", "v1", "v2", "v3", "session"}`.
//! Lab view appends `"truth": {"s", "t", "A", "B"}`. Field order is fixed.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::actions::Point;
use crate::algebra::{Domain, Mat2, RawScalar, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroundTruth {
    pub s: Scalar,
    pub t: Scalar,
    #[serde(rename = "A")]
    pub a: Mat2,
    #[serde(rename = "B")]
    pub b: Mat2,
}

/// What the eavesdropper sees of one session, plus optional ground truth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub instance: String,
    pub domain: Domain,
    pub v1: Point,
    pub v2: Point,
    pub v3: Point,
    pub session: u64,
    pub truth: Option<GroundTruth>,
}

#[derive(Serialize)]
struct View<'a> {
    instance: &'a str,
    p: Domain,
    v1: &'a Point,
    v2: &'a Point,
    v3: &'a Point,
    session: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<&'a GroundTruth>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTranscript {
    instance: String,
    p: Domain,
    v1: [RawScalar; 2],
    v2: [RawScalar; 2],
    v3: [RawScalar; 2],
    #[serde(default)]
    session: u64,
    #[serde(default)]
    truth: Option<RawTruth>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruth {
    s: RawScalar,
    t: RawScalar,
    #[serde(rename = "A")]
    a: String,
    #[serde(rename = "B")]
    b: String,
}

impl Transcript {
    /// The same transcript with ground truth stripped.
    pub fn adversary_view(&self) -> Transcript {
        Transcript {
            truth: None,
            ..self.clone()
        }
    }

    fn view(&self, with_truth: bool) -> View<'_> {
        View {
            instance: &self.instance,
            p: self.domain,
            v1: &self.v1,
            v2: &self.v2,
            v3: &self.v3,
            session: self.session,
            truth: if with_truth { self.truth.as_ref() } else { None },
        }
    }

    /// JSON value of the adversary view; never carries `s`, `t`, `A`, `B`.
    pub fn to_adversary_value(&self) -> Value {
        serde_json::to_value(self.view(false)).expect("serializable")
    }

    /// JSON value of the lab view (truth included when known).
    pub fn to_lab_value(&self) -> Value {
        serde_json::to_value(self.view(true)).expect("serializable")
    }

    pub fn to_json(&self, lab: bool) -> String {
        serde_json::to_string(&self.view(lab)).expect("serializable")
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let raw: RawTranscript = serde_json::from_value(value.clone())?;
        let domain = raw.p;
        let truth = raw
            .truth
            .map(|t| {
                let a: Mat2 = t.a.parse()?;
                let b: Mat2 = t.b.parse()?;
                for m in [&a, &b] {
                    if m.domain() != domain {
                        return Err(Error::DomainMismatch(domain, m.domain()));
                    }
                }
                Ok::<_, Error>(GroundTruth {
                    s: t.s.resolve(domain)?,
                    t: t.t.resolve(domain)?,
                    a,
                    b,
                })
            })
            .transpose()?;
        Ok(Transcript {
            instance: raw.instance,
            domain,
            v1: Point::from_raw(&raw.v1, domain)?,
            v2: Point::from_raw(&raw.v2, domain)?,
            v3: Point::from_raw(&raw.v3, domain)?,
            session: raw.session,
            truth,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Transcript::from_value(&serde_json::from_str(text)?)
    }
}

/// Read either a single transcript object or a run artifact holding a
/// `"transcripts"` array.
pub fn read_transcripts(text: &str) -> Result<Vec<Transcript>> {
    let value: Value = serde_json::from_str(text)?;
    match value.get("transcripts") {
        Some(Value::Array(items)) => items.iter().map(Transcript::from_value).collect(),
        Some(_) => Err(Error::parse("`transcripts` must be an array")),
        None => Ok(vec![Transcript::from_value(&value)?]),
    }
}
