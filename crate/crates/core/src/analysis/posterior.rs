use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::witness::enumerate_consistent;
use crate::actions::ActionInstance;
use crate::algebra::{Domain, Scalar};
use crate::error::{Error, Result};
use crate::protocol::Transcript;

/// An exact distribution over the instance's secret domain, aligned with
/// `instance.secrets()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prior {
    secrets: Vec<Scalar>,
    weights: Vec<BigRational>,
}

impl Prior {
    pub fn uniform(instance: &ActionInstance) -> Self {
        let n = instance.secrets().len();
        let w = BigRational::new(BigInt::one(), BigInt::from(n));
        Prior {
            secrets: instance.secrets().to_vec(),
            weights: vec![w; n],
        }
    }

    /// Weights for listed secrets; unlisted secrets get zero. Must sum to 1.
    pub fn from_weights(instance: &ActionInstance, weights: &[(Scalar, BigRational)]) -> Result<Self> {
        let secrets = instance.secrets().to_vec();
        let mut out = vec![BigRational::zero(); secrets.len()];
        for (s, w) in weights {
            let i = secrets
                .binary_search(s)
                .map_err(|_| Error::InvalidPrior(format!("{s} is outside the secret domain")))?;
            if w.is_negative() {
                return Err(Error::InvalidPrior(format!("negative weight for {s}")));
            }
            out[i] += w;
        }
        let total: BigRational = out.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidPrior(format!("weights sum to {total}, not 1")));
        }
        Ok(Prior { secrets, weights: out })
    }

    /// `uniform`, or a list like `1:1/2,2:1/4,3:1/4`.
    pub fn parse(text: &str, instance: &ActionInstance) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "uniform" {
            return Ok(Prior::uniform(instance));
        }
        let mut weights = Vec::new();
        for item in text.split(',') {
            let (s, w) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidPrior(format!("`{item}` is not s:weight")))?;
            let s = instance.domain().parse_scalar(s)?;
            let w = match Domain::Rational.parse_scalar(w)? {
                Scalar::Q(q) => q,
                Scalar::Fp { .. } => unreachable!(),
            };
            weights.push((s, w));
        }
        Prior::from_weights(instance, &weights)
    }

    pub fn secrets(&self) -> &[Scalar] {
        &self.secrets
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> &BigRational {
        &self.weights[index]
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.weights
            .iter()
            .filter(|w| !w.is_zero())
            .map(|w| -ratio_f64(w) * log2_ratio(w))
            .sum()
    }

    pub(crate) fn check_against(&self, instance: &ActionInstance) -> Result<()> {
        if self.secrets != instance.secrets() {
            return Err(Error::InvalidPrior(
                "prior was built for a different secret domain".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn ratio_f64(q: &BigRational) -> f64 {
    q.to_f64().expect("finite ratio")
}

/// `log₂(n/d)` evaluated as `log₂ n − log₂ d` so exact 1 gives exactly 0.
pub(crate) fn log2_ratio(q: &BigRational) -> f64 {
    if q.is_one() {
        return 0.0;
    }
    let n = q.numer().to_f64().expect("finite numerator");
    let d = q.denom().to_f64().expect("finite denominator");
    n.log2() - d.log2()
}

/// An exact probability with its binary64 convenience value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mass {
    pub s: Scalar,
    pub p: BigRational,
}

impl Serialize for Mass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            s: &'a Scalar,
            p: String,
            p_f64: f64,
        }
        Row {
            s: &self.s,
            p: self.p.to_string(),
            p_f64: ratio_f64(&self.p),
        }
        .serialize(serializer)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PosteriorReport {
    pub transcript: serde_json::Value,
    pub prior: Vec<Mass>,
    pub posterior: Vec<Mass>,
    pub support: Vec<Scalar>,
    pub uniform: bool,
    pub witnesses: u64,
}

impl PosteriorReport {
    pub fn mass(&self, s: &Scalar) -> Option<&BigRational> {
        self.posterior.iter().find(|m| &m.s == s).map(|m| &m.p)
    }
}

/// Exact posterior over secrets given one transcript.
///
/// `posterior(s) ∝ prior(s) · #{(t, A, B) consistent} / #{admissible t for s}`;
/// the denominator is constant unless some `s` admits fewer blinds (only
/// when `0 ∈ S`).
pub fn posterior_from_transcript(
    transcript: &Transcript,
    instance: &ActionInstance,
    prior: &Prior,
    cap: u64,
) -> Result<PosteriorReport> {
    prior.check_against(instance)?;
    let ws = enumerate_consistent(transcript, instance, cap)?;
    if ws.witnesses.is_empty() {
        return Err(Error::InconsistentTranscript);
    }
    let blinds = instance.table()?.blinds_per_secret();
    let unnormalized: Vec<BigRational> = ws
        .counts
        .iter()
        .enumerate()
        .map(|(i, (_, n))| prior.weight(i) * BigRational::new(BigInt::from(*n), BigInt::from(blinds[i])))
        .collect();
    let total: BigRational = unnormalized.iter().sum();
    if total.is_zero() {
        // Witnesses exist only for secrets the prior rules out.
        return Err(Error::InconsistentTranscript);
    }
    let posterior: Vec<Mass> = ws
        .counts
        .iter()
        .zip(unnormalized)
        .map(|((s, _), w)| Mass {
            s: s.clone(),
            p: w / &total,
        })
        .collect();
    let support: Vec<Scalar> = posterior
        .iter()
        .filter(|m| !m.p.is_zero())
        .map(|m| m.s.clone())
        .collect();
    let uniform = support.len() == posterior.len() && posterior.windows(2).all(|w| w[0].p == w[1].p);
    let sum: BigRational = posterior.iter().map(|m| &m.p).sum();
    assert!(sum.is_one(), "posterior does not normalize");
    Ok(PosteriorReport {
        transcript: transcript.to_adversary_value(),
        prior: prior
            .secrets()
            .iter()
            .zip(prior.weights())
            .map(|(s, p)| Mass {
                s: s.clone(),
                p: p.clone(),
            })
            .collect(),
        posterior,
        support,
        uniform,
        witnesses: ws.witnesses.len() as u64,
    })
}
