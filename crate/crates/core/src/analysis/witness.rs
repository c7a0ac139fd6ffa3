use std::collections::BTreeMap;

use serde::Serialize;

use crate::actions::{ensure_within_cap, transcript_witness, ActionInstance, Witness};
use crate::algebra::Scalar;
use crate::error::{Error, Result};
use crate::protocol::Transcript;

/// Every `(s, t, A, B)` reproducing a transcript exactly.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessSet {
    #[serde(serialize_with = "ser_adversary")]
    pub transcript: Transcript,
    pub witnesses: Vec<Witness>,
    /// Witness count per secret, zero entries included, in canonical order.
    #[serde(serialize_with = "ser_counts")]
    pub counts: Vec<(Scalar, u64)>,
}

fn ser_adversary<S: serde::Serializer>(t: &Transcript, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.to_adversary_value().serialize(s)
}

fn ser_counts<S: serde::Serializer>(c: &[(Scalar, u64)], s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Row<'a> {
        s: &'a Scalar,
        count: u64,
    }
    s.collect_seq(c.iter().map(|(sc, n)| Row { s: sc, count: *n }))
}

impl WitnessSet {
    pub fn count_for(&self, s: &Scalar) -> u64 {
        self.counts.iter().find(|(x, _)| x == s).map_or(0, |(_, n)| *n)
    }

    pub fn secrets_with_witnesses(&self) -> Vec<Scalar> {
        self.counts
            .iter()
            .filter(|(_, n)| *n > 0)
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn contains(&self, w: &Witness) -> bool {
        self.witnesses.binary_search(w).is_ok()
    }
}

/// The transcript must name this instance and live in its domain.
pub(crate) fn check_matches(transcript: &Transcript, instance: &ActionInstance) -> Result<()> {
    if transcript.domain != instance.domain() {
        return Err(Error::TranscriptMismatch(format!(
            "transcript is over {}, instance over {}",
            transcript.domain,
            instance.domain()
        )));
    }
    if transcript.instance != instance.name() {
        return Err(Error::TranscriptMismatch(format!(
            "transcript names instance `{}`, analysing `{}`",
            transcript.instance,
            instance.name()
        )));
    }
    Ok(())
}

/// Exhaustive witness enumeration over `S × T × G × G`.
///
/// Every witness found is re-evaluated directly before it is returned; when
/// the transcript carries ground truth, that tuple must be among them.
pub fn enumerate_consistent(transcript: &Transcript, instance: &ActionInstance, cap: u64) -> Result<WitnessSet> {
    check_matches(transcript, instance)?;
    let table = instance.table()?;
    ensure_within_cap(table.joint_work(), cap)?;
    let group = instance.finite_group()?;
    let v1 = table.index(&transcript.v1)?;
    let v2 = table.index(&transcript.v2)?;
    let v3 = table.index(&transcript.v3)?;

    let mut witnesses = Vec::new();
    for e in table.encodings() {
        for a in 0..table.group_len() {
            if table.apply(a, e.point) != v1 || table.apply(table.inverse(a), v2) != v3 {
                continue;
            }
            for b in 0..table.group_len() {
                if table.apply(b, v1) == v2 {
                    witnesses.push(Witness {
                        s: table.secrets()[e.secret].clone(),
                        t: e.blind.clone(),
                        a: group.element(a).clone(),
                        b: group.element(b).clone(),
                    });
                }
            }
        }
    }
    for w in &witnesses {
        assert!(
            w.reproduces(instance, &transcript.v1, &transcript.v2, &transcript.v3)?,
            "enumerated witness {w:?} does not reproduce its transcript"
        );
    }
    witnesses.sort();

    if let Some(truth) = &transcript.truth {
        let w = Witness {
            s: truth.s.clone(),
            t: truth.t.clone(),
            a: truth.a.clone(),
            b: truth.b.clone(),
        };
        if witnesses.binary_search(&w).is_err() {
            return Err(Error::TranscriptMismatch(
                "recorded ground truth does not reproduce the transcript".into(),
            ));
        }
    }

    let mut by_secret: BTreeMap<&Scalar, u64> = instance.secrets().iter().map(|s| (s, 0)).collect();
    for w in &witnesses {
        *by_secret.get_mut(&w.s).expect("s in S") += 1;
    }
    let counts = by_secret.into_iter().map(|(s, n)| (s.clone(), n)).collect();
    Ok(WitnessSet {
        transcript: transcript.adversary_view(),
        witnesses,
        counts,
    })
}

/// A witness `(t′, A′, B′)` for candidate secret `s′`, or `None`.
///
/// Independent of [`enumerate_consistent`]: direct matrix evaluation in
/// canonical `(t′, A′, B′)` order, no precomputed tables.
pub fn find_witness(transcript: &Transcript, instance: &ActionInstance, s_prime: &Scalar) -> Result<Option<Witness>> {
    check_matches(transcript, instance)?;
    if !instance.contains_secret(s_prime) {
        return Err(Error::NotInSecretDomain(s_prime.to_string()));
    }
    transcript_witness(instance, &transcript.v1, &transcript.v2, &transcript.v3, s_prime)
}
