//! Index-based view of a finite instance for exhaustive enumeration.
//!
//! Points of `F_p²` are indexed `x·p + y`; group elements by their canonical
//! position. The action table is filled from [`act`] once, and each row is
//! checked to be a permutation of the carrier.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::instance::ActionInstance;
use super::point::{act, Point};
use crate::algebra::Scalar;
use crate::error::{Error, Result};

/// Default refusal threshold for exhaustive jobs, in inner evaluations.
pub const DEFAULT_WORK_CAP: u64 = 1_000_000_000;

/// Refuse a job whose estimated work exceeds `cap`.
pub fn ensure_within_cap(required: u64, cap: u64) -> Result<()> {
    if required > cap {
        Err(Error::CapExceeded { required, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct EncodingIdx {
    pub secret: usize,
    pub blind: Scalar,
    pub point: usize,
}

/// `(v1, v2, v3)` as point indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TranscriptKey {
    pub v1: usize,
    pub v2: usize,
    pub v3: usize,
}

#[derive(Clone, Debug)]
pub struct FiniteAction {
    p: u32,
    np: usize,
    ng: usize,
    images: Vec<u32>,
    inverse: Vec<usize>,
    secrets: Vec<Scalar>,
    encodings: Vec<EncodingIdx>,
}

impl FiniteAction {
    pub(crate) fn build(instance: &ActionInstance) -> Result<Self> {
        let group = instance.finite_group()?;
        let p = group.modulus();
        let np = (p as usize) * (p as usize);
        let field = instance.domain().elements()?;
        let carrier: Vec<Point> = field
            .iter()
            .flat_map(|x| field.iter().map(move |y| Point::new(x.clone(), y.clone())))
            .collect::<Result<_>>()?;
        let mut images = Vec::with_capacity(group.len() * np);
        for m in group.elements() {
            let mut hit = vec![false; np];
            for x in &carrier {
                let y = point_index(&act(m, x)?, p);
                if std::mem::replace(&mut hit[y], true) {
                    return Err(Error::InvalidInstance(format!("{m} does not permute the carrier")));
                }
                images.push(y as u32);
            }
        }
        let inverse = (0..group.len()).map(|i| group.inverse_index(i)).collect();
        let secrets = instance.secrets().to_vec();
        let encodings = instance
            .encodings()?
            .into_iter()
            .map(|(s, t, pt)| EncodingIdx {
                secret: secrets.binary_search(&s).expect("s in S"),
                blind: t,
                point: point_index(&pt, p),
            })
            .collect::<Vec<_>>();
        for (i, _) in secrets.iter().enumerate() {
            if !encodings.iter().any(|e| e.secret == i) {
                return Err(Error::InvalidInstance(format!(
                    "secret {} has no admissible encoding",
                    secrets[i]
                )));
            }
        }
        Ok(FiniteAction {
            p,
            np,
            ng: group.len(),
            images,
            inverse,
            secrets,
            encodings,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn num_points(&self) -> usize {
        self.np
    }

    pub fn group_len(&self) -> usize {
        self.ng
    }

    pub fn secrets(&self) -> &[Scalar] {
        &self.secrets
    }

    pub fn encodings(&self) -> &[EncodingIdx] {
        &self.encodings
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    #[inline]
    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.images[g * self.np + x] as usize
    }

    pub fn point(&self, index: usize) -> Point {
        let p = self.p as i64;
        Point::fp(self.p, index as i64 / p, index as i64 % p)
    }

    pub fn index(&self, point: &Point) -> Result<usize> {
        match point.domain().modulus() {
            Some(q) if q == self.p => Ok(point_index(point, self.p)),
            _ => Err(Error::DomainMismatch(
                crate::algebra::Domain::Prime(self.p),
                point.domain(),
            )),
        }
    }

    /// `(v·A, v·A·B, v·A·B·A⁻¹)`.
    #[inline]
    pub fn transcript(&self, v: usize, a: usize, b: usize) -> TranscriptKey {
        let v1 = self.apply(a, v);
        let v2 = self.apply(b, v1);
        let v3 = self.apply(self.inverse[a], v2);
        TranscriptKey { v1, v2, v3 }
    }

    /// Bob's final output `v₄ = v₃·B⁻¹`.
    #[inline]
    pub fn final_point(&self, v: usize, a: usize, b: usize) -> usize {
        let t = self.transcript(v, a, b);
        self.apply(self.inverse[b], t.v3)
    }

    /// Number of admissible blinds for each secret.
    pub fn blinds_per_secret(&self) -> Vec<u64> {
        let mut n = vec![0u64; self.secrets.len()];
        for e in &self.encodings {
            n[e.secret] += 1;
        }
        n
    }

    /// Evaluations needed to enumerate every `(s, t, A, B)`.
    pub fn joint_work(&self) -> u64 {
        let e = self.encodings.len() as u64;
        let g = self.ng as u64;
        e.saturating_mul(g).saturating_mul(g + 1)
    }

    /// `reach[x][s]`: some `(s, t)` encoding and `g` map to point `x`.
    pub fn masking_reach(&self) -> Vec<Vec<bool>> {
        let mut reach = vec![vec![false; self.secrets.len()]; self.np];
        for e in &self.encodings {
            for g in 0..self.ng {
                reach[self.apply(g, e.point)][e.secret] = true;
            }
        }
        reach
    }

    /// Counts of `(t, A, B)` per secret for every reachable transcript.
    ///
    /// Enumerates `(v, A, B)` rather than raw triples, so only realizable
    /// transcripts appear. Work is partitioned by `v₁`; the result does not
    /// depend on the number of worker threads.
    pub fn joint_table(&self, cap: u64) -> Result<JointTable> {
        ensure_within_cap(self.joint_work(), cap)?;
        let mut buckets: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.np];
        for e in &self.encodings {
            for a in 0..self.ng {
                buckets[self.apply(a, e.point)].push((e.secret, a));
            }
        }
        let ns = self.secrets.len();
        let by_v1: Vec<BTreeMap<(u32, u32), Vec<u64>>> = buckets
            .par_iter()
            .enumerate()
            .map(|(v1, bucket)| {
                let mut rows: BTreeMap<(u32, u32), Vec<u64>> = BTreeMap::new();
                for &(s, a) in bucket {
                    let a_inv = self.inverse[a];
                    for b in 0..self.ng {
                        let v2 = self.apply(b, v1);
                        let v3 = self.apply(a_inv, v2);
                        rows.entry((v2 as u32, v3 as u32)).or_insert_with(|| vec![0; ns])[s] += 1;
                    }
                }
                rows
            })
            .collect();
        Ok(JointTable { ns, by_v1 })
    }
}

fn point_index(pt: &Point, p: u32) -> usize {
    let x = pt.x().residue().expect("finite point") as usize;
    let y = pt.y().residue().expect("finite point") as usize;
    x * p as usize + y
}

/// Per-transcript witness counts, grouped by secret index.
#[derive(Clone, Debug)]
pub struct JointTable {
    ns: usize,
    by_v1: Vec<BTreeMap<(u32, u32), Vec<u64>>>,
}

impl JointTable {
    pub fn num_secrets(&self) -> usize {
        self.ns
    }

    pub fn get(&self, key: TranscriptKey) -> Option<&[u64]> {
        self.by_v1
            .get(key.v1)?
            .get(&(key.v2 as u32, key.v3 as u32))
            .map(Vec::as_slice)
    }

    /// Reachable transcripts in ascending key order.
    pub fn iter(&self) -> impl Iterator<Item = (TranscriptKey, &[u64])> {
        self.by_v1.iter().enumerate().flat_map(|(v1, rows)| {
            rows.iter().map(move |(&(v2, v3), counts)| {
                (
                    TranscriptKey {
                        v1,
                        v2: v2 as usize,
                        v3: v3 as usize,
                    },
                    counts.as_slice(),
                )
            })
        })
    }

    pub fn len(&self) -> usize {
        self.by_v1.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
