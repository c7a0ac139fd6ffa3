//! The four passes and the two parties' state machines.

use rand::Rng;
use serde::Serialize;

use super::transcript::{GroundTruth, Transcript};
use crate::actions::{act, ActionInstance, Point};
use crate::algebra::{Mat2, Scalar};
use crate::error::{Error, Result};

/// Alice's secret and its blinded encoding `v = (s, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecretEncoding {
    pub s: Scalar,
    pub t: Scalar,
    pub v: Point,
}

/// Draw `t` uniformly and encode `(s, t)`. Rejects `s ∉ S` and the zero vector.
pub fn encode_secret<R: Rng + ?Sized>(instance: &ActionInstance, s: &Scalar, rng: &mut R) -> Result<SecretEncoding> {
    if !instance.contains_secret(s) {
        return Err(Error::NotInSecretDomain(s.to_string()));
    }
    let t = instance.sample_blind(s, rng)?;
    let v = instance.encode_point(s, &t)?;
    Ok(SecretEncoding { s: s.clone(), t, v })
}

fn masked(v: &Point, m: &Mat2) -> Result<Point> {
    if !m.is_invertible() {
        return Err(Error::NotInvertible(m.to_string()));
    }
    act(m, v)
}

/// Pass 1: `v₁ = v·A`.
pub fn alice_mask(v: &Point, a: &Mat2) -> Result<Point> {
    masked(v, a)
}

/// Pass 2: `v₂ = v₁·B`.
pub fn bob_mask(v1: &Point, b: &Mat2) -> Result<Point> {
    masked(v1, b)
}

/// Pass 3: `v₃ = v₂·A⁻¹`.
pub fn alice_unmask(v2: &Point, a: &Mat2) -> Result<Point> {
    act(&a.inv()?, v2)
}

/// Pass 4: `v₄ = v₃·B⁻¹`.
pub fn bob_unmask(v3: &Point, b: &Mat2) -> Result<Point> {
    act(&b.inv()?, v3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Alice,
    Bob,
}

/// One message on the channel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Message {
    pub pass: u8,
    pub from: Role,
    pub point: Point,
}

fn expect(msg: &Message, pass: u8, from: Role) -> Result<()> {
    if msg.pass != pass || msg.from != from {
        return Err(Error::Protocol(format!(
            "expected pass {pass} from {from:?}, got pass {} from {:?}",
            msg.pass, msg.from
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AlicePhase {
    Ready,
    AwaitingBob,
    Done,
}

/// Holds `(v, A)`; sends pass 1, answers pass 2 with pass 3.
#[derive(Clone, Debug)]
pub struct Alice {
    v: Point,
    mask: Mat2,
    phase: AlicePhase,
}

impl Alice {
    pub fn new(v: Point, mask: Mat2) -> Result<Self> {
        if !mask.is_invertible() {
            return Err(Error::NotInvertible(mask.to_string()));
        }
        Ok(Alice {
            v,
            mask,
            phase: AlicePhase::Ready,
        })
    }

    pub fn open(&mut self) -> Result<Message> {
        if self.phase != AlicePhase::Ready {
            return Err(Error::Protocol("Alice already opened this session".into()));
        }
        let point = alice_mask(&self.v, &self.mask)?;
        self.phase = AlicePhase::AwaitingBob;
        Ok(Message {
            pass: 1,
            from: Role::Alice,
            point,
        })
    }

    pub fn handle(&mut self, msg: &Message) -> Result<Message> {
        if self.phase != AlicePhase::AwaitingBob {
            return Err(Error::Protocol(format!("Alice is not expecting pass {}", msg.pass)));
        }
        expect(msg, 2, Role::Bob)?;
        let point = alice_unmask(&msg.point, &self.mask)?;
        self.phase = AlicePhase::Done;
        Ok(Message {
            pass: 3,
            from: Role::Alice,
            point,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BobPhase {
    AwaitingFirst,
    AwaitingThird,
    Done,
}

/// Holds `B`; answers pass 1 with pass 2, then unmasks pass 3.
#[derive(Clone, Debug)]
pub struct Bob {
    mask: Mat2,
    phase: BobPhase,
    output: Option<Point>,
}

impl Bob {
    pub fn new(mask: Mat2) -> Result<Self> {
        if !mask.is_invertible() {
            return Err(Error::NotInvertible(mask.to_string()));
        }
        Ok(Bob {
            mask,
            phase: BobPhase::AwaitingFirst,
            output: None,
        })
    }

    /// Returns Bob's reply, or `None` once the session is complete.
    pub fn handle(&mut self, msg: &Message) -> Result<Option<Message>> {
        match self.phase {
            BobPhase::AwaitingFirst => {
                expect(msg, 1, Role::Alice)?;
                let point = bob_mask(&msg.point, &self.mask)?;
                self.phase = BobPhase::AwaitingThird;
                Ok(Some(Message {
                    pass: 2,
                    from: Role::Bob,
                    point,
                }))
            }
            BobPhase::AwaitingThird => {
                expect(msg, 3, Role::Alice)?;
                self.output = Some(bob_unmask(&msg.point, &self.mask)?);
                self.phase = BobPhase::Done;
                Ok(None)
            }
            BobPhase::Done => Err(Error::Protocol("Bob's session is already complete".into())),
        }
    }

    pub fn output(&self) -> Option<&Point> {
        self.output.as_ref()
    }
}

/// Passive tap: records every message crossing the channel.
#[derive(Clone, Debug, Default)]
pub struct Tap {
    seen: Vec<Message>,
}

impl Tap {
    pub fn observe(&mut self, msg: &Message) {
        self.seen.push(msg.clone());
    }

    pub fn messages(&self) -> &[Message] {
        &self.seen
    }
}

#[derive(Clone, Debug)]
pub struct SessionOutcome {
    pub transcript: Transcript,
    pub v4: Point,
    pub success: bool,
    /// `A·B·A⁻¹·B⁻¹`, so that `v₄ = v·A·B·A⁻¹·B⁻¹`.
    pub commutator_applied: Mat2,
}

/// Run the four passes with fixed choices, through both state machines and a tap.
pub fn run_session_with(
    instance: &ActionInstance,
    encoding: &SecretEncoding,
    a: &Mat2,
    b: &Mat2,
    session: u64,
) -> Result<SessionOutcome> {
    for m in [a, b] {
        if m.domain() != instance.domain() {
            return Err(Error::DomainMismatch(instance.domain(), m.domain()));
        }
    }
    let mut alice = Alice::new(encoding.v.clone(), a.clone())?;
    let mut bob = Bob::new(b.clone())?;
    let mut tap = Tap::default();

    let m1 = alice.open()?;
    tap.observe(&m1);
    let m2 = bob.handle(&m1)?.expect("Bob replies to pass 1");
    tap.observe(&m2);
    let m3 = alice.handle(&m2)?;
    tap.observe(&m3);
    if bob.handle(&m3)?.is_some() {
        return Err(Error::Protocol("Bob replied to pass 3".into()));
    }
    let v4 = bob.output().cloned().expect("Bob finished");

    let seen = tap.messages();
    let transcript = Transcript {
        instance: instance.name().to_string(),
        domain: instance.domain(),
        v1: seen[0].point.clone(),
        v2: seen[1].point.clone(),
        v3: seen[2].point.clone(),
        session,
        truth: Some(GroundTruth {
            s: encoding.s.clone(),
            t: encoding.t.clone(),
            a: a.clone(),
            b: b.clone(),
        }),
    };
    let commutator_applied = a.mul(b)?.mul(&a.inv()?)?.mul(&b.inv()?)?;
    Ok(SessionOutcome {
        success: v4 == encoding.v,
        transcript,
        v4,
        commutator_applied,
    })
}

/// Draw `t`, `A`, `B` (in that order) from `rng` and run one session.
pub fn run_session<R: Rng + ?Sized>(
    instance: &ActionInstance,
    s: &Scalar,
    rng: &mut R,
    session: u64,
) -> Result<SessionOutcome> {
    let encoding = encode_secret(instance, s, rng)?;
    let a = instance.sample_element(rng);
    let b = instance.sample_element(rng);
    run_session_with(instance, &encoding, &a, &b, session)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{build_instance, InstanceKind};
    use crate::algebra::Domain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn enc(p: u32, s: i64, t: i64) -> SecretEncoding {
        SecretEncoding {
            s: Scalar::fp(s, p),
            t: Scalar::fp(t, p),
            v: Point::fp(p, s, t),
        }
    }

    #[test]
    fn identity_masks_round_trip() {
        let inst = build_instance(InstanceKind::GeneralLinear, 3).unwrap();
        let i = Mat2::identity(Domain::Prime(3));
        let out = run_session_with(&inst, &enc(3, 2, 1), &i, &i, 0).unwrap();
        assert!(out.success);
        assert_eq!(out.v4, Point::fp(3, 2, 1));
    }

    #[test]
    fn gl2_f2_failure() {
        let v = Point::fp(2, 1, 0);
        let a = Mat2::fp(2, [[1, 1], [0, 1]]);
        let b = Mat2::fp(2, [[1, 0], [1, 1]]);
        let v1 = alice_mask(&v, &a).unwrap();
        let v2 = bob_mask(&v1, &b).unwrap();
        let v3 = alice_unmask(&v2, &a).unwrap();
        let v4 = bob_unmask(&v3, &b).unwrap();
        assert_eq!(
            [&v1, &v2, &v3, &v4],
            [
                &Point::fp(2, 1, 1),
                &Point::fp(2, 0, 1),
                &Point::fp(2, 0, 1),
                &Point::fp(2, 1, 1)
            ]
        );
        assert_ne!(v4, v);
    }

    #[test]
    fn diagonal_f5_success() {
        let v = Point::fp(5, 2, 3);
        let a = Mat2::fp(5, [[2, 0], [0, 1]]);
        let b = Mat2::fp(5, [[3, 0], [0, 4]]);
        let v1 = alice_mask(&v, &a).unwrap();
        let v2 = bob_mask(&v1, &b).unwrap();
        let v3 = alice_unmask(&v2, &a).unwrap();
        let v4 = bob_unmask(&v3, &b).unwrap();
        assert_eq!(
            [&v1, &v2, &v3, &v4],
            [
                &Point::fp(5, 4, 3),
                &Point::fp(5, 2, 2),
                &Point::fp(5, 1, 2),
                &Point::fp(5, 2, 3)
            ]
        );
    }

    #[test]
    fn singular_masks_are_rejected() {
        let s = Mat2::fp(5, [[1, 1], [1, 1]]);
        let v = Point::fp(5, 1, 2);
        assert!(matches!(alice_mask(&v, &s), Err(Error::NotInvertible(_))));
        assert!(bob_unmask(&v, &s).is_err());
        assert!(Alice::new(v, s.clone()).is_err());
        assert!(Bob::new(s).is_err());
    }

    #[test]
    fn out_of_order_messages_are_rejected() {
        let v = Point::fp(5, 1, 2);
        let a = Mat2::fp(5, [[2, 0], [0, 1]]);
        let mut alice = Alice::new(v.clone(), a.clone()).unwrap();
        let mut bob = Bob::new(a).unwrap();
        let bogus = Message {
            pass: 3,
            from: Role::Alice,
            point: v,
        };
        assert!(matches!(bob.handle(&bogus), Err(Error::Protocol(_))));
        assert!(alice.handle(&bogus).is_err());
        let m1 = alice.open().unwrap();
        assert!(alice.open().is_err());
        let m2 = bob.handle(&m1).unwrap().unwrap();
        assert!(bob.handle(&m1).is_err());
        let m3 = alice.handle(&m2).unwrap();
        assert!(alice.handle(&m2).is_err());
        assert!(bob.handle(&m3).unwrap().is_none());
        assert!(bob.handle(&m3).is_err());
    }

    #[test]
    fn encoding_rules() {
        let inst = build_instance(InstanceKind::Diagonal, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        assert!(matches!(
            encode_secret(&inst, &Scalar::fp(0, 5), &mut rng),
            Err(Error::NotInSecretDomain(_))
        ));
        let e1 = encode_secret(&inst, &Scalar::fp(2, 5), &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let e2 = encode_secret(&inst, &Scalar::fp(2, 5), &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(e1.v, Point::new(e1.s.clone(), e1.t.clone()).unwrap());
    }

    #[test]
    fn rational_blinds_are_bounded() {
        let inst = build_instance(InstanceKind::RationalGl2, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let e = encode_secret(&inst, &Scalar::rational(3, 2).unwrap(), &mut rng).unwrap();
            let (n, d) = e.t.rational_parts().unwrap();
            assert!(n.magnitude() <= &9u32.into() && d <= &9.into() && d >= &1.into());
        }
    }

    #[test]
    fn abelian_sessions_always_succeed() {
        let inst = build_instance(InstanceKind::Rotation, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..200 {
            let s = inst.sample_secret(&mut rng);
            assert!(run_session(&inst, &s, &mut rng, i).unwrap().success);
        }
    }

    #[test]
    fn v4_is_v_times_commutator() {
        let inst = build_instance(InstanceKind::GeneralLinear, 2).unwrap();
        let g = inst.finite_group().unwrap();
        for (s, t, v) in inst.encodings().unwrap() {
            let e = SecretEncoding { s, t, v: v.clone() };
            for a in g.elements() {
                for b in g.elements() {
                    let out = run_session_with(&inst, &e, a, b, 0).unwrap();
                    assert_eq!(out.v4, act(&out.commutator_applied, &v).unwrap());
                    assert_eq!(out.success, out.v4 == v);
                }
            }
        }
    }
}
