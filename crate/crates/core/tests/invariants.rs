use proptest::prelude::*;
use triplepass_core::actions::{act, build_instance, InstanceKind, Point};
use triplepass_core::algebra::{commutator, Domain, Mat2, Scalar};
use triplepass_core::protocol::{run_session_with, SecretEncoding, Transcript};

const PRIMES: [u32; 4] = [2, 3, 5, 7];

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(PRIMES.to_vec())
}

fn invertible(p: u32) -> impl Strategy<Value = Mat2> {
    let e = 0..p as i64;
    (e.clone(), e.clone(), e.clone(), e)
        .prop_map(move |(a, b, c, d)| Mat2::fp(p, [[a, b], [c, d]]))
        .prop_filter("invertible", Mat2::is_invertible)
}

fn point(p: u32) -> impl Strategy<Value = Point> {
    (0..p as i64, 0..p as i64).prop_map(move |(x, y)| Point::fp(p, x, y))
}

fn rational() -> impl Strategy<Value = Scalar> {
    (-20i64..20, 1i64..20).prop_map(|(n, d)| Scalar::rational(n, d).unwrap())
}

proptest! {
    #[test]
    fn field_axioms(p in prime(), a in 0i64..7, b in 0i64..7, c in 0i64..7) {
        let (a, b, c) = (Scalar::fp(a, p), Scalar::fp(b, p), Scalar::fp(c, p));
        prop_assert_eq!(a.mul(&b.add(&c)?)?, a.mul(&b)?.add(&a.mul(&c)?)?);
        prop_assert_eq!(a.add(&a.neg())?, Domain::Prime(p).zero());
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv()?)?.is_one());
        }
    }

    #[test]
    fn rational_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(a.mul(&b.add(&c)?)?, a.mul(&b)?.add(&a.mul(&c)?)?);
        prop_assert_eq!(a.sub(&b)?.add(&b)?, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(a.div(&b)?.mul(&b)?, a);
        }
    }

    #[test]
    fn group_laws((p, g, h, k) in prime().prop_flat_map(|p| (Just(p), invertible(p), invertible(p), invertible(p)))) {
        prop_assert_eq!(g.mul(&h)?.mul(&k)?, g.mul(&h.mul(&k)?)?);
        prop_assert!(g.mul(&g.inv()?)?.is_identity());
        prop_assert_eq!(g.mul(&h)?.det(), g.det().mul(&h.det())?);
        prop_assert_eq!(Mat2::identity(Domain::Prime(p)).mul(&g)?, g);
    }

    /// Row vectors: `v·(g·h) = (v·g)·h`.
    #[test]
    fn right_action((g, h, v) in prime().prop_flat_map(|p| (invertible(p), invertible(p), point(p)))) {
        prop_assert_eq!(act(&g.mul(&h)?, &v)?, act(&h, &act(&g, &v)?)?);
    }

    /// `v₄ = v·A·B·A⁻¹·B⁻¹`, and `v₄ = v` whenever the masks commute.
    #[test]
    fn session_end_is_the_commutator((a, b, s, t) in prime().prop_flat_map(|p| (invertible(p), invertible(p), 1..p as i64, 0..p as i64))) {
        let p = a.domain().modulus().unwrap();
        let inst = build_instance(InstanceKind::Trivial, p).unwrap();
        let enc = SecretEncoding { s: Scalar::fp(s, p), t: Scalar::fp(t, p), v: Point::fp(p, s, t) };
        let out = run_session_with(&inst, &enc, &a, &b, 0)?;
        let c = commutator(&b.inv()?, &a.inv()?)?;
        prop_assert_eq!(&out.commutator_applied, &c);
        prop_assert_eq!(&out.v4, &act(&c, &enc.v)?);
        if a.commutes_with(&b)? {
            prop_assert!(out.success);
        }
    }

    #[test]
    fn literals_round_trip(m in prime().prop_flat_map(invertible)) {
        let text = m.to_string();
        prop_assert_eq!(text.parse::<Mat2>()?, m);
    }

    #[test]
    fn transcripts_round_trip((a, b, s, t, session) in (invertible(5), invertible(5), 1..5i64, 0..5i64, any::<u64>())) {
        let inst = build_instance(InstanceKind::GeneralLinear, 5).unwrap();
        let enc = SecretEncoding { s: Scalar::fp(s, 5), t: Scalar::fp(t, 5), v: Point::fp(5, s, t) };
        let tr = run_session_with(&inst, &enc, &a, &b, session)?.transcript;
        prop_assert_eq!(Transcript::from_json(&tr.to_json(true))?, tr.clone());
        prop_assert_eq!(Transcript::from_json(&tr.to_json(false))?, tr.adversary_view());
    }

    #[test]
    fn rational_sessions_follow_commutation(seed in any::<u64>()) {
        use rand::SeedableRng;
        let inst = build_instance(InstanceKind::RationalGl2, 0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s = inst.sample_secret(&mut rng);
        let out = triplepass_core::protocol::run_session(&inst, &s, &mut rng, 0)?;
        let truth = out.transcript.truth.as_ref().unwrap();
        let v = inst.encode_point(&truth.s, &truth.t)?;
        prop_assert_eq!(out.success, act(&out.commutator_applied, &v)? == v);
    }
}
