//! Group-action instances: carrier plane, secret domain, group, and an
//! optional relabeling of `S × S` into carrier points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::point::{act, Point};
use super::table::FiniteAction;
use crate::algebra::{
    borel_group, commutator_subgroup, enumerate_gl2, subgroup_closure, Domain, FiniteGroup, Mat2, RawScalar, Scalar,
    DEFAULT_PRIME_CAP,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    GeneralLinear,
    Diagonal,
    Rotation,
    Scalar,
    Borel,
    BorelEmbedded,
    Trivial,
    Custom,
    RationalGl2,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 9] = [
        InstanceKind::GeneralLinear,
        InstanceKind::Diagonal,
        InstanceKind::Rotation,
        InstanceKind::Scalar,
        InstanceKind::Borel,
        InstanceKind::BorelEmbedded,
        InstanceKind::Trivial,
        InstanceKind::Custom,
        InstanceKind::RationalGl2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::GeneralLinear => "general-linear",
            InstanceKind::Diagonal => "diagonal",
            InstanceKind::Rotation => "rotation",
            InstanceKind::Scalar => "scalar",
            InstanceKind::Borel => "borel",
            InstanceKind::BorelEmbedded => "borel-embedded",
            InstanceKind::Trivial => "trivial",
            InstanceKind::Custom => "custom",
            InstanceKind::RationalGl2 => "rational-gl2",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidInstance(format!("unknown instance kind `{s}`")))
    }
}

/// One row of an embedding table: `(s, t) ↦ point`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingEntry {
    pub s: RawScalar,
    pub t: RawScalar,
    pub point: [RawScalar; 2],
}

/// The instance descriptor file:
/// `{name, kind, p, generators?, secret_domain?, embedding?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: InstanceKind,
    pub p: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret_domain: Option<Vec<RawScalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<EmbeddingEntry>>,
}

impl InstanceDescriptor {
    pub fn new(kind: InstanceKind, p: u32) -> Self {
        let p = if kind == InstanceKind::RationalGl2 {
            Domain::Rational
        } else {
            Domain::Prime(p)
        };
        InstanceDescriptor {
            name: None,
            kind,
            p,
            generators: None,
            secret_domain: None,
            embedding: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_generators(mut self, gens: &[Mat2]) -> Self {
        self.generators = Some(gens.iter().map(|g| g.to_string()).collect());
        self
    }

    pub fn with_secret_domain(mut self, secrets: &[Scalar]) -> Self {
        self.secret_domain = Some(secrets.iter().map(raw_of).collect());
        self
    }

    pub fn with_embedding(mut self, embedding: &Embedding) -> Self {
        self.embedding = Some(
            embedding
                .entries
                .iter()
                .map(|((s, t), pt)| EmbeddingEntry {
                    s: raw_of(s),
                    t: raw_of(t),
                    point: [raw_of(pt.x()), raw_of(pt.y())],
                })
                .collect(),
        );
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<ActionInstance> {
        self.build_with_cap(DEFAULT_PRIME_CAP)
    }

    /// Validate and materialize the instance. `prime_cap` bounds `p`.
    pub fn build_with_cap(&self, prime_cap: u32) -> Result<ActionInstance> {
        ActionInstance::from_descriptor(self.clone(), prime_cap)
    }
}

fn raw_of(s: &Scalar) -> RawScalar {
    match s.residue() {
        Some(r) => RawScalar::Int(r as i64),
        None => RawScalar::Text(s.to_string()),
    }
}

/// Injection of `S × S` into the carrier plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    entries: BTreeMap<(Scalar, Scalar), Point>,
}

impl Embedding {
    pub fn new(entries: BTreeMap<(Scalar, Scalar), Point>) -> Result<Self> {
        let image: BTreeSet<&Point> = entries.values().collect();
        if image.len() != entries.len() {
            return Err(Error::InvalidInstance("embedding is not injective".into()));
        }
        Ok(Embedding { entries })
    }

    pub fn get(&self, s: &Scalar, t: &Scalar) -> Option<&Point> {
        self.entries.get(&(s.clone(), t.clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Scalar, Scalar), &Point)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug)]
pub enum GroupSpec {
    Finite(FiniteGroup),
    /// `GL₂(Q)` sampled with bounded numerators and denominators; demo only.
    RationalGl2,
}

/// Bounds of the rational sampler: numerators in `[−9, 9]`, denominators in `[1, 9]`.
pub const RATIONAL_NUM_BOUND: i64 = 9;
pub const RATIONAL_DEN_BOUND: i64 = 9;

/// Uniform bounded rational `n/d`, `n ∈ [−9, 9]`, `d ∈ [1, 9]`.
pub fn sample_bounded_rational<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    let n = rng.gen_range(-RATIONAL_NUM_BOUND..=RATIONAL_NUM_BOUND);
    let d = rng.gen_range(1..=RATIONAL_DEN_BOUND);
    Scalar::rational(n, d).expect("nonzero denominator")
}

/// Rejection-sampled invertible rational matrix.
pub fn sample_rational_gl2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    loop {
        let m = Mat2::new(
            sample_bounded_rational(rng),
            sample_bounded_rational(rng),
            sample_bounded_rational(rng),
            sample_bounded_rational(rng),
        )
        .expect("one domain");
        if m.is_invertible() {
            return m;
        }
    }
}

/// A validated `(X, S, G, ·)` universe. The carrier `X` is the full plane
/// over the instance's domain.
#[derive(Clone, Debug)]
pub struct ActionInstance {
    name: String,
    descriptor: InstanceDescriptor,
    domain: Domain,
    group: GroupSpec,
    secrets: Vec<Scalar>,
    blinds: Vec<Scalar>,
    embedding: Option<Embedding>,
    table: Option<Arc<FiniteAction>>,
}

/// `build_instance(kind, p, options)`: shorthand for the descriptor path.
pub fn build_instance(kind: InstanceKind, p: u32) -> Result<ActionInstance> {
    InstanceDescriptor::new(kind, p).build()
}

fn units(domain: Domain) -> Result<Vec<Scalar>> {
    Ok(domain.elements()?.into_iter().filter(|x| !x.is_zero()).collect())
}

fn standard_group(kind: InstanceKind, p: u32, prime_cap: u32) -> Result<FiniteGroup> {
    let domain = Domain::Prime(p);
    let field = domain.elements()?;
    let units = units(domain)?;
    let gens: Vec<Mat2> = match kind {
        InstanceKind::GeneralLinear => return enumerate_gl2(p, prime_cap),
        InstanceKind::Borel | InstanceKind::BorelEmbedded => return borel_group(p),
        InstanceKind::Trivial => vec![Mat2::identity(domain)],
        InstanceKind::Diagonal => {
            let mut g = Vec::new();
            for a in &units {
                for d in &units {
                    g.push(Mat2::diag(a.clone(), d.clone())?);
                }
            }
            g
        }
        InstanceKind::Scalar => units
            .iter()
            .map(|c| Mat2::diag(c.clone(), c.clone()))
            .collect::<Result<_>>()?,
        InstanceKind::Rotation => {
            let mut g = Vec::new();
            for c in &field {
                for s in &field {
                    if c.mul(c)?.add(&s.mul(s)?)?.is_one() {
                        g.push(Mat2::new(c.clone(), s.clone(), s.neg(), c.clone())?);
                    }
                }
            }
            g
        }
        InstanceKind::Custom | InstanceKind::RationalGl2 => unreachable!("handled by caller"),
    };
    subgroup_closure(&gens)
}

impl ActionInstance {
    fn from_descriptor(mut descriptor: InstanceDescriptor, prime_cap: u32) -> Result<Self> {
        let kind = descriptor.kind;
        let name = descriptor.name.clone().unwrap_or_else(|| match descriptor.p {
            Domain::Prime(p) => format!("{kind}-p{p}"),
            Domain::Rational => kind.to_string(),
        });
        descriptor.name = Some(name.clone());

        if kind == InstanceKind::RationalGl2 {
            if descriptor.p != Domain::Rational {
                return Err(Error::InvalidInstance("rational-gl2 requires p = \"Q\"".into()));
            }
            if descriptor.generators.is_some() || descriptor.embedding.is_some() || descriptor.secret_domain.is_some() {
                return Err(Error::InvalidInstance(
                    "rational-gl2 takes no generators, secret domain, or embedding".into(),
                ));
            }
            return Ok(ActionInstance {
                name,
                descriptor,
                domain: Domain::Rational,
                group: GroupSpec::RationalGl2,
                secrets: Vec::new(),
                blinds: Vec::new(),
                embedding: None,
                table: None,
            });
        }

        let p = match descriptor.p {
            Domain::Prime(p) => p,
            Domain::Rational => return Err(Error::InvalidInstance(format!("{kind} requires a prime field"))),
        };
        let domain = Domain::prime(p)?;
        if p > prime_cap {
            return Err(Error::PrimeAboveCap { p, cap: prime_cap });
        }

        let group = match (kind, &descriptor.generators) {
            (InstanceKind::Custom, Some(gens)) if !gens.is_empty() => {
                let gens = gens
                    .iter()
                    .map(|g| parse_generator(g, domain))
                    .collect::<Result<Vec<_>>>()?;
                subgroup_closure(&gens)?
            }
            (InstanceKind::Custom, _) => return Err(Error::InvalidInstance("custom instances need generators".into())),
            (_, Some(_)) => return Err(Error::InvalidInstance(format!("{kind} does not take generators"))),
            (k, None) => standard_group(k, p, prime_cap)?,
        };

        let explicit_secrets = descriptor
            .secret_domain
            .as_ref()
            .map(|raw| {
                let set: BTreeSet<Scalar> = raw.iter().map(|r| r.resolve(domain)).collect::<Result<_>>()?;
                Ok::<_, Error>(set.into_iter().collect::<Vec<_>>())
            })
            .transpose()?;

        let explicit_embedding = descriptor
            .embedding
            .as_ref()
            .map(|rows| {
                let mut map = BTreeMap::new();
                for row in rows {
                    let key = (row.s.resolve(domain)?, row.t.resolve(domain)?);
                    let point = Point::from_raw(&row.point, domain)?;
                    if map.insert(key, point).is_some() {
                        return Err(Error::InvalidInstance("duplicate embedding key".into()));
                    }
                }
                Embedding::new(map)
            })
            .transpose()?;

        let (secrets, embedding) = match (kind, explicit_secrets, explicit_embedding) {
            (InstanceKind::BorelEmbedded, secrets, None) => {
                let (s, e) = fixed_line_embedding(&group, secrets)?;
                descriptor = descriptor.with_secret_domain(&s).with_embedding(&e);
                (s, Some(e))
            }
            (InstanceKind::Trivial, None, e) => (vec![domain.one()], e),
            (_, Some(s), e) => (s, e),
            (_, None, Some(e)) => {
                let s: BTreeSet<Scalar> = e.entries().map(|((s, _), _)| s.clone()).collect();
                (s.into_iter().collect(), Some(e))
            }
            (_, None, None) => (units(domain)?, None),
        };

        if secrets.is_empty() {
            return Err(Error::InvalidInstance("secret domain is empty".into()));
        }
        let blinds = if embedding.is_some() {
            secrets.clone()
        } else {
            domain.elements()?
        };
        if let Some(e) = &embedding {
            let expected = secrets.len() * secrets.len();
            for s in &secrets {
                for t in &secrets {
                    let pt = e
                        .get(s, t)
                        .ok_or_else(|| Error::InvalidInstance(format!("embedding misses ({s},{t})")))?;
                    if pt.domain() != domain {
                        return Err(Error::DomainMismatch(domain, pt.domain()));
                    }
                    if pt.is_zero() {
                        return Err(Error::InvalidInstance(
                            "embedding image contains the zero vector".into(),
                        ));
                    }
                }
            }
            if e.len() != expected {
                return Err(Error::InvalidInstance("embedding has keys outside S × S".into()));
            }
        }

        let mut instance = ActionInstance {
            name,
            descriptor,
            domain,
            group: GroupSpec::Finite(group),
            secrets,
            blinds,
            embedding,
            table: None,
        };
        instance.table = Some(Arc::new(FiniteAction::build(&instance)?));
        Ok(instance)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> InstanceKind {
        self.descriptor.kind
    }

    pub fn descriptor(&self) -> &InstanceDescriptor {
        &self.descriptor
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn group_spec(&self) -> &GroupSpec {
        &self.group
    }

    pub fn finite_group(&self) -> Result<&FiniteGroup> {
        match &self.group {
            GroupSpec::Finite(g) => Ok(g),
            GroupSpec::RationalGl2 => Err(Error::RequiresFiniteGroup),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.group, GroupSpec::Finite(_))
    }

    /// The secret domain `S` in canonical order (empty means `Q⋆` for the rational demo).
    pub fn secrets(&self) -> &[Scalar] {
        &self.secrets
    }

    /// The domain `t` is drawn from: all of `F_p`, or `S` when embedded.
    pub fn blinds(&self) -> &[Scalar] {
        &self.blinds
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    /// Secrets exclude zero, mirroring `s ∈ Q⋆`.
    pub fn is_multiplicative(&self) -> bool {
        self.secrets.iter().all(|s| !s.is_zero())
    }

    pub fn table(&self) -> Result<&FiniteAction> {
        self.table.as_deref().ok_or(Error::RequiresFiniteGroup)
    }

    pub fn contains_secret(&self, s: &Scalar) -> bool {
        match self.group {
            GroupSpec::RationalGl2 => s.domain() == Domain::Rational && !s.is_zero(),
            GroupSpec::Finite(_) => self.secrets.binary_search(s).is_ok(),
        }
    }

    /// The carrier point standing for `(s, t)`, or `None` if `t` is not an
    /// admissible blind. The zero vector is never an encoding.
    pub fn encode_point(&self, s: &Scalar, t: &Scalar) -> Result<Point> {
        if !self.contains_secret(s) {
            return Err(Error::NotInSecretDomain(s.to_string()));
        }
        let point = match &self.embedding {
            Some(e) => e
                .get(s, t)
                .cloned()
                .ok_or_else(|| Error::NotInSecretDomain(format!("blind {t}")))?,
            None => {
                if t.domain() != self.domain {
                    return Err(Error::DomainMismatch(self.domain, t.domain()));
                }
                Point::new(s.clone(), t.clone())?
            }
        };
        if point.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(point)
    }

    /// All admissible `(s, t, point)` in canonical `(s, t)` order.
    pub fn encodings(&self) -> Result<Vec<(Scalar, Scalar, Point)>> {
        self.finite_group()?;
        let mut out = Vec::new();
        for s in &self.secrets {
            for t in &self.blinds {
                match self.encode_point(s, t) {
                    Ok(pt) => out.push((s.clone(), t.clone(), pt)),
                    Err(Error::ZeroVector) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(out)
    }

    /// The points of the (embedded) `S²`, deduplicated and sorted.
    pub fn secret_points(&self) -> Result<Vec<Point>> {
        let set: BTreeSet<Point> = self.encodings()?.into_iter().map(|(_, _, p)| p).collect();
        Ok(set.into_iter().collect())
    }

    /// Draw a blind uniformly among those giving a nonzero encoding.
    pub fn sample_blind<R: Rng + ?Sized>(&self, s: &Scalar, rng: &mut R) -> Result<Scalar> {
        match self.group {
            GroupSpec::RationalGl2 => Ok(sample_bounded_rational(rng)),
            GroupSpec::Finite(_) => {
                let admissible: Vec<&Scalar> = self.blinds.iter().filter(|t| self.encode_point(s, t).is_ok()).collect();
                if admissible.is_empty() {
                    return Err(Error::ZeroVector);
                }
                Ok(admissible[rng.gen_range(0..admissible.len())].clone())
            }
        }
    }

    /// Draw a group element uniformly (bounded rejection sampling for the rational demo).
    pub fn sample_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat2 {
        match &self.group {
            GroupSpec::Finite(g) => g.element(rng.gen_range(0..g.len())).clone(),
            GroupSpec::RationalGl2 => sample_rational_gl2(rng),
        }
    }

    /// Draw a secret uniformly from `S` (a bounded nonzero rational in demo mode).
    pub fn sample_secret<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match self.group {
            GroupSpec::Finite(_) => self.secrets[rng.gen_range(0..self.secrets.len())].clone(),
            GroupSpec::RationalGl2 => loop {
                let s = sample_bounded_rational(rng);
                if !s.is_zero() {
                    return s;
                }
            },
        }
    }

    /// Every group element permutes the carrier; checked exhaustively.
    pub fn verify_bijective(&self) -> Result<bool> {
        let g = self.finite_group()?;
        let points = self.domain.elements()?;
        let carrier: Vec<Point> = points
            .iter()
            .flat_map(|x| points.iter().map(move |y| Point::new(x.clone(), y.clone())))
            .collect::<Result<_>>()?;
        for m in g.elements() {
            let image: BTreeSet<Point> = carrier.iter().map(|x| act(m, x)).collect::<Result<_>>()?;
            if image.len() != carrier.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn parse_generator(text: &str, domain: Domain) -> Result<Mat2> {
    let m: Mat2 = if text.contains('@') {
        text.parse()?
    } else {
        format!("{text}@{domain}").parse()?
    };
    if m.domain() != domain {
        return Err(Error::DomainMismatch(domain, m.domain()));
    }
    Ok(m)
}

/// Nonzero points fixed by every element of `Comm(G)`, in canonical order.
pub fn comm_fixed_nonzero_points(group: &FiniteGroup) -> Result<Vec<Point>> {
    let comm = commutator_subgroup(group)?;
    let field = group.domain().elements()?;
    let mut out = Vec::new();
    for x in &field {
        for y in &field {
            let pt = Point::new(x.clone(), y.clone())?;
            if pt.is_zero() {
                continue;
            }
            let mut fixed = true;
            for c in comm.elements() {
                if act(c, &pt)? != pt {
                    fixed = false;
                    break;
                }
            }
            if fixed {
                out.push(pt);
            }
        }
    }
    Ok(out)
}

/// Relabel `S × S` onto the nonzero comm-fixed points in lexicographic order.
/// Without an explicit `S`, takes `S = {1, …, k}` with `k² ≤ #fixed points`.
pub fn fixed_line_embedding(group: &FiniteGroup, secrets: Option<Vec<Scalar>>) -> Result<(Vec<Scalar>, Embedding)> {
    let fixed = comm_fixed_nonzero_points(group)?;
    let p = group.modulus();
    let secrets = match secrets {
        Some(s) => s,
        None => {
            let mut k = 0usize;
            while (k + 1) * (k + 1) <= fixed.len() && k + 1 < p as usize {
                k += 1;
            }
            (1..=k as i64).map(|i| Scalar::fp(i, p)).collect()
        }
    };
    if secrets.is_empty() {
        return Err(Error::InvalidInstance("no comm-fixed points to embed into".into()));
    }
    if secrets.len() * secrets.len() > fixed.len() {
        return Err(Error::InvalidInstance(format!(
            "|S|² = {} exceeds the {} nonzero comm-fixed points; no injective embedding",
            secrets.len() * secrets.len(),
            fixed.len()
        )));
    }
    let mut entries = BTreeMap::new();
    let mut slots = fixed.into_iter();
    for s in &secrets {
        for t in &secrets {
            entries.insert((s.clone(), t.clone()), slots.next().expect("counted above"));
        }
    }
    Ok((secrets, Embedding::new(entries)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Solutions of c² + s² = 1 over F_p by direct integer arithmetic.
    fn circle_count(p: i64) -> usize {
        (0..p)
            .flat_map(|c| (0..p).map(move |s| (c, s)))
            .filter(|(c, s)| (c * c + s * s) % p == 1)
            .count()
    }

    #[test]
    fn standard_group_sizes() {
        assert_eq!(circle_count(5), 4);
        assert_eq!(circle_count(7), 8);
        let size = |k, p| build_instance(k, p).unwrap().finite_group().unwrap().len();
        assert_eq!(size(InstanceKind::Rotation, 5), 4);
        assert_eq!(size(InstanceKind::Rotation, 7), 8);
        assert_eq!(size(InstanceKind::Diagonal, 5), 16);
        assert_eq!(size(InstanceKind::Scalar, 7), 6);
        assert_eq!(size(InstanceKind::GeneralLinear, 3), 48);
        assert_eq!(size(InstanceKind::Borel, 3), 12);
        assert_eq!(size(InstanceKind::Trivial, 5), 1);
    }

    #[test]
    fn commutative_kinds_are_abelian() {
        for p in [3, 5, 7] {
            for k in [InstanceKind::Diagonal, InstanceKind::Rotation, InstanceKind::Scalar] {
                assert!(build_instance(k, p).unwrap().finite_group().unwrap().is_abelian());
            }
        }
    }

    #[test]
    fn defaults() {
        let d = build_instance(InstanceKind::Diagonal, 5).unwrap();
        assert_eq!(d.name(), "diagonal-p5");
        assert_eq!(d.secrets().len(), 4);
        assert_eq!(d.blinds().len(), 5);
        assert!(d.is_multiplicative());
        assert_eq!(d.encodings().unwrap().len(), 20);
        assert!(d.verify_bijective().unwrap());

        let t = build_instance(InstanceKind::Trivial, 3).unwrap();
        assert_eq!(t.secrets(), &[Scalar::fp(1, 3)]);
    }

    #[test]
    fn borel_embedding_lands_on_fixed_line() {
        let b3 = build_instance(InstanceKind::BorelEmbedded, 3).unwrap();
        assert_eq!(b3.secrets().len(), 1);
        let b5 = build_instance(InstanceKind::BorelEmbedded, 5).unwrap();
        assert_eq!(b5.secrets().len(), 2);
        for pt in b5.secret_points().unwrap() {
            assert!(pt.x().is_zero());
        }
        // The normalized descriptor rebuilds to the same instance.
        let again = b5.descriptor().build().unwrap();
        assert_eq!(again.secret_points().unwrap(), b5.secret_points().unwrap());
    }

    #[test]
    fn embedding_must_be_injective() {
        let d = Domain::Prime(5);
        let one = d.one();
        let two = Scalar::fp(2, 5);
        let pt = Point::fp(5, 0, 1);
        let mut m = BTreeMap::new();
        m.insert((one.clone(), one.clone()), pt.clone());
        m.insert((one, two), pt);
        assert!(Embedding::new(m).is_err());

        let g = borel_group(3).unwrap();
        let too_many = vec![Scalar::fp(1, 3), Scalar::fp(2, 3)];
        assert!(fixed_line_embedding(&g, Some(too_many)).is_err());
    }

    #[test]
    fn custom_instances() {
        let desc = InstanceDescriptor::from_json(
            r#"{"name":"swap","kind":"custom","p":5,"generators":["[[0,1],[4,0]]","[[2,0],[0,3]]@F5"]}"#,
        )
        .unwrap();
        let inst = desc.build().unwrap();
        assert_eq!(inst.name(), "swap");
        assert!(inst.finite_group().unwrap().verify_closed());

        let bad = InstanceDescriptor::from_json(r#"{"kind":"custom","p":5}"#).unwrap();
        assert!(bad.build().is_err());
        let singular =
            InstanceDescriptor::from_json(r#"{"kind":"custom","p":5,"generators":["[[1,2],[2,4]]"]}"#).unwrap();
        assert!(singular.build().is_err());
        let wrong_kind =
            InstanceDescriptor::from_json(r#"{"kind":"diagonal","p":5,"generators":["[[1,0],[0,1]]"]}"#).unwrap();
        assert!(wrong_kind.build().is_err());
    }

    #[test]
    fn cap_and_kind_errors() {
        assert!(matches!(
            build_instance(InstanceKind::Diagonal, 11),
            Err(Error::PrimeAboveCap { p: 11, cap: 7 })
        ));
        assert!("hyperbolic".parse::<InstanceKind>().is_err());
        assert!(build_instance(InstanceKind::Diagonal, 6).is_err());
    }

    #[test]
    fn zero_in_secret_domain_is_allowed_but_not_multiplicative() {
        let inst = InstanceDescriptor::new(InstanceKind::Diagonal, 5)
            .with_secret_domain(&Domain::Prime(5).elements().unwrap())
            .build()
            .unwrap();
        assert!(!inst.is_multiplicative());
        // (0,0) is excluded.
        assert_eq!(inst.encodings().unwrap().len(), 24);
    }

    #[test]
    fn rational_demo_instance() {
        let q = build_instance(InstanceKind::RationalGl2, 0).unwrap();
        assert!(!q.is_finite());
        assert!(matches!(q.table(), Err(Error::RequiresFiniteGroup)));
        assert!(q.contains_secret(&Scalar::rational(3, 4).unwrap()));
        assert!(!q.contains_secret(&Domain::Rational.zero()));
    }
}
