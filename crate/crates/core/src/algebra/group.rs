//! Finite matrix groups built by closure.

use std::collections::HashSet;

use serde::Serialize;

use super::matrix::{commutator, Mat2};
use super::scalar::{Domain, Scalar};
use crate::error::{Error, Result};

/// Default largest prime for full `GL₂(F_p)` enumeration; |GL₂(F₇)| = 2016.
pub const DEFAULT_PRIME_CAP: u32 = 7;

/// A finite subgroup of `GL₂(F_p)`.
///
/// Elements are deduplicated and held in canonical (lexicographic on the
/// four residues) order; `inverses[i]` is the index of `elements[i]⁻¹`.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteGroup {
    #[serde(serialize_with = "ser_domain")]
    domain: Domain,
    elements: Vec<Mat2>,
    #[serde(skip)]
    inverses: Vec<usize>,
    identity: usize,
    generators: Vec<Mat2>,
}

fn ser_domain<S: serde::Serializer>(d: &Domain, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(d)
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.elements == other.elements
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    fn from_sorted(domain: Domain, elements: Vec<Mat2>, generators: Vec<Mat2>) -> Result<Self> {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        let identity = elements
            .binary_search(&Mat2::identity(domain))
            .map_err(|_| Error::InvalidInstance("group lacks the identity".into()))?;
        let inverses = elements
            .iter()
            .map(|m| {
                let inv = m.inv()?;
                elements
                    .binary_search(&inv)
                    .map_err(|_| Error::InvalidInstance(format!("{m} has no inverse in the set")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteGroup {
            domain,
            elements,
            inverses,
            identity,
            generators,
        })
    }

    /// The trivial group `{I}` over `F_p`.
    pub fn trivial(p: u32) -> Result<Self> {
        let domain = Domain::prime(p)?;
        subgroup_closure(&[Mat2::identity(domain)])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn modulus(&self) -> u32 {
        self.domain.modulus().expect("finite groups live over prime fields")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &Mat2 {
        &self.elements[index]
    }

    pub fn inverse_index(&self, index: usize) -> usize {
        self.inverses[index]
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn index_of(&self, m: &Mat2) -> Option<usize> {
        self.elements.binary_search(m).ok()
    }

    pub fn contains(&self, m: &Mat2) -> bool {
        self.index_of(m).is_some()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Exhaustive pairwise commutation test.
    pub fn is_abelian(&self) -> bool {
        self.elements.iter().enumerate().all(|(i, a)| {
            self.elements[i + 1..]
                .iter()
                .all(|b| a.commutes_with(b).expect("same domain"))
        })
    }

    /// Checks closure under products and inverses by brute force.
    pub fn verify_closed(&self) -> bool {
        self.elements.iter().all(|a| {
            self.contains(&a.inv().expect("invertible"))
                && self
                    .elements
                    .iter()
                    .all(|b| self.contains(&a.mul(b).expect("same domain")))
        })
    }

    /// `x⁻¹·H·x ⊆ H` for every `x` in `self`.
    pub fn normalizes(&self, sub: &FiniteGroup) -> bool {
        self.elements.iter().enumerate().all(|(i, x)| {
            let x_inv = &self.elements[self.inverses[i]];
            sub.elements.iter().all(|c| {
                let conj = x_inv.mul(c).and_then(|m| m.mul(x)).expect("same domain");
                sub.contains(&conj)
            })
        })
    }
}

/// |GL₂(F_p)| = (p²−1)(p²−p).
pub fn gl2_order(p: u32) -> u64 {
    let p = p as u64;
    (p * p - 1) * (p * p - p)
}

/// Every invertible 2×2 matrix over `F_p`, in canonical order.
pub fn enumerate_gl2(p: u32, cap: u32) -> Result<FiniteGroup> {
    let domain = Domain::prime(p)?;
    if p > cap {
        return Err(Error::PrimeAboveCap { p, cap });
    }
    let field = domain.elements()?;
    let mut elements = Vec::with_capacity(gl2_order(p) as usize);
    for a in &field {
        for b in &field {
            for c in &field {
                for d in &field {
                    let m = Mat2::new(a.clone(), b.clone(), c.clone(), d.clone())?;
                    if m.is_invertible() {
                        elements.push(m);
                    }
                }
            }
        }
    }
    let generators = elements.clone();
    FiniteGroup::from_sorted(domain, elements, generators)
}

/// Smallest subgroup containing `gens`: fixpoint of right multiplication by
/// the generators and their inverses, starting from the identity.
pub fn subgroup_closure(gens: &[Mat2]) -> Result<FiniteGroup> {
    let first = gens
        .first()
        .ok_or_else(|| Error::InvalidInstance("empty generator set".into()))?;
    let domain = first.domain();
    let p = match domain {
        Domain::Prime(p) => p,
        Domain::Rational => return Err(Error::ClosureRequiresFiniteDomain),
    };
    let mut steps = Vec::with_capacity(gens.len() * 2);
    for g in gens {
        if g.domain() != domain {
            return Err(Error::DomainMismatch(domain, g.domain()));
        }
        let inv = g.inv()?;
        steps.push(g.clone());
        steps.push(inv);
    }
    let bound = gl2_order(p) as usize;
    let identity = Mat2::identity(domain);
    let mut seen: HashSet<Mat2> = HashSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for s in &steps {
            let y = x.mul(s)?;
            if !seen.contains(&y) {
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
        assert!(seen.len() <= bound, "closure exceeded |GL2(F_{p})|");
    }
    let mut elements: Vec<Mat2> = seen.into_iter().collect();
    elements.sort();
    let mut generators = gens.to_vec();
    generators.sort();
    generators.dedup();
    FiniteGroup::from_sorted(domain, elements, generators)
}

/// The subgroup generated by all commutators `h⁻¹g⁻¹hg`, `g, h ∈ G`.
///
/// Normality in `G` is verified on the result.
pub fn commutator_subgroup(group: &FiniteGroup) -> Result<FiniteGroup> {
    let mut gens: Vec<Mat2> = Vec::new();
    let mut seen = HashSet::new();
    for g in group.elements() {
        for h in group.elements() {
            let c = commutator(g, h)?;
            if seen.insert(c.clone()) {
                gens.push(c);
            }
        }
    }
    gens.sort();
    let comm = subgroup_closure(&gens)?;
    assert!(
        group.normalizes(&comm),
        "commutator closure is not normal; closure is broken"
    );
    Ok(comm)
}

/// Upper-triangular invertible matrices `[[a,b],[0,d]]` over `F_p`.
pub fn borel_group(p: u32) -> Result<FiniteGroup> {
    let domain = Domain::prime(p)?;
    let units: Vec<Scalar> = domain.elements()?.into_iter().filter(|x| !x.is_zero()).collect();
    let mut gens = Vec::new();
    for a in &units {
        for b in &domain.elements()? {
            for d in &units {
                gens.push(Mat2::new(a.clone(), b.clone(), domain.zero(), d.clone())?);
            }
        }
    }
    subgroup_closure(&gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Filters all p⁴ integer matrices by det ≠ 0 mod p; independent of Scalar.
    fn brute_gl2_count(p: i64) -> usize {
        let mut n = 0;
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        if (a * d - b * c).rem_euclid(p) != 0 {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn gl2_sizes_match_brute_force() {
        assert_eq!(brute_gl2_count(2), 6);
        assert_eq!(brute_gl2_count(3), 48);
        for p in [2u32, 3, 5] {
            let g = enumerate_gl2(p, DEFAULT_PRIME_CAP).unwrap();
            assert_eq!(g.len(), brute_gl2_count(p as i64));
            assert_eq!(g.len() as u64, gl2_order(p));
        }
    }

    #[test]
    fn gl2_respects_cap_and_primality() {
        assert!(matches!(
            enumerate_gl2(11, DEFAULT_PRIME_CAP),
            Err(Error::PrimeAboveCap { p: 11, cap: 7 })
        ));
        assert!(matches!(enumerate_gl2(4, DEFAULT_PRIME_CAP), Err(Error::NotPrime(4))));
    }

    #[test]
    fn gl2_is_in_canonical_order_and_closed() {
        let g = enumerate_gl2(2, DEFAULT_PRIME_CAP).unwrap();
        assert!(g.elements().windows(2).all(|w| w[0] < w[1]));
        assert!(g.verify_closed());
        assert!(g.element(g.identity_index()).is_identity());
    }

    #[test]
    fn mat_times_inverse_is_identity_exhaustively() {
        for p in [2, 3] {
            let g = enumerate_gl2(p, DEFAULT_PRIME_CAP).unwrap();
            for (i, m) in g.elements().iter().enumerate() {
                assert!(m.mul(&m.inv().unwrap()).unwrap().is_identity());
                assert!(m.mul(g.element(g.inverse_index(i))).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn closure_of_identity_is_trivial() {
        let g = subgroup_closure(&[Mat2::identity(Domain::Prime(5))]).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.is_trivial());
    }

    #[test]
    fn diagonal_closure_over_f5() {
        let g = subgroup_closure(&[Mat2::fp(5, [[2, 0], [0, 1]]), Mat2::fp(5, [[1, 0], [0, 2]])]).unwrap();
        assert_eq!(g.len(), 16);
        assert!(g.is_abelian());
        assert!(g
            .elements()
            .iter()
            .all(|m| m.entry(0, 1).is_zero() && m.entry(1, 0).is_zero()));
    }

    #[test]
    fn closure_is_idempotent() {
        let g = subgroup_closure(&[Mat2::fp(5, [[0, 1], [4, 0]]), Mat2::fp(5, [[2, 0], [0, 3]])]).unwrap();
        assert!(g.verify_closed());
        let again = subgroup_closure(g.elements()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn closure_rejects_rationals_and_bad_input() {
        let q = Mat2::identity(Domain::Rational);
        assert!(matches!(
            subgroup_closure(&[q]),
            Err(Error::ClosureRequiresFiniteDomain)
        ));
        assert!(subgroup_closure(&[]).is_err());
        assert!(subgroup_closure(&[Mat2::fp(3, [[1, 1], [1, 1]])]).is_err());
    }

    #[test]
    fn commutators_vanish_on_diagonal_groups() {
        for p in [2u32, 3, 5] {
            let d = Domain::prime(p).unwrap();
            let gens: Vec<Mat2> = d
                .elements()
                .unwrap()
                .into_iter()
                .filter(|x| !x.is_zero())
                .flat_map(|x| [Mat2::diag(x.clone(), d.one()).unwrap(), Mat2::diag(d.one(), x).unwrap()])
                .collect();
            let g = subgroup_closure(&gens).unwrap();
            assert_eq!(g.len(), ((p - 1) * (p - 1)) as usize);
            for a in g.elements() {
                for b in g.elements() {
                    assert!(commutator(a, b).unwrap().is_identity());
                }
            }
            assert!(commutator_subgroup(&g).unwrap().is_trivial());
        }
    }

    #[test]
    fn commutator_subgroup_of_gl2_f2_has_order_three() {
        let g = enumerate_gl2(2, DEFAULT_PRIME_CAP).unwrap();
        let c = commutator_subgroup(&g).unwrap();
        assert_eq!(c.len(), 3);
        assert!(g.normalizes(&c));
    }

    #[test]
    fn commutator_subgroup_of_borel_f3_is_unipotent() {
        let b = borel_group(3).unwrap();
        assert_eq!(b.len(), 12);
        let c = commutator_subgroup(&b).unwrap();
        let expected: Vec<Mat2> = (0..3).map(|x| Mat2::fp(3, [[1, x], [0, 1]])).collect();
        assert_eq!(c.elements(), expected.as_slice());
    }

    #[test]
    fn commutator_subgroups_are_normal() {
        for p in [2, 3] {
            let g = enumerate_gl2(p, DEFAULT_PRIME_CAP).unwrap();
            let c = commutator_subgroup(&g).unwrap();
            assert!(g.normalizes(&c));
        }
        // Small groups over F5.
        for gens in [
            vec![Mat2::fp(5, [[0, 1], [4, 0]]), Mat2::fp(5, [[2, 0], [0, 3]])],
            vec![Mat2::fp(5, [[1, 1], [0, 1]]), Mat2::fp(5, [[2, 0], [0, 1]])],
        ] {
            let g = subgroup_closure(&gens).unwrap();
            assert!(g.len() <= 100);
            assert!(g.normalizes(&commutator_subgroup(&g).unwrap()));
        }
    }
}
