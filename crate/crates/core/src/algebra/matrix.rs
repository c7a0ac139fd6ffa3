use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::scalar::{Domain, Scalar};
use crate::error::{Error, Result};

/// A 2×2 matrix, row-major. Matrices act on row vectors from the right,
/// so `v·A·B` applies `A` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    entries: [Scalar; 4],
}

impl Mat2 {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self> {
        let domain = a.domain();
        for x in [&b, &c, &d] {
            if x.domain() != domain {
                return Err(Error::DomainMismatch(domain, x.domain()));
            }
        }
        Ok(Mat2 { entries: [a, b, c, d] })
    }

    /// Prime-field matrix from signed integers, reduced mod `p`.
    pub fn fp(p: u32, rows: [[i64; 2]; 2]) -> Self {
        Mat2 {
            entries: [
                Scalar::fp(rows[0][0], p),
                Scalar::fp(rows[0][1], p),
                Scalar::fp(rows[1][0], p),
                Scalar::fp(rows[1][1], p),
            ],
        }
    }

    pub fn identity(domain: Domain) -> Self {
        Mat2 {
            entries: [domain.one(), domain.zero(), domain.zero(), domain.one()],
        }
    }

    pub fn diag(a: Scalar, d: Scalar) -> Result<Self> {
        let zero = a.domain().zero();
        Mat2::new(a, zero.clone(), zero, d)
    }

    pub fn domain(&self) -> Domain {
        self.entries[0].domain()
    }

    pub fn entries(&self) -> &[Scalar; 4] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[2 * row + col]
    }

    pub fn det(&self) -> Scalar {
        let [a, b, c, d] = &self.entries;
        // Entries share a domain by construction.
        a.mul(d).and_then(|ad| ad.sub(&b.mul(c)?)).expect("homogeneous entries")
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn is_identity(&self) -> bool {
        let [a, b, c, d] = &self.entries;
        a.is_one() && b.is_zero() && c.is_zero() && d.is_one()
    }

    pub fn mul(&self, other: &Mat2) -> Result<Mat2> {
        if self.domain() != other.domain() {
            return Err(Error::DomainMismatch(self.domain(), other.domain()));
        }
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &other.entries;
        let dot = |x: &Scalar, y: &Scalar, z: &Scalar, w: &Scalar| x.mul(y)?.add(&z.mul(w)?);
        Ok(Mat2 {
            entries: [dot(a, e, b, g)?, dot(a, f, b, h)?, dot(c, e, d, g)?, dot(c, f, d, h)?],
        })
    }

    pub fn inv(&self) -> Result<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::NotInvertible(self.to_string()));
        }
        let k = det.inv()?;
        let [a, b, c, d] = &self.entries;
        Ok(Mat2 {
            entries: [d.mul(&k)?, b.neg().mul(&k)?, c.neg().mul(&k)?, a.mul(&k)?],
        })
    }

    pub fn commutes_with(&self, other: &Mat2) -> Result<bool> {
        Ok(self.mul(other)? == other.mul(self)?)
    }
}

/// Exact product `a·b`.
pub fn mat_mul(a: &Mat2, b: &Mat2) -> Result<Mat2> {
    a.mul(b)
}

/// Exact inverse; fails with "not invertible" on singular input.
pub fn mat_inv(a: &Mat2) -> Result<Mat2> {
    a.inv()
}

/// `h⁻¹·g⁻¹·h·g`.
pub fn commutator(g: &Mat2, h: &Mat2) -> Result<Mat2> {
    let g_inv = g.inv()?;
    let h_inv = h.inv()?;
    h_inv.mul(&g_inv)?.mul(h)?.mul(g)
}

/// Canonical literal: `[[a,b],[c,d]]@F5` or `[[1/2,0],[0,1]]@Q`.
impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]]@{}", self.domain())
    }
}

impl FromStr for Mat2 {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (body, domain) = compact
            .rsplit_once('@')
            .ok_or_else(|| Error::parse(format!("matrix literal `{text}` lacks @domain")))?;
        let domain: Domain = domain.parse()?;
        let inner = body
            .strip_prefix("[[")
            .and_then(|b| b.strip_suffix("]]"))
            .ok_or_else(|| Error::parse(format!("matrix literal `{text}` is not [[a,b],[c,d]]")))?;
        let (row0, row1) = inner
            .split_once("],[")
            .ok_or_else(|| Error::parse(format!("matrix literal `{text}` needs two rows")))?;
        let mut cells = Vec::with_capacity(4);
        for row in [row0, row1] {
            let parts: Vec<&str> = row.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::parse(format!("matrix literal `{text}` needs 2 columns")));
            }
            for part in parts {
                cells.push(domain.parse_scalar(part)?);
            }
        }
        let [a, b, c, d]: [Scalar; 4] = cells.try_into().expect("four cells");
        Mat2::new(a, b, c, d)
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
