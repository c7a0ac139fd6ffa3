use std::fmt;

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::algebra::{Domain, Mat2, RawScalar, Scalar};
use crate::error::{Error, Result};

/// A point of the carrier plane, treated as a row vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    x: Scalar,
    y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Result<Self> {
        if x.domain() != y.domain() {
            return Err(Error::DomainMismatch(x.domain(), y.domain()));
        }
        Ok(Point { x, y })
    }

    pub fn fp(p: u32, x: i64, y: i64) -> Self {
        Point {
            x: Scalar::fp(x, p),
            y: Scalar::fp(y, p),
        }
    }

    pub fn x(&self) -> &Scalar {
        &self.x
    }

    pub fn y(&self) -> &Scalar {
        &self.y
    }

    pub fn domain(&self) -> Domain {
        self.x.domain()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Read `[a, b]` from JSON in a known domain.
    pub fn from_raw(raw: &[RawScalar; 2], domain: Domain) -> Result<Self> {
        Point::new(raw[0].resolve(domain)?, raw[1].resolve(domain)?)
    }
}

/// `v·g` for the row vector `v`.
pub fn act(g: &Mat2, v: &Point) -> Result<Point> {
    if g.domain() != v.domain() {
        return Err(Error::DomainMismatch(g.domain(), v.domain()));
    }
    let (a, b, c, d) = (g.entry(0, 0), g.entry(0, 1), g.entry(1, 0), g.entry(1, 1));
    Ok(Point {
        x: v.x.mul(a)?.add(&v.y.mul(c)?)?,
        y: v.x.mul(b)?.add(&v.y.mul(d)?)?,
    })
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// JSON form `[a, b]`.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.y)?;
        t.end()
    }
}
