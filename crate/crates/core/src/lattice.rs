//! Exact lattice and rational arithmetic.
//!
//! Lattice vectors carry machine integers (input coordinates are bounded at
//! parse time so every determinant fits in an `i64`); anything that can grow,
//! such as class coefficients, positions and potentials, is a [`Rational`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Largest absolute value accepted for an input lattice coordinate.
pub const COORD_LIMIT: i64 = 1 << 28;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`. Decimal points and exponents are refused.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() || text.contains(['.', 'e', 'E']) {
        return None;
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVec2 {
    pub x: i64,
    pub y: i64,
}

impl LatticeVec2 {
    pub const ZERO: LatticeVec2 = LatticeVec2 { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticeVec2 { x, y }
    }

    pub fn dot(self, other: LatticeVec2) -> i64 {
        self.x * other.x + self.y * other.y
    }

    /// Height-one lift `(x, y, 1)`.
    pub fn lift(self) -> LatticeVec3 {
        LatticeVec3::new(self.x, self.y, 1)
    }

    pub fn to_rational(self) -> RatVec2 {
        RatVec2::new(rat(self.x), rat(self.y))
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }
}

impl Add for LatticeVec2 {
    type Output = LatticeVec2;
    fn add(self, o: LatticeVec2) -> LatticeVec2 {
        LatticeVec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for LatticeVec2 {
    type Output = LatticeVec2;
    fn sub(self, o: LatticeVec2) -> LatticeVec2 {
        LatticeVec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for LatticeVec2 {
    type Output = LatticeVec2;
    fn neg(self) -> LatticeVec2 {
        LatticeVec2::new(-self.x, -self.y)
    }
}

impl Mul<LatticeVec2> for i64 {
    type Output = LatticeVec2;
    fn mul(self, v: LatticeVec2) -> LatticeVec2 {
        LatticeVec2::new(self * v.x, self * v.y)
    }
}

impl fmt::Display for LatticeVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct LatticeVec3 {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl LatticeVec3 {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        LatticeVec3 { x, y, z }
    }

    pub fn det3(a: LatticeVec3, b: LatticeVec3, c: LatticeVec3) -> i64 {
        a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x)
            + a.z * (b.x * c.y - b.y * c.x)
    }
}

impl Add for LatticeVec3 {
    type Output = LatticeVec3;
    fn add(self, o: LatticeVec3) -> LatticeVec3 {
        LatticeVec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Mul<LatticeVec3> for i64 {
    type Output = LatticeVec3;
    fn mul(self, v: LatticeVec3) -> LatticeVec3 {
        LatticeVec3::new(self * v.x, self * v.y, self * v.z)
    }
}

/// `a.x·b.y − a.y·b.x`.
pub fn det2(a: LatticeVec2, b: LatticeVec2) -> i64 {
    a.x * b.y - a.y * b.x
}

/// Quarter turn anticlockwise: `(x, y) ↦ (−y, x)`.
pub fn j2(a: LatticeVec2) -> LatticeVec2 {
    LatticeVec2::new(-a.y, a.x)
}

pub fn is_primitive(a: LatticeVec2) -> bool {
    a.x.unsigned_abs().gcd(&a.y.unsigned_abs()) == 1
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("degenerate triangle {0}, {1}, {2}")]
pub struct DegenerateTriangle(pub LatticeVec2, pub LatticeVec2, pub LatticeVec2);

pub fn is_anticlockwise(
    a: LatticeVec2,
    b: LatticeVec2,
    c: LatticeVec2,
) -> Result<bool, DegenerateTriangle> {
    match det2(b - a, c - a) {
        0 => Err(DegenerateTriangle(a, b, c)),
        d => Ok(d > 0),
    }
}

/// A point or displacement in the plane with exact rational coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RatVec2 {
    pub x: Rational,
    pub y: Rational,
}

impl RatVec2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        RatVec2 { x, y }
    }

    pub fn zero() -> Self {
        RatVec2::new(Rational::zero(), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `t · v` for an integer vector `v`.
    pub fn scaled_lattice(t: &Rational, v: LatticeVec2) -> Self {
        RatVec2::new(t * rat(v.x), t * rat(v.y))
    }

    /// Pairing `⟨v, self⟩` with an integer vector.
    pub fn pair(&self, v: LatticeVec2) -> Rational {
        &self.x * rat(v.x) + &self.y * rat(v.y)
    }
}

impl Add<&RatVec2> for &RatVec2 {
    type Output = RatVec2;
    fn add(self, o: &RatVec2) -> RatVec2 {
        RatVec2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub<&RatVec2> for &RatVec2 {
    type Output = RatVec2;
    fn sub(self, o: &RatVec2) -> RatVec2 {
        RatVec2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl fmt::Display for RatVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Clears denominators of a rational direction and divides out the content,
/// keeping the orientation.
pub fn primitive_integer_direction(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() {
        return ints;
    }
    let content = content.abs();
    ints.into_iter().map(|c| c / &content).collect()
}
