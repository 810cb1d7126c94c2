//! Double-double arithmetic built on error-free transforms, used where a
//! large migration exponent would otherwise lose its low-order digits.

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

/// π to double-double precision.
pub const PI_DD: DoubleDouble = DoubleDouble { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl DoubleDouble {
    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (s, e) = two_sum(hi, lo);
        DoubleDouble { hi: s, lo: e }
    }

    pub fn plus(self, other: DoubleDouble) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        Self::renorm(s, e + self.lo + other.lo)
    }

    pub fn add_f64(self, x: f64) -> Self {
        self.plus(DoubleDouble::from_f64(x))
    }

    pub fn negate(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }

    pub fn times(self, other: DoubleDouble) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        Self::renorm(p, e + self.hi * other.lo + self.lo * other.hi)
    }

    pub fn mul_f64(self, x: f64) -> Self {
        self.times(DoubleDouble::from_f64(x))
    }

    pub fn div_f64(self, x: f64) -> Self {
        let q = self.hi / x;
        let (p, e) = two_prod(q, x);
        let r = (self.hi - p - e + self.lo) / x;
        Self::renorm(q, r)
    }
}

/// Exact product of two doubles as a double-double.
pub fn product(a: f64, b: f64) -> DoubleDouble {
    let (p, e) = two_prod(a, b);
    DoubleDouble { hi: p, lo: e }
}
