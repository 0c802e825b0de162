//! Exact scalars: arbitrary-precision rationals plus the quadratic quotient
//! algebra in which synthesized section angles live.
//!
//! The branch quadratics that pin the middle section angles always have the
//! shape x² + Bx − 1 (their two roots parametrize the same line with opposite
//! orientations). Verifying an identity at those roots therefore never needs
//! floating point: we compute in ℚ[x,y]/(x²+B₁x−1, y²+B₂y−1) and check that
//! the normal form vanishes, which covers every root combination at once.

use crate::poly::Ring;
use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Shorthand rational constructor.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational image of a finite f64 (every finite double is rational).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // numerator or denominator overflow f64 on their own; shift both down
    let shift = (r.numer().bits().max(r.denom().bits()) as i64 - 900).max(0) as u64;
    let num = r.numer() >> shift;
    let den = r.denom() >> shift;
    if den.is_zero() {
        return if num.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    BigRational::new(num, den).to_f64().unwrap_or(f64::NAN)
}

/// The field of arbitrary-precision rationals.
#[derive(Clone, Copy, Debug, Default)]
pub struct RationalField;

impl Ring for RationalField {
    type El = Rational;
    fn zero(&self) -> Rational {
        BigRational::zero()
    }
    fn one(&self) -> Rational {
        BigRational::from_integer(BigInt::from(1))
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
}

/// Element of ℚ adjoined two quadratic generators: c0 + c1·x + c2·y + c3·xy.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadExt {
    pub c: [Rational; 4],
}

impl QuadExt {
    pub fn from_rational(r: Rational) -> Self {
        QuadExt {
            c: [r, BigRational::zero(), BigRational::zero(), BigRational::zero()],
        }
    }

    pub fn is_rational(&self) -> bool {
        self.c[1].is_zero() && self.c[2].is_zero() && self.c[3].is_zero()
    }

    pub fn rational_part(&self) -> &Rational {
        &self.c[0]
    }
}

/// ℚ[x,y]/(x² + b_first·x − 1, y² + b_second·y − 1).
///
/// `embed_*` pick one real root per generator for float rendering; the exact
/// arithmetic itself is root-agnostic.
#[derive(Clone, Debug)]
pub struct QuadExtRing {
    pub b_first: Rational,
    pub b_second: Rational,
}

impl QuadExtRing {
    pub fn new(b_first: Rational, b_second: Rational) -> Self {
        QuadExtRing { b_first, b_second }
    }

    pub fn generator_first(&self) -> QuadExt {
        QuadExt {
            c: [
                BigRational::zero(),
                BigRational::from_integer(BigInt::from(1)),
                BigRational::zero(),
                BigRational::zero(),
            ],
        }
    }

    pub fn generator_second(&self) -> QuadExt {
        QuadExt {
            c: [
                BigRational::zero(),
                BigRational::zero(),
                BigRational::from_integer(BigInt::from(1)),
                BigRational::zero(),
            ],
        }
    }

    /// The two real roots of x² + Bx − 1, ascending.
    pub fn roots(b: &Rational) -> (f64, f64) {
        let bf = rational_to_f64(b);
        let disc = (bf * bf + 4.0).sqrt();
        (0.5 * (-bf - disc), 0.5 * (-bf + disc))
    }

    /// Float value of an element under a choice of root for each generator.
    pub fn embed(&self, e: &QuadExt, first_positive: bool, second_positive: bool) -> f64 {
        let pick = |b: &Rational, pos: bool| {
            let (lo, hi) = Self::roots(b);
            if pos {
                hi
            } else {
                lo
            }
        };
        let x = pick(&self.b_first, first_positive);
        let y = pick(&self.b_second, second_positive);
        rational_to_f64(&e.c[0])
            + rational_to_f64(&e.c[1]) * x
            + rational_to_f64(&e.c[2]) * y
            + rational_to_f64(&e.c[3]) * x * y
    }
}

impl Ring for QuadExtRing {
    type El = QuadExt;

    fn zero(&self) -> QuadExt {
        QuadExt::from_rational(BigRational::zero())
    }

    fn one(&self) -> QuadExt {
        QuadExt::from_rational(BigRational::from_integer(BigInt::from(1)))
    }

    fn add(&self, a: &QuadExt, b: &QuadExt) -> QuadExt {
        QuadExt {
            c: [
                &a.c[0] + &b.c[0],
                &a.c[1] + &b.c[1],
                &a.c[2] + &b.c[2],
                &a.c[3] + &b.c[3],
            ],
        }
    }

    fn sub(&self, a: &QuadExt, b: &QuadExt) -> QuadExt {
        QuadExt {
            c: [
                &a.c[0] - &b.c[0],
                &a.c[1] - &b.c[1],
                &a.c[2] - &b.c[2],
                &a.c[3] - &b.c[3],
            ],
        }
    }

    fn mul(&self, a: &QuadExt, b: &QuadExt) -> QuadExt {
        // Reduce with x² = 1 − b₁x and y² = 1 − b₂y; xy stays as the mixed
        // basis element and (xy)² folds back through both relations.
        // Elements frequently live in a subalgebra (pure rational, or one
        // generator only); skip the dead products.
        let za: [bool; 4] = [a.c[0].is_zero(), a.c[1].is_zero(), a.c[2].is_zero(), a.c[3].is_zero()];
        let zb: [bool; 4] = [b.c[0].is_zero(), b.c[1].is_zero(), b.c[2].is_zero(), b.c[3].is_zero()];
        if za[1] && za[2] && za[3] {
            return QuadExt {
                c: [&a.c[0] * &b.c[0], &a.c[0] * &b.c[1], &a.c[0] * &b.c[2], &a.c[0] * &b.c[3]],
            };
        }
        if zb[1] && zb[2] && zb[3] {
            return QuadExt {
                c: [&a.c[0] * &b.c[0], &a.c[1] * &b.c[0], &a.c[2] * &b.c[0], &a.c[3] * &b.c[0]],
            };
        }
        let bs = &self.b_first;
        let bt = &self.b_second;
        // both operands confined to ℚ[x]: no y or xy components arise
        if za[2] && za[3] && zb[2] && zb[3] {
            let c0 = &a.c[0] * &b.c[0] + &a.c[1] * &b.c[1];
            let c1 = &a.c[0] * &b.c[1] + &a.c[1] * &b.c[0] - bs * (&a.c[1] * &b.c[1]);
            return QuadExt {
                c: [c0, c1, BigRational::zero(), BigRational::zero()],
            };
        }
        if za[1] && za[3] && zb[1] && zb[3] {
            let c0 = &a.c[0] * &b.c[0] + &a.c[2] * &b.c[2];
            let c2 = &a.c[0] * &b.c[2] + &a.c[2] * &b.c[0] - bt * (&a.c[2] * &b.c[2]);
            return QuadExt {
                c: [c0, BigRational::zero(), c2, BigRational::zero()],
            };
        }
        // one factor in ℚ[x], the other in ℚ[y]: the product needs no
        // reduction at all
        if za[2] && za[3] && zb[1] && zb[3] {
            return QuadExt {
                c: [
                    &a.c[0] * &b.c[0],
                    &a.c[1] * &b.c[0],
                    &a.c[0] * &b.c[2],
                    &a.c[1] * &b.c[2],
                ],
            };
        }
        if za[1] && za[3] && zb[2] && zb[3] {
            return QuadExt {
                c: [
                    &a.c[0] * &b.c[0],
                    &a.c[0] * &b.c[1],
                    &a.c[2] * &b.c[0],
                    &a.c[2] * &b.c[1],
                ],
            };
        }
        let (a0, a1, a2, a3) = (&a.c[0], &a.c[1], &a.c[2], &a.c[3]);
        let (b0, b1, b2, b3) = (&b.c[0], &b.c[1], &b.c[2], &b.c[3]);
        let c0 = a0 * b0 + a1 * b1 + a2 * b2 + a3 * b3;
        let c1 = a0 * b1 + a1 * b0 + a2 * b3 + a3 * b2 - bs * (a1 * b1 + a3 * b3);
        let c2 = a0 * b2 + a2 * b0 + a1 * b3 + a3 * b1 - bt * (a2 * b2 + a3 * b3);
        let c3 = a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1
            - bs * (a1 * b3 + a3 * b1)
            - bt * (a2 * b3 + a3 * b2)
            + bs * bt * (a3 * b3);
        QuadExt { c: [c0, c1, c2, c3] }
    }

    fn neg(&self, a: &QuadExt) -> QuadExt {
        QuadExt {
            c: [-&a.c[0], -&a.c[1], -&a.c[2], -&a.c[3]],
        }
    }

    fn is_zero(&self, a: &QuadExt) -> bool {
        a.c.iter().all(|c| c.is_zero())
    }
}

/// Max absolute value of the numerator/denominator digit count, for sanity
/// bounds in tests.
pub fn rational_abs(r: &Rational) -> Rational {
    r.abs()
}
