//! Scalar profile functions φ(ς) with derivatives up to third order, driving
//! the section curves of smooth cones and cylinders.

use super::{Grid, SmoothError};
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// φ with analytically chained derivatives φ′, φ″, φ‴ on a domain interval.
#[derive(Clone)]
pub struct ProfileFunction {
    pub domain: (f64, f64),
    f: [ScalarFn; 4],
}

impl std::fmt::Debug for ProfileFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ProfileFunction {{ domain: {:?} }}", self.domain)
    }
}

/// Value and first three derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub fn constant(c: f64) -> Jet3 {
        Jet3 {
            v: c,
            d1: 0.0,
            d2: 0.0,
            d3: 0.0,
        }
    }

    pub fn add(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d3: self.d3 + o.d3,
        }
    }

    pub fn scale(self, k: f64) -> Jet3 {
        Jet3 {
            v: k * self.v,
            d1: k * self.d1,
            d2: k * self.d2,
            d3: k * self.d3,
        }
    }

    /// Leibniz product rule through third order.
    pub fn mul(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
            d3: self.d3 * o.v + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.v * o.d3,
        }
    }

    /// Quotient q = n/d via n = q·d: q′ = (n′ − q d′)/d and so on.
    pub fn div(self, d: Jet3) -> Jet3 {
        let q = self.v / d.v;
        let q1 = (self.d1 - q * d.d1) / d.v;
        let q2 = (self.d2 - 2.0 * q1 * d.d1 - q * d.d2) / d.v;
        let q3 = (self.d3 - 3.0 * q2 * d.d1 - 3.0 * q1 * d.d2 - q * d.d3) / d.v;
        Jet3 {
            v: q,
            d1: q1,
            d2: q2,
            d3: q3,
        }
    }
}

impl ProfileFunction {
    /// Analytic profile from the value and its three derivative callbacks.
    pub fn analytic<F0, F1, F2, F3>(domain: (f64, f64), f: F0, d1: F1, d2: F2, d3: F3) -> Self
    where
        F0: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
        F3: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ProfileFunction {
            domain,
            f: [Arc::new(f), Arc::new(d1), Arc::new(d2), Arc::new(d3)],
        }
    }

    /// Fallback for plain callbacks: 4th-order central finite differences
    /// with h = 1e-4 of the domain length. Third derivatives of noisy
    /// functions will be rough; prefer `analytic` where possible.
    pub fn from_fn<F>(domain: (f64, f64), f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f: ScalarFn = Arc::new(f);
        let h = 1e-4 * (domain.1 - domain.0);
        let f1 = {
            let f = f.clone();
            move |x: f64| (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
        };
        let f2 = {
            let f = f.clone();
            move |x: f64| {
                (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h)
                    - f(x - 2.0 * h))
                    / (12.0 * h * h)
            }
        };
        let f3 = {
            let f = f.clone();
            move |x: f64| {
                (-f(x + 3.0 * h) + 8.0 * f(x + 2.0 * h) - 13.0 * f(x + h) + 13.0 * f(x - h)
                    - 8.0 * f(x - 2.0 * h)
                    + f(x - 3.0 * h))
                    / (8.0 * h * h * h)
            }
        };
        ProfileFunction {
            domain,
            f: [f, Arc::new(f1), Arc::new(f2), Arc::new(f3)],
        }
    }

    pub fn constant(domain: (f64, f64), c: f64) -> Self {
        ProfileFunction::analytic(domain, move |_| c, |_| 0.0, |_| 0.0, |_| 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f[0])(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        (self.f[1])(x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        (self.f[2])(x)
    }

    pub fn d3(&self, x: f64) -> f64 {
        (self.f[3])(x)
    }

    pub fn jet(&self, x: f64) -> Jet3 {
        Jet3 {
            v: self.eval(x),
            d1: self.d1(x),
            d2: self.d2(x),
            d3: self.d3(x),
        }
    }

    /// φ scaled by a constant factor.
    pub fn scaled(&self, k: f64) -> ProfileFunction {
        let f = self.f.clone();
        ProfileFunction {
            domain: self.domain,
            f: [
                {
                    let g = f[0].clone();
                    Arc::new(move |x| k * g(x))
                },
                {
                    let g = f[1].clone();
                    Arc::new(move |x| k * g(x))
                },
                {
                    let g = f[2].clone();
                    Arc::new(move |x| k * g(x))
                },
                {
                    let g = f[3].clone();
                    Arc::new(move |x| k * g(x))
                },
            ],
        }
    }

    /// Verify φ > 0 on the grid (section on one cone nappe).
    pub fn require_positive(&self, grid: &Grid) -> Result<(), SmoothError> {
        for &x in &grid.points {
            if self.eval(x) <= 0.0 {
                return Err(SmoothError::NonPositiveProfile(x));
            }
        }
        Ok(())
    }

    /// Max relative deviation of the supplied derivatives from 4th-order
    /// central differences over the grid interior. The check step is wider
    /// than the fallback step: third-derivative stencils at 1e-4·L sit in
    /// rounding noise.
    pub fn derivative_consistency(&self, grid: &Grid) -> f64 {
        let h = 5e-3 * (self.domain.1 - self.domain.0);
        let f = &self.f[0];
        let mut worst: f64 = 0.0;
        for &x in &grid.points {
            if x - 3.0 * h < self.domain.0 || x + 3.0 * h > self.domain.1 {
                continue;
            }
            let fd1 =
                (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
            let fd2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h)
                - f(x - 2.0 * h))
                / (12.0 * h * h);
            let fd3 = (-f(x + 3.0 * h) + 8.0 * f(x + 2.0 * h) - 13.0 * f(x + h)
                + 13.0 * f(x - h)
                - 8.0 * f(x - 2.0 * h)
                + f(x - 3.0 * h))
                / (8.0 * h * h * h);
            let scale = 1.0 + self.eval(x).abs();
            worst = worst
                .max((self.d1(x) - fd1).abs() / scale)
                .max((self.d2(x) - fd2).abs() / scale)
                .max((self.d3(x) - fd3).abs() / scale);
        }
        worst
    }

    /// Quotient combinator with a vanishing-denominator scan: err if |den|
    /// crosses below the threshold anywhere on a fine domain scan.
    pub(crate) fn quotient_checked(
        domain: (f64, f64),
        num: impl Fn(f64) -> Jet3 + Send + Sync + 'static,
        den: impl Fn(f64) -> Jet3 + Send + Sync + 'static,
    ) -> Result<ProfileFunction, SmoothError> {
        let scan = 512;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=scan {
            let x = domain.0 + (domain.1 - domain.0) * k as f64 / scan as f64;
            let v = den(x).v;
            if v.abs() < 1e-9 {
                return Err(SmoothError::DenominatorVanishes(x));
            }
            if let Some((px, pv)) = prev {
                if pv * v < 0.0 {
                    return Err(SmoothError::DenominatorVanishes(0.5 * (px + x)));
                }
            }
            prev = Some((x, v));
        }
        let num = Arc::new(num);
        let den = Arc::new(den);
        let jet = move |x: f64| num(x).div(den(x));
        let j0 = Arc::new(jet);
        let j1 = j0.clone();
        let j2 = j0.clone();
        let j3 = j0.clone();
        Ok(ProfileFunction {
            domain,
            f: [
                Arc::new(move |x| j0(x).v),
                Arc::new(move |x| j1(x).d1),
                Arc::new(move |x| j2(x).d2),
                Arc::new(move |x| j3(x).d3),
            ],
        })
    }
}

/// The cross-ratio combination of two profiles: φ = φ₁φ₂(λ−1)/(λφ₁−φ₂).
/// λ = 0 gives back φ₁; large λ tends to φ₂.
pub fn pencil_profile(
    phi1: &ProfileFunction,
    phi2: &ProfileFunction,
    lambda: f64,
) -> Result<ProfileFunction, SmoothError> {
    assert_eq!(phi1.domain, phi2.domain, "profiles must share a domain");
    if (lambda - 1.0).abs() < 1e-12 {
        return Err(SmoothError::DenominatorVanishes(phi1.domain.0));
    }
    let p1 = phi1.clone();
    let p2 = phi2.clone();
    let p1b = phi1.clone();
    let p2b = phi2.clone();
    ProfileFunction::quotient_checked(
        phi1.domain,
        move |x| p1.jet(x).mul(p2.jet(x)).scale(lambda - 1.0),
        move |x| p1b.jet(x).scale(lambda).add(p2b.jet(x).scale(-1.0)),
    )
}

/// φ₁ = φ₂ / (φ₂(C₁ sin ς − C₂ cos ς) ± 1): the closed-form partner profile
/// whose curvature field matches φ₂'s.
pub fn partner_profile(
    phi2: &ProfileFunction,
    c1: f64,
    c2: f64,
    plus: bool,
) -> Result<ProfileFunction, SmoothError> {
    let p2 = phi2.clone();
    let p2b = phi2.clone();
    let sign = if plus { 1.0 } else { -1.0 };
    ProfileFunction::quotient_checked(
        phi2.domain,
        move |x| p2.jet(x),
        move |x| {
            let g = Jet3 {
                v: c1 * x.sin() - c2 * x.cos(),
                d1: c1 * x.cos() + c2 * x.sin(),
                d2: -c1 * x.sin() + c2 * x.cos(),
                d3: -c1 * x.cos() - c2 * x.sin(),
            };
            p2b.jet(x).mul(g).add(Jet3::constant(sign))
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin_profile() -> ProfileFunction {
        ProfileFunction::analytic(
            (0.0, 3.0),
            |x| 2.0 + (0.7 * x).sin(),
            |x| 0.7 * (0.7 * x).cos(),
            |x| -0.49 * (0.7 * x).sin(),
            |x| -0.343 * (0.7 * x).cos(),
        )
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let p = sin_profile();
        let grid = Grid::uniform(0.0, 3.0, 0.05);
        assert!(p.derivative_consistency(&grid) < 1e-6);
    }

    #[test]
    fn fd_fallback_first_two_orders_are_accurate() {
        let p = ProfileFunction::from_fn((0.0, 3.0), |x| 2.0 + (0.7 * x).sin());
        let q = sin_profile();
        for k in 1..20 {
            let x = 0.15 * k as f64;
            assert!((p.d1(x) - q.d1(x)).abs() < 1e-9);
            assert!((p.d2(x) - q.d2(x)).abs() < 1e-6);
        }
    }

    #[test]
    fn jet_quotient_inverts_product() {
        let a = Jet3 {
            v: 1.3,
            d1: -0.4,
            d2: 0.9,
            d3: 2.1,
        };
        let b = Jet3 {
            v: 0.7,
            d1: 1.1,
            d2: -0.6,
            d3: 0.2,
        };
        let q = a.mul(b).div(b);
        for (x, y) in [(q.v, a.v), (q.d1, a.d1), (q.d2, a.d2), (q.d3, a.d3)] {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn pencil_profile_degenerations() {
        let p1 = sin_profile();
        let p2 = ProfileFunction::constant((0.0, 3.0), 1.5);
        let back = pencil_profile(&p1, &p2, 0.0).unwrap();
        for k in 0..30 {
            let x = 0.1 * k as f64;
            assert!((back.eval(x) - p1.eval(x)).abs() < 1e-12);
            assert!((back.d3(x) - p1.d3(x)).abs() < 1e-9);
        }
        let far = pencil_profile(&p1, &p2, 1e8).unwrap();
        for k in 0..30 {
            let x = 0.1 * k as f64;
            assert!((far.eval(x) - p2.eval(x)).abs() < 1e-6);
        }
        assert!(matches!(
            pencil_profile(&p1, &p2, 1.0),
            Err(SmoothError::DenominatorVanishes(_))
        ));
    }

    #[test]
    fn partner_profile_identity_case() {
        let p2 = sin_profile();
        let same = partner_profile(&p2, 0.0, 0.0, true).unwrap();
        for k in 0..30 {
            let x = 0.1 * k as f64;
            assert!((same.eval(x) - p2.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn partner_profile_derivatives_match_fd() {
        let p2 = sin_profile();
        let p1 = partner_profile(&p2, 0.21, -0.13, true).unwrap();
        let grid = Grid::uniform(0.1, 2.9, 0.05);
        assert!(p1.derivative_consistency(&grid) < 1e-6);
    }

    #[test]
    fn denominator_zero_crossing_is_reported() {
        let p2 = ProfileFunction::constant((0.0, 6.0), 2.0);
        // 2(sin ς) − 1 crosses zero on (0, 6)
        match partner_profile(&p2, 1.0, 0.0, false) {
            Err(SmoothError::DenominatorVanishes(x)) => assert!((0.0..=6.0).contains(&x)),
            other => panic!("expected denominator error, got {other:?}"),
        }
    }
}
