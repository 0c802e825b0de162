//! Section configurations, fold states and branch selectors for the
//! discrete cone.

use crate::exact::{rational_to_f64, QuadExtRing, Rational};
use crate::geom::angle_from_half_tan;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which of the two quartic branch factors to use on a side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorIndex {
    #[serde(rename = "1")]
    First,
    #[serde(rename = "2")]
    Second,
}

/// Which multilinear coupling factor ties the two sides together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingChoice {
    M,
    N,
}

/// Branch choice (u, v, M/N) for the closed-form synthesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSelector {
    pub u: FactorIndex,
    pub v: FactorIndex,
    pub mn: CouplingChoice,
}

impl BranchSelector {
    pub fn all() -> [BranchSelector; 8] {
        use CouplingChoice::*;
        use FactorIndex::*;
        let mut out = [BranchSelector {
            u: First,
            v: First,
            mn: M,
        }; 8];
        let mut k = 0;
        for u in [First, Second] {
            for v in [First, Second] {
                for mn in [M, N] {
                    out[k] = BranchSelector { u, v, mn };
                    k += 1;
                }
            }
        }
        out
    }
}

impl fmt::Display for BranchSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = |i: FactorIndex| match i {
            FactorIndex::First => 1,
            FactorIndex::Second => 2,
        };
        let mn = match self.mn {
            CouplingChoice::M => "M",
            CouplingChoice::N => "N",
        };
        write!(f, "(u={}, v={}, {})", idx(self.u), idx(self.v), mn)
    }
}

/// The seven half-angle tangents of the three-face germ: `m` for the ruling
/// angle, `s1..s3` for the first cutting plane's edge angles, `t1..t3` for
/// the second plane's.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionConfig {
    pub m: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl SectionConfig {
    pub fn new(m: f64, s: [f64; 3], t: [f64; 3]) -> Self {
        SectionConfig {
            m,
            s1: s[0],
            s2: s[1],
            s3: s[2],
            t1: t[0],
            t2: t[1],
            t3: t[2],
        }
    }

    pub fn entries(&self) -> [f64; 7] {
        [self.m, self.s1, self.s2, self.s3, self.t1, self.t2, self.t3]
    }

    /// (m, w1, w2, w3) of one side: the first plane's angles or the second's.
    pub fn side(&self, beta: bool) -> (f64, f64, f64, f64) {
        if beta {
            (self.m, self.t1, self.t2, self.t3)
        } else {
            (self.m, self.s1, self.s2, self.s3)
        }
    }

    /// Ruling opening angle μ of the middle face.
    pub fn mu(&self) -> f64 {
        angle_from_half_tan(self.m)
    }
}

/// One dihedral angle as its half-angle tangent, with δ = π kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FoldAngle {
    Tan(f64),
    /// δ = π (the half-angle tangent is at infinity).
    HalfTurn,
}

impl FoldAngle {
    pub fn angle(self) -> f64 {
        match self {
            FoldAngle::Tan(t) => angle_from_half_tan(t),
            FoldAngle::HalfTurn => std::f64::consts::PI,
        }
    }

    pub fn tan_half(self) -> Option<f64> {
        match self {
            FoldAngle::Tan(t) => Some(t),
            FoldAngle::HalfTurn => None,
        }
    }

    /// True at δ = 0 or δ = π, where a face lies in its neighbour's plane.
    pub fn is_flat(self) -> bool {
        match self {
            FoldAngle::Tan(t) => t == 0.0,
            FoldAngle::HalfTurn => true,
        }
    }
}

/// A fold state of the germ: half-angle tangents of the two dihedral angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPair {
    pub d1: FoldAngle,
    pub d2: FoldAngle,
}

impl FoldPair {
    pub fn finite(d1: f64, d2: f64) -> Self {
        FoldPair {
            d1: FoldAngle::Tan(d1),
            d2: FoldAngle::Tan(d2),
        }
    }

    pub const FLAT: FoldPair = FoldPair {
        d1: FoldAngle::Tan(0.0),
        d2: FoldAngle::Tan(0.0),
    };
}

/// A directional or flat-fold degeneracy of a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExclusionViolation {
    pub label: String,
}

impl fmt::Display for ExclusionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn near(x: f64, tol: f64) -> bool {
    x.abs() <= tol
}

/// Directional exclusions and the flat-fold coincidences, reported with the
/// case that produces them. Empty for admissible configurations.
pub fn validate_exclusions(config: &SectionConfig) -> Vec<ExclusionViolation> {
    validate_exclusions_with_tol(config, 1e-12)
}

pub fn validate_exclusions_with_tol(config: &SectionConfig, tol: f64) -> Vec<ExclusionViolation> {
    let mut out = Vec::new();
    let mut push = |label: String| out.push(ExclusionViolation { label });
    let c = config;
    if near(c.m, tol) {
        push("parallel rulings (μ = 0): not a cone".into());
    }
    for (side, w1, w2, w3) in [("a", c.s1, c.s2, c.s3), ("b", c.t1, c.t2, c.t3)] {
        let edge = |i: usize| format!("{side}{i}");
        if near(w1, tol) {
            push(format!("{} along first ruling", edge(1)));
        }
        if near(w3, tol) {
            push(format!("{} along second ruling", edge(3)));
        }
        if near(w2, tol) {
            push(format!("{} along first ruling", edge(2)));
        }
        if near(w2 - c.m, tol) {
            push(format!("{} along second ruling", edge(2)));
        }
        if near(c.m * w2 + 1.0, tol) {
            push(format!("{} opposite second ruling", edge(2)));
        }
        // flat-fold coincidences of the first two edges
        if near(w1 - w2, tol) {
            push(format!("δ₁=0 coincidence ({side}-side, same orientation)"));
        }
        if near(w1 * w2 + 1.0, tol) {
            push(format!("δ₁=0 coincidence ({side}-side, opposite orientation)"));
        }
        if near(w1 + w2, tol) {
            push(format!("δ₁=π coincidence ({side}-side, same orientation)"));
        }
        if near(w1 * w2 - 1.0, tol) {
            push(format!("δ₁=π coincidence ({side}-side, opposite orientation)"));
        }
    }
    out
}

/// True when the two cutting planes are forced parallel: both outer edge
/// pairs agree up to orientation.
pub fn is_parallel_plane_pair(config: &SectionConfig, tol: f64) -> bool {
    let same_line = |a: f64, b: f64| near(a - b, tol) || near(a * b + 1.0, tol);
    same_line(config.s1, config.t1) && same_line(config.s3, config.t3)
}

/// Exact synthesized configuration: five rational tangents plus the middle
/// angles of both sides as generators of a quadratic quotient algebra.
#[derive(Clone, Debug)]
pub struct ExactSectionConfig {
    pub m: Rational,
    pub s1: Rational,
    pub s3: Rational,
    pub t1: Rational,
    pub t3: Rational,
    /// ℚ[s2, t2] modulo the two branch quadratics x² + Bx − 1.
    pub ring: QuadExtRing,
    /// Root choices used when rendering to floats.
    pub s2_positive: bool,
    pub t2_positive: bool,
    pub selector: BranchSelector,
}

impl ExactSectionConfig {
    pub fn s2_f64(&self) -> f64 {
        let (lo, hi) = QuadExtRing::roots(&self.ring.b_first);
        if self.s2_positive {
            hi
        } else {
            lo
        }
    }

    pub fn t2_f64(&self) -> f64 {
        let (lo, hi) = QuadExtRing::roots(&self.ring.b_second);
        if self.t2_positive {
            hi
        } else {
            lo
        }
    }

    pub fn to_float(&self) -> SectionConfig {
        SectionConfig {
            m: rational_to_f64(&self.m),
            s1: rational_to_f64(&self.s1),
            s2: self.s2_f64(),
            s3: rational_to_f64(&self.s3),
            t1: rational_to_f64(&self.t1),
            t2: self.t2_f64(),
            t3: rational_to_f64(&self.t3),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_config() -> SectionConfig {
        SectionConfig::new(0.6, [-0.8, 0.25, 0.9], [-1.4, 0.45, 1.7])
    }

    #[test]
    fn generic_config_has_no_violations() {
        assert!(validate_exclusions(&generic_config()).is_empty());
    }

    #[test]
    fn middle_edge_along_second_ruling_is_reported() {
        let mut c = generic_config();
        c.s2 = c.m;
        let v = validate_exclusions(&c);
        assert!(v.iter().any(|v| v.label.contains("a2 along second ruling")));
    }

    #[test]
    fn flat_fold_coincidence_is_reported() {
        let mut c = generic_config();
        c.t1 = c.t2;
        let v = validate_exclusions(&c);
        assert!(v.iter().any(|v| v.label.contains("δ₁=0 coincidence (b-side")));
    }

    #[test]
    fn parallel_plane_detection() {
        let mut c = generic_config();
        assert!(!is_parallel_plane_pair(&c, 1e-12));
        c.t1 = c.s1;
        c.t3 = -1.0 / c.s3;
        assert!(is_parallel_plane_pair(&c, 1e-12));
    }

    #[test]
    fn fold_angle_round_trip() {
        let f = FoldAngle::Tan(0.7);
        assert!((f.angle() - 2.0 * 0.7f64.atan()).abs() < 1e-15);
        assert!(FoldAngle::HalfTurn.is_flat());
        assert!(FoldAngle::Tan(0.0).is_flat());
        assert!(!f.is_flat());
    }
}
