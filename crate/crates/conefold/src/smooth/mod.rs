//! Smooth deformable cones and cylinders: frame integration, planarity
//! residuals and the closed-form curvature solutions.

pub mod cone;
pub mod cylinder;
pub mod profile;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmoothError {
    #[error("initial frame is not orthonormal (defect {0:.3e})")]
    NonOrthonormalFrame(f64),
    #[error("grid must be strictly increasing with at least {0} points")]
    BadGrid(usize),
    #[error("torsion undefined: |p′×p″| below threshold at ς = {0}")]
    TorsionUndefined(f64),
    #[error("degenerate profile: φ² − φφ″ + 2φ′² vanishes at ς = {0}")]
    DegenerateProfile(f64),
    #[error("deformation parameter infeasible: {0}")]
    InfeasibleDeformation(String),
    #[error("denominator vanishes near ς = {0}")]
    DenominatorVanishes(f64),
    #[error("need at least two distinct deformation samples")]
    NeedTwoSamples,
    #[error("profile must be positive on the domain (φ({0}) ≤ 0)")]
    NonPositiveProfile(f64),
}

/// Evaluation grid over the arclength parameter.
#[derive(Clone, Debug)]
pub struct Grid {
    pub points: Vec<f64>,
}

impl Grid {
    /// Uniform grid from `start` to `end` with approximately the requested
    /// step (the actual step divides the interval exactly).
    pub fn uniform(start: f64, end: f64, step: f64) -> Grid {
        assert!(end > start && step > 0.0);
        let n = ((end - start) / step).round().max(1.0) as usize;
        let h = (end - start) / n as f64;
        Grid {
            points: (0..=n).map(|k| start + h * k as f64).collect(),
        }
    }

    pub fn step(&self) -> f64 {
        self.points[1] - self.points[0]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn validate(&self, min_points: usize) -> Result<(), SmoothError> {
        if self.points.len() < min_points
            || self.points.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(SmoothError::BadGrid(min_points));
        }
        Ok(())
    }

    /// Halved step, same interval; for convergence studies.
    pub fn refined(&self) -> Grid {
        let mut points = Vec::with_capacity(self.points.len() * 2 - 1);
        for w in self.points.windows(2) {
            points.push(w[0]);
            points.push(0.5 * (w[0] + w[1]));
        }
        points.push(self.end());
        Grid { points }
    }
}
