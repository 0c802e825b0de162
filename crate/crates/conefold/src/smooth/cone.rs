//! Deformable smooth cones: frame integration along the spherical directrix,
//! planarity residuals of profile-driven section curves, and the closed-form
//! geodesic curvature for a given profile.

use super::profile::ProfileFunction;
use super::{Grid, SmoothError};
use crate::geom::{fit_plane, Vec3};
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Geodesic curvature κ(ς) with its derivative, for one deformation state.
#[derive(Clone)]
pub struct CurvatureField {
    kappa: ScalarFn,
    kappa_prime: ScalarFn,
}

impl CurvatureField {
    pub fn new<F, G>(kappa: F, kappa_prime: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CurvatureField {
            kappa: Arc::new(kappa),
            kappa_prime: Arc::new(kappa_prime),
        }
    }

    pub fn constant(c: f64) -> Self {
        CurvatureField::new(move |_| c, |_| 0.0)
    }

    pub fn kappa(&self, s: f64) -> f64 {
        (self.kappa)(s)
    }

    pub fn kappa_prime(&self, s: f64) -> f64 {
        (self.kappa_prime)(s)
    }
}

/// Orthonormal frame samples along the directrix.
#[derive(Clone, Debug)]
pub struct FrameSamples {
    pub s: Vec<f64>,
    pub e1: Vec<Vec3>,
    pub e2: Vec<Vec3>,
    pub e3: Vec<Vec3>,
}

impl FrameSamples {
    /// Max Gram-matrix deviation from the identity over all nodes.
    pub fn orthonormality_drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.s.len() {
            let (a, b, c) = (self.e1[i], self.e2[i], self.e3[i]);
            for (dot, want) in [
                (a.dot(a), 1.0),
                (b.dot(b), 1.0),
                (c.dot(c), 1.0),
                (a.dot(b), 0.0),
                (a.dot(c), 0.0),
                (b.dot(c), 0.0),
            ] {
                worst = worst.max((dot - want).abs());
            }
        }
        worst
    }
}

fn frame_defect(e1: Vec3, e2: Vec3, e3: Vec3) -> f64 {
    let mut d: f64 = 0.0;
    for (dot, want) in [
        (e1.dot(e1), 1.0),
        (e2.dot(e2), 1.0),
        (e3.dot(e3), 1.0),
        (e1.dot(e2), 0.0),
        (e1.dot(e3), 0.0),
        (e2.dot(e3), 0.0),
    ] {
        d = d.max((dot - want).abs());
    }
    d
}

/// Classic fourth-order Runge–Kutta on the frame equations
///
///   e₁′ = e₂,  e₂′ = −e₁ + κ·e₃,  e₃′ = −κ·e₂.
///
/// No per-step re-orthonormalization: the drift is a measured diagnostic.
pub fn darboux_integrate(
    field: &CurvatureField,
    grid: &Grid,
    initial: [Vec3; 3],
) -> Result<FrameSamples, SmoothError> {
    grid.validate(2)?;
    let defect = frame_defect(initial[0], initial[1], initial[2]);
    if defect > 1e-9 {
        return Err(SmoothError::NonOrthonormalFrame(defect));
    }
    let deriv = |s: f64, y: &[Vec3; 3]| -> [Vec3; 3] {
        let k = field.kappa(s);
        [y[1], -y[0] + y[2] * k, -(y[1] * k)]
    };
    let mut samples = FrameSamples {
        s: Vec::with_capacity(grid.len()),
        e1: Vec::with_capacity(grid.len()),
        e2: Vec::with_capacity(grid.len()),
        e3: Vec::with_capacity(grid.len()),
    };
    let mut y = initial;
    let mut push = |s: f64, y: &[Vec3; 3]| {
        samples.s.push(s);
        samples.e1.push(y[0]);
        samples.e2.push(y[1]);
        samples.e3.push(y[2]);
    };
    push(grid.points[0], &y);
    for w in grid.points.windows(2) {
        let (s, h) = (w[0], w[1] - w[0]);
        let add = |a: &[Vec3; 3], b: &[Vec3; 3], k: f64| -> [Vec3; 3] {
            [a[0] + b[0] * k, a[1] + b[1] * k, a[2] + b[2] * k]
        };
        let k1 = deriv(s, &y);
        let k2 = deriv(s + 0.5 * h, &add(&y, &k1, 0.5 * h));
        let k3 = deriv(s + 0.5 * h, &add(&y, &k2, 0.5 * h));
        let k4 = deriv(s + h, &add(&y, &k3, h));
        for i in 0..3 {
            y[i] = y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        push(w[1], &y);
    }
    Ok(samples)
}

/// Max normalized torsion |(p′×p″)·p‴| / ‖p′×p″‖² over a uniformly sampled
/// curve, via fourth-order central differences. Needs at least 7 samples.
pub fn torsion_residual(points: &[Vec3], h: f64) -> Result<f64, SmoothError> {
    if points.len() < 7 {
        return Err(SmoothError::BadGrid(7));
    }
    let mut worst: f64 = 0.0;
    for i in 3..points.len() - 3 {
        let p = |k: isize| points[(i as isize + k) as usize];
        let d1 = (-p(2) + p(1) * 8.0 - p(-1) * 8.0 + p(-2)) * (1.0 / (12.0 * h));
        let d2 = (-p(2) + p(1) * 16.0 - p(0) * 30.0 + p(-1) * 16.0 - p(-2))
            * (1.0 / (12.0 * h * h));
        let d3 = (-p(3) + p(2) * 8.0 - p(1) * 13.0 + p(-1) * 13.0 - p(-2) * 8.0 + p(-3))
            * (1.0 / (8.0 * h * h * h));
        let cross = d1.cross(d2);
        let denom = cross.dot(cross);
        if denom.sqrt() < 1e-8 {
            return Err(SmoothError::TorsionUndefined(i as f64 * h));
        }
        worst = worst.max((cross.dot(d3) / denom).abs());
    }
    Ok(worst)
}

/// Pointwise residual of the planarity condition for a profile under a
/// curvature field:
///
///   K = (φ² − φφ″ + 2φ′²)·φ·κ′
///     + (κ²φ²φ′ + φ²φ′ + φ²φ‴ − 6φφ′φ″ + 6φ′³)·κ
pub fn planarity_residual(
    phi: &ProfileFunction,
    field: &CurvatureField,
    grid: &Grid,
) -> Result<f64, SmoothError> {
    grid.validate(2)?;
    phi.require_positive(grid)?;
    let mut worst: f64 = 0.0;
    for &s in &grid.points {
        worst = worst.max(planarity_term(phi, field, s).abs());
    }
    Ok(worst)
}

fn planarity_term(phi: &ProfileFunction, field: &CurvatureField, s: f64) -> f64 {
    let j = phi.jet(s);
    let k = field.kappa(s);
    let kp = field.kappa_prime(s);
    let big_phi = j.v * j.v - j.v * j.d2 + 2.0 * j.d1 * j.d1;
    big_phi * j.v * kp
        + (k * k * j.v * j.v * j.d1 + j.v * j.v * j.d1 + j.v * j.v * j.d3
            - 6.0 * j.v * j.d1 * j.d2
            + 6.0 * j.d1 * j.d1 * j.d1)
            * k
}

/// Cumulative integral of a callback along a grid: composite Simpson on the
/// node prefixes (half-rule correction on odd prefixes), with a two-point
/// Gauss tail for off-node queries. Fourth-order overall.
pub struct CumulativeIntegral {
    grid: Grid,
    prefix: Vec<f64>,
    integrand: ScalarFn,
}

impl CumulativeIntegral {
    pub fn new<F>(grid: &Grid, integrand: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f: ScalarFn = Arc::new(integrand);
        let pts = &grid.points;
        let mut prefix = vec![0.0; pts.len()];
        let vals: Vec<f64> = pts.iter().map(|&x| f(x)).collect();
        for i in 1..pts.len() {
            if i % 2 == 0 {
                // Simpson over the last two intervals
                let h = pts[i] - pts[i - 1];
                prefix[i] = prefix[i - 2] + h / 3.0 * (vals[i - 2] + 4.0 * vals[i - 1] + vals[i]);
            } else {
                // parabola through the three nodes ending here
                let h = pts[i] - pts[i - 1];
                if i == 1 {
                    // first interval: parabola through the first three nodes
                    let fm = vals[0];
                    let f0 = vals[1];
                    let fp = f(pts[1] + h);
                    prefix[1] = h / 12.0 * (5.0 * fm + 8.0 * f0 - fp);
                } else {
                    prefix[i] = prefix[i - 1]
                        + h / 12.0 * (-vals[i - 2] + 8.0 * vals[i - 1] + 5.0 * vals[i]);
                }
            }
        }
        CumulativeIntegral {
            grid: grid.clone(),
            prefix,
            integrand: f,
        }
    }

    /// Integral from the grid start to x (x within the grid span).
    pub fn eval(&self, x: f64) -> f64 {
        let pts = &self.grid.points;
        let idx = match pts.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.prefix[i],
            Err(i) => i.saturating_sub(1).min(pts.len() - 1),
        };
        // two-point Gauss–Legendre on the partial interval
        let a = pts[idx];
        let half = 0.5 * (x - a);
        let mid = 0.5 * (x + a);
        let off = half / 3.0f64.sqrt();
        self.prefix[idx] + half * ((self.integrand)(mid - off) + (self.integrand)(mid + off))
    }
}

/// The closed-form curvature for a profile: κ = Φ / (φ³ √W) with
/// Φ = φ² − φφ″ + 2φ′² and W the sum of six profile integrals plus the
/// deformation constant. The integrals run from the grid start; their lower
/// limit is absorbed into the deformation constant.
pub struct ProfileCurvature {
    pub field: CurvatureField,
    /// Empirical lower bound: W > 0 on the grid requires the deformation
    /// constant to exceed this value.
    pub min_feasible: f64,
}

/// Sum of the six W-integrands at one point.
fn w_integrand(phi: &ProfileFunction, s: f64) -> f64 {
    let j = phi.jet(s);
    let big_phi = j.v * j.v - j.v * j.d2 + 2.0 * j.d1 * j.d1;
    let p = j.v;
    let dp = j.d1;
    let ddp = j.d2;
    (2.0 * dp / p + 8.0 * dp.powi(3) / p.powi(3) + 8.0 * dp.powi(5) / p.powi(5)
        - 4.0 * dp * ddp / p.powi(2)
        + 2.0 * dp * ddp * ddp / p.powi(3)
        - 8.0 * dp.powi(3) * ddp / p.powi(4))
        / big_phi
}

/// Greatest lower bound for the feasible deformation constant of a profile
/// on a grid (W must stay positive).
pub fn min_feasible_deformation(phi: &ProfileFunction, grid: &Grid) -> Result<f64, SmoothError> {
    grid.validate(3)?;
    phi.require_positive(grid)?;
    for &s in &grid.points {
        let j = phi.jet(s);
        if (j.v * j.v - j.v * j.d2 + 2.0 * j.d1 * j.d1).abs() < 1e-12 {
            return Err(SmoothError::DegenerateProfile(s));
        }
    }
    let p = phi.clone();
    let integral = CumulativeIntegral::new(grid, move |s| w_integrand(&p, s));
    let min_j = grid
        .points
        .iter()
        .map(|&s| integral.eval(s))
        .fold(f64::INFINITY, f64::min);
    Ok(-min_j)
}

pub fn kappa_from_profile(
    phi: &ProfileFunction,
    i_value: f64,
    grid: &Grid,
) -> Result<ProfileCurvature, SmoothError> {
    let min_feasible = min_feasible_deformation(phi, grid)?;
    if i_value <= min_feasible {
        return Err(SmoothError::InfeasibleDeformation(format!(
            "deformation constant {i_value} does not keep W positive (needs > {min_feasible:.6})"
        )));
    }
    let p = phi.clone();
    let integral = Arc::new(CumulativeIntegral::new(grid, move |s| w_integrand(&p, s)));
    let p_k = phi.clone();
    let int_k = integral.clone();
    let kappa = move |s: f64| {
        let j = p_k.jet(s);
        let big_phi = j.v * j.v - j.v * j.d2 + 2.0 * j.d1 * j.d1;
        let w = int_k.eval(s) + i_value;
        big_phi / (j.v.powi(3) * w.sqrt())
    };
    let p_kp = phi.clone();
    let int_kp = integral.clone();
    let kappa_prime = move |s: f64| {
        let j = p_kp.jet(s);
        let big_phi = j.v * j.v - j.v * j.d2 + 2.0 * j.d1 * j.d1;
        // Φ′ = 2φφ′ + 3φ′φ″ − φφ‴
        let big_phi_d = 2.0 * j.v * j.d1 + 3.0 * j.d1 * j.d2 - j.v * j.d3;
        let w = int_kp.eval(s) + i_value;
        let w_d = w_integrand(&p_kp, s);
        let psi = j.v.powi(3) * w.sqrt();
        let psi_d = 3.0 * j.v * j.v * j.d1 * w.sqrt() + j.v.powi(3) * w_d / (2.0 * w.sqrt());
        (big_phi_d * psi - big_phi * psi_d) / (psi * psi)
    };
    Ok(ProfileCurvature {
        field: CurvatureField::new(kappa, kappa_prime),
        min_feasible,
    })
}

/// Residuals of the two remaining matching conditions for a pair of
/// profiles on one cone. The first is the closed form Φ₁²φ₂⁶ − Φ₂²φ₁⁶; the
/// second is extracted from Φ₂²φ₁⁶W₁ − Φ₁²φ₂⁶W₂ at two deformation samples
/// (the expression is affine in the deformation constant).
pub fn matching_residuals(
    phi1: &ProfileFunction,
    phi2: &ProfileFunction,
    i_samples: &[f64],
    grid: &Grid,
) -> Result<(f64, f64), SmoothError> {
    grid.validate(3)?;
    let mut distinct = i_samples.to_vec();
    distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if distinct.len() < 2 {
        return Err(SmoothError::NeedTwoSamples);
    }
    let (ia, ib) = (distinct[0], distinct[1]);
    let p1 = phi1.clone();
    let p2 = phi2.clone();
    let j1 = CumulativeIntegral::new(grid, move |s| w_integrand(&p1, s));
    let j2 = CumulativeIntegral::new(grid, move |s| w_integrand(&p2, s));
    let mut u1_max: f64 = 0.0;
    let mut u0_max: f64 = 0.0;
    for &s in &grid.points {
        let a = phi1.jet(s);
        let b = phi2.jet(s);
        let big1 = a.v * a.v - a.v * a.d2 + 2.0 * a.d1 * a.d1;
        let big2 = b.v * b.v - b.v * b.d2 + 2.0 * b.d1 * b.d1;
        let u1_closed = big1 * big1 * b.v.powi(6) - big2 * big2 * a.v.powi(6);
        let g = |i_val: f64| {
            big2 * big2 * a.v.powi(6) * (j1.eval(s) + i_val)
                - big1 * big1 * b.v.powi(6) * (j2.eval(s) + i_val)
        };
        let (ga, gb) = (g(ia), g(ib));
        let u1_affine = (ga - gb) / (ia - ib);
        let u0 = ga - u1_affine * ia;
        // the affine slope is −U₁ of the closed form; use the closed form
        // as the reported first residual and check consistency
        debug_assert!(
            (u1_affine + u1_closed).abs() <= 1e-6 * (1.0 + u1_closed.abs()),
            "affine extraction disagrees with the closed form"
        );
        u1_max = u1_max.max(u1_closed.abs());
        u0_max = u0_max.max(u0.abs());
    }
    Ok((u1_max, u0_max))
}

/// Planarity report for the section curve p = φ·e₁ of an integrated cone.
#[derive(Clone, Copy, Debug)]
pub struct SectionPlanarity {
    pub torsion_residual: f64,
    pub plane_fit_residual: f64,
}

pub fn cone_section_planarity(
    field: &CurvatureField,
    phi: &ProfileFunction,
    grid: &Grid,
) -> Result<SectionPlanarity, SmoothError> {
    grid.validate(7)?;
    let frame = darboux_integrate(field, grid, [Vec3::EX, Vec3::EY, Vec3::EZ])?;
    let pts: Vec<Vec3> = frame
        .s
        .iter()
        .zip(&frame.e1)
        .map(|(&s, &e1)| e1 * phi.eval(s))
        .collect();
    let torsion = torsion_residual(&pts, grid.step())?;
    let (_, fit) = fit_plane(&pts);
    Ok(SectionPlanarity {
        torsion_residual: torsion,
        plane_fit_residual: fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_curvature_frame_traces_great_circle() {
        let grid = Grid::uniform(0.0, std::f64::consts::TAU, 1e-3);
        let frame =
            darboux_integrate(&CurvatureField::constant(0.0), &grid, [Vec3::EX, Vec3::EY, Vec3::EZ])
                .unwrap();
        for (i, &s) in frame.s.iter().enumerate() {
            let want = Vec3::EX * s.cos() + Vec3::EY * s.sin();
            assert!(frame.e1[i].distance(want) < 5e-10);
            assert!(frame.e3[i].distance(Vec3::EZ) < 5e-10);
        }
    }

    #[test]
    fn constant_curvature_frame_stays_unit() {
        let grid = Grid::uniform(0.0, std::f64::consts::TAU, 1e-3);
        let frame =
            darboux_integrate(&CurvatureField::constant(0.5), &grid, [Vec3::EX, Vec3::EY, Vec3::EZ])
                .unwrap();
        for e1 in &frame.e1 {
            assert!((e1.norm() - 1.0).abs() < 5e-10);
        }
        assert!(frame.orthonormality_drift() < 1e-9 * grid.end().max(1.0));
    }

    #[test]
    fn drift_converges_at_fourth_order() {
        let field = CurvatureField::new(|s| 0.7 + 0.3 * s.sin(), |s| 0.3 * s.cos());
        let coarse = Grid::uniform(0.0, 2.0, 2e-2);
        let fine = coarse.refined();
        let d_coarse = darboux_integrate(&field, &coarse, [Vec3::EX, Vec3::EY, Vec3::EZ])
            .unwrap()
            .orthonormality_drift();
        let d_fine = darboux_integrate(&field, &fine, [Vec3::EX, Vec3::EY, Vec3::EZ])
            .unwrap()
            .orthonormality_drift();
        let order = (d_coarse / d_fine).log2();
        assert!(order > 3.5, "observed order {order}");
    }

    #[test]
    fn non_orthonormal_initial_frame_is_rejected() {
        let grid = Grid::uniform(0.0, 1.0, 0.1);
        let r = darboux_integrate(
            &CurvatureField::constant(0.0),
            &grid,
            [Vec3::EX * 1.1, Vec3::EY, Vec3::EZ],
        );
        assert!(matches!(r, Err(SmoothError::NonOrthonormalFrame(_))));
    }

    #[test]
    fn torsion_detects_planar_and_helical_curves() {
        let h = 1e-3;
        let circle: Vec<Vec3> = (0..2000)
            .map(|k| {
                let t = k as f64 * h;
                Vec3::new(2.0 * t.cos(), 0.5 + 2.0 * t.sin(), -1.0)
            })
            .collect();
        assert!(torsion_residual(&circle, h).unwrap() < 1e-8);
        let helix: Vec<Vec3> = (0..2000)
            .map(|k| {
                let t = k as f64 * h;
                Vec3::new(t.cos(), t.sin(), t)
            })
            .collect();
        let tau = torsion_residual(&helix, h).unwrap();
        assert!((tau - 0.5).abs() < 1e-6, "helix torsion {tau}");
    }

    #[test]
    fn torsion_rejects_degenerate_curves() {
        let h = 1e-2;
        let line: Vec<Vec3> = (0..40).map(|k| Vec3::EX * (k as f64 * h)).collect();
        assert!(matches!(
            torsion_residual(&line, h),
            Err(SmoothError::TorsionUndefined(_))
        ));
    }

    #[test]
    fn constant_profile_curvature_closed_form() {
        let grid = Grid::uniform(0.0, 2.0, 1e-3);
        // φ ≡ 1, deformation constant 4: κ ≡ 1/2
        let phi = ProfileFunction::constant((0.0, 2.0), 1.0);
        let pc = kappa_from_profile(&phi, 4.0, &grid).unwrap();
        for k in 0..20 {
            let s = 0.1 * k as f64;
            assert!((pc.field.kappa(s) - 0.5).abs() < 1e-12);
            assert!(pc.field.kappa_prime(s).abs() < 1e-12);
        }
        // φ ≡ c: κ = 1/(c·√I)
        let phi_c = ProfileFunction::constant((0.0, 2.0), 1.7);
        let pc = kappa_from_profile(&phi_c, 2.3, &grid).unwrap();
        assert!((pc.field.kappa(1.0) - 1.0 / (1.7 * 2.3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn constant_profile_planarity_residual_is_kappa_prime() {
        let grid = Grid::uniform(0.0, 2.0, 1e-2);
        let phi = ProfileFunction::constant((0.0, 2.0), 1.3);
        let field = CurvatureField::constant(0.8);
        assert_eq!(planarity_residual(&phi, &field, &grid).unwrap(), 0.0);
        let wavy = CurvatureField::new(|s| 0.8 + 0.2 * s.sin(), |s| 0.2 * s.cos());
        let residual = planarity_residual(&phi, &wavy, &grid).unwrap();
        let expected = 1.3f64.powi(3) * 0.2;
        assert!((residual - expected).abs() < 1e-6);
    }

    fn wavy_profile() -> ProfileFunction {
        ProfileFunction::analytic(
            (0.0, 2.0),
            |s| 1.0 + 0.1 * s.sin(),
            |s| 0.1 * s.cos(),
            |s| -0.1 * s.sin(),
            |s| -0.1 * s.cos(),
        )
    }

    #[test]
    fn profile_curvature_solves_planarity() {
        let grid = Grid::uniform(0.0, 2.0, 1e-3);
        let phi = wavy_profile();
        let min_i = min_feasible_deformation(&phi, &grid).unwrap();
        let pc = kappa_from_profile(&phi, min_i + 1.0, &grid).unwrap();
        let residual = planarity_residual(&phi, &pc.field, &grid).unwrap();
        assert!(residual < 1e-6, "planarity residual {residual}");
        // infeasible deformation constants are rejected
        assert!(matches!(
            kappa_from_profile(&phi, min_i - 1.0, &grid),
            Err(SmoothError::InfeasibleDeformation(_))
        ));
    }

    #[test]
    fn quadrature_is_stable_under_refinement() {
        let grid = Grid::uniform(0.0, 2.0, 2e-3);
        let phi = wavy_profile();
        let min_i = min_feasible_deformation(&phi, &grid).unwrap();
        let pc1 = kappa_from_profile(&phi, min_i + 1.0, &grid).unwrap();
        let pc2 = kappa_from_profile(&phi, min_i + 1.0, &grid.refined()).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..40 {
            let s = 0.05 * k as f64;
            worst = worst.max((pc1.field.kappa(s) - pc2.field.kappa(s)).abs());
        }
        assert!(worst < 1e-8, "grid-halving change {worst}");
    }

    #[test]
    fn circular_cone_section_is_planar() {
        let grid = Grid::uniform(0.0, 2.0, 1e-3);
        let phi = ProfileFunction::constant((0.0, 2.0), 1.0);
        let report = cone_section_planarity(&CurvatureField::constant(0.5), &phi, &grid).unwrap();
        assert!(report.torsion_residual < 1e-6);
        assert!(report.plane_fit_residual < 1e-6);
    }

    #[test]
    fn random_profile_fails_planarity() {
        let grid = Grid::uniform(0.0, 2.0, 1e-3);
        let phi = ProfileFunction::analytic(
            (0.0, 2.0),
            |s| 1.0 + 0.3 * s,
            |_| 0.3,
            |_| 0.0,
            |_| 0.0,
        );
        let report = cone_section_planarity(&CurvatureField::constant(0.5), &phi, &grid).unwrap();
        assert!(report.torsion_residual > 1e-2);
    }

    #[test]
    fn deformation_family_changes_the_cone_but_not_planarity() {
        let grid = Grid::uniform(0.0, 2.0, 1e-3);
        let phi = wavy_profile();
        let min_i = min_feasible_deformation(&phi, &grid).unwrap();
        let pc_a = kappa_from_profile(&phi, min_i + 1.0, &grid).unwrap();
        let pc_b = kappa_from_profile(&phi, min_i + 2.5, &grid).unwrap();
        let mut kappa_gap = 0.0f64;
        for k in 0..20 {
            let s = 0.1 * k as f64;
            kappa_gap = kappa_gap.max((pc_a.field.kappa(s) - pc_b.field.kappa(s)).abs());
        }
        assert!(kappa_gap > 1e-3, "deformation states should differ");
        for pc in [&pc_a, &pc_b] {
            let report = cone_section_planarity(&pc.field, &phi, &grid).unwrap();
            assert!(report.torsion_residual < 1e-5);
            assert!(report.plane_fit_residual < 1e-5);
        }
    }

    #[test]
    fn matched_partner_profile_satisfies_closed_form() {
        let grid = Grid::uniform(0.0, 2.0, 1e-3);
        let phi2 = wavy_profile();
        let phi1 = super::super::profile::partner_profile(&phi2, 0.2, -0.1, true).unwrap();
        let (u1, _u0) = matching_residuals(&phi1, &phi2, &[3.0, 5.0], &grid).unwrap();
        assert!(u1 < 1e-9, "closed-form residual {u1}");
        // identical profiles: both residuals vanish identically
        let (u1, u0) = matching_residuals(&phi2, &phi2, &[3.0, 5.0], &grid).unwrap();
        assert!(u1 == 0.0 && u0 == 0.0);
        // unrelated profiles violate the first condition
        let other = ProfileFunction::constant((0.0, 2.0), 1.4);
        let (u1, _) = matching_residuals(&other, &phi2, &[3.0, 5.0], &grid).unwrap();
        assert!(u1 > 1e-3);
    }

    #[test]
    fn matching_needs_two_deformation_samples() {
        let grid = Grid::uniform(0.0, 2.0, 1e-2);
        let phi = wavy_profile();
        assert!(matches!(
            matching_residuals(&phi, &phi, &[3.0, 3.0], &grid),
            Err(SmoothError::NeedTwoSamples)
        ));
    }

    #[test]
    fn congruence_for_different_initial_frames() {
        // same curvature, rotated initial frame: curves agree after the
        // rotation that aligns the initial frames
        let field = CurvatureField::new(|s| 0.4 + 0.2 * (2.0 * s).cos(), |s| -0.4 * (2.0 * s).sin());
        let grid = Grid::uniform(0.0, 2.0, 1e-3);
        let f1 = darboux_integrate(&field, &grid, [Vec3::EX, Vec3::EY, Vec3::EZ]).unwrap();
        let rot = crate::geom::rodrigues(Vec3::new(1.0, 2.0, -1.0).normalized(), 0.9);
        let init2 = [rot.apply(Vec3::EX), rot.apply(Vec3::EY), rot.apply(Vec3::EZ)];
        let f2 = darboux_integrate(&field, &grid, init2).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..f1.s.len() {
            worst = worst.max(rot.apply(f1.e1[i]).distance(f2.e1[i]));
        }
        assert!(worst < 1e-8, "congruence deviation {worst}");
    }

    #[test]
    fn pencil_profile_preserves_planarity() {
        let grid = Grid::uniform(0.0, 2.0, 1e-3);
        let phi2 = wavy_profile();
        let phi1 = super::super::profile::partner_profile(&phi2, 0.05, -0.03, true).unwrap();
        // the shared curvature comes from either profile; check both keep
        // the condition and so does a cross-ratio combination
        let min_i = min_feasible_deformation(&phi2, &grid).unwrap();
        let pc = kappa_from_profile(&phi2, min_i + 1.0, &grid).unwrap();
        let r2 = planarity_residual(&phi2, &pc.field, &grid).unwrap();
        assert!(r2 < 1e-6);
        let blend = super::super::profile::pencil_profile(&phi1, &phi2, 3.0).unwrap();
        let r1 = planarity_residual(&phi1, &pc.field, &grid).unwrap();
        let rb = planarity_residual(&blend, &pc.field, &grid).unwrap();
        // a cross-ratio combination of two solutions stays within the
        // pencil bound
        assert!(rb < (r1.max(r2)).max(1e-6) * 10.0 + 1e-5);
    }
}
