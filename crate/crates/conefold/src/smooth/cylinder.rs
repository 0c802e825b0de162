//! Deformable smooth cylinders: planar frame integration, the planarity ODE
//! of ruled-offset sections, and its closed-form curvature solution.

use super::profile::ProfileFunction;
use super::{Grid, SmoothError};
use crate::geom::{fit_plane, Vec3};
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Curvature of the planar base curve for one deformation state.
#[derive(Clone)]
pub struct PlanarCurvatureField {
    kappa: ScalarFn,
    kappa_prime: ScalarFn,
}

impl PlanarCurvatureField {
    pub fn new<F, G>(kappa: F, kappa_prime: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        PlanarCurvatureField {
            kappa: Arc::new(kappa),
            kappa_prime: Arc::new(kappa_prime),
        }
    }

    pub fn constant(c: f64) -> Self {
        PlanarCurvatureField::new(move |_| c, |_| 0.0)
    }

    pub fn kappa(&self, s: f64) -> f64 {
        (self.kappa)(s)
    }

    pub fn kappa_prime(&self, s: f64) -> f64 {
        (self.kappa_prime)(s)
    }
}

/// Frame and base-curve samples of a planar directrix. The ruling direction
/// is held exactly constant by construction; the moving pair (e₁, e₂) and
/// the curve live in the plane spanned by the initial pair.
#[derive(Clone, Debug)]
pub struct PlanarFrameSamples {
    pub s: Vec<f64>,
    /// In-plane coordinates of c, e₁, e₂ relative to the initial basis.
    pub c: Vec<(f64, f64)>,
    pub e1: Vec<(f64, f64)>,
    pub e2: Vec<(f64, f64)>,
    /// Embedding basis: the initial (e₁, e₂) plus the constant ruling e₃.
    pub basis: [Vec3; 3],
}

impl PlanarFrameSamples {
    pub fn embed_curve(&self) -> Vec<Vec3> {
        self.c
            .iter()
            .map(|&(x, y)| self.basis[0] * x + self.basis[1] * y)
            .collect()
    }

    pub fn ruling(&self) -> Vec3 {
        self.basis[2]
    }

    /// Max deviation of (e₁, e₂) from orthonormality.
    pub fn orthonormality_drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.s.len() {
            let (a, b) = (self.e1[i], self.e2[i]);
            let dot = |u: (f64, f64), v: (f64, f64)| u.0 * v.0 + u.1 * v.1;
            worst = worst
                .max((dot(a, a) - 1.0).abs())
                .max((dot(b, b) - 1.0).abs())
                .max(dot(a, b).abs());
        }
        worst
    }
}

/// RK4 on the planar frame equations e₁′ = κe₂, e₂′ = −κe₁ together with
/// the base curve c′ = e₁.
pub fn planar_frame_integrate(
    field: &PlanarCurvatureField,
    grid: &Grid,
    initial: [Vec3; 3],
) -> Result<PlanarFrameSamples, SmoothError> {
    grid.validate(2)?;
    let [e1_0, e2_0, e3_0] = initial;
    let mut defect = (e1_0.norm() - 1.0).abs();
    defect = defect.max((e2_0.norm() - 1.0).abs());
    defect = defect.max((e3_0.norm() - 1.0).abs());
    defect = defect.max(e1_0.dot(e2_0).abs());
    defect = defect.max(e1_0.dot(e3_0).abs());
    defect = defect.max(e2_0.dot(e3_0).abs());
    if defect > 1e-9 {
        return Err(SmoothError::NonOrthonormalFrame(defect));
    }

    // state: (c, e1, e2) as in-plane 2-vectors relative to (e1_0, e2_0)
    type State = [(f64, f64); 3];
    let deriv = |s: f64, y: &State| -> State {
        let k = field.kappa(s);
        [
            y[1],
            (k * y[2].0, k * y[2].1),
            (-k * y[1].0, -k * y[1].1),
        ]
    };
    let add = |a: &State, b: &State, k: f64| -> State {
        [
            (a[0].0 + k * b[0].0, a[0].1 + k * b[0].1),
            (a[1].0 + k * b[1].0, a[1].1 + k * b[1].1),
            (a[2].0 + k * b[2].0, a[2].1 + k * b[2].1),
        ]
    };
    let mut samples = PlanarFrameSamples {
        s: Vec::with_capacity(grid.len()),
        c: Vec::with_capacity(grid.len()),
        e1: Vec::with_capacity(grid.len()),
        e2: Vec::with_capacity(grid.len()),
        basis: [e1_0, e2_0, e3_0],
    };
    let mut y: State = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
    samples.s.push(grid.points[0]);
    samples.c.push(y[0]);
    samples.e1.push(y[1]);
    samples.e2.push(y[2]);
    for w in grid.points.windows(2) {
        let (s, h) = (w[0], w[1] - w[0]);
        let k1 = deriv(s, &y);
        let k2 = deriv(s + 0.5 * h, &add(&y, &k1, 0.5 * h));
        let k3 = deriv(s + 0.5 * h, &add(&y, &k2, 0.5 * h));
        let k4 = deriv(s + h, &add(&y, &k3, h));
        let sum = add(&add(&k1, &k2, 2.0), &add(&k3, &k4, 1.0 / 2.0), 2.0);
        // sum = k1 + 2k2 + (k3 + k4/2)*2 = k1 + 2k2 + 2k3 + k4
        y = add(&y, &sum, h / 6.0);
        samples.s.push(w[1]);
        samples.c.push(y[0]);
        samples.e1.push(y[1]);
        samples.e2.push(y[2]);
    }
    Ok(samples)
}

/// Pointwise residual of the cylinder planarity condition
/// φ′κ³ + φ‴κ − φ″κ′ over the grid.
pub fn ode_residual(
    phi: &ProfileFunction,
    field: &PlanarCurvatureField,
    grid: &Grid,
) -> Result<f64, SmoothError> {
    grid.validate(2)?;
    let mut worst: f64 = 0.0;
    for &s in &grid.points {
        let j = phi.jet(s);
        let k = field.kappa(s);
        let kp = field.kappa_prime(s);
        worst = worst.max((j.d1 * k * k * k + j.d3 * k - j.d2 * kp).abs());
    }
    Ok(worst)
}

/// The closed-form curvature for a profile: κ = φ″ / √(I − φ′²). The grid is
/// trimmed to the largest contiguous feasible range (I − φ′² > margin).
pub struct PlanarProfileCurvature {
    pub field: PlanarCurvatureField,
    pub feasible: Grid,
}

pub fn kappa_planar(
    phi: &ProfileFunction,
    i_value: f64,
    grid: &Grid,
) -> Result<PlanarProfileCurvature, SmoothError> {
    grid.validate(2)?;
    const MARGIN: f64 = 1e-6;
    let feasible_pts: Vec<f64> = {
        // largest contiguous run of feasible nodes
        let ok: Vec<bool> = grid
            .points
            .iter()
            .map(|&s| i_value - phi.d1(s).powi(2) > MARGIN)
            .collect();
        let mut best = (0usize, 0usize);
        let mut start = None;
        for (i, &o) in ok.iter().enumerate() {
            match (o, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    if i - s > best.1 - best.0 {
                        best = (s, i);
                    }
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            if ok.len() - s > best.1 - best.0 {
                best = (s, ok.len());
            }
        }
        grid.points[best.0..best.1].to_vec()
    };
    if feasible_pts.len() < 2 {
        return Err(SmoothError::InfeasibleDeformation(format!(
            "deformation constant {i_value} leaves no feasible range (needs I > max φ′²)"
        )));
    }
    let p = phi.clone();
    let kappa = move |s: f64| {
        let r = i_value - p.d1(s).powi(2);
        p.d2(s) / r.sqrt()
    };
    let p2 = phi.clone();
    let kappa_prime = move |s: f64| {
        let dp = p2.d1(s);
        let ddp = p2.d2(s);
        let dddp = p2.d3(s);
        let r = i_value - dp * dp;
        dddp / r.sqrt() + ddp * ddp * dp / r.powf(1.5)
    };
    Ok(PlanarProfileCurvature {
        field: PlanarCurvatureField::new(kappa, kappa_prime),
        feasible: Grid {
            points: feasible_pts,
        },
    })
}

/// Both sides of the scaling identity: the residual of λ·φ against λ times
/// the residual of φ (the condition is linear in the profile).
pub fn scaling_check(
    phi: &ProfileFunction,
    lambda: f64,
    field: &PlanarCurvatureField,
    grid: &Grid,
) -> Result<(f64, f64), SmoothError> {
    let scaled = phi.scaled(lambda);
    let lhs = ode_residual(&scaled, field, grid)?;
    let rhs = lambda.abs() * ode_residual(phi, field, grid)?;
    Ok((lhs, rhs))
}

#[derive(Clone, Copy, Debug)]
pub struct SectionPlanarity {
    pub torsion_residual: f64,
    pub plane_fit_residual: f64,
}

/// Planarity of the ruled-offset section p = c + φ·e₃ on the integrated
/// cylinder.
pub fn cylinder_section_planarity(
    field: &PlanarCurvatureField,
    phi: &ProfileFunction,
    grid: &Grid,
) -> Result<SectionPlanarity, SmoothError> {
    grid.validate(7)?;
    let frame = planar_frame_integrate(field, grid, [Vec3::EX, Vec3::EY, Vec3::EZ])?;
    let base = frame.embed_curve();
    let ruling = frame.ruling();
    let pts: Vec<Vec3> = frame
        .s
        .iter()
        .zip(&base)
        .map(|(&s, &c)| c + ruling * phi.eval(s))
        .collect();
    let torsion = super::cone::torsion_residual(&pts, grid.step())?;
    let (_, fit) = fit_plane(&pts);
    Ok(SectionPlanarity {
        torsion_residual: torsion,
        plane_fit_residual: fit,
    })
}
