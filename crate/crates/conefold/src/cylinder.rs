//! The discrete cylindrical case (parallel rulings): constraint synthesis,
//! the containment-style fold coupling, and prism strip building.
//!
//! With parallel rulings the branch machinery of the cone collapses: the
//! admissible configurations satisfy one tangent-ratio relation per section
//! edge pair, the first coplanarity determinant divides the second along the
//! whole motion, and the d₁-eliminated condition degenerates to a
//! biquadratic of half the conical degree (modulo the positive half-angle
//! factor 1 + d₂²).

use crate::config::{FoldPair, SectionConfig};
use crate::elim::{alpha_det_coeffs, beta_det_coeffs, det_coeffs_in, eliminate_in_exact, DetCoeffs, Eliminated, ElimError};
use crate::exact::{QuadExt, QuadExtRing, Rational, RationalField};
use crate::geom::{self, Mat3, Vec3};
use crate::mesh::Mesh;
use crate::poly::{F64Ring, Ring};
use num::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CylinderError {
    #[error("excluded seed: {0}")]
    ExcludedSeed(String),
    #[error("branch infeasible: no admissible root for {0}")]
    InfeasibleBranch(String),
    #[error("outer faces are parallel ({0})")]
    ParallelFaces(String),
    #[error("synthesized configuration hits an excluded case: {0}")]
    DegenerateOutput(String),
    #[error("motion limit: no real first fold angle at d₂ = {0}")]
    MotionLimit(f64),
    #[error(transparent)]
    Elim(#[from] ElimError),
}

/// Cylinder germ: six edge tangents (the ruling tangent is zero) plus the
/// development spacing between consecutive fold lines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderConfig {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub spacing: f64,
}

impl CylinderConfig {
    pub fn to_section_config(&self) -> SectionConfig {
        SectionConfig::new(0.0, [self.s1, self.s2, self.s3], [self.t1, self.t2, self.t3])
    }

    /// The normalized variant: the second cutting plane orthogonal to the
    /// rulings, which keeps its section planar under any fold path.
    pub fn with_beta_normal(&self) -> Self {
        CylinderConfig {
            t1: 1.0,
            t2: 1.0,
            t3: 1.0,
            ..*self
        }
    }
}

/// The pairing polynomial tying one further edge pair (sᵢ, tᵢ) to the first:
///
///   s₁²sᵢt₁tᵢ² − s₁sᵢ²t₁²tᵢ − s₁²sᵢt₁ + s₁sᵢ²tᵢ + s₁t₁²tᵢ − sᵢt₁tᵢ² − s₁tᵢ + sᵢt₁
///
/// It vanishes iff tan θ(sᵢ)/tan θ(tᵢ) = tan θ(s₁)/tan θ(t₁).
pub fn pairing_in<R: Ring>(
    ring: &R,
    s1: &R::El,
    si: &R::El,
    t1: &R::El,
    ti: &R::El,
) -> R::El {
    let one = ring.one();
    let s1sq = ring.mul(s1, s1);
    let t1sq = ring.mul(t1, t1);
    let tisq = ring.mul(ti, ti);
    let sisq = ring.mul(si, si);
    // grouped form: (s1²−1)·sᵢ·t1·(tᵢ²−1) − s1·(t1²−1)·(sᵢ²−1)·tᵢ
    let lead = ring.mul(&ring.sub(&s1sq, &one), &ring.mul(si, t1));
    let first = ring.mul(&lead, &ring.sub(&tisq, &one));
    let second = ring.mul(
        &ring.mul(s1, &ring.sub(&t1sq, &one)),
        &ring.mul(&ring.sub(&sisq, &one), ti),
    );
    ring.sub(&first, &second)
}

pub fn pairing(s1: f64, si: f64, t1: f64, ti: f64) -> f64 {
    pairing_in(&F64Ring, &s1, &si, &t1, &ti)
}

/// Coefficients (a, b) of the pairing as the quadratic a·tᵢ² + b·tᵢ − a.
pub fn pairing_quadratic_in<R: Ring>(
    ring: &R,
    s1: &R::El,
    si: &R::El,
    t1: &R::El,
) -> (R::El, R::El) {
    let one = ring.one();
    let a = ring.mul(&ring.sub(&ring.mul(s1, s1), &one), &ring.mul(si, t1));
    let b = ring.neg(&ring.mul(
        &ring.mul(s1, &ring.sub(&ring.mul(t1, t1), &one)),
        &ring.sub(&ring.mul(si, si), &one),
    ));
    (a, b)
}

/// Real roots of the pairing in tᵢ, ascending. Each genuine quadratic has
/// two (the roots multiply to −1); degeneration can leave one or none.
pub fn solve_pairing_for_ti(s1: f64, si: f64, t1: f64) -> Vec<f64> {
    let (a, b) = pairing_quadratic_in(&F64Ring, &s1, &si, &t1);
    let c = -a;
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = vec![
        if q != 0.0 { c / q } else { 0.0 },
        if q != 0.0 { q / a } else { -c / b },
    ];
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

fn parallel_faces_label(config: &CylinderConfig, tol: f64) -> Option<String> {
    let near = |x: f64| x.abs() <= tol;
    if near(config.t1 - config.t3) || near(config.t1 + config.t3) {
        return Some("outer second-plane edges parallel".into());
    }
    if near(config.t1 * config.t3 + 1.0) || near(config.t1 * config.t3 - 1.0) {
        return Some("outer second-plane edges parallel (opposite orientation)".into());
    }
    if near(config.s1 - config.s3) || near(config.s1 + config.s3) {
        return Some("outer first-plane edges parallel".into());
    }
    if near(config.s1 * config.s3 + 1.0) || near(config.s1 * config.s3 - 1.0) {
        return Some("outer first-plane edges parallel (opposite orientation)".into());
    }
    None
}

fn cylinder_exclusions(config: &CylinderConfig, tol: f64) -> Option<String> {
    let near = |x: f64| x.abs() <= tol;
    for (label, w) in [
        ("a1", config.s1),
        ("a2", config.s2),
        ("a3", config.s3),
        ("b1", config.t1),
        ("b2", config.t2),
        ("b3", config.t3),
    ] {
        if near(w) {
            return Some(format!("{label} along the ruling direction"));
        }
    }
    for (side, w1, w2) in [
        ("a", config.s1, config.s2),
        ("b", config.t1, config.t2),
    ] {
        if near(w1 - w2) || near(w1 * w2 + 1.0) {
            return Some(format!("δ₁=0 coincidence ({side}-side)"));
        }
        if near(w1 + w2) || near(w1 * w2 - 1.0) {
            return Some(format!("δ₁=π coincidence ({side}-side)"));
        }
    }
    None
}

/// Float synthesis: free tangents (s₁, s₂, s₃, t₁); t₂ and t₃ from the two
/// pairing conditions, four root combinations tried in ascending order.
pub fn synthesize_cylinder(
    s1: f64,
    s2: f64,
    s3: f64,
    t1: f64,
    spacing: f64,
) -> Result<CylinderConfig, CylinderError> {
    if [s1, s2, s3, t1].iter().any(|v| !v.is_finite() || *v == 0.0) {
        return Err(CylinderError::ExcludedSeed(
            "free tangents must be finite and nonzero".into(),
        ));
    }
    if spacing <= 0.0 {
        return Err(CylinderError::ExcludedSeed("spacing must be positive".into()));
    }
    let t2_roots = solve_pairing_for_ti(s1, s2, t1);
    if t2_roots.is_empty() {
        return Err(CylinderError::InfeasibleBranch("the (s₂, t₂) pairing".into()));
    }
    let t3_roots = solve_pairing_for_ti(s1, s3, t1);
    if t3_roots.is_empty() {
        return Err(CylinderError::InfeasibleBranch("the (s₃, t₃) pairing".into()));
    }
    let mut last = CylinderError::InfeasibleBranch("no admissible root combination".into());
    for &t2 in &t2_roots {
        for &t3 in &t3_roots {
            let cand = CylinderConfig {
                s1,
                s2,
                s3,
                t1,
                t2,
                t3,
                spacing,
            };
            if let Some(label) = parallel_faces_label(&cand, 1e-9) {
                last = CylinderError::ParallelFaces(label);
                continue;
            }
            if let Some(label) = cylinder_exclusions(&cand, 1e-9) {
                last = CylinderError::DegenerateOutput(label);
                continue;
            }
            return Ok(cand);
        }
    }
    Err(last)
}

/// First-plane coplanarity determinant coefficients at the ruling tangent 0.
pub fn cyl_alpha_coeffs(config: &CylinderConfig) -> DetCoeffs<f64> {
    alpha_det_coeffs(&config.to_section_config())
}

pub fn cyl_beta_coeffs(config: &CylinderConfig) -> DetCoeffs<f64> {
    beta_det_coeffs(&config.to_section_config())
}

/// Direct evaluation of a cylinder coplanarity determinant: every rotation
/// happens about the shared ruling direction. Independent of the conical
/// evaluators, used as their μ = 0 cross-check.
pub fn cylinder_det_direct(w: [f64; 3], fold: FoldPair) -> f64 {
    let r1 = geom::rotation_about_x(fold.d1.angle());
    let r2 = geom::rotation_about_x(fold.d2.angle());
    let dir = |t: f64| Vec3::planar_dir(geom::angle_from_half_tan(t));
    geom::det3(r1.apply(dir(w[0])), dir(w[1]), r2.apply(dir(w[2])))
}

/// All first fold tangents compatible with a given second fold tangent:
/// real roots of the first determinant, ascending. On a synthesized
/// configuration every root also annihilates the second determinant.
pub fn fold_coupling_cyl(config: &CylinderConfig, d2: f64) -> Vec<f64> {
    let dc = cyl_alpha_coeffs(config);
    solve_det_for_slot(&dc, d2, true)
}

/// Roots of the determinant in one fold slot given the other. `first_slot`
/// solves for d₁ given d₂.
fn solve_det_for_slot(dc: &DetCoeffs<f64>, known: f64, first_slot: bool) -> Vec<f64> {
    // D = a·d1 + b·d2 + c·d1²d2 + e·d1·d2²
    let (qa, qb, qc) = if first_slot {
        (dc.c * known, dc.a + dc.e * known * known, dc.b * known)
    } else {
        (dc.e * known, dc.b + dc.c * known * known, dc.a * known)
    };
    if qa.abs() < 1e-300 {
        if qb.abs() < 1e-300 {
            return Vec::new();
        }
        return vec![-qc / qb];
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let mut roots = if q == 0.0 {
        vec![0.0, -qb / qa]
    } else {
        vec![qc / q, q / qa]
    };
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// Max |second determinant| over the coupled fold states for one d₂ sample,
/// normalized by the determinant's coefficient scale.
pub fn containment_residual(config: &CylinderConfig, d2: f64) -> Option<f64> {
    let roots = fold_coupling_cyl(config, d2);
    if roots.is_empty() {
        return None;
    }
    let db = cyl_beta_coeffs(config);
    let scale = db.a.abs().max(db.b.abs()).max(db.c.abs()).max(db.e.abs());
    Some(
        roots
            .into_iter()
            .map(|d1| db.eval(&F64Ring, &d1, &d2).abs() / scale.max(1e-300))
            .fold(0.0, f64::max),
    )
}

/// Outcome of eliminating d₁ at the ruling tangent 0: the resultant factors
/// as d₂²·(1 + d₂²)·(E₄'·d₂² + E₀'), so the even quartic satisfies
/// E₂ = E₄ + E₀ and the genuine condition is the degenerate biquadratic
/// pair (E₄, E₀).
pub struct CylEliminated<T> {
    pub e2: T,
    pub e0: T,
}

pub fn eval_e_cyl(config: &CylinderConfig) -> Result<CylEliminated<f64>, CylinderError> {
    let e = crate::elim::eval_e(&config.to_section_config())?;
    let scale = e.e4.abs().max(e.e2.abs()).max(e.e0.abs());
    if (e.e2 - e.e4 - e.e0).abs() > 1e-9 * scale.max(1e-300) {
        return Err(CylinderError::Elim(ElimError::StructureViolation(
            "biquadratic degeneration failed at zero ruling tangent".into(),
        )));
    }
    Ok(CylEliminated { e2: e.e4, e0: e.e0 })
}

/// Exact cylinder configuration: four rational tangents plus the two paired
/// tangents as generators of the quadratic quotient algebra.
#[derive(Clone, Debug)]
pub struct ExactCylinderConfig {
    pub s1: Rational,
    pub s2: Rational,
    pub s3: Rational,
    pub t1: Rational,
    /// ℚ[t₂, t₃] modulo the two pairing quadratics.
    pub ring: QuadExtRing,
    pub t2_positive: bool,
    pub t3_positive: bool,
}

impl ExactCylinderConfig {
    pub fn to_float(&self, spacing: f64) -> CylinderConfig {
        let (lo2, hi2) = QuadExtRing::roots(&self.ring.b_first);
        let (lo3, hi3) = QuadExtRing::roots(&self.ring.b_second);
        CylinderConfig {
            s1: crate::exact::rational_to_f64(&self.s1),
            s2: crate::exact::rational_to_f64(&self.s2),
            s3: crate::exact::rational_to_f64(&self.s3),
            t1: crate::exact::rational_to_f64(&self.t1),
            t2: if self.t2_positive { hi2 } else { lo2 },
            t3: if self.t3_positive { hi3 } else { lo3 },
            spacing,
        }
    }
}

/// Exact synthesis over the rationals; both paired tangents stay symbolic.
pub fn synthesize_cylinder_exact(
    s1: &Rational,
    s2: &Rational,
    s3: &Rational,
    t1: &Rational,
) -> Result<ExactCylinderConfig, CylinderError> {
    let rf = RationalField;
    if [s1, s2, s3, t1].iter().any(|v| v.is_zero()) {
        return Err(CylinderError::ExcludedSeed(
            "free tangents must be nonzero".into(),
        ));
    }
    let (a2, b2) = pairing_quadratic_in(&rf, s1, s2, t1);
    if a2.is_zero() {
        return Err(CylinderError::InfeasibleBranch("the (s₂, t₂) pairing".into()));
    }
    let (a3, b3) = pairing_quadratic_in(&rf, s1, s3, t1);
    if a3.is_zero() {
        return Err(CylinderError::InfeasibleBranch("the (s₃, t₃) pairing".into()));
    }
    let ring = QuadExtRing::new(&b2 / &a2, &b3 / &a3);
    // identical minimal polynomials would make the two outer second-plane
    // edges coincide up to orientation
    if ring.b_first == ring.b_second {
        return Err(CylinderError::ParallelFaces(
            "second-plane middle and outer tangents share a quadratic".into(),
        ));
    }
    let quad_at = |b: &Rational, x: &Rational| -> Rational { x * x + b * x - Rational::one() };
    let one = Rational::one();
    // flat-fold coincidences of (t₁, t₂)
    if quad_at(&ring.b_first, t1).is_zero() || quad_at(&ring.b_first, &(-&one / t1)).is_zero() {
        return Err(CylinderError::DegenerateOutput("δ₁=0 coincidence (b-side)".into()));
    }
    if quad_at(&ring.b_first, &(-t1)).is_zero() || quad_at(&ring.b_first, &(&one / t1)).is_zero() {
        return Err(CylinderError::DegenerateOutput("δ₁=π coincidence (b-side)".into()));
    }
    // parallel outer faces: t₃ ∈ {±t₁, ±1/t₁} or the s-side analogue
    if quad_at(&ring.b_second, t1).is_zero()
        || quad_at(&ring.b_second, &(-t1)).is_zero()
        || quad_at(&ring.b_second, &(&one / t1)).is_zero()
        || quad_at(&ring.b_second, &(-&one / t1)).is_zero()
    {
        return Err(CylinderError::ParallelFaces("outer second-plane edges".into()));
    }
    if s1 == s3 || &(-s1) == s3 || (s1 * s3 - &one).is_zero() || (s1 * s3 + &one).is_zero() {
        return Err(CylinderError::ParallelFaces("outer first-plane edges".into()));
    }
    // s-side flat-fold coincidences
    if s1 == s2 || (s1 * s2 + &one).is_zero() {
        return Err(CylinderError::DegenerateOutput("δ₁=0 coincidence (a-side)".into()));
    }
    if &(-s1) == s2 || (s1 * s2 - &one).is_zero() {
        return Err(CylinderError::DegenerateOutput("δ₁=π coincidence (a-side)".into()));
    }
    Ok(ExactCylinderConfig {
        s1: s1.clone(),
        s2: s2.clone(),
        s3: s3.clone(),
        t1: t1.clone(),
        ring,
        t2_positive: true,
        t3_positive: true,
    })
}

/// Exact elimination of a synthesized cylinder configuration in its quotient
/// algebra. On a genuine solution the full resultant vanishes identically.
pub fn eval_e_cyl_exact(cfg: &ExactCylinderConfig) -> Result<Eliminated<QuadExt>, CylinderError> {
    let ring = &cfg.ring;
    let lift = |r: &Rational| QuadExt::from_rational(r.clone());
    let zero = QuadExt::from_rational(Rational::zero());
    let alpha = det_coeffs_in(ring, &zero, &lift(&cfg.s1), &lift(&cfg.s2), &lift(&cfg.s3));
    let beta = det_coeffs_in(
        ring,
        &zero,
        &lift(&cfg.t1),
        &ring.generator_first(),
        &ring.generator_second(),
    );
    Ok(eliminate_in_exact(ring, &alpha, &beta)?)
}

/// True when the exact cylinder elimination vanishes identically and the
/// biquadratic degeneration E₂ = E₄ + E₀ holds exactly.
pub fn is_exact_cylinder_solution(cfg: &ExactCylinderConfig) -> Result<bool, CylinderError> {
    let e = eval_e_cyl_exact(cfg)?;
    let ring = &cfg.ring;
    let degenerate = ring.is_zero(&ring.sub(&e.e2, &ring.add(&e.e4, &e.e0)));
    Ok(degenerate && ring.is_zero(&e.e4) && ring.is_zero(&e.e2) && ring.is_zero(&e.e0))
}

/// Affine rigid transform.
#[derive(Clone, Copy, Debug)]
struct Affine {
    rot: Mat3,
    shift: Vec3,
}

impl Affine {
    const IDENTITY: Affine = Affine {
        rot: Mat3::IDENTITY,
        shift: Vec3::ZERO,
    };

    fn apply(&self, p: Vec3) -> Vec3 {
        self.rot.apply(p) + self.shift
    }

    fn rotation_about_line(point: Vec3, axis: Vec3, angle: f64) -> Affine {
        let rot = geom::rodrigues(axis, angle);
        let shift = point - rot.apply(point);
        Affine { rot, shift }
    }

    fn compose(&self, inner: &Affine) -> Affine {
        Affine {
            rot: self.rot.mul_mat(&inner.rot),
            shift: self.rot.apply(inner.shift) + self.shift,
        }
    }
}

/// A folded prism strip with its section polylines.
#[derive(Clone, Debug)]
pub struct PrismStrip {
    pub mesh: Mesh,
    pub alpha_points: Vec<Vec3>,
    pub beta_points: Vec<Vec3>,
    pub fold_tangents: Vec<f64>,
    pub alpha_residual: f64,
    pub beta_residual: f64,
}

/// Build an n-face strip with parallel fold lines at the configured spacing,
/// driven by the germ's second fold tangent. Section angles continue with
/// period two beyond the germ, which keeps every consecutive face triple on
/// the synthesized constraint set.
pub fn build_prism_strip(
    config: &CylinderConfig,
    n: usize,
    d2: f64,
) -> Result<PrismStrip, CylinderError> {
    assert!(n >= 3, "strip needs at least 3 faces");
    let h = config.spacing;
    // development angles per face, period two beyond the germ
    let angle = |t: f64| geom::angle_from_half_tan(t);
    let sigma: Vec<f64> = (0..n)
        .map(|j| match j {
            0 => angle(config.s1),
            1 => angle(config.s2),
            2 => angle(config.s3),
            _ => {
                if j % 2 == 1 {
                    angle(config.s2)
                } else {
                    angle(config.s3)
                }
            }
        })
        .collect();
    let tau: Vec<f64> = (0..n)
        .map(|j| match j {
            0 => angle(config.t1),
            1 => angle(config.t2),
            2 => angle(config.t3),
            _ => {
                if j % 2 == 1 {
                    angle(config.t2)
                } else {
                    angle(config.t3)
                }
            }
        })
        .collect();

    // fold tangents per interior fold line r₁..r₍ₙ₋₁₎
    let mut folds = Vec::with_capacity(n - 1);
    let d1_roots = fold_coupling_cyl(config, d2);
    let d1 = *d1_roots
        .iter()
        .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
        .ok_or(CylinderError::MotionLimit(d2))?;
    folds.push(d1);
    folds.push(d2);
    for j in 3..n {
        // triple (f₍ⱼ₋₁₎, fⱼ, fⱼ₊₁) drives the next fold from the previous
        let rf = F64Ring;
        let half = |th: f64| (th / 2.0).tan();
        let (w1, w2, w3) = (half(sigma[j - 2]), half(sigma[j - 1]), half(sigma[j]));
        let dc = det_coeffs_in(&rf, &0.0, &w1, &w2, &w3);
        // seen from the new middle face, the lower neighbour hangs at the
        // negative of the global fold angle
        let prev = -folds[j - 2];
        let roots = solve_det_for_slot(&dc, prev, false);
        let (v1, v2, v3) = (half(tau[j - 2]), half(tau[j - 1]), half(tau[j]));
        let db = det_coeffs_in(&rf, &0.0, &v1, &v2, &v3);
        let next = roots
            .into_iter()
            .min_by(|x, y| {
                let rx = db.eval(&rf, &prev, x).abs();
                let ry = db.eval(&rf, &prev, y).abs();
                (rx, x.abs())
                    .partial_cmp(&(ry, y.abs()))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or(CylinderError::MotionLimit(prev))?;
        folds.push(next);
    }

    // face placements: f₂ fixed in the xy-plane between y = 0 and y = h
    let mut transforms = vec![Affine::IDENTITY; n];
    transforms[0] = Affine::rotation_about_line(
        Vec3::ZERO,
        Vec3::EX,
        geom::angle_from_half_tan(folds[0]),
    );
    for j in 2..n {
        // fold line r_j sits at development height (j−1)·h
        let base = &transforms[j - 1];
        let point = base.apply(Vec3::new(0.0, (j as f64 - 1.0) * h, 0.0));
        let axis = base.rot.apply(Vec3::EX);
        let rot = Affine::rotation_about_line(
            point,
            axis,
            geom::angle_from_half_tan(folds[j - 1]),
        );
        transforms[j] = rot.compose(base);
    }

    // development section polylines; both anchored on the first fold line
    let mut a_dev = Vec::with_capacity(n + 1);
    let mut b_dev = Vec::with_capacity(n + 1);
    let walk = |angles: &[f64], anchor_x: f64| -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(n + 1);
        // the first segment runs backwards through face f₁ to its outer edge
        let start = (anchor_x, 0.0f64);
        let lam0 = h / angles[0].sin();
        pts.push((start.0 - lam0 * angles[0].cos(), start.1 - h));
        pts.push(start);
        let mut cur = start;
        for &th in angles.iter().take(n).skip(1) {
            let lam = h / th.sin();
            cur = (cur.0 + lam * th.cos(), cur.1 + h);
            pts.push(cur);
        }
        pts
    };
    a_dev.extend(walk(&sigma, 0.0));
    b_dev.extend(walk(&tau, 1.0));

    // map development points: crossing k sits on fold line r_k (y = (k−1)h),
    // shared by faces k and k+1; use face k+1's transform (consistent).
    let map_point = |k: usize, p: (f64, f64)| -> Vec3 {
        let face = k.min(n - 1);
        transforms[face].apply(Vec3::new(p.0, p.1, 0.0))
    };
    let a_pts: Vec<Vec3> = a_dev.iter().enumerate().map(|(k, &p)| map_point(k, p)).collect();
    let b_pts: Vec<Vec3> = b_dev.iter().enumerate().map(|(k, &p)| map_point(k, p)).collect();

    let mut mesh = Mesh::new();
    for j in 0..n {
        let i0 = mesh.push_vertex(a_pts[j]);
        let i1 = mesh.push_vertex(a_pts[j + 1]);
        let i2 = mesh.push_vertex(b_pts[j + 1]);
        let i3 = mesh.push_vertex(b_pts[j]);
        mesh.push_face(vec![i0, i1, i2, i3]);
    }

    // interior crossings only (indices 1..n−1 lie on fold lines)
    let interior = |pts: &[Vec3]| pts[1..n].to_vec();
    let a_int = interior(&a_pts);
    let b_int = interior(&b_pts);
    let fit = |pts: &[Vec3]| {
        if pts.len() >= 3 {
            geom::fit_plane(pts).1
        } else {
            0.0
        }
    };
    Ok(PrismStrip {
        alpha_residual: fit(&a_int),
        beta_residual: fit(&b_int),
        alpha_points: a_int,
        beta_points: b_int,
        fold_tangents: folds,
        mesh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn reference_cylinder() -> CylinderConfig {
        synthesize_cylinder(0.7, 0.35, 1.6, 1.2, 1.0).expect("reference synthesis")
    }

    #[test]
    fn pairing_vanishes_for_identical_planes() {
        assert!(pairing(0.7, 1.3, 0.7, 1.3).abs() < 1e-15);
        assert!(pairing(1.0, 2.0, 3.0, 0.5).abs() > 1e-3);
    }

    #[test]
    fn pairing_grouped_form_matches_printed_polynomial() {
        let mut state = 5u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..50 {
            let (s1, si, t1, ti) = (next(), next(), next(), next());
            let printed = s1 * s1 * si * t1 * ti * ti - s1 * si * si * t1 * t1 * ti
                - s1 * s1 * si * t1
                + s1 * si * si * ti
                + s1 * t1 * t1 * ti
                - si * t1 * ti * ti
                - s1 * ti
                + si * t1;
            let got = pairing(s1, si, t1, ti);
            assert!((printed - got).abs() < 1e-12 * (1.0 + printed.abs()));
        }
    }

    #[test]
    fn pairing_roots_back_substitute() {
        let roots = solve_pairing_for_ti(1.0, 2.0, 3.0);
        for &ti in &roots {
            assert!(pairing(1.0, 2.0, 3.0, ti).abs() < 1e-12);
        }
        // s1 = t1 makes tᵢ = sᵢ a root
        let roots = solve_pairing_for_ti(0.8, 1.7, 0.8);
        assert!(roots.iter().any(|r| (r - 1.7).abs() < 1e-12));
    }

    #[test]
    fn four_root_combinations_synthesize() {
        let (s1, s2, s3, t1) = (0.7, 0.35, 1.6, 1.2);
        let t2s = solve_pairing_for_ti(s1, s2, t1);
        let t3s = solve_pairing_for_ti(s1, s3, t1);
        assert_eq!((t2s.len(), t3s.len()), (2, 2));
        for &t2 in &t2s {
            for &t3 in &t3s {
                let cfg = CylinderConfig {
                    s1,
                    s2,
                    s3,
                    t1,
                    t2,
                    t3,
                    spacing: 1.0,
                };
                let res = containment_residual(&cfg, 0.6).expect("motion exists");
                assert!(res < 1e-10, "containment residual {res}");
            }
        }
    }

    #[test]
    fn coupling_roots_zero_second_determinant() {
        let cfg = reference_cylinder();
        let mut checked = 0;
        for k in 0..100 {
            let d2 = -2.0 + 4.0 * k as f64 / 99.0;
            if let Some(res) = containment_residual(&cfg, d2) {
                assert!(res < 1e-10, "residual {res} at d2 = {d2}");
                checked += 1;
            }
        }
        assert!(checked > 60);
        // flat state keeps the zero root
        let roots = fold_coupling_cyl(&cfg, 0.0);
        assert!(roots.iter().any(|r| r.abs() < 1e-14));
    }

    #[test]
    fn non_synthesized_config_fails_containment() {
        let mut cfg = reference_cylinder();
        cfg.t3 *= 1.02;
        let res = containment_residual(&cfg, 0.6).expect("roots exist");
        assert!(res > 1e-3, "containment should fail, got {res}");
    }

    #[test]
    fn mu_zero_determinants_match_direct_route() {
        let cfg = reference_cylinder();
        let sc = cfg.to_section_config();
        for k in 0..20 {
            let fold = FoldPair::finite(0.1 * k as f64 - 0.9, 0.07 * k as f64 - 0.6);
            let via_cone = crate::cone::alpha_det(&sc, fold);
            let direct = cylinder_det_direct([cfg.s1, cfg.s2, cfg.s3], fold);
            assert!((via_cone - direct).abs() < 1e-14);
            let via_cone_b = crate::cone::beta_det(&sc, fold);
            let direct_b = cylinder_det_direct([cfg.t1, cfg.t2, cfg.t3], fold);
            assert!((via_cone_b - direct_b).abs() < 1e-14);
        }
    }

    #[test]
    fn elimination_degenerates_to_biquadratic() {
        // the structural identity E₂ = E₄ + E₀ holds for any cylinder
        // configuration, synthesized or not
        let mut state = 11u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..20 {
            let cfg = CylinderConfig {
                s1: next() + 1.5,
                s2: next(),
                s3: next() - 1.5,
                t1: next() + 2.0,
                t2: next(),
                t3: next() - 2.0,
                spacing: 1.0,
            };
            if cylinder_exclusions(&cfg, 1e-6).is_some() {
                continue;
            }
            eval_e_cyl(&cfg).expect("biquadratic structure");
        }
        // while a conical (m ≠ 0) configuration does not degenerate
        let cone = SectionConfig::new(0.6, [-0.8, 0.25, 0.9], [-1.4, 0.45, 1.7]);
        let e = crate::elim::eval_e(&cone).unwrap();
        let defect = (e.e2 - e.e4 - e.e0).abs() / e.e2.abs().max(1.0);
        assert!(defect > 1e-3, "conical case should stay quartic");
    }

    #[test]
    fn exact_synthesis_eliminates_to_zero() {
        let cfg =
            synthesize_cylinder_exact(&rat(7, 10), &rat(7, 20), &rat(8, 5), &rat(6, 5)).unwrap();
        assert!(is_exact_cylinder_solution(&cfg).unwrap());
        // the float rendering matches the float synthesis
        let f = cfg.to_float(1.0);
        assert!(pairing(f.s1, f.s2, f.t1, f.t2).abs() < 1e-12);
        assert!(pairing(f.s1, f.s3, f.t1, f.t3).abs() < 1e-12);
    }

    #[test]
    fn prism_strip_flat_state_is_planar() {
        let cfg = reference_cylinder();
        let strip = build_prism_strip(&cfg, 3, 0.0).unwrap();
        for v in &strip.mesh.vertices {
            assert!(v.z.abs() < 1e-12);
        }
        assert!(strip.alpha_residual < 1e-12);
    }

    #[test]
    fn prism_sections_stay_planar_along_motion() {
        let cfg = reference_cylinder();
        let reference = build_prism_strip(&cfg, 7, 0.35).unwrap();
        let ref_lengths: Vec<f64> = edge_lengths(&reference);
        for k in 0..20 {
            let d2 = 0.05 + 0.03 * k as f64;
            let strip = build_prism_strip(&cfg, 7, d2).unwrap();
            assert!(
                strip.alpha_residual < 1e-9,
                "alpha residual {} at d2={d2}",
                strip.alpha_residual
            );
            assert!(strip.beta_residual < 1e-9);
            let lengths = edge_lengths(&strip);
            for (a, b) in ref_lengths.iter().zip(&lengths) {
                assert!((a - b).abs() < 1e-10, "edge length drift {a} vs {b}");
            }
        }
    }

    fn edge_lengths(strip: &PrismStrip) -> Vec<f64> {
        strip
            .mesh
            .faces
            .iter()
            .flat_map(|f| {
                f.iter()
                    .zip(f.iter().cycle().skip(1))
                    .map(|(&i, &j)| strip.mesh.vertices[i].distance(strip.mesh.vertices[j]))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    #[test]
    fn beta_normal_variant_keeps_second_section_planar() {
        let cfg = reference_cylinder().with_beta_normal();
        for k in 0..10 {
            let d2 = 0.1 + 0.1 * k as f64;
            let strip = build_prism_strip(&cfg, 6, d2).unwrap();
            assert!(strip.beta_residual < 1e-9);
        }
    }
}
