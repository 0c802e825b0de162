//! Iterates the three-face germ into a cone strip, verifies the mirror and
//! closure properties of the resulting cap, and builds pencil sections.
//!
//! The construction follows the structure of the underlying result: for a
//! synthesized germ the outer section lines are mirror images across the
//! plane through the apex orthogonal to the intersection of the two cutting
//! planes. Reflecting twice repeats every ruling with period four, so the
//! section polygons close into anti-parallelograms. The germ-level mirror
//! residual and the distance of the iterated points to the cutting planes
//! are the honest checks; both degrade to O(ε) under an O(ε) perturbation
//! of the configuration.

use crate::cone::{alpha_directions, beta_directions, detect_coupling, ConeError};
use crate::config::{FoldAngle, FoldPair, SectionConfig};
use crate::geom::{fit_plane, reflection_across, Mat3, Plane, Vec3};
use crate::mesh::Mesh;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BricardError {
    #[error("strip needs at least 3 faces, got {0}")]
    TooFewFaces(usize),
    #[error(transparent)]
    Coupling(#[from] ConeError),
    #[error("degenerate fold state: {0}")]
    DegenerateState(String),
    #[error("ruling {0} is parallel to a cutting plane")]
    RulingParallel(usize),
    #[error("cross-ratio value maps the section onto the apex")]
    PencilAtVertex,
    #[error("pencil point at infinity on ruling {0}")]
    PencilAtInfinity(usize),
}

/// End-face data: opening angles of the first and last face are free and can
/// be flipped to the other side of their boundary ruling.
#[derive(Clone, Copy, Debug)]
pub struct EndFaces {
    pub opening_first: f64,
    pub opening_last: f64,
    pub flip_first: bool,
    pub flip_last: bool,
}

impl EndFaces {
    pub fn symmetric(opening: f64) -> Self {
        EndFaces {
            opening_first: opening,
            opening_last: opening,
            flip_first: false,
            flip_last: false,
        }
    }
}

/// A cone strip at one fold state: apex at the origin, face fan spanned by
/// consecutive rulings, both cutting planes and the mirror plane.
#[derive(Clone, Debug)]
pub struct ConeStrip {
    pub config: SectionConfig,
    pub fold: FoldPair,
    pub ends: EndFaces,
    /// Unit ruling directions r₀..rₙ (n+1 of them for n faces).
    pub rulings: Vec<Vec3>,
    pub alpha: Plane,
    pub beta: Plane,
    pub omega: Plane,
    /// Section points on the interior rulings r₁..r₍ₙ₋₁₎, iterated by
    /// reflection from the germ.
    pub alpha_points: Vec<Vec3>,
    pub beta_points: Vec<Vec3>,
    /// Germ section lines (point, direction): a₁, a₃ and b₁, b₃.
    pub germ_lines: GermLines,
}

#[derive(Clone, Copy, Debug)]
pub struct GermLines {
    pub a1: (Vec3, Vec3),
    pub a3: (Vec3, Vec3),
    pub b1: (Vec3, Vec3),
    pub b3: (Vec3, Vec3),
}

impl ConeStrip {
    pub fn face_count(&self) -> usize {
        self.rulings.len() - 1
    }

    /// Section point of the first cutting plane on interior ruling j
    /// (1-based ruling index).
    pub fn alpha_point(&self, j: usize) -> Vec3 {
        self.alpha_points[j - 1]
    }

    pub fn beta_point(&self, j: usize) -> Vec3 {
        self.beta_points[j - 1]
    }
}

fn line_mirror_distance(mirror: &Mat3, from: (Vec3, Vec3), to: (Vec3, Vec3)) -> f64 {
    let p = mirror.apply(from.0);
    let v = mirror.apply(from.1).normalized();
    let w = to.1.normalized();
    // direction mismatch (orientation-free) plus point-to-line distances
    let dir = v.cross(w).norm();
    let dp = (p - to.0) - w * (p - to.0).dot(w);
    let dq = (to.0 - p) - v * (to.0 - p).dot(v);
    dir + dp.norm().min(dq.norm())
}

/// Build an n-face strip at fold tangent d₁, with d₂ from the coupling.
pub fn build_strip(
    config: &SectionConfig,
    n: usize,
    d1: f64,
    ends: EndFaces,
) -> Result<ConeStrip, BricardError> {
    let relation = detect_coupling(config)?;
    let d2 = relation.apply(d1)?;
    build_strip_at(config, n, FoldPair { d1: FoldAngle::Tan(d1), d2 }, ends)
}

/// Build a strip at an explicit fold state (no coupling involved). The state
/// should satisfy both coplanarity conditions for the section machinery to
/// be meaningful.
pub fn build_strip_at(
    config: &SectionConfig,
    n: usize,
    fold: FoldPair,
    ends: EndFaces,
) -> Result<ConeStrip, BricardError> {
    if n < 3 {
        return Err(BricardError::TooFewFaces(n));
    }
    let mu = config.mu();
    let r1 = Vec3::EX;
    let r2 = Vec3::planar_dir(mu);

    let [a1d, a2d, a3d] = alpha_directions(config, fold);
    let [b1d, b2d, b3d] = beta_directions(config, fold);

    // cutting planes: anchored at the unit points of the two germ rulings
    let n_alpha = a1d.cross(a2d);
    let n_beta = b1d.cross(b2d);
    if n_alpha.norm() < 1e-12 || n_beta.norm() < 1e-12 {
        return Err(BricardError::DegenerateState(
            "section direction pair is collinear".into(),
        ));
    }
    let alpha = Plane::new(r1, n_alpha);
    let beta = Plane::new(r2, n_beta);

    let axis = alpha.normal.cross(beta.normal);
    if axis.norm() < 1e-9 {
        return Err(BricardError::DegenerateState(
            "cutting planes are parallel at this state (flat configuration)".into(),
        ));
    }
    let omega = Plane::new(Vec3::ZERO, axis);
    let mirror = reflection_across(omega.normal);

    // germ section lines
    let p_a1 = alpha
        .ray_from_origin_param(r1)
        .ok_or(BricardError::RulingParallel(1))?;
    let p_a2 = alpha
        .ray_from_origin_param(r2)
        .ok_or(BricardError::RulingParallel(2))?;
    let p_b1 = beta
        .ray_from_origin_param(r1)
        .ok_or(BricardError::RulingParallel(1))?;
    let p_b2 = beta
        .ray_from_origin_param(r2)
        .ok_or(BricardError::RulingParallel(2))?;
    let germ_lines = GermLines {
        a1: (r1 * p_a1, a1d),
        a3: (r2 * p_a2, a3d),
        b1: (r1 * p_b1, b1d),
        b3: (r2 * p_b2, b3d),
    };

    // interior rulings by twofold reflection, section points via the planes
    let mut rulings = vec![Vec3::ZERO; n + 1];
    rulings[1] = r1;
    rulings[2] = r2;
    for j in 3..n {
        rulings[j] = mirror.apply(rulings[j - 2]);
    }
    let mut alpha_points = Vec::with_capacity(n - 1);
    let mut beta_points = Vec::with_capacity(n - 1);
    for (j, &r) in rulings.iter().enumerate().take(n).skip(1) {
        let la = alpha
            .ray_from_origin_param(r)
            .ok_or(BricardError::RulingParallel(j))?;
        let lb = beta
            .ray_from_origin_param(r)
            .ok_or(BricardError::RulingParallel(j))?;
        alpha_points.push(r * la);
        beta_points.push(r * lb);
    }

    // boundary rulings from the free end openings; the last face's plane
    // continues the fan: span(r₍ₙ₋₁₎, reflect(r₍ₙ₋₂₎))
    let face1_normal = a1d.cross(r1).normalized();
    rulings[0] = end_ruling(r1, r2, face1_normal, ends.opening_first, ends.flip_first);
    let continuation = mirror.apply(rulings[n - 2]);
    let last_cross = rulings[n - 1].cross(continuation);
    if last_cross.norm() < 1e-12 {
        return Err(BricardError::DegenerateState(
            "fan continuation parallel to the last interior ruling".into(),
        ));
    }
    rulings[n] = end_ruling(
        rulings[n - 1],
        rulings[n - 2],
        last_cross.normalized(),
        ends.opening_last,
        ends.flip_last,
    );

    Ok(ConeStrip {
        config: *config,
        fold,
        ends,
        rulings,
        alpha,
        beta,
        omega,
        alpha_points,
        beta_points,
        germ_lines,
    })
}

fn end_ruling(anchor: Vec3, away_from: Vec3, face_normal: Vec3, opening: f64, flip: bool) -> Vec3 {
    let mut side = face_normal.cross(anchor).normalized();
    if side.dot(away_from) > 0.0 {
        side = -side;
    }
    if flip {
        side = -side;
    }
    anchor * opening.cos() + side * opening.sin()
}

/// The mirror plane through the apex orthogonal to the intersection line of
/// the two cutting planes, with the residuals of the mirror property.
pub fn mirror_plane_omega(strip: &ConeStrip) -> (Plane, MirrorReport) {
    let mirror = reflection_across(strip.omega.normal);
    let g = &strip.germ_lines;
    let a_residual = line_mirror_distance(&mirror, g.a1, g.a3)
        .max(line_mirror_distance(&mirror, g.a3, g.a1));
    let b_residual = line_mirror_distance(&mirror, g.b1, g.b3)
        .max(line_mirror_distance(&mirror, g.b3, g.b1));
    // reflection shifts the interior ruling chain by two
    let n = strip.face_count();
    let mut ruling_shift = 0.0f64;
    for j in 1..n.saturating_sub(2) {
        let img = mirror.apply(strip.rulings[j]);
        ruling_shift = ruling_shift.max((img - strip.rulings[j + 2]).norm());
    }
    (
        strip.omega,
        MirrorReport {
            a_line_residual: a_residual,
            b_line_residual: b_residual,
            ruling_shift_residual: ruling_shift,
        },
    )
}

#[derive(Clone, Copy, Debug)]
pub struct MirrorReport {
    /// Distance between the reflected first section line and the third
    /// (first cutting plane).
    pub a_line_residual: f64,
    pub b_line_residual: f64,
    /// max‖reflect(rⱼ) − rⱼ₊₂‖ over the interior chain.
    pub ruling_shift_residual: f64,
}

/// Closure and anti-parallelogram report for a strip.
#[derive(Clone, Debug)]
pub struct ClosureReport {
    /// max over j of ‖rⱼ − rⱼ₊₄‖.
    pub ruling_period4: f64,
    /// max over j of |Aⱼ − Aⱼ₊₄| and |Bⱼ − Bⱼ₊₄|, scaled by point norms.
    pub point_period4: f64,
    /// Germ mirror residual (the theorem's content; degrades for
    /// perturbed configurations).
    pub mirror_residual: f64,
    /// max distance of the iterated section points to their cutting plane,
    /// normalized by the section diameter.
    pub section_plane_residual: f64,
    /// | |P₁P₂| − |P₃P₄| | and | |P₂P₃| − |P₄P₁| | for both sections.
    pub side_pairing_defect: f64,
    /// Exactly one pair of opposite sides of the closing quadrilateral
    /// crosses.
    pub antiparallelogram_crossing: bool,
}

/// Verify the period-four closure and anti-parallelogram shape of the
/// section polygons.
pub fn verify_antiparallelogram(strip: &ConeStrip) -> ClosureReport {
    let n = strip.face_count();
    let mut ruling_period4 = 0.0f64;
    for j in 1..n.saturating_sub(4) {
        ruling_period4 =
            ruling_period4.max((strip.rulings[j] - strip.rulings[j + 4]).norm());
    }
    let mut point_period4 = 0.0f64;
    for pts in [&strip.alpha_points, &strip.beta_points] {
        for j in 0..pts.len().saturating_sub(4) {
            let scale = pts[j].norm().max(1.0);
            point_period4 = point_period4.max(pts[j].distance(pts[j + 4]) / scale);
        }
    }
    let (_, mirror) = mirror_plane_omega(strip);
    let mirror_residual = mirror.a_line_residual.max(mirror.b_line_residual);

    let mut section_plane_residual = 0.0f64;
    for (pts, plane) in [
        (&strip.alpha_points, &strip.alpha),
        (&strip.beta_points, &strip.beta),
    ] {
        let diam = polygon_diameter(pts);
        for p in pts.iter() {
            section_plane_residual =
                section_plane_residual.max(plane.signed_distance(*p).abs() / diam);
        }
    }

    let mut side_pairing_defect = 0.0f64;
    let mut crossing = true;
    for pts in [&strip.alpha_points, &strip.beta_points] {
        if pts.len() >= 4 {
            let quad = [pts[0], pts[1], pts[2], pts[3]];
            let d01 = quad[0].distance(quad[1]);
            let d12 = quad[1].distance(quad[2]);
            let d23 = quad[2].distance(quad[3]);
            let d30 = quad[3].distance(quad[0]);
            let scale = d01.max(d12).max(d23).max(d30).max(1e-300);
            side_pairing_defect =
                side_pairing_defect.max(((d01 - d23).abs()).max((d12 - d30).abs()) / scale);
            crossing &= crossed_quad(&quad);
        }
    }

    ClosureReport {
        ruling_period4,
        point_period4,
        mirror_residual,
        section_plane_residual,
        side_pairing_defect,
        antiparallelogram_crossing: crossing,
    }
}

fn polygon_diameter(pts: &[Vec3]) -> f64 {
    let mut d = 0.0f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max(a.distance(*b));
        }
    }
    d.max(1e-300)
}

/// Exactly one pair of opposite sides of the planar quadrilateral crosses.
fn crossed_quad(quad: &[Vec3; 4]) -> bool {
    let (plane, _) = fit_plane(quad);
    let u = orthonormal_in_plane(plane.normal);
    let v = plane.normal.cross(u);
    let to2d = |p: Vec3| {
        let d = p - plane.point;
        (d.dot(u), d.dot(v))
    };
    let q: Vec<(f64, f64)> = quad.iter().map(|&p| to2d(p)).collect();
    let cross01_23 = segments_intersect(q[0], q[1], q[2], q[3]);
    let cross12_30 = segments_intersect(q[1], q[2], q[3], q[0]);
    cross01_23 != cross12_30
}

fn orthonormal_in_plane(n: Vec3) -> Vec3 {
    let cand = if n.x.abs() < 0.9 { Vec3::EX } else { Vec3::EY };
    (cand - n * cand.dot(n)).normalized()
}

fn segments_intersect(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
        (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
    };
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    (o1 * o2 < 0.0) && (o3 * o4 < 0.0)
}

/// A planar polygon with its carrier plane and fit residual.
#[derive(Clone, Debug)]
pub struct SectionPolygon {
    pub points: Vec<Vec3>,
    pub plane: Plane,
    /// max point distance to the fitted plane over the polygon diameter.
    pub planarity_residual: f64,
}

impl SectionPolygon {
    pub fn from_points(points: Vec<Vec3>) -> Self {
        let (plane, planarity_residual) = fit_plane(&points);
        SectionPolygon {
            points,
            plane,
            planarity_residual,
        }
    }
}

/// Section polygon of the strip itself on one of its cutting planes.
pub fn section_polygon(strip: &ConeStrip, beta: bool) -> SectionPolygon {
    let pts = if beta {
        strip.beta_points.clone()
    } else {
        strip.alpha_points.clone()
    };
    SectionPolygon::from_points(pts)
}

/// Per-ruling point with a fixed cross-ratio against the two section points
/// and the apex: points of a third planar section in the plane pencil.
///
/// With both section points at parameters λ_a, λ_b along a ruling, the
/// cross-ratio-λ point sits at λ_a·λ_b·(λ−1)/(λ·λ_a − λ_b); λ = 0 gives the
/// first section, λ → ∞ the second.
pub fn pencil_section(strip: &ConeStrip, lambda: f64) -> Result<SectionPolygon, BricardError> {
    if (lambda - 1.0).abs() < 1e-12 {
        return Err(BricardError::PencilAtVertex);
    }
    let mut pts = Vec::with_capacity(strip.alpha_points.len());
    for (j, r) in strip
        .rulings
        .iter()
        .enumerate()
        .take(strip.face_count())
        .skip(1)
    {
        let la = strip.alpha_points[j - 1].dot(*r);
        let lb = strip.beta_points[j - 1].dot(*r);
        let denom = lambda * la - lb;
        if denom.abs() < 1e-12 * (la.abs() + lb.abs()) {
            return Err(BricardError::PencilAtInfinity(j));
        }
        let lc = la * lb * (lambda - 1.0) / denom;
        pts.push(*r * lc);
    }
    Ok(SectionPolygon::from_points(pts))
}

/// Intrinsic (fold-invariant) data of a strip: face opening angles, and the
/// section polyline's in-face segment lengths and corner angles.
#[derive(Clone, Debug)]
pub struct Development {
    pub openings: Vec<f64>,
    pub alpha_segment_lengths: Vec<f64>,
    pub beta_segment_lengths: Vec<f64>,
    pub alpha_corner_angles: Vec<f64>,
    pub beta_corner_angles: Vec<f64>,
}

pub fn development(strip: &ConeStrip) -> Development {
    let n = strip.face_count();
    let angle_between = |u: Vec3, v: Vec3| u.cross(v).norm().atan2(u.dot(v));
    let openings = (1..=n)
        .map(|j| angle_between(strip.rulings[j - 1], strip.rulings[j]))
        .collect();
    let seg = |pts: &[Vec3]| -> (Vec<f64>, Vec<f64>) {
        let mut lengths = Vec::new();
        let mut angles = Vec::new();
        for j in 0..pts.len().saturating_sub(1) {
            let d = pts[j + 1] - pts[j];
            lengths.push(d.norm());
            // corner angle of the section segment against the ruling it
            // starts on (interior ruling j+1)
            angles.push(angle_between(d, strip.rulings[j + 1]));
        }
        (lengths, angles)
    };
    let (al, aa) = seg(&strip.alpha_points);
    let (bl, ba) = seg(&strip.beta_points);
    Development {
        openings,
        alpha_segment_lengths: al,
        beta_segment_lengths: bl,
        alpha_corner_angles: aa,
        beta_corner_angles: ba,
    }
}

fn development_distance(a: &Development, b: &Development) -> f64 {
    let vec_dist = |x: &[f64], y: &[f64]| -> f64 {
        x.iter()
            .zip(y)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    };
    vec_dist(&a.openings, &b.openings)
        .max(vec_dist(&a.alpha_segment_lengths, &b.alpha_segment_lengths))
        .max(vec_dist(&a.beta_segment_lengths, &b.beta_segment_lengths))
        .max(vec_dist(&a.alpha_corner_angles, &b.alpha_corner_angles))
        .max(vec_dist(&a.beta_corner_angles, &b.beta_corner_angles))
}

/// Quad mesh of the strip between its two section polylines.
pub fn strip_mesh(strip: &ConeStrip) -> Mesh {
    let mut mesh = Mesh::new();
    let n = strip.face_count();
    // boundary rulings carry direct plane intersections
    let bound_pt = |plane: &Plane, r: Vec3| plane.ray_from_origin_param(r).map(|l| r * l);
    let mut a_pts: Vec<Option<Vec3>> = Vec::with_capacity(n + 1);
    let mut b_pts: Vec<Option<Vec3>> = Vec::with_capacity(n + 1);
    a_pts.push(bound_pt(&strip.alpha, strip.rulings[0]));
    b_pts.push(bound_pt(&strip.beta, strip.rulings[0]));
    for j in 1..n {
        a_pts.push(Some(strip.alpha_point(j)));
        b_pts.push(Some(strip.beta_point(j)));
    }
    a_pts.push(bound_pt(&strip.alpha, strip.rulings[n]));
    b_pts.push(bound_pt(&strip.beta, strip.rulings[n]));

    for j in 1..=n {
        if let (Some(a0), Some(a1), Some(b1), Some(b0)) =
            (a_pts[j - 1], a_pts[j], b_pts[j], b_pts[j - 1])
        {
            let i0 = mesh.push_vertex(a0);
            let i1 = mesh.push_vertex(a1);
            let i2 = mesh.push_vertex(b1);
            let i3 = mesh.push_vertex(b0);
            mesh.push_face(vec![i0, i1, i2, i3]);
        }
    }
    mesh
}

/// One sample of a flexion sweep.
#[derive(Clone, Debug)]
pub struct SweepSample {
    pub d1: f64,
    pub outcome: Result<SweepFrame, String>,
}

#[derive(Clone, Debug)]
pub struct SweepFrame {
    pub mesh: Mesh,
    /// max deviation of the development from the reference state.
    pub isometry_residual: f64,
    pub alpha_residual: f64,
    pub beta_residual: f64,
    /// (λ, planarity residual) for each requested pencil section.
    pub pencil_residuals: Vec<(f64, f64)>,
}

/// Rebuild the strip across fold samples and report isometry and planarity
/// residuals per sample. Samples at which the construction degenerates are
/// skipped with a note.
pub fn flex_sweep(
    strip: &ConeStrip,
    d1_samples: &[f64],
    pencil_lambdas: &[f64],
) -> Vec<SweepSample> {
    let reference = development(strip);
    d1_samples
        .iter()
        .map(|&d1| {
            let outcome = (|| -> Result<SweepFrame, String> {
                let frame = build_strip(&strip.config, strip.face_count(), d1, strip.ends)
                    .map_err(|e| e.to_string())?;
                let dev = development(&frame);
                let isometry_residual = development_distance(&reference, &dev);
                let alpha_residual = section_polygon(&frame, false).planarity_residual;
                let beta_residual = section_polygon(&frame, true).planarity_residual;
                let mut pencil_residuals = Vec::with_capacity(pencil_lambdas.len());
                for &lam in pencil_lambdas {
                    let res = pencil_section(&frame, lam)
                        .map_err(|e| e.to_string())?
                        .planarity_residual;
                    pencil_residuals.push((lam, res));
                }
                Ok(SweepFrame {
                    mesh: strip_mesh(&frame),
                    isometry_residual,
                    alpha_residual,
                    beta_residual,
                    pencil_residuals,
                })
            })();
            SweepSample { d1, outcome }
        })
        .collect()
}

/// Change the free end-face openings (optionally flipping them to the other
/// side) and rebuild; everything interior is untouched.
pub fn extend_end_faces(
    strip: &ConeStrip,
    opening_first: f64,
    opening_last: f64,
    flip_first: bool,
    flip_last: bool,
) -> Result<ConeStrip, BricardError> {
    let ends = EndFaces {
        opening_first,
        opening_last,
        flip_first,
        flip_last,
    };
    build_strip_at(&strip.config, strip.face_count(), strip.fold, ends)
}
