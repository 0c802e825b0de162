//! Vectors, rotation matrices and half-angle tangent conversions shared by
//! the discrete modules.

use std::ops::{Add, Mul, Neg, Sub};

/// Tolerance for algebraic identities that hold exactly up to rounding.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const EX: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const EY: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const EZ: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Unit vector in the xy-plane at `angle` from the x-axis.
    pub fn planar_dir(angle: f64) -> Self {
        Vec3::new(angle.cos(), angle.sin(), 0.0)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self * (1.0 / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self * -1.0
    }
}

/// Row-major 3x3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3 {
    pub rows: [[f64; 3]; 3],
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3 {
        rows: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub fn from_rows(r0: [f64; 3], r1: [f64; 3], r2: [f64; 3]) -> Self {
        Mat3 { rows: [r0, r1, r2] }
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let r = &self.rows;
        Vec3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    pub fn mul_mat(&self, o: &Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.rows[i][k] * o.rows[k][j]).sum();
            }
        }
        Mat3 { rows: out }
    }

    pub fn transpose(&self) -> Mat3 {
        let r = &self.rows;
        Mat3::from_rows(
            [r[0][0], r[1][0], r[2][0]],
            [r[0][1], r[1][1], r[2][1]],
            [r[0][2], r[1][2], r[2][2]],
        )
    }

    pub fn det(&self) -> f64 {
        let r = &self.rows;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    /// Max entry-wise deviation of `MᵀM` from the identity plus `|det − 1|`.
    pub fn rotation_defect(&self) -> f64 {
        let g = self.transpose().mul_mat(self);
        let mut d = (self.det() - 1.0).abs();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                d = d.max((g.rows[i][j] - want).abs());
            }
        }
        d
    }
}

/// Rotation about the x-axis by `delta` (the fold about the first ruling).
pub fn rotation_about_x(delta: f64) -> Mat3 {
    let (s, c) = delta.sin_cos();
    Mat3::from_rows([1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c])
}

/// Rotation by `delta` about the in-plane axis at angle `mu` from the x-axis
/// (the fold about the second ruling).
pub fn rotation_about_xy_axis(mu: f64, delta: f64) -> Mat3 {
    rodrigues(Vec3::planar_dir(mu), delta)
}

/// Rotation about an arbitrary unit axis.
pub fn rodrigues(axis: Vec3, angle: f64) -> Mat3 {
    debug_assert!((axis.norm() - 1.0).abs() < 1e-9);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let (x, y, z) = (axis.x, axis.y, axis.z);
    Mat3::from_rows(
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    )
}

/// Reflection across the plane through the origin with unit normal `n`.
pub fn reflection_across(n: Vec3) -> Mat3 {
    debug_assert!((n.norm() - 1.0).abs() < 1e-9);
    let mut rows = [[0.0; 3]; 3];
    let nv = [n.x, n.y, n.z];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let id = if i == j { 1.0 } else { 0.0 };
            *cell = id - 2.0 * nv[i] * nv[j];
        }
    }
    Mat3 { rows }
}

/// Scalar triple product det(u, v, w) of three column vectors.
pub fn det3(u: Vec3, v: Vec3, w: Vec3) -> f64 {
    u.dot(v.cross(w))
}

/// Half-angle tangent t = tan(θ/2) for θ ∈ (−π, π).
pub fn half_tan(angle: f64) -> f64 {
    (angle / 2.0).tan()
}

/// Angle in (−π, π) recovered from its half-angle tangent.
pub fn angle_from_half_tan(t: f64) -> f64 {
    2.0 * t.atan()
}

/// sin θ = 2t/(1+t²) for t = tan(θ/2).
pub fn sin_from_half_tan(t: f64) -> f64 {
    2.0 * t / (1.0 + t * t)
}

/// cos θ = (1−t²)/(1+t²) for t = tan(θ/2).
pub fn cos_from_half_tan(t: f64) -> f64 {
    (1.0 - t * t) / (1.0 + t * t)
}

/// Plane given by a point on it and a unit normal.
#[derive(Clone, Copy, Debug)]
pub struct Plane {
    pub point: Vec3,
    pub normal: Vec3,
}

impl Plane {
    pub fn new(point: Vec3, normal: Vec3) -> Self {
        Plane {
            point,
            normal: normal.normalized(),
        }
    }

    pub fn signed_distance(&self, p: Vec3) -> f64 {
        (p - self.point).dot(self.normal)
    }

    /// Intersection parameter λ with the ray λ·dir from the origin.
    /// Returns None when the ray is parallel to the plane.
    pub fn ray_from_origin_param(&self, dir: Vec3) -> Option<f64> {
        let denom = dir.dot(self.normal);
        if denom.abs() < 1e-14 {
            return None;
        }
        Some(self.point.dot(self.normal) / denom)
    }
}

/// Least-squares plane through a point cloud. Returns the plane and the
/// maximum point distance to it, normalized by the cloud diameter.
pub fn fit_plane(points: &[Vec3]) -> (Plane, f64) {
    assert!(points.len() >= 3, "plane fit needs at least 3 points");
    let n = points.len() as f64;
    let centroid = points.iter().fold(Vec3::ZERO, |a, &p| a + p) * (1.0 / n);
    let mut cov = [[0.0f64; 3]; 3];
    for p in points {
        let d = *p - centroid;
        let dv = [d.x, d.y, d.z];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += dv[i] * dv[j];
            }
        }
    }
    let normal = smallest_eigenvector(cov);
    let plane = Plane::new(centroid, normal);
    let mut diameter: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            diameter = diameter.max(a.distance(*b));
        }
    }
    let max_dist = points
        .iter()
        .map(|&p| plane.signed_distance(p).abs())
        .fold(0.0, f64::max);
    let scale = if diameter > 0.0 { diameter } else { 1.0 };
    (plane, max_dist / scale)
}

/// Eigenvector of the smallest eigenvalue of a symmetric 3x3 matrix,
/// via cyclic Jacobi rotations.
fn smallest_eigenvector(m: [[f64; 3]; 3]) -> Vec3 {
    let mut a = m;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..50 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off < 1e-300 {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
                let vkp = v[k][p];
                let vkq = v[k][q];
                v[k][p] = c * vkp - s * vkq;
                v[k][q] = s * vkp + c * vkq;
            }
        }
    }
    let mut idx = 0;
    for i in 1..3 {
        if a[i][i] < a[idx][idx] {
            idx = i;
        }
    }
    Vec3::new(v[0][idx], v[1][idx], v[2][idx]).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_x_matches_closed_form() {
        assert_eq!(rotation_about_x(0.0), Mat3::IDENTITY);
        let r = rotation_about_x(std::f64::consts::FRAC_PI_2);
        let img = r.apply(Vec3::EY);
        assert!(img.distance(Vec3::EZ) < IDENTITY_TOL);
        // entries at delta = π/3: cos = 1/2, sin = √3/2
        let r = rotation_about_x(std::f64::consts::FRAC_PI_3);
        assert!((r.rows[1][1] - 0.5).abs() < IDENTITY_TOL);
        assert!((r.rows[2][1] - 0.75f64.sqrt()).abs() < IDENTITY_TOL);
        assert!((r.rows[1][2] + 0.75f64.sqrt()).abs() < IDENTITY_TOL);
    }

    #[test]
    fn rotation_xy_axis_special_cases() {
        let r = rotation_about_xy_axis(0.0, 0.7);
        let rx = rotation_about_x(0.7);
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.rows[i][j] - rx.rows[i][j]).abs() < IDENTITY_TOL);
            }
        }
        assert!(rotation_about_xy_axis(0.9, 0.0).rotation_defect() < IDENTITY_TOL);
        // axis invariance
        let mu = 1.1;
        let axis = Vec3::planar_dir(mu);
        let img = rotation_about_xy_axis(mu, 0.8).apply(axis);
        assert!(img.distance(axis) < IDENTITY_TOL);
    }

    #[test]
    fn rotation_xy_axis_is_conjugated_x_rotation() {
        // independent construction: R₂(μ, δ) = Rz(μ) R₁(δ) Rz(−μ)
        let mu = 0.83f64;
        let delta = -1.21;
        let (s, c) = mu.sin_cos();
        let rz = Mat3::from_rows([c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]);
        let rz_inv = rz.transpose();
        let want = rz.mul_mat(&rotation_about_x(delta)).mul_mat(&rz_inv);
        let got = rotation_about_xy_axis(mu, delta);
        for i in 0..3 {
            for j in 0..3 {
                assert!((want.rows[i][j] - got.rows[i][j]).abs() < IDENTITY_TOL);
            }
        }
    }

    #[test]
    fn rotations_invert_and_stay_orthonormal() {
        let mut rng = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0
        };
        for _ in 0..100 {
            let d = next();
            let prod = rotation_about_x(d).mul_mat(&rotation_about_x(-d));
            assert!(prod.rotation_defect() < IDENTITY_TOL);
            let mu = next();
            assert!(rotation_about_xy_axis(mu, d).rotation_defect() < IDENTITY_TOL);
        }
    }

    #[test]
    fn det3_examples() {
        assert_eq!(det3(Vec3::EX, Vec3::EY, Vec3::EZ), 1.0);
        let u = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(det3(u, u, Vec3::EZ), 0.0);
        // cofactor expansion by hand gives −3
        let d = det3(
            Vec3::new(1.0, 4.0, 7.0),
            Vec3::new(2.0, 5.0, 8.0),
            Vec3::new(3.0, 6.0, 10.0),
        );
        assert!((d + 3.0).abs() < IDENTITY_TOL);
    }

    #[test]
    fn det3_is_multilinear() {
        let mut state = 1u64;
        let mut next = || {
            state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..50 {
            let u = Vec3::new(next(), next(), next());
            let u2 = Vec3::new(next(), next(), next());
            let v = Vec3::new(next(), next(), next());
            let w = Vec3::new(next(), next(), next());
            let lam = next();
            let lhs = det3(u + u2 * lam, v, w);
            let rhs = det3(u, v, w) + lam * det3(u2, v, w);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
        }
    }

    #[test]
    fn half_angle_round_trip() {
        for k in 0..100 {
            let theta = -3.1 + 6.2 * (k as f64) / 99.0;
            let t = half_tan(theta);
            assert!((angle_from_half_tan(t) - theta).abs() < IDENTITY_TOL);
            assert!((sin_from_half_tan(t) - theta.sin()).abs() < IDENTITY_TOL);
            assert!((cos_from_half_tan(t) - theta.cos()).abs() < IDENTITY_TOL);
        }
    }

    #[test]
    fn reflection_is_involutive() {
        let n = Vec3::new(0.3, -0.5, 0.8).normalized();
        let r = reflection_across(n);
        let twice = r.mul_mat(&r);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((twice.rows[i][j] - want).abs() < 1e-14);
            }
        }
        assert!((r.det() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn plane_fit_recovers_exact_plane() {
        let normal = Vec3::new(1.0, 2.0, -1.0).normalized();
        let origin = Vec3::new(0.5, -0.3, 1.2);
        let u = normal.cross(Vec3::EX).normalized();
        let v = normal.cross(u);
        let pts: Vec<Vec3> = (0..12)
            .map(|k| {
                let a = k as f64 * 0.7;
                origin + u * a.cos() + v * (1.3 * a.sin())
            })
            .collect();
        let (plane, residual) = fit_plane(&pts);
        assert!(residual < 1e-12);
        assert!(plane.normal.cross(normal).norm() < 1e-9);
    }
}
