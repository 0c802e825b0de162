//! The first elimination step: cleared coplanarity determinants as bivariate
//! polynomials in the two dihedral tangents, their resultant, and the
//! classification of the degenerate factors that the elimination splits off.

use crate::config::{ExactSectionConfig, SectionConfig};
use crate::exact::{QuadExt, Rational, RationalField};
use crate::poly::{sylvester_resultant, F64Ring, PolyRing, Ring, UniPoly};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ElimError {
    #[error("non-finite configuration entry")]
    NonFinite,
    #[error("resultant structure violated ({0}); this indicates an implementation bug")]
    StructureViolation(String),
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}

/// Coefficients of the cleared coplanarity determinant. After the half-angle
/// substitution and clearing the positive denominators
/// (1+d₁²)(1+d₂²)(1+m²)(1+w₁²)(1+w₂²)(1+w₃²), only four monomials survive:
///
///   D = a·d₁ + b·d₂ + c·d₁²d₂ + e·d₁d₂²
#[derive(Clone, Debug)]
pub struct DetCoeffs<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub e: T,
}

/// Build the cleared determinant coefficients for one side from the ruling
/// tangent `m` and the side's three edge tangents.
pub fn det_coeffs_in<R: Ring>(
    ring: &R,
    m: &R::El,
    w1: &R::El,
    w2: &R::El,
    w3: &R::El,
) -> DetCoeffs<R::El> {
    let one = ring.one();
    let two = ring.add(&one, &one);
    let ns = |x: &R::El| ring.mul(&two, x); // numerator of sin θ
    let nc = |x: &R::El| ring.sub(&one, &ring.mul(x, x)); // numerator of cos θ
    let dm = ring.add(&one, &ring.mul(m, m)); // 1 + m²

    let (ns1, nc1) = (ns(w1), nc(w1));
    let (ns2, nc2) = (ns(w2), nc(w2));
    let (ns3, nc3) = (ns(w3), nc(w3));
    let (nsm, ncm) = (ns(m), nc(m));

    let cc = ring.mul(&nc2, &nc3);
    let ss = ring.mul(&ns2, &ns3);
    let sc = ring.mul(&ns2, &nc3);
    let cs = ring.mul(&nc2, &ns3);

    // a: 2·sin w₁ · sin(μ − θ₂ + θ₃), cleared
    let a = ring.mul(
        &two,
        &ring.mul(
            &ns1,
            &ring.sub(
                &ring.mul(&nsm, &ring.add(&cc, &ss)),
                &ring.mul(&ncm, &ring.sub(&sc, &cs)),
            ),
        ),
    );
    // e: 2·sin w₁ · sin(μ − θ₂ − θ₃), cleared
    let e = ring.mul(
        &two,
        &ring.mul(
            &ns1,
            &ring.sub(
                &ring.mul(&nsm, &ring.sub(&cc, &ss)),
                &ring.mul(&ncm, &ring.add(&sc, &cs)),
            ),
        ),
    );
    let sc21 = ring.mul(&ns2, &nc1);
    let cs21 = ring.mul(&nc2, &ns1);
    // b: 2·sin w₃ · sin(θ₂ − θ₁) · (1+m²)
    let b = ring.mul(
        &two,
        &ring.mul(&ns3, &ring.mul(&ring.sub(&sc21, &cs21), &dm)),
    );
    // c: 2·sin w₃ · sin(θ₂ + θ₁) · (1+m²)
    let c = ring.mul(
        &two,
        &ring.mul(&ns3, &ring.mul(&ring.add(&sc21, &cs21), &dm)),
    );
    DetCoeffs { a, b, c, e }
}

impl<T: Clone + PartialEq + std::fmt::Debug> DetCoeffs<T> {
    /// Value of the cleared determinant at a fold state.
    pub fn eval<R: Ring<El = T>>(&self, ring: &R, d1: &T, d2: &T) -> T {
        let d1d2 = ring.mul(d1, d2);
        let mut acc = ring.mul(&self.a, d1);
        acc = ring.add(&acc, &ring.mul(&self.b, d2));
        acc = ring.add(&acc, &ring.mul(&self.c, &ring.mul(d1, &d1d2)));
        acc = ring.add(&acc, &ring.mul(&self.e, &ring.mul(&d1d2, d2)));
        acc
    }

    /// The determinant as a quadratic in d₁ whose coefficients are
    /// polynomials in d₂: [b·d₂, a + e·d₂², c·d₂].
    pub fn as_poly_in_d1<R: Ring<El = T>>(&self, ring: &R) -> UniPoly<UniPoly<T>> {
        let base = ring;
        let p0 = UniPoly::new(base, vec![base.zero(), self.b.clone()]);
        let p1 = UniPoly::new(base, vec![self.a.clone(), base.zero(), self.e.clone()]);
        let p2 = UniPoly::new(base, vec![base.zero(), self.c.clone()]);
        UniPoly::new(&PolyRing::new(base.clone()), vec![p0, p1, p2])
    }
}

/// Clearing factor that relates the determinant built from unit directions
/// to the polynomial form: (1+d₁²)(1+d₂²)(1+m²)·Π(1+wⱼ²).
pub fn clearing_factor(m: f64, w: [f64; 3], d1: f64, d2: f64) -> f64 {
    (1.0 + d1 * d1)
        * (1.0 + d2 * d2)
        * (1.0 + m * m)
        * (1.0 + w[0] * w[0])
        * (1.0 + w[1] * w[1])
        * (1.0 + w[2] * w[2])
}

/// Cleared determinant coefficients of the first cutting plane (float).
pub fn alpha_det_coeffs(config: &SectionConfig) -> DetCoeffs<f64> {
    det_coeffs_in(&F64Ring, &config.m, &config.s1, &config.s2, &config.s3)
}

/// Cleared determinant coefficients of the second cutting plane (float).
pub fn beta_det_coeffs(config: &SectionConfig) -> DetCoeffs<f64> {
    det_coeffs_in(&F64Ring, &config.m, &config.t1, &config.t2, &config.t3)
}

/// Outcome of eliminating d₁ between the two cleared determinants. The raw
/// resultant always carries the trivial factor d₂² from the unfolded state;
/// what remains is even of degree four:
///
///   Res = d₂² · (E₄·d₂⁴ + E₂·d₂² + E₀)
pub struct Eliminated<T> {
    pub e4: T,
    pub e2: T,
    pub e0: T,
}

/// Generic elimination; `structure_tol` bounds the allowed relative size of
/// the coefficients that must vanish identically (0 for exact rings).
fn eliminate_in<R: Ring>(
    ring: &R,
    alpha: &DetCoeffs<R::El>,
    beta: &DetCoeffs<R::El>,
    magnitude: Option<&dyn Fn(&R::El) -> f64>,
) -> Result<Eliminated<R::El>, ElimError> {
    if ring.is_zero(&alpha.c) || ring.is_zero(&beta.c) {
        return Err(ElimError::StructureViolation(
            "leading determinant coefficient vanishes (flat-fold coincidence)".into(),
        ));
    }
    let pring = PolyRing::new(ring.clone());
    let p = alpha.as_poly_in_d1(ring);
    let q = beta.as_poly_in_d1(ring);
    let res = sylvester_resultant(&pring, &p, &q)?;
    // degree ≤ 6 in d₂; odd coefficients and the two lowest must vanish
    if res.degree().unwrap_or(0) > 6 {
        return Err(ElimError::StructureViolation("degree exceeds six".into()));
    }
    let coeff = |k: usize| res.coeff(ring, k);
    match magnitude {
        None => {
            for k in [0usize, 1, 3, 5] {
                if !ring.is_zero(&coeff(k)) {
                    return Err(ElimError::StructureViolation(format!(
                        "coefficient of d₂^{k} is nonzero"
                    )));
                }
            }
        }
        Some(mag) => {
            let scale = (0..=6).map(|k| mag(&coeff(k))).fold(0.0f64, f64::max);
            if scale > 0.0 {
                for k in [0usize, 1, 3, 5] {
                    if mag(&coeff(k)) > 1e-9 * scale {
                        return Err(ElimError::StructureViolation(format!(
                            "coefficient of d₂^{k} is {} at scale {}",
                            mag(&coeff(k)),
                            scale
                        )));
                    }
                }
            }
        }
    }
    Ok(Eliminated {
        e4: coeff(6),
        e2: coeff(4),
        e0: coeff(2),
    })
}

/// Exact elimination over any exact ring (structure checks are exact too).
pub fn eliminate_in_exact<R: Ring>(
    ring: &R,
    alpha: &DetCoeffs<R::El>,
    beta: &DetCoeffs<R::El>,
) -> Result<Eliminated<R::El>, ElimError> {
    eliminate_in(ring, alpha, beta, None)
}

/// Float elimination of a configuration.
pub fn eval_e(config: &SectionConfig) -> Result<Eliminated<f64>, ElimError> {
    if !config.entries().iter().all(|x| x.is_finite()) {
        return Err(ElimError::NonFinite);
    }
    let alpha = alpha_det_coeffs(config);
    let beta = beta_det_coeffs(config);
    eliminate_in(&F64Ring, &alpha, &beta, Some(&|x: &f64| x.abs()))
}

/// Exact elimination of a fully rational configuration.
pub fn eval_e_rational(entries: &[Rational; 7]) -> Result<Eliminated<Rational>, ElimError> {
    let rf = RationalField;
    let [m, s1, s2, s3, t1, t2, t3] = entries;
    let alpha = det_coeffs_in(&rf, m, s1, s2, s3);
    let beta = det_coeffs_in(&rf, m, t1, t2, t3);
    eliminate_in(&rf, &alpha, &beta, None)
}

/// Exact elimination of a synthesized configuration, carried out in the
/// quotient algebra of its two branch quadratics. A vanishing result proves
/// the identity for every root combination at once.
pub fn eval_e_exact(cfg: &ExactSectionConfig) -> Result<Eliminated<QuadExt>, ElimError> {
    let ring = &cfg.ring;
    let lift = |r: &Rational| QuadExt::from_rational(r.clone());
    let alpha = det_coeffs_in(
        ring,
        &lift(&cfg.m),
        &lift(&cfg.s1),
        &ring.generator_first(),
        &lift(&cfg.s3),
    );
    let beta = det_coeffs_in(
        ring,
        &lift(&cfg.m),
        &lift(&cfg.t1),
        &ring.generator_second(),
        &lift(&cfg.t3),
    );
    eliminate_in(ring, &alpha, &beta, None)
}

/// True when the exact elimination of a synthesized configuration vanishes
/// identically, i.e. every fold angle admits a coupled partner.
pub fn is_exact_solution(cfg: &ExactSectionConfig) -> Result<bool, ElimError> {
    let e = eval_e_exact(cfg)?;
    let ring = &cfg.ring;
    Ok(ring.is_zero(&e.e4) && ring.is_zero(&e.e2) && ring.is_zero(&e.e0))
}

/// A flat-fold degeneracy detected among the split-off factors of the
/// elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialFactor {
    /// "a" for the first cutting plane's side, "b" for the second's.
    pub side: char,
    pub label: String,
}

/// Report which of the split-off degenerate factors vanish: the flat-fold
/// coincidences of each side's first two edges.
pub fn classify_special_factor(config: &SectionConfig) -> Vec<SpecialFactor> {
    classify_special_factor_with_tol(config, 1e-12)
}

pub fn classify_special_factor_with_tol(config: &SectionConfig, tol: f64) -> Vec<SpecialFactor> {
    let mut out = Vec::new();
    for (side, w1, w2) in [('a', config.s1, config.s2), ('b', config.t1, config.t2)] {
        let mut push = |label: &str| {
            out.push(SpecialFactor {
                side,
                label: format!("flat-fold {side}-side, {label}"),
            })
        };
        if (w1 - w2).abs() <= tol {
            push("δ₁=0 case, same orientation");
        }
        if (w1 * w2 + 1.0).abs() <= tol {
            push("δ₁=0 case, opposite orientation");
        }
        if (w1 + w2).abs() <= tol {
            push("δ₁=π case, same orientation");
        }
        if (w1 * w2 - 1.0).abs() <= tol {
            push("δ₁=π case, opposite orientation");
        }
    }
    out
}
