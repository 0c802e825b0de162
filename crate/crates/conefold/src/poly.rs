//! Dense univariate polynomials over a pluggable coefficient ring, with a
//! division-free Sylvester resultant. The same engine runs on f64 for
//! simulation and on exact scalars for identity verification.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("degenerate resultant: both inputs are constant")]
    DegenerateResultant,
}

/// Commutative ring interface, carried as a context value so that rings with
/// parameters (quotient algebras) fit the same engine.
pub trait Ring: Clone {
    type El: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
}

/// IEEE doubles as a ring; zero tests are exact.
#[derive(Clone, Copy, Debug, Default)]
pub struct F64Ring;

impl Ring for F64Ring {
    type El = f64;
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
}

/// Dense univariate polynomial: `coeffs[k]` is the coefficient of x^k.
/// The zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<T> {
    pub coeffs: Vec<T>,
}

impl<T: Clone + PartialEq + std::fmt::Debug> UniPoly<T> {
    pub fn new<R: Ring<El = T>>(ring: &R, mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map_or(false, |c| ring.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant<R: Ring<El = T>>(ring: &R, c: T) -> Self {
        UniPoly::new(ring, vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff<R: Ring<El = T>>(&self, ring: &R, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn add<R: Ring<El = T>>(&self, ring: &R, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n)
            .map(|k| ring.add(&self.coeff(ring, k), &o.coeff(ring, k)))
            .collect();
        UniPoly::new(ring, coeffs)
    }

    pub fn sub<R: Ring<El = T>>(&self, ring: &R, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n)
            .map(|k| ring.sub(&self.coeff(ring, k), &o.coeff(ring, k)))
            .collect();
        UniPoly::new(ring, coeffs)
    }

    pub fn mul<R: Ring<El = T>>(&self, ring: &R, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![ring.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if ring.is_zero(b) {
                    continue;
                }
                coeffs[i + j] = ring.add(&coeffs[i + j], &ring.mul(a, b));
            }
        }
        UniPoly::new(ring, coeffs)
    }

    pub fn neg<R: Ring<El = T>>(&self, ring: &R) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| ring.neg(c)).collect(),
        }
    }

    pub fn eval<R: Ring<El = T>>(&self, ring: &R, x: &T) -> T {
        let mut acc = ring.zero();
        for c in self.coeffs.iter().rev() {
            acc = ring.add(&ring.mul(&acc, x), c);
        }
        acc
    }
}

/// Polynomials over a base ring, themselves forming a ring. Used to take
/// resultants of bivariate polynomials one variable at a time.
#[derive(Clone, Debug)]
pub struct PolyRing<R: Ring> {
    pub base: R,
}

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R) -> Self {
        PolyRing { base }
    }
}

impl<R: Ring> Ring for PolyRing<R> {
    type El = UniPoly<R::El>;
    fn zero(&self) -> Self::El {
        UniPoly::zero()
    }
    fn one(&self) -> Self::El {
        UniPoly::constant(&self.base, self.base.one())
    }
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El {
        a.add(&self.base, b)
    }
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El {
        a.sub(&self.base, b)
    }
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El {
        a.mul(&self.base, b)
    }
    fn neg(&self, a: &Self::El) -> Self::El {
        a.neg(&self.base)
    }
    fn is_zero(&self, a: &Self::El) -> bool {
        a.is_zero()
    }
}

/// Determinant by cofactor expansion along the first row. Division-free, so
/// it works over any commutative ring; fine for the small Sylvester sizes
/// that occur here.
pub fn determinant<R: Ring>(ring: &R, m: &[Vec<R::El>]) -> R::El {
    let n = m.len();
    debug_assert!(m.iter().all(|row| row.len() == n));
    if n == 0 {
        return ring.one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    if n == 4 {
        return det4_by_complementary_minors(ring, m);
    }
    let mut acc = ring.zero();
    for (j, entry) in m[0].iter().enumerate() {
        if ring.is_zero(entry) {
            continue;
        }
        let minor: Vec<Vec<R::El>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = ring.mul(entry, &determinant(ring, &minor));
        acc = if j % 2 == 0 {
            ring.add(&acc, &term)
        } else {
            ring.sub(&acc, &term)
        };
    }
    acc
}

/// Laplace expansion along the first two rows: pair each 2×2 minor of the
/// top rows with its complementary minor of the bottom rows.
fn det4_by_complementary_minors<R: Ring>(ring: &R, m: &[Vec<R::El>]) -> R::El {
    let minor = |r0: &[R::El], r1: &[R::El], i: usize, j: usize| -> R::El {
        ring.sub(&ring.mul(&r0[i], &r1[j]), &ring.mul(&r0[j], &r1[i]))
    };
    let pairs = [(0usize, 1usize), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut acc = ring.zero();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let top = minor(&m[0], &m[1], i, j);
        if ring.is_zero(&top) {
            continue;
        }
        let (ci, cj) = complementary_pair(i, j);
        let bottom = minor(&m[2], &m[3], ci, cj);
        let term = ring.mul(&top, &bottom);
        // sign (−1)^{i+j+1} with the pair ordering above: +,−,+,+,−,+
        let positive = matches!(k, 0 | 2 | 3 | 5);
        acc = if positive {
            ring.add(&acc, &term)
        } else {
            ring.sub(&acc, &term)
        };
    }
    acc
}

fn complementary_pair(i: usize, j: usize) -> (usize, usize) {
    let mut rest = [0usize; 2];
    let mut k = 0;
    for c in 0..4 {
        if c != i && c != j {
            rest[k] = c;
            k += 1;
        }
    }
    (rest[0], rest[1])
}

/// Resultant of p and q via the Sylvester determinant, with the convention
/// Res(x−a, x−b) = b−a. Zero iff p and q share a root over the closure.
pub fn sylvester_resultant<R: Ring>(
    ring: &R,
    p: &UniPoly<R::El>,
    q: &UniPoly<R::El>,
) -> Result<R::El, PolyError> {
    let dp = p.degree().unwrap_or(0);
    let dq = q.degree().unwrap_or(0);
    if dp == 0 && dq == 0 {
        return Err(PolyError::DegenerateResultant);
    }
    let n = dp + dq;
    let mut rows: Vec<Vec<R::El>> = Vec::with_capacity(n);
    // dp rows of q's coefficients, then dq rows of p's, each shifted right;
    // coefficients laid out from highest to lowest degree.
    for shift in 0..dp {
        let mut row = vec![ring.zero(); n];
        for k in 0..=dq {
            row[shift + k] = q.coeff(ring, dq - k);
        }
        rows.push(row);
    }
    for shift in 0..dq {
        let mut row = vec![ring.zero(); n];
        for k in 0..=dp {
            row[shift + k] = p.coeff(ring, dp - k);
        }
        rows.push(row);
    }
    Ok(determinant(ring, &rows))
}
