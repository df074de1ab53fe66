//! Laurent polynomials, graded Euler characteristics and torsion.
//!
//! Euler characteristics are taken with the sign `(−1)^{z2}`, which for an
//! orbit set is its Lefschetz sign.  The torsion of a torus-knot complement
//! is computed by Fox calculus from the presentation `⟨a, b | a^p b^{−q}⟩`
//! and expanded as a power series; both sides of every comparison are first
//! brought to the normal form "lowest degree 0, lowest coefficient +1",
//! which removes the `±t^k` ambiguity.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{PrimInt, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chaincx::{ChainComplex, Grading};
use crate::orbits::{Orbit, OrbitKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EulerError {
    #[error("degree {degree} is above the cutoff {cutoff}")]
    AboveCutoff { degree: i64, cutoff: i64 },
    #[error("power series need nonnegative degrees (got {0})")]
    NegativeDegree(i64),
    #[error("the divisor must have constant term ±1")]
    NotInvertible,
    #[error("p = {p} and q = {q} are not coprime")]
    NotCoprime { p: i64, q: i64 },
    #[error("torus knot parameters must be at least 2 (got p = {p}, q = {q})")]
    BadTorusParameters { p: i64, q: i64 },
    #[error("elliptic orbit {0} has nonpositive weight; its zeta factor is not a power series")]
    ZeroWeight(String),
    #[error("cutoff {cutoff} is below the top grading {top}")]
    CutoffTooSmall { cutoff: i64, top: i64 },
    #[error("grading {0} is missing from a generator")]
    UnknownGrading(String),
}

/// A finitely supported Laurent polynomial with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Deserialize<'de> + PrimInt + Signed"
))]
pub struct LaurentPolynomial<T: PrimInt + Signed> {
    terms: BTreeMap<i64, T>,
}

/// Laurent polynomials over `i64`.
pub type Laurent = LaurentPolynomial<i64>;

impl<T: PrimInt + Signed> LaurentPolynomial<T> {
    pub fn zero() -> Self {
        LaurentPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(T::one(), 0)
    }

    pub fn monomial(coeff: T, degree: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(degree, coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, T)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (d, c) in terms {
            p.add_term(d, c);
        }
        p
    }

    /// Adds `coeff·t^degree`, dropping the term if it cancels.
    pub fn add_term(&mut self, degree: i64, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        let c = self.terms.get(&degree).copied().unwrap_or_else(T::zero) + coeff;
        if c.is_zero() {
            self.terms.remove(&degree);
        } else {
            self.terms.insert(degree, c);
        }
    }

    pub fn coeff(&self, degree: i64) -> T {
        self.terms.get(&degree).copied().unwrap_or_else(T::zero)
    }

    /// Nonzero terms in ascending degree.
    pub fn terms(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.terms.iter().map(|(&d, &c)| (d, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(&d, &c)| (d + k, c)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_terms(self.terms().map(|(d, c)| (d, c * s)))
    }

    /// Substitutes `t ↦ t^k`.
    pub fn substitute_power(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(d, c)| (d * k, c)))
    }

    /// The representative of `±t^k · self` with lowest degree 0 and lowest
    /// coefficient positive.
    pub fn normalize(&self) -> Self {
        match self.terms.iter().next() {
            None => Self::zero(),
            Some((&d, &c)) => {
                let sign = if c.is_negative() { -T::one() } else { T::one() };
                self.shift(-d).scale(sign)
            }
        }
    }

    /// Coefficients replaced by their absolute values.
    pub fn abs(&self) -> Self {
        Self::from_terms(self.terms().map(|(d, c)| (d, c.abs())))
    }

    /// Terms of degree at most `cutoff`.
    pub fn truncate(&self, cutoff: i64) -> Self {
        Self::from_terms(self.terms().filter(|&(d, _)| d <= cutoff))
    }
}

impl<T: PrimInt + Signed> Default for LaurentPolynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: PrimInt + Signed> Add for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn add(self, rhs: Self) -> Self::Output {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, c);
        }
        out
    }
}

impl<T: PrimInt + Signed> Neg for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn neg(self) -> Self::Output {
        self.scale(-T::one())
    }
}

impl<T: PrimInt + Signed> Sub for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn sub(self, rhs: Self) -> Self::Output {
        self + &(-rhs)
    }
}

impl<T: PrimInt + Signed> Mul for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn mul(self, rhs: Self) -> Self::Output {
        let mut out = LaurentPolynomial::zero();
        for (d1, c1) in self.terms() {
            for (d2, c2) in rhs.terms() {
                out.add_term(d1 + d2, c1 * c2);
            }
        }
        out
    }
}

impl<T: PrimInt + Signed + fmt::Display> fmt::Display for LaurentPolynomial<T> {
    /// Terms in ascending degree as `coeff*t^deg`, e.g. `1*t^0 - 1*t^1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms().enumerate() {
            match (i, c.is_negative()) {
                (0, _) => write!(f, "{c}*t^{d}")?,
                (_, true) => write!(f, " - {}*t^{d}", c.abs())?,
                (_, false) => write!(f, " + {c}*t^{d}")?,
            }
        }
        Ok(())
    }
}

/// A power series known through degree `cutoff`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    cutoff: i64,
    coeffs: Vec<i64>,
}

impl TruncatedSeries {
    pub fn zero(cutoff: i64) -> Self {
        let len = usize::try_from(cutoff + 1).expect("cutoff must be nonnegative");
        TruncatedSeries {
            cutoff,
            coeffs: vec![0; len],
        }
    }

    pub fn one(cutoff: i64) -> Self {
        let mut s = Self::zero(cutoff);
        s.coeffs[0] = 1;
        s
    }

    /// Truncates a polynomial in nonnegative degrees.
    pub fn from_polynomial(p: &Laurent, cutoff: i64) -> Result<Self, EulerError> {
        if let Some(d) = p.min_degree().filter(|&d| d < 0) {
            return Err(EulerError::NegativeDegree(d));
        }
        let mut s = Self::zero(cutoff);
        for (d, c) in p.terms().filter(|&(d, _)| d <= cutoff) {
            s.coeffs[d as usize] = c;
        }
        Ok(s)
    }

    /// `1 + t^a + t^{2a} + …`.
    pub fn geometric(a: i64, cutoff: i64) -> Self {
        assert!(a > 0, "geometric series needs a positive step");
        let mut s = Self::zero(cutoff);
        let mut d = 0;
        while d <= cutoff {
            s.coeffs[d as usize] = 1;
            d += a;
        }
        s
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn coeff(&self, degree: i64) -> Result<i64, EulerError> {
        if degree > self.cutoff {
            return Err(EulerError::AboveCutoff {
                degree,
                cutoff: self.cutoff,
            });
        }
        if degree < 0 {
            return Ok(0);
        }
        Ok(self.coeffs[degree as usize])
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    /// The known part as a polynomial.
    pub fn to_polynomial(&self) -> Laurent {
        Laurent::from_terms(self.coeffs.iter().enumerate().map(|(d, &c)| (d as i64, c)))
    }

    /// Product, known up to the smaller cutoff.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let cutoff = self.cutoff.min(other.cutoff);
        let mut out = Self::zero(cutoff);
        let n = out.coeffs.len();
        for (i, &a) in self.coeffs.iter().enumerate().take(n) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    /// Multiplies by a polynomial in nonnegative degrees.
    pub fn mul_polynomial(&self, p: &Laurent) -> Result<TruncatedSeries, EulerError> {
        Ok(self.mul(&TruncatedSeries::from_polynomial(p, self.cutoff)?))
    }

    /// Quotient by a series whose constant term is `±1`.
    pub fn div(&self, divisor: &TruncatedSeries) -> Result<TruncatedSeries, EulerError> {
        let c0 = divisor.coeffs[0];
        if c0 != 1 && c0 != -1 {
            return Err(EulerError::NotInvertible);
        }
        let cutoff = self.cutoff.min(divisor.cutoff);
        let mut out = Self::zero(cutoff);
        for k in 0..out.coeffs.len() {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= divisor.coeffs[j] * out.coeffs[k - j];
            }
            out.coeffs[k] = acc * c0;
        }
        Ok(out)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(t^{})", self.to_polynomial(), self.cutoff + 1)
    }
}

/// `Σ (−1)^{z2} t^{grading}` over the generators of `c`.
pub fn graded_chi(c: &ChainComplex, grading: &Grading) -> Result<Laurent, EulerError> {
    let mut chi = Laurent::zero();
    for g in c.generators() {
        let d = grading
            .value(g)
            .ok_or_else(|| EulerError::UnknownGrading(grading.to_string()))?;
        chi.add_term(d, if g.z2 == 0 { 1 } else { -1 });
    }
    Ok(chi)
}

/// The zeta factor of an orbit with Alexander weight `a`: `1 − t^a`
/// (positive hyperbolic), `1 + t^a` (negative hyperbolic) or
/// `(1 − t^a)^{-1}` (elliptic).
pub fn zeta_factor(o: &Orbit, cutoff: i64) -> Result<TruncatedSeries, EulerError> {
    let a = o.alexander_weight;
    match o.kind {
        OrbitKind::PositiveHyperbolic => {
            TruncatedSeries::from_polynomial(&Laurent::from_terms([(0, 1), (a, -1)]), cutoff)
        }
        OrbitKind::NegativeHyperbolic => {
            TruncatedSeries::from_polynomial(&Laurent::from_terms([(0, 1), (a, 1)]), cutoff)
        }
        OrbitKind::Elliptic => {
            if a <= 0 {
                return Err(EulerError::ZeroWeight(o.name.clone()));
            }
            Ok(TruncatedSeries::geometric(a, cutoff))
        }
    }
}

/// The product of the zeta factors of `orbits`.
pub fn orbit_product(orbits: &[Orbit], cutoff: i64) -> Result<TruncatedSeries, EulerError> {
    let mut acc = TruncatedSeries::one(cutoff);
    for o in orbits {
        acc = acc.mul(&zeta_factor(o, cutoff)?);
    }
    Ok(acc)
}

/// A word in a free group on generators `0, 1, …`: `(generator, exponent)`.
pub type Word = Vec<(usize, i64)>;

/// The Fox derivative `∂w/∂x_gen`, pushed into `ℤ[t^{±1}]` by sending
/// generator `i` to `t^{images[i]}`.
pub fn fox_derivative(word: &[(usize, i64)], gen: usize, images: &[i64]) -> Laurent {
    let mut out = Laurent::zero();
    let mut prefix = 0i64; // degree of the image of the prefix read so far
    for &(x, e) in word {
        let step = images[x];
        if x == gen {
            if e > 0 {
                for k in 0..e {
                    out.add_term(prefix + k * step, 1);
                }
            } else {
                for k in 1..=-e {
                    out.add_term(prefix - k * step, -1);
                }
            }
        }
        prefix += e * step;
    }
    out
}

/// Torsion of the complement of T(p,q) as a normalised power series known
/// through degree `cutoff`: the Fox derivative of `a^p b^{−q}` with respect
/// to `b` under `a ↦ t^q`, `b ↦ t^p`, divided by `1 − t^q`.
pub fn fox_torsion_torus(p: i64, q: i64, cutoff: i64) -> Result<TruncatedSeries, EulerError> {
    if p < 2 || q < 2 {
        return Err(EulerError::BadTorusParameters { p, q });
    }
    if p.gcd(&q) != 1 {
        return Err(EulerError::NotCoprime { p, q });
    }
    let relator: Word = vec![(0, p), (1, -q)];
    let numerator = fox_derivative(&relator, 1, &[q, p]).normalize();
    let num = TruncatedSeries::from_polynomial(&numerator, cutoff)?;
    let den = TruncatedSeries::from_polynomial(&Laurent::from_terms([(0, 1), (q, -1)]), cutoff)?;
    num.div(&den)
}

/// How an Euler characteristic matched the torsion prediction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MatchKind {
    /// Equal after normalisation.
    Signed,
    /// Equal in absolute value degree by degree, not with signs.
    Absolute,
    /// First (normalised) degree where the absolute values differ.
    Mismatch {
        degree: i64,
        chi: i64,
        expected: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CategorificationReport {
    pub matches: bool,
    pub kind: MatchKind,
    /// Normalised graded Euler characteristic.
    pub chi: Laurent,
    /// Normalised `(1 − t^μ)·τ` through the cutoff.
    pub expected: Laurent,
}

/// Compares the Alexander-graded Euler characteristic of `hat_complex` with
/// `(1 − t^{meridian_degree})·torsion`, both normalised; signed equality is
/// tried first, then equality of absolute values.
pub fn categorification_check(
    hat_complex: &ChainComplex,
    torsion: &TruncatedSeries,
    meridian_degree: i64,
) -> Result<CategorificationReport, EulerError> {
    let raw = graded_chi(hat_complex, &Grading::Alexander)?;
    let top = raw.max_degree().unwrap_or(0);
    if torsion.cutoff() < top {
        return Err(EulerError::CutoffTooSmall {
            cutoff: torsion.cutoff(),
            top,
        });
    }
    let chi = raw.normalize();
    let factor = Laurent::from_terms([(0, 1), (meridian_degree, -1)]);
    let expected = torsion.mul_polynomial(&factor)?.to_polynomial().normalize();
    let cutoff = torsion.cutoff();
    let kind = if chi.truncate(cutoff) == expected {
        MatchKind::Signed
    } else {
        match (0..=cutoff).find(|&d| chi.coeff(d).abs() != expected.coeff(d).abs()) {
            None => MatchKind::Absolute,
            Some(degree) => MatchKind::Mismatch {
                degree,
                chi: chi.coeff(degree),
                expected: expected.coeff(degree),
            },
        }
    };
    Ok(CategorificationReport {
        matches: !matches!(kind, MatchKind::Mismatch { .. }),
        kind,
        chi,
        expected,
    })
}
