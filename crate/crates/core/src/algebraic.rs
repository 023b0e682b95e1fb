//! Exact algebraic numbers and Weil-number decision procedures.
//!
//! The modulus test never floats: whether every conjugate of an algebraic
//! number has squared modulus Q is decided through the trace transform
//! B(y) with roots alpha + Q/alpha, which must be real-rooted inside
//! [-2 sqrt(Q), 2 sqrt(Q)]; realness and range are settled by Sturm chains,
//! with quadratic-surd endpoints handled exactly in Q(sqrt(Q)).

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{euler_phi, is_prime_u64, isqrt, rat_int, rat_pow};
use crate::factor::{cmp_poly, factor_rational, is_irreducible};
use crate::isolate::{count_roots_in_rect, Rect};
use crate::poly::{QPoly, SturmChain, SturmPoint};
use crate::qmat::QMat;

pub const MAX_ALGEBRAIC_DEGREE: usize = 24;
pub const MAX_PRODUCT_DEGREE: usize = 10_000;
pub const MAX_ENUM_QW: u64 = 1_000_000;
pub const MAX_ENUM_DEGREE: usize = 6;
const MAX_ENUM_BOX: u128 = 20_000_000;
const MAX_MARGIN_DEGREE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraicError {
    #[error("polynomial is reducible; pick one irreducible factor")]
    ReducibleNeedsChoice(Vec<QPoly>),
    #[error("degree {0} exceeds the cap {MAX_ALGEBRAIC_DEGREE}")]
    DegreeCap(usize),
    #[error("product polynomial degree {0} exceeds the cap {MAX_PRODUCT_DEGREE}")]
    DegreeBlowup(usize),
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("selector rectangle could not be certified to isolate one root")]
    SelectorUnverified,
    #[error("invalid input: {0}")]
    BadInput(String),
}

/// Isolating rectangle selecting one distinguished complex root.
pub type IsolatingRect = Rect;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicNumber {
    min_poly: QPoly,
    selector: Option<IsolatingRect>,
    integer_flag: bool,
}

impl AlgebraicNumber {
    /// Wrap a monic irreducible minimal polynomial.
    pub fn from_min_poly(m: QPoly) -> Result<Self, AlgebraicError> {
        if m.is_zero() || m.degree() == Some(0) {
            return Err(AlgebraicError::BadInput("minimal polynomial must be nonconstant".into()));
        }
        let m = m.monic();
        if m.deg() > MAX_ALGEBRAIC_DEGREE {
            return Err(AlgebraicError::DegreeCap(m.deg()));
        }
        if !is_irreducible(&m) {
            let factors = factor_rational(&m).into_iter().map(|(f, _)| f).collect();
            return Err(AlgebraicError::ReducibleNeedsChoice(factors));
        }
        let integer_flag = m.is_integer();
        Ok(AlgebraicNumber {
            min_poly: m,
            selector: None,
            integer_flag,
        })
    }

    pub fn from_rational(r: &BigRational) -> Self {
        let m = QPoly::from_coeffs(vec![-r.clone(), rat_int(1)]);
        AlgebraicNumber {
            integer_flag: m.is_integer(),
            min_poly: m,
            selector: None,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        AlgebraicNumber::from_rational(&rat_int(n))
    }

    pub fn min_poly(&self) -> &QPoly {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.deg()
    }

    pub fn is_integer_flagged(&self) -> bool {
        self.integer_flag
    }

    pub fn selector(&self) -> Option<&IsolatingRect> {
        self.selector.as_ref()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.degree() == 1 {
            Some(-self.min_poly.coeff(0))
        } else {
            None
        }
    }

    /// Attach an isolating rectangle; the count is certified exactly.
    pub fn with_selector(mut self, rect: IsolatingRect) -> Result<Self, AlgebraicError> {
        match count_roots_in_rect(&self.min_poly, &rect, 14) {
            Some(1) => {
                self.selector = Some(rect);
                Ok(self)
            }
            _ => Err(AlgebraicError::SelectorUnverified),
        }
    }

    /// Multiplicative inverse (reversed minimal polynomial).
    pub fn inverse(&self) -> Result<Self, AlgebraicError> {
        if self.min_poly.coeff(0).is_zero() {
            return Err(AlgebraicError::BadInput("zero has no inverse".into()));
        }
        let rev = self.min_poly.reverse().monic();
        AlgebraicNumber::from_min_poly(rev)
    }

    /// The number alpha / c for a nonzero rational c.
    pub fn divide_by_rational(&self, c: &BigRational) -> Result<Self, AlgebraicError> {
        if c.is_zero() {
            return Err(AlgebraicError::BadInput("division by zero".into()));
        }
        let scaled = self.min_poly.scale_arg(c).monic();
        AlgebraicNumber::from_min_poly(scaled)
    }

    /// Norm down to Q under the convention that the ambient field has the
    /// same degree as the global minimal polynomial: the product of all
    /// conjugates, (-1)^n m(0).
    pub fn norm_rational(&self) -> BigRational {
        let n = self.degree();
        let c = self.min_poly.coeff(0);
        if n % 2 == 0 {
            c
        } else {
            -c
        }
    }
}

/// Factor the input over Q; return the number when a single irreducible
/// factor carries it, otherwise hand the factor list back to the caller.
pub fn algebraic_from_poly(poly: &QPoly) -> Result<AlgebraicNumber, AlgebraicError> {
    if poly.is_zero() || poly.degree() == Some(0) {
        return Err(AlgebraicError::BadInput("polynomial must be nonconstant".into()));
    }
    if poly.deg() > MAX_ALGEBRAIC_DEGREE {
        return Err(AlgebraicError::DegreeCap(poly.deg()));
    }
    let factors = factor_rational(poly);
    let distinct: Vec<QPoly> = factors.iter().map(|(f, _)| f.clone()).collect();
    if distinct.len() == 1 {
        AlgebraicNumber::from_min_poly(distinct.into_iter().next().unwrap())
    } else {
        Err(AlgebraicError::ReducibleNeedsChoice(distinct))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeilCheckResult {
    pub holds: bool,
    pub q: BigInt,
    pub weight: Rational64,
    /// When `holds`: the verified common squared modulus q^w. When not:
    /// a certified positive lower bound on the squared-modulus deviation
    /// (in the power-transformed coordinates for fractional weights), or
    /// `None` when the failure is the integrality clause or the deviation
    /// bound is out of desk range.
    pub margin: Option<BigRational>,
}

/// Decide whether alpha is a q-Weil number (or integer) of weight w: every
/// complex embedding has modulus exactly q^(w/2).
pub fn is_weil(
    alpha: &AlgebraicNumber,
    q: &BigInt,
    w: Rational64,
    require_integer: bool,
) -> WeilCheckResult {
    let b = *w.denom();
    let a = *w.numer();
    let qrat = BigRational::from_integer(q.clone());
    let qq = rat_pow(&qrat, a); // squared modulus target in transformed coords
    let s = if b == 1 {
        self_or_squarefree(&alpha.min_poly)
    } else {
        self_or_squarefree(&power_roots_poly(&alpha.min_poly, b as u64))
    };
    let on_circle = all_roots_modulus_sq(&s, &qq);
    let mut holds = on_circle;
    let mut margin = if on_circle {
        Some(qq.clone())
    } else {
        deviation_margin(&s, &qq)
    };
    if holds && require_integer && !alpha.integer_flag {
        holds = false;
        margin = None;
    }
    WeilCheckResult {
        holds,
        q: q.clone(),
        weight: w,
        margin,
    }
}

fn self_or_squarefree(m: &QPoly) -> QPoly {
    m.squarefree_part()
}

/// All roots of the squarefree monic s have squared modulus qq (> 0).
fn all_roots_modulus_sq(s: &QPoly, qq: &BigRational) -> bool {
    if s.coeff(0).is_zero() {
        // 0 is a root; modulus 0 != qq
        return false;
    }
    let n = s.deg();
    if n == 0 {
        return true;
    }
    // necessary functional-equation filter: root multiset stable under
    // alpha -> qq/alpha, i.e. s_i qq^i = s(0) s_{n-i} for all i
    let s0 = s.coeff(0);
    let mut qi = rat_int(1);
    for i in 0..=n {
        if s.coeff(i) * &qi != &s0 * s.coeff(n - i) {
            return false;
        }
        qi *= qq;
    }
    // trace transform: B has roots alpha + qq/alpha
    let c = QMat::companion(s);
    let cinv = c.inverse().expect("s(0) != 0");
    let b = c.add(&cinv.scale(qq)).charpoly();
    let bsf = b.squarefree_part();
    all_real_roots_in_symmetric_range(&bsf, qq)
}

/// All roots of the squarefree poly are real and lie in [-2 sqrt(qq), 2 sqrt(qq)].
/// Simple endpoint roots are divided out first, so the remaining Sturm count
/// over the open interval must equal the deflated degree.
fn all_real_roots_in_symmetric_range(bsf: &QPoly, qq: &BigRational) -> bool {
    let mut f = bsf.clone();
    let four_qq = rat_int(4) * qq;
    if let Some(r2) = rational_sqrt(&four_qq) {
        for e in [r2.clone(), -r2.clone()] {
            if f.deg() >= 1 && f.eval(&e).is_zero() {
                f = f.div_exact(&QPoly::from_coeffs(vec![-e.clone(), rat_int(1)]));
            }
        }
        if f.deg() == 0 {
            return true;
        }
        let chain = SturmChain::new(&f);
        let lo = SturmPoint::Rational(-r2.clone());
        let hi = SturmPoint::Rational(r2);
        chain.count_roots(&lo, &hi) == f.deg()
    } else {
        // irrational endpoints: a root at 2 sqrt(qq) forces y^2 - 4qq | f
        let quad = QPoly::from_coeffs(vec![-four_qq.clone(), rat_int(0), rat_int(1)]);
        if f.gcd(&quad).deg() == 2 {
            f = f.div_exact(&quad.monic());
        }
        if f.deg() == 0 {
            return true;
        }
        let chain = SturmChain::new(&f);
        let lo = SturmPoint::Quadratic {
            a: rat_int(0),
            b: rat_int(-2),
            disc: qq.clone(),
        };
        let hi = SturmPoint::Quadratic {
            a: rat_int(0),
            b: rat_int(2),
            disc: qq.clone(),
        };
        chain.count_roots(&lo, &hi) == f.deg()
    }
}

/// Exact rational square root, if it exists.
fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let ns = isqrt(&x.numer().magnitude().clone());
    let ds = isqrt(&x.denom().magnitude().clone());
    let n = BigInt::from(ns);
    let d = BigInt::from(ds);
    if &n * &n == *x.numer() && &d * &d == *x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Certified positive lower bound on |alpha_i alpha_j - qq| over the nonzero
/// deviations, via a coefficient bound on the shifted pair-product
/// polynomial. The genuine squared moduli are among the alpha_i alpha_j, so
/// a bound over the superset is sound.
fn deviation_margin(s: &QPoly, qq: &BigRational) -> Option<BigRational> {
    if s.deg() > MAX_MARGIN_DEGREE {
        return None;
    }
    let prod = if s.deg() == 1 {
        let r = -s.coeff(0);
        QPoly::from_coeffs(vec![-(&r * &r), rat_int(1)])
    } else {
        crate::qmat::composed_product(s, s)
    };
    let shifted = prod.shift_arg(qq);
    // strip roots at zero (pair products equal to qq)
    let mut k = 0usize;
    while k < shifted.coeffs.len() && shifted.coeff(k).is_zero() {
        k += 1;
    }
    if k >= shifted.coeffs.len() {
        return None;
    }
    let low = shifted.coeff(k).abs();
    let mut maxc = rat_int(0);
    for i in k + 1..shifted.coeffs.len() {
        let c = shifted.coeff(i).abs();
        if c > maxc {
            maxc = c;
        }
    }
    if maxc.is_zero() {
        // only one extreme coefficient: sole root bound is |low| itself...
        // shifted = c y^k, no nonzero roots; no deviation to bound
        return None;
    }
    Some(&low / (&low + &maxc))
}

/// Kronecker's criterion: a root of unity iff an algebraic integer all of
/// whose conjugates lie on the unit circle; returns the exact order.
pub fn is_root_of_unity(alpha: &AlgebraicNumber) -> Option<u64> {
    if !alpha.integer_flag {
        return None;
    }
    let one = rat_int(1);
    let s = alpha.min_poly.clone(); // irreducible, already squarefree
    if !all_roots_modulus_sq(&s, &one) {
        return None;
    }
    let d = alpha.degree() as u64;
    // phi(n) >= sqrt(n/2) so n <= 2 d^2
    let bound = 2 * d * d + 2;
    for n in 1..=bound {
        if euler_phi(n) != d {
            continue;
        }
        // does min_poly divide x^n - 1?
        let mut xn1 = vec![rat_int(0); n as usize + 1];
        xn1[0] = rat_int(-1);
        xn1[n as usize] = rat_int(1);
        if alpha.min_poly.divides(&QPoly::from_coeffs(xn1)) {
            return Some(n);
        }
    }
    None
}

/// Monic polynomial of the same degree whose roots are the r-th powers of
/// the roots of m (with multiplicity).
pub fn power_roots_poly(m: &QPoly, r: u64) -> QPoly {
    assert!(m.is_monic() && m.deg() >= 1, "m must be monic nonconstant");
    if r == 0 {
        // all roots become 1
        let mut acc = QPoly::one();
        let lin = QPoly::from_ints(&[-1, 1]);
        for _ in 0..m.deg() {
            acc = acc.mul(&lin);
        }
        return acc;
    }
    if r == 1 {
        return m.clone();
    }
    if m.deg() == 1 {
        let c = -m.coeff(0);
        return QPoly::from_coeffs(vec![-rat_pow(&c, r as i64), rat_int(1)]);
    }
    QMat::companion(m).pow(r).charpoly()
}

/// Result of `product_power_conjugates`: a candidate superset polynomial and
/// the recorded exponent sum.
#[derive(Clone, Debug)]
pub struct ConjugateProductPoly {
    pub poly: QPoly,
    pub exponent_sum: i64,
}

/// A monic (possibly reducible) polynomial whose root multiset contains
/// every product prod_i tau_i(delta)^{t_i} over all assignments of
/// conjugates tau_i; built by iterated composed products.
pub fn product_power_conjugates(
    m: &QPoly,
    t: &[i64],
) -> Result<ConjugateProductPoly, AlgebraicError> {
    if !m.is_monic() || m.deg() < 1 {
        return Err(AlgebraicError::BadInput("m must be monic nonconstant".into()));
    }
    if t.len() != m.deg() {
        return Err(AlgebraicError::BadInput(format!(
            "need exactly deg(m) = {} exponents, got {}",
            m.deg(),
            t.len()
        )));
    }
    let exponent_sum: i64 = t.iter().sum();
    let mut acc = QPoly::from_ints(&[-1, 1]); // root: empty product = 1
    for &ti in t {
        if ti == 0 {
            continue;
        }
        let base = if ti > 0 {
            power_roots_poly(m, ti as u64)
        } else {
            if m.coeff(0).is_zero() {
                return Err(AlgebraicError::BadInput(
                    "negative exponents need an invertible root".into(),
                ));
            }
            let inv = m.reverse().monic();
            power_roots_poly(&inv, (-ti) as u64)
        };
        let next_deg = acc.deg() * base.deg();
        if next_deg > MAX_PRODUCT_DEGREE {
            return Err(AlgebraicError::DegreeBlowup(next_deg));
        }
        acc = if acc.deg() == 1 {
            // shift roots multiplicatively by the rational root of acc
            let c = -acc.coeff(0);
            if c.is_one() {
                base
            } else {
                scale_roots(&base, &c)
            }
        } else if base.deg() == 1 {
            let c = -base.coeff(0);
            scale_roots(&acc, &c)
        } else {
            crate::qmat::composed_product(&acc, &base)
        };
    }
    Ok(ConjugateProductPoly {
        poly: acc,
        exponent_sum,
    })
}

/// Monic polynomial with roots c * (roots of m).
fn scale_roots(m: &QPoly, c: &BigRational) -> QPoly {
    if c.is_zero() {
        let mut acc = QPoly::one();
        for _ in 0..m.deg() {
            acc = acc.mul(&QPoly::x());
        }
        return acc;
    }
    m.scale_arg(&c.clone().recip()).monic()
}

/// All monic integer irreducible polynomials of degree <= max_deg whose
/// roots all have modulus q^(w/2), by exhausting the coefficient box
/// |a_{n-i}| <= C(n,i) q^(w i / 2); sorted by (degree, coefficients).
pub fn enumerate_weil_polys(
    q: u64,
    w: u32,
    max_deg: usize,
) -> Result<Vec<QPoly>, AlgebraicError> {
    if !is_prime_power(q) {
        return Err(AlgebraicError::BadInput(format!("q = {q} is not a prime power")));
    }
    if max_deg > MAX_ENUM_DEGREE {
        return Err(AlgebraicError::CapExceeded(format!(
            "max_deg {max_deg} > {MAX_ENUM_DEGREE}"
        )));
    }
    let qw = (q as u128).checked_pow(w).filter(|&v| v <= MAX_ENUM_QW as u128);
    if qw.is_none() {
        return Err(AlgebraicError::CapExceeded(format!("q^w exceeds {MAX_ENUM_QW}")));
    }
    let qb = BigInt::from(q);
    let qq = rat_pow(&BigRational::from_integer(qb.clone()), w as i64);
    let mut out: Vec<QPoly> = Vec::new();
    for n in 1..=max_deg {
        // bound for coefficient of x^j: C(n, n-j) * q^(w (n-j) / 2)
        let mut bounds: Vec<BigInt> = Vec::with_capacity(n);
        let mut box_size: u128 = 1;
        for j in 0..n {
            let k = (n - j) as u32;
            let c = binomial(n as u64, k as u64);
            // floor(C * q^(wk/2)) = isqrt(C^2 q^(wk))
            let inner = BigInt::from(c) * BigInt::from(c) * qb.pow(w * k);
            let b = BigInt::from(isqrt(inner.magnitude()));
            let width = num_traits::ToPrimitive::to_u128(&b)
                .map(|v| 2 * v + 1)
                .unwrap_or(u128::MAX);
            box_size = box_size.saturating_mul(width);
            bounds.push(b);
        }
        if box_size > MAX_ENUM_BOX {
            return Err(AlgebraicError::CapExceeded(format!(
                "coefficient box of size {box_size} at degree {n}"
            )));
        }
        // odometer over the box
        let mut counters: Vec<BigInt> = bounds.iter().map(|b| -b.clone()).collect();
        loop {
            let mut coeffs: Vec<BigRational> = counters
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect();
            coeffs.push(rat_int(1));
            let cand = QPoly::from_coeffs(coeffs);
            if passes_weil_filter(&cand, &qq) && is_irreducible(&cand) {
                out.push(cand);
            }
            // increment
            let mut pos = 0usize;
            loop {
                if pos == n {
                    break;
                }
                counters[pos] += 1;
                if counters[pos] <= bounds[pos] {
                    break;
                }
                counters[pos] = -bounds[pos].clone();
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
    out.sort_by(cmp_poly);
    Ok(out)
}

fn passes_weil_filter(cand: &QPoly, qq: &BigRational) -> bool {
    if cand.coeff(0).is_zero() {
        return false;
    }
    all_roots_modulus_sq(&cand.squarefree_part(), qq)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut n = q;
    let mut p = 0u64;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            p = d;
            while n % d == 0 {
                n /= d;
            }
            break;
        }
        d += 1;
    }
    if p == 0 {
        return is_prime_u64(q);
    }
    n == 1
}
