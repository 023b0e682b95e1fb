//! Exact univariate polynomials over the rationals.
//!
//! Coefficient vectors are little-endian (constant term first) and kept
//! normalized: no trailing zero coefficients, the zero polynomial is the
//! empty vector.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{big, rat_int};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    pub coeffs: Vec<BigRational>,
}

impl std::fmt::Debug for QPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "x^{}", i)?;
            } else {
                write!(f, "{}*x^{}", c, i)?;
            }
        }
        Ok(())
    }
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        QPoly::constant(rat_int(1))
    }

    pub fn x() -> Self {
        QPoly::from_coeffs(vec![rat_int(0), rat_int(1)])
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = QPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        QPoly::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        QPoly::from_coeffs(
            coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    fn normalize(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(|| rat_int(0))
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(|| rat_int(0))
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.leading().is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        QPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        QPoly::from_coeffs(out)
    }

    pub fn neg(&self) -> QPoly {
        QPoly::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![rat_int(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        QPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; panics on zero divisor.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = d.deg();
        let lead_inv = d.leading().recip();
        if rem.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![rat_int(0); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i].clone() * &lead_inv;
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c.clone();
            for j in 0..=dd {
                let t = &d.coeffs[j] * &c;
                rem[i - dd + j] -= t;
            }
        }
        (QPoly::from_coeffs(quot), QPoly::from_coeffs(rem))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.div_rem(d).1
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, d: &QPoly) -> QPoly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &QPoly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.rem(self).is_zero()
    }

    pub fn derivative(&self) -> QPoly {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigRational::from_integer(big(i as i64 + 1)))
                .collect(),
        )
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        let mut acc = rat_int(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Monic rescaling of a nonzero polynomial.
    pub fn monic(&self) -> QPoly {
        let l = self.leading();
        if l.is_one() {
            return self.clone();
        }
        self.scale(&l.recip())
    }

    /// Monic gcd via the Euclidean algorithm over Q.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Squarefree part f / gcd(f, f'), monic.
    pub fn squarefree_part(&self) -> QPoly {
        assert!(!self.is_zero());
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.monic()
        } else {
            self.div_exact(&g).monic()
        }
    }

    /// Substitute x -> c*x.
    pub fn scale_arg(&self, c: &BigRational) -> QPoly {
        let mut pow = rat_int(1);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pow);
            pow *= c;
        }
        QPoly::from_coeffs(out)
    }

    /// Substitute x -> x + c.
    pub fn shift_arg(&self, c: &BigRational) -> QPoly {
        let mut acc = QPoly::zero();
        let shift = QPoly::from_coeffs(vec![c.clone(), rat_int(1)]);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&shift).add(&QPoly::constant(a.clone()));
        }
        acc
    }

    /// Reversed polynomial x^n f(1/x); requires f(0) != 0 to preserve degree.
    pub fn reverse(&self) -> QPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        QPoly::from_coeffs(coeffs)
    }

    /// Clear denominators and content: primitive integer coefficients with
    /// positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        assert!(!self.is_zero());
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = content.gcd(c);
        }
        let sign = if ints.last().unwrap().is_negative() {
            -content
        } else {
            content
        };
        ints.iter().map(|c| c / &sign).collect()
    }

    /// Maximum absolute value of the primitive integer coefficients.
    pub fn height(&self) -> BigInt {
        self.primitive_integer()
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap()
    }
}

/// Classical Sylvester-matrix resultant, computed by fraction-free Bareiss
/// elimination. Used as the independent cross-check for the companion-matrix
/// routes in `qmat`.
pub fn resultant_sylvester(f: &QPoly, g: &QPoly) -> BigRational {
    if f.is_zero() || g.is_zero() {
        return rat_int(0);
    }
    let n = f.deg();
    let m = g.deg();
    if n == 0 {
        return num_traits::Pow::pow(f.coeffs[0].clone(), m as u64);
    }
    if m == 0 {
        return num_traits::Pow::pow(g.coeffs[0].clone(), n as u64);
    }
    let size = n + m;
    let mut mat = vec![vec![rat_int(0); size]; size];
    for row in 0..m {
        for (j, c) in f.coeffs.iter().rev().enumerate() {
            mat[row][row + j] = c.clone();
        }
    }
    for row in 0..n {
        for (j, c) in g.coeffs.iter().rev().enumerate() {
            mat[m + row][row + j] = c.clone();
        }
    }
    det_gauss(mat)
}

fn det_gauss(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = rat_int(1);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(pr) = pivot else {
            return rat_int(0);
        };
        if pr != col {
            m.swap(pr, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        let pinv = p.recip();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &pinv;
            for c in col..n {
                let t = &m[col][c] * &factor;
                m[r][c] -= t;
            }
        }
    }
    det
}

/// The n-th cyclotomic polynomial, by exact division of x^n - 1.
pub fn cyclotomic(n: u64) -> QPoly {
    assert!(n >= 1);
    let mut xn1 = vec![rat_int(0); n as usize + 1];
    xn1[0] = rat_int(-1);
    xn1[n as usize] = rat_int(1);
    let mut num = QPoly::from_coeffs(xn1);
    for d in 1..n {
        if n % d == 0 {
            num = num.div_exact(&cyclotomic(d));
        }
    }
    num
}

/// Sign of a + b*sqrt(disc) with disc > 0 rational.
fn sign_quadratic(a: &BigRational, b: &BigRational, disc: &BigRational) -> i32 {
    let sa = rational_sign(a);
    let sb = rational_sign(b);
    if sb == 0 {
        return sa;
    }
    if sa == 0 {
        return sb;
    }
    if sa == sb {
        return sa;
    }
    // opposite signs: compare a^2 against b^2 * disc
    let lhs = a * a;
    let rhs = b * b * disc;
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => sa,
        std::cmp::Ordering::Less => sb,
        std::cmp::Ordering::Equal => 0,
    }
}

fn rational_sign(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Evaluation point for Sturm chains: rational, quadratic surd, or infinity.
#[derive(Clone, Debug)]
pub enum SturmPoint {
    NegInf,
    Rational(BigRational),
    /// a + b*sqrt(disc), disc > 0.
    Quadratic {
        a: BigRational,
        b: BigRational,
        disc: BigRational,
    },
    PosInf,
}

fn sign_at(p: &QPoly, t: &SturmPoint) -> i32 {
    if p.is_zero() {
        return 0;
    }
    match t {
        SturmPoint::PosInf => rational_sign(&p.leading()),
        SturmPoint::NegInf => {
            let s = rational_sign(&p.leading());
            if p.deg() % 2 == 0 {
                s
            } else {
                -s
            }
        }
        SturmPoint::Rational(r) => rational_sign(&p.eval(r)),
        SturmPoint::Quadratic { a, b, disc } => {
            // Horner over Q(sqrt(disc)): value = u + v*sqrt(disc)
            let mut u = rat_int(0);
            let mut v = rat_int(0);
            for c in p.coeffs.iter().rev() {
                let nu = &u * a + &v * b * disc + c;
                let nv = &u * b + &v * a;
                u = nu;
                v = nv;
            }
            sign_quadratic(&u, &v, disc)
        }
    }
}

/// Sturm chain of a squarefree polynomial.
pub struct SturmChain {
    chain: Vec<QPoly>,
}

impl SturmChain {
    pub fn new(f: &QPoly) -> Self {
        let mut chain = vec![f.clone(), f.derivative()];
        loop {
            let k = chain.len();
            if chain[k - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[k - 2].rem(&chain[k - 1]).neg();
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        SturmChain { chain }
    }

    fn variations(&self, t: &SturmPoint) -> usize {
        let mut count = 0;
        let mut last = 0;
        for p in &self.chain {
            let s = sign_at(p, t);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct real roots in the half-open interval (lo, hi].
    /// Endpoints at which f vanishes must be handled by the caller.
    pub fn count_roots(&self, lo: &SturmPoint, hi: &SturmPoint) -> usize {
        self.variations(lo) - self.variations(hi)
    }
}

/// Number of distinct real roots of a squarefree polynomial on the whole line.
pub fn count_real_roots(f: &QPoly) -> usize {
    SturmChain::new(f).count_roots(&SturmPoint::NegInf, &SturmPoint::PosInf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn p(cs: &[i64]) -> QPoly {
        QPoly::from_ints(cs)
    }

    #[test]
    fn division_and_gcd() {
        let f = p(&[-1, 0, 1]); // x^2 - 1
        let g = p(&[1, 1]); // x + 1
        let (q, r) = f.div_rem(&g);
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(f.gcd(&g), g.monic());
        assert_eq!(p(&[2, 2]).gcd(&p(&[-2, 2])).deg(), 0);
    }

    #[test]
    fn squarefree() {
        let f = p(&[1, 1]).mul(&p(&[1, 1])).mul(&p(&[-1, 1])); // (x+1)^2 (x-1)
        assert_eq!(f.squarefree_part(), p(&[-1, 0, 1]));
    }

    #[test]
    fn resultant_matches_known_values() {
        // res(x^2-2, x^2-3) = (2-3)^2... product over roots of f of g(root):
        // g(±sqrt2) = 2-3 = -1 each -> 1
        let r = resultant_sylvester(&p(&[-2, 0, 1]), &p(&[-3, 0, 1]));
        assert_eq!(r, rat_int(1));
        // res(x-a, g) = g(a)
        let r2 = resultant_sylvester(&p(&[-3, 1]), &p(&[1, 1, 1]));
        assert_eq!(r2, rat_int(13));
    }

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic(1), p(&[-1, 1]));
        assert_eq!(cyclotomic(2), p(&[1, 1]));
        assert_eq!(cyclotomic(3), p(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), p(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), p(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), p(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn sturm_counts() {
        // (x^2-2)(x^2+1): two real roots
        let f = p(&[-2, 0, 1]).mul(&p(&[1, 0, 1]));
        assert_eq!(count_real_roots(&f), 2);
        // roots in (0, 2]: just sqrt(2)
        let chain = SturmChain::new(&f);
        assert_eq!(
            chain.count_roots(
                &SturmPoint::Rational(rat(0, 1)),
                &SturmPoint::Rational(rat(2, 1))
            ),
            1
        );
    }

    #[test]
    fn sturm_quadratic_endpoint() {
        // x^2 - 2 has both roots in [-sqrt(2), sqrt(2)] but the open-below
        // count over (-sqrt2, sqrt2] picks up both endpoints' interior... use
        // (-2, sqrt2]: contains -sqrt2 and sqrt2.
        let f = p(&[-2, 0, 1]);
        let chain = SturmChain::new(&f);
        let hi = SturmPoint::Quadratic {
            a: rat(0, 1),
            b: rat(1, 1),
            disc: rat(2, 1),
        };
        assert_eq!(chain.count_roots(&SturmPoint::Rational(rat(-2, 1)), &hi), 2);
        // sign of f at sqrt(2) is 0 -> treated as no variation contribution
        assert_eq!(sign_at(&f, &hi), 0);
    }

    #[test]
    fn shift_and_scale() {
        let f = p(&[0, 0, 1]); // x^2
        assert_eq!(f.shift_arg(&rat(1, 1)), p(&[1, 2, 1]));
        assert_eq!(f.scale_arg(&rat(3, 1)), p(&[0, 0, 9]));
    }
}
