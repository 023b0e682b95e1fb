//! Exact models of p-adic fields and their elements.
//!
//! A field k/Q_p is presented globally: an unramified part k0 = Q[y]/(u(y))
//! with u monic and irreducible mod p, and a totally ramified part
//! k = k0[x]/(e(x)) with e Eisenstein over k0. Elements live either in exact
//! mode (rational coordinates on the monomial basis x^i y^j, no precision
//! loss ever) or in capped mode (integer coordinates modulo a power of p
//! with a soundly tracked absolute precision).

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{big, int_valuation, is_prime_u64, mult_order, rat_valuation};

/// Hard caps: global model degree and capped-mode digit count.
pub const MAX_DEGREE: usize = 16;
pub const MAX_PRECISION: i64 = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("u_poly is not irreducible modulo p")]
    NotIrreducibleModP,
    #[error("e_poly is not Eisenstein over the unramified ring: {0}")]
    NotEisenstein(String),
    #[error("degree {0} exceeds the desk-scale cap {MAX_DEGREE}")]
    DegreeCap(usize),
    #[error("operands belong to different field models")]
    FieldMismatch,
    #[error("capped operand is indistinguishable from zero at its precision")]
    PrecisionExhausted,
    #[error("division by exact zero")]
    DivisionByZero,
    #[error("residue must be nonzero")]
    ZeroResidue,
    #[error("element is not in the exact global model")]
    NotInGlobalModel,
    #[error("wild ramification: supply the Galois closure degree explicitly")]
    WildRamificationNeedsOverride,
    #[error("precision {0} exceeds the cap {MAX_PRECISION}")]
    PrecisionCap(i64),
    #[error("invalid model input: {0}")]
    BadInput(String),
}

#[derive(Debug)]
struct FieldData {
    name: String,
    p: u64,
    /// monic integer polynomial of degree f, irreducible mod p
    u_poly: Vec<BigInt>,
    /// monic-in-x Eisenstein polynomial: e+1 coefficients, each a y-poly
    /// (degree < f) with integer coefficients
    e_poly: Vec<Vec<BigInt>>,
    e: usize,
    f: usize,
    q: BigInt,
}

/// A p-adic field model; cheap to clone and share.
#[derive(Clone, Debug)]
pub struct LocalFieldModel {
    data: Arc<FieldData>,
}

impl PartialEq for LocalFieldModel {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
            || (self.data.p == other.data.p
                && self.data.u_poly == other.data.u_poly
                && self.data.e_poly == other.data.e_poly)
    }
}
impl Eq for LocalFieldModel {}

/// Valuation normalized by v(p) = 1; uniformizers have v = 1/e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(Rational64),
    /// Indistinguishable from zero at the stated precision.
    AtLeast(Rational64),
}

impl Valuation {
    pub fn exact(&self) -> Option<Rational64> {
        match self {
            Valuation::Exact(v) => Some(*v),
            Valuation::AtLeast(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    /// coords[i][j]: coefficient of x^i y^j, rational.
    Exact(Vec<Vec<BigRational>>),
    /// p^shift * sum coords[i][j] x^i y^j with integer coords reduced into
    /// [0, p^digits); sound modulo v >= abs_prec.
    Capped {
        shift: i64,
        digits: u32,
        coords: Vec<Vec<BigInt>>,
        abs_prec: Rational64,
    },
}

/// An element of a `LocalFieldModel`.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicNumber {
    field: LocalFieldModel,
    repr: Repr,
}

pub fn make_field(
    p: u64,
    u_poly: &[BigInt],
    e_poly: &[Vec<BigInt>],
    name: &str,
) -> Result<LocalFieldModel, PadicError> {
    if !is_prime_u64(p) {
        return Err(PadicError::NotPrime(p));
    }
    if u_poly.len() < 2 || !u_poly.last().unwrap().is_one() {
        return Err(PadicError::BadInput("u_poly must be monic of degree >= 1".into()));
    }
    let f = u_poly.len() - 1;
    if e_poly.len() < 2 {
        return Err(PadicError::BadInput("e_poly must have degree >= 1 in x".into()));
    }
    let e = e_poly.len() - 1;
    let d = e * f;
    if d > MAX_DEGREE {
        return Err(PadicError::DegreeCap(d));
    }
    if f > 1 && !upoly_irreducible_mod_p(u_poly, p) {
        return Err(PadicError::NotIrreducibleModP);
    }
    // reduce the x-coefficients modulo u, then check Eisenstein shape
    let pb = big(p as i64);
    let reduced: Vec<Vec<BigInt>> = e_poly.iter().map(|c| reduce_mod_u(c, u_poly)).collect();
    let lead_is_one = reduced[e]
        .iter()
        .enumerate()
        .all(|(j, c)| if j == 0 { c.is_one() } else { c.is_zero() });
    if !lead_is_one {
        return Err(PadicError::BadInput("e_poly must be monic in x".into()));
    }
    for (i, coef) in reduced.iter().enumerate().take(e) {
        let v = coef
            .iter()
            .filter_map(|c| int_valuation(c, &pb))
            .min()
            .unwrap_or(u64::MAX);
        if v < 1 {
            return Err(PadicError::NotEisenstein(format!(
                "coefficient of x^{i} has valuation 0"
            )));
        }
        if i == 0 && v != 1 {
            return Err(PadicError::NotEisenstein(
                "constant term must have valuation exactly 1".into(),
            ));
        }
    }
    let q = pb.pow(f as u32);
    Ok(LocalFieldModel {
        data: Arc::new(FieldData {
            name: name.to_string(),
            p,
            u_poly: u_poly.to_vec(),
            e_poly: reduced,
            e,
            f,
            q,
        }),
    })
}

/// Convenience constructor for Q_p with uniformizer pi0 (v(pi0) = 1).
pub fn q_p(p: u64) -> LocalFieldModel {
    make_field(
        p,
        &[big(-1), big(1)],
        &[vec![big(-(p as i64))], vec![big(1)]],
        &format!("Q_{p}"),
    )
    .expect("base field model")
}

fn reduce_mod_u(c: &[BigInt], u: &[BigInt]) -> Vec<BigInt> {
    let f = u.len() - 1;
    let mut rem: Vec<BigInt> = c.to_vec();
    while rem.len() > f {
        let lead = rem.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let k = rem.len() - f; // position of x^k * u
        for j in 0..f {
            rem[k + j] -= &lead * &u[j];
        }
    }
    rem.resize(f.max(1), BigInt::zero());
    rem
}

fn upoly_irreducible_mod_p(u: &[BigInt], p: u64) -> bool {
    // Rabin's test: x^(p^f) == x mod (u, p) and gcd(x^(p^(f/l)) - x, u) = 1
    // for each prime l | f. Frobenius iterates by modular composition.
    let f = u.len() - 1;
    let up: Vec<u64> = u
        .iter()
        .map(|c| c.mod_floor(&big(p as i64)).to_u64().unwrap())
        .collect();
    let frob = fp_powmod_x(p, &up); // x^p mod (u, p)
    let mut iterates = vec![fp_x(p)]; // x^(p^0)
    for _ in 0..f {
        let last = iterates.last().unwrap();
        iterates.push(fp_compose(last, &frob, &up, p));
    }
    // x^(p^f) == x
    if iterates[f] != fp_x(p) {
        return false;
    }
    let mut m = f;
    let mut primes = vec![];
    let mut t = 2;
    while t * t <= m {
        if m % t == 0 {
            primes.push(t);
            while m % t == 0 {
                m /= t;
            }
        }
        t += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for l in primes {
        let h = &iterates[f / l];
        let mut diff = h.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        if fp_gcd_deg(&diff, &up, p) != 0 {
            return false;
        }
    }
    true
}

// Minimal F_p[y] helpers for the irreducibility test (coefficients u64).
fn fp_x(_p: u64) -> Vec<u64> {
    vec![0, 1]
}

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while matches!(v.last(), Some(0)) {
        v.pop();
    }
    v
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    fp_rem(&prod, m, p)
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let deg_m = m.len() - 1;
    let mut rem: Vec<u64> = a.to_vec();
    // m is monic
    while rem.len() > deg_m {
        let lead = *rem.last().unwrap();
        rem.pop();
        if lead == 0 {
            continue;
        }
        let k = rem.len() - deg_m;
        for j in 0..deg_m {
            let t = (m[j] as u128 * lead as u128) % p as u128;
            rem[k + j] = ((rem[k + j] as u128 + p as u128 - t) % p as u128) as u64;
        }
    }
    fp_trim(rem)
}

fn fp_powmod_x(p: u64, m: &[u64]) -> Vec<u64> {
    // x^p mod (m, p) by square and multiply
    let mut acc = vec![1u64];
    let mut base = fp_x(p);
    base = fp_rem(&base, m, p);
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &base, m, p);
        }
        e >>= 1;
        if e > 0 {
            base = fp_mulmod(&base, &base, m, p);
        }
    }
    acc
}

fn fp_compose(f: &[u64], g: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // f(g) mod (m, p), Horner
    let mut acc: Vec<u64> = vec![];
    for &c in f.iter().rev() {
        acc = fp_mulmod(&acc, g, m, p);
        if c != 0 {
            if acc.is_empty() {
                acc = vec![c];
            } else {
                acc[0] = (acc[0] + c) % p;
            }
        }
        acc = fp_trim(acc);
    }
    acc
}

fn fp_gcd_deg(a: &[u64], m: &[u64], p: u64) -> usize {
    let mut x = fp_trim(a.to_vec());
    let mut y = m.to_vec();
    while !x.is_empty() {
        let r = fp_poly_rem(&y, &x, p);
        y = x;
        x = r;
    }
    if y.is_empty() {
        0
    } else {
        y.len() - 1
    }
}

fn fp_poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut rem: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = fp_inv(*b.last().unwrap(), p);
    while rem.len() > db {
        let lead = ((*rem.last().unwrap() as u128 * lead_inv as u128) % p as u128) as u64;
        rem.pop();
        if lead == 0 {
            continue;
        }
        let k = rem.len() - db;
        for j in 0..db {
            let t = (b[j] as u128 * lead as u128) % p as u128;
            rem[k + j] = ((rem[k + j] as u128 + p as u128 - t) % p as u128) as u64;
        }
    }
    fp_trim(rem)
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (p as i128, (a % p) as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    t.rem_euclid(p as i128) as u64
}

impl LocalFieldModel {
    pub fn name(&self) -> &str {
        &self.data.name
    }
    pub fn p(&self) -> u64 {
        self.data.p
    }
    pub fn p_big(&self) -> BigInt {
        big(self.data.p as i64)
    }
    /// Ramification index e.
    pub fn e(&self) -> usize {
        self.data.e
    }
    /// Inertia degree f.
    pub fn f(&self) -> usize {
        self.data.f
    }
    /// Degree d = e f over Q_p.
    pub fn degree(&self) -> usize {
        self.data.e * self.data.f
    }
    /// Residue field size q = p^f.
    pub fn q(&self) -> BigInt {
        self.data.q.clone()
    }
    pub fn u_poly(&self) -> &[BigInt] {
        &self.data.u_poly
    }
    pub fn e_poly(&self) -> &[Vec<BigInt>] {
        &self.data.e_poly
    }

    pub fn zero(&self) -> PadicNumber {
        PadicNumber {
            field: self.clone(),
            repr: Repr::Exact(self.zero_coords()),
        }
    }

    fn zero_coords(&self) -> Vec<Vec<BigRational>> {
        vec![vec![BigRational::zero(); self.data.f]; self.data.e]
    }

    pub fn one(&self) -> PadicNumber {
        self.from_rational(&BigRational::one())
    }

    pub fn from_rational(&self, r: &BigRational) -> PadicNumber {
        let mut c = self.zero_coords();
        c[0][0] = r.clone();
        PadicNumber {
            field: self.clone(),
            repr: Repr::Exact(c),
        }
    }

    pub fn from_integer(&self, n: i64) -> PadicNumber {
        self.from_rational(&BigRational::from_integer(big(n)))
    }

    /// The class of x: the Eisenstein generator, a uniformizer.
    pub fn uniformizer(&self) -> PadicNumber {
        if self.data.e == 1 {
            // x = -a0 (constant y-poly reduced)
            let a0: Vec<BigRational> = self.data.e_poly[0]
                .iter()
                .map(|c| BigRational::from_integer(-c.clone()))
                .collect();
            let mut coords = self.zero_coords();
            for (j, v) in a0.into_iter().enumerate() {
                coords[0][j] = v;
            }
            return PadicNumber {
                field: self.clone(),
                repr: Repr::Exact(coords),
            };
        }
        let mut c = self.zero_coords();
        c[1][0] = BigRational::one();
        PadicNumber {
            field: self.clone(),
            repr: Repr::Exact(c),
        }
    }

    /// The class of y: generator of the unramified part.
    pub fn unramified_generator(&self) -> PadicNumber {
        let mut c = self.zero_coords();
        if self.data.f == 1 {
            // y is congruent to the root of the linear u_poly: y = -u[0]
            c[0][0] = BigRational::from_integer(-self.data.u_poly[0].clone());
        } else {
            c[0][1] = BigRational::one();
        }
        PadicNumber {
            field: self.clone(),
            repr: Repr::Exact(c),
        }
    }

    /// Element from exact coordinates coords[i][j] on the basis x^i y^j.
    pub fn from_coords(&self, coords: Vec<Vec<BigRational>>) -> Result<PadicNumber, PadicError> {
        if coords.len() != self.data.e || coords.iter().any(|r| r.len() != self.data.f) {
            return Err(PadicError::BadInput("coordinate shape mismatch".into()));
        }
        Ok(PadicNumber {
            field: self.clone(),
            repr: Repr::Exact(coords),
        })
    }

    /// Build an element from an integer polynomial expression in (x, y):
    /// expr[i][j] multiplies x^i y^j; exponents may exceed (e, f) and are
    /// reduced by the defining relations.
    pub fn from_poly_expr(&self, expr: &[Vec<BigRational>]) -> PadicNumber {
        let mut acc = self.zero();
        for (i, row) in expr.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = self
                    .uniformizer_pow(i)
                    .mul(&self.unramified_pow(j))
                    .scale_exact(c);
                acc = acc.add(&term).expect("same field");
            }
        }
        acc
    }

    fn uniformizer_pow(&self, mut n: usize) -> PadicNumber {
        let mut acc = self.one();
        let x = self.uniformizer();
        while n > 0 {
            acc = acc.mul(&x);
            n -= 1;
        }
        acc
    }

    fn unramified_pow(&self, mut n: usize) -> PadicNumber {
        let mut acc = self.one();
        let y = self.unramified_generator();
        while n > 0 {
            acc = acc.mul(&y);
            n -= 1;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Tower arithmetic on exact coordinates
// ---------------------------------------------------------------------------

type K0 = Vec<BigRational>; // y-coordinates, length f

fn k0_zero(f: usize) -> K0 {
    vec![BigRational::zero(); f]
}

fn k0_is_zero(a: &K0) -> bool {
    a.iter().all(|c| c.is_zero())
}

fn k0_add(a: &K0, b: &K0) -> K0 {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn k0_sub(a: &K0, b: &K0) -> K0 {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn k0_neg(a: &K0) -> K0 {
    a.iter().map(|x| -x.clone()).collect()
}

fn k0_mul(a: &K0, b: &K0, u: &[BigInt]) -> K0 {
    let f = u.len() - 1;
    if f == 1 {
        return vec![&a[0] * &b[0]];
    }
    let mut prod = vec![BigRational::zero(); 2 * f - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            prod[i + j] += x * y;
        }
    }
    // reduce mod u (monic)
    for k in (f..prod.len()).rev() {
        if prod[k].is_zero() {
            continue;
        }
        let lead = prod[k].clone();
        prod[k] = BigRational::zero();
        for j in 0..f {
            let t = &lead * BigRational::from_integer(u[j].clone());
            prod[k - f + j] -= t;
        }
    }
    prod.truncate(f);
    prod
}

fn k0_inv(a: &K0, u: &[BigInt]) -> Option<K0> {
    let f = u.len() - 1;
    if k0_is_zero(a) {
        return None;
    }
    if f == 1 {
        return Some(vec![a[0].clone().recip()]);
    }
    // extended Euclid in Q[y] for gcd(a, u) = 1
    use crate::poly::QPoly;
    let ap = QPoly::from_coeffs(a.clone());
    let up = QPoly::from_bigints(u);
    let (mut r0, mut r1) = (up, ap);
    let (mut s0, mut s1) = (QPoly::zero(), QPoly::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let ns = s0.sub(&q.mul(&s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
    }
    // r0 = gcd (constant since u irreducible and a != 0 of degree < f)
    debug_assert_eq!(r0.degree(), Some(0));
    let inv = s0.scale(&r0.coeff(0).recip());
    let mut out = k0_zero(f);
    for (i, c) in inv.coeffs.iter().enumerate() {
        out[i] = c.clone();
    }
    Some(out)
}

fn k0_from_ints(v: &[BigInt], f: usize) -> K0 {
    let mut out = k0_zero(f);
    for (i, c) in v.iter().enumerate().take(f) {
        out[i] = BigRational::from_integer(c.clone());
    }
    out
}

fn kx_mul(a: &[K0], b: &[K0], field: &FieldData) -> Vec<K0> {
    let e = field.e;
    let f = field.f;
    let u = &field.u_poly;
    let mut prod: Vec<K0> = vec![k0_zero(f); 2 * e - 1];
    for (i, x) in a.iter().enumerate() {
        if k0_is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if k0_is_zero(y) {
                continue;
            }
            let t = k0_mul(x, y, u);
            prod[i + j] = k0_add(&prod[i + j], &t);
        }
    }
    // reduce mod e_poly (monic in x)
    for k in (e..prod.len()).rev() {
        if k0_is_zero(&prod[k]) {
            continue;
        }
        let lead = prod[k].clone();
        prod[k] = k0_zero(f);
        for j in 0..e {
            let coef = k0_from_ints(&field.e_poly[j], f);
            let t = k0_mul(&lead, &coef, u);
            prod[k - e + j] = k0_sub(&prod[k - e + j], &t);
        }
    }
    prod.truncate(e);
    prod
}

/// Inverse in the tower via extended Euclid in k0[x] modulo e_poly.
fn kx_inv(a: &[K0], field: &FieldData) -> Option<Vec<K0>> {
    let e = field.e;
    let f = field.f;
    let u = &field.u_poly;
    if a.iter().all(k0_is_zero) {
        return None;
    }
    if e == 1 {
        return k0_inv(&a[0], u).map(|v| vec![v]);
    }
    // polynomials over k0 as Vec<K0>, little-endian
    let trim = |v: &mut Vec<K0>| {
        while v.len() > 1 && k0_is_zero(v.last().unwrap()) {
            v.pop();
        }
    };
    let e_vec: Vec<K0> = field
        .e_poly
        .iter()
        .map(|c| k0_from_ints(c, f))
        .collect();
    let mut r0 = e_vec;
    let mut r1: Vec<K0> = a.to_vec();
    trim(&mut r1);
    let mut s0: Vec<K0> = vec![k0_zero(f)];
    let mut s1: Vec<K0> = vec![{
        let mut one = k0_zero(f);
        one[0] = BigRational::one();
        one
    }];
    while !(r1.len() == 1 && k0_is_zero(&r1[0])) {
        // divide r0 by r1 over the field k0
        let mut rem = r0.clone();
        let dl = r1.last().unwrap();
        let dl_inv = k0_inv(dl, u)?;
        let mut quot: Vec<K0> = vec![k0_zero(f); rem.len().saturating_sub(r1.len()) + 1];
        while rem.len() >= r1.len() && !(rem.len() == 1 && k0_is_zero(&rem[0])) {
            let lead = rem.last().unwrap().clone();
            if k0_is_zero(&lead) {
                rem.pop();
                continue;
            }
            let qc = k0_mul(&lead, &dl_inv, u);
            let pos = rem.len() - r1.len();
            quot[pos] = k0_add(&quot[pos], &qc);
            for (j, c) in r1.iter().enumerate() {
                let t = k0_mul(&qc, c, u);
                rem[pos + j] = k0_sub(&rem[pos + j], &t);
            }
            rem.pop();
            trim(&mut rem);
            if rem.iter().all(k0_is_zero) {
                rem = vec![k0_zero(f)];
                break;
            }
        }
        trim(&mut rem);
        // s_{k+1} = s0 - q s1
        let mut qs: Vec<K0> = vec![k0_zero(f); quot.len() + s1.len() - 1];
        for (i, qc) in quot.iter().enumerate() {
            if k0_is_zero(qc) {
                continue;
            }
            for (j, sc) in s1.iter().enumerate() {
                let t = k0_mul(qc, sc, u);
                qs[i + j] = k0_add(&qs[i + j], &t);
            }
        }
        let n = s0.len().max(qs.len());
        let mut ns: Vec<K0> = vec![k0_zero(f); n];
        for i in 0..n {
            let a0 = s0.get(i).cloned().unwrap_or_else(|| k0_zero(f));
            let b0 = qs.get(i).cloned().unwrap_or_else(|| k0_zero(f));
            ns[i] = k0_sub(&a0, &b0);
        }
        trim(&mut ns);
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = ns;
    }
    // r0 is a nonzero constant gcd
    let c_inv = k0_inv(&r0[0], u)?;
    let mut out = vec![k0_zero(f); e];
    for (i, sc) in s0.iter().enumerate().take(e) {
        out[i] = k0_mul(sc, &c_inv, u);
    }
    Some(out)
}

impl PadicNumber {
    pub fn field(&self) -> &LocalFieldModel {
        &self.field
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    pub fn is_exact_zero(&self) -> bool {
        match &self.repr {
            Repr::Exact(c) => c.iter().all(|row| row.iter().all(|v| v.is_zero())),
            Repr::Capped { .. } => false,
        }
    }

    pub fn exact_coords(&self) -> Option<&Vec<Vec<BigRational>>> {
        match &self.repr {
            Repr::Exact(c) => Some(c),
            Repr::Capped { .. } => None,
        }
    }

    pub fn abs_prec(&self) -> Option<Rational64> {
        match &self.repr {
            Repr::Exact(_) => None,
            Repr::Capped { abs_prec, .. } => Some(*abs_prec),
        }
    }

    fn check_field(&self, other: &PadicNumber) -> Result<(), PadicError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(PadicError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &PadicNumber) -> Result<PadicNumber, PadicError> {
        self.check_field(other)?;
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => {
                let coords = a
                    .iter()
                    .zip(b)
                    .map(|(r1, r2)| k0_add(r1, r2))
                    .collect();
                Ok(PadicNumber {
                    field: self.field.clone(),
                    repr: Repr::Exact(coords),
                })
            }
            _ => {
                let np = self.min_prec(other);
                let a = self.to_capped_at(np)?;
                let b = other.to_capped_at(np)?;
                a.capped_add(&b, false)
            }
        }
    }

    pub fn sub(&self, other: &PadicNumber) -> Result<PadicNumber, PadicError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PadicNumber {
        match &self.repr {
            Repr::Exact(c) => PadicNumber {
                field: self.field.clone(),
                repr: Repr::Exact(c.iter().map(|r| k0_neg(r)).collect()),
            },
            Repr::Capped {
                shift,
                digits,
                coords,
                abs_prec,
            } => {
                let m = self.field.p_big().pow(*digits);
                PadicNumber {
                    field: self.field.clone(),
                    repr: Repr::Capped {
                        shift: *shift,
                        digits: *digits,
                        coords: coords
                            .iter()
                            .map(|r| r.iter().map(|c| (-c).mod_floor(&m)).collect())
                            .collect(),
                        abs_prec: *abs_prec,
                    },
                }
            }
        }
    }

    /// Multiply; exact*exact stays exact, anything capped propagates soundly.
    pub fn mul(&self, other: &PadicNumber) -> PadicNumber {
        self.checked_mul(other).expect("field mismatch")
    }

    pub fn checked_mul(&self, other: &PadicNumber) -> Result<PadicNumber, PadicError> {
        self.check_field(other)?;
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => Ok(PadicNumber {
                field: self.field.clone(),
                repr: Repr::Exact(kx_mul(a, b, &self.field.data)),
            }),
            _ => {
                // sound capped product: min(Na + vb, Nb + va). Each factor
                // is kept at enough digits that its own error times the
                // other's value stays above the target.
                let va = self.val_lower_bound();
                let vb = other.val_lower_bound();
                let na = self.prec_or_inf();
                let nb = other.prec_or_inf();
                let target = rmin(radd(na, vb), radd(nb, va));
                let a = self.to_capped_at(rsub(target, vb))?;
                let b = other.to_capped_at(rsub(target, va))?;
                a.capped_mul(&b, target)
            }
        }
    }

    pub fn scale_exact(&self, c: &BigRational) -> PadicNumber {
        let scalar = self.field.from_rational(c);
        self.mul(&scalar)
    }

    /// Division. Exact over exact is exact; capped uses Hensel inversion of
    /// the unit part of the divisor.
    pub fn div(&self, other: &PadicNumber) -> Result<PadicNumber, PadicError> {
        self.check_field(other)?;
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => {
                let inv = kx_inv(b, &self.field.data).ok_or(PadicError::DivisionByZero)?;
                Ok(PadicNumber {
                    field: self.field.clone(),
                    repr: Repr::Exact(kx_mul(a, &inv, &self.field.data)),
                })
            }
            _ => {
                let vb = match other.valuation() {
                    Valuation::Exact(v) => v,
                    Valuation::AtLeast(_) => return Err(PadicError::PrecisionExhausted),
                };
                let na = self.prec_or_inf();
                let nb = other.prec_or_inf();
                let va = self.val_lower_bound();
                // abs prec of quotient: va - vb + min(na - va, nb - vb)
                let rel = rmin(rsub(na, va), rsub(nb, vb));
                let target = radd(rsub(va, vb), rel);
                // the inverse needs abs prec target - va, the numerator
                // target - v(inverse) = target + vb
                let inv = other.capped_inverse(rsub(target, va))?;
                let a = self.to_capped_at(radd(target, vb))?;
                a.capped_mul(&inv, target)
            }
        }
    }

    /// Exact inverse (exact mode only).
    pub fn inv_exact(&self) -> Result<PadicNumber, PadicError> {
        match &self.repr {
            Repr::Exact(b) => {
                let inv = kx_inv(b, &self.field.data).ok_or(PadicError::DivisionByZero)?;
                Ok(PadicNumber {
                    field: self.field.clone(),
                    repr: Repr::Exact(inv),
                })
            }
            _ => Err(PadicError::NotInGlobalModel),
        }
    }

    pub fn pow(&self, n: u64) -> PadicNumber {
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Valuation with v(p) = 1. Exact zeros are reported as AtLeast(inf cap).
    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Exact(coords) => {
                let e = self.field.data.e as i64;
                let mut best: Option<Rational64> = None;
                for (i, row) in coords.iter().enumerate() {
                    for c in row {
                        if c.is_zero() {
                            continue;
                        }
                        let vp = rat_valuation(c, &self.field.p_big()).unwrap();
                        let v = Rational64::new(vp * e + i as i64, e);
                        best = Some(match best {
                            None => v,
                            Some(b) => b.min(v),
                        });
                    }
                }
                match best {
                    Some(v) => Valuation::Exact(v),
                    None => Valuation::AtLeast(Rational64::from_integer(MAX_PRECISION)),
                }
            }
            Repr::Capped {
                shift,
                digits,
                coords,
                abs_prec,
            } => {
                let e = self.field.data.e as i64;
                let pb = self.field.p_big();
                let mut best: Option<Rational64> = None;
                for (i, row) in coords.iter().enumerate() {
                    for c in row {
                        if c.is_zero() {
                            continue;
                        }
                        let vp = int_valuation(c, &pb).unwrap() as i64;
                        if vp >= *digits as i64 {
                            continue;
                        }
                        let v = Rational64::new((vp + shift) * e + i as i64, e);
                        best = Some(match best {
                            None => v,
                            Some(b) => b.min(v),
                        });
                    }
                }
                match best {
                    Some(v) if v < *abs_prec => Valuation::Exact(v),
                    _ => Valuation::AtLeast(*abs_prec),
                }
            }
        }
    }

    fn val_lower_bound(&self) -> Rational64 {
        match self.valuation() {
            Valuation::Exact(v) => v,
            Valuation::AtLeast(n) => n,
        }
    }

    fn prec_or_inf(&self) -> Rational64 {
        match &self.repr {
            Repr::Exact(_) => Rational64::from_integer(MAX_PRECISION),
            Repr::Capped { abs_prec, .. } => *abs_prec,
        }
    }

    fn min_prec(&self, other: &PadicNumber) -> Rational64 {
        self.prec_or_inf().min(other.prec_or_inf())
    }

    /// Convert to capped mode at absolute precision `n` (v(p) = 1 units).
    pub fn to_capped_at(&self, n: Rational64) -> Result<PadicNumber, PadicError> {
        let n = n.min(Rational64::from_integer(MAX_PRECISION));
        if n.to_integer() > MAX_PRECISION {
            return Err(PadicError::PrecisionCap(n.to_integer()));
        }
        match &self.repr {
            Repr::Exact(coords) => {
                let pb = self.field.p_big();
                // shift = min(0, min coord p-valuation)
                let mut shift = 0i64;
                for row in coords {
                    for c in row {
                        if let Some(v) = rat_valuation(c, &pb) {
                            shift = shift.min(v);
                        }
                    }
                }
                let digits_i = (n.ceil().to_integer() - shift).max(1);
                let digits = digits_i as u32;
                let modulus = pb.pow(digits);
                let mut out = Vec::with_capacity(coords.len());
                for row in coords {
                    let mut orow = Vec::with_capacity(row.len());
                    for c in row {
                        // c * p^{-shift} has nonnegative valuation
                        let scaled = c * BigRational::from_integer(pb.pow((-shift) as u32));
                        orow.push(rat_residue(&scaled, &modulus, &pb));
                    }
                    out.push(orow);
                }
                Ok(PadicNumber {
                    field: self.field.clone(),
                    repr: Repr::Capped {
                        shift,
                        digits,
                        coords: out,
                        abs_prec: n,
                    },
                })
            }
            Repr::Capped {
                shift,
                digits,
                coords,
                abs_prec,
            } => {
                let n = n.min(*abs_prec);
                let digits_needed = (n.ceil().to_integer() - shift).max(1) as u32;
                if digits_needed <= *digits {
                    let modulus = self.field.p_big().pow(digits_needed);
                    Ok(PadicNumber {
                        field: self.field.clone(),
                        repr: Repr::Capped {
                            shift: *shift,
                            digits: digits_needed,
                            coords: coords
                                .iter()
                                .map(|r| r.iter().map(|c| c.mod_floor(&modulus)).collect())
                                .collect(),
                            abs_prec: n,
                        },
                    })
                } else {
                    Ok(PadicNumber {
                        field: self.field.clone(),
                        repr: Repr::Capped {
                            shift: *shift,
                            digits: *digits,
                            coords: coords.clone(),
                            abs_prec: n,
                        },
                    })
                }
            }
        }
    }

    /// Canonical integer lift of a capped element back into exact mode.
    pub fn to_exact_lift(&self) -> PadicNumber {
        match &self.repr {
            Repr::Exact(_) => self.clone(),
            Repr::Capped { shift, coords, .. } => {
                let pb = self.field.p_big();
                let scale = if *shift >= 0 {
                    BigRational::from_integer(pb.pow(*shift as u32))
                } else {
                    BigRational::new(BigInt::one(), pb.pow((-*shift) as u32))
                };
                let out = coords
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|c| BigRational::from_integer(c.clone()) * &scale)
                            .collect()
                    })
                    .collect();
                PadicNumber {
                    field: self.field.clone(),
                    repr: Repr::Exact(out),
                }
            }
        }
    }

    fn capped_parts(&self) -> (&i64, &u32, &Vec<Vec<BigInt>>, &Rational64) {
        match &self.repr {
            Repr::Capped {
                shift,
                digits,
                coords,
                abs_prec,
            } => (shift, digits, coords, abs_prec),
            Repr::Exact(_) => unreachable!("capped_parts on exact"),
        }
    }

    fn capped_add(&self, other: &PadicNumber, _exactish: bool) -> Result<PadicNumber, PadicError> {
        let (s1, d1, c1, n1) = self.capped_parts();
        let (s2, d2, c2, n2) = other.capped_parts();
        let shift = (*s1).min(*s2);
        let n = (*n1).min(*n2);
        let digits = ((n.ceil().to_integer() - shift).max(1) as u32)
            .min((*d1 as i64 + s1 - shift).max(1) as u32)
            .min((*d2 as i64 + s2 - shift).max(1) as u32);
        let pb = self.field.p_big();
        let modulus = pb.pow(digits);
        let m1 = pb.pow((s1 - shift) as u32);
        let m2 = pb.pow((s2 - shift) as u32);
        let mut out = Vec::with_capacity(c1.len());
        for (r1, r2) in c1.iter().zip(c2) {
            let row = r1
                .iter()
                .zip(r2)
                .map(|(a, b)| (a * &m1 + b * &m2).mod_floor(&modulus))
                .collect();
            out.push(row);
        }
        Ok(PadicNumber {
            field: self.field.clone(),
            repr: Repr::Capped {
                shift,
                digits,
                coords: out,
                abs_prec: n,
            },
        })
    }

    fn capped_mul(&self, other: &PadicNumber, target: Rational64) -> Result<PadicNumber, PadicError> {
        let (s1, _d1, c1, _) = self.capped_parts();
        let (s2, _d2, c2, _) = other.capped_parts();
        let shift = s1 + s2;
        let digits = ((target.ceil().to_integer() - shift).max(1)) as u32;
        let pb = self.field.p_big();
        let modulus = pb.pow(digits);
        let out = int_tower_mul(c1, c2, &self.field.data)
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.mod_floor(&modulus)).collect())
            .collect();
        Ok(PadicNumber {
            field: self.field.clone(),
            repr: Repr::Capped {
                shift,
                digits,
                coords: out,
                abs_prec: target,
            },
        })
    }

    /// Hensel inverse of an element with known valuation, to absolute
    /// precision `target` on the inverse. The Newton iteration runs on raw
    /// digit vectors: its quadratic convergence is a Hensel-lemma fact, not
    /// an interval-propagation one.
    fn capped_inverse(&self, target: Rational64) -> Result<PadicNumber, PadicError> {
        let vb = match self.valuation() {
            Valuation::Exact(v) => v,
            Valuation::AtLeast(_) => return Err(PadicError::PrecisionExhausted),
        };
        let e = self.field.data.e as i64;
        let levels = (vb * Rational64::from_integer(e)).to_integer();
        // unit part u = self * inv_x^levels
        let inv_x = self.field.inverse_of_x();
        let mut unit = self.clone();
        for _ in 0..levels.max(0) {
            unit = unit.mul(&inv_x);
        }
        for _ in 0..(-levels).max(0) {
            unit = unit.mul(&self.field.uniformizer());
        }
        // stored-unit accuracy (relative precision of self)
        let unit_prec = rsub(self.prec_or_inf(), vb);
        let needed = radd(target, vb);
        let work = needed.min(unit_prec);
        let digits = work.ceil().to_integer().max(1) as u32;
        let u = unit.to_capped_at(Rational64::from_integer(digits as i64))?;
        let (us, _ud, ucoords, _) = u.capped_parts();
        debug_assert_eq!(*us, 0, "unit must have shift 0");
        let ucoords = ucoords.clone();
        let z0 = u.residue_inverse()?;
        let (_, _, zc, _) = z0.capped_parts();
        let mut z = zc.clone();
        let pb = self.field.p_big();
        let mut k = 1u32;
        while k < digits {
            k = (2 * k).min(digits);
            let modulus = pb.pow(k);
            // z <- z (2 - u z) mod p^k
            let uz = int_tower_mul(&ucoords, &z, &self.field.data);
            let mut corr = uz;
            for row in corr.iter_mut() {
                for c in row.iter_mut() {
                    *c = (-&*c).mod_floor(&modulus);
                }
            }
            corr[0][0] = (&corr[0][0] + BigInt::from(2)).mod_floor(&modulus);
            z = int_tower_mul(&z, &corr, &self.field.data);
            for row in z.iter_mut() {
                for c in row.iter_mut() {
                    *c = c.mod_floor(&modulus);
                }
            }
        }
        let claimed = Rational64::from_integer(digits as i64).min(work);
        let zinv = PadicNumber {
            field: self.field.clone(),
            repr: Repr::Capped {
                shift: 0,
                digits,
                coords: z,
                abs_prec: claimed,
            },
        };
        // self^{-1} = inv_x^levels * unit^{-1}
        let mut out = zinv;
        for _ in 0..levels.max(0) {
            out = out.mul(&inv_x);
        }
        for _ in 0..(-levels).max(0) {
            out = out.mul(&self.field.uniformizer());
        }
        out.to_capped_at(target.min(rsub(claimed, vb)))
    }

    /// Inverse of the residue (unit elements only), lifted as a capped value
    /// with one digit.
    fn residue_inverse(&self) -> Result<PadicNumber, PadicError> {
        let (_, _, coords, _) = self.capped_parts();
        let p = self.field.p();
        let f = self.field.data.f;
        let up: Vec<u64> = self
            .field
            .data
            .u_poly
            .iter()
            .map(|c| c.mod_floor(&self.field.p_big()).to_u64().unwrap())
            .collect();
        // residue = x->0 slice mod p
        let res: Vec<u64> = (0..f)
            .map(|j| {
                coords[0][j]
                    .mod_floor(&self.field.p_big())
                    .to_u64()
                    .unwrap()
            })
            .collect();
        let res = fp_trim(res);
        if res.is_empty() {
            return Err(PadicError::PrecisionExhausted);
        }
        // extended Euclid in F_p[y] mod u
        let inv = fp_ext_inverse(&res, &up, p).ok_or(PadicError::PrecisionExhausted)?;
        let mut coords2 = vec![vec![BigInt::zero(); f]; self.field.data.e];
        for (j, c) in inv.iter().enumerate() {
            coords2[0][j] = big(*c as i64);
        }
        Ok(PadicNumber {
            field: self.field.clone(),
            repr: Repr::Capped {
                shift: 0,
                digits: 1,
                coords: coords2,
                abs_prec: Rational64::from_integer(1),
            },
        })
    }

    /// Reduce an integral element to the residue field, as y-coefficients
    /// mod p. Errors if the element has negative valuation.
    pub fn residue(&self) -> Result<Vec<BigInt>, PadicError> {
        let pb = self.field.p_big();
        match &self.repr {
            Repr::Exact(coords) => {
                if let Valuation::Exact(v) = self.valuation() {
                    if v < Rational64::zero() {
                        return Err(PadicError::BadInput("negative valuation".into()));
                    }
                }
                coords[0]
                    .iter()
                    .map(|c| {
                        if c.denom().is_one() {
                            Ok(c.numer().mod_floor(&pb))
                        } else {
                            let inv = mod_inverse(c.denom(), &pb)
                                .ok_or(PadicError::NotInGlobalModel)?;
                            Ok((c.numer() * inv).mod_floor(&pb))
                        }
                    })
                    .collect()
            }
            Repr::Capped { shift, coords, .. } => {
                if *shift < 0 {
                    return Err(PadicError::BadInput("negative shift".into()));
                }
                if *shift > 0 {
                    return Ok(vec![BigInt::zero(); self.field.data.f]);
                }
                Ok(coords[0].iter().map(|c| c.mod_floor(&pb)).collect())
            }
        }
    }
}

fn rmin(a: Rational64, b: Rational64) -> Rational64 {
    a.min(b)
}
fn radd(a: Rational64, b: Rational64) -> Rational64 {
    (a + b).min(Rational64::from_integer(MAX_PRECISION))
}
fn rsub(a: Rational64, b: Rational64) -> Rational64 {
    a - b
}

/// Residue of a rational with p-unit denominator modulo p^k.
fn rat_residue(c: &BigRational, modulus: &BigInt, _p: &BigInt) -> BigInt {
    if c.denom().is_one() {
        return c.numer().mod_floor(modulus);
    }
    let inv = mod_inverse(c.denom(), modulus).expect("denominator must be a p-unit");
    (c.numer() * inv).mod_floor(modulus)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let eg = a.extended_gcd(m);
    if eg.gcd.is_one() {
        Some(eg.x.mod_floor(m))
    } else {
        None
    }
}

fn fp_ext_inverse(a: &[u64], u: &[u64], p: u64) -> Option<Vec<u64>> {
    if u.len() <= 2 {
        // residue field is F_p
        if a.is_empty() || a[0] % p == 0 {
            return None;
        }
        return Some(vec![fp_inv(a[0], p)]);
    }
    let (mut r0, mut r1) = (u.to_vec(), fp_trim(a.to_vec()));
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (vec![], vec![1]);
    if r1.is_empty() {
        return None;
    }
    while !r1.is_empty() {
        let r = fp_poly_rem(&r0, &r1, p);
        let q = fp_poly_quot(&r0, &r1, p);
        let qs = fp_mul_plain(&q, &s1, p);
        let ns = fp_sub_plain(&s0, &qs, p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
    }
    if r0.len() != 1 {
        return None;
    }
    let inv = fp_inv(r0[0], p);
    Some(fp_trim(s0.iter().map(|&c| ((c as u128 * inv as u128) % p as u128) as u64).collect()))
}

fn fp_poly_quot(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut rem: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    if rem.len() <= db {
        return vec![];
    }
    let lead_inv = fp_inv(*b.last().unwrap(), p);
    let mut quot = vec![0u64; rem.len() - db];
    for i in (db..rem.len()).rev() {
        let lead = ((rem[i] as u128 * lead_inv as u128) % p as u128) as u64;
        if lead == 0 {
            continue;
        }
        quot[i - db] = lead;
        for j in 0..=db {
            let t = (b[j] as u128 * lead as u128) % p as u128;
            rem[i - db + j] = ((rem[i - db + j] as u128 + p as u128 - t) % p as u128) as u64;
        }
    }
    fp_trim(quot)
}

fn fp_mul_plain(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    fp_trim(out)
}

fn fp_sub_plain(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    fp_trim(out)
}

/// Integer tower product (no rational arithmetic), for capped mode.
fn int_tower_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], field: &FieldData) -> Vec<Vec<BigInt>> {
    let e = field.e;
    let f = field.f;
    let mut prod: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); 2 * f - 1]; 2 * e - 1];
    for i1 in 0..e {
        for j1 in 0..f {
            if a[i1][j1].is_zero() {
                continue;
            }
            for i2 in 0..e {
                for j2 in 0..f {
                    if b[i2][j2].is_zero() {
                        continue;
                    }
                    prod[i1 + i2][j1 + j2] += &a[i1][j1] * &b[i2][j2];
                }
            }
        }
    }
    // reduce y-degrees mod u
    for row in prod.iter_mut() {
        let reduced = reduce_mod_u(row, &field.u_poly);
        *row = reduced;
    }
    // reduce x-degrees mod e_poly
    let mut rows = prod;
    for k in (e..rows.len()).rev() {
        let lead = rows[k].clone();
        if lead.iter().all(|c| c.is_zero()) {
            continue;
        }
        rows[k] = vec![BigInt::zero(); f];
        for j in 0..e {
            // lead * e_poly[j] in the unramified ring
            let mut t = vec![BigInt::zero(); 2 * f - 1];
            for (i1, c1) in lead.iter().enumerate() {
                if c1.is_zero() {
                    continue;
                }
                for (i2, c2) in field.e_poly[j].iter().enumerate() {
                    if c2.is_zero() {
                        continue;
                    }
                    t[i1 + i2] += c1 * c2;
                }
            }
            let t = reduce_mod_u(&t, &field.u_poly);
            for (idx, v) in t.iter().enumerate() {
                rows[k - e + j][idx] -= v;
            }
        }
    }
    rows.truncate(e);
    rows
}

impl LocalFieldModel {
    /// Exact inverse of the Eisenstein generator x, from the defining
    /// relation x (x^{e-1} + a_{e-1} x^{e-2} + ... + a_1) = -a_0.
    fn inverse_of_x(&self) -> PadicNumber {
        self.uniformizer().inv_exact().expect("x is nonzero")
    }
}

// ---------------------------------------------------------------------------
// Field operations of the public surface
// ---------------------------------------------------------------------------

/// Teichmueller lift: the unique (q-1)-th root of unity congruent to the
/// nonzero residue r (y-coefficients mod p), to absolute precision n.
pub fn teichmuller(
    field: &LocalFieldModel,
    r: &[BigInt],
    n: i64,
) -> Result<PadicNumber, PadicError> {
    if n < 1 || n > MAX_PRECISION {
        return Err(PadicError::PrecisionCap(n));
    }
    let pb = field.p_big();
    let f = field.f();
    let mut coords = vec![vec![BigInt::zero(); f]; field.e()];
    let mut nonzero = false;
    for (j, c) in r.iter().enumerate().take(f) {
        let v = c.mod_floor(&pb);
        if !v.is_zero() {
            nonzero = true;
        }
        coords[0][j] = v;
    }
    if !nonzero {
        return Err(PadicError::ZeroResidue);
    }
    let prec = Rational64::from_integer(n);
    let mut t = PadicNumber {
        field: field.clone(),
        repr: Repr::Capped {
            shift: 0,
            digits: n as u32,
            coords,
            abs_prec: prec,
        },
    };
    // iterate t -> t^q; stabilizes within n iterations
    let q = field.q();
    for _ in 0..=n {
        let next = capped_pow(&t, &q, prec)?;
        if next == t {
            break;
        }
        t = next;
    }
    Ok(t)
}

fn capped_pow(a: &PadicNumber, e: &BigInt, prec: Rational64) -> Result<PadicNumber, PadicError> {
    let mut acc = a.field().one().to_capped_at(prec)?;
    let mut base = a.to_capped_at(prec)?;
    let bits = e.bits();
    for k in 0..bits {
        if e.bit(k) {
            acc = acc.checked_mul(&base)?.to_capped_at(prec)?;
        }
        if k + 1 < bits {
            base = base.checked_mul(&base)?.to_capped_at(prec)?;
        }
    }
    Ok(acc)
}

/// Exact field norm down to Q_p (a rational number) of a global-model
/// element, via multiplication-matrix determinants in the tower.
pub fn norm_to_qp(a: &PadicNumber) -> Result<BigRational, PadicError> {
    let coords = a.exact_coords().ok_or(PadicError::NotInGlobalModel)?;
    let field = &a.field().data;
    let e = field.e;
    let f = field.f;
    // multiplication matrix over k0 on the basis x^i
    let mut columns: Vec<Vec<K0>> = Vec::with_capacity(e);
    let mut basis = vec![k0_zero(f); e];
    basis[0] = {
        let mut one = k0_zero(f);
        one[0] = BigRational::one();
        one
    };
    for i in 0..e {
        let mut shifted = vec![k0_zero(f); e];
        shifted[i] = basis[0].clone();
        let col = kx_mul(coords, &shifted, field);
        columns.push(col);
    }
    // determinant over k0 by Gaussian elimination
    let mut mat: Vec<Vec<K0>> = (0..e)
        .map(|r| (0..e).map(|c| columns[c][r].clone()).collect())
        .collect();
    let mut det = basis[0].clone(); // one
    let u = &field.u_poly;
    for col in 0..e {
        let pivot = (col..e).find(|&r| !k0_is_zero(&mat[r][col]));
        let Some(pr) = pivot else {
            return Ok(BigRational::zero());
        };
        if pr != col {
            mat.swap(pr, col);
            det = k0_neg(&det);
        }
        let pv = mat[col][col].clone();
        det = k0_mul(&det, &pv, u);
        let pinv = k0_inv(&pv, u).unwrap();
        for r in col + 1..e {
            if k0_is_zero(&mat[r][col]) {
                continue;
            }
            let factor = k0_mul(&mat[r][col], &pinv, u);
            for c in col..e {
                let t = k0_mul(&mat[col][c], &factor, u);
                mat[r][c] = k0_sub(&mat[r][c], &t);
            }
        }
    }
    // now det is Nr_{k/k0}(a) in k0; take the norm down to Q
    Ok(k0_norm(&det, u))
}

fn k0_norm(b: &K0, u: &[BigInt]) -> BigRational {
    let f = u.len() - 1;
    if f == 1 {
        return b[0].clone();
    }
    // det of multiplication-by-b on the basis y^j
    let mut mat: Vec<Vec<BigRational>> = Vec::with_capacity(f);
    for j in 0..f {
        let mut basis = k0_zero(f);
        basis[j] = BigRational::one();
        let col = k0_mul(b, &basis, u);
        mat.push(col);
    }
    // transpose into rows
    let rows: Vec<Vec<BigRational>> = (0..f)
        .map(|r| (0..f).map(|c| mat[c][r].clone()).collect())
        .collect();
    qdet(rows)
}

fn qdet(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(pr) = pivot else {
            return BigRational::zero();
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

/// Exact minimal polynomial over Q of a global-model element, as the
/// squarefree part of the characteristic polynomial of its multiplication
/// matrix on the monomial basis x^i y^j.
pub fn min_poly_global(a: &PadicNumber) -> Result<crate::poly::QPoly, PadicError> {
    let coords = a.exact_coords().ok_or(PadicError::NotInGlobalModel)?;
    let field = &a.field().data;
    let (e, f) = (field.e, field.f);
    let d = e * f;
    let mut mat = crate::qmat::QMat::zero(d);
    for i in 0..e {
        for j in 0..f {
            // column: a * x^i y^j
            let mut basis = vec![vec![BigRational::zero(); f]; e];
            basis[i][j] = BigRational::one();
            let col = kx_mul(coords, &basis, field);
            for (bi, row) in col.iter().enumerate() {
                for (bj, v) in row.iter().enumerate() {
                    mat.rows[bi * f + bj][i * f + j] = v.clone();
                }
            }
        }
    }
    Ok(mat.charpoly().squarefree_part())
}

/// Degree of the Galois closure of k/Q_p. Exact in the tame case via the
/// splitting-field count e * f * ord_e(q); wild cases need an override.
pub fn galois_closure_degree(
    field: &LocalFieldModel,
    override_degree: Option<u64>,
) -> Result<u64, PadicError> {
    if let Some(d) = override_degree {
        return Ok(d);
    }
    let e = field.e() as u64;
    let p = field.p();
    if e == 1 {
        return Ok(field.f() as u64);
    }
    if e % p == 0 {
        return Err(PadicError::WildRamificationNeedsOverride);
    }
    let q_mod_e = {
        let qe = field.q().mod_floor(&big(e as i64));
        qe.to_u64().unwrap()
    };
    let m = mult_order(q_mod_e, e);
    Ok(e * field.f() as u64 * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    fn sqrt2_field() -> LocalFieldModel {
        make_field(
            2,
            &[big(-1), big(1)],
            &[vec![big(-2)], vec![big(0)], vec![big(1)]],
            "Q_2(sqrt2)",
        )
        .unwrap()
    }

    fn unram_q9() -> LocalFieldModel {
        // y^2 + y + 2 is irreducible mod 3 (no roots: 0->2, 1->1, 2->2... 2^2+2+2=8=2)
        make_field(
            3,
            &[big(2), big(1), big(1)],
            &[vec![big(-3), big(0)], vec![big(1)]],
            "Q_9",
        )
        .unwrap()
    }

    #[test]
    fn make_field_validation() {
        assert!(matches!(
            make_field(4, &[big(-1), big(1)], &[vec![big(-4)], vec![big(1)]], "x"),
            Err(PadicError::NotPrime(4))
        ));
        // x^2 - 3 is not Eisenstein at 2
        assert!(matches!(
            make_field(2, &[big(-1), big(1)], &[vec![big(-3)], vec![big(0)], vec![big(1)]], "x"),
            Err(PadicError::NotEisenstein(_))
        ));
        // constant term valuation 2
        assert!(matches!(
            make_field(2, &[big(-1), big(1)], &[vec![big(4)], vec![big(2)], vec![big(1)]], "x"),
            Err(PadicError::NotEisenstein(_))
        ));
        // reducible u mod 3: y^2 - 1
        assert!(matches!(
            make_field(3, &[big(-1), big(0), big(1)], &[vec![big(-3), big(0)], vec![big(1)]], "x"),
            Err(PadicError::NotIrreducibleModP)
        ));
        // valid examples from all three shapes
        assert_eq!(q_p(5).degree(), 1);
        assert_eq!(sqrt2_field().degree(), 2);
        let k = unram_q9();
        assert_eq!((k.e(), k.f()), (1, 2));
        assert_eq!(k.q(), big(9));
    }

    #[test]
    fn exact_arithmetic_and_defining_relation() {
        let k = sqrt2_field();
        let x = k.uniformizer();
        let sq = x.mul(&x);
        assert_eq!(sq, k.from_integer(2));
        // norm of x = -2 = (-1)^e * a0
        assert_eq!(norm_to_qp(&x).unwrap(), rat_int(-2));
        // valuation of x is 1/2
        assert_eq!(x.valuation(), Valuation::Exact(Rational64::new(1, 2)));
    }

    #[test]
    fn division_capped_q5() {
        let k = q_p(5);
        let one = k.one().to_capped_at(Rational64::from_integer(3)).unwrap();
        let two = k.from_integer(2).to_capped_at(Rational64::from_integer(3)).unwrap();
        let half = one.div(&two).unwrap();
        // 1/2 = 63 mod 125 -> digits (3, 2, 2)
        let lift = half.to_exact_lift();
        let c = lift.exact_coords().unwrap()[0][0].clone();
        assert_eq!(c, rat_int(63));
        assert_eq!(half.abs_prec(), Some(Rational64::from_integer(3)));
    }

    #[test]
    fn add_identity_preserves_precision() {
        let k = q_p(5);
        let a = k.from_integer(7).to_capped_at(Rational64::from_integer(4)).unwrap();
        let z = k.zero();
        let s = a.add(&z).unwrap();
        assert_eq!(s.abs_prec(), Some(Rational64::from_integer(4)));
        assert_eq!(s.to_exact_lift().exact_coords().unwrap()[0][0], rat_int(7));
    }

    #[test]
    fn valuations_with_precision() {
        let k = q_p(5);
        assert_eq!(
            k.from_integer(5).valuation(),
            Valuation::Exact(Rational64::from_integer(1))
        );
        let z = k.zero().to_capped_at(Rational64::from_integer(4)).unwrap();
        assert_eq!(z.valuation(), Valuation::AtLeast(Rational64::from_integer(4)));
        // exact rational with denominator 5
        let fifth = k.from_rational(&rat(1, 5));
        assert_eq!(fifth.valuation(), Valuation::Exact(Rational64::from_integer(-1)));
    }

    #[test]
    fn teichmuller_values() {
        let k = q_p(5);
        let t = teichmuller(&k, &[big(2)], 2).unwrap();
        let c = t.to_exact_lift().exact_coords().unwrap()[0][0].clone();
        assert_eq!(c, rat_int(7)); // 2^5 = 32 = 7 mod 25, 7^4 = 1 mod 25
        let one = teichmuller(&k, &[big(1)], 6).unwrap();
        assert_eq!(one.to_exact_lift().exact_coords().unwrap()[0][0], rat_int(1));
        assert!(matches!(
            teichmuller(&k, &[big(0)], 3),
            Err(PadicError::ZeroResidue)
        ));
        // q = 2: trivial residue group
        let k2 = q_p(2);
        let o = teichmuller(&k2, &[big(1)], 5).unwrap();
        assert_eq!(o.to_exact_lift().exact_coords().unwrap()[0][0], rat_int(1));
    }

    #[test]
    fn teichmuller_in_unramified_field() {
        let k = unram_q9();
        let t = teichmuller(&k, &[big(0), big(1)], 3).unwrap();
        // t^(q-1) = 1 at precision 3
        let pow = capped_pow(&t, &big(8), Rational64::from_integer(3)).unwrap();
        let one = k.one().to_capped_at(Rational64::from_integer(3)).unwrap();
        assert_eq!(pow, one);
    }

    #[test]
    fn norms() {
        // norm of pi in Q_5 with e_poly = x - 5
        let k = q_p(5);
        assert_eq!(norm_to_qp(&k.uniformizer()).unwrap(), rat_int(5));
        // norm of x - 30 model
        let k30 = make_field(
            5,
            &[big(-1), big(1)],
            &[vec![big(-30)], vec![big(1)]],
            "Q_5(pi=30)",
        )
        .unwrap();
        assert_eq!(norm_to_qp(&k30.uniformizer()).unwrap(), rat_int(30));
        // multiplicativity spot check in the ramified quadratic
        let k2 = sqrt2_field();
        let a = k2.from_poly_expr(&[vec![rat_int(1)], vec![rat_int(1)]]); // 1 + x
        let b = k2.from_poly_expr(&[vec![rat_int(3)], vec![rat_int(2)]]); // 3 + 2x
        let nab = norm_to_qp(&a.mul(&b)).unwrap();
        assert_eq!(nab, norm_to_qp(&a).unwrap() * norm_to_qp(&b).unwrap());
    }

    #[test]
    fn galois_closure_degrees() {
        assert_eq!(galois_closure_degree(&q_p(7), None).unwrap(), 1);
        // wild: Q_2(sqrt 2)
        assert!(matches!(
            galois_closure_degree(&sqrt2_field(), None),
            Err(PadicError::WildRamificationNeedsOverride)
        ));
        assert_eq!(galois_closure_degree(&sqrt2_field(), Some(2)).unwrap(), 2);
        // tame: Q_5(5^(1/3)), ord of 5 mod 3 = 2 -> 6
        let k = make_field(
            5,
            &[big(-1), big(1)],
            &[vec![big(-5)], vec![big(0)], vec![big(0)], vec![big(1)]],
            "Q_5(cbrt5)",
        )
        .unwrap();
        assert_eq!(galois_closure_degree(&k, None).unwrap(), 6);
        // unramified quadratic is already Galois
        assert_eq!(galois_closure_degree(&unram_q9(), None).unwrap(), 2);
    }

    #[test]
    fn exact_inverse_in_tower() {
        let k = unram_q9();
        let y = k.unramified_generator();
        let a = y.add(&k.from_integer(1)).unwrap();
        let inv = a.inv_exact().unwrap();
        assert_eq!(a.mul(&inv), k.one());
        let k2 = sqrt2_field();
        let b = k2.uniformizer().add(&k2.from_integer(1)).unwrap();
        assert_eq!(b.mul(&b.inv_exact().unwrap()), k2.one());
    }

    #[test]
    fn capped_roundtrip_mod_pn() {
        let k = sqrt2_field();
        let a = k.from_poly_expr(&[vec![rat(7, 3)], vec![rat_int(5)]]);
        let capped = a.to_capped_at(Rational64::from_integer(4)).unwrap();
        let back = capped.to_exact_lift();
        let diff = a.sub(&back).unwrap();
        match diff.valuation() {
            Valuation::Exact(v) => assert!(v >= Rational64::from_integer(4)),
            Valuation::AtLeast(v) => assert!(v >= Rational64::from_integer(4)),
        }
    }
}
