//! Factorization of rational polynomials into irreducibles over Q.
//!
//! Desk-scale Zassenhaus: squarefree split, factor modulo a good odd prime
//! by Cantor-Zassenhaus, Hensel lift past the Landau-Mignotte bound, then
//! subset recombination. Degrees are capped well below anything that would
//! make the subset search bite.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::is_prime_u64;
use crate::poly::QPoly;

/// Irreducible monic factors of a nonzero rational polynomial, with
/// multiplicities, sorted by (degree, coefficient vector).
pub fn factor_rational(f: &QPoly) -> Vec<(QPoly, u32)> {
    assert!(!f.is_zero());
    if f.deg() == 0 {
        return vec![];
    }
    let mut out: Vec<(QPoly, u32)> = Vec::new();
    // pull off content of x
    let mut g = f.monic();
    let mut x_mult = 0u32;
    while g.coeff(0).is_zero() {
        g = g.div_exact(&QPoly::x());
        x_mult += 1;
    }
    if x_mult > 0 {
        out.push((QPoly::x(), x_mult));
    }
    if g.deg() >= 1 {
        for (part, mult) in squarefree_decomposition(&g) {
            for irr in factor_squarefree(&part) {
                out.push((irr, mult));
            }
        }
    }
    out.sort_by(|a, b| cmp_poly(&a.0, &b.0));
    out
}

/// True iff the polynomial is irreducible over Q (degree >= 1).
pub fn is_irreducible(f: &QPoly) -> bool {
    if f.is_zero() || f.deg() == 0 {
        return false;
    }
    if f.deg() == 1 {
        return true;
    }
    let factors = factor_rational(f);
    factors.len() == 1 && factors[0].1 == 1
}

pub fn cmp_poly(a: &QPoly, b: &QPoly) -> std::cmp::Ordering {
    a.deg()
        .cmp(&b.deg())
        .then_with(|| a.coeffs.cmp(&b.coeffs))
}

/// Yun's squarefree decomposition of a monic polynomial with no root at 0.
fn squarefree_decomposition(f: &QPoly) -> Vec<(QPoly, u32)> {
    let mut out = Vec::new();
    let df = f.derivative();
    let mut a = f.gcd(&df);
    let mut b = f.div_exact(&a);
    let mut c = df.div_exact(&a);
    let mut i = 1u32;
    loop {
        let d = c.sub(&b.derivative());
        if b.deg() == 0 {
            break;
        }
        a = b.gcd(&d);
        if a.deg() >= 1 {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a);
        c = d.div_exact(&a);
        i += 1;
    }
    out
}

fn factor_squarefree(f: &QPoly) -> Vec<QPoly> {
    let ints = f.primitive_integer();
    let n = ints.len() - 1;
    if n == 1 {
        return vec![f.monic()];
    }
    // choose an odd prime keeping f squarefree with unit leading coefficient
    let mut p = 3u64;
    let (fp, prime) = loop {
        if is_prime_u64(p) {
            if let Some(fp) = FpPoly::from_bigints(&ints, p) {
                if fp.deg() == n && fp.gcd(&fp.derivative()).deg() == 0 {
                    break (fp.monic(), p);
                }
            }
        }
        p += 2;
        assert!(p < 100_000, "no good factorization prime found");
    };
    let modular = fp.factor_cantor_zassenhaus();
    if modular.len() == 1 {
        return vec![f.monic()];
    }
    // Hensel lift to exceed twice the Landau-Mignotte factor bound times lc
    let lc = ints[n].clone();
    let bound: BigInt = landau_mignotte(&ints) * 2 * lc.abs() + 1;
    let mut modulus = BigInt::from(prime);
    let mut k = 1u32;
    while modulus < bound {
        modulus = &modulus * BigInt::from(prime);
        k += 1;
    }
    let lifted = hensel_lift_tree(&ints, &modular, prime, k);
    recombine(&ints, &lifted, &modulus)
}

/// Landau-Mignotte bound on the coefficients of any monic-scaled factor.
fn landau_mignotte(ints: &[BigInt]) -> BigInt {
    let n = (ints.len() - 1) as u32;
    let norm2_sq: BigInt = ints.iter().map(|c| c * c).sum();
    let norm2 = norm2_sq.sqrt() + 1;
    (BigInt::one() << (n + 1)) * norm2
}

fn recombine(ints: &[BigInt], lifted: &[Vec<BigInt>], modulus: &BigInt) -> Vec<QPoly> {
    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut current = ints.to_vec();
    let mut out = Vec::new();
    let mut card = 1usize;
    'outer: while 2 * card <= remaining.len() {
        let subsets = subsets_of(&remaining, card);
        for s in subsets {
            let lc = current.last().unwrap().clone();
            let mut prod = vec![lc.mod_floor(modulus)];
            for &i in &s {
                prod = zmul_mod(&prod, &lifted[i], modulus);
            }
            let cand = symmetric_primitive(&prod, modulus);
            if let Some(quot) = zdiv_exact(&current, &cand) {
                out.push(qpoly_from_bigints(&cand));
                current = quot;
                remaining.retain(|i| !s.contains(i));
                continue 'outer;
            }
        }
        card += 1;
    }
    if current.len() > 1 {
        out.push(qpoly_from_bigints(&current));
    }
    out
}

fn qpoly_from_bigints(c: &[BigInt]) -> QPoly {
    QPoly::from_bigints(c).monic()
}

fn subsets_of(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn zmul_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (&out[i + j] + x * y).mod_floor(m);
        }
    }
    out
}

/// Reduce into (-m/2, m/2] and take the primitive part.
fn symmetric_primitive(c: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    let sym: Vec<BigInt> = c
        .iter()
        .map(|x| {
            let r = x.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect();
    let mut content = BigInt::zero();
    for x in &sym {
        content = content.gcd(x);
    }
    if content.is_zero() {
        return sym;
    }
    if sym.last().unwrap().is_negative() {
        content = -content;
    }
    sym.iter().map(|x| x / &content).collect()
}

/// Exact division of integer polynomials; `None` if not divisible.
fn zdiv_exact(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    if den.len() > num.len() || den.last().unwrap().is_zero() {
        return None;
    }
    let mut rem: Vec<BigInt> = num.to_vec();
    let dl = den.last().unwrap();
    let mut quot = vec![BigInt::zero(); num.len() - den.len() + 1];
    for i in (den.len() - 1..num.len()).rev() {
        let (q, r) = rem[i].div_rem(dl);
        if !r.is_zero() {
            return None;
        }
        if q.is_zero() {
            continue;
        }
        quot[i - (den.len() - 1)] = q.clone();
        for (j, d) in den.iter().enumerate() {
            let idx = i - (den.len() - 1) + j;
            rem[idx] = &rem[idx] - d * &q;
        }
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Arithmetic in F_p[x], p odd < 2^31
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug)]
struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    fn from_bigints(ints: &[BigInt], p: u64) -> Option<FpPoly> {
        let pb = BigInt::from(p);
        let c: Vec<u64> = ints
            .iter()
            .map(|x| x.mod_floor(&pb).to_u64().unwrap())
            .collect();
        let mut f = FpPoly { p, c };
        f.normalize();
        if f.c.is_empty() {
            None
        } else {
            Some(f)
        }
    }

    fn zero(p: u64) -> FpPoly {
        FpPoly { p, c: vec![] }
    }

    fn xpoly(p: u64) -> FpPoly {
        FpPoly { p, c: vec![0, 1] }
    }

    fn constant(p: u64, v: u64) -> FpPoly {
        let mut f = FpPoly { p, c: vec![v % p] };
        f.normalize();
        f
    }

    fn normalize(&mut self) {
        while matches!(self.c.last(), Some(0)) {
            self.c.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn deg(&self) -> usize {
        if self.c.is_empty() {
            0
        } else {
            self.c.len() - 1
        }
    }

    #[allow(dead_code)]
    fn add(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let mut c = vec![0u64; n];
        for i in 0..n {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = o.c.get(i).copied().unwrap_or(0);
            c[i] = (a + b) % self.p;
        }
        let mut f = FpPoly { p: self.p, c };
        f.normalize();
        f
    }

    fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let mut c = vec![0u64; n];
        for i in 0..n {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = o.c.get(i).copied().unwrap_or(0);
            c[i] = (a + self.p - b) % self.p;
        }
        let mut f = FpPoly { p: self.p, c };
        f.normalize();
        f
    }

    fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = ((c[i + j] as u128 + a as u128 * b as u128) % self.p as u128) as u64;
            }
        }
        let mut f = FpPoly { p: self.p, c };
        f.normalize();
        f
    }

    fn scale(&self, s: u64) -> FpPoly {
        let mut c = self.c.clone();
        for v in &mut c {
            *v = ((*v as u128 * s as u128) % self.p as u128) as u64;
        }
        let mut f = FpPoly { p: self.p, c };
        f.normalize();
        f
    }

    fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = mod_inv(*self.c.last().unwrap(), self.p);
        self.scale(inv)
    }

    fn div_rem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero());
        if self.deg() < d.deg() || self.is_zero() {
            return (FpPoly::zero(self.p), self.clone());
        }
        let p = self.p;
        let mut rem = self.c.clone();
        let dl_inv = mod_inv(*d.c.last().unwrap(), p);
        let mut quot = vec![0u64; rem.len() - d.c.len() + 1];
        for i in (d.c.len() - 1..rem.len()).rev() {
            let q = ((rem[i] as u128 * dl_inv as u128) % p as u128) as u64;
            if q == 0 {
                continue;
            }
            quot[i - (d.c.len() - 1)] = q;
            for (j, &dc) in d.c.iter().enumerate() {
                let idx = i - (d.c.len() - 1) + j;
                let t = (dc as u128 * q as u128) % p as u128;
                rem[idx] = ((rem[idx] as u128 + p as u128 - t) % p as u128) as u64;
            }
        }
        let mut qf = FpPoly { p, c: quot };
        qf.normalize();
        let mut rf = FpPoly { p, c: rem };
        rf.normalize();
        (qf, rf)
    }

    fn rem(&self, d: &FpPoly) -> FpPoly {
        self.div_rem(d).1
    }

    fn gcd(&self, o: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    fn derivative(&self) -> FpPoly {
        if self.c.len() <= 1 {
            return FpPoly::zero(self.p);
        }
        let c = self.c[1..]
            .iter()
            .enumerate()
            .map(|(i, &v)| ((v as u128 * ((i as u64 + 1) % self.p) as u128) % self.p as u128) as u64)
            .collect();
        let mut f = FpPoly { p: self.p, c };
        f.normalize();
        f
    }

    fn pow_mod(&self, e: &BigUint, m: &FpPoly) -> FpPoly {
        let mut acc = FpPoly::constant(self.p, 1);
        let mut base = self.rem(m);
        for bit in (0..e.bits()).map(|i| e.bit(i)) {
            if bit {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
        }
        acc
    }

    /// Monic irreducible factors of a squarefree monic polynomial.
    fn factor_cantor_zassenhaus(&self) -> Vec<FpPoly> {
        let p = self.p;
        let mut out = Vec::new();
        // distinct-degree
        let mut rest = self.clone();
        let mut h = FpPoly::xpoly(p);
        let pb = BigUint::from(p);
        let mut d = 0usize;
        let mut stages: Vec<(FpPoly, usize)> = Vec::new();
        while rest.deg() >= 1 {
            d += 1;
            if 2 * d > rest.deg() {
                stages.push((rest.clone(), rest.deg()));
                break;
            }
            h = h.pow_mod(&pb, &rest);
            let g = h.sub(&FpPoly::xpoly(p)).gcd(&rest);
            if g.deg() >= 1 {
                stages.push((g.clone(), d));
                rest = rest.div_rem(&g).0;
                h = h.rem(&rest);
            }
        }
        // equal-degree split
        let mut rng = XorShift::new(0x5eed_cafe_f00d_1234);
        for (prod, d) in stages {
            split_equal_degree(&prod, d, &mut rng, &mut out);
        }
        out.sort_by(|a, b| a.deg().cmp(&b.deg()).then_with(|| a.c.cmp(&b.c)));
        out
    }
}

fn split_equal_degree(f: &FpPoly, d: usize, rng: &mut XorShift, out: &mut Vec<FpPoly>) {
    if f.deg() == d {
        out.push(f.monic());
        return;
    }
    let p = f.p;
    // exponent (p^d - 1) / 2
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    loop {
        let a = FpPoly {
            p,
            c: (0..f.deg()).map(|_| rng.next() % p).collect(),
        };
        let mut a = a;
        a.normalize();
        if a.deg() < 1 && a.is_zero() {
            continue;
        }
        let g0 = a.gcd(f);
        let g = if g0.deg() >= 1 && g0.deg() < f.deg() {
            g0
        } else {
            let b = a.pow_mod(&e, f).sub(&FpPoly::constant(p, 1));
            let g = b.gcd(f);
            if g.deg() < 1 || g.deg() == f.deg() {
                continue;
            }
            g
        };
        let rest = f.div_rem(&g).0;
        split_equal_degree(&g, d, rng, out);
        split_equal_degree(&rest, d, rng, out);
        return;
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // extended Euclid
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "not invertible");
    (t.rem_euclid(p as i128)) as u64
}

struct XorShift(u64);

impl XorShift {
    fn new(seed: u64) -> Self {
        XorShift(seed.max(1))
    }
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }
}

// ---------------------------------------------------------------------------
// Hensel lifting
// ---------------------------------------------------------------------------

/// Lift the monic mod-p factors of (lc^-1 * f) to mod p^k, binary-tree style.
/// Returns factors as integer coefficient vectors mod p^k.
fn hensel_lift_tree(ints: &[BigInt], factors: &[FpPoly], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let modulus = BigInt::from(p).pow(k);
    let lc = &ints[ints.len() - 1];
    let lc_inv = big_mod_inv(lc, &modulus);
    let target: Vec<BigInt> = ints
        .iter()
        .map(|c| (c * &lc_inv).mod_floor(&modulus))
        .collect();
    let mods: Vec<Vec<BigInt>> = factors
        .iter()
        .map(|f| f.c.iter().map(|&c| BigInt::from(c)).collect())
        .collect();
    lift_split(&target, &mods, p, k)
}

fn lift_split(target: &[BigInt], factors: &[Vec<BigInt>], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    if factors.len() == 1 {
        return vec![target.to_vec()];
    }
    let mid = factors.len() / 2;
    let pbig = BigInt::from(p);
    let g0 = prod_mod(&factors[..mid], &pbig);
    let h0 = prod_mod(&factors[mid..], &pbig);
    let (g, h) = hensel_lift_pair(target, &g0, &h0, p, k);
    let mut out = lift_split(&g, &factors[..mid], p, k);
    out.extend(lift_split(&h, &factors[mid..], p, k));
    out
}

fn prod_mod(fs: &[Vec<BigInt>], m: &BigInt) -> Vec<BigInt> {
    let mut acc = vec![BigInt::one()];
    for f in fs {
        acc = zmul_mod(&acc, f, m);
    }
    acc
}

/// Quadratic two-factor Hensel: from f = g h (mod p), both monic, to mod p^k.
fn hensel_lift_pair(
    f: &[BigInt],
    g0: &[BigInt],
    h0: &[BigInt],
    p: u64,
    k: u32,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let pbig = BigInt::from(p);
    // Bezout: s g + t h = 1 mod p
    let (s0, t0) = bezout_mod_p(g0, h0, p);
    let mut g = g0.to_vec();
    let mut h = h0.to_vec();
    let mut s = s0;
    let mut t = t0;
    let mut prec = 1u32;
    let mut m = pbig.clone();
    while prec < k {
        let m2 = (&m * &m).min(BigInt::from(p).pow(k.min(prec * 2)));
        let next_prec = (prec * 2).min(k);
        let m2 = if next_prec == k {
            BigInt::from(p).pow(k)
        } else {
            m2
        };
        // e = f - g h mod m^2
        let gh = zmul(&g, &h);
        let e = zsub_mod(f, &gh, &m2);
        // q, r = divrem(s e, h)  (h monic)
        let se = zmul_mod_vec(&s, &e, &m2);
        let (q, r) = zdivrem_monic_mod(&se, &h, &m2);
        // g* = g + t e + q g ; h* = h + r
        let te = zmul_mod_vec(&t, &e, &m2);
        let qg = zmul_mod_vec(&q, &g, &m2);
        g = zadd_mod(&zadd_mod(&g, &te, &m2), &qg, &m2);
        h = zadd_mod(&h, &r, &m2);
        // refresh Bezout: b = s g + t h - 1
        let sg = zmul_mod_vec(&s, &g, &m2);
        let th = zmul_mod_vec(&t, &h, &m2);
        let mut b = zadd_mod(&sg, &th, &m2);
        if b.is_empty() {
            b = vec![BigInt::zero()];
        }
        b[0] -= BigInt::one();
        b[0] = b[0].mod_floor(&m2);
        let sb = zmul_mod_vec(&s, &b, &m2);
        let (c, d) = zdivrem_monic_mod(&sb, &h, &m2);
        s = zsub_mod(&s, &d, &m2);
        let tb = zmul_mod_vec(&t, &b, &m2);
        let cg = zmul_mod_vec(&c, &g, &m2);
        t = zsub_mod(&zsub_mod(&t, &tb, &m2), &cg, &m2);
        m = m2;
        prec = next_prec;
    }
    (g, h)
}

fn bezout_mod_p(g: &[BigInt], h: &[BigInt], p: u64) -> (Vec<BigInt>, Vec<BigInt>) {
    let gp = FpPoly::from_bigints(g, p).unwrap();
    let hp = FpPoly::from_bigints(h, p).unwrap();
    // extended Euclid over F_p[x]
    let (mut r0, mut r1) = (gp.clone(), hp.clone());
    let one = FpPoly::constant(p, 1);
    let zero = FpPoly::zero(p);
    let (mut s0, mut s1) = (one.clone(), zero.clone());
    let (mut t0, mut t1) = (zero, one);
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let ns = s0.sub(&q.mul(&s1));
        let nt = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = ns;
        t0 = t1;
        t1 = nt;
    }
    // r0 = gcd = constant (coprime); normalize to 1
    assert!(r0.deg() == 0 && !r0.is_zero(), "factors not coprime mod p");
    let inv = mod_inv(r0.c[0], p);
    let s = s0.scale(inv);
    let t = t0.scale(inv);
    (
        s.c.iter().map(|&c| BigInt::from(c)).collect(),
        t.c.iter().map(|&c| BigInt::from(c)).collect(),
    )
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn zmul_mod_vec(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    zmul_mod(a, b, m)
}

fn zadd_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out[i] = (x + y).mod_floor(m);
    }
    trim(out)
}

fn zsub_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        out[i] = (x - y).mod_floor(m);
    }
    trim(out)
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while matches!(v.last(), Some(c) if c.is_zero()) {
        v.pop();
    }
    v
}

/// Division with remainder by a monic polynomial, coefficients mod m.
fn zdivrem_monic_mod(num: &[BigInt], den: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    if num.len() < den.len() {
        return (vec![], num.to_vec());
    }
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - den.len() + 1];
    for i in (den.len() - 1..num.len()).rev() {
        let q = rem[i].clone();
        if q.is_zero() {
            continue;
        }
        quot[i - (den.len() - 1)] = q.clone();
        for (j, d) in den.iter().enumerate() {
            let idx = i - (den.len() - 1) + j;
            rem[idx] = (&rem[idx] - d * &q).mod_floor(m);
        }
    }
    (trim(quot), trim(rem))
}

fn big_mod_inv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "leading coefficient not invertible");
    e.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::cyclotomic;

    fn p(cs: &[i64]) -> QPoly {
        QPoly::from_ints(cs)
    }

    #[test]
    fn factors_products_of_cyclotomics() {
        // x^12 - 1 = prod of cyclotomic(d) for d | 12
        let mut cs = vec![crate::arith::rat_int(0); 13];
        cs[0] = crate::arith::rat_int(-1);
        cs[12] = crate::arith::rat_int(1);
        let f = QPoly::from_coeffs(cs);
        let factors = factor_rational(&f);
        assert_eq!(factors.len(), 6);
        for d in [1u64, 2, 3, 4, 6, 12] {
            assert!(factors.iter().any(|(g, m)| *m == 1 && *g == cyclotomic(d)));
        }
    }

    #[test]
    fn factors_with_multiplicity() {
        let f = p(&[1, 1]).mul(&p(&[1, 1])).mul(&p(&[2, 0, 1]));
        let factors = factor_rational(&f);
        assert_eq!(factors.len(), 2);
        assert!(factors.contains(&(p(&[1, 1]), 2)));
        assert!(factors.contains(&(p(&[2, 0, 1]), 1)));
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&p(&[2, -2, 1])));
        assert!(is_irreducible(&p(&[-2, 0, 1])));
        assert!(is_irreducible(&p(&[3, -1, 1])));
        assert!(!is_irreducible(&p(&[-1, 0, 1])));
        assert!(!is_irreducible(&p(&[1, 2, 1])));
        // Eisenstein quintic
        assert!(is_irreducible(&p(&[2, 2, 0, 0, 0, 1])));
        // degree 7 with a linear factor
        assert!(!is_irreducible(&p(&[0, 2, 0, 0, 0, 0, 0, 1])));
    }

    #[test]
    fn rational_coefficients_are_handled() {
        // (x - 1/2)(x + 3) scaled
        let f = QPoly::from_coeffs(vec![
            crate::arith::rat(-3, 2),
            crate::arith::rat(5, 2),
            crate::arith::rat(1, 1),
        ]);
        let factors = factor_rational(&f);
        assert_eq!(factors.len(), 2);
        assert!(factors
            .iter()
            .any(|(g, _)| *g == QPoly::from_coeffs(vec![crate::arith::rat(-1, 2), crate::arith::rat(1, 1)])));
    }

    #[test]
    fn big_irreducible_stays_whole() {
        // Swinnerton-Dyer-ish: minimal polynomial of sqrt2 + sqrt3
        let f = p(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&f));
    }
}
