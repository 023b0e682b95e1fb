//! Truncated formal power series in one and two variables over a
//! `LocalFieldModel`, with exact coefficients.
//!
//! Truncation is by total degree with a single order D per object; terms of
//! total degree > D are discarded and mixed-order operations truncate to the
//! minimum. Coefficient storage is sparse.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

use crate::padic::{LocalFieldModel, PadicError, PadicNumber, Valuation};

pub const DEFAULT_TRUNC: u32 = 12;
pub const MAX_TRUNC: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series belong to different field models")]
    FieldMismatch,
    #[error("inner series must have zero constant term")]
    NonzeroConstantTerm,
    #[error("linear coefficient must be a unit")]
    NonUnitLinearTerm,
    #[error("evaluation point must lie in the maximal ideal")]
    NotInMaximalIdeal,
    #[error("series has non-integral coefficients")]
    NonIntegralCoefficients,
    #[error("truncation order {0} exceeds the cap {MAX_TRUNC}")]
    TruncationCap(u32),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Univariate truncated series.
#[derive(Clone, Debug, PartialEq)]
pub struct Series1 {
    field: LocalFieldModel,
    trunc: u32,
    coeffs: BTreeMap<u32, PadicNumber>,
}

/// Bivariate truncated series (total degree).
#[derive(Clone, Debug, PartialEq)]
pub struct Series2 {
    field: LocalFieldModel,
    trunc: u32,
    coeffs: BTreeMap<(u32, u32), PadicNumber>,
}

impl Series1 {
    pub fn zero(field: &LocalFieldModel, trunc: u32) -> Result<Self, SeriesError> {
        if trunc > MAX_TRUNC {
            return Err(SeriesError::TruncationCap(trunc));
        }
        Ok(Series1 {
            field: field.clone(),
            trunc,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn x(field: &LocalFieldModel, trunc: u32) -> Result<Self, SeriesError> {
        let mut s = Series1::zero(field, trunc)?;
        s.set(1, field.one());
        Ok(s)
    }

    pub fn from_terms(
        field: &LocalFieldModel,
        trunc: u32,
        terms: Vec<(u32, PadicNumber)>,
    ) -> Result<Self, SeriesError> {
        let mut s = Series1::zero(field, trunc)?;
        for (k, c) in terms {
            if c.field() != field {
                return Err(SeriesError::FieldMismatch);
            }
            s.set(k, c);
        }
        Ok(s)
    }

    pub fn field(&self) -> &LocalFieldModel {
        &self.field
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn coeff(&self, k: u32) -> PadicNumber {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &PadicNumber)> {
        self.coeffs.iter()
    }

    pub fn set(&mut self, k: u32, c: PadicNumber) {
        if k > self.trunc || c.is_exact_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest stored exponent.
    pub fn top_degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    fn check(&self, other: &Series1) -> Result<u32, SeriesError> {
        if self.field != other.field {
            return Err(SeriesError::FieldMismatch);
        }
        Ok(self.trunc.min(other.trunc))
    }

    pub fn add(&self, other: &Series1) -> Result<Series1, SeriesError> {
        let t = self.check(other)?;
        let mut out = Series1::zero(&self.field, t)?;
        for (&k, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if k > t {
                continue;
            }
            let cur = out.coeff(k);
            out.set(k, cur.add(c)?);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series1) -> Result<Series1, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series1 {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn mul(&self, other: &Series1) -> Result<Series1, SeriesError> {
        let t = self.check(other)?;
        let mut out = Series1::zero(&self.field, t)?;
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                if i + j > t {
                    continue;
                }
                let cur = out.coeff(i + j);
                out.set(i + j, cur.add(&a.mul(b))?);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &PadicNumber) -> Series1 {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = v.mul(c);
        }
        let keys: Vec<u32> = out.coeffs.keys().copied().collect();
        for k in keys {
            if out.coeffs[&k].is_exact_zero() {
                out.coeffs.remove(&k);
            }
        }
        out
    }

    /// Composition f(g); g must have zero constant term.
    pub fn compose(&self, g: &Series1) -> Result<Series1, SeriesError> {
        let t = self.check(g)?;
        if !g.coeff(0).is_exact_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let mut acc = Series1::zero(&self.field, t)?;
        let top = self.top_degree().unwrap_or(0);
        for k in (0..=top).rev() {
            acc = acc.mul(g)?;
            let c = self.coeff(k);
            if !c.is_exact_zero() {
                let cur = acc.coeff(0);
                acc.set(0, cur.add(&c)?);
            }
        }
        Ok(acc)
    }

    /// Compositional inverse: the unique g with f(g) = g(f) = X through the
    /// truncation order. Requires f(0) = 0 and a unit linear coefficient.
    pub fn invert(&self) -> Result<Series1, SeriesError> {
        if !self.coeff(0).is_exact_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let f1 = self.coeff(1);
        match f1.valuation() {
            Valuation::Exact(v) if v == Rational64::zero() => {}
            _ => return Err(SeriesError::NonUnitLinearTerm),
        }
        let f1_inv = f1.inv_exact()?;
        let t = self.trunc;
        let mut g = Series1::zero(&self.field, t)?;
        g.set(1, f1_inv.clone());
        for n in 2..=t {
            // coefficient of X^n in f(g_{<n})
            let comp = self.compose(&g)?;
            let excess = comp.coeff(n);
            if excess.is_exact_zero() {
                continue;
            }
            g.set(n, excess.neg().mul(&f1_inv));
        }
        Ok(g)
    }

    /// Evaluate at a point of positive valuation with integral coefficients.
    /// The reported precision is min(target, (D+1) v(x)), the truncation
    /// tail bound.
    pub fn evaluate(&self, x: &PadicNumber, target: i64) -> Result<PadicNumber, SeriesError> {
        if x.field() != &self.field {
            return Err(SeriesError::FieldMismatch);
        }
        let vx = match x.valuation() {
            Valuation::Exact(v) => v,
            Valuation::AtLeast(v) => v,
        };
        if vx <= Rational64::zero() {
            return Err(SeriesError::NotInMaximalIdeal);
        }
        for c in self.coeffs.values() {
            if let Valuation::Exact(v) = c.valuation() {
                if v < Rational64::zero() {
                    return Err(SeriesError::NonIntegralCoefficients);
                }
            }
        }
        let tail = Rational64::from_integer(self.trunc as i64 + 1) * vx;
        let reported = Rational64::from_integer(target).min(tail);
        // Horner over the stored terms
        let top = self.top_degree().unwrap_or(0);
        let mut acc = self.field.zero();
        for k in (0..=top).rev() {
            acc = acc.mul(x);
            let c = self.coeff(k);
            if !c.is_exact_zero() {
                acc = acc.add(&c)?;
            }
        }
        Ok(acc.to_capped_at(reported)?)
    }

    /// Embed X -> X (bivariate), keeping the truncation order.
    pub fn embed_x(&self) -> Series2 {
        let mut out = Series2 {
            field: self.field.clone(),
            trunc: self.trunc,
            coeffs: BTreeMap::new(),
        };
        for (&k, c) in &self.coeffs {
            out.coeffs.insert((k, 0), c.clone());
        }
        out
    }

    /// Embed X -> Y (bivariate).
    pub fn embed_y(&self) -> Series2 {
        let mut out = Series2 {
            field: self.field.clone(),
            trunc: self.trunc,
            coeffs: BTreeMap::new(),
        };
        for (&k, c) in &self.coeffs {
            out.coeffs.insert((0, k), c.clone());
        }
        out
    }

    /// Equality of coefficients through degree d (exact mode).
    pub fn agrees_through(&self, other: &Series1, d: u32) -> bool {
        for k in 0..=d {
            if !self.coeff(k).sub(&other.coeff(k)).map(|z| z.is_exact_zero()).unwrap_or(false) {
                return false;
            }
        }
        true
    }
}

impl Series2 {
    pub fn zero(field: &LocalFieldModel, trunc: u32) -> Result<Self, SeriesError> {
        if trunc > MAX_TRUNC {
            return Err(SeriesError::TruncationCap(trunc));
        }
        Ok(Series2 {
            field: field.clone(),
            trunc,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn from_terms(
        field: &LocalFieldModel,
        trunc: u32,
        terms: Vec<(u32, u32, PadicNumber)>,
    ) -> Result<Self, SeriesError> {
        let mut s = Series2::zero(field, trunc)?;
        for (i, j, c) in terms {
            if c.field() != field {
                return Err(SeriesError::FieldMismatch);
            }
            s.set(i, j, c);
        }
        Ok(s)
    }

    /// X + Y to the given order.
    pub fn x_plus_y(field: &LocalFieldModel, trunc: u32) -> Result<Self, SeriesError> {
        Series2::from_terms(
            field,
            trunc,
            vec![(1, 0, field.one()), (0, 1, field.one())],
        )
    }

    pub fn field(&self) -> &LocalFieldModel {
        &self.field
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn coeff(&self, i: u32, j: u32) -> PadicNumber {
        self.coeffs
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &PadicNumber)> {
        self.coeffs.iter()
    }

    pub fn set(&mut self, i: u32, j: u32, c: PadicNumber) {
        if i + j > self.trunc || c.is_exact_zero() {
            self.coeffs.remove(&(i, j));
        } else {
            self.coeffs.insert((i, j), c);
        }
    }

    fn check(&self, other: &Series2) -> Result<u32, SeriesError> {
        if self.field != other.field {
            return Err(SeriesError::FieldMismatch);
        }
        Ok(self.trunc.min(other.trunc))
    }

    pub fn add(&self, other: &Series2) -> Result<Series2, SeriesError> {
        let t = self.check(other)?;
        let mut out = Series2::zero(&self.field, t)?;
        for (&(i, j), c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if i + j > t {
                continue;
            }
            let cur = out.coeff(i, j);
            out.set(i, j, cur.add(c)?);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series2) -> Result<Series2, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series2 {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn mul(&self, other: &Series2) -> Result<Series2, SeriesError> {
        let t = self.check(other)?;
        let mut out = Series2::zero(&self.field, t)?;
        for (&(i1, j1), a) in &self.coeffs {
            for (&(i2, j2), b) in &other.coeffs {
                let (i, j) = (i1 + i2, j1 + j2);
                if i + j > t {
                    continue;
                }
                let cur = out.coeff(i, j);
                out.set(i, j, cur.add(&a.mul(b))?);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &PadicNumber) -> Series2 {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = v.mul(c);
        }
        let keys: Vec<(u32, u32)> = out.coeffs.keys().copied().collect();
        for k in keys {
            if out.coeffs[&k].is_exact_zero() {
                out.coeffs.remove(&k);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Homogeneous part of total degree d, as a list of ((i, j), coeff).
    pub fn homogeneous_part(&self, d: u32) -> Vec<((u32, u32), PadicNumber)> {
        self.coeffs
            .iter()
            .filter(|((i, j), _)| i + j == d)
            .map(|(&k, v)| (k, v.clone()))
            .collect()
    }

    /// Substitute univariate series: F(g(T), h(T)); both must kill the
    /// constant term.
    pub fn substitute(&self, g: &Series1, h: &Series1) -> Result<Series1, SeriesError> {
        if g.field != self.field || h.field != self.field {
            return Err(SeriesError::FieldMismatch);
        }
        if !g.coeff(0).is_exact_zero() || !h.coeff(0).is_exact_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let t = self.trunc.min(g.trunc).min(h.trunc);
        let mut gp: Vec<Series1> = vec![{
            let mut one = Series1::zero(&self.field, t)?;
            one.set(0, self.field.one());
            one
        }];
        let mut hp = gp.clone();
        for k in 1..=t as usize {
            gp.push(gp[k - 1].mul(g)?);
            hp.push(hp[k - 1].mul(h)?);
        }
        let mut acc = Series1::zero(&self.field, t)?;
        for (&(i, j), c) in &self.coeffs {
            if i + j > t {
                continue;
            }
            let term = gp[i as usize].mul(&hp[j as usize])?;
            let mut scaled = term.scale(c);
            scaled.trunc = t;
            acc = acc.add(&scaled)?;
        }
        Ok(acc)
    }

    /// Substitute bivariate series: F(A(X,Y), B(X,Y)); both must kill the
    /// constant term.
    pub fn substitute_biv(&self, a: &Series2, b: &Series2) -> Result<Series2, SeriesError> {
        if a.field != self.field || b.field != self.field {
            return Err(SeriesError::FieldMismatch);
        }
        if !a.coeff(0, 0).is_exact_zero() || !b.coeff(0, 0).is_exact_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let t = self.trunc.min(a.trunc).min(b.trunc);
        let mut ap: Vec<Series2> = vec![{
            let mut one = Series2::zero(&self.field, t)?;
            one.set(0, 0, self.field.one());
            one
        }];
        let mut bp = ap.clone();
        for k in 1..=t as usize {
            ap.push(ap[k - 1].mul(a)?);
            bp.push(bp[k - 1].mul(b)?);
        }
        let mut acc = Series2::zero(&self.field, t)?;
        for (&(i, j), c) in &self.coeffs {
            if i + j > t {
                continue;
            }
            let term = ap[i as usize].mul(&bp[j as usize])?;
            let mut scaled = term.scale(c);
            scaled.trunc = t;
            acc = acc.add(&scaled)?;
        }
        Ok(acc)
    }

    /// Evaluate at a pair of maximal-ideal points; reported precision is
    /// min(target, (D+1) min(v(x), v(y))).
    pub fn evaluate(
        &self,
        x: &PadicNumber,
        y: &PadicNumber,
        target: i64,
    ) -> Result<PadicNumber, SeriesError> {
        if x.field() != &self.field || y.field() != &self.field {
            return Err(SeriesError::FieldMismatch);
        }
        let vof = |p: &PadicNumber| match p.valuation() {
            Valuation::Exact(v) => v,
            Valuation::AtLeast(v) => v,
        };
        let (vx, vy) = (vof(x), vof(y));
        if vx <= Rational64::zero() || vy <= Rational64::zero() {
            return Err(SeriesError::NotInMaximalIdeal);
        }
        for c in self.coeffs.values() {
            if let Valuation::Exact(v) = c.valuation() {
                if v < Rational64::zero() {
                    return Err(SeriesError::NonIntegralCoefficients);
                }
            }
        }
        let vmin = vx.min(vy);
        let tail = Rational64::from_integer(self.trunc as i64 + 1) * vmin;
        let reported = Rational64::from_integer(target).min(tail);
        let mut acc = self.field.zero();
        // powers computed on demand, sparse data stays small
        let top = self
            .coeffs
            .keys()
            .map(|&(i, j)| i.max(j))
            .max()
            .unwrap_or(0);
        let mut xp = vec![self.field.one()];
        let mut yp = vec![self.field.one()];
        for k in 1..=top as usize {
            xp.push(xp[k - 1].mul(x));
            yp.push(yp[k - 1].mul(y));
        }
        for (&(i, j), c) in &self.coeffs {
            let term = c.mul(&xp[i as usize]).mul(&yp[j as usize]);
            acc = acc.add(&term)?;
        }
        Ok(acc.to_capped_at(reported)?)
    }

    /// Compose a univariate series with this bivariate one: s(F(X,Y)).
    pub fn compose_outer(&self, s: &Series1) -> Result<Series2, SeriesError> {
        if s.field != self.field {
            return Err(SeriesError::FieldMismatch);
        }
        if !self.coeff(0, 0).is_exact_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let t = self.trunc.min(s.trunc);
        let mut acc = Series2::zero(&self.field, t)?;
        let top = s.top_degree().unwrap_or(0);
        for k in (0..=top).rev() {
            acc = acc.mul(self)?;
            let c = s.coeff(k);
            if !c.is_exact_zero() {
                let cur = acc.coeff(0, 0);
                acc.set(0, 0, cur.add(&c)?);
            }
        }
        Ok(acc)
    }

    pub fn agrees_through(&self, other: &Series2, d: u32) -> bool {
        for i in 0..=d {
            for j in 0..=(d - i) {
                if !self
                    .coeff(i, j)
                    .sub(&other.coeff(i, j))
                    .map(|z| z.is_exact_zero())
                    .unwrap_or(false)
                {
                    return false;
                }
            }
        }
        true
    }
}
