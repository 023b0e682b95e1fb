//! Constructive Lubin-Tate theory: Frobenius series, the formal group law
//! and its O_k-action, the normalizing isomorphism between laws, the formal
//! logarithm, point arithmetic on the maximal ideal, and Newton-polygon
//! analysis of the torsion layers.
//!
//! Every construction is the classical degree-by-degree lift: the degree-d
//! defect is divided by pi^d - pi, which has valuation 1/e, so in exact
//! mode the division is exact and no precision is ever lost.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::padic::{LocalFieldModel, PadicError, PadicNumber, Valuation};
use crate::series::{Series1, Series2, SeriesError, MAX_TRUNC};

pub const MAX_TORSION_LEVEL: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LubinTateError {
    #[error("linear term must be zero constant plus a uniformizer times X")]
    BadLinearTerm,
    #[error("series is not congruent to X^q modulo the maximal ideal")]
    BadFrobeniusReduction,
    #[error("the two Frobenius series have different uniformizers")]
    UniformizerMismatch,
    #[error("need a polynomial Frobenius series of degree exactly q")]
    NotPolynomialFrobenius,
    #[error("torsion level {0} exceeds the cap {MAX_TORSION_LEVEL}")]
    LevelTooLarge(u32),
    #[error("residue field size q = {0} exceeds the series order cap")]
    ResidueFieldTooLarge(String),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// A validated Frobenius series: phi = pi X mod deg 2 and phi = X^q mod pi.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusSeries {
    field: LocalFieldModel,
    phi: Series1,
    pi: PadicNumber,
}

impl FrobeniusSeries {
    pub fn field(&self) -> &LocalFieldModel {
        &self.field
    }
    pub fn phi(&self) -> &Series1 {
        &self.phi
    }
    /// The uniformizer: the linear coefficient of phi.
    pub fn pi(&self) -> &PadicNumber {
        &self.pi
    }
}

/// The canonical witness pi X + X^q at truncation order `trunc`.
pub fn default_frobenius(
    field: &LocalFieldModel,
    trunc: u32,
) -> Result<FrobeniusSeries, LubinTateError> {
    let q = field
        .q()
        .to_u32()
        .filter(|&q| q <= MAX_TRUNC)
        .ok_or_else(|| LubinTateError::ResidueFieldTooLarge(field.q().to_string()))?;
    let trunc = trunc.max(q);
    let pi = field.uniformizer();
    let phi = Series1::from_terms(field, trunc, vec![(1, pi.clone()), (q, field.one())])?;
    Ok(FrobeniusSeries {
        field: field.clone(),
        phi,
        pi,
    })
}

/// Validate an arbitrary series as a Frobenius series for its field.
pub fn validate_frobenius(
    field: &LocalFieldModel,
    phi: &Series1,
) -> Result<FrobeniusSeries, LubinTateError> {
    if phi.field() != field {
        return Err(SeriesError::FieldMismatch.into());
    }
    let q = field
        .q()
        .to_u32()
        .filter(|&q| q <= MAX_TRUNC)
        .ok_or_else(|| LubinTateError::ResidueFieldTooLarge(field.q().to_string()))?;
    if !phi.coeff(0).is_exact_zero() {
        return Err(LubinTateError::BadLinearTerm);
    }
    let pi = phi.coeff(1);
    let e = field.e() as i64;
    match pi.valuation() {
        Valuation::Exact(v) if v == Rational64::new(1, e) => {}
        _ => return Err(LubinTateError::BadLinearTerm),
    }
    // phi - X^q must have every coefficient of positive valuation
    for (&k, c) in phi.terms() {
        let test = if k == q {
            c.sub(&field.one())?
        } else {
            c.clone()
        };
        match test.valuation() {
            Valuation::Exact(v) if v <= Rational64::zero() => {
                return Err(LubinTateError::BadFrobeniusReduction)
            }
            _ => {}
        }
    }
    // the X^q coefficient itself must be present (unit congruent to 1)
    let cq = phi.coeff(q);
    match cq.sub(&field.one())?.valuation() {
        Valuation::Exact(v) if v <= Rational64::zero() => {
            return Err(LubinTateError::BadFrobeniusReduction)
        }
        _ => {}
    }
    if cq.is_exact_zero() {
        return Err(LubinTateError::BadFrobeniusReduction);
    }
    Ok(FrobeniusSeries {
        field: field.clone(),
        phi: phi.clone(),
        pi,
    })
}

/// The formal group law attached to a Frobenius series.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalGroupLaw {
    frobenius: FrobeniusSeries,
    law: Series2,
}

impl FormalGroupLaw {
    pub fn frobenius(&self) -> &FrobeniusSeries {
        &self.frobenius
    }
    pub fn law(&self) -> &Series2 {
        &self.law
    }
    pub fn trunc(&self) -> u32 {
        self.law.trunc()
    }
    pub fn field(&self) -> &LocalFieldModel {
        self.frobenius.field()
    }
}

/// Divisor pi^d - pi of the degree-d correction; exact inverse.
fn correction_divisor_inv(
    pi: &PadicNumber,
    d: u32,
) -> Result<PadicNumber, LubinTateError> {
    let div = pi.pow(d as u64).sub(pi)?;
    Ok(div.inv_exact()?)
}

/// Build the unique F with F = X + Y mod deg 2 and phi(F) = F(phi, phi),
/// degree by degree through total degree `trunc`.
pub fn formal_group_law(
    frob: &FrobeniusSeries,
    trunc: u32,
) -> Result<FormalGroupLaw, LubinTateError> {
    if trunc < 2 {
        return Err(LubinTateError::BadInput("need trunc >= 2".into()));
    }
    if frob.phi.trunc() < trunc {
        return Err(LubinTateError::BadInput(format!(
            "phi is only stored through degree {}, need {}",
            frob.phi.trunc(),
            trunc
        )));
    }
    let field = frob.field();
    let mut law = Series2::x_plus_y(field, trunc)?;
    let phi_x = frob.phi.embed_x();
    let phi_y = frob.phi.embed_y();
    for d in 2..=trunc {
        // defect = phi(F) - F(phi X, phi Y), homogeneous degree-d part
        let lhs = law.compose_outer(&frob.phi)?;
        let rhs = law.substitute_biv(&phi_x, &phi_y)?;
        let defect = lhs.sub(&rhs)?;
        let part = defect.homogeneous_part(d);
        if part.is_empty() {
            continue;
        }
        let inv = correction_divisor_inv(&frob.pi, d)?;
        for ((i, j), c) in part {
            let corr = c.mul(&inv);
            let cur = law.coeff(i, j);
            law.set(i, j, cur.add(&corr)?);
        }
    }
    Ok(FormalGroupLaw {
        frobenius: frob.clone(),
        law,
    })
}

/// The endomorphism [a]: the unique series aX + ... commuting with phi.
pub fn multiplication_by(
    a: &PadicNumber,
    frob: &FrobeniusSeries,
    trunc: u32,
) -> Result<Series1, LubinTateError> {
    if frob.phi.trunc() < trunc {
        return Err(LubinTateError::BadInput(format!(
            "phi is only stored through degree {}, need {}",
            frob.phi.trunc(),
            trunc
        )));
    }
    let field = frob.field();
    if a.field() != field {
        return Err(SeriesError::FieldMismatch.into());
    }
    let mut g = Series1::from_terms(field, trunc, vec![(1, a.clone())])?;
    for d in 2..=trunc {
        // defect = phi(g(X)) - g(phi(X)), degree-d coefficient; adding
        // c X^d to g changes it by c (pi - pi^d)
        let lhs = frob.phi.compose(&g)?;
        let rhs = g.compose(&frob.phi)?;
        let defect = lhs.sub(&rhs)?.coeff(d);
        if defect.is_exact_zero() {
            continue;
        }
        let inv = correction_divisor_inv(&frob.pi, d)?;
        let cur = g.coeff(d);
        g.set(d, cur.add(&defect.mul(&inv))?);
    }
    Ok(g)
}

/// The unique isomorphism theta = X + ... with theta(phi(X)) = phi'(theta(X));
/// both series must share the same uniformizer.
pub fn isomorphism_theta(
    from: &FrobeniusSeries,
    to: &FrobeniusSeries,
    trunc: u32,
) -> Result<Series1, LubinTateError> {
    if from.field() != to.field() {
        return Err(SeriesError::FieldMismatch.into());
    }
    if !from.pi.sub(&to.pi)?.is_exact_zero() {
        return Err(LubinTateError::UniformizerMismatch);
    }
    if from.phi.trunc() < trunc || to.phi.trunc() < trunc {
        return Err(LubinTateError::BadInput("phi truncation below requested order".into()));
    }
    let field = from.field();
    let mut theta = Series1::x(field, trunc)?;
    for d in 2..=trunc {
        // defect = theta(phi(X)) - phi'(theta(X)), degree-d coefficient;
        // adding c X^d changes it by c (pi^d - pi)
        let lhs = theta.compose(&from.phi)?;
        let rhs = to.phi.compose(&theta)?;
        let defect = lhs.sub(&rhs)?.coeff(d);
        if defect.is_exact_zero() {
            continue;
        }
        let inv = correction_divisor_inv(&from.pi, d)?;
        let cur = theta.coeff(d);
        theta.set(d, cur.sub(&defect.mul(&inv))?);
    }
    Ok(theta)
}

/// The formal logarithm: the unique lambda = X + ... with
/// lambda(phi(X)) = pi lambda(X). Coefficients live in k (denominators).
pub fn formal_log(frob: &FrobeniusSeries, trunc: u32) -> Result<Series1, LubinTateError> {
    if frob.phi.trunc() < trunc {
        return Err(LubinTateError::BadInput("phi truncation below requested order".into()));
    }
    let field = frob.field();
    let mut lambda = Series1::x(field, trunc)?;
    for d in 2..=trunc {
        // defect: coefficient of X^d in lambda(phi) - pi lambda; adding
        // c X^d changes it by c (pi^d - pi)
        let lhs = lambda.compose(&frob.phi)?;
        let rhs = lambda.scale(&frob.pi);
        let defect = lhs.sub(&rhs)?.coeff(d);
        if defect.is_exact_zero() {
            continue;
        }
        let inv = correction_divisor_inv(&frob.pi, d)?;
        let cur = lambda.coeff(d);
        lambda.set(d, cur.sub(&defect.mul(&inv))?);
    }
    Ok(lambda)
}

/// The inverse series iota with F(X, iota(X)) = 0.
pub fn negation_series(law: &FormalGroupLaw) -> Result<Series1, LubinTateError> {
    let field = law.field();
    let trunc = law.trunc();
    let mut iota = Series1::from_terms(field, trunc, vec![(1, field.from_integer(-1))])?;
    for d in 2..=trunc {
        // F(X, iota(X)) degree-d coefficient; adding c X^d to iota adds c
        let x = Series1::x(field, trunc)?;
        let val = law.law.substitute(&x, &iota)?.coeff(d);
        if val.is_exact_zero() {
            continue;
        }
        let cur = iota.coeff(d);
        iota.set(d, cur.sub(&val)?);
    }
    Ok(iota)
}

/// x (+) y on the maximal ideal, via bivariate evaluation.
pub fn point_add(
    law: &FormalGroupLaw,
    x: &PadicNumber,
    y: &PadicNumber,
    target: i64,
) -> Result<PadicNumber, LubinTateError> {
    Ok(law.law.evaluate(x, y, target)?)
}

/// a.x = [a](x).
pub fn point_mul(
    a: &PadicNumber,
    frob: &FrobeniusSeries,
    x: &PadicNumber,
    target: i64,
) -> Result<PadicNumber, LubinTateError> {
    let mul = multiplication_by(a, frob, frob.phi.trunc())?;
    Ok(mul.evaluate(x, target)?)
}

/// x (-) y = x (+) iota(y).
pub fn point_sub(
    law: &FormalGroupLaw,
    x: &PadicNumber,
    y: &PadicNumber,
    target: i64,
) -> Result<PadicNumber, LubinTateError> {
    let iota = negation_series(law)?;
    let ny = iota.evaluate(y, target + law.field().e() as i64)?;
    Ok(law.law.evaluate(x, &ny, target)?)
}

/// Torsion-layer report: Newton-polygon slopes of the exact expansion of
/// phi^(n)(X) (- a).
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionLayerReport {
    pub level: u32,
    /// q^n: the number of roots, i.e. the size of the torsion layer.
    pub total: BigInt,
    /// Multiplicity of the root at X = 0 (1 when `a` is absent, 0 otherwise).
    pub zero_root_multiplicity: u64,
    /// (root valuation, count) for the nonzero roots, ascending, in the
    /// uniformizer normalization v(pi) = 1.
    pub slopes: Vec<(Rational64, u64)>,
    /// Slopes new at this level (not present at level n-1); equals `slopes`
    /// when a target point `a` is given.
    pub new_slopes: Vec<(Rational64, u64)>,
}

/// Exact polynomial iterate of a degree-q polynomial Frobenius series.
fn phi_iterate_exact(
    frob: &FrobeniusSeries,
    n: u32,
) -> Result<Vec<PadicNumber>, LubinTateError> {
    let field = frob.field();
    let q = field.q().to_u32().ok_or_else(|| {
        LubinTateError::ResidueFieldTooLarge(field.q().to_string())
    })? as usize;
    // must be a polynomial of degree exactly q
    let top = frob.phi.top_degree().unwrap_or(0) as usize;
    if top != q {
        return Err(LubinTateError::NotPolynomialFrobenius);
    }
    let mut base: Vec<PadicNumber> = vec![field.zero(); q + 1];
    for (&k, c) in frob.phi.terms() {
        base[k as usize] = c.clone();
    }
    let mut acc = base.clone();
    for _ in 1..n {
        acc = poly_compose_exact(&base, &acc, field)?;
    }
    Ok(acc)
}

fn poly_compose_exact(
    outer: &[PadicNumber],
    inner: &[PadicNumber],
    field: &LocalFieldModel,
) -> Result<Vec<PadicNumber>, LubinTateError> {
    // Horner: result = ((c_q inner + c_{q-1}) inner + ...) inner + c_0
    let mut acc: Vec<PadicNumber> = vec![];
    for c in outer.iter().rev() {
        acc = poly_mul_exact(&acc, inner, field)?;
        if !c.is_exact_zero() {
            if acc.is_empty() {
                acc.push(c.clone());
            } else {
                acc[0] = acc[0].add(c)?;
            }
        }
    }
    Ok(acc)
}

fn poly_mul_exact(
    a: &[PadicNumber],
    b: &[PadicNumber],
    field: &LocalFieldModel,
) -> Result<Vec<PadicNumber>, LubinTateError> {
    if a.is_empty() || b.is_empty() {
        return Ok(vec![]);
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_exact_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_exact_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&x.mul(y))?;
        }
    }
    Ok(out)
}

/// Newton-polygon analysis of the level-n torsion layer (roots of phi^(n))
/// or of the fiber phi^(n)(X) = a when a target `a` is supplied.
pub fn torsion_newton_polygon(
    frob: &FrobeniusSeries,
    n: u32,
    a: Option<&PadicNumber>,
) -> Result<TorsionLayerReport, LubinTateError> {
    if n == 0 || n > MAX_TORSION_LEVEL {
        return Err(LubinTateError::LevelTooLarge(n));
    }
    let field = frob.field();
    let mut poly = phi_iterate_exact(frob, n)?;
    if let Some(a) = a {
        if a.field() != field {
            return Err(SeriesError::FieldMismatch.into());
        }
        match a.valuation() {
            Valuation::Exact(v) if v > Rational64::zero() => {}
            Valuation::AtLeast(v) if v > Rational64::zero() => {}
            _ => return Err(LubinTateError::BadInput("target must be in the maximal ideal".into())),
        }
        poly[0] = poly[0].sub(a)?;
    }
    // slopes are reported in the uniformizer normalization v(pi) = 1, so
    // level-n new roots sit at 1/(q^(n-1)(q-1)) in every base field
    let e = Rational64::from_integer(field.e() as i64);
    let slopes: Vec<(Rational64, u64)> = newton_slopes(&poly)?
        .into_iter()
        .map(|(s, c)| (s * e, c))
        .collect();
    let ord = (0..poly.len())
        .take_while(|&i| poly[i].is_exact_zero())
        .count() as u64;
    let total = field.q().pow(n);
    // sanity: counted roots match the layer size
    let counted: u64 = slopes.iter().map(|&(_, c)| c).sum::<u64>() + ord;
    if BigInt::from(counted) != total {
        return Err(LubinTateError::BadInput(format!(
            "polygon accounts for {counted} roots, expected {total}"
        )));
    }
    let new_slopes = if a.is_none() && n > 1 {
        let prev = torsion_newton_polygon(frob, n - 1, None)?;
        subtract_slope_multiset(&slopes, &prev.slopes)
    } else {
        slopes.clone()
    };
    Ok(TorsionLayerReport {
        level: n,
        total,
        zero_root_multiplicity: ord,
        slopes,
        new_slopes,
    })
}

/// Lower convex hull of (exponent, coefficient valuation); returns
/// (root valuation, count) ascending for the nonzero roots.
fn newton_slopes(poly: &[PadicNumber]) -> Result<Vec<(Rational64, u64)>, LubinTateError> {
    let mut pts: Vec<(i64, Rational64)> = Vec::new();
    for (i, c) in poly.iter().enumerate() {
        match c.valuation() {
            Valuation::Exact(v) => pts.push((i as i64, v)),
            Valuation::AtLeast(_) => {} // exact zero coefficient
        }
    }
    if pts.len() < 2 {
        return Ok(vec![]);
    }
    // Andrew-monotone lower hull over the exact rational points
    let mut hull: Vec<(i64, Rational64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // remove b if it is above or on the segment a-p
            let lhs = (b.1 - a.1) * Rational64::from_integer(p.0 - a.0);
            let rhs = (p.1 - a.1) * Rational64::from_integer(b.0 - a.0);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out: Vec<(Rational64, u64)> = Vec::new();
    for w in hull.windows(2) {
        let (i1, v1) = w[0];
        let (i2, v2) = w[1];
        let slope = (v2 - v1) / Rational64::from_integer(i2 - i1);
        let root_val = -slope;
        if root_val > Rational64::zero() {
            out.push((root_val, (i2 - i1) as u64));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    // merge equal slopes
    let mut merged: Vec<(Rational64, u64)> = Vec::new();
    for (s, c) in out {
        if let Some(last) = merged.last_mut() {
            if last.0 == s {
                last.1 += c;
                continue;
            }
        }
        merged.push((s, c));
    }
    Ok(merged)
}

fn subtract_slope_multiset(
    all: &[(Rational64, u64)],
    prev: &[(Rational64, u64)],
) -> Vec<(Rational64, u64)> {
    let mut map: BTreeMap<Rational64, i64> = BTreeMap::new();
    for &(s, c) in all {
        *map.entry(s).or_insert(0) += c as i64;
    }
    for &(s, c) in prev {
        *map.entry(s).or_insert(0) -= c as i64;
    }
    map.into_iter()
        .filter(|&(_, c)| c > 0)
        .map(|(s, c)| (s, c as u64))
        .collect()
}

/// Outcome of the one-sided linear-independence test.
#[derive(Clone, Debug, PartialEq)]
pub enum IndependenceResult {
    /// Certified: the logarithm values span a full-rank lattice; carries the
    /// valuation of the log value and the truncation tail bound it beat.
    Independent {
        log_valuation: Rational64,
        tail_bound: Rational64,
    },
    /// Dependence or insufficient precision; never a certified dependence.
    Inconclusive { reason: String },
}

/// One-sided O_k-linear independence of points of the maximal ideal, via
/// the formal logarithm. Torsion points have vanishing logarithm, so
/// dependence is only ever reported as Inconclusive.
pub fn linear_independence(
    points: &[PadicNumber],
    frob: &FrobeniusSeries,
    trunc: u32,
    _target: i64,
) -> Result<IndependenceResult, LubinTateError> {
    if points.is_empty() {
        return Err(LubinTateError::BadInput("need at least one point".into()));
    }
    let field = frob.field();
    let e = field.e() as i64;
    let q = field
        .q()
        .to_u64()
        .ok_or_else(|| LubinTateError::ResidueFieldTooLarge(field.q().to_string()))?;
    let lambda = formal_log(frob, trunc)?;
    let mut vals: Vec<(Rational64, Rational64)> = Vec::new(); // (v(log), tail)
    for pt in points {
        if pt.field() != field {
            return Err(SeriesError::FieldMismatch.into());
        }
        let va = match pt.valuation() {
            Valuation::Exact(v) if v > Rational64::zero() => v,
            _ => {
                return Err(LubinTateError::BadInput(
                    "points must be exact elements of the maximal ideal".into(),
                ))
            }
        };
        // exact truncated log value
        let mut acc = field.zero();
        let top = lambda.top_degree().unwrap_or(0);
        for k in (0..=top).rev() {
            acc = acc.mul(pt);
            let c = lambda.coeff(k);
            if !c.is_exact_zero() {
                acc = acc.add(&c)?;
            }
        }
        // sound tail bound: v(lambda_k) >= -(floor(log_q k) + 1)/e for k > D,
        // and k v(a) - (log_q k + 1)/e is increasing in k, so the infimum
        // over the tail is bounded below at k = D + 1.
        let dd = trunc as i64 + 1;
        let mut logq = 0i64;
        let mut pw = 1u64;
        while pw <= dd as u64 {
            pw = pw.saturating_mul(q);
            logq += 1;
        }
        let tail = Rational64::from_integer(dd) * va
            - Rational64::new(logq + 1, e);
        let v_log = match acc.valuation() {
            Valuation::Exact(v) => v,
            Valuation::AtLeast(v) => v,
        };
        if v_log >= tail {
            return Ok(IndependenceResult::Inconclusive {
                reason: format!(
                    "logarithm of a point is indistinguishable from zero \
                     (valuation >= {v_log} against tail bound {tail}); \
                     torsion points always land here"
                ),
            });
        }
        vals.push((v_log, tail));
    }
    if points.len() > 1 {
        // The values live in k itself, which has O_k-rank one: any two
        // elements admit a relation, so independence is never certifiable.
        return Ok(IndependenceResult::Inconclusive {
            reason: "the base field has O_k-rank one; more than one point \
                     always admits an O_k-relation"
                .into(),
        });
    }
    let (v_log, tail) = vals[0];
    Ok(IndependenceResult::Independent {
        log_valuation: v_log,
        tail_bound: tail,
    })
}

// ---------------------------------------------------------------------------
// Trivariate scratch arithmetic for the associativity check
// ---------------------------------------------------------------------------

/// Sparse trivariate polynomial truncated by total degree; only used to
/// verify three-variable identities of a constructed law.
#[derive(Clone, Debug, PartialEq)]
pub struct Tri {
    trunc: u32,
    coeffs: BTreeMap<(u32, u32, u32), PadicNumber>,
}

impl Tri {
    fn zero(trunc: u32) -> Tri {
        Tri {
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn variable(idx: usize, field: &LocalFieldModel, trunc: u32) -> Tri {
        let mut t = Tri::zero(trunc);
        let key = match idx {
            0 => (1, 0, 0),
            1 => (0, 1, 0),
            _ => (0, 0, 1),
        };
        t.coeffs.insert(key, field.one());
        t
    }

    fn add(&self, other: &Tri) -> Result<Tri, LubinTateError> {
        let mut out = self.clone();
        out.trunc = self.trunc.min(other.trunc);
        for (&k, c) in &other.coeffs {
            if k.0 + k.1 + k.2 > out.trunc {
                continue;
            }
            let cur = out
                .coeffs
                .get(&k)
                .cloned()
                .unwrap_or_else(|| c.field().zero());
            let s = cur.add(c)?;
            if s.is_exact_zero() {
                out.coeffs.remove(&k);
            } else {
                out.coeffs.insert(k, s);
            }
        }
        Ok(out)
    }

    fn mul(&self, other: &Tri) -> Result<Tri, LubinTateError> {
        let trunc = self.trunc.min(other.trunc);
        let mut out = Tri::zero(trunc);
        for (&(a1, b1, c1), x) in &self.coeffs {
            for (&(a2, b2, c2), y) in &other.coeffs {
                let k = (a1 + a2, b1 + b2, c1 + c2);
                if k.0 + k.1 + k.2 > trunc {
                    continue;
                }
                let prod = x.mul(y);
                let cur = out
                    .coeffs
                    .get(&k)
                    .cloned()
                    .unwrap_or_else(|| prod.field().zero());
                let s = cur.add(&prod)?;
                if s.is_exact_zero() {
                    out.coeffs.remove(&k);
                } else {
                    out.coeffs.insert(k, s);
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Substitute trivariate arguments into a bivariate series.
pub fn substitute2_tri(f: &Series2, a: &Tri, b: &Tri) -> Result<Tri, LubinTateError> {
    let trunc = f.trunc().min(a.trunc).min(b.trunc);
    let top = trunc as usize;
    let field = f.field();
    let mut one = Tri::zero(trunc);
    one.coeffs.insert((0, 0, 0), field.one());
    let mut ap = vec![one.clone()];
    let mut bp = vec![one];
    for k in 1..=top {
        ap.push(ap[k - 1].mul(a)?);
        bp.push(bp[k - 1].mul(b)?);
    }
    let mut acc = Tri::zero(trunc);
    for (&(i, j), c) in f.terms() {
        if i + j > trunc {
            continue;
        }
        let term = ap[i as usize].mul(&bp[j as usize])?;
        let mut scaled = Tri::zero(trunc);
        for (&k, v) in &term.coeffs {
            let s = v.mul(c);
            if !s.is_exact_zero() {
                scaled.coeffs.insert(k, s);
            }
        }
        acc = acc.add(&scaled)?;
    }
    Ok(acc)
}

/// F(F(X,Y),Z) = F(X,F(Y,Z)) through the truncation order.
pub fn law_is_associative(law: &FormalGroupLaw) -> Result<bool, LubinTateError> {
    let field = law.field();
    let d = law.trunc();
    let x = Tri::variable(0, field, d);
    let y = Tri::variable(1, field, d);
    let z = Tri::variable(2, field, d);
    let fxy = substitute2_tri(&law.law, &x, &y)?;
    let fyz = substitute2_tri(&law.law, &y, &z)?;
    let lhs = substitute2_tri(&law.law, &fxy, &z)?;
    let rhs = substitute2_tri(&law.law, &x, &fyz)?;
    let mut diff = lhs;
    for (k, c) in rhs.coeffs {
        let cur = diff
            .coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| c.field().zero());
        let s = cur.sub(&c)?;
        if s.is_exact_zero() {
            diff.coeffs.remove(&k);
        } else {
            diff.coeffs.insert(k, s);
        }
    }
    Ok(diff.is_zero())
}
