//! The decision layer: norm-obstruction and unity conditions on a
//! uniformizer or a crystalline-character invariant, the verdict engine over
//! group classes, the structural bounds of the tower, and the finite
//! exceptional set of norms that could permit infinite torsion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebraic::{
    enumerate_weil_polys, is_root_of_unity, is_weil, AlgebraicError, AlgebraicNumber,
};
use crate::arith::{big, rat_pow};
use crate::factor::{cmp_poly, factor_rational};
use crate::padic::{
    galois_closure_degree, min_poly_global, norm_to_qp, LocalFieldModel, PadicError, PadicNumber,
    Valuation,
};
use crate::poly::{cyclotomic, QPoly};

pub const MAX_EXCEPTIONAL_PARAM: u64 = 2;
pub const MAX_COMPOSITUM_BOUND: u64 = 4096;
const MAX_SYMBOLIC_EQUATIONS: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FinitenessError {
    #[error("element is not a uniformizer of the model")]
    NotUniformizer,
    #[error("verdict context does not match the supplied data")]
    ContextMismatch,
    #[error("the finite-residue-field flag must be asserted by the caller")]
    MissingFiniteResidueFlag,
    #[error("weight sum is zero; route through the zero-weight-sum rule")]
    ZeroWeightSum,
    #[error("extension data requires a conductor bound for the unit image")]
    MissingConductorBound,
    #[error("the exceptional set is only constructed over the base field Q_p")]
    NotBaseQp,
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
}

/// A base field with a chosen uniformizer and its derived invariants.
#[derive(Clone, Debug)]
pub struct PairSpec {
    field: LocalFieldModel,
    pi: PadicNumber,
    nr: BigRational,
    nr_alg: AlgebraicNumber,
    q: BigInt,
    degree: usize,
    galois_degree: u64,
}

impl PairSpec {
    /// Validate the uniformizer and derive (norm, q, d, d_G).
    pub fn new(
        field: &LocalFieldModel,
        pi: PadicNumber,
        galois_override: Option<u64>,
    ) -> Result<Self, FinitenessError> {
        if pi.field() != field {
            return Err(FinitenessError::BadInput("pi belongs to another model".into()));
        }
        let e = field.e() as i64;
        match pi.valuation() {
            Valuation::Exact(v) if v == Rational64::new(1, e) => {}
            _ => return Err(FinitenessError::NotUniformizer),
        }
        let nr = norm_to_qp(&pi)?;
        let nr_alg = AlgebraicNumber::from_rational(&nr);
        let galois_degree = galois_closure_degree(field, galois_override)?;
        Ok(PairSpec {
            field: field.clone(),
            pi,
            q: field.q(),
            degree: field.degree(),
            nr,
            nr_alg,
            galois_degree,
        })
    }

    pub fn field(&self) -> &LocalFieldModel {
        &self.field
    }
    pub fn pi(&self) -> &PadicNumber {
        &self.pi
    }
    pub fn norm(&self) -> &BigRational {
        &self.nr
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn galois_degree(&self) -> u64 {
        self.galois_degree
    }
}

/// Outcome of a norm-obstruction (Weil) condition.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilCondition {
    pub holds: bool,
    /// The weight divisors c for which the norm is a Weil number.
    pub witnesses: Vec<u64>,
    pub note: Option<String>,
}

/// Outcome of a unity condition.
#[derive(Clone, Debug, PartialEq)]
pub struct UnityCondition {
    pub holds: bool,
    pub order: Option<u64>,
}

/// Is the norm of the uniformizer a q-Weil integer of weight d_G/c for some
/// 1 <= c <= d_G?
pub fn condition_w(pair: &PairSpec) -> WeilCondition {
    if !pair.nr.denom().is_one() {
        return WeilCondition {
            holds: false,
            witnesses: vec![],
            note: Some("norm is not an algebraic integer".into()),
        };
    }
    let mut witnesses = Vec::new();
    for c in 1..=pair.galois_degree {
        let w = Rational64::new(pair.galois_degree as i64, c as i64);
        if is_weil(&pair.nr_alg, &pair.q, w, true).holds {
            witnesses.push(c);
        }
    }
    WeilCondition {
        holds: !witnesses.is_empty(),
        witnesses,
        note: None,
    }
}

/// Is q^{-1} times the norm a root of unity?
pub fn condition_mu(pair: &PairSpec) -> UnityCondition {
    let scaled = &pair.nr / BigRational::from_integer(pair.q.clone());
    let alg = AlgebraicNumber::from_rational(&scaled);
    let order = is_root_of_unity(&alg);
    UnityCondition {
        holds: order.is_some(),
        order,
    }
}

/// A crystalline character presented by its invariant delta, Hodge-Tate
/// weight multiset and ambient degrees.
#[derive(Clone, Debug)]
pub struct CharacterSpec {
    /// [E : Q_p].
    pub e_degree: usize,
    /// The invariant delta, as an exact algebraic number.
    pub delta: AlgebraicNumber,
    /// Hodge-Tate weight multiset; exactly e_degree entries.
    pub ht_weights: Vec<i64>,
    /// Sum of the weights.
    pub weight_sum: i64,
    /// Degree of the Galois closure of the compositum kE over Q_p.
    pub d_tilde: u64,
    /// Residue field size of the base k.
    pub q_k: BigInt,
    /// Caller-asserted: the splitting field has a finite residue field.
    /// Set automatically for specs derived from a uniformizer.
    pub finite_residue: bool,
    nr_delta: BigRational,
}

impl CharacterSpec {
    pub fn new(
        e_degree: usize,
        delta: AlgebraicNumber,
        ht_weights: Vec<i64>,
        d_tilde: u64,
        q_k: BigInt,
        finite_residue: bool,
    ) -> Result<Self, FinitenessError> {
        if ht_weights.len() != e_degree {
            return Err(FinitenessError::BadInput(format!(
                "need exactly [E:Q_p] = {e_degree} Hodge-Tate weights, got {}",
                ht_weights.len()
            )));
        }
        if d_tilde == 0 || e_degree == 0 {
            return Err(FinitenessError::BadInput("degrees must be positive".into()));
        }
        let deg = delta.degree();
        if e_degree % deg != 0 {
            return Err(FinitenessError::BadInput(format!(
                "the global degree {deg} of delta must divide [E:Q_p] = {e_degree}"
            )));
        }
        let nr_delta = rat_pow(&delta.norm_rational(), (e_degree / deg) as i64);
        let weight_sum = ht_weights.iter().sum();
        Ok(CharacterSpec {
            e_degree,
            delta,
            ht_weights,
            weight_sum,
            d_tilde,
            q_k,
            finite_residue,
            nr_delta,
        })
    }

    /// The norm of delta down to Q_p (a rational under the global model).
    pub fn norm_delta(&self) -> &BigRational {
        &self.nr_delta
    }

    /// The spec for the inverse character: negated weights, inverted delta.
    pub fn inverse(&self) -> Result<CharacterSpec, FinitenessError> {
        CharacterSpec::new(
            self.e_degree,
            self.delta.inverse()?,
            self.ht_weights.iter().map(|w| -w).collect(),
            self.d_tilde,
            self.q_k.clone(),
            self.finite_residue,
        )
    }
}

/// The character attached to a uniformizer: E = k, delta = pi, one
/// Hodge-Tate weight 1, the rest 0.
pub fn lubin_tate_character_spec(pair: &PairSpec) -> Result<CharacterSpec, FinitenessError> {
    let min_poly = min_poly_global(&pair.pi)?;
    let delta = AlgebraicNumber::from_min_poly(min_poly)
        .map_err(FinitenessError::Algebraic)?;
    let mut ht = vec![0i64; pair.degree];
    ht[0] = 1;
    let spec = CharacterSpec::new(
        pair.degree,
        delta,
        ht,
        pair.galois_degree,
        pair.q.clone(),
        true,
    )?;
    // the exact norm of pi is already known; they must agree
    debug_assert_eq!(&spec.nr_delta, &pair.nr);
    Ok(spec)
}

/// Is the norm of delta a q_k-Weil number of weight h d~/c for some
/// 1 <= c <= d~, integral when h > 0?
pub fn condition_w_prime(spec: &CharacterSpec) -> Result<WeilCondition, FinitenessError> {
    if spec.weight_sum == 0 {
        return Err(FinitenessError::ZeroWeightSum);
    }
    let alg = AlgebraicNumber::from_rational(&spec.nr_delta);
    let mut witnesses = Vec::new();
    for c in 1..=spec.d_tilde {
        let w = Rational64::new(spec.weight_sum * spec.d_tilde as i64, c as i64);
        if is_weil(&alg, &spec.q_k, w, spec.weight_sum > 0).holds {
            witnesses.push(c);
        }
    }
    Ok(WeilCondition {
        holds: !witnesses.is_empty(),
        witnesses,
        note: None,
    })
}

/// Is q_k^{-h} times the norm of delta a root of unity?
pub fn condition_mu_prime(spec: &CharacterSpec) -> UnityCondition {
    let qh = rat_pow(
        &BigRational::from_integer(spec.q_k.clone()),
        spec.weight_sum,
    );
    let scaled = &spec.nr_delta / qh;
    let alg = AlgebraicNumber::from_rational(&scaled);
    let order = is_root_of_unity(&alg);
    UnityCondition {
        holds: order.is_some(),
        order,
    }
}

// ---------------------------------------------------------------------------
// Verdict engine
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupClass {
    Torus,
    AvPotentialGood,
    CommutativeGeneral,
}

impl GroupClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            GroupClass::Torus => "torus",
            GroupClass::AvPotentialGood => "av_potential_good",
            GroupClass::CommutativeGeneral => "commutative_general",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictContext {
    /// Torsion with values in the phi-iterate tower over the base pair.
    Ktilde,
    /// Torsion with values in the splitting field of a crystalline character.
    CharacterField,
}

impl VerdictContext {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictContext::Ktilde => "ktilde",
            VerdictContext::CharacterField => "character_field",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    AllFinite,
    ExistsInfinite,
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::AllFinite => "all_finite",
            Verdict::ExistsInfinite => "exists_infinite",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::AllFinite => 0,
            Verdict::ExistsInfinite => 10,
            Verdict::Unknown => 20,
        }
    }
}

/// Condition data attached to a verdict.
#[derive(Clone, Debug)]
pub enum VerdictConditions {
    Pair {
        w: WeilCondition,
        mu: UnityCondition,
    },
    Character {
        w_prime: Option<WeilCondition>,
        mu_prime: UnityCondition,
        weight_sum: i64,
    },
}

#[derive(Clone, Debug)]
pub struct VerdictReport {
    pub context: VerdictContext,
    pub group_class: GroupClass,
    pub conditions: VerdictConditions,
    pub verdict: Verdict,
    /// Stable identifier of the decision rule that fired.
    pub citation: &'static str,
    pub notes: Vec<String>,
}

/// The pure rule table over the tower context. Returns (verdict, rule id,
/// note).
pub fn ktilde_rule(
    class: GroupClass,
    w_holds: bool,
    mu_holds: bool,
) -> (Verdict, &'static str, Option<&'static str>) {
    match class {
        GroupClass::AvPotentialGood => {
            if !w_holds {
                (Verdict::AllFinite, "av-norm-not-weil", None)
            } else {
                (Verdict::Unknown, "av-weil-obstruction-present", None)
            }
        }
        GroupClass::CommutativeGeneral => {
            if mu_holds {
                (
                    Verdict::ExistsInfinite,
                    "general-unity-witness",
                    Some(
                        "the multiplicative group picks up infinitely many p-power \
                         roots of unity in the tower",
                    ),
                )
            } else if !w_holds {
                (Verdict::AllFinite, "general-norm-neither-weil-nor-unity", None)
            } else {
                (Verdict::Unknown, "general-weil-only", None)
            }
        }
        GroupClass::Torus => {
            if mu_holds {
                (
                    Verdict::ExistsInfinite,
                    "torus-unity-witness",
                    Some("the tower contains infinitely many p-power roots of unity"),
                )
            } else {
                (Verdict::AllFinite, "torus-unity-fails", None)
            }
        }
    }
}

/// The pure rule table over the character context; never claims an
/// infiniteness witness.
pub fn character_rule(
    class: GroupClass,
    weight_sum_zero: bool,
    w_holds: bool,
    mu_holds: bool,
) -> (Verdict, &'static str, Option<&'static str>) {
    if weight_sum_zero {
        return (Verdict::AllFinite, "zero-weight-sum", None);
    }
    match class {
        GroupClass::AvPotentialGood => {
            if !w_holds {
                (Verdict::AllFinite, "character-norm-not-weil", None)
            } else {
                (Verdict::Unknown, "character-weil-obstruction-present", None)
            }
        }
        GroupClass::CommutativeGeneral => {
            if !w_holds && !mu_holds {
                (Verdict::AllFinite, "character-norm-neither-weil-nor-unity", None)
            } else {
                (Verdict::Unknown, "character-obstruction-present", None)
            }
        }
        GroupClass::Torus => {
            if !mu_holds {
                (Verdict::AllFinite, "character-torus-unity-fails", None)
            } else {
                (
                    Verdict::Unknown,
                    "character-torus-unity-present",
                    Some("no infiniteness witness is asserted in the character context"),
                )
            }
        }
    }
}

/// Verdict for a base pair in the tower context.
pub fn verdict_for_pair(
    pair: &PairSpec,
    class: GroupClass,
    context: VerdictContext,
) -> Result<VerdictReport, FinitenessError> {
    if context != VerdictContext::Ktilde {
        return Err(FinitenessError::ContextMismatch);
    }
    let w = condition_w(pair);
    let mu = condition_mu(pair);
    let (verdict, citation, note) = ktilde_rule(class, w.holds, mu.holds);
    let mut notes: Vec<String> = note.into_iter().map(String::from).collect();
    if let Some(n) = &w.note {
        notes.push(n.clone());
    }
    Ok(VerdictReport {
        context,
        group_class: class,
        conditions: VerdictConditions::Pair { w, mu },
        verdict,
        citation,
        notes,
    })
}

/// Verdict for a crystalline character in the splitting-field context.
pub fn verdict_for_character(
    spec: &CharacterSpec,
    class: GroupClass,
    context: VerdictContext,
) -> Result<VerdictReport, FinitenessError> {
    if context != VerdictContext::CharacterField {
        return Err(FinitenessError::ContextMismatch);
    }
    if !spec.finite_residue {
        return Err(FinitenessError::MissingFiniteResidueFlag);
    }
    let weight_sum_zero = spec.weight_sum == 0;
    let (w_prime, w_holds) = if weight_sum_zero {
        (None, false)
    } else {
        let w = condition_w_prime(spec)?;
        let holds = w.holds;
        (Some(w), holds)
    };
    let mu_prime = condition_mu_prime(spec);
    let (verdict, citation, note) =
        character_rule(class, weight_sum_zero, w_holds, mu_prime.holds);
    Ok(VerdictReport {
        context,
        group_class: class,
        conditions: VerdictConditions::Character {
            w_prime,
            mu_prime: mu_prime.clone(),
            weight_sum: spec.weight_sum,
        },
        verdict,
        citation,
        notes: note.into_iter().map(String::from).collect(),
    })
}

// ---------------------------------------------------------------------------
// Structural bounds
// ---------------------------------------------------------------------------

/// Data describing the overfield K of the base k.
#[derive(Clone, Debug, PartialEq)]
pub enum OverfieldData {
    /// K = k.
    SameField,
    Extension {
        /// [K : Q_p]
        degree: u64,
        /// residue extension degree of the torsion-tower compositum over K
        residue_degree: u64,
        /// least m with the unit image containing 1 + pi^m O_k
        conductor_bound: Option<u64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureReport {
    /// Least t >= 0 with 1 + p^t in the character image.
    pub c: u64,
    /// lcm of (1+p^c)^r - 1 for 1 <= r <= n: kills semisimplified torsion.
    pub unipotence_exponent: BigInt,
    /// p^c [F_pi : F]: bounds the residue extension of the tower.
    pub residue_bound: BigInt,
    /// p^(c [K:Q_p]): bounds the abelian part over the cyclotomic-like layer.
    pub abelian_bound: BigInt,
    /// [K:Q_p]: the rank of the layer above the abelian one.
    pub galois_rank: u64,
    pub dimension: u32,
    /// Stable rule identifiers for the four quantities.
    pub citations: [&'static str; 4],
}

/// The four structural bounds of the tower over (K, k, pi).
pub fn structure_report(
    pair: &PairSpec,
    overfield: &OverfieldData,
    n: u32,
) -> Result<StructureReport, FinitenessError> {
    if n == 0 {
        return Err(FinitenessError::BadInput("dimension must be positive".into()));
    }
    let p = pair.field.p();
    let e = pair.field.e() as u64;
    let (c, k_degree, residue_degree) = match overfield {
        OverfieldData::SameField => {
            let c = if p == 2 { 1 } else { 0 };
            (c, pair.degree as u64, 1u64)
        }
        OverfieldData::Extension {
            degree,
            residue_degree,
            conductor_bound,
        } => {
            let m = conductor_bound.ok_or(FinitenessError::MissingConductorBound)?;
            // 1 + p^t lies in 1 + pi^m O_k iff t e >= m
            let c = (m + e - 1) / e;
            (c, *degree, *residue_degree)
        }
    };
    let pb = big(p as i64);
    let base = pb.pow(c as u32) + BigInt::one(); // 1 + p^c
    let mut m = BigInt::one();
    let mut pw = BigInt::one();
    for _ in 1..=n {
        pw *= &base;
        let term = &pw - BigInt::one();
        m = m.lcm(&term);
    }
    let residue_bound = pb.pow(c as u32) * big(residue_degree as i64);
    let abelian_bound = pb.pow((c * k_degree) as u32);
    Ok(StructureReport {
        c,
        unipotence_exponent: m,
        residue_bound,
        abelian_bound,
        galois_rank: k_degree,
        dimension: n,
        citations: [
            "unipotence-lcm",
            "residue-extension-divisor",
            "abelian-layer-divisor",
            "tower-layer-rank",
        ],
    })
}

// ---------------------------------------------------------------------------
// Exceptional set
// ---------------------------------------------------------------------------

/// One symbolic membership equation x^(f_K m) = zeta Nr(beta), zeta running
/// over mu_{p-1}, with the norm taken from a compositum of degree m.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicEquation {
    /// Exponent f_K * m on the candidate norm x.
    pub exponent: u64,
    /// Minimal polynomial of the Weil integer beta (ascending coefficients).
    pub beta_poly: QPoly,
    /// The compositum degree m = [k_1 : Q_p] this equation assumes.
    pub multiplier: u64,
    /// Residue-degree factor f_K of the overfield.
    pub f_k: u64,
    /// zeta ranges over the roots of unity of order dividing this.
    pub zeta_order_divides: u64,
}

#[derive(Clone, Debug)]
pub struct ExceptionalSet {
    /// Fully expanded members, as exact algebraic numbers.
    pub explicit: Vec<AlgebraicNumber>,
    /// Unexpanded membership equations (candidate superset).
    pub symbolic: Vec<SymbolicEquation>,
    /// The recorded upper bound for the compositum degree [k_1 : Q_p].
    pub compositum_degree_bound: u64,
    /// The Weil integers adjoined to form the compositum.
    pub weil_integer_polys: Vec<QPoly>,
}

/// The finite exceptional set W = W_ab union q mu_{p-1} of norms that could
/// permit infinite torsion, for the base field Q_p and parameters f, g.
pub fn exceptional_set(
    f: u64,
    g: u64,
    field: &LocalFieldModel,
) -> Result<ExceptionalSet, FinitenessError> {
    if field.degree() != 1 {
        return Err(FinitenessError::NotBaseQp);
    }
    if f == 0 || g == 0 || f > MAX_EXCEPTIONAL_PARAM || g > MAX_EXCEPTIONAL_PARAM {
        return Err(FinitenessError::CapExceeded(format!(
            "parameters must satisfy 1 <= f, g <= {MAX_EXCEPTIONAL_PARAM}, got ({f}, {g})"
        )));
    }
    let p = field.p();
    let pb = big(p as i64);

    // the set T_1: p-Weil integers of weight <= f and degree <= 2g
    let mut t1: Vec<QPoly> = Vec::new();
    for w in 0..=f as u32 {
        for poly in enumerate_weil_polys(p, w, (2 * g) as usize)? {
            if !t1.contains(&poly) {
                t1.push(poly);
            }
        }
    }
    t1.sort_by(cmp_poly);

    // over-approximate [k_1 : Q_p] by the product of per-element local
    // degree bounds (quadratics refined by a discriminant square test)
    let mut bound: u64 = 1;
    for m in &t1 {
        let local = local_degree_bound(m, p);
        bound = bound.saturating_mul(local);
        if bound > MAX_COMPOSITUM_BOUND {
            return Err(FinitenessError::CapExceeded(format!(
                "compositum degree bound exceeds {MAX_COMPOSITUM_BOUND}"
            )));
        }
    }

    // explicit part: q mu_{p-1}
    let mut explicit: Vec<AlgebraicNumber> = Vec::new();
    for d in 1..=(p - 1).max(1) {
        if (p - 1) % d != 0 && !(p == 2 && d == 1) {
            continue;
        }
        // minimal polynomial of p zeta_d: p^phi(d) Phi_d(x/p)
        let phi_d = cyclotomic(d);
        let scaled = phi_d
            .scale_arg(&BigRational::new(BigInt::one(), pb.clone()))
            .monic();
        push_unique(&mut explicit, AlgebraicNumber::from_min_poly(scaled)?);
    }

    // symbolic part
    let count = t1.len() as u64 * f * bound;
    if count as usize > MAX_SYMBOLIC_EQUATIONS {
        return Err(FinitenessError::CapExceeded(format!(
            "{count} symbolic equations exceed the cap"
        )));
    }
    let mut symbolic: Vec<SymbolicEquation> = Vec::new();
    for beta in &t1 {
        for fk in 1..=f {
            for m in 1..=bound {
                symbolic.push(SymbolicEquation {
                    exponent: fk * m,
                    beta_poly: beta.clone(),
                    multiplier: m,
                    f_k: fk,
                    zeta_order_divides: p - 1,
                });
                // expand small equations with rational norm candidates
                if fk * m <= 4 {
                    for r in rational_norm_candidates(beta, m) {
                        expand_small_equation(&mut explicit, fk * m, &r, p)?;
                    }
                }
            }
        }
    }
    symbolic.sort_by(|a, b| {
        (a.exponent, a.multiplier, a.f_k)
            .cmp(&(b.exponent, b.multiplier, b.f_k))
            .then_with(|| cmp_poly(&a.beta_poly, &b.beta_poly))
    });
    explicit.sort_by(|a, b| cmp_poly(a.min_poly(), b.min_poly()));
    Ok(ExceptionalSet {
        explicit,
        symbolic,
        compositum_degree_bound: bound,
        weil_integer_polys: t1,
    })
}

/// Whether the norm of the uniformizer lies in the explicit part of the set.
pub fn explicit_contains(set: &ExceptionalSet, value: &BigRational) -> bool {
    set.explicit
        .iter()
        .any(|a| a.min_poly().eval(value).is_zero())
}

fn push_unique(list: &mut Vec<AlgebraicNumber>, a: AlgebraicNumber) {
    if !list.iter().any(|x| x.min_poly() == a.min_poly()) {
        list.push(a);
    }
}

/// Rational candidate values for the norm of beta from a compositum of
/// degree m: all-conjugate products (even splits) and rational powers.
fn rational_norm_candidates(beta: &QPoly, m: u64) -> Vec<BigRational> {
    let deg = beta.deg();
    let mut out = Vec::new();
    if deg == 1 {
        let c = -beta.coeff(0);
        out.push(rat_pow(&c, m as i64));
    } else if deg == 2 && m % 2 == 0 {
        let prod = beta.coeff(0); // product of the conjugate pair
        out.push(rat_pow(&prod, (m / 2) as i64));
    }
    out
}

/// Append the roots of x^n = zeta r for rational zeta in mu_{p-1} (i.e.
/// zeta = 1, and -1 when p is odd), as irreducible factors.
fn expand_small_equation(
    explicit: &mut Vec<AlgebraicNumber>,
    n: u64,
    r: &BigRational,
    p: u64,
) -> Result<(), FinitenessError> {
    let mut zetas = vec![BigRational::one()];
    if p > 2 {
        zetas.push(-BigRational::one());
    }
    for z in zetas {
        let rhs = z * r;
        let mut coeffs = vec![BigRational::zero(); n as usize + 1];
        coeffs[0] = -rhs;
        coeffs[n as usize] = BigRational::one();
        let poly = QPoly::from_coeffs(coeffs);
        for (factor, _) in factor_rational(&poly) {
            push_unique(explicit, AlgebraicNumber::from_min_poly(factor)?);
        }
    }
    Ok(())
}

/// Upper bound for the degree of Q_p(root of m) over Q_p.
fn local_degree_bound(m: &QPoly, p: u64) -> u64 {
    let deg = m.deg() as u64;
    if deg != 2 {
        return deg;
    }
    // quadratic: splits iff the discriminant is a p-adic square
    let b = m.coeff(1);
    let c = m.coeff(0);
    let disc = &b * &b - BigRational::from_integer(big(4)) * &c;
    let disc_int = disc.numer() * disc.denom(); // same square class
    if is_padic_square(&disc_int, p) {
        1
    } else {
        2
    }
}

fn is_padic_square(n: &BigInt, p: u64) -> bool {
    if n.is_zero() {
        return true;
    }
    let pb = big(p as i64);
    let mut v = 0u64;
    let mut u = n.clone();
    while (&u % &pb).is_zero() {
        u /= &pb;
        v += 1;
    }
    if v % 2 == 1 {
        return false;
    }
    if p == 2 {
        u.mod_floor(&big(8)) == BigInt::one()
    } else {
        // Euler criterion
        let exp = (pb.clone() - BigInt::one()) / big(2);
        u.modpow(&exp, &pb) == BigInt::one().mod_floor(&pb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;
    use crate::padic::{make_field, q_p};

    fn pair_qp(p: u64) -> PairSpec {
        let k = q_p(p);
        let pi = k.uniformizer();
        PairSpec::new(&k, pi, None).unwrap()
    }

    fn pair_qp_neg(p: u64) -> PairSpec {
        let k = q_p(p);
        let pi = k.from_integer(-(p as i64));
        PairSpec::new(&k, pi, None).unwrap()
    }

    fn pair_q5_30() -> PairSpec {
        let k = q_p(5);
        PairSpec::new(&k, k.from_integer(30), None).unwrap()
    }

    fn pair_sqrt2() -> PairSpec {
        let k = make_field(
            2,
            &[big(-1), big(1)],
            &[vec![big(-2)], vec![big(0)], vec![big(1)]],
            "Q_2(sqrt2)",
        )
        .unwrap();
        let pi = k.uniformizer();
        PairSpec::new(&k, pi, Some(2)).unwrap()
    }

    #[test]
    fn pair_validation() {
        let k = q_p(5);
        // 25 is not a uniformizer
        assert!(matches!(
            PairSpec::new(&k, k.from_integer(25), None),
            Err(FinitenessError::NotUniformizer)
        ));
        // 30 is
        let p30 = pair_q5_30();
        assert_eq!(p30.norm(), &rat_int(30));
        assert_eq!(p30.galois_degree(), 1);
    }

    #[test]
    fn base_pair_conditions() {
        // (Q_p, p): W fails (weight must be 1, |p| = p has weight 2), mu holds
        for p in [2u64, 3, 5, 7] {
            let pair = pair_qp(p);
            let w = condition_w(&pair);
            assert!(!w.holds, "W should fail for (Q_{p}, {p})");
            let mu = condition_mu(&pair);
            assert!(mu.holds);
            assert_eq!(mu.order, Some(1));
        }
        // (Q_p, -p): same but order 2
        let pair = pair_qp_neg(5);
        assert!(!condition_w(&pair).holds);
        let mu = condition_mu(&pair);
        assert!(mu.holds);
        assert_eq!(mu.order, Some(2));
        // (Q_5, 30): both fail
        let p30 = pair_q5_30();
        assert!(!condition_w(&p30).holds);
        assert!(!condition_mu(&p30).holds);
        // (Q_2(sqrt2), sqrt2): W holds with witness c = 1 (weight 2); the
        // norm is -2, so -2/2 = -1 makes mu hold with order 2
        let ps = pair_sqrt2();
        let w = condition_w(&ps);
        assert!(w.holds);
        assert_eq!(w.witnesses, vec![1]);
        let mu = condition_mu(&ps);
        assert!(mu.holds);
        assert_eq!(mu.order, Some(2));
    }

    #[test]
    fn lubin_tate_character_reduction() {
        for pair in [pair_qp(2), pair_qp(5), pair_q5_30(), pair_sqrt2()] {
            let spec = lubin_tate_character_spec(&pair).unwrap();
            assert_eq!(spec.weight_sum, 1);
            assert_eq!(spec.norm_delta(), pair.norm());
            let w = condition_w(&pair);
            let wp = condition_w_prime(&spec).unwrap();
            assert_eq!(w.holds, wp.holds, "W/W' disagree for {}", pair.field().name());
            let mu = condition_mu(&pair);
            let mup = condition_mu_prime(&spec);
            assert_eq!(mu.holds, mup.holds);
            assert_eq!(mu.order, mup.order);
        }
    }

    #[test]
    fn character_inverse_flips() {
        let pair = pair_qp(3);
        let spec = lubin_tate_character_spec(&pair).unwrap();
        let inv = spec.inverse().unwrap();
        assert_eq!(inv.weight_sum, -1);
        assert_eq!(
            inv.norm_delta(),
            &spec.norm_delta().clone().recip()
        );
        // mu' is invariant under the flip
        assert_eq!(
            condition_mu_prime(&spec).holds,
            condition_mu_prime(&inv).holds
        );
    }

    #[test]
    fn verdict_table() {
        // (Q_p, p): general ExistsInfinite, AV AllFinite
        let pair = pair_qp(5);
        let r1 = verdict_for_pair(&pair, GroupClass::CommutativeGeneral, VerdictContext::Ktilde)
            .unwrap();
        assert_eq!(r1.verdict, Verdict::ExistsInfinite);
        let r2 =
            verdict_for_pair(&pair, GroupClass::AvPotentialGood, VerdictContext::Ktilde).unwrap();
        assert_eq!(r2.verdict, Verdict::AllFinite);
        // (Q_5, 30): general AllFinite
        let r3 = verdict_for_pair(
            &pair_q5_30(),
            GroupClass::CommutativeGeneral,
            VerdictContext::Ktilde,
        )
        .unwrap();
        assert_eq!(r3.verdict, Verdict::AllFinite);
        // (Q_2(sqrt2), sqrt2): AV Unknown
        let r4 = verdict_for_pair(
            &pair_sqrt2(),
            GroupClass::AvPotentialGood,
            VerdictContext::Ktilde,
        )
        .unwrap();
        assert_eq!(r4.verdict, Verdict::Unknown);
        // torus with mu: ExistsInfinite
        let r5 =
            verdict_for_pair(&pair_qp(2), GroupClass::Torus, VerdictContext::Ktilde).unwrap();
        assert_eq!(r5.verdict, Verdict::ExistsInfinite);
        // context mismatch
        assert!(matches!(
            verdict_for_pair(&pair, GroupClass::Torus, VerdictContext::CharacterField),
            Err(FinitenessError::ContextMismatch)
        ));
    }

    #[test]
    fn character_verdicts() {
        let pair = pair_qp(5);
        let spec = lubin_tate_character_spec(&pair).unwrap();
        // mu' holds (norm p, q^h = p), W' fails: general class Unknown
        let r = verdict_for_character(
            &spec,
            GroupClass::CommutativeGeneral,
            VerdictContext::CharacterField,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Unknown);
        // AV class: W' fails -> AllFinite
        let r2 = verdict_for_character(
            &spec,
            GroupClass::AvPotentialGood,
            VerdictContext::CharacterField,
        )
        .unwrap();
        assert_eq!(r2.verdict, Verdict::AllFinite);
        // zero weight sum: AllFinite for every class
        let zero = CharacterSpec::new(
            2,
            AlgebraicNumber::from_integer(3),
            vec![1, -1],
            2,
            big(5),
            true,
        )
        .unwrap();
        for class in [
            GroupClass::Torus,
            GroupClass::AvPotentialGood,
            GroupClass::CommutativeGeneral,
        ] {
            let r = verdict_for_character(&zero, class, VerdictContext::CharacterField).unwrap();
            assert_eq!(r.verdict, Verdict::AllFinite);
            assert_eq!(r.citation, "zero-weight-sum");
        }
        // missing flag is an error
        let unflagged = CharacterSpec::new(
            1,
            AlgebraicNumber::from_integer(2),
            vec![1],
            1,
            big(2),
            false,
        )
        .unwrap();
        assert!(matches!(
            verdict_for_character(&unflagged, GroupClass::Torus, VerdictContext::CharacterField),
            Err(FinitenessError::MissingFiniteResidueFlag)
        ));
        // h = 0 behind condition_w_prime is an error
        let zero2 = CharacterSpec::new(
            2,
            AlgebraicNumber::from_integer(3),
            vec![2, -2],
            2,
            big(5),
            true,
        )
        .unwrap();
        assert!(matches!(
            condition_w_prime(&zero2),
            Err(FinitenessError::ZeroWeightSum)
        ));
    }

    #[test]
    fn character_example_one_plus_i() {
        // delta = 1 + i over quadratic E, q_k = 2, h = 1, d~ = 2:
        // Nr = 2; weight 2/c: c = 1 passes
        let delta = crate::algebraic::algebraic_from_poly(&QPoly::from_ints(&[2, -2, 1])).unwrap();
        let spec = CharacterSpec::new(2, delta, vec![1, 0], 2, big(2), true).unwrap();
        assert_eq!(spec.norm_delta(), &rat_int(2));
        let w = condition_w_prime(&spec).unwrap();
        assert!(w.holds);
        assert_eq!(w.witnesses, vec![1]);
        let mu = condition_mu_prime(&spec);
        assert!(mu.holds);
        assert_eq!(mu.order, Some(1));
    }

    #[test]
    fn rule_table_is_total() {
        for class in [
            GroupClass::Torus,
            GroupClass::AvPotentialGood,
            GroupClass::CommutativeGeneral,
        ] {
            for w in [false, true] {
                for mu in [false, true] {
                    let (v, cite, _) = ktilde_rule(class, w, mu);
                    assert!(!cite.is_empty());
                    let _ = v;
                    for h0 in [false, true] {
                        let (v2, cite2, _) = character_rule(class, h0, w, mu);
                        assert!(!cite2.is_empty());
                        assert!(
                            v2 != Verdict::ExistsInfinite,
                            "character context never claims infiniteness"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn structure_formulas() {
        // (Q_5, 5), K = k, n = 3: c = 0, lcm(1, 3, 7) = 21
        let pair = pair_qp(5);
        let r = structure_report(&pair, &OverfieldData::SameField, 3).unwrap();
        assert_eq!(r.c, 0);
        assert_eq!(r.unipotence_exponent, big(21));
        assert_eq!(r.residue_bound, big(1));
        assert_eq!(r.abelian_bound, big(1));
        assert_eq!(r.galois_rank, 1);
        // (Q_2, 2), K = k, n = 2: c = 1, lcm(2, 8) = 8, abelian bound 2
        let p2 = pair_qp(2);
        let r2 = structure_report(&p2, &OverfieldData::SameField, 2).unwrap();
        assert_eq!(r2.c, 1);
        assert_eq!(r2.unipotence_exponent, big(8));
        assert_eq!(r2.abelian_bound, big(2));
        // n = 1: single term (1 + p^c) - 1 = p^c
        let r3 = structure_report(&p2, &OverfieldData::SameField, 1).unwrap();
        assert_eq!(r3.unipotence_exponent, big(2));
        // divisibility m(c, n) | m(c, n+1)
        let r4 = structure_report(&p2, &OverfieldData::SameField, 3).unwrap();
        assert!(r4
            .unipotence_exponent
            .mod_floor(&r2.unipotence_exponent)
            .is_zero());
        // extension data requires the conductor bound
        let ext = OverfieldData::Extension {
            degree: 2,
            residue_degree: 2,
            conductor_bound: None,
        };
        assert!(matches!(
            structure_report(&pair, &ext, 2),
            Err(FinitenessError::MissingConductorBound)
        ));
        let ext2 = OverfieldData::Extension {
            degree: 2,
            residue_degree: 2,
            conductor_bound: Some(3),
        };
        let r5 = structure_report(&pair, &ext2, 2).unwrap();
        assert_eq!(r5.c, 3); // ceil(3/1)
        assert_eq!(r5.residue_bound, big(250)); // 5^3 * 2
        assert_eq!(r5.galois_rank, 2);
    }

    #[test]
    fn exceptional_set_small_primes() {
        for p in [2u64, 5] {
            let k = q_p(p);
            let set = exceptional_set(1, 1, &k).unwrap();
            // explicit part contains q mu_{p-1}: in particular p itself
            assert!(explicit_contains(&set, &rat_int(p as i64)));
            if p > 2 {
                assert!(explicit_contains(&set, &rat_int(-(p as i64))));
            }
            // the unity-infinite pair (Q_p, p) has its norm in the set
            let pair = pair_qp(p);
            assert!(explicit_contains(&set, pair.norm()));
            // deterministic: a second run gives identical output
            let set2 = exceptional_set(1, 1, &k).unwrap();
            assert_eq!(set.symbolic, set2.symbolic);
            assert_eq!(set.explicit.len(), set2.explicit.len());
            assert!(!set.symbolic.is_empty());
        }
        // base-field restriction
        let kr = make_field(
            2,
            &[big(-1), big(1)],
            &[vec![big(-2)], vec![big(0)], vec![big(1)]],
            "Q_2(sqrt2)",
        )
        .unwrap();
        assert!(matches!(
            exceptional_set(1, 1, &kr),
            Err(FinitenessError::NotBaseQp)
        ));
    }

    #[test]
    fn exceptional_set_contains_quartic_unity_scale() {
        // p = 5: 5 mu_4 includes 5i with minimal polynomial x^2 + 25
        let k = q_p(5);
        let set = exceptional_set(1, 1, &k).unwrap();
        let target = QPoly::from_ints(&[25, 0, 1]);
        assert!(set.explicit.iter().any(|a| a.min_poly() == &target));
    }

    #[test]
    fn padic_square_detection() {
        assert!(is_padic_square(&big(-4), 5)); // -1 is a square mod 5
        assert!(!is_padic_square(&big(-3), 5));
        assert!(!is_padic_square(&big(-20), 5)); // odd valuation
        assert!(is_padic_square(&big(17), 2)); // 17 = 1 mod 8
        assert!(!is_padic_square(&big(-4), 2)); // -1 = 7 mod 8
        assert!(!is_padic_square(&big(-7), 5)); // -7 = 3 mod 5
        assert!(is_padic_square(&big(-7), 2)); // -7 = 1 mod 8
    }
}
