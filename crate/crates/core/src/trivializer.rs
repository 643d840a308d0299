//! Explicit AC traces trivializing `P_w`, and the tower lower bound on
//! `acc(P_{w_n})`.
//!
//! The trace has four blocks:
//! 1. multiply `ρ = â_1 a_0 â_1^-1 w^-1` by the certificate's conjugates,
//!    then conjugate by `â_1^-1`, leaving `a_0`;
//! 2. the same on the hatted mixing relator, leaving `â_0`;
//! 3. strip `a_0` from each relator of `R` (and `â_0` from `R̂`), one move
//!    per occurrence;
//! 4. replay a trivialization of `P̄` on each block.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::ac::{verify_trivialization, Move, MoveTrace};
use crate::constructions::{build_pw, Doubled, DoublingSpec};
use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::solvers::certificate::{hat_certificate, AreaCertificate};
use crate::tower::delta_k;
use crate::word::{Letter, Word};

/// Everything the construction consumes.
#[derive(Clone, Debug)]
pub struct TrivializationPlan {
    pub spec: DoublingSpec,
    /// `w` as a product of conjugates of seed relators.
    pub cert_w: AreaCertificate,
    /// A trivialization of `P̄`, the seed with `a_0` deleted.
    pub trace_bar: MoveTrace,
}

impl TrivializationPlan {
    pub fn new(spec: DoublingSpec, cert_w: AreaCertificate, trace_bar: MoveTrace) -> Result<TrivializationPlan> {
        let plan = TrivializationPlan { spec, cert_w, trace_bar };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        self.cert_w.check(&self.spec.seed)?;
        if *self.cert_w.target() != self.spec.w {
            return Err(Error::Plan("certificate target differs from w".into()));
        }
        let bar = self.spec.seed.delete_generator(self.spec.a0)?.presentation;
        if self.trace_bar.initial != bar {
            return Err(Error::Plan(format!("trace_bar starts from {} rather than {bar}", self.trace_bar.initial)));
        }
        if let Some(m) = self.trace_bar.moves.iter().find(|m| !m.is_ac()) {
            return Err(Error::Plan(format!("trace_bar may only use AC moves, found {m:?}")));
        }
        if !verify_trivialization(&self.trace_bar, false)?.accepted {
            return Err(Error::Plan("trace_bar does not trivialize P̄".into()));
        }
        Ok(())
    }

    /// `Σ_{r ∈ R} |r|_0`.
    pub fn deleted_letters(&self) -> usize {
        self.spec.seed.relators().iter().map(|r| r.occurrences(self.spec.a0)).sum()
    }

    /// `2·|trace_bar| + 2·(N + 1) + 2·Σ|r|_0`.
    pub fn move_budget(&self) -> usize {
        2 * self.trace_bar.dihedral_count() + 2 * (self.cert_w.len() + 1) + 2 * self.deleted_letters()
    }
}

/// Moves that remove every `g^{±1}` from relator `target`, using the
/// relator `source = g`. Each move strips the last occurrence: for
/// `r = U g^e V` with `V` free of `g`, `r · V^-1 g^-e V = U V`.
pub fn elimination_moves(relator: &Word, g: usize, target: usize, source: usize) -> Vec<Move> {
    let mut r = relator.clone();
    let mut moves = Vec::new();
    while let Some(pos) = r.letters().iter().rposition(|l| l.generator() == g) {
        let letter = r.letters()[pos];
        let v = Word::from_letters(r.letters()[pos + 1..].iter().copied());
        let sign: i8 = if letter.is_positive() { -1 } else { 1 };
        let u = v.inverse();
        let factor = Word::letter(Letter::new(g, !letter.is_positive())).conjugate(&u);
        r = r.concat(&factor);
        moves.push(Move::Dihedral { j: target, i: source, sign, u });
    }
    moves
}

/// Audit of an emitted trace against the move budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrivializationAudit {
    pub certificate_steps: usize,
    pub trace_bar_moves: usize,
    pub deleted_letters: usize,
    pub budget: usize,
    pub dihedral_count: usize,
    pub within_budget: bool,
}

#[derive(Clone, Debug)]
pub struct Trivialization {
    pub doubled: Doubled,
    pub trace: MoveTrace,
    pub audit: TrivializationAudit,
}

pub fn trivialize_pw(plan: &TrivializationPlan) -> Result<Trivialization> {
    plan.validate()?;
    let spec = &plan.spec;
    let doubled = build_pw(spec)?;
    let layout = doubled.layout;
    let n = layout.seed_relators;
    let mut moves = Vec::new();

    // blocks 1 and 2
    let hatted = hat_certificate(&plan.cert_w, &layout);
    let hat_a1 = layout.hat_generator(spec.a1);
    for (cert, mix, outer) in [
        (&plan.cert_w, layout.mixing_relator(), hat_a1),
        (&hatted, layout.hatted_mixing_relator(), spec.a1),
    ] {
        for s in cert.steps() {
            moves.push(Move::Dihedral { j: mix, i: s.relator, sign: s.sign, u: s.conjugator.clone() });
        }
        moves.push(Move::Conjugate { i: mix, u: Word::letter(Letter::neg(outer)) });
    }

    // block 3
    let hat_a0 = layout.hat_generator(spec.a0);
    for (i, r) in spec.seed.relators().iter().enumerate() {
        moves.extend(elimination_moves(r, spec.a0, i, layout.mixing_relator()));
        moves.extend(elimination_moves(&layout.hat_word(r), hat_a0, n + i, layout.hatted_mixing_relator()));
    }
    let expected = 2 * (plan.cert_w.len() + 1) + 2 * plan.deleted_letters();
    if moves.len() != expected {
        return Err(Error::Plan(format!("construction emitted {} moves where {expected} were expected", moves.len())));
    }

    // block 4: generator h of P̄ is seed generator h or h + 1
    let a0 = spec.a0;
    let unshift = move |h: usize| if h >= a0 { h + 1 } else { h };
    let g = layout.seed_generators;
    let hatted_name = move |h: usize| unshift(h) + g;
    for m in &plan.trace_bar.moves {
        moves.push(m.relocate(0, unshift));
    }
    for m in &plan.trace_bar.moves {
        moves.push(m.relocate(n, hatted_name));
    }

    let trace = MoveTrace { initial: doubled.presentation.clone(), moves };
    let dihedral_count = trace.dihedral_count();
    let audit = TrivializationAudit {
        certificate_steps: plan.cert_w.len(),
        trace_bar_moves: plan.trace_bar.dihedral_count(),
        deleted_letters: plan.deleted_letters(),
        budget: plan.move_budget(),
        dihedral_count,
        within_budget: dihedral_count <= plan.move_budget(),
    };
    Ok(Trivialization { doubled, trace, audit })
}

/// A trivialization of a one-generator presentation `< x | x^{±1} >`.
pub fn cyclic_trace_bar(bar: &Presentation) -> Option<MoveTrace> {
    if bar.generator_count() != 1 || bar.relators().len() != 1 {
        return None;
    }
    let r = &bar.relators()[0];
    let mut trace = MoveTrace::new(bar.clone());
    if *r == Word::generator(0) {
        Some(trace)
    } else if *r == Word::letter(Letter::neg(0)) {
        trace.moves.push(Move::Invert { i: 0 });
        Some(trace)
    } else {
        None
    }
}

/// A plan for `S_k` with `a_0 = t`, `a_1 = x`, `w = w_n`, using the given
/// certificate for `w_n`.
pub fn seed_family_plan(n: u64, k: u32, cert_w: AreaCertificate) -> Result<TrivializationPlan> {
    let spec = DoublingSpec::seed_family(k, n)?;
    let bar = spec.seed.delete_generator(spec.a0)?.presentation;
    let trace_bar = cyclic_trace_bar(&bar)
        .ok_or_else(|| Error::Plan(format!("no trivialization known for {bar}; P_w is trivial only when P̄ is")))?;
    TrivializationPlan::new(spec, cert_w, trace_bar)
}

/// The lower bound `⌈ln Δ_k(m)⌉ - 1` with `m = ⌊log₂ n⌋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LowerBound {
    Exact(BigUint),
    /// Too large to write down: `⌈Δ_k(m-1) · ln k⌉ - 1`, where `Δ_k(m-1)`
    /// is a tower of `levels` exponentials.
    Tower { levels: u64, expression: String },
}

impl LowerBound {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            LowerBound::Exact(v) => Some(v),
            LowerBound::Tower { .. } => None,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            LowerBound::Exact(v) => serde_json::json!({ "exact": v.to_string() }),
            LowerBound::Tower { levels, expression } => {
                serde_json::json!({ "tower_levels": levels, "expression": expression })
            }
        }
    }
}

impl std::fmt::Display for LowerBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LowerBound::Exact(v) => write!(f, "{v}"),
            LowerBound::Tower { expression, .. } => write!(f, "{expression}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccBounds {
    pub n: BigUint,
    pub k: u32,
    /// `⌊log₂ n⌋`
    pub m: u64,
    pub lower: LowerBound,
    pub upper: Option<usize>,
}

impl AccBounds {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n.to_string(),
            "k": self.k,
            "m": self.m,
            "lower": self.lower.to_json_value(),
            "upper": self.upper,
        })
    }
}

/// Largest tower value whose logarithm is computed exactly.
const EXACT_EXPONENT_BITS: u64 = 1 << 12;

pub fn acc_bounds(n: &BigUint, k: u32, trace: Option<&MoveTrace>) -> Result<AccBounds> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
    }
    if *n < BigUint::from(2u32) {
        return Err(Error::InvalidParameter("acc_bounds needs n >= 2".into()));
    }
    let m = n.bits() - 1;
    let symbolic = || LowerBound::Tower {
        levels: m,
        expression: format!("ceil(ln({k}) * D_{k}({})) - 1 where D_{k}(0) = {k}, D_{k}(j+1) = {k}^D_{k}(j)", m - 1),
    };
    let lower = match u32::try_from(m - 1).ok().map(|e| delta_k(k, e, EXACT_EXPONENT_BITS)) {
        Some(Ok(e)) => LowerBound::Exact(ceil_times_ln(&e, k) - BigUint::one()),
        _ => symbolic(),
    };
    Ok(AccBounds { n: n.clone(), k, m, lower, upper: trace.map(MoveTrace::dihedral_count) })
}

/// `⌈e · ln k⌉` for `e ≥ 1`, certified by interval arithmetic.
pub fn ceil_times_ln(e: &BigUint, k: u32) -> BigUint {
    let e = BigInt::from(e.clone());
    let mut precision = e.bits() + 64;
    loop {
        let (lo, hi) = ln_bracket(k, precision);
        let scale = BigInt::one() << precision;
        let a = ceil_div(&(&e * lo), &scale);
        let b = ceil_div(&(&e * hi), &scale);
        if a == b {
            return a.to_biguint().expect("positive");
        }
        precision *= 2;
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.is_positive() {
        q + 1
    } else {
        q
    }
}

/// Integers `lo ≤ 2^p · ln k ≤ hi`.
fn ln_bracket(k: u32, precision: u64) -> (BigInt, BigInt) {
    let guard = 32;
    let p = precision + guard;
    // k = 2^j · r with 1 ≤ r < 2, ln r = 2 atanh((k - 2^j) / (k + 2^j))
    let j = 31 - k.leading_zeros();
    let (ln2, err2) = atanh_fixed(&BigInt::one(), &BigInt::from(3), p);
    let pow = BigInt::from(1u64 << j);
    let (lnr, errr) = atanh_fixed(&(BigInt::from(k) - &pow), &(BigInt::from(k) + &pow), p);
    let value = (ln2 * 2 * j) + lnr * 2;
    let err = BigInt::from(2 * (u64::from(j) * err2 + errr) + 2);
    let lo = (&value - &err) >> guard;
    let hi = ((&value + &err) >> guard) + 1;
    (lo, hi)
}

/// `2^p · atanh(a/b)` truncated, with a bound on the error in ulps.
fn atanh_fixed(a: &BigInt, b: &BigInt, p: u64) -> (BigInt, u64) {
    if a.is_zero() {
        return (BigInt::zero(), 0);
    }
    let one = BigInt::one() << p;
    let b2 = b * b;
    let a2 = a * a;
    // power = 2^p (a/b)^(2i+1)
    let mut power = (&one * a) / b;
    let mut sum = BigInt::zero();
    let mut terms = 0u64;
    let mut i = 0u64;
    while !power.is_zero() {
        sum += &power / (2 * i + 1);
        power = power * &a2 / &b2;
        terms += 1;
        i += 1;
    }
    // each truncation loses under one ulp; the tail is below one ulp too
    (sum, 2 * terms + 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::solvers::certificate::wn_certificate;
    use num_traits::ToPrimitive;

    #[test]
    fn elimination_takes_one_move_per_letter() {
        let p = fixtures::seed_s(2).unwrap();
        let r = &p.relators()[0];
        let moves = elimination_moves(r, fixtures::T, 0, 1);
        assert_eq!(moves.len(), 4);
        let mut q = Presentation::new(p.alphabet().clone(), vec![r.clone(), Word::generator(fixtures::T)]).unwrap();
        for m in &moves {
            crate::ac::apply_in_place(&mut q, m).unwrap();
        }
        let (deleted, count) = r.delete_generator(fixtures::T);
        assert_eq!(count, 4);
        assert_eq!(q.relators()[0], deleted);
    }

    #[test]
    fn seed_family_traces_verify() {
        for n in [2u64, 3, 4] {
            let plan = seed_family_plan(n, 2, wn_certificate(n, 2, 1000).unwrap()).unwrap();
            let out = trivialize_pw(&plan).unwrap();
            let v = verify_trivialization(&out.trace, false).unwrap();
            assert!(v.accepted, "n = {n}");
            assert!(out.audit.within_budget);
            assert_eq!(v.dihedral_count, out.audit.budget);
            assert_eq!(out.audit.deleted_letters, 4);
        }
    }

    #[test]
    fn plan_validation() {
        let cert = wn_certificate(2, 2, 100).unwrap();
        assert!(seed_family_plan(4, 2, cert.clone()).is_err());
        assert!(matches!(seed_family_plan(2, 3, wn_certificate(2, 3, 100).unwrap()), Err(Error::Plan(_))));
        // w_1 is empty and needs no certificate steps
        let empty = AreaCertificate::new(&fixtures::seed_s(2).unwrap(), Word::empty(), vec![]).unwrap();
        let out = trivialize_pw(&seed_family_plan(1, 2, empty).unwrap()).unwrap();
        assert!(verify_trivialization(&out.trace, false).unwrap().accepted);
    }

    #[test]
    fn ln_brackets_are_tight() {
        for k in [2u32, 3, 5, 10, 1000] {
            let (lo, hi) = ln_bracket(k, 60);
            let approx = lo.to_f64().unwrap() / 2f64.powi(60);
            assert!((approx - f64::from(k).ln()).abs() < 1e-12, "k = {k}");
            assert!(&hi - &lo <= BigInt::from(4));
        }
    }

    #[test]
    fn small_acc_bounds() {
        let b = acc_bounds(&BigUint::from(2u32), 2, None).unwrap();
        assert_eq!(b.lower, LowerBound::Exact(BigUint::one()));
        // ln Δ_2(2) = 4 ln 2 = 2.77...
        assert_eq!(acc_bounds(&BigUint::from(4u32), 2, None).unwrap().lower, LowerBound::Exact(BigUint::from(2u32)));
        // ln Δ_3(2) = 27 ln 3 = 29.66...
        assert_eq!(acc_bounds(&BigUint::from(7u32), 3, None).unwrap().lower, LowerBound::Exact(BigUint::from(29u32)));
        assert!(acc_bounds(&BigUint::one(), 2, None).is_err());
    }

    #[test]
    fn n16_bound_is_exact() {
        let b = acc_bounds(&BigUint::from(16u32), 2, None).unwrap();
        // 65536 ln 2 = 45426.09...
        assert_eq!(b.lower, LowerBound::Exact(BigUint::from(45426u32)));
    }

    #[test]
    fn huge_n_is_symbolic() {
        let n = BigUint::one() << 1_000_000u32;
        let b = acc_bounds(&n, 2, None).unwrap();
        assert_eq!(b.m, 1_000_000);
        assert!(matches!(b.lower, LowerBound::Tower { levels: 1_000_000, .. }));
        assert!(acc_bounds(&BigUint::from(32u32), 2, None).unwrap().lower.exact().is_none());
    }
}
