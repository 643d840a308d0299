//! The word problem in `S_k` by Britton reduction over `BS(1,k)`, and in
//! `B_m`, `B_∞` through the embedding `x_i ↦ t^i x t^-i`.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::constructions::{phi, IndexedWord};
use crate::error::{Error, Result};
use crate::fixtures::{T, X};
use crate::solvers::affine::AffinePair;
use crate::tower::DEFAULT_BIT_BUDGET;
use crate::word::Word;

/// `g_0 t^{ε_1} g_1 … t^{ε_r} g_r`, Britton-reduced: there is no
/// `t g t^-1` with `g ∈ <x>` and no `t^-1 g t` with `g ∈ <y>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrittonState {
    pub syllables: Vec<AffinePair>,
    pub stable: Vec<i8>,
}

impl BrittonState {
    pub fn identity(k: u32) -> BrittonState {
        BrittonState { syllables: vec![AffinePair::identity(k)], stable: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.stable.is_empty() && self.syllables[0].is_identity()
    }

    /// Number of stable letters left after reduction.
    pub fn t_length(&self) -> usize {
        self.stable.len()
    }

    fn last(&mut self) -> &mut AffinePair {
        self.syllables.last_mut().expect("never empty")
    }

    fn push_x(&mut self, sign: i64) {
        self.last().mul_x(sign);
    }

    fn push_t(&mut self, sign: i8, budget_bits: u64) -> Result<()> {
        if self.stable.last() == Some(&-sign) {
            let g = self.syllables.last().expect("never empty");
            let k = g.k();
            let pinched = if sign < 0 {
                // t g t^-1 with g = x^n becomes y^n
                g.as_x_power(budget_bits)?.map(|n| AffinePair::y_power(k, n))
            } else {
                // t^-1 g t with g = y^n becomes x^n
                g.as_y_power().map(|n| AffinePair::x_power(k, n))
            };
            if let Some(h) = pinched {
                self.syllables.pop();
                self.stable.pop();
                self.last().mul_assign(&h);
                return Ok(());
            }
        }
        let k = self.syllables[0].k();
        self.stable.push(sign);
        self.syllables.push(AffinePair::identity(k));
        Ok(())
    }
}

impl fmt::Display for BrittonState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.syllables[0])?;
        for (s, g) in self.stable.iter().zip(&self.syllables[1..]) {
            write!(f, " t^{s} {g}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrittonOutcome {
    pub trivial: bool,
    pub reduced: BrittonState,
}

#[derive(Serialize)]
struct OutcomeJson {
    trivial: bool,
    t_length: usize,
    reduced: String,
}

impl BrittonOutcome {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(OutcomeJson {
            trivial: self.trivial,
            t_length: self.reduced.t_length(),
            reduced: self.reduced.to_string(),
        })
        .expect("plain data")
    }
}

/// Decides `w = 1` in `S_k` for a word over `{x, t}`.
pub fn britton_solve(w: &Word, k: u32) -> Result<BrittonOutcome> {
    britton_solve_with_budget(w, k, DEFAULT_BIT_BUDGET)
}

pub fn britton_solve_with_budget(w: &Word, k: u32, budget_bits: u64) -> Result<BrittonOutcome> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("S_k needs k >= 2, got {k}")));
    }
    w.check_alphabet(2)?;
    let mut state = BrittonState::identity(k);
    for l in w.letters() {
        match l.generator() {
            X => state.push_x(l.sign()),
            T => state.push_t(l.sign() as i8, budget_bits)?,
            _ => unreachable!("checked alphabet"),
        }
    }
    Ok(BrittonOutcome { trivial: state.is_identity(), reduced: state })
}

/// Decides `v = 1` in `B_m`, requiring every index in `0..=m`.
pub fn solve_bm(v: &IndexedWord, m: usize, k: u32) -> Result<bool> {
    if let Some((lo, hi)) = v.index_range() {
        if lo < 0 || hi > m as i64 {
            return Err(Error::InvalidParameter(format!("indices {lo}..{hi} are outside 0..{m}")));
        }
    }
    solve_b_infinity(v, k)
}

/// Decides `v = 1` in `B_∞`.
pub fn solve_b_infinity(v: &IndexedWord, k: u32) -> Result<bool> {
    Ok(britton_solve(&phi(v), k)?.trivial)
}

/// The exponent `E` with `w = x^E` in `S_k`, if `w` lies in `<x>`.
pub fn x_exponent(w: &Word, k: u32) -> Result<Option<BigInt>> {
    let out = britton_solve(w, k)?;
    if out.reduced.t_length() > 0 {
        return Ok(None);
    }
    out.reduced.syllables[0].as_x_power(DEFAULT_BIT_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{dagger_lift, gen_v, gen_w};
    use crate::fixtures;
    use crate::tower::delta_k;
    use crate::word::Letter;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn w(text: &str) -> Word {
        fixtures::seed_alphabet().parse_word(text).unwrap()
    }

    #[test]
    fn relator_is_trivial() {
        for k in 2..=5 {
            assert!(britton_solve(&fixtures::seed_relator(k), k).unwrap().trivial);
        }
    }

    #[test]
    fn nontrivial_elements() {
        assert!(!britton_solve(&w("x"), 2).unwrap().trivial);
        assert!(!britton_solve(&w("t"), 2).unwrap().trivial);
        let out = britton_solve(&w("t x t^-1 x^-1"), 2).unwrap();
        assert!(!out.trivial);
        assert_eq!(out.reduced.t_length(), 0);
        // t^-1 x t is not in <y>, so no pinch happens
        assert_eq!(britton_solve(&w("t^-1 x t x^-1"), 2).unwrap().reduced.t_length(), 2);
    }

    #[test]
    fn hard_words_are_trivial() {
        for k in [2, 3] {
            for n in 2..=16 {
                assert!(britton_solve(&gen_w(n).unwrap(), k).unwrap().trivial, "w_{n} in S_{k}");
            }
        }
    }

    #[test]
    fn v_is_a_tower_power_of_x() {
        assert!(britton_solve(&gen_v(2).concat(&Word::power_of(X, -4)), 2).unwrap().trivial);
        for m in 1..=4u32 {
            let e = x_exponent(&gen_v(m), 2).unwrap().unwrap();
            let expected = delta_k(2, m - 1, DEFAULT_BIT_BUDGET).unwrap();
            assert_eq!(e, BigInt::from(expected), "V_{m}");
        }
        assert_eq!(x_exponent(&gen_v(3), 3).unwrap().unwrap().to_u64(), Some(7_625_597_484_987));
    }

    #[test]
    fn v5_reports_overflow_when_dense() {
        // V_5 = x^(2^65536) fits; V_6 would need 2^(2^65536)
        let e = x_exponent(&gen_v(5), 2).unwrap().unwrap();
        assert_eq!(e.bits(), 65537);
        assert!(matches!(x_exponent(&gen_v(6), 2), Err(Error::TowerOverflow(_))));
        // but the hard word built from it is still decided
        assert!(britton_solve(&gen_w(64).unwrap(), 2).unwrap().trivial);
    }

    #[test]
    fn b_m_examples() {
        let rel: IndexedWord = "x_1 x_0 x_1^-1 x_0^-2".parse().unwrap();
        assert!(solve_bm(&rel, 1, 2).unwrap());
        assert!(!solve_bm(&"x_0 x_1".parse().unwrap(), 1, 2).unwrap());
        assert!(solve_bm(&"x_2".parse().unwrap(), 1, 2).is_err());
        for n in 2..=16 {
            let v = dagger_lift(&gen_w(n).unwrap()).unwrap();
            assert!(solve_bm(&v, n.ilog2() as usize, 2).unwrap());
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(britton_solve(&w("x"), 1).is_err());
        let three = Word::from_letters([Letter::pos(2)]);
        assert!(britton_solve(&three, 2).is_err());
    }

    fn arb_xt(max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..2usize, any::<bool>()), 0..max_len)
            .prop_map(|raw| Word::from_letters(raw.into_iter().map(|(g, s)| Letter::new(g, s))))
    }

    proptest! {
        #[test]
        fn conjugates_of_relators_are_trivial(u in arb_xt(12), v in arb_xt(12), k in 2u32..4) {
            let r = fixtures::seed_relator(k);
            let word = Word::product([&r.conjugate(&u), &r.inverse().conjugate(&v)]);
            prop_assert!(britton_solve(&word, k).unwrap().trivial);
        }

        #[test]
        fn triviality_is_conjugation_invariant(w in arb_xt(16), u in arb_xt(8)) {
            let a = britton_solve(&w, 2).unwrap().trivial;
            let b = britton_solve(&w.conjugate(&u), 2).unwrap().trivial;
            prop_assert_eq!(a, b);
            prop_assert_eq!(a, britton_solve(&w.inverse(), 2).unwrap().trivial);
        }

        #[test]
        fn nonzero_t_exponent_is_nontrivial(w in arb_xt(16)) {
            if w.exponent_sum(T) != 0 {
                prop_assert!(!britton_solve(&w, 2).unwrap().trivial);
            }
        }
    }
}
