//! The doubling construction `P_w`, the hard word family `w_n`, and the
//! lift of zero-exponent words over `{x, t}` into the free group on
//! `{x_i : i ∈ ℤ}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fixtures::{T, X};
use crate::presentation::Presentation;
use crate::word::{Alphabet, Letter, Word};

/// Input of the doubling construction: a deficiency-one seed, two
/// distinguished generators and a word over the seed alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoublingSpec {
    pub seed: Presentation,
    pub a0: usize,
    pub a1: usize,
    pub w: Word,
}

impl DoublingSpec {
    pub fn new(seed: Presentation, a0: usize, a1: usize, w: Word) -> Result<DoublingSpec> {
        let gens = seed.generator_count();
        if a0 >= gens || a1 >= gens {
            return Err(Error::InvalidParameter("a0 and a1 must be seed generators".into()));
        }
        if a0 == a1 {
            return Err(Error::InvalidParameter("a0 and a1 must be distinct".into()));
        }
        if seed.measures().deficiency != 1 {
            return Err(Error::InvalidParameter(format!(
                "seed must have deficiency 1, has {}",
                seed.measures().deficiency
            )));
        }
        w.check_alphabet(gens)?;
        Ok(DoublingSpec { seed, a0, a1, w })
    }

    pub fn named(seed: Presentation, a0: &str, a1: &str, w: Word) -> Result<DoublingSpec> {
        let a0 = seed.alphabet().lookup(a0)?;
        let a1 = seed.alphabet().lookup(a1)?;
        DoublingSpec::new(seed, a0, a1, w)
    }

    /// `S_k` with `a_0 = t`, `a_1 = x` and the word `w_n`.
    pub fn seed_family(k: u32, n: u64) -> Result<DoublingSpec> {
        DoublingSpec::new(crate::fixtures::seed_s(k)?, T, X, gen_w(n)?)
    }
}

/// Index bookkeeping for the doubled alphabet and relator tuple.
///
/// Generators: seed ids `0..g`, hatted copies `g..2g`.
/// Relators: seed `0..n`, hatted `n..2n`, then `â_1 a_0 â_1^-1 w^-1` and
/// `a_1 â_0 a_1^-1 ŵ^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DoublingLayout {
    pub seed_generators: usize,
    pub seed_relators: usize,
    pub a0: usize,
    pub a1: usize,
}

impl DoublingLayout {
    /// Swaps a generator with its hatted copy.
    pub fn hat_generator(&self, g: usize) -> usize {
        let n = self.seed_generators;
        if g < n {
            g + n
        } else {
            g - n
        }
    }

    pub fn hat_word(&self, w: &Word) -> Word {
        w.rename(|g| self.hat_generator(g))
    }

    /// Swaps a seed relator index with its hatted copy; the two mixing
    /// relators are swapped with each other.
    pub fn hat_relator(&self, i: usize) -> usize {
        let n = self.seed_relators;
        match i {
            i if i < n => i + n,
            i if i < 2 * n => i - n,
            i if i == 2 * n => 2 * n + 1,
            _ => 2 * n,
        }
    }

    pub fn mixing_relator(&self) -> usize {
        2 * self.seed_relators
    }

    pub fn hatted_mixing_relator(&self) -> usize {
        2 * self.seed_relators + 1
    }

    pub fn relator_count(&self) -> usize {
        2 * self.seed_relators + 2
    }
}

/// `P_w` together with its layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Doubled {
    pub presentation: Presentation,
    pub layout: DoublingLayout,
}

fn hatted_alphabet(seed: &Alphabet) -> Result<Alphabet> {
    let names = seed.names().iter().cloned().chain(seed.names().iter().map(|n| format!("{n}'")));
    Alphabet::new(names)
}

/// `< A, Â | R, R̂, â_1 a_0 â_1^-1 w^-1, a_1 â_0 a_1^-1 ŵ^-1 >`.
pub fn build_pw(spec: &DoublingSpec) -> Result<Doubled> {
    let layout = DoublingLayout {
        seed_generators: spec.seed.generator_count(),
        seed_relators: spec.seed.relators().len(),
        a0: spec.a0,
        a1: spec.a1,
    };
    let alphabet = hatted_alphabet(spec.seed.alphabet())?;
    let hat_a0 = layout.hat_generator(spec.a0);
    let hat_a1 = layout.hat_generator(spec.a1);
    let w_hat = layout.hat_word(&spec.w);
    let mut relators: Vec<Word> = spec.seed.relators().to_vec();
    relators.extend(spec.seed.relators().iter().map(|r| layout.hat_word(r)));
    relators.push(Word::product([
        &Word::generator(spec.a0).conjugate(&Word::generator(hat_a1)),
        &spec.w.inverse(),
    ]));
    relators.push(Word::product([
        &Word::generator(hat_a0).conjugate(&Word::generator(spec.a1)),
        &w_hat.inverse(),
    ]));
    Ok(Doubled { presentation: Presentation::new(alphabet, relators)?, layout })
}

/// The presentation with explicit stable letters:
/// `< A, Â, t, t̂ | R, R̂, t a_0 t^-1 w^-1, t̂ â_0 t̂^-1 ŵ^-1, t â_1^-1, t̂ a_1^-1 >`.
/// The stable letters are the last two generators.
pub fn build_tilde_pw(spec: &DoublingSpec) -> Result<Presentation> {
    let doubled = build_pw(spec)?;
    let layout = doubled.layout;
    let mut alphabet = doubled.presentation.alphabet().clone();
    let mut stable = "stable".to_string();
    while alphabet.lookup(&stable).is_ok() || alphabet.lookup(&format!("{stable}'")).is_ok() {
        stable.push('_');
    }
    let t = alphabet.push(stable.clone())?;
    let t_hat = alphabet.push(format!("{stable}'"))?;
    let hat_a0 = layout.hat_generator(spec.a0);
    let hat_a1 = layout.hat_generator(spec.a1);
    let w_hat = layout.hat_word(&spec.w);
    let n = layout.seed_relators;
    let mut relators: Vec<Word> = doubled.presentation.relators()[..2 * n].to_vec();
    relators.push(Word::product([&Word::generator(spec.a0).conjugate(&Word::generator(t)), &spec.w.inverse()]));
    relators.push(Word::product([&Word::generator(hat_a0).conjugate(&Word::generator(t_hat)), &w_hat.inverse()]));
    relators.push(Word::from_letters([Letter::pos(t), Letter::neg(hat_a1)]));
    relators.push(Word::from_letters([Letter::pos(t_hat), Letter::neg(spec.a1)]));
    Presentation::new(alphabet, relators)
}

/// The retraction of the free group of [`build_tilde_pw`] onto the doubled
/// alphabet that kills the relators `t â_1^-1` and `t̂ a_1^-1`:
/// `t ↦ â_1`, `t̂ ↦ a_1`.
pub fn retract_stable_letters(spec: &DoublingSpec, w: &Word) -> Word {
    let g = spec.seed.generator_count();
    let (t, t_hat) = (2 * g, 2 * g + 1);
    let hat_a1 = spec.a1 + g;
    w.substitute(|l| {
        let image = match l.generator() {
            x if x == t => hat_a1,
            x if x == t_hat => spec.a1,
            x => x,
        };
        Word::letter(Letter::new(image, l.is_positive()))
    })
}

/// `V_0 = x`, `V_m = t V_{m-1} t^-1 x t V_{m-1}^-1 t^-1` over `{x, t}`.
pub fn gen_v(m: u32) -> Word {
    let x = Word::generator(X);
    let t = Word::generator(T);
    let t_inv = t.inverse();
    let mut v = x.clone();
    for _ in 0..m {
        v = Word::product([&t, &v, &t_inv, &x, &t, &v.inverse(), &t_inv]);
    }
    v
}

/// `w_n = x V_m x^-1 V_m^-1` with `m = ⌊log₂ n⌋`. `w_1` is freely trivial.
pub fn gen_w(n: u64) -> Result<Word> {
    if n == 0 {
        return Err(Error::InvalidParameter("w_n needs n >= 1".into()));
    }
    let m = n.ilog2();
    let x = Word::generator(X);
    let v = gen_v(m);
    Ok(Word::product([&x, &v, &x.inverse(), &v.inverse()]))
}

/// A letter `x_i^{±1}` of the free group on `{x_i : i ∈ ℤ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexedLetter {
    pub index: i64,
    pub positive: bool,
}

impl IndexedLetter {
    pub fn inverse(self) -> IndexedLetter {
        IndexedLetter { index: self.index, positive: !self.positive }
    }
}

/// A freely reduced word over `{x_i : i ∈ ℤ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IndexedWord {
    letters: Vec<IndexedLetter>,
}

impl IndexedWord {
    pub fn from_letters<I: IntoIterator<Item = IndexedLetter>>(letters: I) -> IndexedWord {
        let mut out: Vec<IndexedLetter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        IndexedWord { letters: out }
    }

    pub fn x(index: i64) -> IndexedWord {
        IndexedWord { letters: vec![IndexedLetter { index, positive: true }] }
    }

    pub fn letters(&self) -> &[IndexedLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> IndexedWord {
        IndexedWord { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn concat(&self, other: &IndexedWord) -> IndexedWord {
        IndexedWord::from_letters(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn pow(&self, n: i64) -> IndexedWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        IndexedWord::from_letters((0..n.unsigned_abs()).flat_map(|_| base.letters.iter().copied()))
    }

    pub fn index_range(&self) -> Option<(i64, i64)> {
        let min = self.letters.iter().map(|l| l.index).min()?;
        let max = self.letters.iter().map(|l| l.index).max()?;
        Some((min, max))
    }

    /// As a word over the alphabet `x_0..x_m` of `B_m`.
    pub fn to_bm_word(&self, m: usize) -> Result<Word> {
        let letters = self
            .letters
            .iter()
            .map(|l| {
                if l.index < 0 || l.index as usize > m {
                    Err(Error::InvalidParameter(format!("x_{} is outside x_0..x_{m}", l.index)))
                } else {
                    Ok(Letter::new(l.index as usize, l.positive))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::from_letters(letters))
    }

    pub fn from_bm_word(w: &Word) -> IndexedWord {
        IndexedWord::from_letters(
            w.letters().iter().map(|l| IndexedLetter { index: l.generator() as i64, positive: l.is_positive() }),
        )
    }
}

impl fmt::Display for IndexedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| if l.positive { format!("x_{}", l.index) } else { format!("x_{}^-1", l.index) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for IndexedWord {
    type Err = Error;

    /// Tokens `x_i`, `x_i^e`; `1` is the empty word.
    fn from_str(s: &str) -> Result<IndexedWord> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(IndexedWord::default());
        }
        let mut letters = Vec::new();
        for token in s.split_whitespace() {
            let body = token.strip_prefix("x_").ok_or_else(|| Error::Parse(format!("expected x_i, got `{token}`")))?;
            let (index, exp) = match body.split_once('^') {
                Some((i, e)) => (i, e.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent `{token}`")))?),
                None => (body, 1),
            };
            let index: i64 = index.parse().map_err(|_| Error::Parse(format!("bad index `{token}`")))?;
            if exp == 0 {
                return Err(Error::Parse(format!("zero exponent in `{token}`")));
            }
            let l = IndexedLetter { index, positive: exp > 0 };
            letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
        Ok(IndexedWord::from_letters(letters))
    }
}

/// The canonical preimage of a zero-`t`-exponent word over `{x, t}`: each
/// `x^{±1}` read after a prefix of `t`-exponent `m` becomes `x_m^{±1}`.
pub fn dagger_lift(w: &Word) -> Result<IndexedWord> {
    w.check_alphabet(2)?;
    let total = w.exponent_sum(T);
    if total != 0 {
        return Err(Error::NonZeroExponent(total));
    }
    let mut height = 0i64;
    let mut letters = Vec::new();
    for l in w.letters() {
        if l.generator() == T {
            height += l.sign();
        } else {
            letters.push(IndexedLetter { index: height, positive: l.is_positive() });
        }
    }
    Ok(IndexedWord::from_letters(letters))
}

/// `x_m ↦ t^m x t^-m`.
pub fn phi(v: &IndexedWord) -> Word {
    let mut letters = Vec::new();
    for l in v.letters() {
        let t = Letter::new(T, l.index >= 0);
        let reach = l.index.unsigned_abs() as usize;
        letters.extend(std::iter::repeat_n(t, reach));
        letters.push(Letter::new(X, l.positive));
        letters.extend(std::iter::repeat_n(t.inverse(), reach));
    }
    Word::from_letters(letters)
}

/// `x_i ↦ x_{i+d}`.
pub fn shift_sigma(v: &IndexedWord, d: i64) -> IndexedWord {
    IndexedWord { letters: v.letters.iter().map(|l| IndexedLetter { index: l.index + d, ..*l }).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn seed() -> Alphabet {
        fixtures::seed_alphabet()
    }

    #[test]
    fn v_and_w_small_cases() {
        assert_eq!(seed().format_word(&gen_v(0)), "x");
        assert_eq!(seed().format_word(&gen_v(1)), "t x t^-1 x t x^-1 t^-1");
        assert!(gen_w(1).unwrap().is_empty());
        assert_eq!(gen_w(2).unwrap().len(), 16);
        assert_eq!(gen_w(3).unwrap(), gen_w(2).unwrap());
        assert!(gen_w(0).is_err());
    }

    #[test]
    fn word_lengths() {
        for m in 0..=10u32 {
            assert_eq!(gen_v(m).len(), 6 * (1 << m) - 5);
        }
        for m in 1..=10u32 {
            assert_eq!(gen_w(1 << m).unwrap().len(), 6 * (1 << (m + 1)) - 8);
        }
        for n in 2..=1024u64 {
            assert!(gen_w(n).unwrap().len() as u64 <= 12 * n);
        }
    }

    #[test]
    fn w_has_zero_t_exponent() {
        for n in 1..=64 {
            assert_eq!(gen_w(n).unwrap().exponent_sum(T), 0);
        }
    }

    #[test]
    fn dagger_of_v_matches_displays() {
        let d1 = dagger_lift(&gen_v(1)).unwrap();
        assert_eq!(d1.to_string(), "x_1 x_0 x_1^-1");
        let inner: IndexedWord = "x_2 x_1 x_2^-1".parse().unwrap();
        let d2 = inner.concat(&IndexedWord::x(0)).concat(&inner.inverse());
        assert_eq!(dagger_lift(&gen_v(2)).unwrap(), d2);
        let c: IndexedWord = "x_3 x_2 x_3^-1".parse().unwrap();
        let d3 = IndexedWord::from_letters(
            [&c, &IndexedWord::x(1), &c.inverse(), &IndexedWord::x(0), &c.inverse(), &IndexedWord::x(1).inverse(), &c]
                .iter()
                .flat_map(|w| w.letters().iter().copied()),
        );
        // the displayed form inverts the pieces of sigma(V_2) one at a time,
        // which is not the inverse of the block
        assert_ne!(dagger_lift(&gen_v(3)).unwrap(), d3);
        assert_eq!(dagger_lift(&gen_v(3)).unwrap().len(), d3.len());
        let s2 = shift_sigma(&d2, 1);
        assert_eq!(dagger_lift(&gen_v(3)).unwrap(), s2.concat(&IndexedWord::x(0)).concat(&s2.inverse()));
    }

    #[test]
    fn dagger_lengths_and_recursion() {
        for m in 0..=10u32 {
            assert_eq!(dagger_lift(&gen_v(m)).unwrap().len(), (1 << (m + 1)) - 1);
        }
        for m in 1..=8u32 {
            let prev = shift_sigma(&dagger_lift(&gen_v(m - 1)).unwrap(), 1);
            let expected = prev.concat(&IndexedWord::x(0)).concat(&prev.inverse());
            assert_eq!(dagger_lift(&gen_v(m)).unwrap(), expected);
        }
        // the lifted w_{2^m} has length 2^{m+2}
        for m in 1..=8u32 {
            assert_eq!(dagger_lift(&gen_w(1 << m).unwrap()).unwrap().len(), 1 << (m + 2));
        }
    }

    #[test]
    fn dagger_rejects_nonzero_exponent() {
        let w = seed().parse_word("t t x").unwrap();
        assert_eq!(dagger_lift(&w), Err(Error::NonZeroExponent(2)));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(seed().format_word(&phi(&IndexedWord::x(0))), "x");
        assert_eq!(seed().format_word(&phi(&IndexedWord::x(2))), "t^2 x t^-2");
        assert_eq!(seed().format_word(&phi(&IndexedWord::x(-1))), "t^-1 x t");
        assert_eq!(shift_sigma(&IndexedWord::x(0), 1), IndexedWord::x(1));
    }

    #[test]
    fn pw_for_seed_family() {
        let spec = DoublingSpec::seed_family(2, 2).unwrap();
        let doubled = build_pw(&spec).unwrap();
        let m = doubled.presentation.measures();
        assert_eq!((m.generators, m.relators, m.balanced), (4, 4, true));
        assert_eq!(doubled.presentation.alphabet().names(), &["x", "t", "x'", "t'"]);
        let text = doubled.presentation.format_word(&doubled.presentation.relators()[2]);
        assert!(text.starts_with("x' t x'^-1"), "{text}");
        for n in 2..=64 {
            let d = build_pw(&DoublingSpec::seed_family(2, n).unwrap()).unwrap();
            assert!(d.presentation.measures().balanced);
            assert!(d.presentation.lambda() as u64 <= 24 * (n + 1));
        }
    }

    #[test]
    fn pw_rejects_bad_specs() {
        let s2 = fixtures::seed_s(2).unwrap();
        assert!(DoublingSpec::new(s2.clone(), T, T, Word::empty()).is_err());
        assert!(DoublingSpec::new(s2, T, 7, Word::empty()).is_err());
        assert!(DoublingSpec::new(Presentation::trivial(2), 0, 1, Word::empty()).is_err());
    }

    #[test]
    fn tilde_pw_retracts_onto_pw() {
        let spec = DoublingSpec::seed_family(2, 4).unwrap();
        let tilde = build_tilde_pw(&spec).unwrap();
        let m = tilde.measures();
        assert_eq!((m.generators, m.relators, m.balanced), (6, 6, true));
        let pw = build_pw(&spec).unwrap().presentation;
        let retracted: Vec<Word> = tilde.relators().iter().map(|r| retract_stable_letters(&spec, r)).collect();
        assert_eq!(&retracted[..4], pw.relators());
        assert!(retracted[4].is_empty() && retracted[5].is_empty());
    }

    #[test]
    fn hat_layout_is_involutive() {
        let d = build_pw(&DoublingSpec::seed_family(2, 2).unwrap()).unwrap();
        let layout = d.layout;
        for i in 0..layout.relator_count() {
            assert_eq!(layout.hat_relator(layout.hat_relator(i)), i);
            let r = &d.presentation.relators()[i];
            assert_eq!(&layout.hat_word(r), &d.presentation.relators()[layout.hat_relator(i)]);
        }
    }

    #[test]
    fn indexed_word_text_round_trip() {
        let v: IndexedWord = "x_-2 x_0^3 x_1^-1".parse().unwrap();
        assert_eq!(v.to_string(), "x_-2 x_0 x_0 x_0 x_1^-1");
        assert_eq!(v.to_string().parse::<IndexedWord>().unwrap(), v);
        assert!(v.to_bm_word(3).is_err());
    }

    fn zero_exponent_word() -> impl Strategy<Value = Word> {
        prop::collection::vec((0..2usize, any::<bool>()), 0..30).prop_map(|raw| {
            let w = Word::from_letters(raw.into_iter().map(|(g, s)| Letter::new(g, s)));
            let e = w.exponent_sum(T);
            w.concat(&Word::power_of(T, -e))
        })
    }

    proptest! {
        #[test]
        fn phi_inverts_dagger(w in zero_exponent_word()) {
            let lifted = dagger_lift(&w).unwrap();
            prop_assert!(lifted.len() <= w.len());
            prop_assert_eq!(phi(&lifted), w);
        }

        #[test]
        fn dagger_respects_inverse_and_products(u in zero_exponent_word(), v in zero_exponent_word()) {
            prop_assert_eq!(dagger_lift(&u.inverse()).unwrap(), dagger_lift(&u).unwrap().inverse());
            prop_assert_eq!(
                dagger_lift(&u.concat(&v)).unwrap(),
                dagger_lift(&u).unwrap().concat(&dagger_lift(&v).unwrap())
            );
        }

        #[test]
        fn dagger_of_t_conjugate_is_shift(v in zero_exponent_word()) {
            let t = Word::generator(T);
            prop_assert_eq!(dagger_lift(&v.conjugate(&t)).unwrap(), shift_sigma(&dagger_lift(&v).unwrap(), 1));
        }
    }
}
