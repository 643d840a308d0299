//! Free-group words over a finite, ordered alphabet.
//!
//! A [`Word`] never holds an adjacent inverse pair: every constructor runs
//! free reduction, so two words are equal as group elements of the free
//! group exactly when they are structurally equal.

use std::cmp::Ordering;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// A generator index together with a sign, packed into one nonzero `i32`
/// (`g + 1` for the generator, `-(g + 1)` for its inverse).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, positive: bool) -> Letter {
        let v = generator as i32 + 1;
        Letter(if positive { v } else { -v })
    }

    pub fn pos(generator: usize) -> Letter {
        Letter::new(generator, true)
    }

    pub fn neg(generator: usize) -> Letter {
        Letter::new(generator, false)
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// `+1` or `-1`.
    #[inline]
    pub fn sign(self) -> i64 {
        self.0.signum() as i64
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Position in the total letter order: declaration order of generators,
    /// positive before negative.
    #[inline]
    pub fn ordinal(self) -> u32 {
        2 * (self.0.unsigned_abs() - 1) + u32::from(self.0 < 0)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "g{}", self.generator())
        } else {
            write!(f, "g{}^-1", self.generator())
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ordinal().cmp(&other.ordinal())
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Result of [`Word::cyclic_normal_form_with_witness`]:
/// `word == conjugator · w^{±1} · conjugator^{-1}` freely, with the inverse
/// taken when `inverted` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicForm {
    pub word: Word,
    pub conjugator: Word,
    pub inverted: bool,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        Word { letters: out }
    }

    /// Like [`Word::from_letters`] but rejects generators outside an
    /// alphabet of `alphabet_size` symbols.
    pub fn free_reduce<I: IntoIterator<Item = Letter>>(letters: I, alphabet_size: usize) -> Result<Word> {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if l.generator() >= alphabet_size {
                return Err(Error::AlphabetMismatch { index: l.generator(), size: alphabet_size });
            }
            push_reduced(&mut out, l);
        }
        Ok(Word { letters: out })
    }

    pub fn letter(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    pub fn generator(g: usize) -> Word {
        Word::letter(Letter::pos(g))
    }

    /// `g^n`.
    pub fn power_of(g: usize, n: i64) -> Word {
        let l = Letter::new(g, n >= 0);
        Word { letters: vec![l; n.unsigned_abs() as usize] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        Word { letters: out }
    }

    /// Multiplies several words left to right.
    pub fn product<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for w in words {
            for &l in &w.letters {
                push_reduced(&mut out, l);
            }
        }
        Word { letters: out }
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// `u · self · u^{-1}`.
    pub fn conjugate(&self, u: &Word) -> Word {
        Word::product([u, self, &u.inverse()])
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out: Vec<Letter> = Vec::new();
        for _ in 0..n.unsigned_abs() {
            for &l in &base.letters {
                push_reduced(&mut out, l);
            }
        }
        Word { letters: out }
    }

    /// Signed count of occurrences of generator `g`.
    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.letters.iter().filter(|l| l.generator() == g).map(|l| l.sign()).sum()
    }

    /// Number of letters `g^{±1}`.
    pub fn occurrences(&self, g: usize) -> usize {
        self.letters.iter().filter(|l| l.generator() == g).count()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator()).max()
    }

    pub fn check_alphabet(&self, size: usize) -> Result<()> {
        match self.max_generator() {
            Some(g) if g >= size => Err(Error::AlphabetMismatch { index: g, size }),
            _ => Ok(()),
        }
    }

    /// Deletes every `g^{±1}` and freely reduces; also returns the number of
    /// deleted letters.
    pub fn delete_generator(&self, g: usize) -> (Word, usize) {
        let count = self.occurrences(g);
        let word = Word::from_letters(self.letters.iter().copied().filter(|l| l.generator() != g));
        (word, count)
    }

    /// Applies a letter substitution; the images are multiplied and reduced.
    pub fn substitute<F: FnMut(Letter) -> Word>(&self, mut image: F) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for &l in &self.letters {
            for &m in image(l).letters() {
                push_reduced(&mut out, m);
            }
        }
        Word { letters: out }
    }

    /// Renames generators letter by letter. Reduction is preserved by any
    /// injective renaming, so no reduction pass is run.
    pub fn rename<F: Fn(usize) -> usize>(&self, f: F) -> Word {
        Word {
            letters: self.letters.iter().map(|l| Letter::new(f(l.generator()), l.is_positive())).collect(),
        }
    }

    /// Splits `self = p · c · p^{-1}` with `c` cyclically reduced and returns
    /// the length of `p`.
    fn cyclic_core(&self) -> usize {
        let n = self.letters.len();
        let mut i = 0;
        while 2 * i + 1 < n && self.letters[i] == self.letters[n - 1 - i].inverse() {
            i += 1;
        }
        i
    }

    pub fn cyclically_reduce(&self) -> Word {
        let i = self.cyclic_core();
        Word { letters: self.letters[i..self.letters.len() - i].to_vec() }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) => self.letters.len() == 1 || *a != b.inverse(),
            _ => true,
        }
    }

    /// Least rotation (under the letter order) of the cyclic reduction of the
    /// word or of its inverse. Conjugate words, and a word and its inverse,
    /// share one normal form.
    pub fn cyclic_normal_form(&self) -> Word {
        let p = self.cyclic_core();
        let core = &self.letters[p..self.letters.len() - p];
        let (_, start, inverted) = least_rotation(core);
        Word { letters: rotation(core, start, inverted) }
    }

    /// [`Word::cyclic_normal_form`] together with the conjugator and
    /// inversion flag that produce it.
    pub fn cyclic_normal_form_with_witness(&self) -> CyclicForm {
        let p = self.cyclic_core();
        let n = self.letters.len();
        let core = &self.letters[p..n - p];
        let (_, start, inverted) = least_rotation(core);
        let word = Word { letters: rotation(core, start, inverted) };
        // rotation by j of c equals s^{-1} c s with s the first j letters of c
        // (or of c^{-1} when inverted)
        let source: Vec<Letter> = if inverted {
            core.iter().rev().map(|l| l.inverse()).collect()
        } else {
            core.to_vec()
        };
        let s = Word { letters: source[..start].to_vec() };
        let prefix = Word { letters: self.letters[..p].to_vec() };
        let conjugator = s.inverse().concat(&prefix.inverse());
        CyclicForm { word, conjugator, inverted }
    }

    /// Lexicographic comparison under the letter order.
    pub fn cmp_letters(&self, other: &Word) -> Ordering {
        self.letters.cmp(&other.letters)
    }
}

#[inline]
fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

fn rotation(core: &[Letter], start: usize, inverted: bool) -> Vec<Letter> {
    let n = core.len();
    if inverted {
        // c^{-1} read from position `start`
        (0..n).map(|i| core[(2 * n - 1 - start - i) % n].inverse()).collect()
    } else {
        (0..n).map(|i| core[(start + i) % n]).collect()
    }
}

/// Returns (length, start, inverted) of the least rotation among rotations
/// of `core` and of its inverse. Ties keep the first candidate.
fn least_rotation(core: &[Letter]) -> (usize, usize, bool) {
    let n = core.len();
    if n == 0 {
        return (0, 0, false);
    }
    let at = |start: usize, inverted: bool, i: usize| -> u32 {
        if inverted {
            core[(2 * n - 1 - start - i) % n].inverse().ordinal()
        } else {
            core[(start + i) % n].ordinal()
        }
    };
    let mut best = (0usize, false);
    for inverted in [false, true] {
        for start in 0..n {
            if (start, inverted) == (0, false) {
                continue;
            }
            for i in 0..n {
                let a = at(start, inverted, i);
                let b = at(best.0, best.1, i);
                if a != b {
                    if a < b {
                        best = (start, inverted);
                    }
                    break;
                }
            }
        }
    }
    (n, best.0, best.1)
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| format!("{l:?}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Ordered generator names; the index of a name is its generator id.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Alphabet {
    names: Vec<String>,
    index: FxHashMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Alphabet>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet::default();
        for name in names {
            alphabet.push(name.into())?;
        }
        Ok(alphabet)
    }

    pub fn push(&mut self, name: String) -> Result<usize> {
        if !valid_name(&name) {
            return Err(Error::Parse(format!("invalid generator name `{name}`")));
        }
        if self.index.contains_key(&name) {
            return Err(Error::DuplicateGenerator(name));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Parses the whitespace-separated token syntax `g`, `g^-1`, `g^n`;
    /// `1` is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (name, exp) = match token.split_once('^') {
                Some((name, exp)) => {
                    let n: i64 = exp
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{token}`")))?;
                    if n == 0 {
                        return Err(Error::Parse(format!("zero exponent in `{token}`")));
                    }
                    (name, n)
                }
                None => (token, 1),
            };
            let g = self.lookup(name)?;
            let l = Letter::new(g, exp > 0);
            letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
        Ok(Word::from_letters(letters))
    }

    /// Prints a word in the token syntax, collapsing runs into powers.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let letters = w.letters();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut j = i;
            while j < letters.len() && letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64 * l.sign();
            let name = &self.names[l.generator()];
            if run == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{run}"));
            }
            i = j;
        }
        parts.join(" ")
    }
}
