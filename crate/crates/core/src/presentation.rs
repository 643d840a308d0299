//! Finite presentations `< generators | relators >`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::word::{Alphabet, Word};

/// An ordered generator list and an ordered relator tuple. Equality is
/// order-sensitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PresentationMeasures {
    pub generators: usize,
    pub relators: usize,
    /// generators minus relators
    pub deficiency: i64,
    /// total relator length
    pub lambda: usize,
    pub balanced: bool,
}

/// Output of [`Presentation::delete_generator`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deletion {
    pub presentation: Presentation,
    /// `|r|_0`: deleted occurrences per relator, counted before reduction.
    pub counts: Vec<usize>,
}

impl Deletion {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Presentation> {
        for r in &relators {
            r.check_alphabet(alphabet.len())?;
        }
        Ok(Presentation { alphabet, relators })
    }

    /// Builds a presentation from generator names and relator strings.
    pub fn parse_parts<S: AsRef<str>>(generators: &[S], relators: &[S]) -> Result<Presentation> {
        let alphabet = Alphabet::new(generators.iter().map(|s| s.as_ref().to_string()))?;
        let relators = relators
            .iter()
            .map(|r| alphabet.parse_word(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation { alphabet, relators })
    }

    /// `𝕀_k = < a_1..a_k | a_1..a_k >` with generators named `a1`, `a2`, ...
    pub fn trivial(k: usize) -> Presentation {
        let alphabet = Alphabet::new((1..=k).map(|i| format!("a{i}"))).expect("distinct names");
        let relators = (0..k).map(Word::generator).collect();
        Presentation { alphabet, relators }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn relator(&self, i: usize) -> Result<&Word> {
        self.relators.get(i).ok_or(Error::RelatorIndex { index: i, count: self.relators.len() })
    }

    pub(crate) fn relators_mut(&mut self) -> &mut Vec<Word> {
        &mut self.relators
    }

    pub(crate) fn alphabet_mut(&mut self) -> &mut Alphabet {
        &mut self.alphabet
    }

    pub fn word(&self, text: &str) -> Result<Word> {
        self.alphabet.parse_word(text)
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.alphabet.format_word(w)
    }

    pub fn measures(&self) -> PresentationMeasures {
        let deficiency = self.alphabet.len() as i64 - self.relators.len() as i64;
        PresentationMeasures {
            generators: self.alphabet.len(),
            relators: self.relators.len(),
            deficiency,
            lambda: self.lambda(),
            balanced: deficiency == 0,
        }
    }

    pub fn lambda(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    /// Removes generator `g` and deletes every `g^{±1}` from every relator.
    /// Generator ids above `g` shift down by one.
    pub fn delete_generator(&self, g: usize) -> Result<Deletion> {
        if g >= self.alphabet.len() {
            return Err(Error::AlphabetMismatch { index: g, size: self.alphabet.len() });
        }
        let alphabet = Alphabet::new(
            self.alphabet.names().iter().enumerate().filter(|&(i, _)| i != g).map(|(_, n)| n.clone()),
        )?;
        let shift = |h: usize| if h > g { h - 1 } else { h };
        let mut relators = Vec::with_capacity(self.relators.len());
        let mut counts = Vec::with_capacity(self.relators.len());
        for r in &self.relators {
            let (deleted, count) = r.delete_generator(g);
            relators.push(deleted.rename(shift));
            counts.push(count);
        }
        Ok(Deletion { presentation: Presentation { alphabet, relators }, counts })
    }

    pub fn delete_generator_named(&self, name: &str) -> Result<Deletion> {
        self.delete_generator(self.alphabet.lookup(name)?)
    }

    /// Whether the relator tuple equals the generator tuple up to
    /// permutation and inversion of entries.
    pub fn is_trivial_form(&self) -> bool {
        if self.relators.len() != self.alphabet.len() {
            return false;
        }
        let mut seen = vec![false; self.alphabet.len()];
        for r in &self.relators {
            if r.len() != 1 {
                return false;
            }
            let g = r.letters()[0].generator();
            if seen[g] {
                return false;
            }
            seen[g] = true;
        }
        true
    }

    /// Whether relator `i` is exactly the `i`-th generator.
    pub fn is_trivial_form_ordered(&self) -> bool {
        self.relators.len() == self.alphabet.len()
            && self.relators.iter().enumerate().all(|(i, r)| *r == Word::generator(i))
    }

    /// Rows are relators, columns generators: the abelianization matrix.
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| (0..self.alphabet.len()).map(|g| r.exponent_sum(g)).collect())
            .collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(PresentationJson::from(self)).expect("plain data")
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = self.alphabet.names().join(", ");
        let rels: Vec<String> = self.relators.iter().map(|r| self.alphabet.format_word(r)).collect();
        if rels.is_empty() {
            write!(f, "< {gens} | >")
        } else {
            write!(f, "< {gens} | {} >", rels.join(", "))
        }
    }
}

impl FromStr for Presentation {
    type Err = Error;

    /// Parses `< g1, g2, ... | w1, w2, ... >`.
    fn from_str(s: &str) -> Result<Presentation> {
        let s = s.trim();
        let inner = s
            .strip_prefix('<')
            .and_then(|s| s.strip_suffix('>'))
            .ok_or_else(|| Error::Parse("presentation must be enclosed in < >".into()))?;
        let (gens, rels) =
            inner.split_once('|').ok_or_else(|| Error::Parse("presentation needs a `|`".into()))?;
        let split = |part: &str| -> Vec<String> {
            part.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
        };
        Presentation::parse_parts(&split(gens), &split(rels))
    }
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    generators: Vec<String>,
    relators: Vec<String>,
}

impl From<&Presentation> for PresentationJson {
    fn from(p: &Presentation) -> Self {
        PresentationJson {
            generators: p.alphabet.names().to_vec(),
            relators: p.relators.iter().map(|r| p.alphabet.format_word(r)).collect(),
        }
    }
}

impl Serialize for Presentation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PresentationJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Presentation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PresentationJson::deserialize(deserializer)?;
        Presentation::parse_parts(&raw.generators, &raw.relators).map_err(serde::de::Error::custom)
    }
}
