//! Andrews-Curtis and Tietze moves on relator tuples: application, replay,
//! trivialization checks, and the formal factor-count expansion that bounds
//! area by Fibonacci numbers.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::{Alphabet, Word};

/// One move on a relator tuple. Relator indices are 0-based here; the JSON
/// form is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// `r_i <- r_i^-1`
    Invert { i: usize },
    /// `r_i <- r_i r_j`, `i != j`
    MultiplyRight { i: usize, j: usize },
    /// `r_i <- u r_i u^-1`
    Conjugate { i: usize, u: Word },
    /// `r_j <- r_j (u r_i^sign u^-1)`, `i != j`, counted as one move
    Dihedral { j: usize, i: usize, sign: i8, u: Word },
    /// Adds `count` fresh generators, each with itself as a new relator.
    Stabilize { count: usize },
    /// Appends an empty relator.
    AddEmpty,
    /// Deletes relator `index`, which must be empty.
    RemoveEmpty { index: usize },
}

impl Move {
    /// Whether the move counts under the dihedral convention.
    pub fn is_ac(&self) -> bool {
        matches!(self, Move::Invert { .. } | Move::MultiplyRight { .. } | Move::Conjugate { .. } | Move::Dihedral { .. })
    }

    pub fn conjugator_len(&self) -> usize {
        match self {
            Move::Conjugate { u, .. } | Move::Dihedral { u, .. } => u.len(),
            _ => 0,
        }
    }

    /// The relator that the move rewrites, if any.
    pub fn target(&self) -> Option<usize> {
        match *self {
            Move::Invert { i } | Move::MultiplyRight { i, .. } | Move::Conjugate { i, .. } => Some(i),
            Move::Dihedral { j, .. } => Some(j),
            _ => None,
        }
    }

    /// Shifts relator indices by `offset` and renames conjugator generators.
    pub fn relocate<F: Fn(usize) -> usize + Copy>(&self, offset: usize, rename: F) -> Move {
        match self {
            Move::Invert { i } => Move::Invert { i: i + offset },
            Move::MultiplyRight { i, j } => Move::MultiplyRight { i: i + offset, j: j + offset },
            Move::Conjugate { i, u } => Move::Conjugate { i: i + offset, u: u.rename(rename) },
            Move::Dihedral { j, i, sign, u } => {
                Move::Dihedral { j: j + offset, i: i + offset, sign: *sign, u: u.rename(rename) }
            }
            other => other.clone(),
        }
    }
}

fn check_index(p: &Presentation, i: usize) -> Result<()> {
    let count = p.relators().len();
    if i >= count {
        return Err(Error::RelatorIndex { index: i, count });
    }
    Ok(())
}

/// Names for `count` new generators: `a{n}` continuing after the current
/// generator count, skipping names already taken.
fn fresh_names(alphabet: &Alphabet, count: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(count);
    let mut n = alphabet.len() + 1;
    while names.len() < count {
        let candidate = format!("a{n}");
        if alphabet.lookup(&candidate).is_err() {
            names.push(candidate);
        }
        n += 1;
    }
    names
}

/// Applies `m` in place.
pub fn apply_in_place(p: &mut Presentation, m: &Move) -> Result<()> {
    let gens = p.generator_count();
    match m {
        Move::Invert { i } => {
            check_index(p, *i)?;
            let r = &mut p.relators_mut()[*i];
            *r = r.inverse();
        }
        Move::MultiplyRight { i, j } => {
            check_index(p, *i)?;
            check_index(p, *j)?;
            if i == j {
                return Err(Error::SameRelator(*i));
            }
            let rj = p.relators()[*j].clone();
            let r = &mut p.relators_mut()[*i];
            *r = r.concat(&rj);
        }
        Move::Conjugate { i, u } => {
            check_index(p, *i)?;
            u.check_alphabet(gens)?;
            let r = &mut p.relators_mut()[*i];
            *r = r.conjugate(u);
        }
        Move::Dihedral { j, i, sign, u } => {
            check_index(p, *i)?;
            check_index(p, *j)?;
            if i == j {
                return Err(Error::SameRelator(*i));
            }
            u.check_alphabet(gens)?;
            let ri = &p.relators()[*i];
            let factor = if *sign < 0 { ri.inverse() } else { ri.clone() }.conjugate(u);
            let r = &mut p.relators_mut()[*j];
            *r = r.concat(&factor);
        }
        Move::Stabilize { count } => {
            for name in fresh_names(p.alphabet(), *count) {
                let g = p.alphabet_mut().push(name)?;
                p.relators_mut().push(Word::generator(g));
            }
        }
        Move::AddEmpty => p.relators_mut().push(Word::empty()),
        Move::RemoveEmpty { index } => {
            check_index(p, *index)?;
            if !p.relators()[*index].is_empty() {
                return Err(Error::NonEmptyRelator(*index));
            }
            p.relators_mut().remove(*index);
        }
    }
    Ok(())
}

pub fn apply_move(p: &Presentation, m: &Move) -> Result<Presentation> {
    let mut out = p.clone();
    apply_in_place(&mut out, m)?;
    Ok(out)
}

/// An initial presentation and a move sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveTrace {
    pub initial: Presentation,
    pub moves: Vec<Move>,
}

/// Outcome of [`verify_trivialization`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub accepted: bool,
    /// Invert, MultiplyRight, Conjugate and Dihedral moves.
    pub dihedral_count: usize,
    pub stabilize_moves: usize,
    pub tietze_moves: usize,
    /// Each AC move weighted by `1 + |u|`.
    pub length_weighted: usize,
    #[serde(skip)]
    pub final_presentation: Presentation,
}

impl MoveTrace {
    pub fn new(initial: Presentation) -> MoveTrace {
        MoveTrace { initial, moves: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn dihedral_count(&self) -> usize {
        self.moves.iter().filter(|m| m.is_ac()).count()
    }

    /// Stabilization may only appear as a leading prefix.
    pub fn check_stabilize_prefix(&self) -> Result<()> {
        let mut prefix = true;
        for (idx, m) in self.moves.iter().enumerate() {
            match m {
                Move::Stabilize { .. } if !prefix => return Err(Error::LateStabilize(idx)),
                Move::Stabilize { .. } => {}
                _ => prefix = false,
            }
        }
        Ok(())
    }

    /// Replays the trace, calling `visit` with each intermediate state.
    pub fn replay_with<F: FnMut(usize, &Presentation)>(&self, mut visit: F) -> Result<Presentation> {
        self.check_stabilize_prefix()?;
        let mut p = self.initial.clone();
        for (index, m) in self.moves.iter().enumerate() {
            apply_in_place(&mut p, m).map_err(|e| Error::Replay { index, source: Box::new(e) })?;
            visit(index, &p);
        }
        Ok(p)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

/// Folds [`apply_move`] over the trace.
pub fn replay(trace: &MoveTrace) -> Result<Presentation> {
    trace.replay_with(|_, _| {})
}

/// Replays the trace and checks that the final relators are the generators
/// up to permutation and inversion (or exactly, in order, when `ordered`).
pub fn verify_trivialization(trace: &MoveTrace, ordered: bool) -> Result<Verification> {
    let final_presentation = replay(trace)?;
    let accepted = if ordered {
        final_presentation.is_trivial_form_ordered()
    } else {
        final_presentation.is_trivial_form()
    };
    let mut v = Verification {
        accepted,
        dihedral_count: 0,
        stabilize_moves: 0,
        tietze_moves: 0,
        length_weighted: 0,
        final_presentation,
    };
    for m in &trace.moves {
        match m {
            Move::Stabilize { .. } => v.stabilize_moves += 1,
            Move::AddEmpty | Move::RemoveEmpty { .. } => v.tietze_moves += 1,
            _ => {
                v.dihedral_count += 1;
                v.length_weighted += 1 + m.conjugator_len();
            }
        }
    }
    Ok(v)
}

/// Number of conjugate factors in each relator when the trace is replayed
/// formally, without free reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorCount(pub Vec<BigUint>);

impl FactorCount {
    pub fn max(&self) -> BigUint {
        self.0.iter().max().cloned().unwrap_or_default()
    }
}

/// Validates the trace without materialising words, except when it removes
/// empty relators, which needs the real relators.
fn validate_structure(trace: &MoveTrace) -> Result<()> {
    if trace.moves.iter().any(|m| matches!(m, Move::RemoveEmpty { .. })) {
        return replay(trace).map(|_| ());
    }
    trace.check_stabilize_prefix()?;
    let mut gens = trace.initial.generator_count();
    let mut rels = trace.initial.relators().len();
    for (index, m) in trace.moves.iter().enumerate() {
        let wrap = |e: Error| Error::Replay { index, source: Box::new(e) };
        let check = |i: usize| {
            if i >= rels {
                Err(wrap(Error::RelatorIndex { index: i, count: rels }))
            } else {
                Ok(())
            }
        };
        match m {
            Move::Invert { i } => check(*i)?,
            Move::MultiplyRight { i, j } | Move::Dihedral { j: i, i: j, .. } => {
                check(*i)?;
                check(*j)?;
                if i == j {
                    return Err(wrap(Error::SameRelator(*i)));
                }
            }
            Move::Conjugate { i, .. } => check(*i)?,
            Move::Stabilize { count } => {
                gens += count;
                rels += count;
            }
            Move::AddEmpty => rels += 1,
            Move::RemoveEmpty { .. } => unreachable!("handled by full replay"),
        }
        if let Move::Conjugate { u, .. } | Move::Dihedral { u, .. } = m {
            u.check_alphabet(gens).map_err(wrap)?;
        }
    }
    Ok(())
}

/// Formal expansion: Invert and Conjugate keep a relator's factor count,
/// MultiplyRight and Dihedral add the source count to the target, stabilized
/// relators start at one and empty relators at zero.
pub fn expand_factor_counts(trace: &MoveTrace) -> Result<FactorCount> {
    validate_structure(trace)?;
    let mut counts: Vec<BigUint> = vec![BigUint::one(); trace.initial.relators().len()];
    for m in &trace.moves {
        match m {
            Move::Invert { .. } | Move::Conjugate { .. } => {}
            Move::MultiplyRight { i: target, j: source } | Move::Dihedral { j: target, i: source, .. } => {
                let add = counts[*source].clone();
                counts[*target] += add;
            }
            Move::Stabilize { count } => counts.extend(std::iter::repeat_n(BigUint::one(), *count)),
            Move::AddEmpty => counts.push(BigUint::default()),
            Move::RemoveEmpty { index } => {
                counts.remove(*index);
            }
        }
    }
    Ok(FactorCount(counts))
}

/// `F_0 = 1`, `F_1 = 2`, `F_m = F_{m-1} + F_{m-2}`: the largest factor count
/// reachable after `m` moves from all-ones.
pub fn fibonacci_bound(m: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::one(), BigUint::from(2u32));
    for _ in 0..m {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

// JSON

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum RawMove {
    Invert { i: usize },
    MultiplyRight { i: usize, j: usize },
    Conjugate { i: usize, u: String },
    Dihedral { j: usize, i: usize, sign: i8, u: String },
    Stabilize { count: usize },
    AddEmpty,
    RemoveEmpty { i: usize },
}

#[derive(Serialize, Deserialize)]
struct RawTrace {
    initial: Presentation,
    moves: Vec<RawMove>,
}

fn one_based(i: usize) -> Result<usize> {
    i.checked_sub(1).ok_or_else(|| Error::Parse("relator indices are 1-based".into()))
}

impl MoveTrace {
    fn to_raw(&self) -> RawTrace {
        let mut alphabet = self.initial.alphabet().clone();
        let moves = self
            .moves
            .iter()
            .map(|m| match m {
                Move::Invert { i } => RawMove::Invert { i: i + 1 },
                Move::MultiplyRight { i, j } => RawMove::MultiplyRight { i: i + 1, j: j + 1 },
                Move::Conjugate { i, u } => RawMove::Conjugate { i: i + 1, u: alphabet.format_word(u) },
                Move::Dihedral { j, i, sign, u } => {
                    RawMove::Dihedral { j: j + 1, i: i + 1, sign: *sign, u: alphabet.format_word(u) }
                }
                Move::Stabilize { count } => {
                    for name in fresh_names(&alphabet, *count) {
                        alphabet.push(name).expect("fresh name");
                    }
                    RawMove::Stabilize { count: *count }
                }
                Move::AddEmpty => RawMove::AddEmpty,
                Move::RemoveEmpty { index } => RawMove::RemoveEmpty { i: index + 1 },
            })
            .collect();
        RawTrace { initial: self.initial.clone(), moves }
    }

    fn from_raw(raw: RawTrace) -> Result<MoveTrace> {
        let mut alphabet = raw.initial.alphabet().clone();
        let mut moves = Vec::with_capacity(raw.moves.len());
        for m in raw.moves {
            moves.push(match m {
                RawMove::Invert { i } => Move::Invert { i: one_based(i)? },
                RawMove::MultiplyRight { i, j } => Move::MultiplyRight { i: one_based(i)?, j: one_based(j)? },
                RawMove::Conjugate { i, u } => Move::Conjugate { i: one_based(i)?, u: alphabet.parse_word(&u)? },
                RawMove::Dihedral { j, i, sign, u } => {
                    if sign != 1 && sign != -1 {
                        return Err(Error::Parse(format!("dihedral sign must be 1 or -1, got {sign}")));
                    }
                    Move::Dihedral { j: one_based(j)?, i: one_based(i)?, sign, u: alphabet.parse_word(&u)? }
                }
                RawMove::Stabilize { count } => {
                    for name in fresh_names(&alphabet, count) {
                        alphabet.push(name)?;
                    }
                    Move::Stabilize { count }
                }
                RawMove::AddEmpty => Move::AddEmpty,
                RawMove::RemoveEmpty { i } => Move::RemoveEmpty { index: one_based(i)? },
            });
        }
        Ok(MoveTrace { initial: raw.initial, moves })
    }
}

impl Serialize for MoveTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MoveTrace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawTrace::deserialize(deserializer)?;
        MoveTrace::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> Presentation {
        text.parse().unwrap()
    }

    #[test]
    fn invert_example() {
        let out = apply_move(&p("< x | x^-1 >"), &Move::Invert { i: 0 }).unwrap();
        assert_eq!(out, p("< x | x >"));
    }

    #[test]
    fn dihedral_example() {
        let start = p("< a, b | a b^-1, b >");
        let u = start.word("b").unwrap();
        let out = apply_move(&start, &Move::Dihedral { j: 0, i: 1, sign: 1, u }).unwrap();
        assert_eq!(out, p("< a, b | a, b >"));
    }

    #[test]
    fn stabilize_extends_trivial() {
        let out = apply_move(&Presentation::trivial(2), &Move::Stabilize { count: 2 }).unwrap();
        assert_eq!(out, Presentation::trivial(4));
    }

    #[test]
    fn move_errors() {
        let start = p("< a, b | a, b >");
        assert_eq!(apply_move(&start, &Move::Invert { i: 2 }), Err(Error::RelatorIndex { index: 2, count: 2 }));
        assert_eq!(apply_move(&start, &Move::MultiplyRight { i: 1, j: 1 }), Err(Error::SameRelator(1)));
        assert_eq!(apply_move(&start, &Move::RemoveEmpty { index: 0 }), Err(Error::NonEmptyRelator(0)));
        let bad_u = Word::generator(5);
        assert!(apply_move(&start, &Move::Conjugate { i: 0, u: bad_u }).is_err());
    }

    #[test]
    fn tietze_moves_round_trip() {
        let start = p("< a | a >");
        let trace = MoveTrace { initial: start.clone(), moves: vec![Move::AddEmpty, Move::RemoveEmpty { index: 1 }] };
        assert_eq!(replay(&trace).unwrap(), start);
        let v = verify_trivialization(&trace, false).unwrap();
        assert!(v.accepted);
        assert_eq!((v.dihedral_count, v.tietze_moves), (0, 2));
    }

    #[test]
    fn replay_examples() {
        for k in 1..=8 {
            let trace = MoveTrace::new(Presentation::trivial(k));
            assert_eq!(replay(&trace).unwrap(), Presentation::trivial(k));
            let v = verify_trivialization(&trace, true).unwrap();
            assert!(v.accepted);
            assert_eq!(v.dihedral_count, 0);
        }
        let trace = MoveTrace { initial: p("< x | x^-1 >"), moves: vec![Move::Invert { i: 0 }] };
        let v = verify_trivialization(&trace, false).unwrap();
        assert!(v.accepted);
        assert_eq!(v.dihedral_count, 1);
    }

    #[test]
    fn rejects_non_generator_relator() {
        let trace = MoveTrace::new(p("< x | x^2 >"));
        assert!(!verify_trivialization(&trace, false).unwrap().accepted);
    }

    #[test]
    fn replay_error_carries_index() {
        let trace = MoveTrace {
            initial: p("< x | x >"),
            moves: vec![Move::Invert { i: 0 }, Move::Invert { i: 3 }],
        };
        match replay(&trace) {
            Err(Error::Replay { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn late_stabilize_rejected() {
        let trace = MoveTrace {
            initial: p("< x | x >"),
            moves: vec![Move::Invert { i: 0 }, Move::Stabilize { count: 1 }],
        };
        assert_eq!(replay(&trace), Err(Error::LateStabilize(1)));
        assert!(expand_factor_counts(&trace).is_err());
    }

    #[test]
    fn unordered_acceptance_vs_ordered() {
        let trace = MoveTrace::new(p("< a, b | b, a^-1 >"));
        assert!(verify_trivialization(&trace, false).unwrap().accepted);
        assert!(!verify_trivialization(&trace, true).unwrap().accepted);
    }

    #[test]
    fn fibonacci_values() {
        let got: Vec<u64> = (0..=10).map(|m| fibonacci_bound(m).try_into().unwrap()).collect();
        assert_eq!(got, vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]);
        assert_eq!(fibonacci_bound(0), BigUint::one());
        for m in 1..=60u64 {
            let f: f64 = fibonacci_bound(m).to_string().parse().unwrap();
            assert!(f < (m as f64).exp(), "F_{m} >= e^{m}");
        }
    }

    #[test]
    fn factor_counts_follow_recursion() {
        let start = p("< a, b, c | a, b, c >");
        assert_eq!(expand_factor_counts(&MoveTrace::new(start.clone())).unwrap().max(), BigUint::one());
        // hand simulation of c <- c + c' on two relators: (1,1) (2,1) (2,3) (5,3) (5,8)
        let mut trace = MoveTrace::new(start);
        let expected = [2u32, 3, 5, 8, 13, 21];
        for (step, want) in expected.iter().enumerate() {
            let (j, i) = if step % 2 == 0 { (0, 1) } else { (1, 0) };
            trace.moves.push(Move::Dihedral { j, i, sign: 1, u: Word::generator(2) });
            let counts = expand_factor_counts(&trace).unwrap();
            assert_eq!(counts.max(), BigUint::from(*want));
            assert_eq!(counts.max(), fibonacci_bound(trace.len() as u64));
        }
    }

    #[test]
    fn tietze_and_stabilize_counts() {
        let trace = MoveTrace {
            initial: p("< a | a >"),
            moves: vec![
                Move::Stabilize { count: 1 },
                Move::AddEmpty,
                Move::MultiplyRight { i: 2, j: 0 },
                Move::MultiplyRight { i: 0, j: 1 },
            ],
        };
        let counts = expand_factor_counts(&trace).unwrap();
        assert_eq!(counts.0, vec![BigUint::from(2u32), BigUint::one(), BigUint::one()]);
    }

    #[test]
    fn json_round_trip_is_one_based() {
        let start = p("< a, b | a b^-1, b >");
        let trace = MoveTrace {
            initial: start.clone(),
            moves: vec![
                Move::Stabilize { count: 1 },
                Move::Dihedral { j: 1, i: 0, sign: -1, u: start.word("b a^-1").unwrap() },
                Move::Conjugate { i: 2, u: Word::generator(2) },
                Move::Invert { i: 0 },
                Move::MultiplyRight { i: 0, j: 1 },
                Move::AddEmpty,
                Move::RemoveEmpty { index: 3 },
            ],
        };
        let json = serde_json::to_value(&trace).unwrap();
        assert_eq!(json["moves"][1], serde_json::json!({"op": "dihedral", "j": 2, "i": 1, "sign": -1, "u": "b a^-1"}));
        assert_eq!(json["moves"][2]["u"], "a3");
        let back: MoveTrace = serde_json::from_value(json).unwrap();
        assert_eq!(back, trace);
    }

    #[test]
    fn json_rejects_zero_index() {
        let text = r#"{"initial":{"generators":["x"],"relators":["x"]},"moves":[{"op":"invert","i":0}]}"#;
        assert!(serde_json::from_str::<MoveTrace>(text).is_err());
    }
}
