//! Breadth-first search in the AC graph modulo the cheap moves, and maps of
//! the sublevel sets `Λ(m) = { P : λ(P) ≤ m }`.
//!
//! States are relator tuples whose entries are kept in cyclic normal form;
//! two states are identified when their sorted relator lists agree. Every
//! normalization is emitted as literal Invert/Conjugate moves so returned
//! traces replay exactly. Their lengths are upper bounds on `acc`, not
//! minima.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::ac::{apply_in_place, Move, MoveTrace};
use crate::presentation::Presentation;
use crate::word::{Alphabet, Letter, Word};

/// The sorted list of relator cyclic normal forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<Word>);

impl CanonicalKey {
    pub fn of(p: &Presentation) -> CanonicalKey {
        CanonicalKey::from_relators(p.relators().iter().map(Word::cyclic_normal_form).collect())
    }

    fn from_relators(mut relators: Vec<Word>) -> CanonicalKey {
        relators.sort();
        CanonicalKey(relators)
    }

    pub fn relators(&self) -> &[Word] {
        &self.0
    }

    pub fn lambda(&self) -> usize {
        self.0.iter().map(Word::len).sum()
    }

    pub fn to_presentation(&self, alphabet: &Alphabet) -> Presentation {
        Presentation::new(alphabet.clone(), self.0.clone()).expect("same alphabet")
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        self.to_presentation(alphabet).to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchCaps {
    pub max_relator_len: usize,
    pub max_conjugator_len: usize,
    pub max_states: usize,
    pub max_depth: usize,
    /// Worker threads; `0` uses the global pool.
    pub threads: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps { max_relator_len: 12, max_conjugator_len: 1, max_states: 200_000, max_depth: 12, threads: 0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub expanded: usize,
    pub stored: usize,
    pub depth_reached: usize,
    pub frontier: usize,
    pub state_cap_hit: bool,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    /// `depth` counts generating moves; the trace also holds the
    /// normalizing Invert/Conjugate moves.
    Found { trace: MoveTrace, depth: usize, stats: SearchStats },
    Unknown { stats: SearchStats },
}

impl SearchOutcome {
    pub fn trace(&self) -> Option<&MoveTrace> {
        match self {
            SearchOutcome::Found { trace, .. } => Some(trace),
            SearchOutcome::Unknown { .. } => None,
        }
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Found { stats, .. } | SearchOutcome::Unknown { stats } => stats,
        }
    }
}

/// All freely reduced words of length at most `max_len` over `gens`
/// generators, shortest first.
pub fn reduced_words(gens: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for g in 0..gens {
                for positive in [true, false] {
                    let l = Letter::new(g, positive);
                    if w.letters().last() == Some(&l.inverse()) {
                        continue;
                    }
                    let mut letters = w.letters().to_vec();
                    letters.push(l);
                    next.push(Word::from_letters(letters));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Moves putting relator `i` into cyclic normal form.
fn normalize(p: &mut Presentation, i: usize, moves: &mut Vec<Move>) {
    let form = p.relators()[i].cyclic_normal_form_with_witness();
    let mut push = |p: &mut Presentation, m: Move| {
        apply_in_place(p, &m).expect("valid index");
        moves.push(m);
    };
    if form.inverted {
        push(p, Move::Invert { i });
    }
    if !form.conjugator.is_empty() {
        push(p, Move::Conjugate { i, u: form.conjugator });
    }
    debug_assert_eq!(p.relators()[i], form.word);
}

fn normalize_all(p: &mut Presentation) -> Vec<Move> {
    let mut moves = Vec::new();
    for i in 0..p.relators().len() {
        normalize(p, i, &mut moves);
    }
    moves
}

struct Child {
    key: CanonicalKey,
    state: Presentation,
    moves: Vec<Move>,
}

/// Children of a normalized state under Dihedral moves with short
/// conjugators (`u = ε`, sign `+1` is MultiplyRight).
fn children(p: &Presentation, conjugators: &[Word], max_relator_len: usize) -> Vec<Child> {
    let count = p.relators().len();
    let mut out = Vec::new();
    for j in 0..count {
        for i in 0..count {
            if i == j {
                continue;
            }
            for sign in [1i8, -1] {
                for u in conjugators {
                    let m = if u.is_empty() && sign > 0 {
                        Move::MultiplyRight { i: j, j: i }
                    } else {
                        Move::Dihedral { j, i, sign, u: u.clone() }
                    };
                    let mut state = p.clone();
                    apply_in_place(&mut state, &m).expect("valid move");
                    let r = &state.relators()[j];
                    if r.is_empty() || r.cyclically_reduce().len() > max_relator_len {
                        continue;
                    }
                    let mut moves = vec![m];
                    normalize(&mut state, j, &mut moves);
                    out.push(Child { key: CanonicalKey::of(&state), state, moves });
                }
            }
        }
    }
    out
}

fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Frontier states expanded per parallel batch.
const CHUNK: usize = 1024;

struct Node {
    state: Presentation,
    parent: usize,
    moves: Vec<Move>,
}

/// Breadth-first search from `p` towards the trivial presentation.
pub fn bfs_trivialize(p: &Presentation, caps: &SearchCaps) -> SearchOutcome {
    with_pool(caps.threads, || bfs_in_pool(p, caps))
}

fn bfs_in_pool(p: &Presentation, caps: &SearchCaps) -> SearchOutcome {
    let mut stats = SearchStats::default();
    let gens = p.generator_count();
    let target = CanonicalKey::of(&Presentation::trivial(gens));
    let mut start = p.clone();
    let prefix = normalize_all(&mut start);
    let conjugators = reduced_words(gens, caps.max_conjugator_len);
    let mut nodes = vec![Node { state: start, parent: usize::MAX, moves: prefix }];
    let mut seen: FxHashMap<CanonicalKey, usize> = FxHashMap::default();
    seen.insert(CanonicalKey::of(&nodes[0].state), 0);
    let finish = |nodes: &[Node], id: usize, depth: usize, mut stats: SearchStats| {
        let mut chain = Vec::new();
        let mut at = id;
        while at != usize::MAX {
            chain.push(at);
            at = nodes[at].parent;
        }
        let moves = chain.iter().rev().flat_map(|&i| nodes[i].moves.iter().cloned()).collect();
        stats.stored = nodes.len();
        SearchOutcome::Found { trace: MoveTrace { initial: p.clone(), moves }, depth, stats }
    };
    if p.relators().len() != gens {
        return SearchOutcome::Unknown { stats };
    }
    if seen.contains_key(&target) {
        return finish(&nodes, 0, 0, stats);
    }
    let mut frontier = vec![0usize];
    for depth in 1..=caps.max_depth {
        stats.expanded += frontier.len();
        let mut next = Vec::new();
        for chunk in frontier.chunks(CHUNK) {
            let expanded: Vec<Vec<Child>> =
                chunk.par_iter().map(|&id| children(&nodes[id].state, &conjugators, caps.max_relator_len)).collect();
            for (&parent, kids) in chunk.iter().zip(expanded) {
                for child in kids {
                    if seen.contains_key(&child.key) {
                        continue;
                    }
                    let hit = child.key == target;
                    seen.insert(child.key, nodes.len());
                    nodes.push(Node { state: child.state, parent, moves: child.moves });
                    if hit {
                        stats.depth_reached = depth;
                        return finish(&nodes, nodes.len() - 1, depth, stats);
                    }
                    if nodes.len() >= caps.max_states {
                        stats.depth_reached = depth;
                        stats.state_cap_hit = true;
                        stats.stored = nodes.len();
                        stats.frontier = next.len();
                        return SearchOutcome::Unknown { stats };
                    }
                    next.push(nodes.len() - 1);
                }
            }
        }
        stats.depth_reached = depth;
        stats.frontier = next.len();
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    stats.stored = nodes.len();
    SearchOutcome::Unknown { stats }
}

/// `det` of the exponent-sum matrix; the abelianization is trivial exactly
/// when this is `±1`.
pub fn abelian_determinant(p: &Presentation) -> Option<BigInt> {
    let rows = p.exponent_matrix();
    let n = p.generator_count();
    if rows.len() != n {
        return None;
    }
    // Bareiss fraction-free elimination
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(pivot) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Some(BigInt::zero());
        };
        if pivot != c {
            a.swap(pivot, c);
            sign = -sign;
        }
        for r in c + 1..n {
            for col in c + 1..n {
                a[r][col] = (&a[r][col] * &a[c][c] - &a[r][c] * &a[c][col]) / &prev;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[c][c].clone();
    }
    Some(if n == 0 { BigInt::one() } else { sign * &a[n - 1][n - 1] })
}

pub fn has_trivial_abelianization(p: &Presentation) -> bool {
    abelian_determinant(p).is_some_and(|d| d.abs().is_one())
}

/// Cyclic normal forms of all nonempty cyclically reduced words of length
/// at most `max_len`.
fn cyclic_classes(gens: usize, max_len: usize) -> Vec<Word> {
    let mut classes: Vec<Word> = reduced_words(gens, max_len)
        .into_iter()
        .filter(|w| !w.is_empty() && w.is_cyclically_reduced())
        .map(|w| w.cyclic_normal_form())
        .collect();
    classes.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    classes.dedup();
    classes
}

/// Every multiset of `k` nonempty cyclic classes with total length at most
/// `m`, stopping after `limit` keys.
pub fn enumerate_sublevel(k: usize, m: usize, limit: usize) -> (Vec<CanonicalKey>, bool) {
    let classes = cyclic_classes(k, m.saturating_sub(k - 1).max(1));
    struct Walk<'a> {
        classes: &'a [Word],
        k: usize,
        limit: usize,
        chosen: Vec<usize>,
        out: Vec<CanonicalKey>,
        truncated: bool,
    }
    impl Walk<'_> {
        fn rec(&mut self, budget: usize, from: usize) {
            if self.truncated {
                return;
            }
            if self.chosen.len() == self.k {
                if self.out.len() >= self.limit {
                    self.truncated = true;
                    return;
                }
                let key = CanonicalKey::from_relators(self.chosen.iter().map(|&i| self.classes[i].clone()).collect());
                self.out.push(key);
                return;
            }
            let remaining = self.k - self.chosen.len() - 1;
            for i in from..self.classes.len() {
                let len = self.classes[i].len();
                // every later relator has length at least len
                if len * (remaining + 1) > budget {
                    break;
                }
                self.chosen.push(i);
                self.rec(budget - len, i);
                self.chosen.pop();
            }
        }
    }
    let mut walk = Walk { classes: &classes, k, limit, chosen: Vec::new(), out: Vec::new(), truncated: false };
    if k > 0 {
        walk.rec(m, 0);
    }
    let (out, truncated) = (walk.out, walk.truncated);
    (out, truncated)
}

#[derive(Clone, Debug, Serialize)]
pub struct SublevelEntry {
    pub presentation: String,
    pub lambda: usize,
    pub component: usize,
    pub trivial_abelianization: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SublevelReport {
    pub k: usize,
    pub m: usize,
    pub caps: SearchCaps,
    pub presentations: usize,
    /// The enumeration stopped at `caps.max_states` keys.
    pub truncated: bool,
    /// Components are computed under capped moves and may merge under
    /// longer conjugators.
    pub capped: bool,
    pub component_sizes: Vec<usize>,
    /// Component containing the trivial presentation `I_k`.
    pub identity_component: Option<usize>,
    pub entries: Vec<SublevelEntry>,
}

impl SublevelReport {
    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

impl fmt::Display for SublevelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Λ({}) on {} generators: {} presentations, {} components (capped: conjugators ≤ {})",
            self.m,
            self.k,
            self.presentations,
            self.component_count(),
            self.caps.max_conjugator_len
        )?;
        if self.truncated {
            writeln!(f, "enumeration truncated at {} presentations", self.caps.max_states)?;
        }
        writeln!(f, "component sizes: {:?}", self.component_sizes)?;
        for e in &self.entries {
            writeln!(
                f,
                "  [{}] {}{}",
                e.component,
                e.presentation,
                if e.trivial_abelianization { "" } else { "  (abelianization nontrivial)" }
            )?;
        }
        Ok(())
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of `Λ(m)` on `k` generators under Dihedral moves
/// with conjugators of length at most `caps.max_conjugator_len`. Empty
/// relators are outside the enumeration, so moves producing them are not
/// edges.
pub fn explore_sublevel(k: usize, m: usize, caps: &SearchCaps) -> SublevelReport {
    let alphabet = Presentation::trivial(k).alphabet().clone();
    let (keys, truncated) = enumerate_sublevel(k, m, caps.max_states);
    let index: FxHashMap<&CanonicalKey, usize> = keys.iter().enumerate().map(|(i, key)| (key, i)).collect();
    let conjugators = reduced_words(k, caps.max_conjugator_len);
    let neighbours: Vec<Vec<usize>> = with_pool(caps.threads, || {
        keys.par_iter()
            .map(|key| {
                children(&key.to_presentation(&alphabet), &conjugators, m)
                    .into_iter()
                    .filter(|c| c.key.lambda() <= m)
                    .filter_map(|c| index.get(&c.key).copied())
                    .collect()
            })
            .collect()
    });
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    for (a, ns) in neighbours.iter().enumerate() {
        for &b in ns {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    // number components by first appearance
    let mut label: FxHashMap<usize, usize> = FxHashMap::default();
    let mut sizes = Vec::new();
    let mut entries = Vec::with_capacity(keys.len());
    for (i, key) in keys.iter().enumerate() {
        let root = find(&mut parent, i);
        let next = label.len();
        let c = *label.entry(root).or_insert(next);
        if c == sizes.len() {
            sizes.push(0);
        }
        sizes[c] += 1;
        let p = key.to_presentation(&alphabet);
        entries.push(SublevelEntry {
            presentation: p.to_string(),
            lambda: key.lambda(),
            component: c,
            trivial_abelianization: has_trivial_abelianization(&p),
        });
    }
    let identity = CanonicalKey::of(&Presentation::trivial(k));
    let identity_component = index.get(&identity).map(|&i| entries[i].component);
    SublevelReport {
        k,
        m,
        caps: *caps,
        presentations: keys.len(),
        truncated,
        capped: true,
        component_sizes: sizes,
        identity_component,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ac::verify_trivialization;
    use proptest::prelude::*;

    fn p(text: &str) -> Presentation {
        text.parse().unwrap()
    }

    #[test]
    fn one_generator_inverse() {
        let found = bfs_trivialize(&p("< x | x^-1 >"), &SearchCaps::default());
        let trace = found.trace().unwrap();
        assert!(trace.len() <= 1);
        assert!(verify_trivialization(trace, false).unwrap().accepted);
    }

    #[test]
    fn two_generator_example() {
        let found = bfs_trivialize(&p("< a, b | a b, b >"), &SearchCaps::default());
        let trace = found.trace().unwrap();
        assert!(verify_trivialization(trace, false).unwrap().accepted);
        assert!(trace.dihedral_count() <= 3);
    }

    #[test]
    fn nontrivial_group_is_unknown() {
        let caps = SearchCaps { max_depth: 4, ..SearchCaps::default() };
        assert!(matches!(bfs_trivialize(&p("< a, b | a^2, b >"), &caps), SearchOutcome::Unknown { .. }));
    }

    #[test]
    fn traces_replay_literally() {
        let q = p("< a, b | a b a^-1 b^-2, b a b^-1 a^-2 >");
        let caps = SearchCaps { max_depth: 3, max_states: 5000, ..SearchCaps::default() };
        // whatever happens, the search must not panic and must stay within caps
        let out = bfs_trivialize(&q, &caps);
        assert!(out.stats().stored <= 5000);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let q = p("< a, b | a b a, b^-1 a >");
        let one = bfs_trivialize(&q, &SearchCaps { threads: 1, ..SearchCaps::default() });
        let four = bfs_trivialize(&q, &SearchCaps { threads: 4, ..SearchCaps::default() });
        assert_eq!(one.trace(), four.trace());
    }

    #[test]
    fn determinants() {
        assert_eq!(abelian_determinant(&p("< a, b | a b, b >")), Some(BigInt::one()));
        assert_eq!(abelian_determinant(&p("< a, b | a^2, b >")), Some(BigInt::from(2)));
        assert_eq!(abelian_determinant(&p("< a, b, c | b, c, a >")), Some(BigInt::one()));
        assert!(!has_trivial_abelianization(&p("< x, t | t x t^-1 x^-2 >")));
    }

    #[test]
    fn lambda_one_on_one_generator() {
        let report = explore_sublevel(1, 1, &SearchCaps::default());
        // x and x^-1 share a cyclic class, so Λ(1) is a single key
        assert_eq!(report.presentations, 1);
        assert_eq!(report.component_count(), 1);
        assert_eq!(report.identity_component, Some(0));
    }

    #[test]
    fn small_two_generator_sublevel() {
        let report = explore_sublevel(2, 4, &SearchCaps::default());
        assert!(!report.truncated);
        let id = report.identity_component.unwrap();
        for e in &report.entries {
            if e.trivial_abelianization {
                assert_eq!(e.component, id, "{}", e.presentation);
            }
        }
    }

    #[test]
    fn conjugator_words() {
        assert_eq!(reduced_words(2, 2).len(), 1 + 4 + 12);
        assert_eq!(reduced_words(1, 3).len(), 7);
    }

    fn arb_presentation() -> impl Strategy<Value = Presentation> {
        prop::collection::vec(prop::collection::vec((0..2usize, any::<bool>()), 1..8), 2).prop_map(|rels| {
            let relators = rels.into_iter().map(|r| Word::from_letters(r.into_iter().map(|(g, s)| Letter::new(g, s)))).collect();
            Presentation::new(Alphabet::new(["a", "b"]).unwrap(), relators).unwrap()
        })
    }

    proptest! {
        #[test]
        fn key_ignores_cheap_moves(q in arb_presentation(), i in 0..2usize, u in prop::collection::vec((0..2usize, any::<bool>()), 0..4)) {
            let u = Word::from_letters(u.into_iter().map(|(g, s)| Letter::new(g, s)));
            let key = CanonicalKey::of(&q);
            let mut moved = q.clone();
            apply_in_place(&mut moved, &Move::Invert { i }).unwrap();
            prop_assert_eq!(&CanonicalKey::of(&moved), &key);
            apply_in_place(&mut moved, &Move::Conjugate { i, u }).unwrap();
            prop_assert_eq!(&CanonicalKey::of(&moved), &key);
            let swapped = Presentation::new(q.alphabet().clone(), q.relators().iter().rev().cloned().collect()).unwrap();
            prop_assert_eq!(&CanonicalKey::of(&swapped), &key);
        }

        #[test]
        fn normalization_moves_replay(q in arb_presentation()) {
            let mut state = q.clone();
            let moves = normalize_all(&mut state);
            let trace = MoveTrace { initial: q, moves };
            prop_assert_eq!(crate::ac::replay(&trace).unwrap(), state);
        }
    }
}
