//! Exact area by breadth-first search over freely reduced words.
//!
//! One edge inserts a cyclic rotation of some `r^{±1}` at some position and
//! freely reduces. A word of length `L` needs at least `⌈L / R⌉` further
//! edges when `R` is the longest relator, which prunes the search; the
//! bound is raised one level at a time so the first hit is minimal.

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::presentation::Presentation;
use crate::solvers::certificate::{AreaCertificate, CertificateStep};
use crate::word::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AreaCaps {
    /// Words longer than this are not stored.
    pub max_len: usize,
    /// Total words stored across one search level.
    pub max_states: usize,
    pub max_depth: usize,
    /// Deduplicate by conjugacy class instead of by word.
    pub cyclic_keys: bool,
    /// Worker threads; `0` uses the global pool.
    pub threads: usize,
}

impl Default for AreaCaps {
    fn default() -> Self {
        AreaCaps { max_len: 40, max_states: 2_000_000, max_depth: 12, cyclic_keys: false, threads: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum AreaResult {
    Exact { area: usize },
    /// The area lies in `lower..=upper`; `upper` is set when some filling
    /// was found.
    Unknown { lower: usize, upper: Option<usize> },
}

impl AreaResult {
    pub fn exact(&self) -> Option<usize> {
        match self {
            AreaResult::Exact { area } => Some(*area),
            AreaResult::Unknown { .. } => None,
        }
    }

    pub fn upper(&self) -> Option<usize> {
        match self {
            AreaResult::Exact { area } => Some(*area),
            AreaResult::Unknown { upper, .. } => *upper,
        }
    }

    pub fn lower(&self) -> usize {
        match self {
            AreaResult::Exact { area } => *area,
            AreaResult::Unknown { lower, .. } => *lower,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub expanded: usize,
    /// Largest number of words held in one round.
    pub stored: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
pub struct AreaSearch {
    pub result: AreaResult,
    pub certificate: Option<AreaCertificate>,
    pub stats: SearchStats,
}

/// A relator rotation `c = s^-1 r^ε s` together with `s`.
#[derive(Clone, Debug)]
struct Rotation {
    relator: usize,
    sign: i8,
    letters: Vec<Letter>,
    prefix_inverse: Word,
}

fn rotations(p: &Presentation) -> Vec<Rotation> {
    let mut out = Vec::new();
    let mut seen: FxHashSet<Vec<Letter>> = FxHashSet::default();
    for (j, r) in p.relators().iter().enumerate() {
        for sign in [1i8, -1] {
            let base = if sign > 0 { r.clone() } else { r.inverse() };
            let letters = base.letters();
            for shift in 0..letters.len().max(1) {
                let rotated: Vec<Letter> = letters[shift..].iter().chain(&letters[..shift]).copied().collect();
                if rotated.is_empty() || !seen.insert(rotated.clone()) {
                    continue;
                }
                let prefix_inverse = Word::from_letters(letters[..shift].iter().copied()).inverse();
                out.push(Rotation { relator: j, sign, letters: rotated, prefix_inverse });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
struct Edge {
    rotation: u32,
    position: u32,
}

struct Node {
    word: Word,
    parent: usize,
    edge: Option<Edge>,
}

fn splice(w: &Word, at: usize, c: &[Letter]) -> Word {
    let letters = w.letters();
    Word::from_letters(letters[..at].iter().chain(c).chain(&letters[at..]).copied())
}

/// Frontier nodes expanded per parallel batch.
const CHUNK: usize = 2048;

fn lower_bound(len: usize, longest: usize) -> usize {
    len.div_ceil(longest)
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

/// `area(w)` over `p`, exact when the search completes within `caps`.
pub fn area_bfs(p: &Presentation, w: &Word, caps: &AreaCaps) -> AreaResult {
    search(p, w, caps).result
}

/// Like [`area_bfs`] but also returns a certificate for the filling found.
pub fn prove(p: &Presentation, w: &Word, caps: &AreaCaps) -> AreaSearch {
    search(p, w, caps)
}

fn search(p: &Presentation, w: &Word, caps: &AreaCaps) -> AreaSearch {
    with_pool(caps.threads, || search_in_pool(p, w, caps))
}

fn search_in_pool(p: &Presentation, w: &Word, caps: &AreaCaps) -> AreaSearch {
    let mut stats = SearchStats::default();
    if w.is_empty() {
        let certificate = AreaCertificate::new(p, Word::empty(), Vec::new()).ok();
        return AreaSearch { result: AreaResult::Exact { area: 0 }, certificate, stats };
    }
    let rots = rotations(p);
    let longest = rots.iter().map(|r| r.letters.len()).max().unwrap_or(0);
    if longest == 0 {
        return AreaSearch { result: AreaResult::Unknown { lower: usize::MAX, upper: None }, certificate: None, stats };
    }
    if caps.cyclic_keys {
        log::warn!("area search keyed by conjugacy class");
    }
    let key = |v: &Word| if caps.cyclic_keys { v.cyclic_normal_form() } else { v.clone() };
    // smallest lower bound of any word dropped by max_len
    let mut dropped = usize::MAX;
    let start = lower_bound(w.len(), longest);
    for bound in start..=caps.max_depth {
        stats.rounds += 1;
        let mut nodes = vec![Node { word: w.clone(), parent: usize::MAX, edge: None }];
        let mut seen: FxHashSet<Word> = FxHashSet::default();
        seen.insert(key(w));
        let mut frontier = vec![0usize];
        for depth in 0..bound {
            stats.expanded += frontier.len();
            let mut next = Vec::new();
            for chunk in frontier.chunks(CHUNK) {
                let expanded: Vec<(Vec<(Word, Edge)>, usize)> = chunk
                    .par_iter()
                    .map(|&id| {
                        let v = &nodes[id].word;
                        let mut out = Vec::new();
                        let mut local_dropped = usize::MAX;
                        let mut local: FxHashSet<Word> = FxHashSet::default();
                        for (ri, rot) in rots.iter().enumerate() {
                            for at in 0..=v.len() {
                                let child = splice(v, at, &rot.letters);
                                let reach = depth + 1 + lower_bound(child.len(), longest);
                                if reach > bound {
                                    continue;
                                }
                                if child.len() > caps.max_len {
                                    local_dropped = local_dropped.min(reach);
                                    continue;
                                }
                                if local.insert(child.clone()) {
                                    out.push((child, Edge { rotation: ri as u32, position: at as u32 }));
                                }
                            }
                        }
                        (out, local_dropped)
                    })
                    .collect();
                for (&parent, (kids, local_dropped)) in chunk.iter().zip(expanded) {
                    dropped = dropped.min(local_dropped);
                    for (child, edge) in kids {
                        if child.is_empty() {
                            nodes.push(Node { word: child, parent, edge: Some(edge) });
                            let found = depth + 1;
                            stats.stored = stats.stored.max(nodes.len());
                            let certificate = certificate_from(p, &rots, &nodes, nodes.len() - 1);
                            let result = if found <= dropped {
                                AreaResult::Exact { area: found }
                            } else {
                                AreaResult::Unknown { lower: dropped, upper: Some(found) }
                            };
                            return AreaSearch { result, certificate, stats };
                        }
                        if !seen.insert(key(&child)) {
                            continue;
                        }
                        if nodes.len() >= caps.max_states {
                            stats.stored = stats.stored.max(nodes.len());
                            let lower = bound.min(dropped);
                            return AreaSearch { result: AreaResult::Unknown { lower, upper: None }, certificate: None, stats };
                        }
                        nodes.push(Node { word: child, parent, edge: Some(edge) });
                        next.push(nodes.len() - 1);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        stats.stored = stats.stored.max(nodes.len());
    }
    let lower = (caps.max_depth + 1).max(start).min(dropped);
    AreaSearch { result: AreaResult::Unknown { lower, upper: None }, certificate: None, stats }
}

/// Walks the parent pointers back to the start. An edge `v → α c β` with
/// `v = αβ` and `c = s^-1 r^ε s` means `v = (α s^-1) r^-ε (α s^-1)^-1 · child`.
fn certificate_from(p: &Presentation, rots: &[Rotation], nodes: &[Node], mut id: usize) -> Option<AreaCertificate> {
    let mut steps = Vec::new();
    while let Some(edge) = nodes[id].edge {
        let parent = nodes[id].parent;
        let rot = &rots[edge.rotation as usize];
        let alpha = Word::from_letters(nodes[parent].word.letters()[..edge.position as usize].iter().copied());
        steps.push(CertificateStep::new(alpha.concat(&rot.prefix_inverse), rot.relator, -rot.sign));
        id = parent;
    }
    steps.reverse();
    AreaCertificate::new(p, nodes[0].word.clone(), steps).ok()
}

/// Bracketing information about `area*(w) = min_{n ≠ 0} area(w^n)`
/// restricted to `1 ≤ |n| ≤ n_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AreaStarReport {
    /// Least area found over the powers tried.
    pub upper: Option<usize>,
    /// No power `w^n` with `|n| ≤ n_max` has a filling with fewer cells.
    pub exhausted_lower: usize,
    /// Results for `w^n`, `n = 1..=n_max`; `w^-n` has the same area.
    pub powers: Vec<(u32, AreaResult)>,
}

/// Searches the powers `w^1..w^{n_max}`; negative powers are mirror images
/// (`area(v) = area(v^-1)`) and need no separate search.
pub fn area_star_bounded(p: &Presentation, w: &Word, n_max: u32, caps: &AreaCaps) -> AreaStarReport {
    let powers: Vec<(u32, AreaResult)> = (1..=n_max).map(|n| (n, area_bfs(p, &w.pow(n as i64), caps))).collect();
    let upper = powers.iter().filter_map(|(_, r)| r.upper()).min();
    let exhausted_lower = powers.iter().map(|(_, r)| r.lower()).min().unwrap_or(0);
    AreaStarReport { upper, exhausted_lower, powers }
}
