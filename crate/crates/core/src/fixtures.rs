//! Named presentations used throughout the workbench.

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::{Alphabet, Letter, Word};

const BRIDSON_EXAMPLE: &str = include_str!("../data/bridson_example.txt");

/// Generator ids of the seed alphabet `{x, t}`.
pub const X: usize = 0;
pub const T: usize = 1;

pub fn seed_alphabet() -> Alphabet {
    Alphabet::new(["x", "t"]).expect("distinct names")
}

/// `(t x t^-1) x (t x t^-1)^-1 x^-k` over `{x, t}`.
pub fn seed_relator(k: u32) -> Word {
    let y = Word::generator(X).conjugate(&Word::generator(T));
    Word::product([&Word::generator(X).conjugate(&y), &Word::power_of(X, -(k as i64))])
}

/// The seed group `S_k = < x, t | (t x t^-1) x (t x t^-1)^-1 = x^k >`.
pub fn seed_s(k: u32) -> Result<Presentation> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("S_k needs k >= 2, got {k}")));
    }
    Presentation::new(seed_alphabet(), vec![seed_relator(k)])
}

/// `Q_1 = < x, y | x y x^-1 y^-1 >`.
pub fn q1() -> Presentation {
    Presentation::parse_parts(&["x", "y"], &["x y x^-1 y^-1"]).expect("valid fixture")
}

/// `Q_2 = < a, s | s^-1 a s a^-2 >`.
pub fn q2() -> Presentation {
    Presentation::parse_parts(&["a", "s"], &["s^-1 a s a^-2"]).expect("valid fixture")
}

/// The iterated Baumslag-Solitar presentation
/// `< a, s_1..s_m | s_1^-1 a s_1 = a^k, s_{i+1}^-1 s_i s_{i+1} = s_i^k >`.
pub fn q_mk(m: usize, k: u32) -> Result<Presentation> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("Q_(m,k) needs k >= 2, got {k}")));
    }
    let mut names = vec!["a".to_string()];
    names.extend((1..=m).map(|i| format!("s{i}")));
    let alphabet = Alphabet::new(names)?;
    // generator i is a for i = 0, s_i otherwise; each s_i conjugates its predecessor
    let relators = (1..=m)
        .map(|i| {
            let base = Word::generator(i - 1);
            Word::product([&base.conjugate(&Word::letter(Letter::neg(i))), &Word::power_of(i - 1, -(k as i64))])
        })
        .collect();
    Presentation::new(alphabet, relators)
}

pub fn b_alphabet(m: usize) -> Alphabet {
    Alphabet::new((0..=m).map(|i| format!("x_{i}"))).expect("distinct names")
}

/// `B_m = < x_0..x_m | x_{i+1} x_i x_{i+1}^-1 = x_i^k >`.
pub fn b_m(m: usize, k: u32) -> Result<Presentation> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("B_m needs k >= 2, got {k}")));
    }
    let relators = (0..m)
        .map(|i| {
            Word::product([
                &Word::generator(i).conjugate(&Word::generator(i + 1)),
                &Word::power_of(i, -(k as i64)),
            ])
        })
        .collect();
    Presentation::new(b_alphabet(m), relators)
}

/// The explicit four-generator balanced presentation of the trivial group
/// built from two copies of `S_2`, stored verbatim as a data file.
pub fn bridson_example() -> Result<Presentation> {
    BRIDSON_EXAMPLE.parse()
}

/// Lists the fixture names understood by [`by_name`].
pub const NAMES: &[&str] = &["trivial", "s", "q1", "q2", "qmk", "b", "bridson"];

/// Looks up a fixture by name with integer parameters `m` and `k`.
pub fn by_name(name: &str, m: Option<usize>, k: Option<u32>) -> Result<Presentation> {
    let need_m = || m.ok_or_else(|| Error::InvalidParameter(format!("fixture `{name}` needs m")));
    let need_k = || k.ok_or_else(|| Error::InvalidParameter(format!("fixture `{name}` needs k")));
    match name {
        "trivial" | "I" => Ok(Presentation::trivial(k.map(|k| k as usize).or(m).unwrap_or(1))),
        "s" | "S" | "seed" => seed_s(k.unwrap_or(2)),
        "s2" => seed_s(2),
        "s3" => seed_s(3),
        "q1" | "Q1" => Ok(q1()),
        "q2" | "Q2" => Ok(q2()),
        "qmk" => q_mk(need_m()?, need_k()?),
        "b" | "B" => b_m(need_m()?, k.unwrap_or(2)),
        "bridson" | "bridson_example" => bridson_example(),
        other => Err(Error::InvalidParameter(format!("unknown fixture `{other}`"))),
    }
}
