//! Product-of-conjugates witnesses `w = Π u_i r_{j(i)}^{ε_i} u_i^-1`.

use serde::{Deserialize, Serialize};

use crate::constructions::DoublingLayout;
use crate::error::{Error, Result};
use crate::fixtures::{T, X};
use crate::presentation::Presentation;
use crate::word::{Alphabet, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CertificateStep {
    pub conjugator: Word,
    /// 0-based relator index.
    pub relator: usize,
    pub sign: i8,
}

impl CertificateStep {
    pub fn new(conjugator: Word, relator: usize, sign: i8) -> CertificateStep {
        CertificateStep { conjugator, relator, sign }
    }

    /// `u r^ε u^-1` for the given relator tuple.
    pub fn evaluate(&self, relators: &[Word]) -> Result<Word> {
        let r = relators.get(self.relator).ok_or(Error::RelatorIndex { index: self.relator, count: relators.len() })?;
        let r = if self.sign < 0 { r.inverse() } else { r.clone() };
        Ok(r.conjugate(&self.conjugator))
    }

    fn conjugated_by(&self, g: &Word) -> CertificateStep {
        CertificateStep { conjugator: g.concat(&self.conjugator), ..self.clone() }
    }

    fn inverse(&self) -> CertificateStep {
        CertificateStep { sign: -self.sign, ..self.clone() }
    }
}

/// Multiplies out a sequence of steps.
pub fn product_of_steps(steps: &[CertificateStep], relators: &[Word]) -> Result<Word> {
    let mut letters = Vec::new();
    for s in steps {
        letters.extend(s.evaluate(relators)?.into_letters());
    }
    Ok(Word::from_letters(letters))
}

/// Steps whose product is the inverse of the product of `steps`.
pub fn invert_steps(steps: &[CertificateStep]) -> Vec<CertificateStep> {
    steps.iter().rev().map(CertificateStep::inverse).collect()
}

pub fn conjugate_steps(steps: &[CertificateStep], g: &Word) -> Vec<CertificateStep> {
    steps.iter().map(|s| s.conjugated_by(g)).collect()
}

/// A checked witness that `target` is trivial in a presentation; its length
/// bounds the area of `target` from above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AreaCertificate {
    target: Word,
    steps: Vec<CertificateStep>,
}

impl AreaCertificate {
    /// Fails unless the steps multiply out to `target` over `p`.
    pub fn new(p: &Presentation, target: Word, steps: Vec<CertificateStep>) -> Result<AreaCertificate> {
        let cert = AreaCertificate { target, steps };
        cert.check(p)?;
        Ok(cert)
    }

    pub fn check(&self, p: &Presentation) -> Result<()> {
        self.target.check_alphabet(p.generator_count())?;
        for s in &self.steps {
            s.conjugator.check_alphabet(p.generator_count())?;
        }
        let product = product_of_steps(&self.steps, p.relators())?;
        if product != self.target {
            return Err(Error::Certificate(format!(
                "product {} differs from target {}",
                p.format_word(&product),
                p.format_word(&self.target)
            )));
        }
        Ok(())
    }

    pub fn target(&self) -> &Word {
        &self.target
    }

    pub fn steps(&self) -> &[CertificateStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn to_json_value(&self, alphabet: &Alphabet) -> serde_json::Value {
        serde_json::to_value(RawCertificate {
            target: alphabet.format_word(&self.target),
            steps: self
                .steps
                .iter()
                .map(|s| RawStep { u: alphabet.format_word(&s.conjugator), relator: s.relator + 1, sign: s.sign })
                .collect(),
        })
        .expect("plain data")
    }

    pub fn from_json_value(p: &Presentation, value: &serde_json::Value) -> Result<AreaCertificate> {
        let raw: RawCertificate = serde_json::from_value(value.clone())?;
        let target = p.word(&raw.target)?;
        let steps = raw
            .steps
            .iter()
            .map(|s| {
                if s.sign != 1 && s.sign != -1 {
                    return Err(Error::Parse(format!("step sign must be 1 or -1, got {}", s.sign)));
                }
                let relator = s.relator.checked_sub(1).ok_or_else(|| Error::Parse("relator indices are 1-based".into()))?;
                Ok(CertificateStep::new(p.word(&s.u)?, relator, s.sign))
            })
            .collect::<Result<Vec<_>>>()?;
        AreaCertificate::new(p, target, steps)
    }
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    u: String,
    relator: usize,
    sign: i8,
}

#[derive(Serialize, Deserialize)]
struct RawCertificate {
    target: String,
    steps: Vec<RawStep>,
}

/// Moves a certificate over the seed relators onto the hatted copy inside
/// `P_w`. Applying it twice returns the original.
pub fn hat_certificate(c: &AreaCertificate, layout: &DoublingLayout) -> AreaCertificate {
    AreaCertificate {
        target: layout.hat_word(&c.target),
        steps: c
            .steps
            .iter()
            .map(|s| CertificateStep {
                conjugator: layout.hat_word(&s.conjugator),
                relator: layout.hat_relator(s.relator),
                sign: s.sign,
            })
            .collect(),
    }
}

/// Steps `P` and exponent `E` with `V_m = P x^E` freely, over the single
/// relator `y x y^-1 x^-k` of `S_k`. Refuses once the number of steps would
/// pass `max_steps`.
fn v_decomposition(m: u32, k: u32, max_steps: usize) -> Result<(Vec<CertificateStep>, u64)> {
    let x = Word::generator(X);
    let t = Word::generator(T);
    let y = x.conjugate(&t);
    let too_big = || Error::Certificate(format!("certificate for V_{m} exceeds {max_steps} steps"));
    let (mut steps, mut exponent) = (Vec::new(), 1u64);
    for _ in 0..m {
        // V = t P t^-1 y^E x y^-E t P^-1 t^-1 and y^E x y^-E = S x^(k^E)
        let q = conjugate_steps(&steps, &t);
        let mut s: Vec<CertificateStep> = Vec::new();
        let mut a = 1u64;
        for _ in 0..exponent {
            // y (S x^a) y^-1 = (y S y^-1) Π_{i<a} x^(ki) r x^(-ki) x^(ka)
            s = conjugate_steps(&s, &y);
            if s.len() as u64 + a > max_steps as u64 {
                return Err(too_big());
            }
            s.extend((0..a).map(|i| CertificateStep::new(Word::power_of(X, (k as u64 * i) as i64), 0, 1)));
            a = a.checked_mul(k as u64).ok_or_else(too_big)?;
        }
        let shifted_back = conjugate_steps(&invert_steps(&q), &Word::power_of(X, a as i64));
        if q.len() + s.len() + shifted_back.len() > max_steps {
            return Err(too_big());
        }
        steps = q.into_iter().chain(s).chain(shifted_back).collect();
        exponent = a;
    }
    Ok((steps, exponent))
}

/// A certificate for `V_m x^-E` over `S_k`, with `E = Δ_k(m-1)`.
pub fn v_certificate(m: u32, k: u32, max_steps: usize) -> Result<(AreaCertificate, u64)> {
    let seed = crate::fixtures::seed_s(k)?;
    let (steps, e) = v_decomposition(m, k, max_steps)?;
    let target = crate::constructions::gen_v(m).concat(&Word::power_of(X, -(e as i64)));
    Ok((AreaCertificate::new(&seed, target, steps)?, e))
}

/// A certificate for `w_n` over `S_k` built from the recursion for `V_m`
/// rather than by search: `w_n = x P x^-1 P^-1` when `V_m = P x^E`.
pub fn wn_certificate(n: u64, k: u32, max_steps: usize) -> Result<AreaCertificate> {
    let seed = crate::fixtures::seed_s(k)?;
    let target = crate::constructions::gen_w(n)?;
    let (p, _) = v_decomposition(n.ilog2(), k, max_steps)?;
    if 2 * p.len() > max_steps {
        return Err(Error::Certificate(format!("certificate for w_{n} exceeds {max_steps} steps")));
    }
    let steps = conjugate_steps(&p, &Word::generator(X)).into_iter().chain(invert_steps(&p)).collect();
    AreaCertificate::new(&seed, target, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_pw, DoublingSpec};
    use crate::fixtures;

    #[test]
    fn relator_certificate() {
        let q1 = fixtures::q1();
        let target = q1.relators()[0].clone();
        let c = AreaCertificate::new(&q1, target.clone(), vec![CertificateStep::new(Word::empty(), 0, 1)]).unwrap();
        assert_eq!(c.len(), 1);
        let bad = AreaCertificate::new(&q1, target, vec![CertificateStep::new(Word::empty(), 0, -1)]);
        assert!(matches!(bad, Err(Error::Certificate(_))));
        assert!(AreaCertificate::new(&q1, Word::empty(), vec![CertificateStep::new(Word::empty(), 3, 1)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s2 = fixtures::seed_s(2).unwrap();
        let c = wn_certificate(2, 2, 100).unwrap();
        let json = c.to_json_value(s2.alphabet());
        assert_eq!(json["steps"][0]["relator"], 1);
        assert_eq!(AreaCertificate::from_json_value(&s2, &json).unwrap(), c);
    }

    #[test]
    fn constructive_certificates_for_hard_words() {
        let sizes: Vec<usize> = [2u64, 4, 8].iter().map(|&n| wn_certificate(n, 2, 1000).unwrap().len()).collect();
        assert_eq!(sizes, vec![2, 10, 50]);
        assert_eq!(wn_certificate(3, 2, 1000).unwrap().len(), 2);
        assert_eq!(wn_certificate(2, 3, 1000).unwrap().len(), 2);
        assert!(wn_certificate(4, 3, 1000).is_ok());
        assert!(wn_certificate(16, 2, 10_000).is_err());
    }

    #[test]
    fn v_certificates_use_the_corrected_exponent() {
        let got: Vec<(usize, u64)> = (1..=3).map(|m| {
            let (c, e) = v_certificate(m, 2, 1000).unwrap();
            (c.len(), e)
        }).collect();
        assert_eq!(got, vec![(1, 2), (5, 4), (25, 16)]);
        assert_eq!(v_certificate(0, 2, 10).unwrap().0.len(), 0);
    }

    #[test]
    fn hat_certificate_moves_to_the_copy() {
        let spec = DoublingSpec::seed_family(2, 4).unwrap();
        let doubled = build_pw(&spec).unwrap();
        let c = wn_certificate(4, 2, 1000).unwrap();
        // the seed relators sit at the same indices inside P_w
        let lifted = AreaCertificate::new(&doubled.presentation, c.target().clone(), c.steps().to_vec()).unwrap();
        let hatted = hat_certificate(&lifted, &doubled.layout);
        hatted.check(&doubled.presentation).unwrap();
        assert_eq!(hatted.len(), c.len());
        assert_eq!(hat_certificate(&hatted, &doubled.layout), lifted);
    }
}
