//! The universal differential calculus of a one-generator polynomial algebra.
//!
//! A basis of `Ω^p k[t]` is given by the words `t^{i0} dt t^{i1} dt … dt t^{ip}`,
//! stored as exponent sequences `(i0, …, ip)`. Products concatenate words,
//! merging the touching exponents, and `d` acts as a graded derivation with
//! `d(dt) = 0`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{AlgebraError, ParseError};
use crate::scalar::Scalar;

/// The generator symbol of a one-generator algebra: `x` for `A`, `y` for `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
}

impl Generator {
    pub fn symbol(self) -> char {
        match self {
            Generator::X => 'x',
            Generator::Y => 'y',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'x' => Some(Generator::X),
            'y' => Some(Generator::Y),
            _ => None,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A monomial `t^{i0} dt t^{i1} … dt t^{ip}` of degree `p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FormWord {
    exps: SmallVec<[u32; 4]>,
}

impl FormWord {
    /// Panics on an empty exponent list; every word has at least `i0`.
    pub fn new(exps: &[u32]) -> Self {
        assert!(!exps.is_empty(), "a form word needs at least one exponent");
        FormWord {
            exps: SmallVec::from_slice(exps),
        }
    }

    pub fn unit() -> Self {
        FormWord::power(0)
    }

    pub fn power(n: u32) -> Self {
        FormWord {
            exps: smallvec::smallvec![n],
        }
    }

    /// The word `dt`.
    pub fn dt() -> Self {
        FormWord::new(&[0, 0])
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> usize {
        self.exps.len() - 1
    }

    /// Number of letters `t` and `dt`, i.e. `p + Σ i_k`.
    pub fn letters(&self) -> u32 {
        self.degree() as u32 + self.exps.iter().sum::<u32>()
    }

    pub fn is_unit(&self) -> bool {
        self.exps.len() == 1 && self.exps[0] == 0
    }

    pub fn max_exponent(&self) -> u32 {
        self.exps.iter().copied().max().unwrap_or(0)
    }

    pub fn first_exponent(&self) -> u32 {
        self.exps[0]
    }

    pub fn last_exponent(&self) -> u32 {
        self.exps[self.exps.len() - 1]
    }

    /// Concatenation product; the last exponent of `self` merges with the
    /// first exponent of `other`.
    pub fn concat(&self, other: &FormWord) -> FormWord {
        let mut exps = self.exps.clone();
        let last = exps.len() - 1;
        exps[last] += other.exps[0];
        exps.extend_from_slice(&other.exps[1..]);
        FormWord { exps }
    }

    /// `d` of the word as a signed list of words (all coefficients ±1).
    pub fn differential(&self) -> Vec<(FormWord, bool)> {
        let mut out = Vec::new();
        for (r, &i) in self.exps.iter().enumerate() {
            let negative = r % 2 == 1;
            for a in 0..i {
                let b = i - 1 - a;
                let mut exps: SmallVec<[u32; 4]> = SmallVec::with_capacity(self.exps.len() + 1);
                exps.extend_from_slice(&self.exps[..r]);
                exps.push(a);
                exps.push(b);
                exps.extend_from_slice(&self.exps[r + 1..]);
                out.push((FormWord { exps }, negative));
            }
        }
        out
    }

    /// All factorizations `self = u · v` into two words.
    pub fn splits(&self) -> Vec<(FormWord, FormWord)> {
        let mut out = Vec::new();
        for (r, &i) in self.exps.iter().enumerate() {
            for s in 0..=i {
                let mut left: SmallVec<[u32; 4]> = SmallVec::from_slice(&self.exps[..r]);
                left.push(s);
                let mut right: SmallVec<[u32; 4]> = smallvec::smallvec![i - s];
                right.extend_from_slice(&self.exps[r + 1..]);
                out.push((FormWord { exps: left }, FormWord { exps: right }));
            }
        }
        out
    }

    pub fn render(&self, gen: Generator) -> String {
        let t = gen.symbol();
        let mut parts: Vec<String> = Vec::new();
        for (k, &i) in self.exps.iter().enumerate() {
            if k > 0 {
                parts.push(format!("d{t}"));
            }
            match i {
                0 => {}
                1 => parts.push(t.to_string()),
                _ => parts.push(format!("{t}^{i}")),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

impl Ord for FormWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exps
            .len()
            .cmp(&other.exps.len())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for FormWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FormWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps.as_slice())
    }
}

/// All words of degree `<= max_degree` with every exponent `<= max_exponent`,
/// ordered by degree and then lexicographically.
pub fn enumerate_basis(max_degree: usize, max_exponent: u32) -> Vec<FormWord> {
    let mut out = Vec::new();
    for p in 0..=max_degree {
        let mut exps = vec![0u32; p + 1];
        loop {
            out.push(FormWord::new(&exps));
            // odometer increment, last position fastest
            let mut pos = p as isize;
            while pos >= 0 {
                let k = pos as usize;
                if exps[k] < max_exponent {
                    exps[k] += 1;
                    break;
                }
                exps[k] = 0;
                pos -= 1;
            }
            if pos < 0 {
                break;
            }
        }
    }
    out
}

/// A finite sum of words over a single generator with exact coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FormElement {
    gen: Generator,
    terms: BTreeMap<FormWord, Scalar>,
}

impl FormElement {
    pub fn zero(gen: Generator) -> Self {
        FormElement {
            gen,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(gen: Generator) -> Self {
        FormElement::from_word(gen, FormWord::unit())
    }

    pub fn from_word(gen: Generator, word: FormWord) -> Self {
        FormElement::monomial(gen, word, Scalar::one())
    }

    pub fn monomial(gen: Generator, word: FormWord, coeff: Scalar) -> Self {
        let mut e = FormElement::zero(gen);
        e.add_term(word, coeff);
        e
    }

    /// `t^n`.
    pub fn power(gen: Generator, n: u32) -> Self {
        FormElement::from_word(gen, FormWord::power(n))
    }

    /// `dt`.
    pub fn dt(gen: Generator) -> Self {
        FormElement::from_word(gen, FormWord::dt())
    }

    pub fn generator(&self) -> Generator {
        self.gen
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &FormWord) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, word: FormWord, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_gen(&self, other: &FormElement) -> Result<(), AlgebraError> {
        if self.gen != other.gen {
            return Err(AlgebraError::GeneratorMismatch {
                expected: self.gen,
                found: other.gen,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FormElement) -> Result<FormElement, AlgebraError> {
        self.check_gen(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FormElement) -> Result<FormElement, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FormElement {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> FormElement {
        let mut out = FormElement::zero(self.gen);
        if c.is_zero() {
            return out;
        }
        for (w, a) in &self.terms {
            out.terms.insert(w.clone(), a * c);
        }
        out
    }

    /// Concatenation product.
    pub fn multiply(&self, other: &FormElement) -> Result<FormElement, AlgebraError> {
        self.check_gen(other)?;
        let mut out = FormElement::zero(self.gen);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    /// The universal differential, a graded derivation with `d∘d = 0`.
    pub fn differential(&self) -> FormElement {
        let mut out = FormElement::zero(self.gen);
        for (w, c) in &self.terms {
            for (dw, negative) in w.differential() {
                out.add_term(dw, if negative { -c } else { c.clone() });
            }
        }
        out
    }

    /// Multiplies the degree-`p` component by `(-1)^p`.
    pub fn grade_sign(&self) -> FormElement {
        let mut out = FormElement::zero(self.gen);
        for (w, c) in &self.terms {
            let c = if w.degree() % 2 == 1 { -c } else { c.clone() };
            out.terms.insert(w.clone(), c);
        }
        out
    }

    /// The degree-`p` component.
    pub fn homogeneous(&self, p: usize) -> FormElement {
        FormElement {
            gen: self.gen,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.degree() == p)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// True when every term has degree `p` (the zero element qualifies).
    pub fn is_homogeneous_of(&self, p: usize) -> bool {
        self.terms.keys().all(|w| w.degree() == p)
    }

    /// Sorted list of the degrees present.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(FormWord::degree).collect();
        d.dedup();
        d
    }

    pub fn parse(gen: Generator, text: &str) -> Result<FormElement, ParseError> {
        let mut out = FormElement::zero(gen);
        for (coeff, letters) in parse_terms(text)? {
            let mut word = FormWord::unit();
            for letter in letters {
                if letter.gen != gen {
                    return Err(ParseError::new(format!(
                        "unexpected generator `{}` in an expression over `{}`",
                        letter.gen, gen
                    )));
                }
                word = word.concat(&letter.word());
            }
            out.add_term(word, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for FormElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gen = self.gen;
        write_sum(f, self.terms.iter().map(|(w, c)| (c, w.render(gen))))
    }
}

impl fmt::Debug for FormElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormElement({self})")
    }
}

/// Writes `c1 m1 + c2 m2 - …`, with unit coefficients suppressed.
pub(crate) fn write_sum<'a, W: fmt::Write>(
    f: &mut W,
    terms: impl Iterator<Item = (&'a Scalar, String)>,
) -> fmt::Result {
    let mut first = true;
    for (c, mono) in terms {
        let negative = c.is_negative();
        let abs = if negative { -c } else { c.clone() };
        if first {
            if negative {
                write!(f, "-")?;
            }
        } else if negative {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        first = false;
        if abs.is_one() {
            write!(f, "{mono}")?;
        } else if mono == "1" {
            write!(f, "{abs}")?;
        } else {
            write!(f, "{abs} {mono}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// A single letter of a parsed monomial: `t^n` or `dt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Letter {
    pub gen: Generator,
    pub differential: bool,
    pub power: u32,
    /// Set when the token was the tensor separator.
    pub separator: bool,
}

impl Letter {
    pub fn word(&self) -> FormWord {
        if self.differential {
            FormWord::dt()
        } else {
            FormWord::power(self.power)
        }
    }
}

/// Splits a signed sum of monomials into `(coefficient, letters)` pairs.
///
/// Grammar: `term (('+'|'-') term)*`, where a term is an optional rational
/// coefficient followed by whitespace-separated factors `t`, `t^n`, `dt`, `1`,
/// and where `⊗` or `@` may appear as a separator token.
pub(crate) fn parse_terms(text: &str) -> Result<Vec<(Scalar, Vec<Letter>)>, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseError::new("empty expression"));
    }
    if text == "0" {
        return Ok(Vec::new());
    }
    // Break into signed chunks at top-level `+`/`-`.
    let mut chunks: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for ch in text.chars() {
        if ch == '+' || ch == '-' {
            if !current.trim().is_empty() {
                chunks.push((negative, std::mem::take(&mut current)));
                negative = false;
            }
            if ch == '-' {
                negative = !negative;
            }
        } else {
            current.push(ch);
        }
    }
    if current.trim().is_empty() {
        return Err(ParseError::new(format!("dangling sign in `{text}`")));
    }
    chunks.push((negative, current));

    let mut out = Vec::new();
    for (negative, chunk) in chunks {
        let mut coeff = Scalar::one();
        let mut letters = Vec::new();
        let spaced = chunk.replace(['⊗', '@'], " ⊗ ").replace('*', " ");
        for tok in spaced.split_whitespace() {
            if tok == "⊗" {
                letters.push(Letter {
                    gen: Generator::X,
                    differential: false,
                    power: 0,
                    separator: true,
                });
                continue;
            }
            if tok.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                let c: Scalar = tok.parse()?;
                coeff = coeff * c;
                continue;
            }
            letters.push(parse_letter(tok)?);
        }
        if negative {
            coeff = -coeff;
        }
        out.push((coeff, letters));
    }
    Ok(out)
}

fn parse_letter(tok: &str) -> Result<Letter, ParseError> {
    let bad = || ParseError::new(format!("unrecognized factor `{tok}`"));
    let mut chars = tok.chars();
    let first = chars.next().ok_or_else(bad)?;
    if first == 'd' {
        let g = chars.next().and_then(Generator::from_symbol).ok_or_else(bad)?;
        if chars.next().is_some() {
            return Err(bad());
        }
        return Ok(Letter {
            gen: g,
            differential: true,
            power: 0,
            separator: false,
        });
    }
    let g = Generator::from_symbol(first).ok_or_else(bad)?;
    let rest: String = chars.collect();
    let power = if rest.is_empty() {
        1
    } else {
        let n = rest.strip_prefix('^').ok_or_else(bad)?;
        n.parse::<u32>().map_err(|_| bad())?
    };
    Ok(Letter {
        gen: g,
        differential: false,
        power,
        separator: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(e: &[u32]) -> FormWord {
        FormWord::new(e)
    }

    fn el(e: &[u32]) -> FormElement {
        FormElement::from_word(Generator::X, w(e))
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(el(&[1]).multiply(&el(&[1])).unwrap(), el(&[2]));
        assert_eq!(el(&[0, 0]).multiply(&el(&[1])).unwrap(), el(&[0, 1]));
        assert_eq!(el(&[1, 0]).multiply(&el(&[0, 2])).unwrap(), el(&[1, 0, 2]));
    }

    #[test]
    fn multiply_rejects_generator_mismatch() {
        let y = FormElement::power(Generator::Y, 1);
        assert!(matches!(
            el(&[1]).multiply(&y),
            Err(AlgebraError::GeneratorMismatch { .. })
        ));
    }

    #[test]
    fn differential_examples() {
        let expected = el(&[1, 0]).add(&el(&[0, 1])).unwrap();
        assert_eq!(el(&[2]).differential(), expected);
        assert!(el(&[0, 0]).differential().is_zero());
        assert_eq!(el(&[1, 0]).differential(), el(&[0, 0, 0]));
    }

    #[test]
    fn grade_sign_examples() {
        assert_eq!(el(&[1]).grade_sign(), el(&[1]));
        assert_eq!(el(&[0, 0]).grade_sign(), el(&[0, 0]).neg());
        let mixed = el(&[2]).add(&el(&[0, 0, 0])).unwrap();
        assert_eq!(mixed.grade_sign(), mixed);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_basis(0, 1), vec![w(&[0]), w(&[1])]);
        assert_eq!(enumerate_basis(1, 0), vec![w(&[0]), w(&[0, 0])]);
        assert_eq!(
            enumerate_basis(1, 1),
            vec![w(&[0]), w(&[1]), w(&[0, 0]), w(&[0, 1]), w(&[1, 0]), w(&[1, 1])]
        );
    }

    #[test]
    fn splits_reassemble() {
        let word = w(&[2, 0, 1]);
        let splits = word.splits();
        assert_eq!(splits.len() as u32, word.letters() + 1);
        for (u, v) in splits {
            assert_eq!(u.concat(&v), word);
        }
    }

    #[test]
    fn render_and_parse() {
        let e = FormElement::parse(Generator::X, "x^2 dx x - 3/2 dx + 1").unwrap();
        assert_eq!(e.coefficient(&w(&[2, 1])), Scalar::one());
        assert_eq!(e.coefficient(&w(&[0, 0])), Scalar::new(-3, 2));
        assert_eq!(e.coefficient(&w(&[0])), Scalar::one());
        assert_eq!(e.to_string(), "1 - 3/2 dx + x^2 dx x");
        let back = FormElement::parse(Generator::X, &e.to_string()).unwrap();
        assert_eq!(back, e);
        assert_eq!(FormElement::zero(Generator::Y).to_string(), "0");
        assert!(FormElement::parse(Generator::X, "x dy").is_err());
        assert!(FormElement::parse(Generator::X, "x +").is_err());
        assert_eq!(
            FormElement::parse(Generator::X, "-x").unwrap(),
            el(&[1]).neg()
        );
    }
}
