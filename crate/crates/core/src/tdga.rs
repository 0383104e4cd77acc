//! The twisted tensor product `ΩA ⊗_R̃ ΩB` of the two universal calculi.
//!
//! Elements are sums of pairs `(x-word, y-word)` kept in normal order; the
//! twisting map is applied eagerly when multiplying, so two elements are
//! equal exactly when their coefficient tables are.

use std::collections::BTreeMap;
use std::fmt;

use crate::basis::Caps;
use crate::error::{AlgebraError, ParseError};
use crate::omega::{parse_terms, write_sum, FormElement, FormWord, Generator};
use crate::report::{CheckResult, Tally};
use crate::scalar::Scalar;
use crate::twist::TwistingMap;

pub type WordPair = (FormWord, FormWord);

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TdgaElement {
    terms: BTreeMap<WordPair, Scalar>,
}

impl TdgaElement {
    pub fn zero() -> Self {
        TdgaElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        TdgaElement::pair(FormWord::unit(), FormWord::unit())
    }

    pub fn pair(a: FormWord, b: FormWord) -> Self {
        TdgaElement::monomial(a, b, Scalar::one())
    }

    pub fn monomial(a: FormWord, b: FormWord, coeff: Scalar) -> Self {
        let mut e = TdgaElement::zero();
        e.add_term(a, b, coeff);
        e
    }

    /// `x^i ⊗ y^j`.
    pub fn powers(i: u32, j: u32) -> Self {
        TdgaElement::pair(FormWord::power(i), FormWord::power(j))
    }

    /// `u ⊗ v` for arbitrary elements of the two factors.
    pub fn tensor(u: &FormElement, v: &FormElement) -> Self {
        let mut out = TdgaElement::zero();
        for (a, c) in u.terms() {
            for (b, d) in v.terms() {
                out.add_term(a.clone(), b.clone(), c * d);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WordPair, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: &FormWord, b: &FormWord) -> Scalar {
        self.terms
            .get(&(a.clone(), b.clone()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, a: FormWord, b: FormWord, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry((a, b)) {
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

    pub fn add_assign(&mut self, other: &TdgaElement) {
        for ((a, b), c) in &other.terms {
            self.add_term(a.clone(), b.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &TdgaElement, k: &Scalar) {
        if k.is_zero() {
            return;
        }
        for ((a, b), c) in &other.terms {
            self.add_term(a.clone(), b.clone(), c * k);
        }
    }

    pub fn add(&self, other: &TdgaElement) -> TdgaElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &TdgaElement) -> TdgaElement {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    pub fn neg(&self) -> TdgaElement {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, k: &Scalar) -> TdgaElement {
        let mut out = TdgaElement::zero();
        out.add_scaled(self, k);
        out
    }

    /// `(ω_A ⊗ ω_B)(η_A ⊗ η_B) = ω_A a' ⊗ b' η_B` summed over
    /// `R̃(ω_B ⊗ η_A) = Σ a' ⊗ b'`.
    pub fn multiply(&self, twist: &dyn TwistingMap, other: &TdgaElement) -> TdgaElement {
        let mut out = TdgaElement::zero();
        for ((wa, wb), c) in &self.terms {
            for ((ea, eb), d) in &other.terms {
                let cd = c * d;
                // twisting maps are unital, so a unit on either side passes through
                if wb.is_unit() || ea.is_unit() {
                    out.add_term(wa.concat(ea), wb.concat(eb), cd);
                    continue;
                }
                for (a2, b2, k) in twist.twist_words(wb, ea) {
                    out.add_term(wa.concat(&a2), b2.concat(eb), &cd * &k);
                }
            }
        }
        out
    }

    /// `d(φ ⊗ ω) = dφ ⊗ ω + (-1)^{|φ|} φ ⊗ dω`.
    pub fn differential(&self) -> TdgaElement {
        let mut out = TdgaElement::zero();
        for ((a, b), c) in &self.terms {
            for (da, negative) in a.differential() {
                out.add_term(da, b.clone(), if negative { -c } else { c.clone() });
            }
            let sign_flip = a.degree() % 2 == 1;
            for (db, negative) in b.differential() {
                let neg = negative ^ sign_flip;
                out.add_term(a.clone(), db, if neg { -c } else { c.clone() });
            }
        }
        out
    }

    /// Component of total degree `n`.
    pub fn homogeneous(&self, n: usize) -> TdgaElement {
        TdgaElement {
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| a.degree() + b.degree() == n)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous_of(&self, n: usize) -> bool {
        self.terms
            .keys()
            .all(|(a, b)| a.degree() + b.degree() == n)
    }

    /// Sorted, deduplicated total degrees present.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .terms
            .keys()
            .map(|(a, b)| a.degree() + b.degree())
            .collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Largest single exponent occurring in any word.
    pub fn max_exponent(&self) -> u32 {
        self.terms
            .keys()
            .map(|(a, b)| a.max_exponent().max(b.max_exponent()))
            .max()
            .unwrap_or(0)
    }

    pub fn parse(text: &str) -> Result<TdgaElement, ParseError> {
        let mut out = TdgaElement::zero();
        for (coeff, letters) in parse_terms(text)? {
            let mut a = FormWord::unit();
            let mut b = FormWord::unit();
            let mut in_b = false;
            for letter in letters {
                if letter.separator {
                    if in_b {
                        return Err(ParseError::new("more than one `⊗` in a term"));
                    }
                    in_b = true;
                    continue;
                }
                match letter.gen {
                    Generator::X => {
                        if in_b {
                            return Err(ParseError::new(
                                "x-letters must precede y-letters in a tensor term",
                            ));
                        }
                        a = a.concat(&letter.word());
                    }
                    Generator::Y => {
                        in_b = true;
                        b = b.concat(&letter.word());
                    }
                }
            }
            out.add_term(a, b, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for TdgaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(
            f,
            self.terms.iter().map(|((a, b), c)| {
                (
                    c,
                    format!("{} ⊗ {}", a.render(Generator::X), b.render(Generator::Y)),
                )
            }),
        )
    }
}

impl fmt::Debug for TdgaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TdgaElement({self})")
    }
}

/// A vector of tensor entries indexed by a free-basis slot.
///
/// Depending on context slot `l` holding `Σ c a ⊗ b` stands for
/// `Σ c a ⊗ f_l b`, `Σ c f_l b ⊗ a`, `Σ c e_l a ⊗ b`, or for a free-basis
/// coordinate of a module-valued form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Slots(pub Vec<TdgaElement>);

impl Slots {
    pub fn zero(rank: usize) -> Self {
        Slots(vec![TdgaElement::zero(); rank])
    }

    /// A single entry `e` in slot `k`.
    pub fn unit(rank: usize, k: usize, e: TdgaElement) -> Self {
        let mut s = Slots::zero(rank);
        s.0[k] = e;
        s
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(TdgaElement::is_zero)
    }

    pub fn get(&self, k: usize) -> &TdgaElement {
        &self.0[k]
    }

    pub fn slot_mut(&mut self, k: usize) -> &mut TdgaElement {
        &mut self.0[k]
    }

    pub fn add_assign(&mut self, other: &Slots) {
        assert_eq!(self.rank(), other.rank());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            a.add_assign(b);
        }
    }

    pub fn add_scaled(&mut self, other: &Slots, k: &Scalar) {
        assert_eq!(self.rank(), other.rank());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            a.add_scaled(b, k);
        }
    }

    pub fn add(&self, other: &Slots) -> Slots {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Slots) -> Slots {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    pub fn scale(&self, k: &Scalar) -> Slots {
        Slots(self.0.iter().map(|e| e.scale(k)).collect())
    }

    /// Right multiplication of every entry.
    pub fn mul_right(&self, twist: &dyn TwistingMap, w: &TdgaElement) -> Slots {
        Slots(self.0.iter().map(|e| e.multiply(twist, w)).collect())
    }

    /// Apply `f` entrywise.
    pub fn map(&self, f: impl Fn(&TdgaElement) -> TdgaElement) -> Slots {
        Slots(self.0.iter().map(f).collect())
    }

    pub fn is_homogeneous_of(&self, n: usize) -> bool {
        self.0.iter().all(|e| e.is_homogeneous_of(n))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.0.iter().flat_map(TdgaElement::degrees).collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

impl fmt::Display for Slots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Slots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Slots{self}")
    }
}

/// `u ↦ u ⊗ 1`; rejects elements over `y`.
pub fn embed_a(u: &FormElement) -> Result<TdgaElement, AlgebraError> {
    if u.generator() != Generator::X {
        return Err(AlgebraError::GeneratorMismatch {
            expected: Generator::X,
            found: u.generator(),
        });
    }
    Ok(TdgaElement::tensor(u, &FormElement::one(Generator::Y)))
}

/// `v ↦ 1 ⊗ v`; rejects elements over `x`.
pub fn embed_b(v: &FormElement) -> Result<TdgaElement, AlgebraError> {
    if v.generator() != Generator::Y {
        return Err(AlgebraError::GeneratorMismatch {
            expected: Generator::Y,
            found: v.generator(),
        });
    }
    Ok(TdgaElement::tensor(&FormElement::one(Generator::X), v))
}

/// Exponent cap for the exhaustive associativity sweep over triples.
pub const ASSOCIATIVITY_EXPONENT: u32 = 2;

/// Associativity, graded Leibniz, `d² = 0` and the quantum-plane relation
/// on basis elements of `ΩA ⊗_R̃ ΩB`.
///
/// Triples for associativity use exponents up to
/// `min(max_exponent, ASSOCIATIVITY_EXPONENT)`; the other laws use the full caps.
pub fn check_dga_laws(twist: &dyn TwistingMap, q: &Scalar, caps: Caps) -> CheckResult {
    let mut tally = Tally::new(
        "dga-laws",
        &["associativity", "graded-leibniz", "d-squared", "quantum-plane"],
    );
    let elem = |(a, b): &(FormWord, FormWord)| TdgaElement::pair(a.clone(), b.clone());
    let assoc = Caps::new(caps.max_exponent.min(ASSOCIATIVITY_EXPONENT), caps.max_degree);
    let small: Vec<(usize, TdgaElement)> = assoc
        .pairs()
        .iter()
        .map(|p| (p.0.degree() + p.1.degree(), elem(p)))
        .collect();
    for (du, u) in &small {
        for (dv, v) in &small {
            if du + dv > caps.max_degree {
                continue;
            }
            let uv = u.multiply(twist, v);
            for (dw, w) in &small {
                if du + dv + dw > caps.max_degree {
                    continue;
                }
                let lhs = uv.multiply(twist, w);
                let rhs = u.multiply(twist, &v.multiply(twist, w));
                tally.compare("associativity", || format!("({u}) ({v}) ({w})"), &lhs, &rhs);
            }
        }
    }
    let full: Vec<(usize, TdgaElement)> = caps
        .pairs()
        .iter()
        .map(|p| (p.0.degree() + p.1.degree(), elem(p)))
        .collect();
    let lower: Vec<&(usize, TdgaElement)> = full.iter().filter(|(d, _)| *d < caps.max_degree).collect();
    for (du, u) in &lower {
        let du_ = u.differential();
        for (dv, v) in &lower {
            if du + dv >= caps.max_degree {
                continue;
            }
            let lhs = u.multiply(twist, v).differential();
            let rhs = du_
                .multiply(twist, v)
                .add(&u.multiply(twist, &v.differential()).scale(&Scalar::sign(*du)));
            tally.compare("graded-leibniz", || format!("({u}) ({v})"), &lhs, &rhs);
        }
    }
    let zero = TdgaElement::zero();
    for (_, u) in &full {
        tally.compare("d-squared", || u.to_string(), &u.differential().differential(), &zero);
    }
    for a in caps.exponents() {
        for b in caps.exponents() {
            for c in caps.exponents() {
                for d in caps.exponents() {
                    let lhs = TdgaElement::powers(a, b).multiply(twist, &TdgaElement::powers(c, d));
                    let rhs = TdgaElement::powers(a + c, b + d).scale(&q.pow((b * c) as i64));
                    tally.compare(
                        "quantum-plane",
                        || format!("(x^{a} ⊗ y^{b}) (x^{c} ⊗ y^{d})"),
                        &lhs,
                        &rhs,
                    );
                }
            }
        }
    }
    tally.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twist::QTwist;

    fn t(s: &str) -> TdgaElement {
        TdgaElement::parse(s).unwrap()
    }

    #[test]
    fn multiply_examples() {
        let qt = QTwist::new(Scalar::from_int(2)).unwrap();
        assert_eq!(t("1 ⊗ y").multiply(&qt, &t("x ⊗ 1")), t("2 x ⊗ y"));
        assert_eq!(t("x ⊗ 1").multiply(&qt, &t("1 ⊗ y")), t("x ⊗ y"));
        assert_eq!(t("1 ⊗ dy").multiply(&qt, &t("dx ⊗ 1")), t("-2 dx ⊗ dy"));
    }

    #[test]
    fn differential_examples() {
        assert_eq!(t("x ⊗ y").differential(), t("dx ⊗ y + x ⊗ dy"));
        assert!(t("dx ⊗ 1").differential().is_zero());
        assert_eq!(t("x ⊗ dy").differential(), t("dx ⊗ dy"));
        assert_eq!(t("dx ⊗ y").differential(), t("-dx ⊗ dy"));
    }

    #[test]
    fn embeddings() {
        let x2 = FormElement::power(Generator::X, 2);
        assert_eq!(embed_a(&x2).unwrap(), t("x^2 ⊗ 1"));
        assert_eq!(embed_b(&FormElement::dt(Generator::Y)).unwrap(), t("1 ⊗ dy"));
        let qt = QTwist::new(Scalar::from_int(5)).unwrap();
        let prod = embed_a(&FormElement::dt(Generator::X))
            .unwrap()
            .multiply(&qt, &embed_b(&FormElement::dt(Generator::Y)).unwrap());
        assert_eq!(prod, t("dx ⊗ dy"));
        assert!(embed_a(&FormElement::dt(Generator::Y)).is_err());
    }

    #[test]
    fn parse_render_roundtrip() {
        let e = t("3/2 x^2 dx ⊗ y dy - dx @ 1 + x y");
        assert_eq!(TdgaElement::parse(&e.to_string()).unwrap(), e);
        assert!(TdgaElement::parse("y x").is_err());
    }
}
