//! The q-commutation twisting map, its lift to forms, and module twisting maps.
//!
//! `R(y ⊗ x) = q x ⊗ y` lifts to `R̃(ω_B ⊗ ω_A) = (-1)^{|ω_A||ω_B|} q^{ℓ_A ℓ_B} ω_A ⊗ ω_B`
//! where `ℓ` counts letters. Module twisting maps are parameterized by an
//! invertible matrix: `τ(f_k ⊗ x) = x ⊗ Σ_l S_{kl} f_l`.

mod checks;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use smallvec::{smallvec, SmallVec};

use crate::error::AlgebraError;
use crate::matrix::{Matrix, MatrixPowers};
use crate::omega::{write_sum, FormElement, FormWord, Generator};
use crate::scalar::Scalar;
use crate::tdga::{Slots, TdgaElement, WordPair};

pub use checks::{
    check_derived_conditions, check_left_module_twist, check_lift_compat,
    check_right_module_twist, check_twisting_axioms,
};

pub type TwistTerms = SmallVec<[(FormWord, FormWord, Scalar); 1]>;

/// A twisting map `Ω B ⊗ Ω A → Ω A ⊗ Ω B` given on basis pairs.
pub trait TwistingMap {
    /// `R̃(b ⊗ a)` as terms `(a′, b′, c)` meaning `c a′ ⊗ b′`.
    fn twist_words(&self, b: &FormWord, a: &FormWord) -> TwistTerms;
}

/// The inverse `Ω A ⊗ Ω B → Ω B ⊗ Ω A`.
pub trait InverseTwist {
    /// `S̃(a ⊗ b)` as terms `(b′, a′, c)` meaning `c b′ ⊗ a′`.
    fn untwist_words(&self, a: &FormWord, b: &FormWord) -> TwistTerms;
}

/// A sum of pairs in `Ω B ⊗ Ω A`, keyed `(y-word, x-word)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ReverseTensor {
    terms: BTreeMap<WordPair, Scalar>,
}

impl ReverseTensor {
    pub fn zero() -> Self {
        ReverseTensor::default()
    }

    pub fn pair(b: FormWord, a: FormWord) -> Self {
        let mut t = ReverseTensor::zero();
        t.add_term(b, a, Scalar::one());
        t
    }

    /// `v ⊗ u` for a `y`-element `v` and an `x`-element `u`.
    pub fn tensor(v: &FormElement, u: &FormElement) -> Self {
        let mut t = ReverseTensor::zero();
        for (b, c) in v.terms() {
            for (a, d) in u.terms() {
                t.add_term(b.clone(), a.clone(), c * d);
            }
        }
        t
    }

    pub fn add_term(&mut self, b: FormWord, a: FormWord, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry((b, a)) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WordPair, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for ReverseTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(
            f,
            self.terms.iter().map(|((b, a), c)| {
                (
                    c,
                    format!("{} ⊗ {}", b.render(Generator::Y), a.render(Generator::X)),
                )
            }),
        )
    }
}

impl fmt::Debug for ReverseTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReverseTensor({self})")
    }
}

/// Applies a twisting map to every term of `Ω B ⊗ Ω A`.
pub fn twist_tensor(map: &dyn TwistingMap, t: &ReverseTensor) -> TdgaElement {
    let mut out = TdgaElement::zero();
    for ((b, a), c) in t.terms() {
        for (a2, b2, k) in map.twist_words(b, a) {
            out.add_term(a2, b2, c * &k);
        }
    }
    out
}

/// Applies an inverse twisting map to every term of `Ω A ⊗ Ω B`.
pub fn untwist_tensor(map: &dyn InverseTwist, t: &TdgaElement) -> ReverseTensor {
    let mut out = ReverseTensor::zero();
    for ((a, b), c) in t.terms() {
        for (b2, a2, k) in map.untwist_words(a, b) {
            out.add_term(b2, a2, c * &k);
        }
    }
    out
}

const POWER_CACHE: usize = 512;

/// The twisting map `R(y ⊗ x) = q x ⊗ y` together with its lift and inverse.
#[derive(Clone)]
pub struct QTwist {
    q: Scalar,
    positive: Vec<Scalar>,
    negative: Vec<Scalar>,
}

impl QTwist {
    pub fn new(q: Scalar) -> Result<Self, AlgebraError> {
        let inv = q.inv().ok_or(AlgebraError::ZeroParameter)?;
        let mut positive = Vec::with_capacity(POWER_CACHE);
        let mut negative = Vec::with_capacity(POWER_CACHE);
        positive.push(Scalar::one());
        negative.push(Scalar::one());
        for k in 1..POWER_CACHE {
            positive.push(&positive[k - 1] * &q);
            negative.push(&negative[k - 1] * &inv);
        }
        Ok(QTwist {
            q,
            positive,
            negative,
        })
    }

    /// The classical flip.
    pub fn flip() -> Self {
        QTwist::new(Scalar::one()).expect("1 is nonzero")
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn q_pow(&self, k: i64) -> Scalar {
        let idx = k.unsigned_abs() as usize;
        let table = if k >= 0 { &self.positive } else { &self.negative };
        match table.get(idx) {
            Some(v) => v.clone(),
            None => self.q.pow(k),
        }
    }

    /// `(-1)^{|a||b|} q^{ℓ_a ℓ_b}`.
    pub fn lift_coefficient(&self, b: &FormWord, a: &FormWord) -> Scalar {
        let c = self.q_pow(a.letters() as i64 * b.letters() as i64);
        if a.degree() * b.degree() % 2 == 1 {
            -c
        } else {
            c
        }
    }

    fn inverse_coefficient(&self, a: &FormWord, b: &FormWord) -> Scalar {
        let c = self.q_pow(-(a.letters() as i64 * b.letters() as i64));
        if a.degree() * b.degree() % 2 == 1 {
            -c
        } else {
            c
        }
    }

    /// `R̃(ω_B ⊗ ω_A)` for a `y`-element and an `x`-element.
    pub fn apply_r_lift(
        &self,
        omega_b: &FormElement,
        omega_a: &FormElement,
    ) -> Result<TdgaElement, AlgebraError> {
        expect_generator(omega_b, Generator::Y)?;
        expect_generator(omega_a, Generator::X)?;
        Ok(twist_tensor(self, &ReverseTensor::tensor(omega_b, omega_a)))
    }

    /// `S̃(ω_A ⊗ ω_B)`.
    pub fn apply_s(
        &self,
        omega_a: &FormElement,
        omega_b: &FormElement,
    ) -> Result<ReverseTensor, AlgebraError> {
        expect_generator(omega_a, Generator::X)?;
        expect_generator(omega_b, Generator::Y)?;
        Ok(untwist_tensor(self, &TdgaElement::tensor(omega_a, omega_b)))
    }
}

impl fmt::Debug for QTwist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QTwist(q = {})", self.q)
    }
}

impl PartialEq for QTwist {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl TwistingMap for QTwist {
    fn twist_words(&self, b: &FormWord, a: &FormWord) -> TwistTerms {
        smallvec![(a.clone(), b.clone(), self.lift_coefficient(b, a))]
    }
}

impl InverseTwist for QTwist {
    fn untwist_words(&self, a: &FormWord, b: &FormWord) -> TwistTerms {
        smallvec![(b.clone(), a.clone(), self.inverse_coefficient(a, b))]
    }
}

fn expect_generator(u: &FormElement, gen: Generator) -> Result<(), AlgebraError> {
    if u.generator() == gen {
        Ok(())
    } else {
        Err(AlgebraError::GeneratorMismatch {
            expected: gen,
            found: u.generator(),
        })
    }
}

fn expect_degree_zero(u: &FormElement) -> Result<(), AlgebraError> {
    match u.degrees().last() {
        Some(&p) if p > 0 => Err(AlgebraError::DegreeMismatch {
            expected: 0,
            found: p,
        }),
        _ => Ok(()),
    }
}

/// A right module twisting map `F ⊗ A → A ⊗ F` on a free right `B`-module
/// with basis `f_1, …, f_n`.
///
/// Outputs are [`Slots`] indexed by the basis of `F`; slot `l` holding
/// `c x^a ⊗ y^b` stands for `c x^a ⊗ f_l y^b` (for `τ`) or `c f_l y^b ⊗ x^a`
/// (for `σ`).
pub trait RightModuleTwist {
    fn rank(&self) -> usize;
    /// `τ(f_k y^j ⊗ x^i)`.
    fn tau(&self, k: usize, j: u32, i: u32) -> Slots;
    /// `σ(x^i ⊗ f_k y^j)`.
    fn sigma(&self, i: u32, k: usize, j: u32) -> Slots;
}

/// A left module twisting map `B ⊗ E → E ⊗ B` on a free module with basis
/// `e_1, …, e_m`; slot `l` holding `c x^a ⊗ y^b` stands for `c e_l x^a ⊗ y^b`.
pub trait LeftModuleTwist {
    fn rank(&self) -> usize;
    /// `τ(y^j ⊗ e_k x^i)`.
    fn left_tau(&self, j: u32, k: usize, i: u32) -> Slots;
}

const MATRIX_CACHE: u32 = 24;

fn matrix_entry(powers: &MatrixPowers, k: i64, row: usize, col: usize) -> Scalar {
    match powers.cached(k) {
        Some(m) => m.get(row, col).clone(),
        None => powers.pow(k).get(row, col).clone(),
    }
}

/// `τ(f_k y^j ⊗ x^i) = q^{ij} Σ_l (S^i)_{kl} x^i ⊗ f_l y^j`.
#[derive(Clone, Debug)]
pub struct TauSpec {
    qt: QTwist,
    s: Matrix,
    powers: MatrixPowers,
}

impl TauSpec {
    pub fn new(qt: &QTwist, s: Matrix) -> Result<Self, AlgebraError> {
        let powers = MatrixPowers::new(&s, MATRIX_CACHE)?;
        Ok(TauSpec {
            qt: qt.clone(),
            s,
            powers,
        })
    }

    /// The canonical choice `S = I`.
    pub fn canonical(qt: &QTwist, n: usize) -> Self {
        TauSpec::new(qt, Matrix::identity(n)).expect("identity is invertible")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.s
    }

    pub fn q(&self) -> &Scalar {
        self.qt.q()
    }

    /// Coefficients of `τ̃(f_k y^j ⊗ ω_A) = Σ_l c_l ω_A ⊗ f_l y^j` for a form
    /// `ω_A` with `letters` letters.
    pub fn tau_lift(&self, k: usize, j: u32, letters: u32) -> Vec<(usize, Scalar)> {
        let qp = self.qt.q_pow(j as i64 * letters as i64);
        (0..self.s.size())
            .map(|l| (l, &qp * &matrix_entry(&self.powers, letters as i64, k, l)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// Coefficients of `σ̃(ω_A ⊗ f_k y^j) = Σ_l c_l f_l y^j ⊗ ω_A`.
    pub fn sigma_lift(&self, letters: u32, k: usize, j: u32) -> Vec<(usize, Scalar)> {
        let qp = self.qt.q_pow(-(j as i64 * letters as i64));
        (0..self.s.size())
            .map(|l| (l, &qp * &matrix_entry(&self.powers, -(letters as i64), k, l)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// `(S^{e})_{kl}` for any integer `e`.
    pub fn s_power_entry(&self, e: i64, k: usize, l: usize) -> Scalar {
        matrix_entry(&self.powers, e, k, l)
    }

    /// `τ(f_k b ⊗ a)` for degree-0 elements `b` over `y` and `a` over `x`.
    pub fn apply_tau(
        &self,
        k: usize,
        b: &FormElement,
        a: &FormElement,
    ) -> Result<Slots, AlgebraError> {
        self.check_index(k)?;
        expect_generator(b, Generator::Y)?;
        expect_generator(a, Generator::X)?;
        expect_degree_zero(b)?;
        expect_degree_zero(a)?;
        let mut out = Slots::zero(self.rank());
        for (bw, c) in b.terms() {
            for (aw, d) in a.terms() {
                let t = self.tau(k, bw.first_exponent(), aw.first_exponent());
                out.add_scaled(&t, &(c * d));
            }
        }
        Ok(out)
    }

    /// `σ(a ⊗ f_k b)`.
    pub fn apply_sigma(
        &self,
        a: &FormElement,
        k: usize,
        b: &FormElement,
    ) -> Result<Slots, AlgebraError> {
        self.check_index(k)?;
        expect_generator(b, Generator::Y)?;
        expect_generator(a, Generator::X)?;
        expect_degree_zero(b)?;
        expect_degree_zero(a)?;
        let mut out = Slots::zero(self.rank());
        for (aw, c) in a.terms() {
            for (bw, d) in b.terms() {
                let t = self.sigma(aw.first_exponent(), k, bw.first_exponent());
                out.add_scaled(&t, &(c * d));
            }
        }
        Ok(out)
    }

    fn check_index(&self, k: usize) -> Result<(), AlgebraError> {
        if k < self.rank() {
            Ok(())
        } else {
            Err(AlgebraError::RankMismatch {
                expected: self.rank(),
                found: k + 1,
            })
        }
    }
}

impl RightModuleTwist for TauSpec {
    fn rank(&self) -> usize {
        self.s.size()
    }

    fn tau(&self, k: usize, j: u32, i: u32) -> Slots {
        let mut out = Slots::zero(self.rank());
        for (l, c) in self.tau_lift(k, j, i) {
            out.slot_mut(l)
                .add_term(FormWord::power(i), FormWord::power(j), c);
        }
        out
    }

    fn sigma(&self, i: u32, k: usize, j: u32) -> Slots {
        let mut out = Slots::zero(self.rank());
        for (l, c) in self.sigma_lift(i, k, j) {
            out.slot_mut(l)
                .add_term(FormWord::power(i), FormWord::power(j), c);
        }
        out
    }
}

/// `τ_{B,E}(y^j ⊗ e_k x^i) = q^{ij} Σ_l (T^j)_{kl} e_l x^i ⊗ y^j`.
#[derive(Clone, Debug)]
pub struct LeftTauSpec {
    qt: QTwist,
    t: Matrix,
    powers: MatrixPowers,
}

impl LeftTauSpec {
    pub fn new(qt: &QTwist, t: Matrix) -> Result<Self, AlgebraError> {
        let powers = MatrixPowers::new(&t, MATRIX_CACHE)?;
        Ok(LeftTauSpec {
            qt: qt.clone(),
            t,
            powers,
        })
    }

    pub fn canonical(qt: &QTwist, m: usize) -> Self {
        LeftTauSpec::new(qt, Matrix::identity(m)).expect("identity is invertible")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.t
    }

    /// Coefficients of `τ̃(η ⊗ e_k x^i) = Σ_l c_l e_l x^i ⊗ η` for a `y`-form
    /// `η` with `letters` letters.
    pub fn tau_lift(&self, letters: u32, k: usize, i: u32) -> Vec<(usize, Scalar)> {
        let qp = self.qt.q_pow(i as i64 * letters as i64);
        (0..self.t.size())
            .map(|l| (l, &qp * &matrix_entry(&self.powers, letters as i64, k, l)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// `(T^{e})_{kl}`.
    pub fn t_power_entry(&self, e: i64, k: usize, l: usize) -> Scalar {
        matrix_entry(&self.powers, e, k, l)
    }

    /// `τ(b ⊗ e_k a)` for degree-0 `b` over `y` and `a` over `x`.
    pub fn apply_left_tau(
        &self,
        b: &FormElement,
        k: usize,
        a: &FormElement,
    ) -> Result<Slots, AlgebraError> {
        if k >= self.rank() {
            return Err(AlgebraError::RankMismatch {
                expected: self.rank(),
                found: k + 1,
            });
        }
        expect_generator(b, Generator::Y)?;
        expect_generator(a, Generator::X)?;
        expect_degree_zero(b)?;
        expect_degree_zero(a)?;
        let mut out = Slots::zero(self.rank());
        for (bw, c) in b.terms() {
            for (aw, d) in a.terms() {
                let t = self.left_tau(bw.first_exponent(), k, aw.first_exponent());
                out.add_scaled(&t, &(c * d));
            }
        }
        Ok(out)
    }
}

impl LeftModuleTwist for LeftTauSpec {
    fn rank(&self) -> usize {
        self.t.size()
    }

    fn left_tau(&self, j: u32, k: usize, i: u32) -> Slots {
        let mut out = Slots::zero(self.rank());
        for (l, c) in self.tau_lift(j, k, i) {
            out.slot_mut(l)
                .add_term(FormWord::power(i), FormWord::power(j), c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fx(s: &str) -> FormElement {
        FormElement::parse(Generator::X, s).unwrap()
    }

    fn fy(s: &str) -> FormElement {
        FormElement::parse(Generator::Y, s).unwrap()
    }

    fn t(s: &str) -> TdgaElement {
        TdgaElement::parse(s).unwrap()
    }

    fn q2() -> QTwist {
        QTwist::new(Scalar::from_int(2)).unwrap()
    }

    #[test]
    fn zero_q_rejected() {
        assert_eq!(
            QTwist::new(Scalar::zero()).unwrap_err(),
            AlgebraError::ZeroParameter
        );
    }

    #[test]
    fn lift_examples() {
        let qt = q2();
        assert_eq!(qt.apply_r_lift(&fy("y"), &fx("x")).unwrap(), t("2 x ⊗ y"));
        assert_eq!(
            qt.apply_r_lift(&fy("y^3"), &fx("x^2")).unwrap(),
            t("64 x^2 ⊗ y^3")
        );
        assert_eq!(qt.apply_r_lift(&fy("dy"), &fx("dx")).unwrap(), t("-2 dx ⊗ dy"));
        assert_eq!(
            qt.apply_r_lift(&fy("y dy"), &fx("dx")).unwrap(),
            t("-4 dx ⊗ y dy")
        );
        assert!(qt.apply_r_lift(&fx("x"), &fx("x")).is_err());
    }

    #[test]
    fn inverse_examples() {
        let qt = q2();
        let s = qt.apply_s(&fx("x"), &fy("y")).unwrap();
        assert_eq!(s.to_string(), "1/2 y ⊗ x");
        let s = qt.apply_s(&fx("dx"), &fy("dy")).unwrap();
        assert_eq!(s.to_string(), "-1/2 dy ⊗ dx");
        let back = twist_tensor(&qt, &untwist_tensor(&qt, &t("x ⊗ y^2")));
        assert_eq!(back, t("x ⊗ y^2"));
    }

    #[test]
    fn tau_examples() {
        let qt = q2();
        let canon = TauSpec::canonical(&qt, 1);
        assert_eq!(canon.tau(0, 0, 0), Slots(vec![t("1 ⊗ 1")]));
        assert_eq!(canon.tau(0, 2, 3), Slots(vec![t("64 x^3 ⊗ y^2")]));
        let ts = TauSpec::new(&qt, Matrix::from_ints(&[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(
            ts.apply_tau(0, &fy("y"), &fx("x")).unwrap(),
            Slots(vec![t("2 x ⊗ y"), t("2 x ⊗ y")])
        );
        assert_eq!(
            canon.apply_sigma(&fx("x"), 0, &fy("y^3")).unwrap(),
            Slots(vec![t("1/8 x ⊗ y^3")])
        );
    }

    #[test]
    fn left_tau_examples() {
        let qt = q2();
        let lts = LeftTauSpec::canonical(&qt, 2);
        assert_eq!(lts.left_tau(0, 1, 0), Slots(vec![t("0"), t("1 ⊗ 1")]));
        assert_eq!(
            lts.apply_left_tau(&fy("y"), 0, &fx("x")).unwrap(),
            Slots(vec![t("2 x ⊗ y"), t("0")])
        );
        assert_eq!(lts.left_tau(2, 0, 0), Slots(vec![t("1 ⊗ y^2"), t("0")]));
    }

    #[test]
    fn singular_matrix_rejected() {
        let qt = q2();
        assert!(TauSpec::new(&qt, Matrix::from_ints(&[&[1, 2], &[2, 4]])).is_err());
    }
}
