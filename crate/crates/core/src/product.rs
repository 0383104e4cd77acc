//! The twisted product connection on `(E ⊗ B) ⊕ (A ⊗ F)`.
//!
//! The module is free as a right `A ⊗_R B`-module on `e_k ⊗ 1` and `1 ⊗ f_k`,
//! so an element of the module tensored with forms is stored as two blocks
//! of coordinates in `Ω A ⊗_R̃ Ω B`. The naive element `x^i ⊗ f_l y^j` of
//! `A ⊗ F` has coordinates `(S^{-i})_{lk} x^i ⊗ y^j` in slot `k`.
//!
//! On degree-0 inputs `∇₂` is evaluated from its defining formula, term by
//! term, so that it genuinely fails to be a connection when `τ` and `∇^F`
//! are incompatible. Higher degrees use `∇(s ⊗ ω) = ∇(s)ω + s ⊗ dω`.

use std::collections::BTreeMap;
use std::fmt;

use crate::basis::Caps;
use crate::connections::{ModuleConnection, ModuleVector};
use crate::error::AlgebraError;
use crate::omega::{FormElement, FormWord, Generator};
use crate::report::{CheckResult, Tally, Verdict, Witness};
use crate::scalar::Scalar;
use crate::tdga::{embed_a, embed_b, Slots, TdgaElement};
use crate::twist::{
    check_derived_conditions, check_right_module_twist, QTwist, RightModuleTwist, TauSpec,
    TwistingMap,
};

/// An element of `((E ⊗ B) ⊕ (A ⊗ F)) ⊗ Ω(A ⊗_R B)` in free coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ProductElement {
    pub e: Slots,
    pub f: Slots,
}

impl ProductElement {
    pub fn zero(m: usize, n: usize) -> Self {
        ProductElement {
            e: Slots::zero(m),
            f: Slots::zero(n),
        }
    }

    /// `(e_k ⊗ 1) · w`.
    pub fn e_unit(m: usize, n: usize, k: usize, w: TdgaElement) -> Self {
        ProductElement {
            e: Slots::unit(m, k, w),
            f: Slots::zero(n),
        }
    }

    /// `(1 ⊗ f_k) · w`.
    pub fn f_unit(m: usize, n: usize, k: usize, w: TdgaElement) -> Self {
        ProductElement {
            e: Slots::zero(m),
            f: Slots::unit(n, k, w),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.e.is_zero() && self.f.is_zero()
    }

    pub fn add(&self, other: &ProductElement) -> ProductElement {
        ProductElement {
            e: self.e.add(&other.e),
            f: self.f.add(&other.f),
        }
    }

    pub fn sub(&self, other: &ProductElement) -> ProductElement {
        ProductElement {
            e: self.e.sub(&other.e),
            f: self.f.sub(&other.f),
        }
    }

    pub fn scale(&self, c: &Scalar) -> ProductElement {
        ProductElement {
            e: self.e.scale(c),
            f: self.f.scale(c),
        }
    }

    /// Right multiplication of all coordinates by a form.
    pub fn mul_right(&self, twist: &dyn TwistingMap, w: &TdgaElement) -> ProductElement {
        ProductElement {
            e: self.e.mul_right(twist, w),
            f: self.f.mul_right(twist, w),
        }
    }

    /// The right action of a degree-0 element of `A ⊗_R B`.
    pub fn act_right(
        &self,
        twist: &dyn TwistingMap,
        w: &TdgaElement,
    ) -> Result<ProductElement, AlgebraError> {
        require_degree_zero(w)?;
        Ok(self.mul_right(twist, w))
    }

    pub fn is_homogeneous_of(&self, p: usize) -> bool {
        self.e.is_homogeneous_of(p) && self.f.is_homogeneous_of(p)
    }
}

impl fmt::Display for ProductElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[e: {} | f: {}]", self.e, self.f)
    }
}

impl fmt::Debug for ProductElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProductElement{self}")
    }
}

pub(crate) fn require_degree_zero(w: &TdgaElement) -> Result<(), AlgebraError> {
    match w.degrees().last() {
        Some(&p) if p > 0 => Err(AlgebraError::DegreeMismatch {
            expected: 0,
            found: p,
        }),
        _ => Ok(()),
    }
}

/// Whether `τ` was found compatible with `∇^F` within caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Unchecked,
    Verified,
    Violated(Witness),
}

/// `∇ = ∇₁ + ∇₂` built from `∇^E`, `∇^F`, `R` and `τ_{F,A}`.
#[derive(Clone, Debug)]
pub struct ProductConnection {
    qt: QTwist,
    ts: TauSpec,
    conn_e: ModuleConnection,
    conn_f: ModuleConnection,
    alpha_e: Vec<Vec<TdgaElement>>,
    alpha_f: Vec<Vec<TdgaElement>>,
    hypothesis: Hypothesis,
}

impl ProductConnection {
    pub fn new(
        qt: QTwist,
        ts: TauSpec,
        conn_e: ModuleConnection,
        conn_f: ModuleConnection,
    ) -> Result<Self, AlgebraError> {
        if conn_e.generator() != Generator::X {
            return Err(AlgebraError::GeneratorMismatch {
                expected: Generator::X,
                found: conn_e.generator(),
            });
        }
        if conn_f.generator() != Generator::Y {
            return Err(AlgebraError::GeneratorMismatch {
                expected: Generator::Y,
                found: conn_f.generator(),
            });
        }
        if ts.rank() != conn_f.rank() {
            return Err(AlgebraError::RankMismatch {
                expected: conn_f.rank(),
                found: ts.rank(),
            });
        }
        let alpha_e = embed_matrix(&conn_e, embed_a);
        let alpha_f = embed_matrix(&conn_f, embed_b);
        Ok(ProductConnection {
            qt,
            ts,
            conn_e,
            conn_f,
            alpha_e,
            alpha_f,
            hypothesis: Hypothesis::Unchecked,
        })
    }

    pub fn m(&self) -> usize {
        self.conn_e.rank()
    }

    pub fn n(&self) -> usize {
        self.conn_f.rank()
    }

    pub fn twist(&self) -> &QTwist {
        &self.qt
    }

    pub fn tau(&self) -> &TauSpec {
        &self.ts
    }

    pub fn conn_e(&self) -> &ModuleConnection {
        &self.conn_e
    }

    pub fn conn_f(&self) -> &ModuleConnection {
        &self.conn_f
    }

    pub fn hypothesis(&self) -> &Hypothesis {
        &self.hypothesis
    }

    /// Runs the compatibility checker for `τ` and `∇^F` and records the outcome.
    pub fn record_hypothesis(&mut self, caps: Caps) -> CheckResult {
        let res = check_nabla2cond1(&self.qt, &self.ts, &self.conn_f, caps);
        self.hypothesis = match res.verdict.witness() {
            None => Hypothesis::Verified,
            Some(w) => Hypothesis::Violated(w.clone()),
        };
        res
    }

    /// False once the hypothesis is known to fail.
    pub fn guaranteed(&self) -> bool {
        !matches!(self.hypothesis, Hypothesis::Violated(_))
    }

    fn mul(&self, u: &TdgaElement, v: &TdgaElement) -> TdgaElement {
        u.multiply(&self.qt, v)
    }

    pub fn zero(&self) -> ProductElement {
        ProductElement::zero(self.m(), self.n())
    }

    /// Free coordinates of the naive element `x^i ⊗ f_l y^j`.
    pub fn naive_f(&self, i: u32, l: usize, j: u32) -> Slots {
        let mut out = Slots::zero(self.n());
        for k in 0..self.n() {
            let c = self.ts.s_power_entry(-(i as i64), l, k);
            out.slot_mut(k)
                .add_term(FormWord::power(i), FormWord::power(j), c);
        }
        out
    }

    /// Naive terms `(i, l, j, c)` meaning `c x^i ⊗ f_l y^j` of degree-0 free
    /// F-coordinates.
    pub fn free_to_naive_f(&self, f: &Slots) -> Result<Vec<(u32, usize, u32, Scalar)>, AlgebraError> {
        let mut out = Vec::new();
        for (k, w) in f.0.iter().enumerate() {
            require_degree_zero(w)?;
            for ((a, b), c) in w.terms() {
                let i = a.first_exponent();
                let j = b.first_exponent();
                for l in 0..self.n() {
                    let s = self.ts.s_power_entry(i as i64, k, l);
                    if !s.is_zero() {
                        out.push((i, l, j, c * &s));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Adds `c (x^i ⊗ f_p) ⊗ w` to free F-coordinates.
    pub fn place_f(&self, out: &mut Slots, i: u32, p: usize, w: &TdgaElement, c: &Scalar) {
        if c.is_zero() || w.is_zero() {
            return;
        }
        let xw = self.mul(&TdgaElement::powers(i, 0), w);
        for k in 0..self.n() {
            let s = self.ts.s_power_entry(-(i as i64), p, k);
            if !s.is_zero() {
                out.slot_mut(k).add_scaled(&xw, &(c * &s));
            }
        }
    }

    /// Free coordinates of a naive degree-0 `A ⊗ F` element.
    pub fn naive_to_free_f(&self, terms: &[(u32, usize, u32, Scalar)]) -> Slots {
        let mut out = Slots::zero(self.n());
        for (i, l, j, c) in terms {
            out.add_scaled(&self.naive_f(*i, *l, *j), c);
        }
        out
    }

    /// `∇₁` on the E-block: `dv_p + Σ_k (α^E_{pk} ⊗ 1) v_k`, valid in any degree.
    pub fn nabla1(&self, e: &Slots) -> ProductElement {
        let mut out = e.map(TdgaElement::differential);
        for p in 0..self.m() {
            for k in 0..self.m() {
                let a = &self.alpha_e[p][k];
                if !a.is_zero() && !e.get(k).is_zero() {
                    let t = self.mul(a, e.get(k));
                    out.slot_mut(p).add_assign(&t);
                }
            }
        }
        ProductElement {
            e: out,
            f: Slots::zero(self.n()),
        }
    }

    /// `∇₂` on a degree-0 F-block, evaluated from
    /// `(A ⊗ ∇^F) + (d_A) ∘ σ` on naive terms.
    pub fn nabla2(&self, f: &Slots) -> Result<ProductElement, AlgebraError> {
        let n = self.n();
        let mut out = Slots::zero(n);
        for (i, l, j, c) in self.free_to_naive_f(f)? {
            let yj = FormElement::power(Generator::Y, j);
            for k in 0..n {
                let mut eta = self.conn_f.alpha(k, l).multiply(&yj)?;
                if k == l {
                    eta = eta.add(&yj.differential())?;
                }
                if !eta.is_zero() {
                    self.place_f(&mut out, i, k, &embed_b(&eta)?, &c);
                }
            }
            let sig = self.ts.sigma(i, l, j);
            for (p, w) in sig.0.iter().enumerate() {
                for ((a, b), c2) in w.terms() {
                    let da = FormElement::from_word(Generator::X, a.clone()).differential();
                    if da.is_zero() {
                        continue;
                    }
                    let t = self.mul(&TdgaElement::pair(FormWord::unit(), b.clone()), &embed_a(&da)?);
                    self.place_f(&mut out, 0, p, &t, &(&c * c2));
                }
            }
        }
        Ok(ProductElement {
            e: Slots::zero(self.m()),
            f: out,
        })
    }

    fn nabla_f_extension(&self, f: &Slots) -> Slots {
        let mut out = f.map(TdgaElement::differential);
        for p in 0..self.n() {
            for k in 0..self.n() {
                let a = &self.alpha_f[p][k];
                if !a.is_zero() && !f.get(k).is_zero() {
                    let t = self.mul(a, f.get(k));
                    out.slot_mut(p).add_assign(&t);
                }
            }
        }
        out
    }

    /// The product connection on elements of any degree.
    pub fn product_nabla(&self, pe: &ProductElement) -> ProductElement {
        let mut out = self.nabla1(&pe.e);
        let f0 = pe.f.map(|w| w.homogeneous(0));
        let rest = pe.f.sub(&f0);
        let lit = self.nabla2(&f0).expect("degree-0 block");
        out.f.add_assign(&lit.f);
        out.f.add_assign(&self.nabla_f_extension(&rest));
        out
    }

    pub fn product_curvature(&self, pe: &ProductElement) -> ProductElement {
        self.product_nabla(&self.product_nabla(pe))
    }

    /// `i_E(θ^E(e))·b + a·i_F(θ^F(f))` for a degree-0 input.
    pub fn curvature_rhs(&self, pe: &ProductElement) -> Result<ProductElement, AlgebraError> {
        let theta_e = self.conn_e.curvature_matrix();
        let mut out = self.zero();
        for p in 0..self.m() {
            for k in 0..self.m() {
                require_degree_zero(pe.e.get(k))?;
                if theta_e[p][k].is_zero() {
                    continue;
                }
                let t = self.mul(&embed_a(&theta_e[p][k])?, pe.e.get(k));
                out.e.slot_mut(p).add_assign(&t);
            }
        }
        for (i, l, j, c) in self.free_to_naive_f(&pe.f)? {
            let v = ModuleVector::unit(Generator::Y, self.n(), l, FormElement::power(Generator::Y, j));
            let theta = self.conn_f.curvature_apply(&v)?;
            for p in 0..self.n() {
                if !theta.get(p).is_zero() {
                    self.place_f(&mut out.f, i, p, &embed_b(theta.get(p))?, &c);
                }
            }
        }
        Ok(out)
    }

    /// Degree-0 basis elements `(e_k ⊗ 1)(x^i ⊗ y^j)` and `(1 ⊗ f_k)(x^i ⊗ y^j)`.
    pub fn basis(&self, caps: Caps) -> Vec<(String, ProductElement)> {
        let mut out = Vec::new();
        for k in 0..self.m() {
            for i in caps.exponents() {
                for j in caps.exponents() {
                    out.push((
                        format!("(e{} ⊗ 1)·({})", k + 1, TdgaElement::powers(i, j)),
                        ProductElement::e_unit(self.m(), self.n(), k, TdgaElement::powers(i, j)),
                    ));
                }
            }
        }
        for k in 0..self.n() {
            for i in caps.exponents() {
                for j in caps.exponents() {
                    out.push((
                        format!("(1 ⊗ f{})·({})", k + 1, TdgaElement::powers(i, j)),
                        ProductElement::f_unit(self.m(), self.n(), k, TdgaElement::powers(i, j)),
                    ));
                }
            }
        }
        out
    }

    /// Degree-0 naive basis elements `e_k x^i ⊗ y^j` and `x^i ⊗ f_l y^j`.
    pub fn naive_basis(&self, caps: Caps) -> Vec<(String, ProductElement)> {
        let mut out = Vec::new();
        for k in 0..self.m() {
            for i in caps.exponents() {
                for j in caps.exponents() {
                    out.push((
                        format!("e{} {} ⊗ {}", k + 1, px(i), py(j)),
                        ProductElement::e_unit(self.m(), self.n(), k, TdgaElement::powers(i, j)),
                    ));
                }
            }
        }
        for l in 0..self.n() {
            for i in caps.exponents() {
                for j in caps.exponents() {
                    out.push((
                        format!("{} ⊗ f{} {}", px(i), l + 1, py(j)),
                        ProductElement {
                            e: Slots::zero(self.m()),
                            f: self.naive_f(i, l, j),
                        },
                    ));
                }
            }
        }
        out
    }

    /// Rewrites an element without reference to the F-block coordinate
    /// convention: `(1 ⊗ f_k) ⊗ (x^a ⊗ η)` becomes `Σ_l (S^a)_{kl} x^a ⊗ f_l ⊗ (1 ⊗ η)`.
    pub fn to_naive(&self, pe: &ProductElement) -> NaiveTable {
        let mut table = BTreeMap::new();
        let mut add = |key: NaiveKey, c: Scalar| {
            let entry = table.entry(key).or_insert_with(Scalar::zero);
            *entry += &c;
        };
        for (k, w) in pe.e.0.iter().enumerate() {
            for ((a, b), c) in w.terms() {
                add(NaiveKey::E(k, a.clone(), b.clone()), c.clone());
            }
        }
        for (k, w) in pe.f.0.iter().enumerate() {
            for ((a, b), c) in w.terms() {
                if a.degree() == 0 {
                    let i = a.first_exponent();
                    for l in 0..self.n() {
                        let s = self.ts.s_power_entry(i as i64, k, l);
                        if !s.is_zero() {
                            add(NaiveKey::F(l, i, b.clone()), c * &s);
                        }
                    }
                } else {
                    add(NaiveKey::Coordinate(k, a.clone(), b.clone()), c.clone());
                }
            }
        }
        table.retain(|_, c| !c.is_zero());
        NaiveTable(table)
    }
}

fn embed_matrix(
    c: &ModuleConnection,
    embed: fn(&FormElement) -> Result<TdgaElement, AlgebraError>,
) -> Vec<Vec<TdgaElement>> {
    c.potential()
        .iter()
        .map(|row| row.iter().map(|e| embed(e).expect("generator checked")).collect())
        .collect()
}

fn px(i: u32) -> String {
    FormWord::power(i).render(Generator::X)
}

fn py(j: u32) -> String {
    FormWord::power(j).render(Generator::Y)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NaiveKey {
    /// `(e_k ⊗ 1) ⊗ (a ⊗ b)`.
    E(usize, FormWord, FormWord),
    /// `x^i ⊗ f_l ⊗ (1 ⊗ η)`.
    F(usize, u32, FormWord),
    /// `(1 ⊗ f_k) ⊗ (a ⊗ b)` with `a` of positive degree.
    Coordinate(usize, FormWord, FormWord),
}

/// A coordinate-free table of an element of the product module with forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveTable(pub BTreeMap<NaiveKey, Scalar>);

impl fmt::Display for NaiveTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.0 {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                NaiveKey::E(k, a, b) => write!(
                    f,
                    "({c}) (e{} ⊗ 1) ⊗ ({} ⊗ {})",
                    k + 1,
                    a.render(Generator::X),
                    b.render(Generator::Y)
                )?,
                NaiveKey::F(l, i, b) => write!(
                    f,
                    "({c}) {} ⊗ f{} ⊗ (1 ⊗ {})",
                    px(*i),
                    l + 1,
                    b.render(Generator::Y)
                )?,
                NaiveKey::Coordinate(k, a, b) => write!(
                    f,
                    "({c}) (1 ⊗ f{}) ⊗ ({} ⊗ {})",
                    k + 1,
                    a.render(Generator::X),
                    b.render(Generator::Y)
                )?,
            }
        }
        Ok(())
    }
}

/// `∇^F(f_l b)` as components, for a `y`-form `b`.
fn nabla_f_unit(conn_f: &ModuleConnection, l: usize, b: &FormElement) -> Vec<FormElement> {
    let v = ModuleVector::unit(Generator::Y, conn_f.rank(), l, b.clone());
    conn_f.nabla(&v).expect("rank matches").entries().to_vec()
}

/// Compatibility of `τ_{F,A}` with `∇^F`:
/// `(A ⊗ ∇^F)∘τ = (τ ⊗ Ω¹B)∘(F ⊗ R̃)∘(∇^F ⊗ A)` on `f_k y^j ⊗ x^i`, and the
/// companion identity for `σ` on `x^i ⊗ f_k y^j`.
pub fn check_nabla2cond1(
    qt: &QTwist,
    ts: &dyn RightModuleTwist,
    conn_f: &ModuleConnection,
    caps: Caps,
) -> CheckResult {
    let n = ts.rank();
    let mut tally = Tally::new("nabla2cond1", &["nabla2cond1", "nabla2cond1bis"]);
    if conn_f.rank() != n {
        tally.fail(Witness {
            condition: "nabla2cond1".into(),
            input: "ranks".into(),
            lhs: n.to_string(),
            rhs: conn_f.rank().to_string(),
        });
        return tally.finish();
    }
    let mul = |u: &TdgaElement, v: &TdgaElement| u.multiply(qt, v);
    let yb = |e: u32| TdgaElement::powers(0, e);
    for k in 0..n {
        for j in caps.exponents() {
            for i in caps.exponents() {
                let xi = TdgaElement::powers(i, 0);
                let mut lhs = Slots::zero(n);
                for (l, w) in ts.tau(k, j, i).0.iter().enumerate() {
                    for ((a, b), c) in w.terms() {
                        let comps = nabla_f_unit(conn_f, l, &FormElement::from_word(Generator::Y, b.clone()));
                        for (p, eta) in comps.iter().enumerate() {
                            if eta.is_zero() {
                                continue;
                            }
                            let t = TdgaElement::tensor(&FormElement::from_word(Generator::X, a.clone()), eta);
                            lhs.slot_mut(p).add_scaled(&t, c);
                        }
                    }
                }
                let mut rhs = Slots::zero(n);
                let comps = nabla_f_unit(conn_f, k, &FormElement::power(Generator::Y, j));
                for (p, eta) in comps.iter().enumerate() {
                    if eta.is_zero() {
                        continue;
                    }
                    let twisted = mul(&embed_b(eta).expect("y-form"), &xi);
                    for ((a, eta2), c) in twisted.terms() {
                        let tau = ts.tau(p, 0, a.first_exponent());
                        for (r, w) in tau.0.iter().enumerate() {
                            for ((a2, b2), d) in w.terms() {
                                let t = TdgaElement::pair(a2.clone(), b2.concat(eta2));
                                rhs.slot_mut(r).add_scaled(&t, &(c * d));
                            }
                        }
                    }
                }
                tally.compare(
                    "nabla2cond1",
                    || format!("f{} {} ⊗ {}", k + 1, py(j), px(i)),
                    &lhs,
                    &rhs,
                );

                // σ side, input x^i ⊗ f_k y^j; F ⊗ A ⊗ Ω¹B is stored with the
                // B-part of the F factor pushed through R̃.
                let mut lhs = Slots::zero(n);
                let comps = nabla_f_unit(conn_f, k, &FormElement::power(Generator::Y, j));
                for (p, eta) in comps.iter().enumerate() {
                    if eta.is_zero() {
                        continue;
                    }
                    let eta_t = embed_b(eta).expect("y-form");
                    for (r, w) in ts.sigma(i, p, 0).0.iter().enumerate() {
                        for ((a, b), c) in w.terms() {
                            let t = mul(
                                &mul(&yb(b.first_exponent()), &TdgaElement::pair(a.clone(), FormWord::unit())),
                                &eta_t,
                            );
                            lhs.slot_mut(r).add_scaled(&t, c);
                        }
                    }
                }
                let mut rhs = Slots::zero(n);
                for (l, w) in ts.sigma(i, k, j).0.iter().enumerate() {
                    for ((a, b), c) in w.terms() {
                        let comps = nabla_f_unit(conn_f, l, &FormElement::from_word(Generator::Y, b.clone()));
                        for (p, eta) in comps.iter().enumerate() {
                            if eta.is_zero() {
                                continue;
                            }
                            let t = mul(
                                &embed_b(eta).expect("y-form"),
                                &TdgaElement::pair(a.clone(), FormWord::unit()),
                            );
                            rhs.slot_mut(p).add_scaled(&t, c);
                        }
                    }
                }
                tally.compare(
                    "nabla2cond1bis",
                    || format!("{} ⊗ f{} {}", px(i), k + 1, py(j)),
                    &lhs,
                    &rhs,
                );
            }
        }
    }
    tally.finish()
}

/// The right Leibniz rule `∇(pe·w) = ∇(pe)·w + pe·dw` for degree-0 basis
/// elements and quantum-plane monomials, and its graded form for 1-forms `w`.
pub fn check_connection_property(pc: &ProductConnection, caps: Caps) -> CheckResult {
    let mut tally = Tally::new(
        "product-leibniz",
        &["connection-leibniz", "extension-leibniz"],
    );
    let qt = pc.twist();
    let one_forms: Vec<TdgaElement> = Caps::new(caps.max_exponent, 1)
        .pairs()
        .into_iter()
        .filter(|(a, b)| a.degree() + b.degree() == 1)
        .map(|(a, b)| TdgaElement::pair(a, b))
        .collect();
    for (label, pe) in pc.basis(caps) {
        let npe = pc.product_nabla(&pe);
        for a in caps.exponents() {
            for b in caps.exponents() {
                let w = TdgaElement::powers(a, b);
                let lhs = pc.product_nabla(&pe.mul_right(qt, &w));
                let rhs = npe.mul_right(qt, &w).add(&pe.mul_right(qt, &w.differential()));
                tally.compare(
                    "connection-leibniz",
                    || format!("{label} · {w}"),
                    &lhs,
                    &rhs,
                );
            }
        }
        for w in &one_forms {
            let lhs = pc.product_nabla(&pe.mul_right(qt, w));
            let rhs = npe.mul_right(qt, w).add(&pe.mul_right(qt, &w.differential()));
            tally.compare(
                "extension-leibniz",
                || format!("{label} · {w}"),
                &lhs,
                &rhs,
            );
        }
    }
    let res = tally.finish();
    downgrade(pc, res)
}

/// Marks a check as not guaranteed when the hypothesis is violated.
fn downgrade(pc: &ProductConnection, mut res: CheckResult) -> CheckResult {
    if let Hypothesis::Violated(w) = pc.hypothesis() {
        let reason = match res.verdict.witness() {
            Some(found) => format!("nabla2cond1 fails ({w}); observed {found}"),
            None => format!("nabla2cond1 fails: {w}"),
        };
        res.verdict = Verdict::NotGuaranteed { reason };
    }
    res
}

/// Compares the curvature of the product connection with
/// `i_E(θ^E(e))·b + a·i_F(θ^F(f))` on all capped degree-0 basis elements.
pub fn theorem_check(pc: &ProductConnection, caps: Caps) -> CheckResult {
    if let Hypothesis::Violated(w) = pc.hypothesis() {
        return CheckResult::inadmissible("curvature-theorem", format!("nabla2cond1 fails: {w}"));
    }
    let mut tally = Tally::new("curvature-theorem", &["curvatureformula", "block-diagonal"]);
    for (label, pe) in pc.basis(caps) {
        let theta = pc.product_curvature(&pe);
        let rhs = pc.curvature_rhs(&pe).expect("degree-0 basis");
        tally.compare("curvatureformula", || label.clone(), &theta, &rhs);
        let off = if pe.e.is_zero() { &theta.e } else { &theta.f };
        let zero = Slots::zero(off.rank());
        tally.compare("block-diagonal", || label.clone(), off, &zero);
    }
    tally.finish()
}

/// Zero potentials give zero curvature on all capped basis elements.
pub fn flatness_check(pc: &ProductConnection, caps: Caps) -> CheckResult {
    if !(pc.conn_e().is_grassmann() && pc.conn_f().is_grassmann()) {
        return CheckResult::inadmissible("flatness", "a potential is nonzero");
    }
    let mut tally = Tally::new("flatness", &["flatness"]);
    let zero = pc.zero();
    for (label, pe) in pc.basis(caps) {
        tally.compare("flatness", || label.clone(), &pc.product_curvature(&pe), &zero);
    }
    tally.finish()
}

/// Curvature of every naive basis element, in coordinate-free form.
pub fn curvature_table(pc: &ProductConnection, caps: Caps) -> Vec<(String, NaiveTable)> {
    pc.naive_basis(caps)
        .into_iter()
        .map(|(label, pe)| (label, pc.to_naive(&pc.product_curvature(&pe))))
        .collect()
}

/// Checks that the curvature does not depend on the module twisting map:
/// both `τ` must be admissible, then the curvature tables must agree.
pub fn independence_check(
    qt: &QTwist,
    conn_e: &ModuleConnection,
    conn_f: &ModuleConnection,
    ts1: &TauSpec,
    ts2: &TauSpec,
    caps: Caps,
) -> CheckResult {
    let mut tables = Vec::new();
    for (name, ts) in [("first", ts1), ("second", ts2)] {
        let hyps = [
            check_right_module_twist(ts, qt, caps),
            check_derived_conditions(ts, qt, qt, caps),
            check_nabla2cond1(qt, ts, conn_f, caps),
        ];
        if let Some(bad) = hyps.iter().find(|h| !h.passed()) {
            return CheckResult::inadmissible(
                "independence",
                format!("inadmissible pair: {name} τ fails {}", bad.id),
            );
        }
        let pc = match ProductConnection::new(qt.clone(), ts.clone(), conn_e.clone(), conn_f.clone()) {
            Ok(pc) => pc,
            Err(e) => return CheckResult::inadmissible("independence", format!("inadmissible pair: {e}")),
        };
        tables.push(curvature_table(&pc, caps));
    }
    let mut tally = Tally::new("independence", &["independence"]);
    for ((label, t1), (_, t2)) in tables[0].iter().zip(&tables[1]) {
        tally.compare("independence", || label.clone(), t1, t2);
    }
    tally.finish()
}

/// Inputs `(e ⊗ b, x^j ⊗ f)` for the symbolic report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportInput {
    pub e: Vec<FormElement>,
    pub b: FormElement,
    pub j: u32,
    pub f: Vec<FormElement>,
}

impl ReportInput {
    /// `e = (1, …, 1)`, `b = y`, `a = x`, `f = (y, y^2, …, y^n)`.
    pub fn standard(m: usize, n: usize) -> Self {
        ReportInput {
            e: vec![FormElement::one(Generator::X); m],
            b: FormElement::power(Generator::Y, 1),
            j: 1,
            f: (1..=n as u32).map(|i| FormElement::power(Generator::Y, i)).collect(),
        }
    }
}

fn paren(e: &FormElement) -> String {
    if e.len() > 1 {
        format!("({e})")
    } else {
        e.to_string()
    }
}

fn tuple(es: &[FormElement]) -> String {
    let parts: Vec<String> = es.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn join_terms(terms: Vec<String>) -> String {
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// `λ_c(p)(y) = p(c y)` on a polynomial in `y`.
fn lambda(c: &Scalar, b: &FormElement) -> FormElement {
    let mut out = FormElement::zero(Generator::Y);
    for (w, k) in b.terms() {
        out.add_term(w.clone(), k * &c.pow(w.first_exponent() as i64));
    }
    out
}

fn symbolic_q(exp: i64) -> String {
    match exp {
        0 => String::new(),
        _ => format!("q^{{{exp}}} "),
    }
}

/// Renders the product connection on `(e ⊗ b, x^j ⊗ f)` term by term in the
/// literal form `∇^{gr} + Σ φ-terms + Σ ψ-terms`, checks that the literal
/// terms sum to the computed value, and attaches the hypothesis verdict.
pub fn quantum_plane_report(pc: &ProductConnection, input: &ReportInput, caps: Caps) -> CheckResult {
    let (m, n) = (pc.m(), pc.n());
    let id = "quantum-plane-report";
    if input.e.len() != m || input.f.len() != n {
        return CheckResult::inadmissible(id, "report input ranks do not match the scenario");
    }
    let bad_gen = input.e.iter().any(|a| a.generator() != Generator::X)
        || input.b.generator() != Generator::Y
        || input.f.iter().any(|b| b.generator() != Generator::Y);
    let bad_deg = input.e.iter().chain(input.f.iter()).chain([&input.b]).any(|u| !u.is_homogeneous_of(0));
    if bad_gen || bad_deg {
        return CheckResult::inadmissible(id, "report inputs must be degree-0 polynomials in x and y");
    }
    let j = input.j;
    let xj = FormElement::power(Generator::X, j);
    let dxj = xj.differential();
    let db = input.b.differential();
    let xname = px(j);

    // literal terms, and their normal form accumulated alongside
    let mut literal = pc.zero();
    let mut t1 = Vec::new();
    for (i, a) in input.e.iter().enumerate() {
        let da = a.differential();
        if da.is_zero() {
            continue;
        }
        t1.push(format!("e{} ⊗ 1 ⊗ {}", i + 1, paren(&da)));
        let t = TdgaElement::tensor(&da, &input.b);
        literal.e.slot_mut(i).add_assign(&t);
    }
    let t1 = if t1.is_empty() {
        "0".to_string()
    } else {
        format!("({}) ⊗ {}", t1.join(" + "), paren(&input.b))
    };
    let t2 = format!("{} ⊗ 1 ⊗ 1 ⊗ {}", tuple(&input.e), paren(&db));
    for (i, a) in input.e.iter().enumerate() {
        let t = TdgaElement::tensor(a, &db);
        literal.e.slot_mut(i).add_assign(&t);
    }
    let mut t3 = Vec::new();
    for (k, b) in input.f.iter().enumerate() {
        let dbk = b.differential();
        if dbk.is_zero() {
            continue;
        }
        t3.push(format!("f{} ⊗ 1 ⊗ {}", k + 1, paren(&dbk)));
        pc.place_f(&mut literal.f, j, k, &embed_b(&dbk).expect("y"), &Scalar::one());
    }
    let t3 = format!("{xname} ⊗ ({})", join_terms(t3));
    // σ(x^j ⊗ f_k b_k) = Σ_p f_p c_p ⊗ x^j
    let mut c = vec![FormElement::zero(Generator::Y); n];
    for (k, b) in input.f.iter().enumerate() {
        for (w, coeff) in b.terms() {
            for (p, slot) in pc.tau().sigma(j, k, w.first_exponent()).0.iter().enumerate() {
                for ((_, bw), d) in slot.terms() {
                    c[p].add_term(bw.clone(), coeff * d);
                }
            }
        }
    }
    let t4 = format!("1 ⊗ {} ⊗ {} ⊗ 1", tuple(&c), paren(&dxj));
    for (p, cp) in c.iter().enumerate() {
        if cp.is_zero() || dxj.is_zero() {
            continue;
        }
        let t = TdgaElement::tensor(&FormElement::one(Generator::X), cp)
            .multiply(pc.twist(), &embed_a(&dxj).expect("x"));
        pc.place_f(&mut literal.f, 0, p, &t, &Scalar::one());
    }
    let gr = [t1, t2, t3, t4].join(" + ");

    let mut phi_terms = Vec::new();
    for p in 0..m {
        for (k, a) in input.e.iter().enumerate() {
            let w = pc.conn_e().alpha(p, k).multiply(a).expect("x");
            if w.is_zero() {
                continue;
            }
            phi_terms.push(format!("e{} ⊗ 1 ⊗ {} ⊗ {}", p + 1, paren(&w), paren(&input.b)));
            literal.e.slot_mut(p).add_assign(&TdgaElement::tensor(&w, &input.b));
        }
    }
    let mut psi_terms = Vec::new();
    for k in 0..n {
        for (l, b) in input.f.iter().enumerate() {
            let w = pc.conn_f().alpha(k, l).multiply(b).expect("y");
            if w.is_zero() {
                continue;
            }
            psi_terms.push(format!("{xname} ⊗ f{} ⊗ 1 ⊗ {}", k + 1, paren(&w)));
            pc.place_f(&mut literal.f, j, k, &embed_b(&w).expect("y"), &Scalar::one());
        }
    }
    let mut full = format!("∇^{{gr}} = {gr}");
    if !phi_terms.is_empty() || !psi_terms.is_empty() {
        full = format!(
            "∇ = ∇^{{gr}} + {}",
            join_terms(phi_terms.iter().chain(&psi_terms).cloned().collect())
        );
    }

    // the element itself, in free coordinates
    let mut pe = pc.zero();
    for (i, a) in input.e.iter().enumerate() {
        pe.e.slot_mut(i).add_assign(&TdgaElement::tensor(a, &input.b));
    }
    let mut naive = Vec::new();
    for (k, b) in input.f.iter().enumerate() {
        for (w, coeff) in b.terms() {
            naive.push((j, k, w.first_exponent(), coeff.clone()));
        }
    }
    pe.f = pc.naive_to_free_f(&naive);
    let computed = pc.product_nabla(&pe);

    let mut tally = Tally::new(id, &["literal-terms"]);
    tally.compare("literal-terms", || "(e ⊗ b, a ⊗ f)".to_string(), &literal, &computed);
    let mut res = tally.finish();
    let hyp = check_nabla2cond1(pc.twist(), pc.tau(), pc.conn_f(), caps);
    res = res
        .with_payload(
            "input",
            format!(
                "e = {}, b = {}, a = {xname}, f = {}",
                tuple(&input.e),
                input.b,
                tuple(&input.f)
            ),
        )
        .with_payload("grassmann", format!("∇^{{gr}}(e ⊗ b, a ⊗ f) = {gr}"))
        .with_payload("decomposition", full)
        .with_payload("normalized", computed.to_string())
        .with_payload("nabla2cond1", hyp.verdict.label());
    if let Some(w) = hyp.verdict.witness() {
        res = res.with_payload("nabla2cond1.witness", w.to_string());
    }
    if pc.tau().matrix().is_identity() {
        let qinv = pc.twist().q().inv().expect("q nonzero").pow(j as i64);
        let mut sym = Vec::new();
        let mut remark = Vec::new();
        let mut all_monomial = true;
        for b in &input.f {
            remark.push(format!("1 ⊗ λ_{{q^{{-{j}}}}}({b}) ⊗ {} ⊗ 1", paren(&dxj)));
            let mut terms = b.terms();
            match (terms.next(), terms.next()) {
                (Some((w, coeff)), None) if coeff.is_one() => {
                    let i = w.first_exponent() as i64;
                    sym.push(format!("{}{}", symbolic_q(-(j as i64) * i), py(i as u32)).trim().to_string());
                }
                _ => all_monomial = false,
            }
        }
        let lam: Vec<FormElement> = input.f.iter().map(|b| lambda(&qinv, b)).collect();
        res = res
            .with_payload("remark", join_terms(remark))
            .with_payload("remark.evaluated", format!("1 ⊗ {} ⊗ {} ⊗ 1", tuple(&lam), paren(&dxj)));
        if all_monomial {
            res = res.with_payload(
                "sigma-term",
                format!("1 ⊗ ({}) ⊗ {} ⊗ 1", sym.join(", "), paren(&dxj)),
            );
        }
    }
    res
}
