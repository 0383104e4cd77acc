//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use twistconn::basis::Caps;
use twistconn::connections::ModuleConnection;
use twistconn::matrix::Matrix;
use twistconn::omega::{FormElement, FormWord};
use twistconn::product::ProductElement;
use twistconn::scalar::Scalar;
use twistconn::tdga::{Slots, TdgaElement};
use twistconn::twist::{QTwist, TwistTerms, TwistingMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    Gen,
    Diff,
}

/// The letters of `t^{i0} dt t^{i1} … dt t^{ip}`, left to right.
pub fn letters(w: &FormWord) -> Vec<Letter> {
    let mut out = Vec::new();
    for (r, &e) in w.exps().iter().enumerate() {
        if r > 0 {
            out.push(Letter::Diff);
        }
        out.extend(std::iter::repeat_n(Letter::Gen, e as usize));
    }
    out
}

/// `R(b ⊗ a)` on single letters: `q` times a Koszul sign when both are
/// differentials.
fn letter_twist(q: &Scalar, b: Letter, a: Letter) -> Scalar {
    match (b, a) {
        (Letter::Diff, Letter::Diff) => -q.clone(),
        _ => q.clone(),
    }
}

/// `R̃(b ⊗ a) = c a ⊗ b`, computed by peeling letters off either argument
/// and applying multiplicativity in that argument.
pub fn recursive_twist(q: &Scalar, b: &[Letter], a: &[Letter]) -> Scalar {
    match (b.len(), a.len()) {
        (0, _) | (_, 0) => Scalar::one(),
        (1, 1) => letter_twist(q, b[0], a[0]),
        (_, 1) => {
            // R(b1 b2 ⊗ a) = a_{R R'} ⊗ b1_{R'} b2_R
            let (b1, b2) = b.split_at(1);
            &recursive_twist(q, b2, a) * &recursive_twist(q, b1, a)
        }
        _ => {
            // R(b ⊗ a1 a2) = a1_R a2_{R'} ⊗ b_{R R'}
            let (a1, a2) = a.split_at(1);
            &recursive_twist(q, b, a1) * &recursive_twist(q, b, a2)
        }
    }
}

pub fn oracle_twist(q: &Scalar, b: &FormWord, a: &FormWord) -> Scalar {
    recursive_twist(q, &letters(b), &letters(a))
}

/// `τ(f_k ⊗ x^i)` by applying `τ(f ⊗ x)` once per letter, as row vectors.
pub fn oracle_tau_row(s: &Matrix, k: usize, i: u32) -> Vec<Scalar> {
    let n = s.size();
    let mut row: Vec<Scalar> = (0..n).map(|l| if l == k { Scalar::one() } else { Scalar::zero() }).collect();
    for _ in 0..i {
        let mut next = vec![Scalar::zero(); n];
        for (p, c) in row.iter().enumerate() {
            for (l, slot) in next.iter_mut().enumerate() {
                *slot += &(c * s.get(p, l));
            }
        }
        row = next;
    }
    row
}

/// `τ(f_k y^j ⊗ x^i) = Σ_l c_l x^i ⊗ f_l y^j` from
/// `τ(f b ⊗ a) = a_{R τ} ⊗ f_τ b_R`.
pub fn oracle_tau(q: &Scalar, s: &Matrix, k: usize, j: u32, i: u32) -> Vec<Scalar> {
    let r = oracle_twist(q, &FormWord::power(j), &FormWord::power(i));
    oracle_tau_row(s, k, i).into_iter().map(|c| &c * &r).collect()
}

/// Adds `c x^2 ⊗ y` to `R(y ⊗ x)`.
pub struct Corrupted(pub QTwist);

impl TwistingMap for Corrupted {
    fn twist_words(&self, b: &FormWord, a: &FormWord) -> TwistTerms {
        let mut out = self.0.twist_words(b, a);
        if *b == FormWord::power(1) && *a == FormWord::power(1) {
            out.push((FormWord::power(2), FormWord::power(1), Scalar::one()));
        }
        out
    }
}

/// The classical product connection at `q = 1`, `S = I` on a degree-0
/// element given in naive form.
///
/// `e_terms` holds `(l, a, b)` for `e_l a ⊗ b`; `f_terms` holds `(a, k, b)`
/// for `a ⊗ f_k b`.
pub fn classical_nabla(
    ce: &ModuleConnection,
    cf: &ModuleConnection,
    e_terms: &[(usize, FormElement, FormElement)],
    f_terms: &[(FormElement, usize, FormElement)],
) -> ProductElement {
    let (m, n) = (ce.rank(), cf.rank());
    let mut e = Slots::zero(m);
    for (l, a, b) in e_terms {
        // (e_p ⊗ b) ⊗ (ω_p ⊗ 1), ω = ∇^E(e_l a)
        for p in 0..m {
            let mut om = ce.alpha(p, *l).multiply(a).unwrap();
            if p == *l {
                om = om.add(&a.differential()).unwrap();
            }
            e.slot_mut(p).add_assign(&TdgaElement::tensor(&om, b));
        }
        // (e_l a ⊗ 1) ⊗ (1 ⊗ db)
        e.slot_mut(*l).add_assign(&TdgaElement::tensor(a, &b.differential()));
    }
    let mut f = Slots::zero(n);
    for (a, k, b) in f_terms {
        // (a ⊗ f_p) ⊗ (1 ⊗ η_p), η = ∇^F(f_k b)
        for p in 0..n {
            let mut eta = cf.alpha(p, *k).multiply(b).unwrap();
            if p == *k {
                eta = eta.add(&b.differential()).unwrap();
            }
            f.slot_mut(p).add_assign(&TdgaElement::tensor(a, &eta));
        }
        // (1 ⊗ f_k b) ⊗ (da ⊗ 1)
        f.slot_mut(*k).add_assign(&TdgaElement::tensor(&a.differential(), b));
    }
    ProductElement { e, f }
}

pub fn q(num: i64, den: i64) -> QTwist {
    QTwist::new(Scalar::new(num, den)).unwrap()
}

/// Caps used by the integration suites when the defaults are too slow.
pub fn small() -> Caps {
    Caps::new(3, 2)
}
