//! Exhaustive checkers for the twisting-map and module-twisting axioms.

use crate::basis::Caps;
use crate::omega::{FormWord, Generator};
use crate::report::{CheckResult, Tally};
use crate::scalar::Scalar;
use crate::tdga::{Slots, TdgaElement};

use super::{twist_tensor, InverseTwist, LeftModuleTwist, ReverseTensor, RightModuleTwist, TwistingMap};

fn twist_pair(map: &dyn TwistingMap, b: &FormWord, a: &FormWord) -> TdgaElement {
    let mut out = TdgaElement::zero();
    for (a2, b2, c) in map.twist_words(b, a) {
        out.add_term(a2, b2, c);
    }
    out
}

fn rx(w: &FormWord) -> String {
    w.render(Generator::X)
}

fn ry(w: &FormWord) -> String {
    w.render(Generator::Y)
}

fn px(e: u32) -> String {
    rx(&FormWord::power(e))
}

fn py(e: u32) -> String {
    ry(&FormWord::power(e))
}

/// Verifies unitality and multiplicativity of a twisting map on all capped
/// basis tuples. Multiplicativity in each argument (the composite form and
/// its Sweedler form are the same identity) is checked through every
/// factorization of a capped word.
pub fn check_twisting_axioms(map: &dyn TwistingMap, caps: Caps) -> CheckResult {
    let mut tally = Tally::new("twisting-axioms", &["tw1", "tw2", "tw3", "tw4", "tw5"]);
    let unit = FormWord::unit();
    for w in caps.words() {
        tally.compare(
            "tw1",
            || format!("{} ⊗ 1", ry(&w)),
            &twist_pair(map, &w, &unit),
            &TdgaElement::pair(unit.clone(), w.clone()),
        );
        tally.compare(
            "tw1",
            || format!("1 ⊗ {}", rx(&w)),
            &twist_pair(map, &unit, &w),
            &TdgaElement::pair(w.clone(), unit.clone()),
        );
    }
    for (b, w) in caps.pairs() {
        let lhs = twist_pair(map, &b, &w);
        for (a, a2) in w.splits() {
            let mut rhs = TdgaElement::zero();
            for (ar, br, c) in map.twist_words(&b, &a) {
                for (a2r, brr, d) in map.twist_words(&br, &a2) {
                    rhs.add_term(ar.concat(&a2r), brr, &c * &d);
                }
            }
            let ok = tally.compare(
                "tw4",
                || format!("{} ⊗ ({})({})", ry(&b), rx(&a), rx(&a2)),
                &lhs,
                &rhs,
            );
            if !ok {
                break;
            }
        }
    }
    for (w, a) in caps.pairs() {
        let lhs = twist_pair(map, &w, &a);
        for (b, b2) in w.splits() {
            let mut rhs = TdgaElement::zero();
            for (ar, b2r, c) in map.twist_words(&b2, &a) {
                for (arr, br, d) in map.twist_words(&b, &ar) {
                    rhs.add_term(arr, br.concat(&b2r), &c * &d);
                }
            }
            let ok = tally.compare(
                "tw5",
                || format!("({})({}) ⊗ {}", ry(&b), ry(&b2), rx(&a)),
                &lhs,
                &rhs,
            );
            if !ok {
                break;
            }
        }
    }
    tally.finish()
}

/// `(ε ⊗ d)` applied to a tensor: sign on the left word, `d` on the right.
fn grade_then_d_right(t: &TdgaElement) -> TdgaElement {
    let mut out = TdgaElement::zero();
    for ((a, b), c) in t.terms() {
        let c = if a.degree() % 2 == 1 { -c } else { c.clone() };
        for (db, negative) in b.differential() {
            out.add_term(a.clone(), db, if negative { -&c } else { c.clone() });
        }
    }
    out
}

/// `(d ⊗ ε)` applied to a tensor.
fn d_left_then_grade(t: &TdgaElement) -> TdgaElement {
    let mut out = TdgaElement::zero();
    for ((a, b), c) in t.terms() {
        let c = if b.degree() % 2 == 1 { -c } else { c.clone() };
        for (da, negative) in a.differential() {
            out.add_term(da, b.clone(), if negative { -&c } else { c.clone() });
        }
    }
    out
}

/// Verifies that the lifted map intertwines the differentials:
/// `R̃(d ⊗ 1) = (ε ⊗ d)R̃` and `R̃(1 ⊗ d) = (d ⊗ ε)R̃`.
pub fn check_lift_compat(map: &dyn TwistingMap, caps: Caps) -> CheckResult {
    let mut tally = Tally::new("lift-compat", &["twisteddiff1", "twisteddiff2"]);
    for (b, a) in caps.lower_degree(1).pairs() {
        let base = twist_pair(map, &b, &a);
        let mut db = ReverseTensor::zero();
        for (w, negative) in b.differential() {
            db.add_term(w, a.clone(), Scalar::sign(negative as usize));
        }
        tally.compare(
            "twisteddiff1",
            || format!("d({}) ⊗ {}", ry(&b), rx(&a)),
            &twist_tensor(map, &db),
            &grade_then_d_right(&base),
        );
        let mut da = ReverseTensor::zero();
        for (w, negative) in a.differential() {
            da.add_term(b.clone(), w, Scalar::sign(negative as usize));
        }
        tally.compare(
            "twisteddiff2",
            || format!("{} ⊗ d({})", ry(&b), rx(&a)),
            &twist_tensor(map, &da),
            &d_left_then_grade(&base),
        );
    }
    tally.finish()
}

/// Iterates the degree-0 terms of a slot vector as `(slot, x-exponent, y-exponent, coeff)`.
fn slot_terms(s: &Slots) -> Vec<(usize, u32, u32, Scalar)> {
    let mut out = Vec::new();
    for (l, e) in s.0.iter().enumerate() {
        for ((a, b), c) in e.terms() {
            out.push((l, a.first_exponent(), b.first_exponent(), c.clone()));
        }
    }
    out
}

fn add_powers(s: &mut Slots, l: usize, i: u32, j: u32, c: Scalar) {
    s.slot_mut(l)
        .add_term(FormWord::power(i), FormWord::power(j), c);
}

fn r_terms(map: &dyn TwistingMap, j: u32, i: u32) -> Vec<(u32, u32, Scalar)> {
    map.twist_words(&FormWord::power(j), &FormWord::power(i))
        .into_iter()
        .map(|(a, b, c)| (a.first_exponent(), b.first_exponent(), c))
        .collect()
}

fn s_terms(map: &dyn InverseTwist, i: u32, j: u32) -> Vec<(u32, u32, Scalar)> {
    map.untwist_words(&FormWord::power(i), &FormWord::power(j))
        .into_iter()
        .map(|(b, a, c)| (b.first_exponent(), a.first_exponent(), c))
        .collect()
}

/// Verifies unitality and both compatibility conditions of a right module
/// twisting map `F ⊗ A → A ⊗ F` with the algebra twisting map.
pub fn check_right_module_twist(
    ts: &dyn RightModuleTwist,
    map: &dyn TwistingMap,
    caps: Caps,
) -> CheckResult {
    let n = ts.rank();
    let mut tally = Tally::new(
        "right-module-twist",
        &["tau-unital", "rightmoduletwist1", "rightmoduletwist2"],
    );
    let e = caps.max_exponent;
    for k in 0..n {
        for j in 0..=e {
            tally.compare(
                "tau-unital",
                || format!("f{} {} ⊗ 1", k + 1, py(j)),
                &ts.tau(k, j, 0),
                &Slots::unit(n, k, TdgaElement::powers(0, j)),
            );
        }
        for j in 0..=e {
            for i in 0..=e {
                for i2 in 0..=e {
                    let lhs = ts.tau(k, j, i + i2);
                    let mut rhs = Slots::zero(n);
                    for (l, a, b, c) in slot_terms(&ts.tau(k, j, i)) {
                        for (r, a2, b2, d) in slot_terms(&ts.tau(l, b, i2)) {
                            add_powers(&mut rhs, r, a + a2, b2, &c * &d);
                        }
                    }
                    tally.compare(
                        "rightmoduletwist1",
                        || format!("f{} {} ⊗ {} ⊗ {}", k + 1, py(j), px(i), px(i2)),
                        &lhs,
                        &rhs,
                    );
                }
                for b in 0..=e {
                    let lhs = ts.tau(k, j + b, i);
                    let mut rhs = Slots::zero(n);
                    for (a2, b2, c) in r_terms(map, b, i) {
                        for (l, a3, b3, d) in slot_terms(&ts.tau(k, j, a2)) {
                            add_powers(&mut rhs, l, a3, b3 + b2, &c * &d);
                        }
                    }
                    tally.compare(
                        "rightmoduletwist2",
                        || format!("f{} {} ⊗ {} ⊗ {}", k + 1, py(j), py(b), px(i)),
                        &lhs,
                        &rhs,
                    );
                }
            }
        }
    }
    tally.finish()
}

/// Verifies unitality and both compatibility conditions of a left module
/// twisting map `B ⊗ E → E ⊗ B`, with `A` acting on `E` symmetrically.
pub fn check_left_module_twist(
    lts: &dyn LeftModuleTwist,
    map: &dyn TwistingMap,
    caps: Caps,
) -> CheckResult {
    let m = lts.rank();
    let mut tally = Tally::new(
        "left-module-twist",
        &[
            "left-tau-unital",
            "moduletwistcondition1",
            "moduletwistcondition2",
        ],
    );
    let e = caps.max_exponent;
    for k in 0..m {
        for i in 0..=e {
            tally.compare(
                "left-tau-unital",
                || format!("1 ⊗ e{} {}", k + 1, px(i)),
                &lts.left_tau(0, k, i),
                &Slots::unit(m, k, TdgaElement::powers(i, 0)),
            );
        }
        for i in 0..=e {
            for b in 0..=e {
                for b2 in 0..=e {
                    let lhs = lts.left_tau(b + b2, k, i);
                    let mut rhs = Slots::zero(m);
                    for (l, a, c2, c) in slot_terms(&lts.left_tau(b2, k, i)) {
                        for (r, a2, c3, d) in slot_terms(&lts.left_tau(b, l, a)) {
                            add_powers(&mut rhs, r, a2, c3 + c2, &c * &d);
                        }
                    }
                    tally.compare(
                        "moduletwistcondition1",
                        || format!("{} ⊗ {} ⊗ e{} {}", py(b), py(b2), k + 1, px(i)),
                        &lhs,
                        &rhs,
                    );
                }
                for a in 0..=e {
                    let lhs = lts.left_tau(b, k, a + i);
                    let mut rhs = Slots::zero(m);
                    for (a2, b2, c) in r_terms(map, b, a) {
                        for (l, i2, c2, d) in slot_terms(&lts.left_tau(b2, k, i)) {
                            add_powers(&mut rhs, l, a2 + i2, c2, &c * &d);
                        }
                    }
                    tally.compare(
                        "moduletwistcondition2",
                        || format!("{} ⊗ {} ⊗ e{} {}", py(b), px(a), k + 1, px(i)),
                        &lhs,
                        &rhs,
                    );
                }
            }
        }
    }
    tally.finish()
}

/// Verifies that `σ` inverts `τ` and the consequences of the module twisting
/// conditions relating `τ`, `σ`, `R` and `S` on capped degree-0 inputs.
pub fn check_derived_conditions(
    ts: &dyn RightModuleTwist,
    r: &dyn TwistingMap,
    s: &dyn InverseTwist,
    caps: Caps,
) -> CheckResult {
    let n = ts.rank();
    let mut tally = Tally::new(
        "derived-conditions",
        &[
            "tau-sigma-inverse",
            "nabla2cond2",
            "nabla2cond3",
            "nabla2cond4",
            "nabla2cond5",
        ],
    );
    let e = caps.max_exponent;
    for k in 0..n {
        for j in 0..=e {
            for i in 0..=e {
                let ident = Slots::unit(n, k, TdgaElement::powers(i, j));
                let mut st = Slots::zero(n);
                for (l, a, b, c) in slot_terms(&ts.tau(k, j, i)) {
                    st.add_scaled(&ts.sigma(a, l, b), &c);
                }
                tally.compare(
                    "tau-sigma-inverse",
                    || format!("σ∘τ on f{} {} ⊗ {}", k + 1, py(j), px(i)),
                    &st,
                    &ident,
                );
                let mut ts_ = Slots::zero(n);
                for (l, a, b, c) in slot_terms(&ts.sigma(i, k, j)) {
                    ts_.add_scaled(&ts.tau(l, b, a), &c);
                }
                tally.compare(
                    "tau-sigma-inverse",
                    || format!("τ∘σ on {} ⊗ f{} {}", px(i), k + 1, py(j)),
                    &ts_,
                    &ident,
                );
                for a in 0..=e {
                    // x^a ⊗ f_k y^j ⊗ x^i
                    let mut lhs = Slots::zero(n);
                    for (l, a2, b2, c) in slot_terms(&ts.tau(k, j, i)) {
                        add_powers(&mut lhs, l, a + a2, b2, c);
                    }
                    let mut rhs = Slots::zero(n);
                    for (l, a2, b2, c) in slot_terms(&ts.sigma(a, k, j)) {
                        rhs.add_scaled(&ts.tau(l, b2, a2 + i), &c);
                    }
                    tally.compare(
                        "nabla2cond2",
                        || format!("{} ⊗ f{} {} ⊗ {}", px(a), k + 1, py(j), px(i)),
                        &lhs,
                        &rhs,
                    );
                    // x^a ⊗ x^i ⊗ f_k y^j
                    let lhs = ts.sigma(a + i, k, j);
                    let mut rhs = Slots::zero(n);
                    for (l, i2, b2, c) in slot_terms(&ts.sigma(i, k, j)) {
                        for (r2, a2, b3, d) in slot_terms(&ts.sigma(a, l, b2)) {
                            add_powers(&mut rhs, r2, a2 + i2, b3, &c * &d);
                        }
                    }
                    tally.compare(
                        "nabla2cond4",
                        || format!("{} ⊗ {} ⊗ f{} {}", px(a), px(i), k + 1, py(j)),
                        &lhs,
                        &rhs,
                    );
                }
                for b in 0..=e {
                    // f_k y^j ⊗ x^i ⊗ y^b
                    let mut lhs = Slots::zero(n);
                    for (l, a2, c2, c) in slot_terms(&ts.tau(k, j, i)) {
                        lhs.add_scaled(&ts.sigma(a2, l, c2 + b), &c);
                    }
                    let mut rhs = Slots::zero(n);
                    for (b2, a2, c) in s_terms(s, i, b) {
                        add_powers(&mut rhs, k, a2, j + b2, c);
                    }
                    tally.compare(
                        "nabla2cond3",
                        || format!("f{} {} ⊗ {} ⊗ {}", k + 1, py(j), px(i), py(b)),
                        &lhs,
                        &rhs,
                    );
                    // y^b ⊗ x^i ⊗ f_k y^j
                    let mut lhs = Slots::zero(n);
                    for (a2, b2, c) in r_terms(r, b, i) {
                        lhs.add_scaled(&ts.sigma(a2, k, b2 + j), &c);
                    }
                    let mut rhs = Slots::zero(n);
                    for (l, a2, c2, c) in slot_terms(&ts.sigma(i, k, j)) {
                        add_powers(&mut rhs, l, a2, b + c2, c);
                    }
                    tally.compare(
                        "nabla2cond5",
                        || format!("{} ⊗ {} ⊗ f{} {}", py(b), px(i), k + 1, py(j)),
                        &lhs,
                        &rhs,
                    );
                }
            }
        }
    }
    tally.finish()
}
