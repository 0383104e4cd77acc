mod common;

use proptest::prelude::*;

use common::classical_nabla;
use twistconn::connections::ModuleConnection;
use twistconn::harness::{default_checks, run_checks, Command};
use twistconn::omega::{FormElement, Generator};
use twistconn::product::ProductConnection;
use twistconn::scalar::Scalar;
use twistconn::scenario::load_scenario;
use twistconn::tdga::{Slots, TdgaElement};
use twistconn::twist::{QTwist, TauSpec};

fn fx(s: &str) -> FormElement {
    FormElement::parse(Generator::X, s).unwrap()
}

fn fy(s: &str) -> FormElement {
    FormElement::parse(Generator::Y, s).unwrap()
}

fn connections() -> (ModuleConnection, ModuleConnection) {
    let ce = ModuleConnection::new(
        Generator::X,
        vec![vec![fx("x dx"), fx("dx")], vec![FormElement::zero(Generator::X), fx("2 dx x^2")]],
    )
    .unwrap();
    let cf = ModuleConnection::new(
        Generator::Y,
        vec![vec![fy("dy"), fy("y dy - dy y")], vec![fy("-dy"), FormElement::zero(Generator::Y)]],
    )
    .unwrap();
    (ce, cf)
}

fn power(gen: Generator, i: u32, c: Scalar) -> FormElement {
    FormElement::power(gen, i).scale(&c)
}

fn coefficient() -> impl Strategy<Value = Scalar> {
    (-3i64..=3, 1i64..=2).prop_map(|(n, d)| Scalar::new(n, d))
}

type Terms = (Vec<(usize, u32, u32, Scalar)>, Vec<(u32, usize, u32, Scalar)>);

fn naive_terms() -> impl Strategy<Value = Terms> {
    (
        prop::collection::vec((0usize..2, 0u32..=3, 0u32..=3, coefficient()), 0..=3),
        prop::collection::vec((0u32..=3, 0usize..2, 0u32..=3, coefficient()), 0..=3),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_connection_matches_classical_formula((e_terms, f_terms) in naive_terms()) {
        let (ce, cf) = connections();
        let qt = QTwist::flip();
        let ts = TauSpec::canonical(&qt, 2);
        let pc = ProductConnection::new(qt, ts, ce.clone(), cf.clone()).unwrap();

        let mut e = Slots::zero(2);
        let mut oracle_e = Vec::new();
        for (l, i, j, c) in &e_terms {
            e.slot_mut(*l).add_term(
                twistconn::omega::FormWord::power(*i),
                twistconn::omega::FormWord::power(*j),
                c.clone(),
            );
            oracle_e.push((*l, power(Generator::X, *i, c.clone()), FormElement::power(Generator::Y, *j)));
        }
        let f_naive: Vec<_> = f_terms.iter().map(|(i, l, j, c)| (*i, *l, *j, c.clone())).collect();
        let f = pc.naive_to_free_f(&f_naive);
        let oracle_f: Vec<_> = f_terms
            .iter()
            .map(|(i, l, j, c)| (power(Generator::X, *i, c.clone()), *l, FormElement::power(Generator::Y, *j)))
            .collect();

        let pe = twistconn::product::ProductElement { e, f };
        let got = pc.product_nabla(&pe);
        let want = classical_nabla(&ce, &cf, &oracle_e, &oracle_f);
        prop_assert_eq!(got, want);
    }
}

#[test]
fn classical_scenario_passes_everything() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/classical.toml")).unwrap();
    let mut s = load_scenario(&text).unwrap();
    s.caps = common::small();
    let report = run_checks(&s, &default_checks(Command::Run, &s)).unwrap();
    for c in &report.checks {
        assert!(c.passed(), "{c}");
    }
    for id in ["xi11", "xi22", "xi12-morphism", "xi21-morphism", "bimodule-theorem", "curvature-theorem"] {
        assert!(report.check(id).is_some(), "missing {id}");
    }
}

#[test]
fn classical_second_term_is_plain_differential() {
    let (ce, cf) = connections();
    let qt = QTwist::flip();
    let pc = ProductConnection::new(qt.clone(), TauSpec::canonical(&qt, 2), ce, cf).unwrap();
    let pe = twistconn::product::ProductElement {
        e: Slots::zero(2),
        f: pc.naive_to_free_f(&[(2, 0, 0, Scalar::one())]),
    };
    let got = pc.product_nabla(&pe);
    // x^2 ⊗ f1: d(x^2) ⊗ f1 + x^2 ⊗ (f1 ⊗ dy - f2 ⊗ dy)
    let mut want = Slots::zero(2);
    want.slot_mut(0).add_assign(&TdgaElement::tensor(&fx("dx x + x dx"), &FormElement::one(Generator::Y)));
    want.slot_mut(0).add_assign(&TdgaElement::tensor(&fx("x^2"), &fy("dy")));
    want.slot_mut(1).add_assign(&TdgaElement::tensor(&fx("x^2"), &fy("-dy")));
    assert_eq!(got.f, want);
    assert!(got.e.is_zero());
}
