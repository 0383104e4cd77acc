//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{classical_nabla, Corrupted};
use twistconn::basis::Caps;
use twistconn::connections::ModuleConnection;
use twistconn::harness::run_checks;
use twistconn::omega::{FormElement, Generator};
use twistconn::product::{ProductConnection, ProductElement};
use twistconn::report::{CheckResult, Report};
use twistconn::scalar::Scalar;
use twistconn::scenario::{load_scenario, Scenario};
use twistconn::tdga::{Slots, TdgaElement};
use twistconn::twist::{check_lift_compat, check_twisting_axioms, QTwist, TauSpec};

/// Exponent and degree caps for every exhaustive check below.
const CAPS: Caps = Caps {
    max_exponent: 4,
    max_degree: 3,
};
/// Wall-clock budget for the twisting axioms at one value of `q`.
const AXIOM_BUDGET: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn scenario(text: &str) -> Scenario {
    let mut s = load_scenario(text).expect("acceptance scenario is valid");
    s.caps = CAPS;
    s
}

fn run(s: &Scenario, ids: &[&str]) -> Report {
    let ids: Vec<String> = ids.iter().map(|s| s.to_string()).collect();
    run_checks(s, &ids).expect("known checks")
}

fn expect_pass<'a>(report: &'a Report, id: &str) -> Result<&'a CheckResult, String> {
    let c = report.check(id).ok_or_else(|| format!("{id} missing"))?;
    if c.passed() {
        Ok(c)
    } else {
        Err(c.to_string())
    }
}

fn fx(s: &str) -> FormElement {
    FormElement::parse(Generator::X, s).unwrap()
}

fn fy(s: &str) -> FormElement {
    FormElement::parse(Generator::Y, s).unwrap()
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    for (n, d) in [(1, 1), (2, 1), (-1, 1), (3, 2)] {
        let qt = QTwist::new(Scalar::new(n, d)).unwrap();
        let start = Instant::now();
        let ax = check_twisting_axioms(&qt, CAPS);
        let lc = check_lift_compat(&qt, CAPS);
        let t = start.elapsed();
        if !ax.passed() || !lc.passed() {
            return Err(format!("q = {}: {ax}; {lc}", qt.q()));
        }
        if t > AXIOM_BUDGET {
            return Err(format!("q = {} took {t:.2?}", qt.q()));
        }
        notes.push(format!("q={} {:.2?}", qt.q(), t));
    }
    Ok(notes.join(", "))
}

fn criterion_2() -> Outcome {
    let mut cases = 0;
    for q in ["1", "2", "-1", "3/2"] {
        let s = scenario(&format!("q = \"{q}\"\nseed = 11\n"));
        let r = run(&s, &["dga-laws", "random-supplements"]);
        cases += expect_pass(&r, "dga-laws")?.cases;
        expect_pass(&r, "random-supplements")?;
    }
    Ok(format!("{cases} cases over four q"))
}

fn criterion_3() -> Outcome {
    let configs = [
        "q = \"2\"\nn = 2\n",
        "q = \"2\"\nn = 2\nS_matrix = [[\"1\", \"1\"], [\"0\", \"1\"]]\n",
        "q = \"2\"\nn = 2\n[potentials]\nE = [\"(1,1): x dx\"]\n",
        "q = \"-1\"\n[potentials]\nE = [\"(1,1): x dx\"]\nF = [\"(1,1): y dy\"]\n",
    ];
    let mut cases = 0;
    for text in configs {
        let r = run(&scenario(text), &["product-leibniz"]);
        expect_pass(&r, "nabla2cond1")?;
        cases += expect_pass(&r, "product-leibniz")?.cases;
    }
    Ok(format!("{} scenarios, {cases} cases", configs.len()))
}

fn criterion_4() -> Outcome {
    let configs = [
        "q = \"2\"\nm = 1\nn = 2\nS_matrix = [[\"1\", \"1\"], [\"0\", \"1\"]]\n[potentials]\nE = [\"(1,1): x dx\"]\n",
        "q = \"3/2\"\nm = 2\nn = 1\n[potentials]\nE = [\"(1,2): dx\", \"(2,1): x dx x\"]\n",
        "q = \"-1\"\n[potentials]\nE = [\"(1,1): x dx\"]\nF = [\"(1,1): y dy\"]\n",
    ];
    for text in configs {
        expect_pass(&run(&scenario(text), &["curvature-theorem"]), "curvature-theorem")?;
    }
    let qt = QTwist::new(Scalar::from_int(2)).unwrap();
    let ce = ModuleConnection::new(Generator::X, vec![vec![fx("x dx")]]).unwrap();
    let theta = ce.curvature_matrix()[0][0].clone();
    let want = fx("dx dx + x dx x dx");
    if theta != want {
        return Err(format!("θ^E = {theta}"));
    }
    let pc = ProductConnection::new(
        qt.clone(),
        TauSpec::canonical(&qt, 1),
        ce,
        ModuleConnection::grassmann(Generator::Y, 1),
    )
    .unwrap();
    let pe = ProductElement::e_unit(1, 1, 0, TdgaElement::powers(0, 1));
    let got = pc.product_curvature(&pe);
    let expected = Slots(vec![TdgaElement::tensor(&want, &fy("y"))]);
    if got.e != expected || !got.f.is_zero() {
        return Err(format!("curvature of e1 ⊗ y = {got}"));
    }
    Ok(format!("{} scenarios; e1 ⊗ y ↦ {}", configs.len(), got.e))
}

fn criterion_5() -> Outcome {
    let s = scenario(
        "q = \"2\"\nn = 2\nS_matrix = [[\"1\", \"0\"], [\"0\", \"1\"]]\n\
         [potentials]\nE = [\"(1,1): x dx\"]\n\
         [independence]\nS_matrix = [[\"1\", \"1\"], [\"0\", \"1\"]]\n",
    );
    let r = run(&s, &["independence"]);
    let c = expect_pass(&r, "independence")?;
    Ok(format!("{} table entries agree", c.cases))
}

fn criterion_6() -> Outcome {
    let mut cases = 0;
    for q in ["1", "2", "-1"] {
        for (m, n) in [(1, 1), (2, 2)] {
            let s = scenario(&format!("q = \"{q}\"\nm = {m}\nn = {n}\n"));
            cases += expect_pass(&run(&s, &["flatness"]), "flatness")?.cases;
        }
    }
    Ok(format!("{cases} basis elements flat"))
}

fn criterion_7() -> Outcome {
    let s = scenario("q = \"2\"\nn = 2\n");
    let r = run(&s, &["quantum-plane-report"]);
    let c = expect_pass(&r, "quantum-plane-report")?;
    let want = [
        ("sigma-term", "1 ⊗ (q^{-1} y, q^{-2} y^2) ⊗ dx ⊗ 1"),
        ("remark", "1 ⊗ λ_{q^{-1}}(y) ⊗ dx ⊗ 1 + 1 ⊗ λ_{q^{-1}}(y^2) ⊗ dx ⊗ 1"),
        ("remark.evaluated", "1 ⊗ (1/2 y, 1/4 y^2) ⊗ dx ⊗ 1"),
        ("nabla2cond1", "pass"),
    ];
    for (key, value) in want {
        match c.payload.get(key) {
            Some(v) if v == value => {}
            other => return Err(format!("{key} = {other:?}")),
        }
    }
    let s = scenario("q = \"2\"\nn = 2\n[potentials]\nE = [\"(1,1): x dx\"]\n");
    let r = run(&s, &["quantum-plane-report"]);
    let c = expect_pass(&r, "quantum-plane-report")?;
    let decomposition = c.payload.get("decomposition").ok_or("no decomposition")?;
    if decomposition != "∇ = ∇^{gr} + e1 ⊗ 1 ⊗ x dx ⊗ y" || c.payload.get("nabla2cond1").map(String::as_str) != Some("pass") {
        return Err(format!("decomposition = {decomposition}"));
    }
    let s = scenario("q = \"2\"\n[potentials]\nF = [\"(1,1): dy\"]\n");
    let r = run(&s, &["quantum-plane-report"]);
    let c = r.check("quantum-plane-report").ok_or("report missing")?;
    if c.payload.get("nabla2cond1").map(String::as_str) != Some("fail") || !c.payload.contains_key("nabla2cond1.witness") {
        return Err(format!("dy report carries no failing verdict: {c}"));
    }
    Ok("displayed terms, remark and decomposition reproduced".into())
}

fn criterion_8() -> Outcome {
    let qt = QTwist::flip();
    let zero_x = FormElement::zero(Generator::X);
    let ce = ModuleConnection::new(Generator::X, vec![vec![fx("x dx"), fx("dx")], vec![zero_x, fx("dx x")]]).unwrap();
    let cf = ModuleConnection::new(Generator::Y, vec![vec![fy("dy"), fy("y dy")], vec![fy("-dy y"), fy("dy")]]).unwrap();
    let pc = ProductConnection::new(qt.clone(), TauSpec::canonical(&qt, 2), ce.clone(), cf.clone()).unwrap();
    let mut cases = 0;
    for l in 0..2 {
        for i in CAPS.exponents() {
            for j in CAPS.exponents() {
                let (a, b) = (FormElement::power(Generator::X, i), FormElement::power(Generator::Y, j));
                let pe = ProductElement::e_unit(2, 2, l, TdgaElement::powers(i, j));
                let want = classical_nabla(&ce, &cf, &[(l, a.clone(), b.clone())], &[]);
                if pc.product_nabla(&pe) != want {
                    return Err(format!("e{} x^{i} ⊗ y^{j}", l + 1));
                }
                let pe = ProductElement {
                    e: Slots::zero(2),
                    f: pc.naive_f(i, l, j),
                };
                let want = classical_nabla(&ce, &cf, &[], &[(a, l, b)]);
                if pc.product_nabla(&pe) != want {
                    return Err(format!("x^{i} ⊗ f{} y^{j}", l + 1));
                }
                cases += 2;
            }
        }
    }
    Ok(format!("{cases} naive basis elements"))
}

fn criterion_9() -> Outcome {
    let classical = scenario(
        "q = \"1\"\nm = 2\nn = 1\n\
         [potentials]\nE = [\"(1,1): x dx\", \"(2,1): dx\"]\nF = [\"(1,1): dy\"]\n\
         [bimodule]\nphi = \"induced\"\npsi = \"induced\"\n",
    );
    let ids = [
        "bimodule-connection-e",
        "bimodule-connection-f",
        "nabla1cond1",
        "xi11",
        "xi22",
        "xi12-morphism",
        "xi21-morphism",
        "bimodule-axiom",
        "bimodule-theorem",
    ];
    let r = run(&classical, &ids);
    for id in ids {
        expect_pass(&r, id)?;
    }
    let consistent = |r: &Report, part: &str, side: &str| -> Result<(), String> {
        let c = r.check(part).ok_or_else(|| format!("{part} missing"))?;
        let eq = c.payload.get(&format!("{part}.equivalence")).map(String::as_str);
        let comp = c.payload.get(&format!("{part}.compatibility")).map(String::as_str);
        let morph = c.payload.get(&format!("{part}.morphism")).map(String::as_str);
        if eq == Some("consistent") && comp == Some(side) && morph == Some(side) {
            Ok(())
        } else {
            Err(format!("{part}: {comp:?} vs {morph:?}"))
        }
    };
    let good = scenario("q = \"2\"\nn = 2\n[bimodule]\nphi = \"flip\"\npsi = \"flip\"\n");
    let r = run(&good, &["xi11", "xi22"]);
    consistent(&r, "xi11", "pass")?;
    consistent(&r, "xi22", "pass")?;
    let broken = scenario("q = \"2\"\n[potentials]\nE = [\"(1,1): x dx\"]\n[bimodule]\nphi = \"induced\"\n");
    let r = run(&broken, &["xi11"]);
    consistent(&r, "xi11", "fail")?;
    Ok("q = 1 suite passes; biconditionals hold on q = 2 flip and broken x dx".into())
}

fn criterion_10() -> Outcome {
    let ax = check_twisting_axioms(&Corrupted(common::q(2, 1)), CAPS);
    if !ax.violates("tw5") {
        return Err(format!("corrupted map: {ax}"));
    }
    let s = scenario("q = \"2\"\n[potentials]\nF = [\"(1,1): dy\"]\n");
    let r = run(&s, &["nabla2cond1"]);
    let c = r.check("nabla2cond1").ok_or("nabla2cond1 missing")?;
    let Some(w) = c.verdict.witness() else {
        return Err(format!("dy potential: {c}"));
    };
    let err = match load_scenario("n = 2\nS_matrix = [[\"1\", \"2\"], [\"2\", \"4\"]]\n") {
        Ok(_) => return Err("singular S accepted".into()),
        Err(e) => e.to_string(),
    };
    if !err.contains("S_matrix not invertible") {
        return Err(err);
    }
    Ok(format!("tw5 broken; witness on {}; {err}", w.input))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("twisting axioms", criterion_1),
        ("dga laws", criterion_2),
        ("connection property", criterion_3),
        ("curvature formula", criterion_4),
        ("independence of τ", criterion_5),
        ("flatness", criterion_6),
        ("quantum plane report", criterion_7),
        ("classical specialization", criterion_8),
        ("bimodule suite", criterion_9),
        ("negative controls", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("pass", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} [{tag}] {name}: {detail} ({:.2?})", k + 1, start.elapsed());
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
