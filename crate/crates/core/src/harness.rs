//! Runs checkers for a scenario in dependency order and assembles the report.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::Caps;
use crate::bimodule::{
    check_bimodule_axiom, check_bimodule_connection, check_bimodule_theorem, check_nabla1cond1,
    check_sigma_compatibility, check_xi_equivalence, BimoduleProduct, XiPart,
};
use crate::connections::{check_connection, render_matrix};
use crate::error::ScenarioError;
use crate::omega::FormWord;
use crate::product::{
    check_connection_property, curvature_table, flatness_check, independence_check,
    quantum_plane_report, theorem_check, ProductConnection, ProductElement, ReportInput,
};
use crate::report::{CheckResult, Report, Tally, Verdict};
use crate::scalar::Scalar;
use crate::scenario::Scenario;
use crate::tdga::{check_dga_laws, Slots, TdgaElement};
use crate::twist::{
    check_derived_conditions, check_left_module_twist, check_lift_compat,
    check_right_module_twist, check_twisting_axioms,
};

/// Every check identifier, in the order checks are run.
pub const CHECK_ORDER: &[&str] = &[
    "twisting-axioms",
    "lift-compat",
    "dga-laws",
    "right-module-twist",
    "left-module-twist",
    "derived-conditions",
    "connection-laws-e",
    "connection-laws-f",
    "nabla2cond1",
    "product-leibniz",
    "curvature-theorem",
    "flatness",
    "curvature-table",
    "independence",
    "quantum-plane-report",
    "bimodule-connection-e",
    "bimodule-connection-f",
    "nabla1cond1",
    "xi11",
    "xi22",
    "xi12-morphism",
    "xi21-morphism",
    "bimodule-axiom",
    "sigma-compatibility",
    "bimodule-theorem",
    "random-supplements",
];

/// CLI subcommands that select a group of checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckAxioms,
    CheckHypotheses,
    Curvature,
    Theorem,
    Report,
    CheckBimodule,
    Run,
}

impl Command {
    /// Parses a subcommand name such as `check-axioms`.
    pub fn from_name(name: &str) -> Option<Command> {
        Some(match name {
            "check-axioms" => Command::CheckAxioms,
            "check-hypotheses" => Command::CheckHypotheses,
            "curvature" => Command::Curvature,
            "theorem" => Command::Theorem,
            "report" => Command::Report,
            "check-bimodule" => Command::CheckBimodule,
            "run" => Command::Run,
            _ => return None,
        })
    }
}

fn deps(id: &str) -> &'static [&'static str] {
    match id {
        "product-leibniz" | "curvature-theorem" | "curvature-table" | "flatness" => {
            &["right-module-twist", "nabla2cond1"]
        }
        "quantum-plane-report" => &["nabla2cond1"],
        "random-supplements" => &["nabla2cond1"],
        "bimodule-theorem" => &[
            "left-module-twist",
            "right-module-twist",
            "derived-conditions",
            "bimodule-connection-e",
            "bimodule-connection-f",
            "nabla1cond1",
            "nabla2cond1",
            "xi11",
            "xi22",
        ],
        _ => &[],
    }
}

/// Checks selected by a subcommand for a scenario.
pub fn default_checks(cmd: Command, s: &Scenario) -> Vec<String> {
    let grassmann = s.conn_e().is_grassmann() && s.conn_f().is_grassmann();
    let mut ids: Vec<&str> = match cmd {
        Command::CheckAxioms => vec![
            "twisting-axioms",
            "lift-compat",
            "dga-laws",
            "right-module-twist",
            "left-module-twist",
            "derived-conditions",
        ],
        Command::CheckHypotheses => {
            let mut v = vec!["connection-laws-e", "connection-laws-f", "nabla2cond1"];
            if s.bimodule.is_some() {
                v.extend(["bimodule-connection-e", "bimodule-connection-f", "nabla1cond1", "xi11", "xi22"]);
            }
            v
        }
        Command::Curvature => vec!["curvature-table"],
        Command::Theorem => vec!["product-leibniz", "curvature-theorem"],
        Command::Report => vec!["quantum-plane-report"],
        Command::CheckBimodule => vec![
            "bimodule-connection-e",
            "bimodule-connection-f",
            "nabla1cond1",
            "xi11",
            "xi22",
            "xi12-morphism",
            "xi21-morphism",
            "bimodule-axiom",
            "bimodule-theorem",
        ],
        Command::Run => {
            if !s.checks.is_empty() {
                return s.checks.clone();
            }
            let mut v: Vec<&str> = CHECK_ORDER.to_vec();
            v.retain(|id| match *id {
                "flatness" => grassmann,
                "independence" => s.independence.is_some(),
                "sigma-compatibility" => s.left_connection().is_some(),
                _ => true,
            });
            v
        }
    };
    if matches!(cmd, Command::Curvature | Command::Theorem) && grassmann {
        ids.push("flatness");
    }
    if cmd == Command::Theorem && s.independence.is_some() {
        ids.push("independence");
    }
    if cmd == Command::CheckBimodule && s.left_connection().is_some() {
        ids.push("sigma-compatibility");
    }
    ids.into_iter().map(String::from).collect()
}

struct Context<'a> {
    s: &'a Scenario,
    caps: Caps,
    pc: ProductConnection,
    bp: Option<BimoduleProduct>,
    done: BTreeMap<String, CheckResult>,
}

impl Context<'_> {
    fn bimodule(&mut self) -> &BimoduleProduct {
        let s = self.s;
        self.bp.get_or_insert_with(|| s.bimodule_product())
    }

    fn failing_dep(&self, id: &str) -> Option<String> {
        deps(id).iter().find_map(|d| {
            let r = self.done.get(*d)?;
            (!r.passed()).then(|| format!("{d} is {}", r.verdict.label()))
        })
    }

    fn run(&mut self, id: &str) -> CheckResult {
        let s = self.s;
        let caps = self.caps;
        let qt = s.twist();
        match id {
            "twisting-axioms" => check_twisting_axioms(&qt, caps),
            "lift-compat" => check_lift_compat(&qt, caps),
            "dga-laws" => check_dga_laws(&qt, &s.q, caps),
            "right-module-twist" => check_right_module_twist(&s.tau(), &qt, caps),
            "left-module-twist" => check_left_module_twist(&s.left_tau(), &qt, caps),
            "derived-conditions" => check_derived_conditions(&s.tau(), &qt, &qt, caps),
            "connection-laws-e" => renamed(check_connection(&s.conn_e(), caps), id),
            "connection-laws-f" => renamed(check_connection(&s.conn_f(), caps), id),
            "nabla2cond1" => self.pc.record_hypothesis(caps),
            "product-leibniz" => check_connection_property(&self.pc, caps),
            "curvature-theorem" => match self.failing_dep(id) {
                Some(reason) => CheckResult::inadmissible(id, reason),
                None => theorem_check(&self.pc, caps),
            },
            "flatness" => flatness_check(&self.pc, caps),
            "curvature-table" => {
                let mut res = Tally::new(id, &["curvature"]).finish();
                for (label, table) in curvature_table(&self.pc, caps) {
                    res.cases += 1;
                    res.payload.insert(label, table.to_string());
                }
                if let Some(reason) = self.failing_dep(id) {
                    res.verdict = Verdict::NotGuaranteed { reason };
                }
                res
            }
            "independence" => match &s.independence {
                None => CheckResult::inadmissible(id, "no second S_matrix given"),
                Some(m2) => match crate::twist::TauSpec::new(&qt, m2.clone()) {
                    Ok(ts2) => independence_check(&qt, &s.conn_e(), &s.conn_f(), &s.tau(), &ts2, caps),
                    Err(e) => CheckResult::inadmissible(id, e.to_string()),
                },
            },
            "quantum-plane-report" => {
                let input = s.report.clone().unwrap_or_else(|| ReportInput::standard(s.m, s.n));
                quantum_plane_report(&self.pc, &input, caps)
            }
            "bimodule-connection-e" => check_bimodule_connection(self.bimodule().phi(), caps),
            "bimodule-connection-f" => check_bimodule_connection(self.bimodule().psi(), caps),
            "nabla1cond1" => {
                let bp = self.bimodule().clone();
                check_nabla1cond1(&qt, bp.left_tau(), bp.phi().connection(), caps)
            }
            "xi11" => check_xi_equivalence(self.bimodule(), XiPart::P11, caps),
            "xi22" => check_xi_equivalence(self.bimodule(), XiPart::P22, caps),
            "xi12-morphism" => self.bimodule().check_xi_linearity(XiPart::P12, caps),
            "xi21-morphism" => self.bimodule().check_xi_linearity(XiPart::P21, caps),
            "bimodule-axiom" => check_bimodule_axiom(self.bimodule(), caps),
            "sigma-compatibility" => match s.left_connection() {
                None => CheckResult::inadmissible(id, "no left connection given"),
                Some(left) => check_sigma_compatibility(&left, self.bimodule().phi(), caps),
            },
            "bimodule-theorem" => match self.failing_dep(id) {
                Some(reason) => CheckResult::inadmissible(id, reason),
                None => check_bimodule_theorem(self.bimodule(), caps),
            },
            "random-supplements" => {
                let guaranteed = self.failing_dep(id).is_none();
                random_supplements(s, &self.pc, caps, guaranteed)
            }
            _ => unreachable!("validated identifier"),
        }
    }
}

fn renamed(mut r: CheckResult, id: &str) -> CheckResult {
    r.id = id.to_string();
    r
}

/// Runs the requested checks plus their prerequisites, in dependency order.
pub fn run_checks(s: &Scenario, requested: &[String]) -> Result<Report, ScenarioError> {
    let mut wanted = BTreeSet::new();
    for id in requested {
        let Some(known) = CHECK_ORDER.iter().find(|k| **k == id.as_str()) else {
            return Err(ScenarioError::Field {
                field: "checks".into(),
                message: format!("unknown check `{id}`"),
            });
        };
        wanted.insert(*known);
        wanted.extend(deps(known).iter().copied());
    }
    let mut ctx = Context {
        s,
        caps: s.caps,
        pc: s.product(),
        bp: None,
        done: BTreeMap::new(),
    };
    let mut checks = Vec::new();
    for id in CHECK_ORDER.iter().filter(|id| wanted.contains(*id)) {
        let start = Instant::now();
        let mut res = ctx.run(id);
        res.elapsed = Some(start.elapsed());
        ctx.done.insert(id.to_string(), res.clone());
        checks.push(res);
    }
    let mut symbolic = BTreeMap::new();
    if wanted.iter().any(|id| matches!(*id, "curvature-table" | "curvature-theorem" | "product-leibniz")) {
        symbolic.insert("theta.E".into(), render_matrix(&s.conn_e().curvature_matrix()));
        symbolic.insert("theta.F".into(), render_matrix(&s.conn_f().curvature_matrix()));
    }
    Ok(Report {
        scenario: s.echo(),
        checks,
        symbolic,
    })
}

const RANDOM_SAMPLES: usize = 24;

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-5..=5);
    }
    Scalar::new(num, rng.gen_range(1..=4))
}

fn random_element(rng: &mut ChaCha8Rng, pool: &[(FormWord, FormWord)]) -> TdgaElement {
    let mut out = TdgaElement::zero();
    for _ in 0..3 {
        let (a, b) = pool.choose(rng).expect("nonempty pool");
        out.add_term(a.clone(), b.clone(), random_scalar(rng));
    }
    out
}

fn pool_of_degree(caps: Caps, d: usize) -> Vec<(FormWord, FormWord)> {
    caps.pairs()
        .into_iter()
        .filter(|(a, b)| a.degree() + b.degree() == d)
        .collect()
}

/// Seeded random rational combinations checked against the same laws.
pub fn random_supplements(s: &Scenario, pc: &ProductConnection, caps: Caps, guaranteed: bool) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let qt = s.twist();
    let mut tally = Tally::new(
        "random-supplements",
        &["random-associativity", "random-graded-leibniz", "random-connection-leibniz", "random-curvature-linearity"],
    );
    let pools: Vec<Vec<(FormWord, FormWord)>> = (0..=caps.max_degree).map(|d| pool_of_degree(caps, d)).collect();
    let third = caps.max_degree / 3;
    for _ in 0..RANDOM_SAMPLES {
        let [u, v, w] = [0, 1, 2].map(|_| {
            let d = rng.gen_range(0..=third);
            random_element(&mut rng, &pools[d])
        });
        let lhs = u.multiply(&qt, &v).multiply(&qt, &w);
        let rhs = u.multiply(&qt, &v.multiply(&qt, &w));
        tally.compare("random-associativity", || format!("({u}) ({v}) ({w})"), &lhs, &rhs);

        let half = caps.max_degree.saturating_sub(1) / 2;
        let du = rng.gen_range(0..=half);
        let u = random_element(&mut rng, &pools[du]);
        let dv = rng.gen_range(0..=half);
        let v = random_element(&mut rng, &pools[dv]);
        let lhs = u.multiply(&qt, &v).differential();
        let rhs = u
            .differential()
            .multiply(&qt, &v)
            .add(&u.multiply(&qt, &v.differential()).scale(&Scalar::sign(du)));
        tally.compare("random-graded-leibniz", || format!("({u}) ({v})"), &lhs, &rhs);
    }
    let mut res_payload = None;
    if guaranteed {
        let (m, n) = (pc.m(), pc.n());
        for _ in 0..RANDOM_SAMPLES {
            let mut coords = |k: usize| Slots((0..k).map(|_| random_element(&mut rng, &pools[0])).collect());
            let pe = ProductElement { e: coords(m), f: coords(n) };
            let w = random_element(&mut rng, &pools[0]);
            let lhs = pc.product_nabla(&pe.mul_right(&qt, &w));
            let rhs = pc.product_nabla(&pe).mul_right(&qt, &w).add(&pe.mul_right(&qt, &w.differential()));
            tally.compare("random-connection-leibniz", || format!("{pe} · ({w})"), &lhs, &rhs);
            let lhs = pc.product_curvature(&pe.mul_right(&qt, &w));
            let rhs = pc.product_curvature(&pe).mul_right(&qt, &w);
            tally.compare("random-curvature-linearity", || format!("{pe} · ({w})"), &lhs, &rhs);
        }
    } else {
        res_payload = Some("product samples skipped: nabla2cond1 does not hold");
    }
    let mut res = tally.finish();
    if let Some(note) = res_payload {
        res = res.with_payload("note", note);
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::load_scenario;

    fn small(text: &str) -> Scenario {
        let mut s = load_scenario(text).unwrap();
        s.caps = Caps::new(2, 2);
        s
    }

    #[test]
    fn grassmann_all_pass() {
        let s = small("q = \"2\"\n");
        let r = run_checks(&s, &default_checks(Command::Run, &s)).unwrap();
        for c in &r.checks {
            assert!(c.passed(), "{c}");
        }
    }

    #[test]
    fn dy_marks_theorem_inadmissible() {
        let s = small("q = \"2\"\n[potentials]\nF = [\"(1,1): dy\"]\n");
        let r = run_checks(&s, &default_checks(Command::Theorem, &s)).unwrap();
        assert!(r.check("nabla2cond1").unwrap().verdict.is_fail());
        assert_eq!(r.check("curvature-theorem").unwrap().verdict.label(), "inadmissible");
        assert_eq!(r.check("product-leibniz").unwrap().verdict.label(), "not-guaranteed");
    }

    #[test]
    fn unknown_check_rejected() {
        let s = small("");
        assert!(run_checks(&s, &["nope".to_string()]).is_err());
    }

    #[test]
    fn deterministic_json() {
        let s = small("seed = 5\n[potentials]\nE = [\"(1,1): x dx\"]\n");
        let ids = vec!["random-supplements".to_string(), "curvature-table".to_string()];
        let a = run_checks(&s, &ids).unwrap().to_json();
        let b = run_checks(&s, &ids).unwrap().to_json();
        assert_eq!(a, b);
    }
}
