//! Scenario files: TOML documents describing one configuration to check.
//!
//! ```toml
//! q = "2"
//! m = 1
//! n = 2
//! seed = 7
//! S_matrix = [["1", "1"], ["0", "1"]]
//!
//! [caps]
//! max_exponent = 4
//! max_degree = 3
//!
//! [potentials]
//! E = ["(1,1): x dx"]
//! F = []
//!
//! [bimodule]
//! phi = "induced"
//! psi = ["(1,1): dy"]
//! ```

use std::collections::BTreeMap;
use std::ops::Range;

use toml::{Table, Value};

use crate::basis::Caps;
use crate::bimodule::{BimoduleConnection, BimoduleProduct, LeftConnection};
use crate::connections::{render_matrix, FormMatrix, ModuleConnection};
use crate::error::{AlgebraError, ScenarioError};
use crate::matrix::Matrix;
use crate::omega::{FormElement, Generator};
use crate::product::{ProductConnection, ReportInput};
use crate::scalar::Scalar;
use crate::twist::{LeftTauSpec, QTwist, TauSpec};

/// How `φ` or `ψ` is specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaSpec {
    /// `φ(dt ⊗ e_k) = e_k ⊗ dt`.
    Flip,
    /// `φ_{lk} = δ_{lk} dt + α_{lk} t - t α_{lk}`.
    Induced,
    Values(FormMatrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleSection {
    pub phi: SigmaSpec,
    pub psi: SigmaSpec,
    /// Left-connection candidate on `E` for the σ-compatibility check.
    pub left: Option<FormMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub q: Scalar,
    pub m: usize,
    pub n: usize,
    pub potential_e: FormMatrix,
    pub potential_f: FormMatrix,
    pub s_matrix: Matrix,
    pub t_matrix: Matrix,
    pub bimodule: Option<BimoduleSection>,
    /// A second `S` for the independence check.
    pub independence: Option<Matrix>,
    pub report: Option<ReportInput>,
    pub caps: Caps,
    pub seed: u64,
    /// Requested check identifiers; empty means the subcommand default.
    pub checks: Vec<String>,
}

const TOP_KEYS: &[&str] = &[
    "name", "q", "m", "n", "seed", "checks", "S_matrix", "T_matrix", "caps", "potentials",
    "bimodule", "independence", "report",
];

fn field(name: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Field {
        field: name.to_string(),
        message: message.into(),
    }
}

fn line_of(text: &str, span: Option<Range<usize>>) -> usize {
    span.map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
        .unwrap_or(1)
}

fn check_keys(t: &Table, allowed: &[&str], prefix: &str) -> Result<(), ScenarioError> {
    for k in t.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(field(&format!("{prefix}{k}"), "unknown field"));
        }
    }
    Ok(())
}

fn scalar(v: &Value, name: &str) -> Result<Scalar, ScenarioError> {
    match v {
        Value::String(s) => s.parse().map_err(|e| field(name, format!("{e}"))),
        Value::Integer(i) => Ok(Scalar::from_int(*i)),
        _ => Err(field(name, "expected a rational as a string or an integer")),
    }
}

fn usize_field(t: &Table, name: &str, default: usize) -> Result<usize, ScenarioError> {
    match t.get(name) {
        None => Ok(default),
        Some(Value::Integer(i)) if *i >= 0 => Ok(*i as usize),
        Some(_) => Err(field(name, "expected a non-negative integer")),
    }
}

fn matrix(v: Option<&Value>, name: &'static str, size: usize) -> Result<Matrix, ScenarioError> {
    let Some(v) = v else {
        return Ok(Matrix::identity(size));
    };
    let rows = v.as_array().ok_or_else(|| field(name, "expected an array of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| field(name, format!("row {} is not an array", i + 1)))?;
        let mut r = Vec::with_capacity(row.len());
        for (j, e) in row.iter().enumerate() {
            r.push(scalar(e, &format!("{name}[{}][{}]", i + 1, j + 1))?);
        }
        out.push(r);
    }
    let m = Matrix::from_rows(out).ok_or_else(|| field(name, "matrix is not square"))?;
    if m.size() != size {
        return Err(field(name, format!("expected a {size}×{size} matrix, found size {}", m.size())));
    }
    match m.inverse() {
        Ok(_) => Ok(m),
        Err(_) => Err(ScenarioError::NotInvertible(name)),
    }
}

/// Parses entries `"(k,l): <form>"` into a `size × size` matrix, 1-based.
fn form_matrix(v: Option<&Value>, name: &str, gen: Generator, size: usize) -> Result<FormMatrix, ScenarioError> {
    let mut out = vec![vec![FormElement::zero(gen); size]; size];
    let Some(v) = v else {
        return Ok(out);
    };
    let entries = v.as_array().ok_or_else(|| field(name, "expected an array of \"(k,l): form\" entries"))?;
    for e in entries {
        let s = e.as_str().ok_or_else(|| field(name, "entries must be strings"))?;
        let (idx, expr) = s
            .split_once(':')
            .ok_or_else(|| field(name, format!("entry `{s}` lacks `(k,l):`")))?;
        let idx = idx.trim();
        let inner = idx
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| field(name, format!("bad index `{idx}`")))?;
        let (k, l) = inner
            .split_once(',')
            .ok_or_else(|| field(name, format!("bad index `{idx}`")))?;
        let parse_idx = |t: &str| -> Result<usize, ScenarioError> {
            match t.trim().parse::<usize>() {
                Ok(i) if (1..=size).contains(&i) => Ok(i - 1),
                _ => Err(field(name, format!("index `{}` outside 1..={size}", t.trim()))),
            }
        };
        let (k, l) = (parse_idx(k)?, parse_idx(l)?);
        let form = FormElement::parse(gen, expr.trim()).map_err(|err| field(name, format!("entry `{s}`: {err}")))?;
        if !form.is_homogeneous_of(1) {
            return Err(ScenarioError::Degree {
                field: name.to_string(),
                entry: s.to_string(),
            });
        }
        out[k][l] = out[k][l].add(&form).expect("same generator");
    }
    Ok(out)
}

fn sigma_spec(v: Option<&Value>, name: &str, gen: Generator, size: usize) -> Result<SigmaSpec, ScenarioError> {
    match v {
        None => Ok(SigmaSpec::Induced),
        Some(Value::String(s)) if s == "flip" => Ok(SigmaSpec::Flip),
        Some(Value::String(s)) if s == "induced" => Ok(SigmaSpec::Induced),
        Some(Value::String(s)) => Err(field(name, format!("unknown choice `{s}`; use \"flip\", \"induced\" or a list of entries"))),
        Some(v) => Ok(SigmaSpec::Values(form_matrix(Some(v), name, gen, size)?)),
    }
}

fn degree0(v: &Value, name: &str, gen: Generator) -> Result<FormElement, ScenarioError> {
    let s = v.as_str().ok_or_else(|| field(name, "expected a polynomial as a string"))?;
    let e = FormElement::parse(gen, s).map_err(|err| field(name, err.to_string()))?;
    if !e.is_homogeneous_of(0) {
        return Err(field(name, "expected a polynomial without differentials"));
    }
    Ok(e)
}

fn report_input(t: &Table, m: usize, n: usize) -> Result<ReportInput, ScenarioError> {
    check_keys(t, &["e", "b", "a", "f"], "report.")?;
    let mut input = ReportInput::standard(m, n);
    if let Some(v) = t.get("e") {
        let arr = v.as_array().ok_or_else(|| field("report.e", "expected an array"))?;
        if arr.len() != m {
            return Err(field("report.e", format!("expected {m} entries")));
        }
        input.e = arr.iter().map(|v| degree0(v, "report.e", Generator::X)).collect::<Result<_, _>>()?;
    }
    if let Some(v) = t.get("b") {
        input.b = degree0(v, "report.b", Generator::Y)?;
    }
    if let Some(v) = t.get("a") {
        let a = degree0(v, "report.a", Generator::X)?;
        let mut terms = a.terms();
        input.j = match (terms.next(), terms.next()) {
            (Some((w, c)), None) if c.is_one() => w.first_exponent(),
            _ => return Err(field("report.a", "expected a monomial x^j")),
        };
    }
    if let Some(v) = t.get("f") {
        let arr = v.as_array().ok_or_else(|| field("report.f", "expected an array"))?;
        if arr.len() != n {
            return Err(field("report.f", format!("expected {n} entries")));
        }
        input.f = arr.iter().map(|v| degree0(v, "report.f", Generator::Y)).collect::<Result<_, _>>()?;
    }
    Ok(input)
}

/// Parses and validates a scenario.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| ScenarioError::Syntax {
        line: line_of(text, e.span()),
        message: e.message().to_string(),
    })?;
    check_keys(&table, TOP_KEYS, "")?;
    let q = match table.get("q") {
        None => Scalar::from_int(2),
        Some(v) => scalar(v, "q")?,
    };
    if q.is_zero() {
        return Err(field("q", "must be nonzero"));
    }
    let m = usize_field(&table, "m", 1)?;
    let n = usize_field(&table, "n", 1)?;
    if m == 0 || n == 0 {
        return Err(field(if m == 0 { "m" } else { "n" }, "rank must be at least 1"));
    }
    let seed = match table.get("seed") {
        None => 0,
        Some(Value::Integer(i)) if *i >= 0 => *i as u64,
        Some(_) => return Err(field("seed", "expected a non-negative integer")),
    };
    let name = match table.get("name") {
        None => String::from("unnamed"),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(field("name", "expected a string")),
    };
    let checks = match table.get("checks") {
        None => Vec::new(),
        Some(v) => v
            .as_array()
            .and_then(|a| a.iter().map(|c| c.as_str().map(String::from)).collect::<Option<Vec<_>>>())
            .ok_or_else(|| field("checks", "expected an array of check identifiers"))?,
    };
    let mut caps = Caps::default();
    if let Some(v) = table.get("caps") {
        let t = v.as_table().ok_or_else(|| field("caps", "expected a table"))?;
        check_keys(t, &["max_exponent", "max_degree"], "caps.")?;
        caps.max_exponent = usize_field(t, "max_exponent", caps.max_exponent as usize)? as u32;
        caps.max_degree = usize_field(t, "max_degree", caps.max_degree)?;
    }
    if caps.max_exponent == 0 || caps.max_degree == 0 {
        return Err(field("caps", "caps must be at least 1"));
    }
    let s_matrix = matrix(table.get("S_matrix"), "S_matrix", n)?;
    let t_matrix = matrix(table.get("T_matrix"), "T_matrix", m)?;
    let (mut potential_e, mut potential_f) = (
        form_matrix(None, "potentials.E", Generator::X, m)?,
        form_matrix(None, "potentials.F", Generator::Y, n)?,
    );
    if let Some(v) = table.get("potentials") {
        let t = v.as_table().ok_or_else(|| field("potentials", "expected a table"))?;
        check_keys(t, &["E", "F"], "potentials.")?;
        potential_e = form_matrix(t.get("E"), "potentials.E", Generator::X, m)?;
        potential_f = form_matrix(t.get("F"), "potentials.F", Generator::Y, n)?;
    }
    let bimodule = match table.get("bimodule") {
        None => None,
        Some(v) => {
            let t = v.as_table().ok_or_else(|| field("bimodule", "expected a table"))?;
            check_keys(t, &["phi", "psi", "left"], "bimodule.")?;
            Some(BimoduleSection {
                phi: sigma_spec(t.get("phi"), "bimodule.phi", Generator::X, m)?,
                psi: sigma_spec(t.get("psi"), "bimodule.psi", Generator::Y, n)?,
                left: match t.get("left") {
                    None => None,
                    Some(v) => Some(form_matrix(Some(v), "bimodule.left", Generator::X, m)?),
                },
            })
        }
    };
    let independence = match table.get("independence") {
        None => None,
        Some(v) => {
            let t = v.as_table().ok_or_else(|| field("independence", "expected a table"))?;
            check_keys(t, &["S_matrix"], "independence.")?;
            Some(matrix(t.get("S_matrix"), "S_matrix", n)?)
        }
    };
    let report = match table.get("report") {
        None => None,
        Some(v) => Some(report_input(
            v.as_table().ok_or_else(|| field("report", "expected a table"))?,
            m,
            n,
        )?),
    };
    Ok(Scenario {
        name,
        q,
        m,
        n,
        potential_e,
        potential_f,
        s_matrix,
        t_matrix,
        bimodule,
        independence,
        report,
        caps,
        seed,
        checks,
    })
}

impl Scenario {
    /// All-Grassmann canonical scenario with the given ranks.
    pub fn grassmann(q: Scalar, m: usize, n: usize) -> Scenario {
        Scenario {
            name: String::from("grassmann"),
            q,
            m,
            n,
            potential_e: vec![vec![FormElement::zero(Generator::X); m]; m],
            potential_f: vec![vec![FormElement::zero(Generator::Y); n]; n],
            s_matrix: Matrix::identity(n),
            t_matrix: Matrix::identity(m),
            bimodule: None,
            independence: None,
            report: None,
            caps: Caps::default(),
            seed: 0,
            checks: Vec::new(),
        }
    }

    pub fn twist(&self) -> QTwist {
        QTwist::new(self.q.clone()).expect("validated q")
    }

    pub fn tau(&self) -> TauSpec {
        TauSpec::new(&self.twist(), self.s_matrix.clone()).expect("validated S")
    }

    pub fn left_tau(&self) -> LeftTauSpec {
        LeftTauSpec::new(&self.twist(), self.t_matrix.clone()).expect("validated T")
    }

    pub fn conn_e(&self) -> ModuleConnection {
        ModuleConnection::new(Generator::X, self.potential_e.clone()).expect("validated potential")
    }

    pub fn conn_f(&self) -> ModuleConnection {
        ModuleConnection::new(Generator::Y, self.potential_f.clone()).expect("validated potential")
    }

    pub fn product(&self) -> ProductConnection {
        ProductConnection::new(self.twist(), self.tau(), self.conn_e(), self.conn_f()).expect("validated ranks")
    }

    fn sigma(spec: &SigmaSpec, conn: ModuleConnection) -> Result<BimoduleConnection, AlgebraError> {
        match spec {
            SigmaSpec::Flip => Ok(BimoduleConnection::flip(conn)),
            SigmaSpec::Induced => Ok(BimoduleConnection::induced(conn)),
            SigmaSpec::Values(v) => BimoduleConnection::new(conn, v.clone()),
        }
    }

    /// The bimodule data, using induced `φ`, `ψ` when the section is absent.
    pub fn bimodule_product(&self) -> BimoduleProduct {
        let induced = BimoduleSection {
            phi: SigmaSpec::Induced,
            psi: SigmaSpec::Induced,
            left: None,
        };
        let sec = self.bimodule.as_ref().unwrap_or(&induced);
        let phi = Scenario::sigma(&sec.phi, self.conn_e()).expect("validated φ");
        let psi = Scenario::sigma(&sec.psi, self.conn_f()).expect("validated ψ");
        BimoduleProduct::new(self.twist(), self.tau(), self.left_tau(), phi, psi).expect("validated ranks")
    }

    pub fn left_connection(&self) -> Option<LeftConnection> {
        let left = self.bimodule.as_ref()?.left.as_ref()?;
        Some(LeftConnection::new(Generator::X, left.clone()).expect("validated left potential"))
    }

    /// Configuration echo for reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        out.insert("name".into(), self.name.clone());
        out.insert("q".into(), self.q.to_string());
        out.insert("m".into(), self.m.to_string());
        out.insert("n".into(), self.n.to_string());
        out.insert("caps".into(), self.caps.to_string());
        out.insert("seed".into(), self.seed.to_string());
        out.insert("S_matrix".into(), format!("{:?}", self.s_matrix));
        out.insert("T_matrix".into(), format!("{:?}", self.t_matrix));
        out.insert("potentials.E".into(), render_matrix(&self.potential_e));
        out.insert("potentials.F".into(), render_matrix(&self.potential_f));
        if let Some(s) = &self.independence {
            out.insert("independence.S_matrix".into(), format!("{s:?}"));
        }
        if let Some(b) = &self.bimodule {
            let r = |s: &SigmaSpec| match s {
                SigmaSpec::Flip => "flip".to_string(),
                SigmaSpec::Induced => "induced".to_string(),
                SigmaSpec::Values(v) => render_matrix(v),
            };
            out.insert("bimodule.phi".into(), r(&b.phi));
            out.insert("bimodule.psi".into(), r(&b.psi));
            if let Some(l) = &b.left {
                out.insert("bimodule.left".into(), render_matrix(l));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_grassmann() {
        let s = load_scenario("q = \"2\"\nm = 1\nn = 1\n").unwrap();
        assert_eq!(s.q, Scalar::from_int(2));
        assert_eq!((s.m, s.n), (1, 1));
        assert!(s.conn_e().is_grassmann() && s.conn_f().is_grassmann());
        assert_eq!(s.caps, Caps::default());
    }

    #[test]
    fn parses_matrix_and_potentials() {
        let text = "q = \"3/2\"\nn = 2\nS_matrix = [[\"1\", \"1\"], [0, 1]]\n[potentials]\nE = [\"(1,1): x dx - 1/2 dx x\"]\nF = [\"(1,2): dy\"]\n";
        let s = load_scenario(text).unwrap();
        assert_eq!(s.s_matrix, Matrix::from_ints(&[&[1, 1], &[0, 1]]));
        assert_eq!(s.potential_f[0][1].to_string(), "dy");
        assert!(s.potential_f[1][0].is_zero());
    }

    #[test]
    fn rejections() {
        let err = load_scenario("n = 2\nS_matrix = [[1, 1], [1, 1]]\n").unwrap_err();
        assert_eq!(err.to_string(), "S_matrix not invertible");
        let err = load_scenario("[potentials]\nE = [\"(1,1): x\"]\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Degree { .. }));
        let err = load_scenario("q = \"2\"\nm = \n").unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { line: 2, .. }), "{err}");
        let err = load_scenario("colour = 1\n").unwrap_err();
        assert_eq!(err.to_string(), "field `colour`: unknown field");
        assert!(load_scenario("q = 0\n").is_err());
    }
}
