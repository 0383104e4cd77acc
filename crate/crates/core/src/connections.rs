//! Right connections on free modules over a one-generator algebra.
//!
//! A free module `E = A^m` with basis `e_1, …, e_m` identifies `E ⊗_A Ω A`
//! with `(Ω A)^m`. A connection is `∇ = ∇_0 + α` where `∇_0` is the
//! Grassmann connection (componentwise `d`) and `α` is an `m×m` matrix of
//! 1-forms: `(∇v)_k = dv_k + Σ_l α_{kl} v_l`.

use std::fmt;

use crate::basis::Caps;
use crate::error::AlgebraError;
use crate::omega::{FormElement, FormWord, Generator};
use crate::report::{CheckResult, Tally};

/// An element of `E ⊗_A Ω A` in free-basis coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModuleVector {
    gen: Generator,
    entries: Vec<FormElement>,
}

impl ModuleVector {
    pub fn new(gen: Generator, entries: Vec<FormElement>) -> Result<Self, AlgebraError> {
        if let Some(e) = entries.iter().find(|e| e.generator() != gen) {
            return Err(AlgebraError::GeneratorMismatch {
                expected: gen,
                found: e.generator(),
            });
        }
        Ok(ModuleVector { gen, entries })
    }

    pub fn zero(gen: Generator, rank: usize) -> Self {
        ModuleVector {
            gen,
            entries: vec![FormElement::zero(gen); rank],
        }
    }

    /// `e_k ⊗ v`.
    pub fn unit(gen: Generator, rank: usize, k: usize, v: FormElement) -> Self {
        let mut out = ModuleVector::zero(gen, rank);
        out.entries[k] = v;
        out
    }

    pub fn generator(&self) -> Generator {
        self.gen
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[FormElement] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> &FormElement {
        &self.entries[k]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FormElement::is_zero)
    }

    pub fn add(&self, other: &ModuleVector) -> Result<ModuleVector, AlgebraError> {
        self.check_rank(other.rank())?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        Ok(ModuleVector {
            gen: self.gen,
            entries,
        })
    }

    /// `v · a` for a form `a`.
    pub fn mul_right(&self, a: &FormElement) -> Result<ModuleVector, AlgebraError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.multiply(a))
            .collect::<Result<_, _>>()?;
        Ok(ModuleVector {
            gen: self.gen,
            entries,
        })
    }

    fn check_rank(&self, found: usize) -> Result<(), AlgebraError> {
        if found == self.rank() {
            Ok(())
        } else {
            Err(AlgebraError::RankMismatch {
                expected: self.rank(),
                found,
            })
        }
    }
}

impl fmt::Display for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleVector{self}")
    }
}

/// A square matrix of forms, row-major.
pub type FormMatrix = Vec<Vec<FormElement>>;

/// `∇ = ∇_0 + α` on a free module of rank `m`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModuleConnection {
    gen: Generator,
    potential: FormMatrix,
}

impl ModuleConnection {
    /// Rejects non-square potentials, foreign generators and entries that are
    /// not homogeneous of degree one.
    pub fn new(gen: Generator, potential: FormMatrix) -> Result<Self, AlgebraError> {
        let m = potential.len();
        for row in &potential {
            if row.len() != m {
                return Err(AlgebraError::RankMismatch {
                    expected: m,
                    found: row.len(),
                });
            }
            for e in row {
                if e.generator() != gen {
                    return Err(AlgebraError::GeneratorMismatch {
                        expected: gen,
                        found: e.generator(),
                    });
                }
                if !e.is_homogeneous_of(1) {
                    return Err(AlgebraError::NotHomogeneous { expected: 1 });
                }
            }
        }
        Ok(ModuleConnection { gen, potential })
    }

    pub fn grassmann(gen: Generator, rank: usize) -> Self {
        ModuleConnection {
            gen,
            potential: vec![vec![FormElement::zero(gen); rank]; rank],
        }
    }

    pub fn generator(&self) -> Generator {
        self.gen
    }

    pub fn rank(&self) -> usize {
        self.potential.len()
    }

    pub fn potential(&self) -> &FormMatrix {
        &self.potential
    }

    /// `α_{kl}`.
    pub fn alpha(&self, k: usize, l: usize) -> &FormElement {
        &self.potential[k][l]
    }

    pub fn is_grassmann(&self) -> bool {
        self.potential.iter().flatten().all(FormElement::is_zero)
    }

    fn check(&self, v: &ModuleVector) -> Result<(), AlgebraError> {
        if v.generator() != self.gen {
            return Err(AlgebraError::GeneratorMismatch {
                expected: self.gen,
                found: v.generator(),
            });
        }
        v.check_rank(self.rank())
    }

    /// `(∇v)_k = dv_k + Σ_l α_{kl} v_l`, valid in every form degree.
    pub fn nabla(&self, v: &ModuleVector) -> Result<ModuleVector, AlgebraError> {
        self.check(v)?;
        let mut entries = Vec::with_capacity(self.rank());
        for k in 0..self.rank() {
            let mut out = v.entries[k].differential();
            for l in 0..self.rank() {
                if self.potential[k][l].is_zero() || v.entries[l].is_zero() {
                    continue;
                }
                out = out.add(&self.potential[k][l].multiply(&v.entries[l])?)?;
            }
            entries.push(out);
        }
        Ok(ModuleVector {
            gen: self.gen,
            entries,
        })
    }

    /// `θ(v) = ∇(∇v)`.
    pub fn curvature_apply(&self, v: &ModuleVector) -> Result<ModuleVector, AlgebraError> {
        self.nabla(&self.nabla(v)?)
    }

    /// Entry `(k, l)` is component `k` of `θ(e_l)`.
    pub fn curvature_matrix(&self) -> FormMatrix {
        let m = self.rank();
        let mut out = vec![vec![FormElement::zero(self.gen); m]; m];
        for l in 0..m {
            let v = ModuleVector::unit(self.gen, m, l, FormElement::one(self.gen));
            let theta = self.curvature_apply(&v).expect("rank matches");
            for (k, row) in out.iter_mut().enumerate() {
                row[l] = theta.entries[k].clone();
            }
        }
        out
    }

    /// `dα + α·α`.
    pub fn structure_curvature(&self) -> FormMatrix {
        let m = self.rank();
        let mut out = vec![vec![FormElement::zero(self.gen); m]; m];
        for (k, row) in out.iter_mut().enumerate() {
            for (l, entry) in row.iter_mut().enumerate() {
                let mut e = self.potential[k][l].differential();
                for p in 0..m {
                    let prod = self.potential[k][p]
                        .multiply(&self.potential[p][l])
                        .expect("one generator");
                    e = e.add(&prod).expect("one generator");
                }
                *entry = e;
            }
        }
        out
    }

    /// `Σ_l θ_{kl} v_l`.
    pub fn contract(&self, theta: &FormMatrix, v: &ModuleVector) -> Result<ModuleVector, AlgebraError> {
        self.check(v)?;
        let m = self.rank();
        let mut entries = Vec::with_capacity(m);
        for row in theta {
            let mut e = FormElement::zero(self.gen);
            for l in 0..m {
                e = e.add(&row[l].multiply(&v.entries[l])?)?;
            }
            entries.push(e);
        }
        Ok(ModuleVector {
            gen: self.gen,
            entries,
        })
    }
}

/// Renders a form matrix as `[[a, b], [c, d]]`.
pub fn render_matrix(m: &FormMatrix) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Exhaustively verifies the Leibniz rules of `∇` and the identities of its
/// curvature on capped basis vectors `e_l ⊗ w`.
pub fn check_connection(c: &ModuleConnection, caps: Caps) -> CheckResult {
    let gen = c.generator();
    let m = c.rank();
    let t = gen.symbol();
    let mut tally = Tally::new(
        "connection-laws",
        &[
            "leibniz",
            "graded-leibniz",
            "curvature-right-linear",
            "curvature-extension",
            "curvature-matrix",
        ],
    );
    let word = |w: &FormWord| FormElement::from_word(gen, w.clone());
    let theta = c.curvature_matrix();
    tally.compare(
        "curvature-matrix",
        || "θ".to_string(),
        &render_matrix(&theta),
        &render_matrix(&c.structure_curvature()),
    );
    for l in 0..m {
        for i in caps.exponents() {
            let v = ModuleVector::unit(gen, m, l, FormElement::power(gen, i));
            let nv = c.nabla(&v).expect("rank matches");
            let tv = c.curvature_apply(&v).expect("rank matches");
            for j in caps.exponents() {
                let a = FormElement::power(gen, j);
                let va = v.mul_right(&a).expect("one generator");
                let lhs = c.nabla(&va).expect("rank matches");
                let rhs = nv
                    .mul_right(&a)
                    .and_then(|x| x.add(&v.mul_right(&a.differential())?))
                    .expect("one generator");
                tally.compare(
                    "leibniz",
                    || format!("e{} {t}^{i} · {t}^{j}", l + 1),
                    &lhs,
                    &rhs,
                );
                let lhs = c.curvature_apply(&va).expect("rank matches");
                let rhs = tv.mul_right(&a).expect("one generator");
                tally.compare(
                    "curvature-right-linear",
                    || format!("e{} {t}^{i} · {t}^{j}", l + 1),
                    &lhs,
                    &rhs,
                );
            }
        }
        for (s, w) in caps.lower_degree(1).pairs() {
            let sv = ModuleVector::unit(gen, m, l, word(&s));
            let wf = word(&w);
            let lhs = c.nabla(&sv.mul_right(&wf).expect("one generator")).expect("rank");
            let sign = if s.degree() % 2 == 1 {
                wf.differential().neg()
            } else {
                wf.differential()
            };
            let rhs = c
                .nabla(&sv)
                .expect("rank")
                .mul_right(&wf)
                .and_then(|x| x.add(&sv.mul_right(&sign)?))
                .expect("one generator");
            tally.compare(
                "graded-leibniz",
                || format!("e{} {} · {}", l + 1, s.render(gen), w.render(gen)),
                &lhs,
                &rhs,
            );
        }
        for w in caps.lower_degree(2).words() {
            let v = ModuleVector::unit(gen, m, l, word(&w));
            let lhs = c.curvature_apply(&v).expect("rank");
            let rhs = c.contract(&theta, &v).expect("rank");
            tally.compare(
                "curvature-extension",
                || format!("e{} {}", l + 1, w.render(gen)),
                &lhs,
                &rhs,
            );
        }
    }
    tally.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fx(s: &str) -> FormElement {
        FormElement::parse(Generator::X, s).unwrap()
    }

    fn one_by_one(alpha: &str) -> ModuleConnection {
        ModuleConnection::new(Generator::X, vec![vec![fx(alpha)]]).unwrap()
    }

    #[test]
    fn grassmann_is_componentwise_d() {
        let c = ModuleConnection::grassmann(Generator::X, 2);
        let v = ModuleVector::new(Generator::X, vec![fx("x^2"), fx("3 x")]).unwrap();
        let nv = c.nabla(&v).unwrap();
        assert_eq!(nv.get(0), &fx("x dx + dx x"));
        assert_eq!(nv.get(1), &fx("3 dx"));
        assert!(c.curvature_apply(&v).unwrap().is_zero());
    }

    #[test]
    fn potential_examples() {
        let c = one_by_one("x dx");
        let v = ModuleVector::unit(Generator::X, 1, 0, fx("1"));
        assert_eq!(c.nabla(&v).unwrap().get(0), &fx("x dx"));
        assert_eq!(c.curvature_matrix()[0][0], fx("dx dx + x dx x dx"));
        assert_eq!(one_by_one("dx").curvature_matrix()[0][0], fx("dx dx"));
        let g = ModuleConnection::grassmann(Generator::X, 1);
        let dv = ModuleVector::unit(Generator::X, 1, 0, fx("dx"));
        assert!(g.nabla(&dv).unwrap().is_zero());
    }

    #[test]
    fn laws_hold() {
        let c = ModuleConnection::new(
            Generator::X,
            vec![vec![fx("x dx"), fx("dx")], vec![fx("0"), fx("2 dx x^2")]],
        )
        .unwrap();
        assert!(check_connection(&c, Caps::new(2, 3)).passed());
    }

    #[test]
    fn rejects_bad_potential() {
        assert!(ModuleConnection::new(Generator::X, vec![vec![fx("x")]]).is_err());
        assert!(ModuleConnection::new(
            Generator::Y,
            vec![vec![FormElement::parse(Generator::X, "dx").unwrap()]]
        )
        .is_err());
        let c = ModuleConnection::grassmann(Generator::X, 2);
        assert!(c.nabla(&ModuleVector::zero(Generator::X, 3)).is_err());
    }
}
