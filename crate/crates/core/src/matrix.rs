//! Small dense matrices over the rationals.

use std::fmt;

use crate::error::AlgebraError;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            entries: vec![Scalar::zero(); n * n],
        }
    }

    pub fn diagonal(diag: &[Scalar]) -> Self {
        let mut m = Matrix::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = d.clone();
        }
        m
    }

    /// Row-major construction; `None` when the rows are ragged or not square.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Matrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect())
                .collect(),
        )
        .expect("square integer matrix")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.entries.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.n)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix, AlgebraError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(AlgebraError::Singular)?;
            if pivot != col {
                for j in 0..n {
                    a.entries.swap(pivot * n + j, col * n + j);
                    inv.entries.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).inv().expect("nonzero pivot");
            for j in 0..n {
                a.entries[col * n + j] = a.get(col, j) * &p;
                inv.entries[col * n + j] = inv.get(col, j) * &p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a.entries[r * n + j] = a.get(r, j) - &(&factor * a.get(col, j));
                    inv.entries[r * n + j] = inv.get(r, j) - &(&factor * inv.get(col, j));
                }
            }
        }
        Ok(inv)
    }

    /// Power by repeated squaring; `exp >= 0`.
    pub fn pow(&self, exp: u32) -> Matrix {
        let mut result = Matrix::identity(self.n);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Cached powers `M^k` and `M^{-k}` of an invertible matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixPowers {
    positive: Vec<Matrix>,
    negative: Vec<Matrix>,
}

impl MatrixPowers {
    pub fn new(m: &Matrix, up_to: u32) -> Result<Self, AlgebraError> {
        let inv = m.inverse()?;
        let mut positive = vec![Matrix::identity(m.size())];
        let mut negative = vec![Matrix::identity(m.size())];
        for k in 1..=up_to as usize {
            positive.push(positive[k - 1].mul(m));
            negative.push(negative[k - 1].mul(&inv));
        }
        Ok(MatrixPowers { positive, negative })
    }

    pub fn base(&self) -> &Matrix {
        self.positive.get(1).unwrap_or(&self.positive[0])
    }

    pub fn pow(&self, k: i64) -> Matrix {
        let idx = k.unsigned_abs() as usize;
        let table = if k >= 0 { &self.positive } else { &self.negative };
        if let Some(m) = table.get(idx) {
            return m.clone();
        }
        let last = table.len() - 1;
        let step = &table[1];
        table[last].mul(&step.pow((idx - last) as u32))
    }

    /// Borrowing lookup for `|k|` within the cache.
    pub fn cached(&self, k: i64) -> Option<&Matrix> {
        let idx = k.unsigned_abs() as usize;
        if k >= 0 {
            self.positive.get(idx)
        } else {
            self.negative.get(idx)
        }
    }
}
