//! Dense square and rectangular matrices of rational functions.

use std::fmt;

use crate::ratfunc::RatFunc;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<RatFunc>,
}

impl Matrix {
    /// Builds from rows; `None` when rows are ragged or empty, or entries
    /// disagree on the variable count.
    pub fn from_rows(rows: Vec<Vec<RatFunc>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first()?.len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return None;
        }
        let entries: Vec<RatFunc> = rows.into_iter().flatten().collect();
        let n = entries[0].nvars();
        if entries.iter().any(|e| e.nvars() != n) {
            return None;
        }
        Some(Matrix { rows: r, cols: c, entries })
    }

    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        Matrix { rows, cols, entries: vec![RatFunc::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.set(i, i, RatFunc::one(nvars));
        }
        m
    }

    pub fn diagonal(diag: Vec<RatFunc>) -> Self {
        let n = diag.len();
        let nvars = diag[0].nvars();
        let mut m = Self::zeros(n, n, nvars);
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nvars(&self) -> usize {
        self.entries[0].nvars()
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFunc {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFunc) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[RatFunc] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[RatFunc] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<RatFunc>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map(&self, f: impl FnMut(&RatFunc) -> RatFunc) -> Self {
        Matrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RatFunc::is_zero)
    }

    /// Entry-wise value equality.
    pub fn equals(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.equals(b))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols, self.nvars());
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = RatFunc::zero(self.nvars());
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), o.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn scale(&self, f: &RatFunc) -> Self {
        self.map(|e| e * f)
    }

    pub fn pad_vars(&self, n: usize) -> Self {
        self.map(|e| e.pad_vars(n))
    }

    pub fn remap(&self, map: &[usize], n: usize) -> Self {
        self.map(|e| e.remap(map, n))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, o: &Self) -> Self {
        let n = self.nvars();
        let mut m = Self::zeros(self.rows + o.rows, self.cols + o.cols, n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
