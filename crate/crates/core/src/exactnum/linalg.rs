//! Exact Gaussian elimination over the rationals.

use std::fmt;

use super::Rational;

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    /// Builds from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Matrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[Rational]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        self.rows_iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip().unwrap();
            for j in c..m.cols {
                m[(r, j)] *= &inv;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let delta = &f * &m[(r, j)];
                    m[(i, j)] -= &delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -&r[(row, f)];
                }
                v
            })
            .collect()
    }

    /// The nonzero rows of the reduced echelon form.
    pub fn row_space_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Matrix::from_rows(self.cols, rows)
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &[Rational]) -> bool {
        let mut rows: Vec<Vec<Rational>> = self.rows_iter().map(<[Rational]>::to_vec).collect();
        let base = self.rank();
        rows.push(v.to_vec());
        Matrix::from_rows(self.cols, rows).rank() == base
    }

    /// Columns selected by index, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let rows = self
            .rows_iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        Matrix::from_rows(cols.len(), rows)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in self.rows_iter() {
            let cells: Vec<String> = r.iter().map(Rational::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A labelled system of homogeneous linear conditions `M x = 0`.
///
/// Rows are conditions, columns are unknowns (polar coefficients, edge
/// flows, ...).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub matrix: Matrix,
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
}

impl ConstraintSystem {
    pub fn new(matrix: Matrix, row_labels: Vec<String>, column_labels: Vec<String>) -> Self {
        assert_eq!(matrix.nrows(), row_labels.len());
        assert_eq!(matrix.ncols(), column_labels.len());
        ConstraintSystem {
            matrix,
            row_labels,
            column_labels,
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn unknowns(&self) -> usize {
        self.matrix.ncols()
    }

    /// Basis of the solution space.
    pub fn solution_basis(&self) -> Vec<Vec<Rational>> {
        self.matrix.kernel()
    }

    pub fn solution_dim(&self) -> usize {
        self.unknowns() - self.rank()
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        self.matrix.mul_vec(x).iter().all(Rational::is_zero)
    }

    /// Equivalent system with independent rows in reduced echelon form.
    pub fn reduced(&self) -> ConstraintSystem {
        let m = self.matrix.row_space_basis();
        let labels = (0..m.nrows()).map(|i| format!("c{i}")).collect();
        ConstraintSystem::new(m, labels, self.column_labels.clone())
    }

    /// Human-readable equations such as `a + b = 0`.
    pub fn render_equations(&self) -> Vec<String> {
        self.matrix
            .rows_iter()
            .map(|row| {
                let mut s = String::new();
                for (c, label) in row.iter().zip(&self.column_labels) {
                    if c.is_zero() {
                        continue;
                    }
                    let neg = c.is_negative();
                    let mag = c.abs();
                    if s.is_empty() {
                        if neg {
                            s.push('-');
                        }
                    } else {
                        s.push_str(if neg { " - " } else { " + " });
                    }
                    if mag.is_one() {
                        s.push_str(label);
                    } else {
                        s.push_str(&format!("{mag}*{label}"));
                    }
                }
                if s.is_empty() {
                    s.push('0');
                }
                s.push_str(" = 0");
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;

    fn m(rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::integer(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 1], &[1, 1]]);
        assert_eq!(a.rank(), 1);
        assert_eq!(a.kernel(), vec![vec![q(-1, 1), q(1, 1)]]);

        let b = m(&[&[1, 2, 3], &[2, 4, 7]]);
        assert_eq!(b.rank(), 2);
        let k = b.kernel();
        assert_eq!(k.len(), 1);
        assert!(b.mul_vec(&k[0]).iter().all(Rational::is_zero));
    }

    #[test]
    fn empty_shapes() {
        let z = Matrix::zeros(3, 0);
        assert_eq!(z.rank(), 0);
        assert!(z.kernel().is_empty());
        let z = Matrix::zeros(0, 2);
        assert_eq!(z.kernel().len(), 2);
    }

    #[test]
    fn row_space_membership() {
        let a = m(&[&[1, 0, 1], &[0, 1, 1]]);
        assert!(a.row_space_contains(&[q(2, 1), q(3, 1), q(5, 1)]));
        assert!(!a.row_space_contains(&[q(1, 1), q(1, 1), q(1, 1)]));
    }

    #[test]
    fn render_equations() {
        let cs = ConstraintSystem::new(
            m(&[&[1, 1], &[0, -2]]),
            vec!["r0".into(), "r1".into()],
            vec!["a".into(), "b".into()],
        );
        assert_eq!(cs.render_equations(), vec!["a + b = 0", "-2*b = 0"]);
    }
}
