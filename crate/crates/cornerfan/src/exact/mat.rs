use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntVec = Vec<BigInt>;
pub type RatVec = Vec<BigRational>;

/// Dense row-major matrix. Vectors act on the left: `v ↦ v·M`, so the row
/// index is the input coordinate and the column index the output coordinate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Vec<T>>,
}

pub type IntMat = Matrix<BigInt>;
pub type RatMat = Matrix<BigRational>;

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]({}x{})", self.rows, self.cols)
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![vec![T::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = T::one();
        }
        m
    }

    /// Panics if a row has the wrong length.
    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
        }
        Matrix { rows: rows.len(), cols, data: rows }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[Vec<T>] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<Vec<T>> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.data[i][j] = x;
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a.clone() * other.data[k][j].clone();
                    out.data[i][j] = out.data[i][j].clone() + p;
                }
            }
        }
        out
    }

    /// `v·M`
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows, "vector length mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] = out[j].clone() + a.clone() * self.data[k][j].clone();
            }
        }
        out
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    /// Block diagonal `[[self, 0], [0, other]]`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[i][j] = self.data[i][j].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.data[self.rows + i][self.cols + j] = other.data[i][j].clone();
            }
        }
        m
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().chain(b.iter()).cloned().collect())
            .collect();
        Matrix { rows: self.rows, cols: self.cols + other.cols, data }
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        for r in &mut self.data {
            r.swap(a, b);
        }
    }
}

impl IntMat {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| ivec(r)).collect())
    }

    pub fn to_rat(&self) -> RatMat {
        self.map(|x| BigRational::from_integer(x.clone()))
    }

    pub fn det(&self) -> BigInt {
        let d = self.to_rat().det();
        debug_assert!(d.is_integer());
        d.to_integer()
    }

    pub fn rank(&self) -> usize {
        self.to_rat().rank()
    }
}

impl RatMat {
    /// Integer matrix if every entry is integral.
    pub fn to_int(&self) -> Option<IntMat> {
        if self.data.iter().all(|r| r.iter().all(|x| x.is_integer())) {
            Some(self.map(|x| x.to_integer()))
        } else {
            None
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.data[i][c].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.data[r][c].recip();
            for x in m.data[r].iter_mut() {
                *x = x.clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i != r && !m.data[i][c].is_zero() {
                    let f = m.data[i][c].clone();
                    for j in 0..m.cols {
                        let s = f.clone() * m.data[r][j].clone();
                        m.data[i][j] = m.data[i][j].clone() - s;
                    }
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

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut m = self.clone();
        let mut det = BigRational::one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.data[i][c].is_zero()) else {
                return BigRational::zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            let piv = m.data[c][c].clone();
            det *= piv.clone();
            for i in c + 1..m.rows {
                if !m.data[i][c].is_zero() {
                    let f = m.data[i][c].clone() / piv.clone();
                    for j in c..m.cols {
                        let s = f.clone() * m.data[c][j].clone();
                        m.data[i][j] = m.data[i][j].clone() - s;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<RatMat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&RatMat::identity(n));
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] >= n {
            return None;
        }
        Some(RatMat::from_rows(n, r.data.iter().map(|row| row[n..].to_vec()).collect()))
    }

    /// Some `x` with `x·M = v`, if one exists.
    pub fn solve_left(&self, v: &[BigRational]) -> Option<RatVec> {
        assert_eq!(v.len(), self.cols);
        // x·M = v  ⇔  Mᵀ xᵀ = vᵀ
        let t = self.transpose();
        let aug = t.hstack(&RatMat::from_rows(1, v.iter().map(|x| vec![x.clone()]).collect()));
        let (r, piv) = aug.rref();
        if piv.last() == Some(&self.rows) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.rows];
        for (i, &c) in piv.iter().enumerate() {
            x[c] = r.data[i][self.rows].clone();
        }
        Some(x)
    }
}

pub fn ivec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn rvec(v: &[i64]) -> RatVec {
    v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

pub fn to_rat(v: &[BigInt]) -> RatVec {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

pub fn dot<T: Clone + Zero + std::ops::Mul<Output = T>>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "dot product length mismatch");
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn add<T: Clone + std::ops::Add<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<T: Clone + std::ops::Sub<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<T: Clone + std::ops::Mul<Output = T>>(k: &T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| k.clone() * x.clone()).collect()
}

pub fn is_zero_vec<T: Zero>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Clears denominators and divides by the content; zero stays zero.
pub fn rat_to_primitive(v: &[BigRational]) -> IntVec {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: IntVec = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    if is_zero_vec(&ints) {
        ints
    } else {
        primitive(&ints).expect("nonzero")
    }
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divide by the gcd of the entries.
pub fn primitive(v: &[BigInt]) -> Result<IntVec, crate::exact::ExactError> {
    let g = gcd_all(v);
    if g.is_zero() {
        return Err(crate::exact::ExactError::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

pub fn sign(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
