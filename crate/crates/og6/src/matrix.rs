//! Small exact matrices over the integers and rationals.
//!
//! Everything in this crate works with lattices of rank at most ten or so,
//! with coordinate entries bounded by the workloads' coordinate boxes, so a
//! dense row-major `i64` matrix with `i128` intermediates is exact and fast.
//! Overflow panics instead of wrapping.

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};

fn mul_i64(a: i64, b: i64) -> i64 {
    let p = (a as i128) * (b as i128);
    i64::try_from(p).expect("integer matrix entry overflow")
}

fn add_i64(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("integer matrix entry overflow")
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl std::fmt::Debug for IMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        IMat { rows: r, cols: c, data }
    }

    pub fn from_cols(cols: &[Vec<i64>]) -> Self {
        IMat::from_rows(cols).transpose()
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> IMat {
        let mut t = IMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = add_i64(out[(i, j)], mul_i64(a, other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc: i128 = 0;
                for j in 0..self.cols {
                    acc += (self[(i, j)] as i128) * (v[j] as i128);
                }
                i64::try_from(acc).expect("integer overflow in mul_vec")
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Exact determinant via fraction-free Bareiss elimination over i128.
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut m: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let at = |m: &Vec<i128>, i: usize, j: usize| m[i * n + j];
        let mut sign: i128 = 1;
        let mut prev: i128 = 1;
        for k in 0..n - 1 {
            if at(&m, k, k) == 0 {
                match (k + 1..n).find(|&i| at(&m, i, k) != 0) {
                    Some(p) => {
                        for j in 0..n {
                            m.swap(k * n + j, p * n + j);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = at(&m, i, j)
                        .checked_mul(at(&m, k, k))
                        .and_then(|x| x.checked_sub(at(&m, i, k).checked_mul(at(&m, k, j)).unwrap()))
                        .expect("determinant overflow");
                    m[i * n + j] = num / prev;
                }
                m[i * n + k] = 0;
            }
            prev = at(&m, k, k);
        }
        i64::try_from(sign * at(&m, n - 1, n - 1)).expect("determinant overflow")
    }

    pub fn to_rational(&self) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect(),
        }
    }

    /// Basis of the integer kernel {x : A x = 0}, as matrix columns.
    /// The kernel of an integer-linear map is automatically saturated.
    pub fn kernel(&self) -> IMat {
        let snf = smith_normal_form(self);
        let r = (0..self.rows.min(self.cols)).take_while(|&i| snf.d[(i, i)] != 0).count();
        let cols: Vec<Vec<i64>> = (r..self.cols).map(|j| snf.q.col(j)).collect();
        IMat::from_cols(&cols)
    }

    /// Hermite-style basis of the column lattice: returns a matrix whose
    /// columns generate the same sublattice of Z^rows, with full column rank.
    pub fn column_lattice_basis(&self) -> IMat {
        // Column elimination to column echelon form over Z.
        let mut m = self.clone();
        let (rows, cols) = (m.rows, m.cols);
        let mut pivot_col = 0usize;
        for row in 0..rows {
            if pivot_col >= cols {
                break;
            }
            loop {
                // find the column (>= pivot_col) with the smallest nonzero entry in `row`
                let mut best: Option<(usize, i64)> = None;
                for j in pivot_col..cols {
                    let v = m[(row, j)];
                    if v != 0 && best.is_none_or(|(_, b)| v.abs() < b.abs()) {
                        best = Some((j, v));
                    }
                }
                let Some((bj, bv)) = best else { break };
                m.swap_cols(pivot_col, bj);
                let mut done = true;
                for j in pivot_col + 1..cols {
                    let q = m[(row, j)] / bv;
                    if q != 0 {
                        m.add_col_multiple(j, pivot_col, -q);
                    }
                    if m[(row, j)] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if m[(row, pivot_col)] != 0 {
                pivot_col += 1;
            }
        }
        let kept: Vec<Vec<i64>> =
            (0..pivot_col).map(|j| m.col(j)).filter(|c| c.iter().any(|&x| x != 0)).collect();
        IMat::from_cols(&kept)
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let (x, y) = (self[(i, a)], self[(i, b)]);
            self[(i, a)] = y;
            self[(i, b)] = x;
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, k: i64) {
        for i in 0..self.rows {
            self[(i, target)] = add_i64(self[(i, target)], mul_i64(k, self[(i, source)]));
        }
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of the Smith normal form: `p * a * q = d` with `p`, `q` unimodular
/// and `d` diagonal with each diagonal entry dividing the next.
pub struct Snf {
    pub d: IMat,
    pub p: IMat,
    pub q: IMat,
}

/// Smith normal form with a deterministic pivot rule: among the remaining
/// entries of smallest absolute value, the leftmost in the topmost row wins.
pub fn smith_normal_form(a: &IMat) -> Snf {
    let (rows, cols) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut p = IMat::identity(rows);
    let mut q = IMat::identity(cols);

    let n = rows.min(cols);
    for t in 0..n {
        loop {
            // deterministic pivot: minimal |entry|, ties to smallest (i, j)
            let mut piv: Option<(usize, usize, i64)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = d[(i, j)];
                    if v != 0 && piv.is_none_or(|(_, _, b)| v.abs() < b.abs()) {
                        piv = Some((i, j, v));
                    }
                }
            }
            let Some((pi, pj, _)) = piv else {
                return Snf { d, p, q };
            };
            swap_rows(&mut d, &mut p, t, pi);
            swap_cols_tracked(&mut d, &mut q, t, pj);
            let pv = d[(t, t)];
            let mut clean = true;
            for i in t + 1..rows {
                let k = d[(i, t)] / pv;
                if k != 0 {
                    add_row_multiple(&mut d, &mut p, i, t, -k);
                }
                if d[(i, t)] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let k = d[(t, j)] / pv;
                if k != 0 {
                    add_col_multiple_tracked(&mut d, &mut q, j, t, -k);
                }
                if d[(t, j)] != 0 {
                    clean = false;
                }
            }
            if clean {
                // divisibility condition: pivot must divide the rest
                let mut ok = true;
                'outer: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if d[(i, j)] % pv != 0 {
                            add_row_multiple(&mut d, &mut p, t, i, 1);
                            ok = false;
                            break 'outer;
                        }
                    }
                }
                if ok {
                    break;
                }
            }
        }
    }
    // normalize signs
    for t in 0..n {
        if d[(t, t)] < 0 {
            for j in 0..cols {
                let v = d[(t, j)];
                d[(t, j)] = -v;
            }
            for j in 0..rows {
                let v = p[(t, j)];
                p[(t, j)] = -v;
            }
        }
    }
    Snf { d, p, q }
}

fn swap_rows(d: &mut IMat, p: &mut IMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..d.cols {
        let (x, y) = (d[(a, j)], d[(b, j)]);
        d[(a, j)] = y;
        d[(b, j)] = x;
    }
    for j in 0..p.cols {
        let (x, y) = (p[(a, j)], p[(b, j)]);
        p[(a, j)] = y;
        p[(b, j)] = x;
    }
}

fn swap_cols_tracked(d: &mut IMat, q: &mut IMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    d.swap_cols(a, b);
    q.swap_cols(a, b);
}

fn add_row_multiple(d: &mut IMat, p: &mut IMat, target: usize, source: usize, k: i64) {
    for j in 0..d.cols {
        d[(target, j)] = add_i64(d[(target, j)], mul_i64(k, d[(source, j)]));
    }
    for j in 0..p.cols {
        p[(target, j)] = add_i64(p[(target, j)], mul_i64(k, p[(source, j)]));
    }
}

fn add_col_multiple_tracked(d: &mut IMat, q: &mut IMat, target: usize, source: usize, k: i64) {
    d.add_col_multiple(target, source, k);
    q.add_col_multiple(target, source, k);
}

/// Dense rational matrix, used for dual-lattice and basis-change arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Exact inverse by Gauss-Jordan elimination; panics on singular input.
    pub fn inverse(&self) -> QMat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let piv = (col..n)
                .find(|&i| !a[(i, col)].is_zero())
                .expect("singular matrix in QMat::inverse");
            if piv != col {
                for j in 0..n {
                    let (x, y) = (a[(col, j)].clone(), a[(piv, j)].clone());
                    a[(col, j)] = y;
                    a[(piv, j)] = x;
                    let (x, y) = (inv[(col, j)].clone(), inv[(piv, j)].clone());
                    inv[(col, j)] = y;
                    inv[(piv, j)] = x;
                }
            }
            let pv = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &pv;
                inv[(col, j)] = &inv[(col, j)] / &pv;
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let sub = &f * &a[(col, j)];
                    a[(i, j)] -= sub;
                    let sub = &f * &inv[(col, j)];
                    inv[(i, j)] -= sub;
                }
            }
        }
        inv
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Exact rational determinant by Gaussian elimination.
    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&i| !a[(i, col)].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                for j in 0..n {
                    let (x, y) = (a[(col, j)].clone(), a[(piv, j)].clone());
                    a[(col, j)] = y;
                    a[(piv, j)] = x;
                }
                det = -det;
            }
            let pv = a[(col, col)].clone();
            det *= &pv;
            for i in col + 1..n {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let f = &a[(i, col)] / &pv;
                for j in col..n {
                    let sub = &f * &a[(col, j)];
                    a[(i, j)] -= sub;
                }
            }
        }
        det
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_integer(&self) -> Option<IMat> {
        if !self.is_integral() {
            return None;
        }
        let data = self
            .data
            .iter()
            .map(|x| i64::try_from(x.to_integer()).expect("overflow converting QMat"))
            .collect();
        Some(IMat { rows: self.rows, cols: self.cols, data })
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

pub fn big_rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Reduce a rational to its representative in [0, 2) modulo 2Z, for
/// discriminant-form values.
pub fn reduce_mod_2(x: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut r = x.clone();
    // floor division trick
    let q = (&r / &two).floor();
    r -= &q * &two;
    if r.is_negative() {
        r += &two;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_identity() {
        let u = IMat::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(u.det(), -1);
        assert_eq!(IMat::identity(3).det(), 1);
        let m = IMat::from_rows(&[vec![2, 1], vec![1, 2]]);
        assert_eq!(m.det(), 3);
    }

    #[test]
    fn snf_diagonal_divisibility() {
        let a = IMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let snf = smith_normal_form(&a);
        let lhs = snf.p.mul(&a).mul(&snf.q);
        assert_eq!(lhs, snf.d);
        assert_eq!(snf.p.det().abs(), 1);
        assert_eq!(snf.q.det().abs(), 1);
        let mut prev = snf.d[(0, 0)];
        for i in 1..3 {
            let cur = snf.d[(i, i)];
            if cur != 0 {
                assert_eq!(cur % prev, 0);
            }
            prev = cur;
        }
    }

    #[test]
    fn kernel_of_projection() {
        let a = IMat::from_rows(&[vec![1, 0, 1]]);
        let k = a.kernel();
        assert_eq!(k.cols, 2);
        for j in 0..2 {
            let col = k.col(j);
            assert_eq!(col[0] + col[2], 0);
        }
    }

    #[test]
    fn qmat_inverse_roundtrip() {
        let m = IMat::from_rows(&[vec![1, 2], vec![3, 5]]).to_rational();
        let inv = m.inverse();
        assert_eq!(m.mul(&inv), QMat::identity(2));
    }

    #[test]
    fn mod_2_reduction() {
        assert_eq!(reduce_mod_2(&big_rational(-1, 2)), big_rational(3, 2));
        assert_eq!(reduce_mod_2(&big_rational(5, 2)), big_rational(1, 2));
        assert_eq!(reduce_mod_2(&big_rational(-4, 1)), big_rational(0, 1));
    }

    #[test]
    fn column_lattice_basis_full_rank() {
        let a = IMat::from_cols(&[vec![2, 0], vec![0, 3], vec![2, 3]]);
        let b = a.column_lattice_basis();
        assert_eq!(b.cols, 2);
        // the column lattice of a contains (2,0) and (0,3); det of basis = +-6
        assert_eq!(b.det().abs(), 6);
    }
}
