//! Dense matrices over Z with exact Smith normal form.
//!
//! The matrices here are tiny (at most a few dozen rows), so everything is a
//! plain row-major `Vec<BigInt>` and the algorithms favour determinism over
//! asymptotics. The Smith normal form tracks both transforms and their
//! inverses, which is what the quotient-group and saturation computations
//! downstream need.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::jsonint;

/// Arbitrary-precision integer used throughout the crate.
pub type Int = BigInt;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl std::fmt::Debug for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IntMat[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == nc), "ragged rows");
        IntMat { rows: nr, cols: nc, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        IntMat::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Int {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Int) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Int] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Int> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Int::is_zero)
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Int::zero();
                for t in 0..self.cols {
                    acc += self.at(r, t) * other.at(t, c);
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> IntMat {
        IntMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    /// Keep only the listed columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> IntMat {
        let mut out = IntMat::zeros(self.rows, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for r in 0..self.rows {
                out.set(r, j, self.at(r, c).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.at(i, c);
            self.set(i, c, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let v = -self.at(r, j);
            self.set(r, j, v);
        }
    }

    /// row_i += q * row_j
    fn add_row_multiple(&mut self, i: usize, j: usize, q: &Int) {
        for c in 0..self.cols {
            let v = self.at(i, c) + q * self.at(j, c);
            self.set(i, c, v);
        }
    }

    /// col_i += q * col_j
    fn add_col_multiple(&mut self, i: usize, j: usize, q: &Int) {
        for r in 0..self.rows {
            let v = self.at(r, i) + q * self.at(r, j);
            self.set(r, i, v);
        }
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = 1i32;
        let mut prev = Int::one();
        for t in 0..n - 1 {
            if m.at(t, t).is_zero() {
                match (t + 1..n).find(|&r| !m.at(r, t).is_zero()) {
                    Some(r) => {
                        m.swap_rows(t, r);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for r in t + 1..n {
                for c in t + 1..n {
                    let v = (m.at(t, t) * m.at(r, c) - m.at(r, t) * m.at(t, c)) / &prev;
                    m.set(r, c, v);
                }
                m.set(r, t, Int::zero());
            }
            prev = m.at(t, t).clone();
        }
        let d = m.at(n - 1, n - 1).clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }
}

/// Wire format: array of rows, each entry a JSON number or decimal string.
impl Serialize for IntMat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<jsonint::Flex>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| jsonint::Flex(x.clone())).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<jsonint::Flex>> = Vec::deserialize(d)?;
        let nc = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != nc) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(IntMat::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(|f| f.0).collect()).collect(),
        ))
    }
}

/// Smith normal form `left * a * right = d` with `left`, `right` unimodular.
///
/// `diag` holds the min(rows, cols) diagonal entries of `d`, nonnegative,
/// each dividing the next while nonzero.
pub struct SmithNormalForm {
    pub diag: Vec<Int>,
    pub rank: usize,
    pub left: IntMat,
    pub left_inv: IntMat,
    pub right: IntMat,
    pub right_inv: IntMat,
}

/// Compute the Smith normal form of `a`.
///
/// Pivoting is deterministic: among entries of minimal absolute value in the
/// live submatrix, the one with the largest row index (then smallest column
/// index) wins. Downstream code relies on this exact rule to get reproducible
/// normal coordinates.
pub fn smith_normal_form(a: &IntMat) -> SmithNormalForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut left = IntMat::identity(m);
    let mut left_inv = IntMat::identity(m);
    let mut right = IntMat::identity(n);
    let mut right_inv = IntMat::identity(n);

    // Elementary operations applied in lockstep. Row op E: d <- E d, left <- E left,
    // left_inv <- left_inv E^{-1}. Column op F: d <- d F, right <- right F,
    // right_inv <- F^{-1} right_inv.
    macro_rules! row_swap {
        ($i:expr, $j:expr) => {{
            d.swap_rows($i, $j);
            left.swap_rows($i, $j);
            left_inv.swap_cols($i, $j);
        }};
    }
    macro_rules! col_swap {
        ($i:expr, $j:expr) => {{
            d.swap_cols($i, $j);
            right.swap_cols($i, $j);
            right_inv.swap_rows($i, $j);
        }};
    }
    macro_rules! row_add {
        ($i:expr, $j:expr, $q:expr) => {{
            let q = $q;
            d.add_row_multiple($i, $j, &q);
            left.add_row_multiple($i, $j, &q);
            left_inv.add_col_multiple($j, $i, &(-q));
        }};
    }
    macro_rules! col_add {
        ($i:expr, $j:expr, $q:expr) => {{
            let q = $q;
            d.add_col_multiple($i, $j, &q);
            right.add_col_multiple($i, $j, &q);
            right_inv.add_row_multiple($j, $i, &(-q));
        }};
    }

    let mut t = 0;
    while t < m.min(n) {
        // Deterministic pivot selection over the live submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..m {
            for c in t..n {
                if d.at(r, c).is_zero() {
                    continue;
                }
                pivot = match pivot {
                    None => Some((r, c)),
                    Some((pr, pc)) => {
                        let cur = d.at(r, c).abs();
                        let best = d.at(pr, pc).abs();
                        if cur < best || (cur == best && (r > pr || (r == pr && c < pc))) {
                            Some((r, c))
                        } else {
                            Some((pr, pc))
                        }
                    }
                };
            }
        }
        let Some((pr, pc)) = pivot else { break };
        row_swap!(t, pr);
        col_swap!(t, pc);

        'reduce: loop {
            // Clear column t.
            let mut again = true;
            while again {
                again = false;
                for r in t + 1..m {
                    if d.at(r, t).is_zero() {
                        continue;
                    }
                    let q = -(d.at(r, t) / d.at(t, t));
                    if !q.is_zero() {
                        row_add!(r, t, q);
                    }
                    if !d.at(r, t).is_zero() {
                        // Remainder is strictly smaller; promote it to pivot.
                        row_swap!(t, r);
                        again = true;
                    }
                }
            }
            // Clear row t.
            again = true;
            while again {
                again = false;
                for c in t + 1..n {
                    if d.at(t, c).is_zero() {
                        continue;
                    }
                    let q = -(d.at(t, c) / d.at(t, t));
                    if !q.is_zero() {
                        col_add!(c, t, q);
                    }
                    if !d.at(t, c).is_zero() {
                        col_swap!(t, c);
                        again = true;
                    }
                }
            }
            // Column clearing may have re-dirtied the row only via swaps, which
            // the loops above already re-run; at this point row and column t are
            // clear. Enforce the divisibility condition.
            if (t + 1..m).any(|r| !d.at(r, t).is_zero()) {
                continue 'reduce;
            }
            let piv = d.at(t, t).clone();
            let mut fixed = true;
            'scan: for r in t + 1..m {
                for c in t + 1..n {
                    if !(d.at(r, c) % &piv).is_zero() {
                        // Fold the offending row into row t and restart.
                        row_add!(t, r, Int::one());
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }

        if d.at(t, t).is_negative() {
            d.negate_row(t);
            left.negate_row(t);
            left_inv.negate_col(t);
        }
        t += 1;
    }

    let diag: Vec<Int> = (0..m.min(n)).map(|i| d.at(i, i).clone()).collect();
    let rank = diag.iter().take_while(|x| !x.is_zero()).count();
    SmithNormalForm { diag, rank, left, left_inv, right, right_inv }
}

/// Basis of the integer kernel of `a`, as matrix columns.
///
/// The kernel of an integer matrix is automatically saturated: any integer
/// vector in the rational kernel lies in the span of the returned columns.
pub fn kernel(a: &IntMat) -> IntMat {
    let snf = smith_normal_form(a);
    let n = a.cols();
    snf.right.select_cols(&(snf.rank..n).collect::<Vec<_>>())
}

/// Saturation of the column span of `c`: the lattice of all integer points in
/// its rational span. Returns a basis as matrix columns.
pub fn saturation(c: &IntMat) -> IntMat {
    let snf = smith_normal_form(c);
    snf.left_inv.select_cols(&(0..snf.rank).collect::<Vec<_>>())
}

/// Reusable solver for `a x = b` over Z: one Smith normal form, many
/// right-hand sides.
pub struct Solver {
    rows: usize,
    cols: usize,
    snf: SmithNormalForm,
}

impl Solver {
    pub fn new(a: &IntMat) -> Self {
        Solver { rows: a.rows(), cols: a.cols(), snf: smith_normal_form(a) }
    }

    /// One integer solution, if any.
    pub fn solve(&self, b: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(self.rows, b.len(), "dimension mismatch in solve");
        let c = self.snf.left.mul_vec(b);
        let mut z = vec![Int::zero(); self.cols];
        for i in 0..self.rows {
            if i < self.snf.rank {
                let (q, r) = c[i].div_rem(&self.snf.diag[i]);
                if !r.is_zero() {
                    return None;
                }
                z[i] = q;
            } else if !c[i].is_zero() {
                return None;
            }
        }
        Some(self.snf.right.mul_vec(&z))
    }

    pub fn is_solvable(&self, b: &[Int]) -> bool {
        self.solve(b).is_some()
    }
}

/// One integer solution of `a x = b`, if any.
pub fn solve(a: &IntMat, b: &[Int]) -> Option<Vec<Int>> {
    Solver::new(a).solve(b)
}

/// Do the column spans of `a` and `b` coincide as sublattices of Z^n?
pub fn lattice_eq(a: &IntMat, b: &IntMat) -> bool {
    if a.rows() != b.rows() {
        return false;
    }
    let contains = |big: &IntMat, small: &IntMat| {
        (0..small.cols()).all(|j| solve(big, &small.col(j)).is_some())
    };
    contains(a, b) && contains(b, a)
}

/// Inverse of a unimodular matrix, or None when |det| != 1.
pub fn inverse_unimodular(m: &IntMat) -> Option<IntMat> {
    if m.rows() != m.cols() {
        return None;
    }
    let snf = smith_normal_form(m);
    if snf.diag.iter().any(|x| !x.is_one()) {
        return None;
    }
    // m = left_inv * right_inv, so m^{-1} = right * left.
    Some(snf.right.mul(&snf.left))
}
