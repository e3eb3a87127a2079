//! Exact matrices: scalar matrices over a field (with the principal
//! minor enumeration) and matrices of polynomials (with fraction-free
//! determinants and adjugates).

use crate::exactfield::{FieldId, FieldValue};
use crate::mpoly::Poly;
use crate::par;

/// Dense square matrix of field values, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    pub field: FieldId,
    pub n: usize,
    pub entries: Vec<FieldValue>,
}

impl Mat {
    pub fn new(field: FieldId, n: usize, entries: Vec<FieldValue>) -> Mat {
        assert_eq!(entries.len(), n * n);
        assert!(entries.iter().all(|e| e.field() == field));
        Mat { field, n, entries }
    }

    pub fn from_rows(field: FieldId, rows: Vec<Vec<FieldValue>>) -> Mat {
        let n = rows.len();
        let entries: Vec<FieldValue> = rows.into_iter().flatten().collect();
        Mat::new(field, n, entries)
    }

    pub fn zero(field: FieldId, n: usize) -> Mat {
        Mat {
            field,
            n,
            entries: vec![FieldValue::zero(field); n * n],
        }
    }

    pub fn identity(field: FieldId, n: usize) -> Mat {
        let mut m = Mat::zero(field, n);
        for i in 0..n {
            *m.at_mut(i, i) = FieldValue::one(field);
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldValue {
        &self.entries[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut FieldValue {
        &mut self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldValue) {
        assert_eq!(v.field(), self.field);
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let mut out = Mat::zero(self.field, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s = FieldValue::zero(self.field);
                for k in 0..self.n {
                    s = s.add(&self.at(i, k).mul(other.at(k, j)));
                }
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Mat {
        let mut out = Mat::zero(self.field, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.at(j, i).conj());
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.conj_transpose()
    }

    /// `D^{-1} A D` for `D = diag(lambda)`; entrywise `a_ij * l_j / l_i`.
    pub fn diagonal_conjugate(&self, lambda: &[FieldValue]) -> Mat {
        assert_eq!(lambda.len(), self.n);
        assert!(lambda.iter().all(|l| !l.is_zero()), "zero diagonal entry");
        let mut out = Mat::zero(self.field, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.at(i, j).mul(&lambda[j]).mul(&lambda[i].inv()));
            }
        }
        out
    }

    /// Principal submatrix on the rows/columns in the bitmask `mask`.
    pub fn principal_submatrix(&self, mask: u32) -> Mat {
        let idx: Vec<usize> = (0..self.n).filter(|&i| mask >> i & 1 == 1).collect();
        let k = idx.len();
        let mut out = Mat::zero(self.field, k);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                out.set(r, c, self.at(i, j).clone());
            }
        }
        out
    }

    /// Submatrix deleting the listed rows and columns (0-based).
    pub fn delete(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let ri: Vec<usize> = (0..self.n).filter(|i| !rows.contains(i)).collect();
        let ci: Vec<usize> = (0..self.n).filter(|j| !cols.contains(j)).collect();
        assert_eq!(ri.len(), ci.len());
        let k = ri.len();
        let mut out = Mat::zero(self.field, k);
        for (r, &i) in ri.iter().enumerate() {
            for (c, &j) in ci.iter().enumerate() {
                out.set(r, c, self.at(i, j).clone());
            }
        }
        out
    }

    /// Exact determinant by Gaussian elimination with pivoting.
    pub fn det(&self) -> FieldValue {
        let mut a = self.clone();
        let n = self.n;
        let mut det = FieldValue::one(self.field);
        for k in 0..n {
            let pivot_row = match (k..n).find(|&r| !a.at(r, k).is_zero()) {
                None => return FieldValue::zero(self.field),
                Some(r) => r,
            };
            if pivot_row != k {
                for j in 0..n {
                    let (lo, hi) = (k.min(pivot_row), k.max(pivot_row));
                    let tmp = a.at(lo, j).clone();
                    let other = a.at(hi, j).clone();
                    a.set(lo, j, other);
                    a.set(hi, j, tmp);
                }
                det = det.neg();
            }
            let p = a.at(k, k).clone();
            det = det.mul(&p);
            let pinv = p.inv();
            for r in k + 1..n {
                let factor = a.at(r, k).mul(&pinv);
                if factor.is_zero() {
                    continue;
                }
                for c in k..n {
                    let v = a.at(r, c).sub(&factor.mul(a.at(k, c)));
                    a.set(r, c, v);
                }
            }
        }
        det
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let n = self.n;
        let mut rank = 0;
        let mut row = 0;
        for col in 0..n {
            let pivot = match (row..n).find(|&r| !a.at(r, col).is_zero()) {
                None => continue,
                Some(r) => r,
            };
            if pivot != row {
                for j in 0..n {
                    let tmp = a.at(row, j).clone();
                    let other = a.at(pivot, j).clone();
                    a.set(row, j, other);
                    a.set(pivot, j, tmp);
                }
            }
            let pinv = a.at(row, col).inv();
            for r in row + 1..n {
                let factor = a.at(r, col).mul(&pinv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.at(r, c).sub(&factor.mul(a.at(row, c)));
                    a.set(r, c, v);
                }
            }
            rank += 1;
            row += 1;
            if row == n {
                break;
            }
        }
        rank
    }

    /// All `2^n` principal minors, indexed by subset bitmask
    /// (`minors[0] = 1`).  Enumerated data-parallel.
    pub fn principal_minors(&self) -> Vec<FieldValue> {
        let masks: Vec<u32> = (0..1u32 << self.n).collect();
        par::map_collect(masks, |mask| self.principal_submatrix(mask).det())
    }

    /// Sequential twin of [`Mat::principal_minors`], for benchmarking.
    pub fn principal_minors_seq(&self) -> Vec<FieldValue> {
        let masks: Vec<u32> = (0..1u32 << self.n).collect();
        par::map_collect_seq(masks, |mask| self.principal_submatrix(mask).det())
    }
}

/// Dense square matrix of polynomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PMat {
    pub field: FieldId,
    pub nvars: usize,
    pub n: usize,
    pub entries: Vec<Poly>,
}

impl PMat {
    pub fn new(field: FieldId, nvars: usize, n: usize, entries: Vec<Poly>) -> PMat {
        assert_eq!(entries.len(), n * n);
        assert!(entries.iter().all(|e| e.field == field && e.nvars == nvars));
        PMat {
            field,
            nvars,
            n,
            entries,
        }
    }

    /// `diag(x_1, ..., x_n) + A` for a scalar matrix `A`.
    pub fn char_matrix(a: &Mat) -> PMat {
        let n = a.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut p = Poly::constant(n, a.at(i, j).clone());
                if i == j {
                    p = p.add(&Poly::var(a.field, n, i));
                }
                entries.push(p);
            }
        }
        PMat::new(a.field, n, n, entries)
    }

    pub fn at(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Poly) {
        assert_eq!(v.field, self.field);
        assert_eq!(v.nvars, self.nvars);
        self.entries[i * self.n + j] = v;
    }

    pub fn delete(&self, rows: &[usize], cols: &[usize]) -> PMat {
        let ri: Vec<usize> = (0..self.n).filter(|i| !rows.contains(i)).collect();
        let ci: Vec<usize> = (0..self.n).filter(|j| !cols.contains(j)).collect();
        assert_eq!(ri.len(), ci.len());
        let k = ri.len();
        let mut entries = Vec::with_capacity(k * k);
        for &i in &ri {
            for &j in &ci {
                entries.push(self.at(i, j).clone());
            }
        }
        PMat::new(self.field, self.nvars, k, entries)
    }

    /// Exact determinant by fraction-free Bareiss elimination; every
    /// division in the recurrence is exact over the polynomial ring.
    pub fn det(&self) -> Poly {
        let n = self.n;
        if n == 0 {
            return Poly::one(self.field, self.nvars);
        }
        let mut a: Vec<Poly> = self.entries.clone();
        let mut sign_neg = false;
        let mut prev = Poly::one(self.field, self.nvars);
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                    None => return Poly::zero(self.field, self.nvars),
                    Some(r) => {
                        for j in 0..n {
                            a.swap(k * n + j, r * n + j);
                        }
                        sign_neg = !sign_neg;
                    }
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i * n + j]
                        .mul(&a[k * n + k])
                        .sub(&a[i * n + k].mul(&a[k * n + j]));
                    a[i * n + j] = num
                        .div_exact(&prev)
                        .expect("Bareiss division is exact");
                }
                a[i * n + k] = Poly::zero(self.field, self.nvars);
            }
            prev = a[k * n + k].clone();
        }
        let d = a[(n - 1) * n + (n - 1)].clone();
        if sign_neg {
            d.neg()
        } else {
            d
        }
    }

    /// Cofactor `C_ij = (-1)^{i+j} det(M with row i, col j deleted)`.
    pub fn cofactor(&self, i: usize, j: usize) -> Poly {
        let d = self.delete(&[i], &[j]).det();
        if (i + j) % 2 == 1 {
            d.neg()
        } else {
            d
        }
    }

    /// Adjugate: `adj(M)_{ij} = C_ji`.
    pub fn adjugate(&self) -> PMat {
        let n = self.n;
        let cells: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .collect();
        let entries = par::map_collect(cells, |(i, j)| self.cofactor(j, i));
        PMat::new(self.field, self.nvars, n, entries)
    }
}
