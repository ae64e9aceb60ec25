//! Exact linear algebra over ℚ: reduced row echelon form, rank, nullspace and
//! subspaces with a canonical basis.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch { expected: cols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: nrows, cols, data })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        Self::from_rows(cols, rows).expect("rows of equal length")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Canonical reduced row echelon form.
    ///
    /// Rows are first scaled to primitive integer vectors; forward
    /// elimination is then fraction free (cross multiplication followed by
    /// content removal) and the result is normalised and back-substituted
    /// over ℚ.
    pub fn rref(&self) -> Rref {
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| primitive_integer_row(self.row(i)))
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let Some(found) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, found);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            let pivot = &pivot_row[col];
            for row in tail.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(pivot_row) {
                    *x = &*x * pivot - &factor * p;
                }
                remove_content(row);
            }
            pivots.push(col);
            rank += 1;
        }

        let mut reduced: Vec<Vec<BigRational>> = rows[..rank]
            .iter()
            .zip(&pivots)
            .map(|(row, &p)| {
                let lead = row[p].clone();
                row.iter().map(|x| BigRational::new(x.clone(), lead.clone())).collect()
            })
            .collect();
        for i in (0..rank).rev() {
            let p = pivots[i];
            let (above, rest) = reduced.split_at_mut(i);
            let pivot_row = &rest[0];
            for row in above.iter_mut() {
                if row[p].is_zero() {
                    continue;
                }
                let factor = row[p].clone();
                for (x, v) in row.iter_mut().zip(pivot_row).skip(p) {
                    *x -= &factor * v;
                }
            }
        }
        reduced.resize(self.rows, vec![BigRational::zero(); self.cols]);
        let matrix = Self::from_rows(self.cols, reduced).expect("row lengths preserved");
        Rref { matrix, rank, pivots }
    }

    pub fn nullspace(&self) -> Subspace {
        let Rref { matrix, rank, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let generators = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[free] = BigRational::one();
                for (i, &p) in pivots.iter().enumerate().take(rank) {
                    v[p] = -matrix[(i, free)].clone();
                }
                v
            })
            .collect();
        Subspace::from_generators(self.cols, generators).expect("generated with ambient length")
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        f.write_str("]")
    }
}

/// Output of [`RationalMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Same shape as the input, zero rows last.
    pub matrix: RationalMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn primitive_integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = row
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    remove_content(&mut ints);
    ints
}

fn remove_content(row: &mut [BigInt]) {
    let content = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if content > BigInt::one() {
        for x in row.iter_mut() {
            *x /= &content;
        }
    }
}

/// A linear subspace of ℚ^ambient_dim, stored as the nonzero rows of an RREF.
///
/// Equal subspaces have identical representations, so `==` is subspace
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RationalMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: RationalMatrix::zeros(0, ambient_dim), pivots: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: RationalMatrix::identity(ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// Span of `generators`, each of length `ambient_dim`.
    pub fn from_generators(
        ambient_dim: usize,
        generators: Vec<Vec<BigRational>>,
    ) -> Result<Self, LinalgError> {
        let m = RationalMatrix::from_rows(ambient_dim, generators)?;
        Ok(Self::row_space(&m))
    }

    /// Row space of `m`.
    pub fn row_space(m: &RationalMatrix) -> Self {
        let Rref { matrix, rank, pivots } = m.rref();
        let rows = (0..rank).map(|i| matrix.row(i).to_vec()).collect();
        let basis = RationalMatrix::from_rows(m.cols(), rows).expect("rref rows");
        Self { ambient_dim: m.cols(), basis, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> Vec<Vec<BigRational>> {
        self.basis.row_vecs()
    }

    fn check_dim(&self, found: usize) -> Result<(), LinalgError> {
        if found == self.ambient_dim {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch { expected: self.ambient_dim, found })
        }
    }

    /// Residue of `v` after reduction against the RREF basis; zero iff `v ∈ self`.
    pub fn reduce(&self, v: &[BigRational]) -> Result<Vec<BigRational>, LinalgError> {
        self.check_dim(v.len())?;
        let mut r = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if r[p].is_zero() {
                continue;
            }
            let factor = r[p].clone();
            for (x, b) in r.iter_mut().zip(self.basis.row(i)) {
                *x -= &factor * b;
            }
        }
        Ok(r)
    }

    pub fn contains(&self, v: &[BigRational]) -> Result<bool, LinalgError> {
        Ok(self.reduce(v)?.iter().all(Zero::is_zero))
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_dim(other.ambient_dim)?;
        for i in 0..other.dim() {
            if !self.contains(other.basis.row(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Orthocomplement for the standard inner product.
    pub fn orthocomplement(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.ambient_dim);
        }
        self.basis.nullspace()
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_dim(other.ambient_dim)?;
        let generators = self.basis_vectors().into_iter().chain(other.basis_vectors()).collect();
        Subspace::from_generators(self.ambient_dim, generators)
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        Ok(self.orthocomplement().sum(&other.orthocomplement())?.orthocomplement())
    }

    /// Embeds into ℚ^new_dim by appending zero coordinates.
    pub fn extend_ambient(&self, new_dim: usize) -> Subspace {
        assert!(new_dim >= self.ambient_dim, "cannot shrink ambient space");
        let rows = self
            .basis_vectors()
            .into_iter()
            .map(|mut v| {
                v.resize(new_dim, BigRational::zero());
                v
            })
            .collect();
        Subspace {
            ambient_dim: new_dim,
            basis: RationalMatrix::from_rows(new_dim, rows).expect("resized rows"),
            pivots: self.pivots.clone(),
        }
    }

    /// Embeds as `{0}^prefix × self`.
    pub fn shift_ambient(&self, prefix: usize) -> Subspace {
        let rows = self
            .basis_vectors()
            .into_iter()
            .map(|v| {
                let mut w = vec![BigRational::zero(); prefix];
                w.extend(v);
                w
            })
            .collect();
        Subspace {
            ambient_dim: self.ambient_dim + prefix,
            basis: RationalMatrix::from_rows(self.ambient_dim + prefix, rows).expect("shifted rows"),
            pivots: self.pivots.iter().map(|p| p + prefix).collect(),
        }
    }
}

/// Makes the first nonzero coordinate positive; used for sign-stable output.
pub fn sign_normalize(v: &mut [BigRational]) {
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in v.iter_mut() {
            *x = -x.clone();
        }
    }
}
