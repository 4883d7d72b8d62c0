use std::ops::{Index, IndexMut};

/// Dense row-major `n x n` matrix indexed by `(row, col)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone + Default> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n],
        }
    }
}

impl<T> SquareMatrix<T> {
    /// Builds from row-major data; `None` when `data.len() != n * n`.
    pub fn from_vec(n: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == n * n).then_some(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Iterates `(i, j, &value)` over every off-diagonal entry.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .map(move |(idx, v)| (idx / n, idx % n, v))
            .filter(|(i, j, _)| i != j)
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}
