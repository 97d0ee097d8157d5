use crate::error::{Error, Result};

/// A permutation of `{0, .., N-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u32).collect())
    }

    /// Validates that `images` is a bijection.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::AlmostHom(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self o other`, i.e. `i -> self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Permutation(inv)
    }

    /// Number of points where the two permutations differ.
    pub fn disagreements(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Normalized Hamming distance.
    pub fn hamming(&self, other: &Self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.disagreements(other) as f64 / self.0.len() as f64
    }

    /// Disagreements of `a o b` with `self`, without materializing `a o b`.
    pub(crate) fn product_disagreements(&self, a: &Self, b: &Self) -> usize {
        b.0.iter()
            .zip(&self.0)
            .filter(|(&bi, &si)| a.0[bi as usize] != si)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_order() {
        let s = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let t = Permutation::from_images(vec![1, 0, 2]).unwrap();
        // (s t)(0) = s(t(0)) = s(1) = 2
        assert_eq!(s.compose(&t).apply(0), 2);
        assert_eq!(s.compose(&s.inverse()), Permutation::identity(3));
        assert_eq!(s.product_disagreements(&s, &Permutation::identity(3)), 0);
        assert!(Permutation::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn hamming_counts_displaced_points() {
        let id = Permutation::identity(10);
        let mut images: Vec<u32> = (0..10).collect();
        images.swap(3, 7);
        let swapped = Permutation::from_images(images).unwrap();
        assert_eq!(id.hamming(&swapped), 0.2);
    }
}
