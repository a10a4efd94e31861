use std::collections::HashMap;

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest side length accepted by [`immanant`] (the sum runs over all n!
/// permutations).
pub const MAX_IMMANANT_DIM: usize = 6;

/// Integer partition, i.e. the row lengths of a Young diagram.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not non-increasing")));
        }
        Ok(Self(parts))
    }

    /// The one-row diagram `[n]`.
    pub fn symmetric(n: usize) -> Self {
        Self(if n == 0 { vec![] } else { vec![n] })
    }

    /// The one-column diagram `[1, ..., 1]`.
    pub fn antisymmetric(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of boxes.
    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Memo of irreducible S_n characters keyed by (shape, cycle type).
///
/// Not shared between threads; each caller owns its cache.
#[derive(Debug, Default)]
pub struct CharacterCache {
    memo: HashMap<(Vec<usize>, Vec<usize>), i64>,
}

impl CharacterCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// χ_λ evaluated on the class with the given cycle type, by the
    /// Murnaghan-Nakayama rule.
    pub fn character(&mut self, shape: &Partition, cycle_type: &[usize]) -> Result<i64> {
        let n: usize = cycle_type.iter().sum();
        if n != shape.n() || cycle_type.contains(&0) {
            return Err(Error::InvalidPartition(format!(
                "cycle type {cycle_type:?} does not partition {}",
                shape.n()
            )));
        }
        Ok(self.mn(shape.parts().to_vec(), cycle_type))
    }

    fn mn(&mut self, shape: Vec<usize>, cycles: &[usize]) -> i64 {
        let Some((&k, rest)) = cycles.split_first() else {
            return 1;
        };
        let key = (shape.clone(), cycles.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }

        // Beta-set (first-column hook lengths). Removing a border strip of
        // length k moves one bead from b to an empty slot b - k; the strip's
        // height is the number of beads jumped over.
        let len = shape.len();
        let beta: Vec<usize> = shape.iter().enumerate().map(|(i, &p)| p + len - 1 - i).collect();
        let mut total = 0;
        for (i, &b) in beta.iter().enumerate() {
            if b < k || beta.contains(&(b - k)) {
                continue;
            }
            let target = b - k;
            let height = beta.iter().filter(|&&x| x > target && x < b).count();
            let mut moved = beta.clone();
            moved[i] = target;
            let smaller = beta_to_partition(&mut moved);
            let sign = if height % 2 == 0 { 1 } else { -1 };
            total += sign * self.mn(smaller, rest);
        }
        self.memo.insert(key, total);
        total
    }
}

fn beta_to_partition(beta: &mut [usize]) -> Vec<usize> {
    beta.sort_unstable_by(|a, b| b.cmp(a));
    let len = beta.len();
    beta.iter()
        .enumerate()
        .map(|(i, &x)| x - (len - 1 - i))
        .filter(|&p| p > 0)
        .collect()
}

/// χ_λ on the given cycle type, with a throwaway cache.
pub fn character(shape: &Partition, cycle_type: &[usize]) -> Result<i64> {
    CharacterCache::new().character(shape, cycle_type)
}

/// Cycle lengths of a permutation in non-increasing order.
pub fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut lengths = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

/// Σ_σ χ_λ(σ) Π_i m[i, σ(i)].
pub fn immanant(m: &ComplexMatrix, shape: &Partition) -> Result<C64> {
    let n = m.square_dim()?;
    if shape.n() != n {
        return Err(Error::InvalidPartition(format!(
            "{:?} has {} boxes but the matrix is {n}x{n}",
            shape.parts(),
            shape.n()
        )));
    }
    if n > MAX_IMMANANT_DIM {
        return Err(Error::TooLarge { n, max: MAX_IMMANANT_DIM });
    }
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }

    let mut cache = CharacterCache::new();
    let mut classes: HashMap<Vec<usize>, i64> = HashMap::new();
    let mut total = C64::new(0.0, 0.0);
    let mut perm: Vec<usize> = (0..n).collect();
    // Heap's algorithm, iterative form.
    let mut counters = vec![0usize; n];
    let mut visit = |perm: &[usize], total: &mut C64| -> Result<()> {
        let ct = cycle_type(perm);
        let chi = match classes.get(&ct) {
            Some(&v) => v,
            None => {
                let v = cache.character(shape, &ct)?;
                classes.insert(ct, v);
                v
            }
        };
        if chi != 0 {
            let prod: C64 = (0..n).map(|i| m[(i, perm[i])]).product();
            *total += prod * chi as f64;
        }
        Ok(())
    };
    visit(&perm, &mut total)?;
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            visit(&perm, &mut total)?;
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(total)
}
