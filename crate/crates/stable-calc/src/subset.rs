//! Subset bitmask helpers. A subset of the variable indices 0..n-1 is a
//! `u32` bitmask; all subset-lattice loops run over these masks.

/// A subset of [n] encoded as a bitmask; bit i set means index i is present.
pub type Subset = u32;

/// Number of subsets of an n-element ground set.
#[inline]
pub fn lattice_size(n_vars: usize) -> usize {
    1usize << n_vars
}

/// The full set [n] as a mask.
#[inline]
pub fn full_mask(n_vars: usize) -> Subset {
    if n_vars == 0 {
        0
    } else {
        (u32::MAX) >> (32 - n_vars)
    }
}

/// Complement within the ground set of size n.
#[inline]
pub fn complement(s: Subset, n_vars: usize) -> Subset {
    full_mask(n_vars) & !s
}

#[inline]
pub fn contains(s: Subset, i: usize) -> bool {
    s >> i & 1 == 1
}

#[inline]
pub fn cardinality(s: Subset) -> u32 {
    s.count_ones()
}

/// Builds a mask from explicit indices; fails on indices outside 0..n-1.
pub fn from_indices(indices: &[usize], n_vars: usize) -> Result<Subset, crate::Error> {
    let mut s = 0u32;
    for &i in indices {
        if i >= n_vars {
            return Err(crate::Error::IndexOutOfRange { index: i, limit: n_vars });
        }
        s |= 1 << i;
    }
    Ok(s)
}

/// The indices present in a mask, ascending.
pub fn to_indices(s: Subset) -> Vec<usize> {
    (0..32).filter(|&i| contains(s, i)).collect()
}

/// Iterates all submasks of `mask`, descending, ending with the empty set.
/// The classic `(sub - 1) & mask` walk.
pub fn submasks(mask: Subset) -> SubmaskIter {
    SubmaskIter { mask, current: mask, done: false }
}

pub struct SubmaskIter {
    mask: Subset,
    current: Subset,
    done: bool,
}

impl Iterator for SubmaskIter {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        if self.done {
            return None;
        }
        let out = self.current;
        if self.current == 0 {
            self.done = true;
        } else {
            self.current = (self.current - 1) & self.mask;
        }
        Some(out)
    }
}
