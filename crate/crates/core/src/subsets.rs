//! Lexicographic enumeration, ranking and unranking of `k`-subsets.
//!
//! The rank of a subset is its position in the lexicographic order of all
//! `k`-subsets of `0..n`, computed with the combinatorial number system.

use rand::RngCore;

/// `C(n, k)`, or `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Rank/unrank table for `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct SubsetIndexer {
    n: usize,
    k: usize,
    // table[i * (k + 1) + j] = C(i, j), saturating.
    table: Vec<u128>,
}

impl SubsetIndexer {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(k <= n, "k = {k} exceeds n = {n}");
        let width = k + 1;
        let mut table = vec![0u128; (n + 1) * width];
        for i in 0..=n {
            table[i * width] = 1;
            for j in 1..=k.min(i) {
                let above = table[(i - 1) * width + j - 1];
                let left = if j < i { table[(i - 1) * width + j] } else { 0 };
                table[i * width + j] = above.saturating_add(left);
            }
        }
        SubsetIndexer { n, k, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn choose(&self, i: usize, j: usize) -> u128 {
        if j > i {
            0
        } else {
            self.table[i * (self.k + 1) + j]
        }
    }

    /// Total number of subsets; saturates at `u128::MAX`.
    pub fn count(&self) -> u128 {
        self.choose(self.n, self.k)
    }

    /// Lexicographic rank of a strictly increasing member list.
    pub fn rank(&self, members: &[u32]) -> u128 {
        debug_assert_eq!(members.len(), self.k);
        let mut rank = 0u128;
        let mut lower = 0usize;
        for (i, &s) in members.iter().enumerate() {
            let s = s as usize;
            let remaining = self.k - i;
            // Subsets whose i-th member lies in lower..s come first.
            rank += self.choose(self.n - lower, remaining) - self.choose(self.n - s, remaining);
            lower = s + 1;
        }
        rank
    }

    pub fn unrank(&self, mut rank: u128) -> Vec<u32> {
        debug_assert!(rank < self.count());
        let mut members = Vec::with_capacity(self.k);
        let mut candidate = 0usize;
        for i in 0..self.k {
            loop {
                let with_candidate = self.choose(self.n - 1 - candidate, self.k - 1 - i);
                if rank < with_candidate {
                    break;
                }
                rank -= with_candidate;
                candidate += 1;
            }
            members.push(candidate as u32);
            candidate += 1;
        }
        members
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct LexSubsets {
    n: usize,
    current: Vec<u32>,
    done: bool,
}

impl LexSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        LexSubsets {
            n,
            current: (0..k as u32).collect(),
            done: k > n,
        }
    }

    /// Visits each subset in place without allocating.
    pub fn for_each_ref(mut self, mut f: impl FnMut(&[u32])) {
        while !self.done {
            f(&self.current);
            self.advance();
        }
    }

    fn advance(&mut self) {
        let k = self.current.len();
        let n = self.n as u32;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < n - (k - i) as u32 {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for LexSubsets {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.advance();
        Some(out)
    }
}

/// Uniform integer in `0..bound` by rejection over the enclosing
/// power-of-two range. `bound` must be positive.
pub fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    if bound == 1 {
        return 0;
    }
    let mask = u64::MAX >> (bound - 1).leading_zeros();
    loop {
        let x = rng.next_u64() & mask;
        if x < bound {
            return x;
        }
    }
}

/// [`uniform_below`] for 128-bit bounds.
pub fn uniform_below_u128<R: RngCore + ?Sized>(rng: &mut R, bound: u128) -> u128 {
    assert!(bound > 0, "empty range");
    if bound <= u64::MAX as u128 {
        return uniform_below(rng, bound as u64) as u128;
    }
    let mask = u128::MAX >> (bound - 1).leading_zeros();
    loop {
        let x = (((rng.next_u64() as u128) << 64) | rng.next_u64() as u128) & mask;
        if x < bound {
            return x;
        }
    }
}
