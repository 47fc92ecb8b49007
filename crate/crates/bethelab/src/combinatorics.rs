//! Combinatorial indexing shared across the magnon-sector code.
//!
//! Every module that stores amplitudes over occupied-site tuples
//! (x_0 < x_1 < … < x_{M-1}) uses the same basis order: colexicographic
//! rank, rank(x) = Σ_j C(x_j, j+1). The solver, the state builders, the
//! emulator, and the exact-diagonalization oracle all index through here,
//! so their amplitude vectors are directly comparable.

/// Binomial coefficient C(n, k), exact.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc holds C(n-k+i, i)
        acc = acc * (n - k + 1 + i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Dimension of the M-magnon sector on L sites, as usize.
pub fn sector_dimension(chain_len: usize, magnons: usize) -> usize {
    let d = binomial(chain_len, magnons);
    usize::try_from(d).expect("sector dimension overflows usize")
}

/// ln(n!), by direct summation of logarithms.
pub fn ln_factorial(n: usize) -> f64 {
    let mut acc = 0.0;
    for k in 2..=n {
        acc += (k as f64).ln();
    }
    acc
}

/// ln C(n, k).
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Colexicographic rank of a strictly increasing tuple.
pub fn tuple_rank(tuple: &[usize]) -> usize {
    let mut rank: u128 = 0;
    for (j, &x) in tuple.iter().enumerate() {
        rank += binomial(x, j + 1);
    }
    usize::try_from(rank).expect("tuple rank overflows usize")
}

/// Inverse of [`tuple_rank`]: the rank-th tuple of length `magnons`.
pub fn tuple_unrank(magnons: usize, rank: usize) -> Vec<usize> {
    let mut remaining = rank as u128;
    let mut tuple = vec![0usize; magnons];
    for j in (0..magnons).rev() {
        // largest c with C(c, j+1) <= remaining
        let mut c = j;
        while binomial(c + 1, j + 1) <= remaining {
            c += 1;
        }
        remaining -= binomial(c, j + 1);
        tuple[j] = c;
    }
    tuple
}

/// Iterator over all strictly increasing M-tuples in {0, …, L-1},
/// in colexicographic (= rank) order.
pub fn tuples(chain_len: usize, magnons: usize) -> ColexTuples {
    ColexTuples {
        chain_len,
        current: (0..magnons).collect(),
        done: magnons > chain_len,
        first: true,
    }
}

pub struct ColexTuples {
    chain_len: usize,
    current: Vec<usize>,
    done: bool,
    first: bool,
}

impl Iterator for ColexTuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.first {
            self.first = false;
            return Some(self.current.clone());
        }
        let m = self.current.len();
        // smallest j whose entry can advance without hitting its upper neighbor
        let mut j = 0;
        loop {
            if j == m {
                self.done = true;
                return None;
            }
            let ceiling = if j + 1 == m {
                self.chain_len
            } else {
                self.current[j + 1]
            };
            if self.current[j] + 1 < ceiling {
                break;
            }
            j += 1;
        }
        self.current[j] += 1;
        for i in 0..j {
            self.current[i] = i;
        }
        Some(self.current.clone())
    }
}

/// Steinhaus–Johnson–Trotter permutations of {0, …, m-1}.
///
/// Each step differs from its predecessor by one transposition of
/// adjacent positions; the yielded `swap` is the left position of that
/// transposition (`None` for the initial identity).
pub fn permutations(m: usize) -> SjtPermutations {
    SjtPermutations {
        perm: (0..m).collect(),
        dirs: vec![-1i8; m],
        first: true,
        done: m == 0,
    }
}

pub struct SjtPermutations {
    perm: Vec<usize>,
    dirs: Vec<i8>,
    first: bool,
    done: bool,
}

impl Iterator for SjtPermutations {
    /// (permutation, left position of the adjacent swap that produced it)
    type Item = (Vec<usize>, Option<usize>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.first {
            self.first = false;
            return Some((self.perm.clone(), None));
        }
        let m = self.perm.len();
        // largest mobile value: direction points at a smaller neighbor
        let mut mobile: Option<(usize, usize)> = None; // (value, position)
        for (pos, &value) in self.perm.iter().enumerate() {
            let target = pos as isize + self.dirs[value] as isize;
            if target < 0 || target >= m as isize {
                continue;
            }
            if self.perm[target as usize] < value && mobile.is_none_or(|(best, _)| value > best) {
                mobile = Some((value, pos));
            }
        }
        let Some((value, pos)) = mobile else {
            self.done = true;
            return None;
        };
        let target = (pos as isize + self.dirs[value] as isize) as usize;
        self.perm.swap(pos, target);
        for v in value + 1..m {
            self.dirs[v] = -self.dirs[v];
        }
        Some((self.perm.clone(), Some(pos.min(target))))
    }
}
