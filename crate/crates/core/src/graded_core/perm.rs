//! Permutations, Koszul signs and unshuffles.

/// A permutation of `0..n`, stored as its list of images.
///
/// Acting on a sequence `(v_0, ..., v_{n-1})` it produces `(v_{s(0)}, ..., v_{s(n-1)})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Returns `None` unless `images` is a bijection of `0..n`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Permutation(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `(self . other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s] = i;
        }
        Permutation(inv)
    }

    /// Permutes a list of items: `out[i] = items[s(i)]`.
    pub fn permute<T: Clone>(&self, items: &[T]) -> Vec<T> {
        self.0.iter().map(|&i| items[i].clone()).collect()
    }

    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation(cur.clone()));
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

fn swap_sign(a: i32, b: i32) -> i32 {
    if (a * b).rem_euclid(2) == 1 {
        -1
    } else {
        1
    }
}

/// Koszul sign of rearranging `(v_0, ..., v_{n-1})` with the given degrees into
/// `(v_{s(0)}, ..., v_{s(n-1)})`, computed by adjacent transpositions (bubble sort).
pub fn koszul_sign(s: &Permutation, degrees: &[i32]) -> i32 {
    assert_eq!(s.len(), degrees.len(), "permutation and degree list differ in length");
    let mut seq: Vec<usize> = s.images().to_vec();
    let mut sign = 1;
    let n = seq.len();
    for pass in 0..n {
        for j in 0..n.saturating_sub(1 + pass) {
            if seq[j] > seq[j + 1] {
                sign *= swap_sign(degrees[seq[j]], degrees[seq[j + 1]]);
                seq.swap(j, j + 1);
            }
        }
    }
    sign
}

/// Koszul sign of bringing the elements at `positions` (increasing) to the front,
/// keeping the relative order within both blocks.
pub fn block_to_front_sign(positions: &[usize], degrees: &[i32]) -> i32 {
    let mut sign = 1;
    let mut chosen = vec![false; degrees.len()];
    for &p in positions {
        chosen[p] = true;
    }
    for &p in positions {
        for k in 0..p {
            if !chosen[k] {
                sign *= swap_sign(degrees[p], degrees[k]);
            }
        }
    }
    sign
}

/// `(i, j)`-unshuffles: permutations `s` of `0..i+j` with `s(0) < ... < s(i-1)` and
/// `s(i) < ... < s(i+j-1)`, in lexicographic order of the first block.
pub fn unshuffles(i: usize, j: usize) -> Vec<Permutation> {
    let n = i + j;
    subsets(n, i)
        .into_iter()
        .map(|first| {
            let mut images = first.clone();
            images.extend((0..n).filter(|k| !first.contains(k)));
            Permutation(images)
        })
        .collect()
}

/// All increasing `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
