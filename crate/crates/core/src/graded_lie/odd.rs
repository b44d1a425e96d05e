//! Monomials in odd generators, stored as bitmasks in increasing generator order.

pub type Mask = u64;

pub fn bit(i: usize) -> Mask {
    1 << i
}

pub fn count(m: Mask) -> i32 {
    m.count_ones() as i32
}

fn parity(n: u32) -> i32 {
    if n % 2 == 1 {
        -1
    } else {
        1
    }
}

/// `x_a * x_b = sign * x_{a|b}`, or `None` when a generator repeats.
pub fn mul(a: Mask, b: Mask) -> Option<(i32, Mask)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 63 { 0 } else { a & !((1u64 << (j + 1)) - 1) };
        swaps += above.count_ones();
    }
    Some((parity(swaps), a | b))
}

/// Left derivative by generator `j`.
pub fn left_deriv(j: usize, m: Mask) -> Option<(i32, Mask)> {
    if m & bit(j) == 0 {
        return None;
    }
    let below = m & (bit(j) - 1);
    Some((parity(below.count_ones()), m & !bit(j)))
}

/// Right derivative by generator `j`.
pub fn right_deriv(j: usize, m: Mask) -> Option<(i32, Mask)> {
    if m & bit(j) == 0 {
        return None;
    }
    let above = m & !(bit(j) | (bit(j) - 1));
    Some((parity(above.count_ones()), m & !bit(j)))
}

pub fn indices(m: Mask) -> Vec<usize> {
    (0..64).filter(|&i| m & bit(i) != 0).collect()
}

/// All masks over `n` generators with exactly `k` bits set.
pub fn masks_with(n: usize, k: usize) -> Vec<Mask> {
    crate::graded_core::subsets(n, k).into_iter().map(|s| s.into_iter().fold(0, |m, i| m | bit(i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_anticommute() {
        assert_eq!(mul(bit(0), bit(1)), Some((1, 3)));
        assert_eq!(mul(bit(1), bit(0)), Some((-1, 3)));
        assert_eq!(mul(bit(0), bit(0)), None);
    }

    #[test]
    fn derivatives_on_a_cubic_monomial() {
        let m = bit(0) | bit(1) | bit(2);
        assert_eq!(left_deriv(1, m), Some((-1, bit(0) | bit(2))));
        assert_eq!(right_deriv(1, m), Some((-1, bit(0) | bit(2))));
        assert_eq!(right_deriv(2, m), Some((1, bit(0) | bit(1))));
        assert_eq!(left_deriv(2, m), Some((1, bit(0) | bit(1))));
    }
}
