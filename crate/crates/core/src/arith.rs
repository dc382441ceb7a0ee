//! Small integer helpers shared by the group modules.
//!
//! Orders and moduli are `u64` with `0` standing for the infinite cyclic
//! group (so `Z_0 = Z`); coefficients are `i64`.

use num_integer::Integer;

/// `gcd` with the convention `gcd(0, k) = k`.
pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    gcd(gcd(a, b), c)
}

/// `lcm` with `lcm(0, k) = 0`.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a.lcm(&b)
    }
}

/// Canonical representative of `c` in `Z_n`; the identity when `n = 0`.
pub fn reduce(c: i64, n: u64) -> i64 {
    if n == 0 {
        c
    } else {
        c.rem_euclid(n as i64)
    }
}

pub fn reduce_wide(c: i128, n: u64) -> i64 {
    if n == 0 {
        i64::try_from(c).expect("integer coefficient overflow")
    } else {
        c.rem_euclid(n as i128) as i64
    }
}

/// Order of the dual generator `e_i*` in `Hom(Z_{n_i}, Z_n)`.
///
/// For `n > 0` this is `gcd(n, n_i)`. For `n = 0` the dual of a torsion
/// generator is trivial and the dual of a free generator is free.
pub fn dual_order(n: u64, ni: u64) -> u64 {
    if n > 0 {
        gcd(n, ni)
    } else if ni == 0 {
        0
    } else {
        1
    }
}

/// The value `<e_i*, e_i>` as an integer: `n / gcd(n, n_i)` for `n > 0`,
/// and `1` or `0` for a free or torsion generator when `n = 0`.
pub fn unit_pairing(n: u64, ni: u64) -> u64 {
    if n > 0 {
        n / gcd(n, ni)
    } else if ni == 0 {
        1
    } else {
        0
    }
}

/// Positive divisors of `n > 0`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0, "divisors of zero requested");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Sign of the permutation sorting `t`, together with the sorted triple.
pub fn sort_triple(t: [usize; 3]) -> (i64, [usize; 3]) {
    let mut s = t;
    let mut sign = 1;
    for i in 0..3 {
        for j in 0..2 - i {
            if s[j] > s[j + 1] {
                s.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    (sign, s)
}

pub fn det3(m: [[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_conventions() {
        assert_eq!(gcd(0, 6), 6);
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(lcm(0, 4), 0);
        assert_eq!(dual_order(0, 3), 1);
        assert_eq!(dual_order(0, 0), 0);
        assert_eq!(unit_pairing(4, 0), 1);
        assert_eq!(unit_pairing(4, 2), 2);
        assert_eq!(unit_pairing(0, 5), 0);
    }

    #[test]
    fn divisors_ascending() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(16), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn triple_sorting_sign() {
        assert_eq!(sort_triple([0, 1, 2]), (1, [0, 1, 2]));
        assert_eq!(sort_triple([1, 0, 2]), (-1, [0, 1, 2]));
        assert_eq!(sort_triple([2, 0, 1]), (1, [0, 1, 2]));
        assert_eq!(sort_triple([2, 1, 0]), (-1, [0, 1, 2]));
    }
}
