//! Deterministic primality for the full signed 64-bit range.

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Miller-Rabin with the first twelve prime bases, exact for every `u64`.
pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    for p in SMALL_PRIMES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `n` is prime and so is `n - 2` or `n + 2`.
pub fn is_twin_prime(n: i64) -> bool {
    is_prime(n) && (is_prime(n - 2) || n.checked_add(2).is_some_and(is_prime))
}

/// Smallest twin prime strictly greater than `n`, if one fits in `i64`.
pub fn next_twin_prime_above(n: i64) -> Option<i64> {
    let mut k = n.max(1).checked_add(1)?;
    loop {
        if is_twin_prime(k) {
            return Some(k);
        }
        k = k.checked_add(1)?;
    }
}
