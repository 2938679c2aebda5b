//! Reflected binary Gray codes and the hypercube edge predicate.

use super::GraphError;

/// Gray code of `i`: `i ^ (i >> 1)`.
pub fn gray_code(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// Inverse of [`gray_code`]: recovers `i` from its Gray code by prefix XOR.
pub fn gray_rank(code: u64) -> u64 {
    let mut b = code;
    b ^= b >> 1;
    b ^= b >> 2;
    b ^= b >> 4;
    b ^= b >> 8;
    b ^= b >> 16;
    b ^= b >> 32;
    b
}

/// True iff the Gray codes of `i` and `j` differ in exactly one bit, i.e.
/// `{i, j}` is an edge of the Gray-relabelled hypercube on `n = 2^N` vertices.
pub fn is_gray_edge(i: usize, j: usize, n: usize) -> Result<bool, GraphError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(GraphError::NotPowerOfTwo { what: "gray hypercube order", n });
    }
    if i >= n || j >= n {
        return Err(GraphError::PairOutOfRange { i, j, n });
    }
    if i == j {
        return Err(GraphError::DegeneratePair(i));
    }
    let diff = gray_code(i as u64) ^ gray_code(j as u64);
    Ok(diff.is_power_of_two())
}
