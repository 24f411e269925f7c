//! Shared fixtures for the integration suites: the reference per-term
//! decomposition tables, frozen as data, plus comparison helpers.
//!
//! Basis indices are 1-based into the 16-element one-qubit basis, leftmost
//! index = most significant qubit, matching `QuasiDecomposition::terms`.
//! Index key: 1 I, 2 X, 3 Y, 4 Z, 5 RX, 6 RY, 7 RZ, 8 RYZ, 9 RZX, 10 RXY,
//! 11 piX, 12 piY, 13 piZ, 14 piYZ, 15 piZX, 16 piXY.

/// The reference 12-term CNOT decomposition (γ = 9).
pub fn printed_cnot_terms() -> Vec<(f64, Vec<u8>)> {
    vec![
        (0.5, vec![1, 2]),
        (-0.5, vec![1, 5]),
        (1.0, vec![1, 11]),
        (0.5, vec![4, 1]),
        (1.0, vec![4, 2]),
        (-0.5, vec![4, 5]),
        (-1.0, vec![4, 11]),
        (-0.5, vec![7, 1]),
        (-0.5, vec![7, 2]),
        (1.0, vec![7, 5]),
        (1.0, vec![13, 1]),
        (-1.0, vec![13, 2]),
    ]
}

/// The reference 59-term Toffoli decomposition (γ = 37).
pub fn printed_toffoli_terms() -> Vec<(f64, Vec<u8>)> {
    vec![
        (0.75, vec![1, 7, 5]),
        (0.75, vec![7, 1, 5]),
        (0.5, vec![1, 13, 5]),
        (0.5, vec![13, 1, 5]),
        (-0.5, vec![1, 4, 5]),
        (-0.5, vec![4, 1, 5]),
        (-0.75, vec![1, 1, 5]),
        (0.5, vec![1, 7, 11]),
        (0.5, vec![7, 1, 11]),
        (0.5, vec![7, 13, 1]),
        (0.5, vec![13, 7, 1]),
        (-0.5, vec![1, 7, 2]),
        (-0.5, vec![7, 1, 2]),
        (-0.5, vec![7, 4, 1]),
        (-0.5, vec![4, 7, 1]),
        (-0.75, vec![1, 7, 1]),
        (-0.75, vec![7, 1, 1]),
        (0.75, vec![7, 7, 1]),
        (-1.0, vec![1, 13, 11]),
        (-1.0, vec![13, 1, 11]),
        (1.0, vec![1, 1, 11]),
        (1.0, vec![1, 13, 1]),
        (1.0, vec![13, 1, 1]),
        (-1.0, vec![13, 13, 1]),
        (-0.5, vec![1, 13, 2]),
        (-0.5, vec![13, 1, 2]),
        (0.625, vec![1, 4, 2]),
        (0.625, vec![4, 1, 2]),
        (0.375, vec![1, 1, 2]),
        (-0.5, vec![1, 4, 11]),
        (-0.5, vec![4, 1, 11]),
        (-0.5, vec![4, 13, 1]),
        (-0.5, vec![13, 4, 1]),
        (0.375, vec![1, 4, 1]),
        (0.375, vec![4, 1, 1]),
        (0.625, vec![4, 4, 1]),
        (0.375, vec![1, 1, 1]),
        (-1.0, vec![7, 13, 5]),
        (-1.0, vec![13, 7, 5]),
        (0.25, vec![7, 4, 5]),
        (0.25, vec![4, 7, 5]),
        (0.5, vec![4, 13, 5]),
        (0.5, vec![13, 4, 5]),
        (-0.25, vec![4, 4, 5]),
        (-1.0, vec![7, 7, 11]),
        (0.5, vec![7, 13, 2]),
        (0.5, vec![13, 7, 2]),
        (-0.25, vec![7, 4, 2]),
        (-0.25, vec![4, 7, 2]),
        (0.25, vec![7, 7, 2]),
        (0.5, vec![7, 4, 11]),
        (0.5, vec![4, 7, 11]),
        (1.0, vec![13, 13, 2]),
        (-1.0, vec![4, 13, 2]),
        (-1.0, vec![13, 4, 2]),
        (0.625, vec![4, 4, 2]),
        (1.0, vec![4, 13, 11]),
        (1.0, vec![13, 4, 11]),
        (-1.0, vec![4, 4, 11]),
    ]
}

/// Terms sorted by basis indices, for order-independent comparison.
pub fn sorted_terms(terms: &[(f64, Vec<u8>)]) -> Vec<(f64, Vec<u8>)> {
    let mut sorted = terms.to_vec();
    sorted.sort_by(|a, b| a.1.cmp(&b.1));
    sorted
}

/// Asserts two term lists agree term-for-term up to ordering, with
/// coefficients within `tol`.
pub fn assert_terms_match(actual: &[(f64, Vec<u8>)], expected: &[(f64, Vec<u8>)], tol: f64) {
    let actual = sorted_terms(actual);
    let expected = sorted_terms(expected);
    assert_eq!(
        actual.len(),
        expected.len(),
        "term count {} != {}",
        actual.len(),
        expected.len()
    );
    for ((ca, ia), (ce, ie)) in actual.iter().zip(expected.iter()) {
        assert_eq!(ia, ie, "basis index mismatch");
        assert!(
            (ca - ce).abs() <= tol,
            "coefficient {ca} != {ce} at indices {ia:?}"
        );
    }
}
