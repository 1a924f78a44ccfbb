/// All `m`-bit templates that cannot overlap a shifted copy of themselves,
/// in increasing numeric order (first bit most significant).
pub fn aperiodic_templates(m: usize) -> Vec<Vec<u8>> {
    assert!((1..=20).contains(&m));
    (0u32..1 << m)
        .map(|v| (0..m).rev().map(|i| ((v >> i) & 1) as u8).collect::<Vec<u8>>())
        .filter(|t| (1..m).all(|shift| t[shift..] != t[..m - shift]))
        .collect()
}

/// Numeric value of a template, first bit most significant.
pub(crate) fn template_value(t: &[u8]) -> usize {
    t.iter().fold(0, |v, &b| (v << 1) | b as usize)
}
