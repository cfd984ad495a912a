use crate::error::{Error, Result};

/// Jensen-Shannon divergence in bits. Terms with zero mass contribute 0.
pub fn jsd(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let m = 0.5 * (a + b);
        if a > 0.0 {
            acc += a * (a / m).log2();
        }
        if b > 0.0 {
            acc += b * (b / m).log2();
        }
    }
    Ok((0.5 * acc).clamp(0.0, 1.0))
}
