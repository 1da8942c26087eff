use std::fmt;

/// Shortest round-trip decimal for an `f64`, switching to exponent form for
/// very small or very large magnitudes so files stay readable.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Real(pub f64);

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.0;
        let a = x.abs();
        if x.is_finite() && a != 0.0 && !(1e-4..1e16).contains(&a) {
            write!(f, "{x:e}")
        } else {
            write!(f, "{x}")
        }
    }
}
