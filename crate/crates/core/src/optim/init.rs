use crate::error::{Error, Result};
use crate::numcore::{rng_normal, Matrix, Rng};

/// Kaiming (He) normal: i.i.d. `N(0, 2 / fan_in)`.
pub fn kaiming_normal(rng: &mut Rng, fan_in: usize, rows: usize, cols: usize) -> Result<Matrix> {
    if fan_in == 0 {
        return Err(Error::Param("kaiming_normal needs fan_in >= 1".into()));
    }
    let std = (2.0 / fan_in as f64).sqrt();
    rng_normal(rng, 0.0, std, rows, cols)
}
