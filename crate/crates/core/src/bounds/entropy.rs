use crate::roots::bisect;
use crate::{Error, Result};

/// Binary entropy in bits, with `h2(0) = h2(1) = 0`.
pub fn h2(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "h2 argument must lie in [0, 1], got {x}"
        )));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-(x * x.log2() + (1.0 - x) * (-x).ln_1p() / std::f64::consts::LN_2))
}

/// The preimage of `y` under `h2` in `[0, 1/2]`.
pub fn h2_inverse(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::InvalidArgument(format!(
            "h2_inverse argument must lie in [0, 1], got {y}"
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    let b = bisect(|x| Ok(h2(x)? - y), 0.0, 0.5, 1e-16, 200)?;
    Ok(b.midpoint())
}
