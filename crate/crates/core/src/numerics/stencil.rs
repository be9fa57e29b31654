//! Finite-difference derivatives from three neighbouring samples on a
//! nonuniform grid.

/// `u'(x[2])` from samples at `x[0] < x[1] < x[2]`; second-order accurate.
pub fn right_first_derivative(x: [f64; 3], y: [f64; 3]) -> f64 {
    let h0 = x[1] - x[0];
    let h1 = x[2] - x[1];
    y[0] * h1 / (h0 * (h0 + h1)) - y[1] * (h0 + h1) / (h0 * h1)
        + y[2] * (2.0 * h1 + h0) / (h1 * (h0 + h1))
}

/// `u''` from the quadratic through three samples; second-order at the
/// middle point, first-order at either end.
pub fn second_derivative(x: [f64; 3], y: [f64; 3]) -> f64 {
    let h0 = x[1] - x[0];
    let h1 = x[2] - x[1];
    2.0 * (y[0] / (h0 * (h0 + h1)) - y[1] / (h0 * h1) + y[2] / (h1 * (h0 + h1)))
}

/// `u'(x[1])` from samples at `x[0] < x[1] < x[2]`; second-order accurate.
pub fn central_first_derivative(x: [f64; 3], y: [f64; 3]) -> f64 {
    let h0 = x[1] - x[0];
    let h1 = x[2] - x[1];
    (-y[0] * h1 * h1 + y[1] * (h1 * h1 - h0 * h0) + y[2] * h0 * h0) / (h0 * h1 * (h0 + h1))
}
