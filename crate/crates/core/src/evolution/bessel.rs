//! Bessel functions of the first kind and integer order.

/// `J_0(x), …, J_{max_order}(x)` by Miller's downward recurrence, normalised
/// with `J_0 + 2 Σ_k J_{2k} = 1`. Accurate to rounding for every order,
/// including orders far beyond `|x|` where the values underflow gracefully.
pub fn bessel_j_orders(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let reach = (max_order as f64).max(ax);
    let mut start = (reach + 40.0 + 12.0 * ax.cbrt()).ceil() as usize;
    start += start % 2;

    let mut values = vec![0.0; start + 2];
    values[start] = 1e-300;
    for k in (1..=start).rev() {
        let next = 2.0 * k as f64 / ax * values[k] - values[k + 1];
        values[k - 1] = next;
        if next.abs() > 1e250 {
            for v in values[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = values[0] + 2.0 * values.iter().skip(2).step_by(2).sum::<f64>();
    for (k, o) in out.iter_mut().enumerate() {
        let mut v = values[k] / norm;
        if x < 0.0 && k % 2 == 1 {
            v = -v;
        }
        *o = v;
    }
    out
}

/// `J_n(x)` for any integer order.
pub fn bessel_j(order: i64, x: f64) -> f64 {
    let k = order.unsigned_abs() as usize;
    let v = bessel_j_orders(k, x)[k];
    if order < 0 && k % 2 == 1 {
        -v
    } else {
        v
    }
}
