//! Vertical-limit extrapolation.
//!
//! Boundary values of analytic transforms are taken along `x + i*eps` with
//! `eps_j = 1e-2 * 2^{-j}`, `j = 0..=20`, accelerated by Aitken's delta
//! squared (which handles an unknown power-law approach rate). A limit is
//! accepted once three successive accelerated values agree within `1e-9`
//! (absolute, with a matching relative allowance); monotone growth past a
//! cap, or increments that refuse to shrink while the values climb, is
//! reported as divergence to infinity rather than as a value.

use num_complex::Complex64;

pub const EPS_BASE: f64 = 1e-2;
pub const LEVELS: usize = 21;
pub const AGREE_TOL: f64 = 1e-9;
const DIVERGENCE_CAP: f64 = 1e10;

/// Values that the limit machinery can accelerate.
pub trait LimitValue: Copy {
    fn dist(self, rhs: Self) -> f64;
    fn magnitude(self) -> f64;
    fn aitken(v0: Self, v1: Self, v2: Self) -> Option<Self>;
}

impl LimitValue for f64 {
    fn dist(self, rhs: Self) -> f64 {
        (self - rhs).abs()
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn aitken(v0: Self, v1: Self, v2: Self) -> Option<Self> {
        let d1 = v1 - v0;
        let d2 = v2 - v1;
        let den = d2 - d1;
        if den.abs() < 1e-300 {
            return None;
        }
        let acc = v2 - d2 * d2 / den;
        acc.is_finite().then_some(acc)
    }
}

impl LimitValue for Complex64 {
    fn dist(self, rhs: Self) -> f64 {
        (self - rhs).norm()
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn aitken(v0: Self, v1: Self, v2: Self) -> Option<Self> {
        let d1 = v1 - v0;
        let d2 = v2 - v1;
        let den = d2 - d1;
        if den.norm() < 1e-300 {
            return None;
        }
        let acc = v2 - d2 * d2 / den;
        (acc.re.is_finite() && acc.im.is_finite()).then_some(acc)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Extrapolated<T> {
    pub value: T,
    /// Spread of the last accepted accelerated values; a usable error bound.
    pub error: f64,
}

#[derive(Clone, Copy, Debug)]
pub enum VerticalLimit<T> {
    Converged(Extrapolated<T>),
    /// Certified growth without a finite limit along the ladder.
    Diverging,
    /// Neither settled nor certifiably divergent by the last level.
    Stalled { last: T, last_increment: f64 },
}

impl<T: Copy> VerticalLimit<T> {
    pub fn converged(self) -> Option<Extrapolated<T>> {
        match self {
            VerticalLimit::Converged(e) => Some(e),
            _ => None,
        }
    }
}

/// Extrapolate `eval(eps) -> value` as `eps` decreases dyadically to zero.
pub fn vertical_limit<T, F>(mut eval: F) -> VerticalLimit<T>
where
    T: LimitValue,
    F: FnMut(f64) -> T,
{
    let mut raw: Vec<T> = Vec::with_capacity(LEVELS);
    let mut accelerated: Vec<T> = Vec::new();
    let mut growing_steps = 0usize;
    for j in 0..LEVELS {
        let eps = EPS_BASE * 0.5f64.powi(j as i32);
        let v = eval(eps);
        if v.magnitude() > DIVERGENCE_CAP {
            return VerticalLimit::Diverging;
        }
        raw.push(v);
        let n = raw.len();
        if n >= 3 {
            if let Some(acc) = T::aitken(raw[n - 3], raw[n - 2], raw[n - 1]) {
                accelerated.push(acc);
            }
            let d_prev = raw[n - 2].dist(raw[n - 3]);
            let d_last = raw[n - 1].dist(raw[n - 2]);
            let flat = 0.5 * AGREE_TOL * (1.0 + raw[n - 1].magnitude());
            if d_last <= flat && d_prev <= flat {
                return VerticalLimit::Converged(Extrapolated {
                    value: raw[n - 1],
                    error: d_last.max(d_prev).max(1e-15),
                });
            }
            if d_last > 0.75 * d_prev && d_last > AGREE_TOL {
                growing_steps += 1;
            } else {
                growing_steps = 0;
            }
            if growing_steps >= 6 && raw[n - 1].magnitude() > 1e4 {
                return VerticalLimit::Diverging;
            }
        }
        let m = accelerated.len();
        if m >= 3 {
            // Pure geometric growth telescopes Aitken to a spurious constant,
            // so acceleration is only trusted while raw increments shrink.
            let d_prev = raw[n - 2].dist(raw[n - 3]);
            let d_last = raw[n - 1].dist(raw[n - 2]);
            let raw_not_growing = d_last <= d_prev * 1.001 + AGREE_TOL;
            let a = accelerated[m - 3];
            let b = accelerated[m - 2];
            let c = accelerated[m - 1];
            let tol = AGREE_TOL * (1.0 + c.magnitude());
            let spread = a.dist(b).max(b.dist(c));
            if raw_not_growing && spread <= tol {
                return VerticalLimit::Converged(Extrapolated {
                    value: c,
                    error: spread.max(1e-15 * (1.0 + c.magnitude())),
                });
            }
        }
    }
    // Raw sequence may still have settled without acceleration help.
    let n = raw.len();
    let d_last = raw[n - 1].dist(raw[n - 2]);
    if d_last <= AGREE_TOL * (1.0 + raw[n - 1].magnitude()) {
        return VerticalLimit::Converged(Extrapolated {
            value: raw[n - 1],
            error: d_last.max(1e-15),
        });
    }
    VerticalLimit::Stalled {
        last: raw[n - 1],
        last_increment: d_last,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_approach_converges() {
        // v(eps) = 3 - 2 eps^2.
        let lim = vertical_limit(|eps| 3.0 - 2.0 * eps * eps);
        let e = lim.converged().expect("should converge");
        assert!((e.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn fractional_power_approach_converges() {
        // v(eps) = 1 + eps^0.5: Aitken handles the unknown exponent.
        let lim = vertical_limit(|eps: f64| 1.0 + eps.sqrt());
        let e = lim.converged().expect("should converge");
        assert!((e.value - 1.0).abs() < 1e-7, "value {}", e.value);
    }

    #[test]
    fn reciprocal_growth_is_divergent() {
        let lim = vertical_limit(|eps| 1.0 / eps);
        assert!(matches!(lim, VerticalLimit::Diverging));
    }

    #[test]
    fn logarithmic_growth_is_not_reported_as_a_value() {
        let lim = vertical_limit(|eps: f64| -eps.ln());
        assert!(!matches!(lim, VerticalLimit::Converged(_)));
    }

    #[test]
    fn complex_limits_work() {
        let lim = vertical_limit(|eps| Complex64::new(1.0 - eps, 2.0 + eps * eps));
        let e = lim.converged().expect("should converge");
        assert!((e.value - Complex64::new(1.0, 2.0)).norm() < 1e-8);
    }
}
