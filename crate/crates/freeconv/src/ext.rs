//! Extended-real values for singular integrals.
//!
//! Divergent integrals are first-class `+inf` values (the classification
//! inequalities compare products that may legitimately be infinite), and
//! integrals whose convergence cannot be decided from the measure metadata
//! (sampled-table pieces) are `Undecided`. The indeterminate product
//! `0 * inf` stays `Undecided`; it is never silently resolved.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PlusInf,
    MinusInf,
    Undecided,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_plus_inf(self) -> bool {
        matches!(self, ExtReal::PlusInf)
    }

    pub fn is_undecided(self) -> bool {
        matches!(self, ExtReal::Undecided)
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// True when the value is known and `<= bound`; false when known and
    /// greater; `None` when undecided.
    pub fn known_le(self, bound: f64) -> Option<bool> {
        match self {
            ExtReal::Finite(v) => Some(v <= bound),
            ExtReal::PlusInf => Some(false),
            ExtReal::MinusInf => Some(true),
            ExtReal::Undecided => None,
        }
    }

    pub fn add(self, rhs: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, rhs) {
            (Undecided, _) | (_, Undecided) => Undecided,
            (Finite(a), Finite(b)) => Finite(a + b),
            (PlusInf, MinusInf) | (MinusInf, PlusInf) => Undecided,
            (PlusInf, _) | (_, PlusInf) => PlusInf,
            (MinusInf, _) | (_, MinusInf) => MinusInf,
        }
    }

    /// Product with sign rules; `0 * inf` is `Undecided`.
    pub fn mul(self, rhs: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, rhs) {
            (Undecided, _) | (_, Undecided) => Undecided,
            (Finite(a), Finite(b)) => Finite(a * b),
            (Finite(a), inf) | (inf, Finite(a)) => {
                if a == 0.0 {
                    Undecided
                } else {
                    let pos = matches!(inf, PlusInf) == (a > 0.0);
                    if pos {
                        PlusInf
                    } else {
                        MinusInf
                    }
                }
            }
            (PlusInf, PlusInf) | (MinusInf, MinusInf) => PlusInf,
            _ => MinusInf,
        }
    }

    pub fn scale(self, c: f64) -> ExtReal {
        self.mul(ExtReal::Finite(c))
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::Finite(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PlusInf => write!(f, "inf"),
            ExtReal::MinusInf => write!(f, "-inf"),
            ExtReal::Undecided => write!(f, "undecided"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::ExtReal::*;

    #[test]
    fn products_follow_sign_rules() {
        assert_eq!(Finite(2.0).mul(PlusInf), PlusInf);
        assert_eq!(Finite(-2.0).mul(PlusInf), MinusInf);
        assert_eq!(PlusInf.mul(MinusInf), MinusInf);
        assert_eq!(Finite(3.0).mul(Finite(4.0)), Finite(12.0));
    }

    #[test]
    fn zero_times_infinity_is_undecided() {
        assert_eq!(Finite(0.0).mul(PlusInf), Undecided);
        assert_eq!(MinusInf.mul(Finite(0.0)), Undecided);
    }

    #[test]
    fn opposite_infinities_do_not_cancel() {
        assert_eq!(PlusInf.add(MinusInf), Undecided);
        assert_eq!(PlusInf.add(Finite(1.0)), PlusInf);
    }

    #[test]
    fn comparisons_propagate_unknowns() {
        assert_eq!(Finite(0.5).known_le(1.0), Some(true));
        assert_eq!(PlusInf.known_le(1.0), Some(false));
        assert_eq!(Undecided.known_le(1.0), None);
    }
}
