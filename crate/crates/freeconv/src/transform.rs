//! Voiculescu-transform descriptors for freely infinitely divisible laws.
//!
//! A law `mu` enters the engine through its transform `phi_mu`, given either
//! by a shift-plus-measure pair (the general integral representation) or by
//! one of the closed-form families (stable, Cauchy-type). All descriptors
//! support pointwise evaluation on the upper half-plane, differentiation,
//! and the positive semigroup rescaling `phi -> t phi`.

use num_complex::Complex64;

use crate::ext::ExtReal;
use crate::measure::MeasureRep;
use crate::{Error, Result};

/// Shift `gamma` plus finite nonnegative measure `sigma` representing
/// `phi(w) = gamma + int (1 + s w)/(w - s) dsigma(s)`.
#[derive(Clone, Debug)]
pub struct LevyTriple {
    pub shift: f64,
    pub levy_measure: MeasureRep,
}

impl LevyTriple {
    pub fn new(shift: f64, levy_measure: MeasureRep) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::InvalidDescriptor("shift must be finite".into()));
        }
        Ok(LevyTriple {
            shift,
            levy_measure,
        })
    }

    /// `phi(w)` via the mass/transform reduction
    /// `gamma - w sigma(R) + (1 + w^2) G_sigma(w)`.
    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        let g = self.levy_measure.cauchy_transform(w)?;
        let mass = self.levy_measure.total_mass();
        Ok(self.shift - w * mass + (1.0 + w * w) * g)
    }

    pub fn eval_prime(&self, w: Complex64) -> Result<Complex64> {
        let g = self.levy_measure.cauchy_transform(w)?;
        let gp = self.levy_measure.cauchy_transform_prime(w)?;
        let mass = self.levy_measure.total_mass();
        Ok(-mass + 2.0 * w * g + (1.0 + w * w) * gp)
    }

    /// Absolutely convergent boundary value `phi(x)` at a real point
    /// outside the closed support of `sigma` (or where the density vanishes
    /// fast enough).
    pub fn phi_real_boundary(&self, x: f64) -> ExtReal {
        let mass = self.levy_measure.total_mass();
        self.levy_measure
            .linear_singular_integral(x)
            .scale(1.0 + x * x)
            .add(ExtReal::Finite(self.shift - x * mass))
    }
}

/// Transform of a freely infinitely divisible law.
#[derive(Clone, Debug)]
pub enum PhiDescriptor {
    /// General integral representation.
    LevyHincin(LevyTriple),
    /// Strictly stable family: index in (0,1) u (1,2], asymmetry in [-1,1],
    /// positive semigroup weight.
    Stable {
        index: f64,
        asymmetry: f64,
        scale: f64,
    },
    /// Constant transform `shift - i scale`: Cauchy-type smoothing.
    Cauchy { scale: f64, shift: f64 },
}

/// Location and mass of the zero of the reciprocal Cauchy transform of
/// `mu` on the real line, when it exists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FTransformZero {
    pub location: f64,
    /// `mu({location})`; zero means the reciprocal transform vanishes
    /// without carrying an atom.
    pub mass: f64,
}

/// Probe grid for the half-plane direction check at construction.
const NEVANLINNA_PROBES: [(f64, f64); 6] = [
    (0.0, 1.0),
    (0.0, 3.0),
    (2.0, 0.5),
    (-2.0, 0.5),
    (0.7, 0.05),
    (-5.0, 2.0),
];

impl PhiDescriptor {
    pub fn levy_hincin(shift: f64, levy_measure: MeasureRep) -> Result<Self> {
        let d = PhiDescriptor::LevyHincin(LevyTriple::new(shift, levy_measure)?);
        d.check_direction()?;
        Ok(d)
    }

    pub fn stable(index: f64, asymmetry: f64) -> Result<Self> {
        if !(index > 0.0 && index <= 2.0) {
            return Err(Error::InvalidDescriptor(
                "stable index must lie in (0, 2]".into(),
            ));
        }
        if !(-1.0..=1.0).contains(&asymmetry) {
            return Err(Error::InvalidDescriptor(
                "stable asymmetry must lie in [-1, 1]".into(),
            ));
        }
        let d = PhiDescriptor::Stable {
            index,
            asymmetry,
            scale: 1.0,
        };
        d.check_direction()?;
        Ok(d)
    }

    pub fn cauchy(scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidDescriptor(
                "cauchy transform needs a positive scale and finite shift".into(),
            ));
        }
        Ok(PhiDescriptor::Cauchy { scale, shift })
    }

    fn check_direction(&self) -> Result<()> {
        for &(x, y) in &NEVANLINNA_PROBES {
            let w = Complex64::new(x, y);
            let v = self.eval(w)?;
            if !v.is_finite() {
                return Err(Error::InvalidDescriptor(format!(
                    "transform is not finite at probe {w}"
                )));
            }
            if v.im > 1e-9 * (1.0 + v.norm()) {
                return Err(Error::InvalidDescriptor(format!(
                    "transform leaves the lower half-plane at probe {w} (Im = {})",
                    v.im
                )));
            }
        }
        Ok(())
    }

    /// `phi(w)` for `Im w > 0`.
    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        if !(w.im > 0.0) {
            return Err(Error::UpperHalfPlaneRequired);
        }
        match self {
            PhiDescriptor::LevyHincin(t) => t.eval(w),
            PhiDescriptor::Stable {
                index,
                asymmetry,
                scale,
            } => Ok(*scale * stable_phi(*index, *asymmetry, w)),
            PhiDescriptor::Cauchy { scale, shift } => {
                Ok(Complex64::new(*shift, -*scale))
            }
        }
    }

    /// `phi'(w)` for `Im w > 0`.
    pub fn eval_prime(&self, w: Complex64) -> Result<Complex64> {
        if !(w.im > 0.0) {
            return Err(Error::UpperHalfPlaneRequired);
        }
        match self {
            PhiDescriptor::LevyHincin(t) => t.eval_prime(w),
            PhiDescriptor::Stable {
                index,
                asymmetry,
                scale,
            } => Ok(*scale * stable_phi_prime(*index, *asymmetry, w)),
            PhiDescriptor::Cauchy { .. } => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// The semigroup element `t * phi` for `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidDescriptor(
                "semigroup parameter must be positive and finite".into(),
            ));
        }
        Ok(match self {
            PhiDescriptor::LevyHincin(tr) => PhiDescriptor::LevyHincin(LevyTriple {
                shift: tr.shift * t,
                levy_measure: tr.levy_measure.scaled(t),
            }),
            PhiDescriptor::Stable {
                index,
                asymmetry,
                scale,
            } => PhiDescriptor::Stable {
                index: *index,
                asymmetry: *asymmetry,
                scale: scale * t,
            },
            PhiDescriptor::Cauchy { scale, shift } => PhiDescriptor::Cauchy {
                scale: scale * t,
                shift: shift * t,
            },
        })
    }

    /// Integral-representation data, when this descriptor has a finitely
    /// representable one.
    pub fn levy_triple(&self) -> Option<&LevyTriple> {
        match self {
            PhiDescriptor::LevyHincin(t) => Some(t),
            _ => None,
        }
    }

    /// Variance of the represented law.
    pub fn variance(&self) -> ExtReal {
        match self {
            PhiDescriptor::LevyHincin(t) => ExtReal::Finite(t.levy_measure.total_mass())
                .add(t.levy_measure.moment(2)),
            PhiDescriptor::Stable { index, scale, .. } => {
                if *index == 2.0 {
                    ExtReal::Finite(*scale)
                } else {
                    ExtReal::PlusInf
                }
            }
            PhiDescriptor::Cauchy { .. } => ExtReal::PlusInf,
        }
    }

    /// Zero of the reciprocal Cauchy transform of the represented law on
    /// the real line. `Ok(None)` means provably absent; sampled data that
    /// cannot decide yields an error.
    pub fn f_transform_zero(&self) -> Result<Option<FTransformZero>> {
        match self {
            PhiDescriptor::LevyHincin(t) => {
                let g0 = t.levy_measure.weighted_quadratic_integral(0.0);
                match g0.known_le(1.0) {
                    Some(false) => Ok(None),
                    Some(true) => {
                        let g0 = g0.as_finite().expect("known finite when <= 1");
                        let lin = match t.levy_measure.linear_singular_integral(0.0) {
                            ExtReal::Finite(v) => v,
                            other => {
                                return Err(Error::Undecided(format!(
                                    "linear singular integral at 0 is {other}"
                                )))
                            }
                        };
                        Ok(Some(FTransformZero {
                            location: t.shift + lin,
                            mass: 1.0 - g0,
                        }))
                    }
                    None => Err(Error::Undecided(
                        "sampled transform data cannot bound the quadratic integral at 0".into(),
                    )),
                }
            }
            // Stable and Cauchy-type laws are atomless with unbounded
            // reciprocal-transform modulus: no real zero.
            PhiDescriptor::Stable { .. } | PhiDescriptor::Cauchy { .. } => Ok(None),
        }
    }
}

/// Closed-form stable transform, semigroup weight 1.
fn stable_phi(a: f64, theta: f64, z: Complex64) -> Complex64 {
    if a == 2.0 {
        return 1.0 / z;
    }
    if a == 1.0 {
        return 2.0 * theta * z.ln()
            - Complex64::new(0.0, std::f64::consts::PI * (1.0 + theta));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let coef = -(Complex64::new(0.0, 1.0) + theta * (a * half_pi).tan())
        * Complex64::new(0.0, half_pi * (a - 1.0)).exp();
    coef * ((1.0 - a) * z.ln()).exp()
}

fn stable_phi_prime(a: f64, theta: f64, z: Complex64) -> Complex64 {
    if a == 2.0 {
        return -1.0 / (z * z);
    }
    if a == 1.0 {
        return 2.0 * theta / z;
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let coef = -(Complex64::new(0.0, 1.0) + theta * (a * half_pi).tan())
        * Complex64::new(0.0, half_pi * (a - 1.0)).exp();
    coef * (1.0 - a) * ((-a) * z.ln()).exp()
}

/// Reciprocal Cauchy transform `F(z) = 1/G(z)` of a probability measure
/// (nonvanishing since `Im G < 0` strictly on the upper half-plane).
pub fn f_transform(nu: &MeasureRep, z: Complex64) -> Result<Complex64> {
    Ok(1.0 / nu.cauchy_transform(z)?)
}

/// `F'(z) = -G'(z)/G(z)^2`.
pub fn f_transform_prime(nu: &MeasureRep, z: Complex64) -> Result<Complex64> {
    let g = nu.cauchy_transform(z)?;
    let gp = nu.cauchy_transform_prime(z)?;
    Ok(-gp / (g * g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DensityPiece;
    use std::f64::consts::PI;

    /// sigma = (t/2) delta_1, gamma = t/2: transform t w/(w-1).
    fn mp_descriptor(t: f64) -> PhiDescriptor {
        let sigma = MeasureRep::from_atoms(&[(1.0, t / 2.0)]).unwrap();
        PhiDescriptor::levy_hincin(t / 2.0, sigma).unwrap()
    }

    /// sigma = t delta_0, gamma = 0: transform t/w.
    fn semicircle_descriptor(t: f64) -> PhiDescriptor {
        let sigma = MeasureRep::from_atoms(&[(0.0, t)]).unwrap();
        PhiDescriptor::levy_hincin(0.0, sigma).unwrap()
    }

    #[test]
    fn rational_transform_fixture() {
        let phi = mp_descriptor(1.0);
        let w = Complex64::new(0.0, 2.0);
        let v = phi.eval(w).unwrap();
        // w/(w-1) at w = 2i equals 0.8 - 0.4i.
        assert!((v - Complex64::new(0.8, -0.4)).norm() < 1e-13, "got {v}");
        let v2 = mp_descriptor(0.5).eval(w).unwrap();
        assert!((v2 - Complex64::new(0.4, -0.2)).norm() < 1e-13);
    }

    #[test]
    fn reciprocal_transform_fixture() {
        let phi = semicircle_descriptor(1.0);
        for &(x, y) in &[(0.0, 1.0), (1.5, 0.25), (-2.0, 3.0)] {
            let w = Complex64::new(x, y);
            let v = phi.eval(w).unwrap();
            assert!((v - 1.0 / w).norm() < 1e-13);
        }
    }

    #[test]
    fn semigroup_scaling_is_additive() {
        let phi = mp_descriptor(1.0);
        let w = Complex64::new(0.3, 0.9);
        let a = phi.scaled(0.7).unwrap().eval(w).unwrap();
        let b = phi.scaled(1.8).unwrap().eval(w).unwrap();
        let c = phi.scaled(2.5).unwrap().eval(w).unwrap();
        assert!((a + b - c).norm() < 1e-12);

        let st = PhiDescriptor::stable(1.3, -0.4).unwrap();
        let a = st.scaled(0.7).unwrap().eval(w).unwrap();
        let b = st.scaled(1.8).unwrap().eval(w).unwrap();
        let c = st.scaled(2.5).unwrap().eval(w).unwrap();
        assert!((a + b - c).norm() < 1e-12);
    }

    #[test]
    fn stable_transform_values() {
        let i = Complex64::new(0.0, 1.0);
        // index 1/2, symmetric: phi(i) = -i.
        let st = PhiDescriptor::stable(0.5, 0.0).unwrap();
        assert!((st.eval(i).unwrap() + i).norm() < 1e-13);
        // index 2: phi(z) = 1/z.
        let st2 = PhiDescriptor::stable(2.0, 0.0).unwrap();
        assert!((st2.eval(Complex64::new(0.0, 2.0)).unwrap() + i / 2.0).norm() < 1e-13);
        // index 1, symmetric: constant -i pi.
        let st1 = PhiDescriptor::stable(1.0, 0.0).unwrap();
        assert!((st1.eval(i).unwrap() + i * PI).norm() < 1e-13);
        // index 1, theta = 1: 2 Log z - 2 i pi.
        let st1p = PhiDescriptor::stable(1.0, 1.0).unwrap();
        assert!((st1p.eval(i).unwrap() + i * PI).norm() < 1e-13);
    }

    #[test]
    fn stable_direction_holds_across_parameters() {
        for &a in &[0.3, 0.5, 0.9, 1.0, 1.1, 1.5, 1.9, 2.0] {
            for &th in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
                let d = PhiDescriptor::stable(a, th);
                assert!(d.is_ok(), "({a}, {th}) rejected: {:?}", d.err());
            }
        }
        assert!(PhiDescriptor::stable(2.5, 0.0).is_err());
        assert!(PhiDescriptor::stable(0.5, 1.5).is_err());
    }

    #[test]
    fn cauchy_transform_is_constant() {
        let d = PhiDescriptor::cauchy(2.0, 0.5).unwrap();
        let w = Complex64::new(3.0, 0.1);
        assert_eq!(d.eval(w).unwrap(), Complex64::new(0.5, -2.0));
        assert_eq!(d.eval_prime(w).unwrap(), Complex64::new(0.0, 0.0));
        let s = d.scaled(3.0).unwrap();
        assert_eq!(s.eval(w).unwrap(), Complex64::new(1.5, -6.0));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let w = Complex64::new(0.4, 1.2);
        let h = 1e-6;
        for d in [
            mp_descriptor(0.8),
            PhiDescriptor::stable(1.5, 0.3).unwrap(),
            PhiDescriptor::stable(1.0, 0.5).unwrap(),
        ] {
            let num = (d.eval(w + h).unwrap() - d.eval(w - h).unwrap()) / (2.0 * h);
            let an = d.eval_prime(w).unwrap();
            assert!((num - an).norm() < 1e-7, "diff {}", (num - an).norm());
        }
    }

    #[test]
    fn reciprocal_zero_of_rational_family() {
        // g0 = t, zero at origin carrying mass 1 - t for t < 1.
        let z = mp_descriptor(0.5).f_transform_zero().unwrap().unwrap();
        assert!((z.location - 0.0).abs() < 1e-14);
        assert!((z.mass - 0.5).abs() < 1e-14);
        // t = 1: zero persists with no mass.
        let z1 = mp_descriptor(1.0).f_transform_zero().unwrap().unwrap();
        assert!(z1.mass.abs() < 1e-14);
        // t > 1: quadratic integral exceeds 1, no zero.
        assert!(mp_descriptor(1.5).f_transform_zero().unwrap().is_none());
        // Semicircle: sigma sits at 0 itself, integral diverges.
        assert!(semicircle_descriptor(1.0)
            .f_transform_zero()
            .unwrap()
            .is_none());
        // Stable laws carry no zero.
        assert!(PhiDescriptor::stable(0.5, 0.0)
            .unwrap()
            .f_transform_zero()
            .unwrap()
            .is_none());
    }

    #[test]
    fn variance_values() {
        assert_eq!(mp_descriptor(1.0).variance(), ExtReal::Finite(1.0));
        assert_eq!(semicircle_descriptor(2.0).variance(), ExtReal::Finite(2.0));
        assert_eq!(
            PhiDescriptor::stable(1.5, 0.0).unwrap().variance(),
            ExtReal::PlusInf
        );
        assert_eq!(
            PhiDescriptor::stable(2.0, 0.0).unwrap().variance(),
            ExtReal::Finite(1.0)
        );
        assert_eq!(
            PhiDescriptor::cauchy(1.0, 0.0).unwrap().variance(),
            ExtReal::PlusInf
        );
        // Infinite-variance integral representation.
        let sigma = MeasureRep::new(
            Vec::new(),
            vec![DensityPiece::power_tail_right(0.5, 2.0, 1.0)],
        )
        .unwrap();
        let d = PhiDescriptor::levy_hincin(0.0, sigma).unwrap();
        assert_eq!(d.variance(), ExtReal::PlusInf);
    }

    #[test]
    fn boundary_evaluation_outside_support() {
        // phi(x) for the rational family at real x away from s = 1:
        // t x/(x-1).
        let t = 0.8;
        let phi = match mp_descriptor(t) {
            PhiDescriptor::LevyHincin(tr) => tr,
            _ => unreachable!(),
        };
        let x = 3.0;
        let v = phi.phi_real_boundary(x).as_finite().unwrap();
        assert!((v - t * x / (x - 1.0)).abs() < 1e-13);
        // At the support point itself the value is undecided/infinite.
        assert!(!phi.phi_real_boundary(1.0).is_finite());
    }

    #[test]
    fn reciprocal_cauchy_transform_expands() {
        let nu = MeasureRep::new(
            vec![],
            vec![DensityPiece::uniform(1.0, 0.0, 1.0)],
        )
        .unwrap();
        for &(x, y) in &[(0.0, 1.0), (0.5, 0.3), (-1.0, 2.0)] {
            let z = Complex64::new(x, y);
            let f = f_transform(&nu, z).unwrap();
            assert!(f.im >= z.im - 1e-12, "Im F = {} < Im z = {}", f.im, z.im);
        }
        // Derivative consistency.
        let z = Complex64::new(0.3, 0.7);
        let h = 1e-6;
        let num = (f_transform(&nu, z + h).unwrap() - f_transform(&nu, z - h).unwrap())
            / (2.0 * h);
        let an = f_transform_prime(&nu, z).unwrap();
        assert!((num - an).norm() < 1e-8);
    }
}
