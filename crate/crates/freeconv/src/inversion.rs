//! The convolution pair model and the global inversion of
//! `H(z) = z + phi(F_nu(z))`.
//!
//! For `x` real and `y > 0`, `Im H(x + iy) = y * (1 - I_x(y))` where
//! `I_x(y) >= 0` is strictly decreasing in `y`. The boundary height
//! `f(x) = inf { y > 0 : Im H(x + iy) >= 0 }` is therefore computable by
//! sign bisection, and the single evaluation `Im H(x + i t) < 0` decides
//! `f(x) > t` exactly. `H` maps the region above the graph of `f`
//! bijectively onto the upper half-plane; its inverse `omega` extends the
//! subordination function of the convolution.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ext::ExtReal;
use crate::extrapolate::{vertical_limit, VerticalLimit};
use crate::measure::MeasureRep;
use crate::transform::{f_transform, f_transform_prime, PhiDescriptor};
use crate::{Error, Result};

/// Numeric knobs. All are absolute bases scaled by `(1 + |x|)` where a
/// location enters.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Smallest vertical offset used when probing the real boundary.
    pub y_floor: f64,
    /// Target accuracy for root finding (boundary height, inverse maps).
    pub root_tol: f64,
    /// Absolute tolerance handed to adaptive quadrature.
    pub quad_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            y_floor: 1e-9,
            root_tol: 1e-11,
            quad_tol: 1e-10,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        if !(self.y_floor > 0.0 && self.root_tol > 0.0 && self.quad_tol > 0.0) {
            return Err(Error::ToleranceConflict(
                "all tolerances must be positive".into(),
            ));
        }
        if self.root_tol > self.y_floor {
            return Err(Error::ToleranceConflict(
                "root tolerance must not exceed the vertical floor".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn y_floor_at(&self, x: f64) -> f64 {
        self.y_floor * (1.0 + x.abs())
    }

    /// Heights below this are reported as zero boundary height.
    pub(crate) fn f_zero_threshold(&self, x: f64) -> f64 {
        10.0 * self.y_floor_at(x)
    }
}

/// A boundary-height evaluation: either certified zero (at floor
/// resolution) or a bisected positive value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryHeight {
    Zero,
    Positive(f64),
}

impl BoundaryHeight {
    pub fn value(self) -> f64 {
        match self {
            BoundaryHeight::Zero => 0.0,
            BoundaryHeight::Positive(v) => v,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, BoundaryHeight::Positive(_))
    }
}

/// Result of a boundary derivative-mass evaluation `g(x) = lim I_x(y)`.
#[derive(Clone, Copy, Debug)]
pub struct GValue {
    pub value: ExtReal,
    /// Error estimate; zero structure means exact arithmetic routes.
    pub error: f64,
    /// Whether the value came from closed-form integrals rather than the
    /// extrapolation ladder.
    pub exact: bool,
}

/// The set `{ f > 0 }` scanned over a window.
#[derive(Clone, Debug)]
pub struct PositivitySet {
    /// Maximal open intervals of positive boundary height found by the
    /// scan, in increasing order.
    pub components: Vec<(f64, f64)>,
    pub window: (f64, f64),
    /// The leftmost/rightmost component runs into the window edge, so its
    /// outer endpoint is a truncation artifact, not a zero of `f`.
    pub truncated_left: bool,
    pub truncated_right: bool,
    pub warnings: Vec<String>,
}

/// A freely infinitely divisible transform paired with an initial
/// probability law.
#[derive(Clone, Debug)]
pub struct ConvolutionModel {
    nu: MeasureRep,
    phi: PhiDescriptor,
    tol: Tolerances,
}

const MAX_FIXED_POINT_ITERS: usize = 10_000;
const MAX_BRACKET_DOUBLINGS: usize = 80;

impl ConvolutionModel {
    pub fn new(phi: PhiDescriptor, nu: MeasureRep) -> Result<Self> {
        ConvolutionModel::with_tolerances(phi, nu, Tolerances::default())
    }

    pub fn with_tolerances(
        phi: PhiDescriptor,
        nu: MeasureRep,
        tol: Tolerances,
    ) -> Result<Self> {
        tol.validate()?;
        let mass = nu.total_mass();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidModel(format!(
                "initial law must be a probability measure (total mass {mass})"
            )));
        }
        if let Some(t) = phi.levy_triple() {
            if t.levy_measure.is_zero() {
                return Err(Error::InvalidModel(
                    "transform with zero measure part is a pure shift; \
                     nothing to invert"
                        .into(),
                ));
            }
        }
        Ok(ConvolutionModel { nu, phi, tol })
    }

    pub fn nu(&self) -> &MeasureRep {
        &self.nu
    }

    pub fn phi(&self) -> &PhiDescriptor {
        &self.phi
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Same initial law under the semigroup element `t * phi`.
    pub fn at_time(&self, t: f64) -> Result<Self> {
        Ok(ConvolutionModel {
            nu: self.nu.clone(),
            phi: self.phi.scaled(t)?,
            tol: self.tol,
        })
    }

    // ---- the map H -------------------------------------------------------

    /// `H(z) = z + phi(F_nu(z))`, `Im z > 0`.
    pub fn eval_h(&self, z: Complex64) -> Result<Complex64> {
        let f = 1.0
            / self
                .nu
                .cauchy_transform_tol(z, self.tol.quad_tol)?;
        Ok(z + self.phi.eval(f)?)
    }

    /// `H'(z) = 1 + phi'(F(z)) F'(z)`.
    pub fn eval_h_prime(&self, z: Complex64) -> Result<Complex64> {
        let f = f_transform(&self.nu, z)?;
        let fp = f_transform_prime(&self.nu, z)?;
        Ok(1.0 + self.phi.eval_prime(f)? * fp)
    }

    // ---- boundary height --------------------------------------------------

    /// Decide `f(x) > threshold` with a single evaluation.
    pub fn height_exceeds(&self, x: f64, threshold: f64) -> Result<bool> {
        let z = Complex64::new(x, threshold);
        Ok(self.eval_h(z)?.im < 0.0)
    }

    /// The boundary height `f(x)`, zero-clamped at floor resolution.
    pub fn boundary_height(&self, x: f64) -> Result<BoundaryHeight> {
        let floor = self.tol.y_floor_at(x);
        if !self.height_exceeds(x, floor)? {
            return Ok(BoundaryHeight::Zero);
        }
        // Bracket: f(x) in (floor, hi] with Im H(x + i hi) >= 0.
        let mut lo = floor;
        let mut hi = 1.0 + x.abs();
        let mut doublings = 0;
        while self.height_exceeds(x, hi)? {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_BRACKET_DOUBLINGS {
                return Err(Error::BracketFailure(format!(
                    "boundary height at {x} exceeds {hi:e}"
                )));
            }
        }
        // Sign bisection on the monotone structure.
        while hi - lo > self.tol.root_tol * (1.0 + hi) {
            let mid = 0.5 * (lo + hi);
            if self.height_exceeds(x, mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Report the nonnegative side of the bracket.
        if hi <= self.tol.f_zero_threshold(x) {
            Ok(BoundaryHeight::Zero)
        } else {
            Ok(BoundaryHeight::Positive(hi))
        }
    }

    // ---- boundary derivative mass g ---------------------------------------

    /// `g(x) = lim_{y -> 0+} I_x(y)`, the quantity whose comparison with 1
    /// separates positive from zero boundary height and controls the
    /// derivative of the inverse at the boundary.
    ///
    /// Closed-form route when the transform has an integral representation
    /// and the initial-law integrals are decidable; otherwise the vertical
    /// ladder on `1 - Im H(x + iy)/y`.
    pub fn g_value(&self, x: f64) -> Result<GValue> {
        if let Some(exact) = self.g_value_exact(x)? {
            return Ok(exact);
        }
        self.g_value_ladder(x)
    }

    fn g_value_exact(&self, x: f64) -> Result<Option<GValue>> {
        let triple = match self.phi.levy_triple() {
            Some(t) => t,
            None => return Ok(None),
        };
        let sigma = &triple.levy_measure;
        let exact = |value: ExtReal| {
            Some(GValue {
                value,
                error: 0.0,
                exact: true,
            })
        };
        let nu_mass = self.nu.atom_mass(x);
        if nu_mass > 0.0 {
            // Atom of the initial law: g = (1/nu({x})) int (1+s^2)/s^2 dsigma.
            let i3 = sigma.weighted_quadratic_integral_tol(0.0, self.tol.quad_tol);
            return Ok(exact(i3.scale(1.0 / nu_mass)));
        }
        let i1 = self.nu.inverse_square_integral_tol(x, self.tol.quad_tol);
        match i1 {
            ExtReal::PlusInf => Ok(exact(ExtReal::PlusInf)),
            ExtReal::Undecided | ExtReal::MinusInf => Ok(None),
            ExtReal::Finite(i1) => {
                let l = match self.nu.linear_singular_integral_tol(x, self.tol.quad_tol) {
                    ExtReal::Finite(v) => v,
                    _ => return Ok(None),
                };
                let i4 = if l.abs() <= 1e-9 {
                    // F(x + iy) escapes to infinity: the weight integral
                    // degenerates to sigma(R) + second moment.
                    ExtReal::Finite(sigma.total_mass()).add(sigma.moment(2))
                } else {
                    let w0 = 1.0 / l;
                    sigma
                        .weighted_quadratic_integral_tol(w0, self.tol.quad_tol)
                        .scale(1.0 / (l * l))
                };
                match i4 {
                    ExtReal::Undecided => Ok(None),
                    v => Ok(exact(v.scale(i1))),
                }
            }
        }
    }

    fn g_value_ladder(&self, x: f64) -> Result<GValue> {
        let eval = |y: f64| -> f64 {
            let h = self
                .eval_h(Complex64::new(x, y))
                .expect("upper half-plane evaluation");
            1.0 - h.im / y
        };
        match vertical_limit(eval) {
            VerticalLimit::Converged(e) => Ok(GValue {
                value: ExtReal::Finite(e.value),
                error: e.error,
                exact: false,
            }),
            // I_x(y) increases as y decreases; unbounded growth is +inf.
            VerticalLimit::Diverging => Ok(GValue {
                value: ExtReal::PlusInf,
                error: 0.0,
                exact: false,
            }),
            VerticalLimit::Stalled {
                last,
                last_increment,
            } => {
                if last > 1e4 && last_increment > 1.0 {
                    return Ok(GValue {
                        value: ExtReal::PlusInf,
                        error: last_increment,
                        exact: false,
                    });
                }
                Err(Error::NonConvergence(format!(
                    "boundary derivative mass at {x} stalled near {last}"
                )))
            }
        }
    }

    // ---- boundary map h ----------------------------------------------------

    /// `h(x) = H(x + i f(x))` (real by construction), the increasing
    /// homeomorphism carrying boundary structure onto the real line.
    pub fn boundary_map(&self, x: f64) -> Result<f64> {
        match self.boundary_height(x)? {
            BoundaryHeight::Positive(f) => {
                Ok(self.eval_h(Complex64::new(x, f))?.re)
            }
            BoundaryHeight::Zero => self.boundary_map_at_zero_height(x),
        }
    }

    fn boundary_map_at_zero_height(&self, x: f64) -> Result<f64> {
        if let Some(triple) = self.phi.levy_triple() {
            let sigma = &triple.levy_measure;
            if self.nu.atom_mass(x) > 0.0 {
                // F -> 0 vertically; phi boundary value at the origin.
                if let ExtReal::Finite(lin) =
                    sigma.linear_singular_integral_tol(0.0, self.tol.quad_tol)
                {
                    return Ok(x + triple.shift + lin);
                }
            } else if let ExtReal::Finite(_) =
                self.nu.inverse_square_integral_tol(x, self.tol.quad_tol)
            {
                if let ExtReal::Finite(l) =
                    self.nu.linear_singular_integral_tol(x, self.tol.quad_tol)
                {
                    if l.abs() <= 1e-9 {
                        // F escapes to infinity; phi tends to shift + first
                        // moment of the measure part.
                        if let ExtReal::Finite(m1) = sigma.moment(1) {
                            return Ok(x + triple.shift + m1);
                        }
                    } else if let ExtReal::Finite(v) =
                        triple.phi_real_boundary(1.0 / l)
                    {
                        return Ok(x + v);
                    }
                }
            }
        }
        // Ladder fallback: H(x + iy) tends to the real boundary image.
        match vertical_limit(|y| {
            self.eval_h(Complex64::new(x, y))
                .expect("upper half-plane evaluation")
        }) {
            VerticalLimit::Converged(e) => Ok(e.value.re),
            VerticalLimit::Diverging => Err(Error::NonConvergence(format!(
                "boundary image at {x} diverged"
            ))),
            VerticalLimit::Stalled { last, .. } => Err(Error::NonConvergence(
                format!("boundary image at {x} stalled near {last}"),
            )),
        }
    }

    /// Inverse of the boundary map: the unique `x` with `h(x) = target`.
    pub fn boundary_map_inverse(&self, target: f64) -> Result<f64> {
        let mut lo = target - 1.0;
        let mut hi = target + 1.0;
        let mut width = 1.0;
        let mut doublings = 0;
        while self.boundary_map(lo)? > target {
            width *= 2.0;
            lo -= width;
            doublings += 1;
            if doublings > MAX_BRACKET_DOUBLINGS {
                return Err(Error::BracketFailure(format!(
                    "no lower bracket for boundary image {target}"
                )));
            }
        }
        doublings = 0;
        width = 1.0;
        while self.boundary_map(hi)? < target {
            width *= 2.0;
            hi += width;
            doublings += 1;
            if doublings > MAX_BRACKET_DOUBLINGS {
                return Err(Error::BracketFailure(format!(
                    "no upper bracket for boundary image {target}"
                )));
            }
        }
        while hi - lo > self.tol.root_tol * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if self.boundary_map(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    // ---- global inverse omega ----------------------------------------------

    /// The inverse `omega = H^{-1} : C+ -> Omega`, computed by the damped
    /// fixed point `z <- w - phi(F(z))` (a self-map of `{Im z >= Im w}`)
    /// finished with Newton steps.
    pub fn omega(&self, w: Complex64) -> Result<Complex64> {
        if !(w.im > 0.0) {
            return Err(Error::UpperHalfPlaneRequired);
        }
        let target = self.tol.root_tol * (1.0 + w.norm());
        let mut z = w;
        let mut prev_step = f64::INFINITY;
        let mut averaging = false;
        for iter in 0..MAX_FIXED_POINT_ITERS {
            let f = f_transform(&self.nu, z)?;
            let t = w - self.phi.eval(f)?;
            let step = (t - z).norm();
            if averaging {
                z = 0.5 * (z + t);
            } else {
                z = t;
            }
            if step <= 0.1 * target {
                break;
            }
            // A step sequence that refuses to contract signals rotation
            // around the fixed point; averaging restores contraction.
            if iter > 8 && step > 0.97 * prev_step {
                averaging = true;
            }
            prev_step = step;
        }
        // Newton polish on H(z) - w.
        for _ in 0..12 {
            let r = self.eval_h(z)? - w;
            if r.norm() <= target {
                return Ok(z);
            }
            let hp = self.eval_h_prime(z)?;
            if hp.norm() < 1e-14 {
                break;
            }
            let cand = z - r / hp;
            if !(cand.im > 0.0) {
                break;
            }
            z = cand;
        }
        let r = self.eval_h(z)? - w;
        if r.norm() <= target {
            Ok(z)
        } else {
            Err(Error::IterationDiverged(format!(
                "inverse of H at {w} did not meet tolerance (residual {})",
                r.norm()
            )))
        }
    }

    /// Derivative of the inverse at an interior point: `1 / H'(omega(w))`.
    pub fn omega_prime(&self, w: Complex64) -> Result<Complex64> {
        let z = self.omega(w)?;
        let hp = self.eval_h_prime(z)?;
        if hp.norm() < 1e-14 {
            return Err(Error::NonConvergence(format!(
                "derivative of H vanishes at the preimage of {w}"
            )));
        }
        Ok(1.0 / hp)
    }

    // ---- positivity set ------------------------------------------------------

    /// Scan `{ f > 0 }` over a window. Seeds a uniform grid of at least
    /// `n_seed` points plus structural candidates (atom locations, piece
    /// endpoints, monomial centers and midpoints between them), then
    /// localizes component endpoints by predicate bisection.
    pub fn positivity_set(&self, window: (f64, f64), n_seed: usize) -> Result<PositivitySet> {
        let (a, b) = window;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Precondition(format!(
                "scan window [{a}, {b}] must be a finite nonempty interval"
            )));
        }
        let n = n_seed.max(16);
        let mut xs: Vec<f64> = (0..=n)
            .map(|i| a + (b - a) * (i as f64) / (n as f64))
            .collect();
        let meta = self.nu.metadata_points();
        let inside: Vec<f64> = meta
            .iter()
            .copied()
            .filter(|x| *x > a && *x < b)
            .collect();
        xs.extend(inside.iter().copied());
        for w in inside.windows(2) {
            xs.push(0.5 * (w[0] + w[1]));
        }
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        xs.dedup();

        let flags: Vec<bool> = xs
            .par_iter()
            .map(|&x| {
                self.height_exceeds(x, self.tol.f_zero_threshold(x))
                    .unwrap_or(false)
            })
            .collect();

        let mut components = Vec::new();
        let mut warnings = Vec::new();
        let mut truncated_left = false;
        let mut truncated_right = false;
        let mut i = 0;
        while i < xs.len() {
            if !flags[i] {
                i += 1;
                continue;
            }
            let mut j = i;
            while j + 1 < xs.len() && flags[j + 1] {
                j += 1;
            }
            let lo = if i == 0 {
                truncated_left = true;
                xs[0]
            } else {
                self.localize_transition(xs[i - 1], xs[i])?
            };
            let hi = if j == xs.len() - 1 {
                truncated_right = true;
                xs[j]
            } else {
                self.localize_transition(xs[j + 1], xs[j])?
            };
            components.push((lo, hi));
            i = j + 1;
        }
        if truncated_left {
            warnings.push(format!(
                "positive boundary height at the left window edge {a}; \
                 the first component is cut by the window"
            ));
        }
        if truncated_right {
            warnings.push(format!(
                "positive boundary height at the right window edge {b}; \
                 the last component is cut by the window"
            ));
        }
        Ok(PositivitySet {
            components,
            window,
            truncated_left,
            truncated_right,
            warnings,
        })
    }

    /// Bisect between a negative and a positive sample of the height
    /// predicate; `neg` and `pos` may come in either spatial order.
    fn localize_transition(&self, neg: f64, pos: f64) -> Result<f64> {
        let mut lo = neg;
        let mut hi = pos;
        let scale = 1.0 + neg.abs().max(pos.abs());
        while (hi - lo).abs() > 1e-12 * scale {
            let mid = 0.5 * (lo + hi);
            if self.height_exceeds(mid, self.tol.f_zero_threshold(mid))? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
