//! Density evaluation and boundary regularity of the convolution.
//!
//! In preimage coordinates `x`, the absolutely continuous density of the
//! convolution at the image point `h(x)` is `-Im G_nu(x + i f(x)) / pi`.
//! Zeros of the density correspond to zero boundary height, and their local
//! type is decided by the boundary limit of the reciprocal Cauchy transform
//! of the initial law:
//!
//! * atom contact: an atom of the initial law sits at `x` (the limit is 0),
//! * finite contact: the limit is a finite nonzero real number,
//! * infinite contact: the limit escapes to infinity.
//!
//! Each type comes with closed-form certificate integrals whose product is
//! the defect mass `g(x) <= 1`; the derivative of the global inverse at the
//! image is `1/(1 - g)`, infinite exactly at ties.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ext::ExtReal;
use crate::inversion::{BoundaryHeight, ConvolutionModel};
use crate::measure::{CauchyBoundary, MeasureRep, PieceFamily};
use crate::transform::PhiDescriptor;
use crate::{Error, Result};

/// Boundary limit type of the reciprocal Cauchy transform of the initial
/// law at a density zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryType {
    /// The limit vanishes: an atom of the initial law.
    AtomContact,
    /// Finite nonzero real limit.
    FiniteContact,
    /// The limit escapes to infinity.
    InfiniteContact,
}

impl std::fmt::Display for BoundaryType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BoundaryType::AtomContact => "atom",
            BoundaryType::FiniteContact => "finite",
            BoundaryType::InfiniteContact => "infinite",
        };
        f.write_str(s)
    }
}

/// Structural real-analyticity verdict for the density at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticityVerdict {
    Analytic,
    NotAnalytic,
    /// Sampled data in a load-bearing position; no structural decision.
    Unknown,
}

impl std::fmt::Display for AnalyticityVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AnalyticityVerdict::Analytic => "analytic",
            AnalyticityVerdict::NotAnalytic => "not_analytic",
            AnalyticityVerdict::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// A classified zero of the boundary height.
#[derive(Clone, Debug)]
pub struct BoundaryPoint {
    /// Preimage coordinate (initial-law side).
    pub location: f64,
    /// Image `h(location)` (convolution side).
    pub image: f64,
    pub kind: BoundaryType,
    /// Defect mass `g`; at genuine zeros `g <= 1`.
    pub g: ExtReal,
    pub g_error: f64,
    /// Whether certificates came from closed forms rather than ladders.
    pub exact: bool,
    /// Initial-law atom mass at the location (atom contact only).
    pub atom_mass: f64,
    /// `int dnu/(x-s)^2`, the first certificate (non-atom routes).
    pub inverse_square: Option<ExtReal>,
    /// Real boundary value of the Cauchy transform of the initial law.
    pub boundary_value: Option<f64>,
    /// Weight certificate: the transform-side integral whose product with
    /// the inverse-square certificate is `g`.
    pub weight_integral: Option<ExtReal>,
    /// Derivative of the global inverse at the image; infinite at ties.
    pub inverse_derivative: ExtReal,
    pub analytic: AnalyticityVerdict,
}

/// Outcome of classifying a real point.
#[derive(Clone, Debug)]
pub enum PointClassification {
    /// Positive boundary height: the density is positive at the image.
    PositiveHeight { height: f64 },
    Boundary(Box<BoundaryPoint>),
}

/// An atom of the convolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolutionAtom {
    pub location: f64,
    pub mass: f64,
    /// The defining mass sum sits exactly at the survival threshold; the
    /// entry carries zero mass and is reported for diagnostics only.
    pub boundary_equality: bool,
}

/// Sampled density with structure attached.
#[derive(Clone, Debug)]
pub struct DensityProfile {
    /// `(s, density)` samples, increasing in `s`.
    pub samples: Vec<(f64, f64)>,
    pub atoms: Vec<ConvolutionAtom>,
    /// Classified isolated zeros and support edges inside the window.
    pub zero_points: Vec<BoundaryPoint>,
    pub warnings: Vec<String>,
}

/// Support structure of the convolution over a window.
#[derive(Clone, Debug)]
pub struct SupportReport {
    /// Closed components of the support (absolutely continuous part and
    /// atoms merged), clipped to the scanned window.
    pub components: Vec<(f64, f64)>,
    pub atoms: Vec<ConvolutionAtom>,
    /// Number of components found in the window.
    pub count: usize,
    /// A priori bound on the total component count, when the transform has
    /// an integral representation.
    pub bound: Option<usize>,
    /// Contact points where two components touch without a gap.
    pub zero_points: Vec<BoundaryPoint>,
    pub window: (f64, f64),
    pub truncated: (bool, bool),
    pub warnings: Vec<String>,
}

/// Verdict on full support plus strictly positive density for every
/// initial law.
#[derive(Clone, Debug, PartialEq)]
pub enum PropertyHVerdict {
    Holds { evidence: String },
    Fails { witness: String },
    Undecided { reason: String },
}

// ---- density ---------------------------------------------------------------

/// Density of the absolutely continuous part at image point `s`.
pub fn density_at(model: &ConvolutionModel, s: f64) -> Result<f64> {
    let x = model.boundary_map_inverse(s)?;
    density_at_preimage(model, x)
}

/// Density at the image of preimage point `x` (cheaper when `x` is known).
pub fn density_at_preimage(model: &ConvolutionModel, x: f64) -> Result<f64> {
    match model.boundary_height(x)? {
        BoundaryHeight::Zero => Ok(0.0),
        BoundaryHeight::Positive(f) => {
            let g = model
                .nu()
                .cauchy_transform_tol(Complex64::new(x, f), model.tolerances().quad_tol)?;
            Ok((-g.im / std::f64::consts::PI).max(0.0))
        }
    }
}

/// Sample the density over an image-coordinate window with roughly `n`
/// points, clustering samples toward component edges, and classify the
/// density zeros inside the window.
pub fn density_profile(
    model: &ConvolutionModel,
    window: (f64, f64),
    n: usize,
) -> Result<DensityProfile> {
    let (sa, sb) = window;
    if !(sa < sb) || !sa.is_finite() || !sb.is_finite() {
        return Err(Error::Precondition(format!(
            "density window [{sa}, {sb}] must be a finite nonempty interval"
        )));
    }
    let n = n.max(32);
    let xa = model.boundary_map_inverse(sa)?;
    let xb = model.boundary_map_inverse(sb)?;
    let set = model.positivity_set((xa, xb), n.max(256))?;
    let mut warnings = set.warnings.clone();

    let atoms: Vec<ConvolutionAtom> = atoms_of_convolution(model)?
        .into_iter()
        .filter(|a| a.location >= sa && a.location <= sb)
        .collect();

    if set.components.is_empty() {
        warnings.push(format!(
            "density vanishes on the whole window [{sa}, {sb}]"
        ));
        let samples = (0..=n)
            .map(|i| (sa + (sb - sa) * i as f64 / n as f64, 0.0))
            .collect();
        return Ok(DensityProfile {
            samples,
            atoms,
            zero_points: Vec::new(),
            warnings,
        });
    }

    // Allocate samples to components by length, clustered toward edges;
    // gaps get sparse explicit zero rows.
    let total_len: f64 = set.components.iter().map(|c| c.1 - c.0).sum();
    let mut xs: Vec<f64> = Vec::with_capacity(n + 16);
    for &(lo, hi) in &set.components {
        let share = ((hi - lo) / total_len * n as f64).ceil() as usize;
        let m = share.clamp(24, n + 1);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for k in 0..m {
            let theta = std::f64::consts::PI * k as f64 / (m - 1) as f64;
            xs.push(mid - half * theta.cos());
        }
    }
    let mut gap_edges: Vec<(f64, f64)> = Vec::new();
    gap_edges.push((xa, set.components[0].0));
    for w in set.components.windows(2) {
        gap_edges.push((w[0].1, w[1].0));
    }
    gap_edges.push((set.components[set.components.len() - 1].1, xb));
    for (lo, hi) in gap_edges {
        if hi - lo <= 0.0 {
            continue;
        }
        for k in 0..=6 {
            xs.push(lo + (hi - lo) * k as f64 / 6.0);
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();

    let mut samples: Vec<(f64, f64)> = xs
        .par_iter()
        .map(|&x| -> Result<(f64, f64)> {
            match model.boundary_height(x)? {
                BoundaryHeight::Positive(f) => {
                    let z = Complex64::new(x, f);
                    let g = model
                        .nu()
                        .cauchy_transform_tol(z, model.tolerances().quad_tol)?;
                    let s = model.eval_h(z)?.re;
                    Ok((s, (-g.im / std::f64::consts::PI).max(0.0)))
                }
                BoundaryHeight::Zero => Ok((model.boundary_map(x)?, 0.0)),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    samples.dedup_by(|a, b| a.0 == b.0);

    let zero_points = classify_component_edges(model, &set.components, (xa, xb), &mut warnings)?;

    Ok(DensityProfile {
        samples,
        atoms,
        zero_points,
        warnings,
    })
}

/// Classify the non-truncated endpoints of positivity components, snapping
/// to structural candidates and nudging toward the zero side where needed.
fn classify_component_edges(
    model: &ConvolutionModel,
    components: &[(f64, f64)],
    scan: (f64, f64),
    warnings: &mut Vec<String>,
) -> Result<Vec<BoundaryPoint>> {
    let mut endpoints: Vec<(f64, i8)> = Vec::new(); // (x, outward sign)
    for &(lo, hi) in components {
        if lo > scan.0 {
            endpoints.push((lo, -1));
        }
        if hi < scan.1 {
            endpoints.push((hi, 1));
        }
    }
    endpoints.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Abutting components share a contact point: classify it once, with no
    // outward direction (both sides are positive).
    let mut merged: Vec<(f64, Option<i8>)> = Vec::new();
    let mut i = 0;
    while i < endpoints.len() {
        if i + 1 < endpoints.len() {
            let (x0, s0) = endpoints[i];
            let (x1, s1) = endpoints[i + 1];
            if s0 == 1 && s1 == -1 && (x1 - x0).abs() <= 2e-6 * (1.0 + x0.abs()) {
                merged.push((0.5 * (x0 + x1), None));
                i += 2;
                continue;
            }
        }
        merged.push((endpoints[i].0, Some(endpoints[i].1)));
        i += 1;
    }

    let mut points = Vec::new();
    for (x, outward) in merged {
        let snapped = snap_to_candidates(model.nu(), x);
        let mut classified = None;
        let mut trial_points: Vec<f64> = Vec::new();
        if let Some(c) = snapped {
            trial_points.push(c);
        }
        match outward {
            None => trial_points.push(x),
            Some(sign) => {
                let scale = 1.0 + x.abs();
                for &nudge in &[1e-9, 1e-7, 1e-5] {
                    trial_points.push(x + sign as f64 * nudge * scale);
                }
            }
        }
        for trial in trial_points {
            match classify_boundary_point(model, trial)? {
                PointClassification::Boundary(bp) => {
                    classified = Some(*bp);
                    break;
                }
                PointClassification::PositiveHeight { .. } => continue,
            }
        }
        match classified {
            Some(bp) => points.push(bp),
            None => warnings.push(format!(
                "component edge near {x} could not be pinned to a zero of the \
                 boundary height; skipped"
            )),
        }
    }
    Ok(points)
}

/// Nearest structural candidate (atom location, piece endpoint, monomial
/// center) within snapping distance.
fn snap_to_candidates(nu: &MeasureRep, x: f64) -> Option<f64> {
    let tol = 1e-6 * (1.0 + x.abs());
    nu.metadata_points()
        .into_iter()
        .filter(|c| (c - x).abs() <= tol)
        .min_by(|a, b| {
            (a - x).abs().partial_cmp(&(b - x).abs()).unwrap()
        })
}

// ---- classification ---------------------------------------------------------

/// Tie tolerance for the defect mass against 1 (below certificate errors
/// this wide, the inverse derivative is reported infinite).
const G_TIE_TOL: f64 = 1e-8;
/// Boundary values of the Cauchy transform smaller than this count as an
/// escape to infinity of its reciprocal.
const BOUNDARY_VALUE_ZERO_TOL: f64 = 1e-9;

/// Classify a real point: either the boundary height is positive (interior
/// of the positivity set) or the point is a density zero with certificates.
pub fn classify_boundary_point(
    model: &ConvolutionModel,
    x: f64,
) -> Result<PointClassification> {
    if let BoundaryHeight::Positive(height) = model.boundary_height(x)? {
        return Ok(PointClassification::PositiveHeight { height });
    }
    let quad_tol = model.tolerances().quad_tol;
    let nu = model.nu();
    let triple = model.phi().levy_triple();

    let atom_mass = nu.atom_mass(x);
    let mut inverse_square = None;
    let mut boundary_value = None;
    let mut weight_integral = None;

    let (kind, g, g_error, exact): (BoundaryType, ExtReal, f64, bool);
    if atom_mass > 0.0 {
        kind = BoundaryType::AtomContact;
        match triple {
            Some(t) => {
                let i3 = t
                    .levy_measure
                    .weighted_quadratic_integral_tol(0.0, quad_tol);
                weight_integral = Some(i3);
                g = i3.scale(1.0 / atom_mass);
                g_error = 0.0;
                exact = true;
            }
            None => {
                let gv = model.g_value(x)?;
                g = gv.value;
                g_error = gv.error;
                exact = gv.exact;
            }
        }
    } else {
        let i1 = nu.inverse_square_integral_tol(x, quad_tol);
        inverse_square = Some(i1);
        // Boundary value of G_nu decides the contact type.
        let bv = match i1 {
            ExtReal::Finite(_) => match nu.linear_singular_integral_tol(x, quad_tol) {
                ExtReal::Finite(v) => v,
                other => {
                    return Err(Error::Undecided(format!(
                        "boundary value at {x} is {other} despite finite \
                         inverse-square integral"
                    )))
                }
            },
            _ => match nu.cauchy_boundary_value(x)? {
                CauchyBoundary::Value(v) => {
                    if v.im.abs() > 1e-6 {
                        return Err(Error::ToleranceConflict(format!(
                            "zero boundary height at {x} but the initial law \
                             shows density {} there",
                            -v.im / std::f64::consts::PI
                        )));
                    }
                    v.re
                }
                CauchyBoundary::Infinite => {
                    return Err(Error::ToleranceConflict(format!(
                        "the Cauchy transform of the initial law blows up at \
                         {x} without an atom, yet the boundary height is zero"
                    )))
                }
            },
        };
        boundary_value = Some(bv);
        kind = if bv.abs() <= BOUNDARY_VALUE_ZERO_TOL {
            BoundaryType::InfiniteContact
        } else {
            BoundaryType::FiniteContact
        };
        // Weight certificate from the transform side.
        let i4: Option<ExtReal> = triple.map(|t| {
            let sigma = &t.levy_measure;
            match kind {
                BoundaryType::InfiniteContact => {
                    ExtReal::Finite(sigma.total_mass()).add(sigma.moment(2))
                }
                _ => {
                    let w0 = 1.0 / bv;
                    sigma
                        .weighted_quadratic_integral_tol(w0, quad_tol)
                        .scale(1.0 / (bv * bv))
                }
            }
        });
        if let Some(i4v) = i4 {
            weight_integral = Some(i4v);
        }
        match (i1, weight_integral) {
            (ExtReal::PlusInf, _) => {
                g = ExtReal::PlusInf;
                g_error = 0.0;
                exact = true;
            }
            (ExtReal::Finite(i1v), Some(i4v)) if !i4v.is_undecided() => {
                g = i4v.scale(i1v);
                g_error = 0.0;
                exact = true;
            }
            _ => {
                let gv = model.g_value(x)?;
                g = gv.value;
                g_error = gv.error;
                exact = gv.exact;
            }
        }
    }

    // Zero height forces g <= 1; a certified excess is a tolerance conflict.
    let tie = G_TIE_TOL.max(g_error);
    let inverse_derivative = match g {
        ExtReal::Finite(gv) if gv < 1.0 - tie => ExtReal::Finite(1.0 / (1.0 - gv)),
        ExtReal::Finite(gv) if (gv - 1.0).abs() <= tie => ExtReal::PlusInf,
        _ => {
            return Err(Error::ToleranceConflict(format!(
                "zero boundary height at {x} conflicts with defect mass {g}; \
                 tighten the vertical floor or loosen the zero threshold"
            )))
        }
    };

    let image = model.boundary_map(x)?;
    let analytic = analyticity_verdict(
        model,
        x,
        kind,
        boundary_value,
        inverse_derivative == ExtReal::PlusInf,
    );

    Ok(PointClassification::Boundary(Box::new(BoundaryPoint {
        location: x,
        image,
        kind,
        g,
        g_error,
        exact,
        atom_mass,
        inverse_square,
        boundary_value,
        weight_integral,
        inverse_derivative,
        analytic,
    })))
}

/// Structural analyticity of the density at the image of a boundary point:
/// requires local analyticity of the initial law at the point and of the
/// transform data at the boundary value of the reciprocal transform. A tie
/// in the defect mass always breaks analyticity (one-sided vanishing).
fn analyticity_verdict(
    model: &ConvolutionModel,
    x: f64,
    kind: BoundaryType,
    boundary_value: Option<f64>,
    tie: bool,
) -> AnalyticityVerdict {
    if tie {
        return AnalyticityVerdict::NotAnalytic;
    }
    let nu_side = locally_analytic(model.nu(), x, kind == BoundaryType::AtomContact);
    let sigma_side = match model.phi().levy_triple() {
        Some(t) => match kind {
            BoundaryType::AtomContact => locally_analytic(&t.levy_measure, 0.0, false),
            BoundaryType::FiniteContact => match boundary_value {
                Some(bv) if bv != 0.0 => {
                    locally_analytic(&t.levy_measure, 1.0 / bv, false)
                }
                _ => None,
            },
            // Every representable measure part is analytic at infinity.
            BoundaryType::InfiniteContact => Some(true),
        },
        // Closed-form transforms only branch at 0 and infinity, and atom
        // contact cannot reach a density zero for them.
        None => Some(true),
    };
    match (nu_side, sigma_side) {
        (Some(false), _) | (_, Some(false)) => AnalyticityVerdict::NotAnalytic,
        (Some(true), Some(true)) => AnalyticityVerdict::Analytic,
        _ => AnalyticityVerdict::Unknown,
    }
}

/// Whether the density of `m` is real-analytic in a neighborhood of `x`
/// (atoms allowed only when `allow_atom`). `None` means sampled data blocks
/// the decision.
fn locally_analytic(m: &MeasureRep, x: f64, allow_atom: bool) -> Option<bool> {
    if !allow_atom && m.atom_mass(x) > 0.0 {
        return Some(false);
    }
    for p in m.pieces() {
        if x > p.lo && x < p.hi {
            return match &p.family {
                PieceFamily::Uniform { .. }
                | PieceFamily::Monomial { .. }
                | PieceFamily::PowerTail { .. } => Some(true),
                PieceFamily::Table { analytic, .. } => {
                    if *analytic {
                        Some(true)
                    } else {
                        None
                    }
                }
            };
        }
        // Piece junctions and support edges break analyticity.
        if x == p.lo || x == p.hi {
            return Some(false);
        }
    }
    // Gap interior: the zero density is analytic.
    Some(true)
}

// ---- atoms -------------------------------------------------------------------

/// Atoms of the convolution: an initial-law atom survives exactly when its
/// mass plus the transform-side zero mass exceeds 1, landing shifted by the
/// zero location.
pub fn atoms_of_convolution(model: &ConvolutionModel) -> Result<Vec<ConvolutionAtom>> {
    let zero = match model.phi().f_transform_zero()? {
        Some(z) => z,
        None => return Ok(Vec::new()),
    };
    let mut out = Vec::new();
    for a in model.nu().atoms() {
        let excess = a.mass + zero.mass - 1.0;
        if excess > 1e-12 {
            out.push(ConvolutionAtom {
                location: a.location + zero.location,
                mass: excess,
                boundary_equality: false,
            });
        } else if excess.abs() <= 1e-12 {
            out.push(ConvolutionAtom {
                location: a.location + zero.location,
                mass: 0.0,
                boundary_equality: true,
            });
        }
    }
    out.sort_by(|a, b| a.location.partial_cmp(&b.location).unwrap());
    Ok(out)
}

// ---- full-support / positive-density verdict -----------------------------------

/// Decide whether the law represented by `phi` forces full support and a
/// strictly positive density in every convolution.
///
/// With an integral representation the criterion is exact: the measure part
/// needs infinite second moment and its weighted inverse-square integral
/// must exceed 1 everywhere; candidate minima are evaluated in closed form
/// (gaps are searched by convex minimization). Closed-form transforms are
/// probed along vertical-limit grids instead, which can certify failure
/// anywhere but certifies success only on the probe grid.
pub fn property_h(phi: &PhiDescriptor) -> Result<PropertyHVerdict> {
    match phi.levy_triple() {
        Some(t) => property_h_exact(&t.levy_measure),
        None => property_h_probes(phi),
    }
}

fn property_h_exact(sigma: &MeasureRep) -> Result<PropertyHVerdict> {
    match sigma.moment(2) {
        ExtReal::Finite(m2) => {
            return Ok(PropertyHVerdict::Fails {
                witness: format!(
                    "finite variance: measure mass + second moment = {}",
                    sigma.total_mass() + m2
                ),
            })
        }
        ExtReal::PlusInf => {}
        other => {
            return Ok(PropertyHVerdict::Undecided {
                reason: format!("second moment of the measure part is {other}"),
            })
        }
    }
    let comps = sigma.support_components();
    let left_unbounded = comps.first().is_some_and(|c| c.0 == f64::NEG_INFINITY);
    let right_unbounded = comps.last().is_some_and(|c| c.1 == f64::INFINITY);
    if !left_unbounded || !right_unbounded {
        // The weighted integral decays to zero across an unbounded gap.
        let (start, dir) = if !left_unbounded {
            (comps.first().unwrap().0, -1.0)
        } else {
            (comps.last().unwrap().1, 1.0)
        };
        let mut dist = 1.0;
        for _ in 0..200 {
            let x = start + dir * dist;
            match sigma.weighted_quadratic_integral(x).known_le(1.0) {
                Some(true) => {
                    return Ok(PropertyHVerdict::Fails {
                        witness: format!(
                            "weighted inverse-square integral drops to {} at x = {x}",
                            sigma.weighted_quadratic_integral(x)
                        ),
                    })
                }
                _ => dist *= 2.0,
            }
        }
        return Ok(PropertyHVerdict::Undecided {
            reason: "could not witness decay across the unbounded gap".into(),
        });
    }

    // Candidate minima: points of the closed support where the integral is
    // finite (deep density zeros and vanishing junctions) ...
    let mut checks: Vec<(f64, ExtReal)> = Vec::new();
    for c in sigma.metadata_points() {
        let v = sigma.weighted_quadratic_integral(c);
        match v {
            ExtReal::PlusInf => {}
            ExtReal::Undecided => {
                return Ok(PropertyHVerdict::Undecided {
                    reason: format!(
                        "sampled density near {c} cannot certify the weighted integral"
                    ),
                })
            }
            v => checks.push((c, v)),
        }
    }
    // ... and interior minima of bounded gaps (the integral is strictly
    // convex there).
    for w in comps.windows(2) {
        let (gap_lo, gap_hi) = (w[0].1, w[1].0);
        if gap_hi <= gap_lo {
            continue;
        }
        let (xm, vm) = convex_minimum(
            |x| sigma.weighted_quadratic_integral(x),
            gap_lo,
            gap_hi,
        )?;
        checks.push((xm, vm));
    }
    for (x, v) in checks {
        match v.known_le(1.0 + 1e-9) {
            Some(true) => {
                let strict = v.known_le(1.0 - 1e-9);
                if strict == Some(true) {
                    return Ok(PropertyHVerdict::Fails {
                        witness: format!(
                            "weighted inverse-square integral is {v} <= 1 at x = {x}"
                        ),
                    });
                }
                return Ok(PropertyHVerdict::Undecided {
                    reason: format!(
                        "weighted inverse-square integral sits at the threshold \
                         ({v}) at x = {x}"
                    ),
                });
            }
            _ => {}
        }
    }
    Ok(PropertyHVerdict::Holds {
        evidence: "infinite variance and the weighted inverse-square integral \
                   exceeds 1 at every admissible point"
            .into(),
    })
}

/// Golden-section minimum of a convex extended-real function on `[a, b]`
/// (interior evaluations only).
fn convex_minimum<F>(f: F, a: f64, b: f64) -> Result<(f64, ExtReal)>
where
    F: Fn(f64) -> ExtReal,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut lo = a;
    let mut hi = b;
    let value = |x: f64| -> Result<f64> {
        match f(x) {
            ExtReal::Finite(v) => Ok(v),
            ExtReal::PlusInf => Ok(f64::MAX),
            other => Err(Error::Undecided(format!(
                "gap minimization hit an undecided value ({other}) at {x}"
            ))),
        }
    };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = value(x1)?;
    let mut f2 = value(x2)?;
    for _ in 0..200 {
        if hi - lo <= 1e-10 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = value(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = value(x2)?;
        }
    }
    let xm = 0.5 * (lo + hi);
    Ok((xm, f(xm)))
}

/// Probe grid for closed-form transforms: vertical density limits across a
/// dyadic grid plus the vertical mass limit.
fn property_h_probes(phi: &PhiDescriptor) -> Result<PropertyHVerdict> {
    use crate::extrapolate::{vertical_limit, VerticalLimit};
    let mut probes = vec![0.0];
    let mut v = 0.5;
    while v <= 512.0 {
        probes.push(v);
        probes.push(-v);
        v *= 2.0;
    }
    // A single witness below the threshold fails the verdict outright;
    // probes stuck at the threshold only block a positive verdict.
    let mut undecided: Option<String> = None;
    for &x in &probes {
        let lim = vertical_limit(|eps| {
            let w = Complex64::new(x, eps);
            -phi.eval(w).expect("upper half-plane").im / eps
        });
        match lim {
            VerticalLimit::Diverging => {}
            VerticalLimit::Converged(e) => {
                if e.value <= 1.0 - 1e-6 {
                    return Ok(PropertyHVerdict::Fails {
                        witness: format!(
                            "vertical density limit {} <= 1 at x = {x}",
                            e.value
                        ),
                    });
                }
                if (e.value - 1.0).abs() < 1e-6 && undecided.is_none() {
                    undecided = Some(format!(
                        "vertical density limit sits at the threshold at x = {x}"
                    ));
                }
            }
            VerticalLimit::Stalled {
                last,
                last_increment,
            } => {
                if !(last > 1.0 + 1e-6 && last_increment > 0.0) && undecided.is_none() {
                    undecided = Some(format!("vertical density limit stalled at x = {x}"));
                }
            }
        }
    }
    if let Some(reason) = undecided {
        return Ok(PropertyHVerdict::Undecided { reason });
    }
    // Vertical mass: -y Im phi(iy) must be unbounded.
    let q = |y: f64| -> f64 {
        -y * phi
            .eval(Complex64::new(0.0, y))
            .expect("upper half-plane")
            .im
    };
    let mut prev = q(1.0);
    let mut last_ratios: Vec<f64> = Vec::new();
    let mut y = 2.0;
    for _ in 0..40 {
        let cur = q(y);
        last_ratios.push(cur / prev.max(1e-300));
        prev = cur;
        y *= 2.0;
    }
    if prev > 1e10 {
        return Ok(PropertyHVerdict::Holds {
            evidence: "all vertical density limits exceed 1 and the vertical \
                       mass limit grows beyond the cap"
                .into(),
        });
    }
    let tail = &last_ratios[last_ratios.len().saturating_sub(5)..];
    if tail.iter().all(|r| *r <= 1.0 + 1e-6) {
        return Ok(PropertyHVerdict::Fails {
            witness: format!(
                "vertical mass limit plateaus near {prev}: finite variance"
            ),
        });
    }
    Ok(PropertyHVerdict::Holds {
        evidence: format!(
            "all vertical density limits exceed 1; vertical mass still \
             growing (ratio {:.4}) at y = {y:.3e}",
            tail.last().copied().unwrap_or(f64::NAN)
        ),
    })
}

// ---- support ---------------------------------------------------------------------

/// A priori bound on the number of support components.
fn component_bound(model: &ConvolutionModel) -> Result<Option<usize>> {
    let triple = match model.phi().levy_triple() {
        Some(t) => t,
        None => return Ok(None),
    };
    let zero_mass = match model.phi().f_transform_zero() {
        Ok(Some(z)) => z.mass,
        Ok(None) => 0.0,
        Err(_) => return Ok(None),
    };
    let n_nu = model.nu().support_components().len();
    let gaps_nu = model.nu().support_gap_count();
    let n_sigma = triple.levy_measure.support_components().len();
    let last = if zero_mass >= 1.0 {
        return Ok(None);
    } else {
        (1.0 / (1.0 - zero_mass)).floor() as usize
    };
    Ok(Some(2 + n_nu + (1 + 3 * n_sigma) * gaps_nu + last))
}

/// Support structure over an image-coordinate window: merged closed
/// components of the absolutely continuous part, atoms, contact points,
/// and the a priori component bound.
pub fn support_report(
    model: &ConvolutionModel,
    window: (f64, f64),
    n_seed: usize,
) -> Result<SupportReport> {
    let (sa, sb) = window;
    if !(sa < sb) || !sa.is_finite() || !sb.is_finite() {
        return Err(Error::Precondition(format!(
            "support window [{sa}, {sb}] must be a finite nonempty interval"
        )));
    }
    let xa = model.boundary_map_inverse(sa)?;
    let xb = model.boundary_map_inverse(sb)?;
    let set = model.positivity_set((xa, xb), n_seed.max(256))?;
    let mut warnings = set.warnings.clone();

    let zero_points =
        classify_component_edges(model, &set.components, (xa, xb), &mut warnings)?;

    // Map components to image coordinates.
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for &(lo, hi) in &set.components {
        intervals.push((model.boundary_map(lo)?, model.boundary_map(hi)?));
    }

    let atoms = atoms_of_convolution(model)?;
    for a in &atoms {
        if a.location >= sa && a.location <= sb && a.mass > 0.0 {
            intervals.push((a.location, a.location));
        }
    }
    intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut components: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in intervals {
        let merge_tol = 1e-6 * (1.0 + lo.abs());
        match components.last_mut() {
            Some(last) if lo <= last.1 + merge_tol => last.1 = last.1.max(hi),
            _ => components.push((lo, hi)),
        }
    }
    let count = components.len();
    let bound = component_bound(model)?;
    if let Some(b) = bound {
        if count > b {
            warnings.push(format!(
                "component count {count} exceeds the a priori bound {b}; \
                 scan artifacts are likely"
            ));
        }
    }
    Ok(SupportReport {
        components,
        atoms,
        count,
        bound,
        zero_points,
        window,
        truncated: (set.truncated_left, set.truncated_right),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, DensityPiece};
    use std::f64::consts::PI;

    fn mp_phi(t: f64) -> PhiDescriptor {
        let sigma = MeasureRep::from_atoms(&[(1.0, t / 2.0)]).unwrap();
        PhiDescriptor::levy_hincin(t / 2.0, sigma).unwrap()
    }

    fn semicircle_phi(t: f64) -> PhiDescriptor {
        let sigma = MeasureRep::from_atoms(&[(0.0, t)]).unwrap();
        PhiDescriptor::levy_hincin(0.0, sigma).unwrap()
    }

    fn delta0() -> MeasureRep {
        MeasureRep::point_mass(0.0)
    }

    /// Atom of mass 0.4 at 1/2 embedded in a uniform background on [0, 1].
    fn atom_in_uniform() -> MeasureRep {
        MeasureRep::new(
            vec![Atom {
                location: 0.5,
                mass: 0.4,
            }],
            vec![DensityPiece::uniform(0.6, 0.0, 1.0)],
        )
        .unwrap()
    }

    /// nu(ds) = s^2/3 on [-1, 2].
    fn quadratic_nu() -> MeasureRep {
        MeasureRep::new(
            Vec::new(),
            vec![DensityPiece::monomial(1.0 / 3.0, 2, 0.0, -1.0, 2.0)],
        )
        .unwrap()
    }

    /// nu(ds) = (3/8)[s^2 on [-1,1] + s^{-2} tails].
    fn heavy_nu() -> MeasureRep {
        MeasureRep::new(
            Vec::new(),
            vec![
                DensityPiece::power_tail_left(3.0 / 8.0, 2.0, -1.0),
                DensityPiece::monomial(3.0 / 8.0, 2, 0.0, -1.0, 1.0),
                DensityPiece::power_tail_right(3.0 / 8.0, 2.0, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn semicircle_density_matches_closed_form() {
        let m = ConvolutionModel::new(semicircle_phi(1.0), delta0()).unwrap();
        for &s in &[0.0, 0.5, 1.0, -1.7] {
            let p = density_at(&m, s).unwrap();
            let exact = (4.0 - s * s).max(0.0).sqrt() / (2.0 * PI);
            assert!((p - exact).abs() < 1e-8, "p({s}) = {p}, exact {exact}");
        }
        assert_eq!(density_at(&m, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn atom_contact_classification() {
        // Transform t w/(w-1) at t = 0.2 against the atom-in-uniform law:
        // g = (I3)/mass = 0.2/0.4 = 1/2, inverse derivative 2, image 1/2.
        let m = ConvolutionModel::new(mp_phi(0.2), atom_in_uniform()).unwrap();
        let c = classify_boundary_point(&m, 0.5).unwrap();
        let bp = match c {
            PointClassification::Boundary(bp) => bp,
            other => panic!("expected boundary point, got {other:?}"),
        };
        assert_eq!(bp.kind, BoundaryType::AtomContact);
        assert!(bp.exact);
        let g = bp.g.as_finite().unwrap();
        assert!((g - 0.5).abs() < 1e-12, "g = {g}");
        let od = bp.inverse_derivative.as_finite().unwrap();
        assert!((od - 2.0).abs() < 1e-9, "omega' = {od}");
        assert!((bp.image - 0.5).abs() < 1e-9, "image {}", bp.image);
        assert_eq!(bp.analytic, AnalyticityVerdict::Analytic);
    }

    #[test]
    fn finite_contact_classification() {
        // Quadratic initial law, transform w/(w-1): at x = 0 the boundary
        // value is -1/2, certificates I1 = 1 and I4 = 4/9, image 2/3.
        let m = ConvolutionModel::new(mp_phi(1.0), quadratic_nu()).unwrap();
        let bp = match classify_boundary_point(&m, 0.0).unwrap() {
            PointClassification::Boundary(bp) => bp,
            other => panic!("expected boundary point, got {other:?}"),
        };
        assert_eq!(bp.kind, BoundaryType::FiniteContact);
        let i1 = bp.inverse_square.unwrap().as_finite().unwrap();
        assert!((i1 - 1.0).abs() < 1e-10, "I1 = {i1}");
        let l = bp.boundary_value.unwrap();
        assert!((l + 0.5).abs() < 1e-10, "L = {l}");
        let i4 = bp.weight_integral.unwrap().as_finite().unwrap();
        assert!((i4 - 4.0 / 9.0).abs() < 1e-10, "I4 = {i4}");
        let od = bp.inverse_derivative.as_finite().unwrap();
        assert!((od - 1.8).abs() < 1e-9, "omega' = {od}");
        assert!((bp.image - 2.0 / 3.0).abs() < 1e-9, "image {}", bp.image);
    }

    #[test]
    fn infinite_contact_classification() {
        // Heavy-tailed symmetric initial law at its quadratic zero: the
        // boundary value vanishes, I4 degenerates to the transform variance.
        let m = ConvolutionModel::new(mp_phi(0.5), heavy_nu()).unwrap();
        let bp = match classify_boundary_point(&m, 0.0).unwrap() {
            PointClassification::Boundary(bp) => bp,
            other => panic!("expected boundary point, got {other:?}"),
        };
        assert_eq!(bp.kind, BoundaryType::InfiniteContact);
        let i4 = bp.weight_integral.unwrap().as_finite().unwrap();
        assert!((i4 - 0.5).abs() < 1e-10, "I4 = {i4}");
        let od = bp.inverse_derivative.as_finite().unwrap();
        assert!((od - 2.0).abs() < 1e-9, "omega' = {od}");
        assert!((bp.image - 0.5).abs() < 1e-9, "image {}", bp.image);
        assert_eq!(bp.analytic, AnalyticityVerdict::Analytic);
    }

    #[test]
    fn interior_point_reports_positive_height() {
        let m = ConvolutionModel::new(semicircle_phi(1.0), delta0()).unwrap();
        match classify_boundary_point(&m, 0.0).unwrap() {
            PointClassification::PositiveHeight { height } => {
                assert!((height - 1.0).abs() < 1e-8)
            }
            other => panic!("expected positive height, got {other:?}"),
        }
    }

    #[test]
    fn support_edges_are_ties() {
        let m = ConvolutionModel::new(semicircle_phi(1.0), delta0()).unwrap();
        let bp = match classify_boundary_point(&m, 1.0 + 1e-9).unwrap() {
            PointClassification::Boundary(bp) => bp,
            other => panic!("expected boundary point, got {other:?}"),
        };
        assert_eq!(bp.inverse_derivative, ExtReal::PlusInf);
        assert_eq!(bp.analytic, AnalyticityVerdict::NotAnalytic);
    }

    #[test]
    fn convolution_atoms_follow_the_mass_rule() {
        let m = ConvolutionModel::new(mp_phi(0.2), atom_in_uniform()).unwrap();
        let atoms = atoms_of_convolution(&m).unwrap();
        assert_eq!(atoms.len(), 1);
        assert!((atoms[0].location - 0.5).abs() < 1e-12);
        assert!((atoms[0].mass - 0.2).abs() < 1e-12);
        assert!(!atoms[0].boundary_equality);
        // Larger semigroup time destroys the atom.
        let m2 = ConvolutionModel::new(mp_phi(0.7), atom_in_uniform()).unwrap();
        assert!(atoms_of_convolution(&m2).unwrap().is_empty());
        // Boundary equality at mass sum exactly 1: t = 0.4 kills it to zero.
        let m3 = ConvolutionModel::new(mp_phi(0.4), atom_in_uniform()).unwrap();
        let a3 = atoms_of_convolution(&m3).unwrap();
        assert_eq!(a3.len(), 1);
        assert!(a3[0].boundary_equality);
        assert_eq!(a3[0].mass, 0.0);
        // Point initial law against the rational transform: free Poisson
        // atom at the origin with mass 1 - t.
        let mp = ConvolutionModel::new(mp_phi(0.5), delta0()).unwrap();
        let atoms = atoms_of_convolution(&mp).unwrap();
        assert_eq!(atoms.len(), 1);
        assert!((atoms[0].location).abs() < 1e-12);
        assert!((atoms[0].mass - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_support_verdicts() {
        // Finite variance fails.
        match property_h(&mp_phi(1.0)).unwrap() {
            PropertyHVerdict::Fails { witness } => {
                assert!(witness.contains("finite variance"), "{witness}")
            }
            other => panic!("expected failure, got {other:?}"),
        }
        // Full-support heavy measure part holds.
        let sigma = MeasureRep::new(
            Vec::new(),
            vec![
                DensityPiece::power_tail_left(1.0, 3.0, -1.0),
                DensityPiece::uniform(1.0, -1.0, 1.0),
                DensityPiece::power_tail_right(1.0, 3.0, 1.0),
            ],
        )
        .unwrap();
        let phi = PhiDescriptor::levy_hincin(0.0, sigma).unwrap();
        match property_h(&phi).unwrap() {
            PropertyHVerdict::Holds { .. } => {}
            other => panic!("expected holds, got {other:?}"),
        }
        // Symmetric closed-form transform holds via probes.
        let st = PhiDescriptor::stable(0.5, 0.0).unwrap();
        match property_h(&st).unwrap() {
            PropertyHVerdict::Holds { .. } => {}
            other => panic!("expected holds, got {other:?}"),
        }
        // Fully asymmetric transform of small index fails criterion 1.
        let st1 = PhiDescriptor::stable(0.5, 1.0).unwrap();
        match property_h(&st1).unwrap() {
            PropertyHVerdict::Fails { .. } => {}
            other => panic!("expected failure, got {other:?}"),
        }
        // Constant-transform smoothing holds.
        let cau = PhiDescriptor::cauchy(1.0, 0.0).unwrap();
        match property_h(&cau).unwrap() {
            PropertyHVerdict::Holds { .. } => {}
            other => panic!("expected holds, got {other:?}"),
        }
    }

    #[test]
    fn heavy_measure_part_with_bounded_gap() {
        // Tails with a hole around the origin: the weighted integral dips in
        // the gap; whether it crosses 1 is decided by convex minimization.
        // With tall tails starting at +-1 the gap minimum stays above 1.
        let sigma = MeasureRep::new(
            Vec::new(),
            vec![
                DensityPiece::power_tail_left(4.0, 2.5, -1.0),
                DensityPiece::power_tail_right(4.0, 2.5, 1.0),
            ],
        )
        .unwrap();
        let phi = PhiDescriptor::levy_hincin(0.0, sigma).unwrap();
        match property_h(&phi).unwrap() {
            PropertyHVerdict::Holds { .. } => {}
            other => panic!("expected holds, got {other:?}"),
        }
        // Thin tails leave the gap minimum below 1.
        let sigma_thin = MeasureRep::new(
            Vec::new(),
            vec![
                DensityPiece::power_tail_left(0.05, 2.5, -1.0),
                DensityPiece::power_tail_right(0.05, 2.5, 1.0),
            ],
        )
        .unwrap();
        let phi_thin = PhiDescriptor::levy_hincin(0.0, sigma_thin).unwrap();
        match property_h(&phi_thin).unwrap() {
            PropertyHVerdict::Fails { witness } => {
                assert!(witness.contains("<= 1"), "{witness}")
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn one_sided_measure_part_fails() {
        let sigma = MeasureRep::new(
            Vec::new(),
            vec![DensityPiece::power_tail_right(1.0, 2.5, 1.0)],
        )
        .unwrap();
        let phi = PhiDescriptor::levy_hincin(0.0, sigma).unwrap();
        match property_h(&phi).unwrap() {
            PropertyHVerdict::Fails { witness } => {
                assert!(witness.contains("drops to"), "{witness}")
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn density_profile_of_semicircle() {
        let m = ConvolutionModel::new(semicircle_phi(1.0), delta0()).unwrap();
        let prof = density_profile(&m, (-3.0, 3.0), 200).unwrap();
        assert!(prof.samples.len() >= 100);
        assert!(prof.samples.windows(2).all(|w| w[0].0 <= w[1].0));
        // Compare a few interior samples against the closed form.
        for &(s, p) in prof
            .samples
            .iter()
            .filter(|(s, _)| s.abs() < 1.9 && s.abs() > 0.01)
        {
            let exact = (4.0 - s * s).max(0.0).sqrt() / (2.0 * PI);
            assert!((p - exact).abs() < 1e-7, "p({s}) = {p} vs {exact}");
        }
        // Zero rows outside the support.
        assert!(prof
            .samples
            .iter()
            .filter(|(s, _)| s.abs() > 2.1)
            .all(|&(_, p)| p == 0.0));
        // Two support edges classified as ties.
        assert_eq!(prof.zero_points.len(), 2);
        assert!(prof
            .zero_points
            .iter()
            .all(|bp| bp.inverse_derivative == ExtReal::PlusInf));
        assert!(prof.atoms.is_empty());
    }

    #[test]
    fn density_profile_handles_empty_window() {
        let m = ConvolutionModel::new(semicircle_phi(1.0), delta0()).unwrap();
        let prof = density_profile(&m, (5.0, 6.0), 64).unwrap();
        assert!(prof.samples.iter().all(|&(_, p)| p == 0.0));
        assert!(prof
            .warnings
            .iter()
            .any(|w| w.contains("vanishes on the whole window")));
    }

    #[test]
    fn support_report_of_semicircle() {
        let m = ConvolutionModel::new(semicircle_phi(1.0), delta0()).unwrap();
        let rep = support_report(&m, (-4.0, 4.0), 300).unwrap();
        assert_eq!(rep.count, 1);
        let (lo, hi) = rep.components[0];
        assert!((lo + 2.0).abs() < 1e-6, "lo {lo}");
        assert!((hi - 2.0).abs() < 1e-6, "hi {hi}");
        let bound = rep.bound.unwrap();
        assert!(bound >= 1);
        assert!(rep.atoms.is_empty());
    }

    #[test]
    fn support_report_with_atom_component() {
        // Free Poisson at t = 1/2: bulk plus an atom at the origin.
        let m = ConvolutionModel::new(mp_phi(0.5), delta0()).unwrap();
        let rep = support_report(&m, (-1.0, 4.0), 400).unwrap();
        // Bulk [(1-sqrt t)^2, (1+sqrt t)^2] ~ [0.086, 2.914] plus atom {0}.
        assert_eq!(rep.count, 2, "components {:?}", rep.components);
        assert_eq!(rep.atoms.len(), 1);
        assert!((rep.atoms[0].mass - 0.5).abs() < 1e-12);
        let bulk = rep.components[1];
        let lo_exact = (1.0 - 0.5f64.sqrt()).powi(2);
        let hi_exact = (1.0 + 0.5f64.sqrt()).powi(2);
        assert!((bulk.0 - lo_exact).abs() < 1e-6, "bulk lo {}", bulk.0);
        assert!((bulk.1 - hi_exact).abs() < 1e-6, "bulk hi {}", bulk.1);
        assert!(rep.count <= rep.bound.unwrap());
    }

    #[test]
    fn timing_probe_tmp() {
        use std::time::Instant;
        let m = ConvolutionModel::new(mp_phi(0.5), heavy_nu()).unwrap();
        let t0 = Instant::now();
        let g = m
            .nu()
            .cauchy_transform_tol(Complex64::new(2.5, 1e-9), 1e-10)
            .unwrap();
        eprintln!("cauchy@(2.5,1e-9): {:?} -> {g}", t0.elapsed());
        let t0 = Instant::now();
        let h = m.boundary_height(2.5).unwrap();
        eprintln!("boundary_height(2.5): {:?} -> {h:?}", t0.elapsed());
        let t0 = Instant::now();
        let x = m.boundary_map_inverse(-3.0).unwrap();
        eprintln!("inverse(-3): {:?} -> {x}", t0.elapsed());
        let t0 = Instant::now();
        let set = m.positivity_set((x, -x), 400).unwrap();
        eprintln!(
            "positivity: {:?} -> {} comps",
            t0.elapsed(),
            set.components.len()
        );
        let t0 = Instant::now();
        let _ = classify_boundary_point(&m, 0.0).unwrap();
        eprintln!("classify(0): {:?}", t0.elapsed());
    }

    #[test]
    fn isolated_zero_merges_support_components() {
        // Heavy symmetric law with a quadratic zero at the origin: the
        // density vanishes at one interior point; support stays connected.
        let m = ConvolutionModel::new(mp_phi(0.5), heavy_nu()).unwrap();
        let rep = support_report(&m, (-3.0, 3.0), 400).unwrap();
        assert_eq!(rep.count, 1, "components {:?}", rep.components);
        assert!(rep.truncated.0 && rep.truncated.1);
        // The contact point is classified.
        assert_eq!(rep.zero_points.len(), 1);
        let bp = &rep.zero_points[0];
        assert_eq!(bp.kind, BoundaryType::InfiniteContact);
        assert!((bp.image - 0.5).abs() < 1e-6);
    }
}
