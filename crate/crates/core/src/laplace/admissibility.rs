//! Zero-freeness of `F(s) = Σ aᵢ s^{γᵢ}` in the open right half-plane.
//!
//! `|F(s)|` is dominated by the top atom for large `|s|` and by the bottom atom
//! for small `|s|`, so every zero with `Re s ≥ 0` sits in an annulus
//! `r ≤ |s| ≤ R`. The zeros inside `Re s > 0` are counted by the argument
//! principle along the boundary of the half annulus, and the imaginary axis is
//! scanned separately for zeros sitting exactly on the boundary.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;

use crate::dist_order::{symbol_eval_unchecked, OrderWeight};
use crate::error::{invalid, Result};

const SEGMENTS_PER_PIECE: usize = 512;
const MAX_REFINE_DEPTH: usize = 64;
const AXIS_SAMPLES: usize = 2048;
const AXIS_ZERO_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// no zeros in `Re s > 0` and none on the imaginary axis
    Admissible,
    /// at least one zero in `Re s > 0`
    NotAdmissible,
    /// no zeros in `Re s > 0`, but zeros on the imaginary axis
    BoundaryDegenerate,
    /// phase tracking failed; no verdict
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Admissible => "admissible",
            Verdict::NotAdmissible => "not-admissible",
            Verdict::BoundaryDegenerate => "boundary-degenerate",
            Verdict::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisZero {
    /// `y` with `F(iy) ≈ 0`
    pub ordinate: f64,
    /// `|F(iy)|` at the located minimum
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// `winding_count == 0`; true also for [`Verdict::BoundaryDegenerate`]
    pub admissible: bool,
    pub verdict: Verdict,
    pub r_inner: f64,
    pub r_outer: f64,
    /// zeros in `Re s > 0` with multiplicity; −1 when indeterminate
    pub winding_count: i64,
    pub axis_zeros: Vec<AxisZero>,
    pub notes: String,
}

fn atoms_of(phi2: &OrderWeight) -> Result<Vec<(f64, f64)>> {
    match phi2 {
        OrderWeight::Atomic(a) if !a.is_empty() => {
            Ok(a.iter().map(|x| (x.coef, x.order)).collect())
        }
        OrderWeight::Atomic(_) => Err(invalid("phi2 has no atoms")),
        _ => Err(invalid("zero bracketing needs an atomic phi2")),
    }
}

/// Radii `(r, R)` outside of which one atom dominates the others, so `F` has no
/// zeros with `|s| < r` or `|s| > R`. A single atom gives `(1, 1)`.
pub fn bracket_zero_region(phi2: &OrderWeight) -> Result<(f64, f64)> {
    let atoms = atoms_of(phi2)?;
    if atoms.len() == 1 {
        return Ok((1.0, 1.0));
    }
    let (a0, g0) = atoms[0];
    let (ak, gk) = atoms[atoms.len() - 1];
    // both ratios are monotone in ρ: outer decreasing, inner increasing
    let outer = |rho: f64| {
        atoms[1..]
            .iter()
            .map(|&(a, g)| a.abs() * rho.powf(g - g0))
            .sum::<f64>()
            / a0.abs()
    };
    let inner = |rho: f64| {
        atoms[..atoms.len() - 1]
            .iter()
            .map(|&(a, g)| a.abs() * rho.powf(g - gk))
            .sum::<f64>()
            / ak.abs()
    };
    let r_outer = crossing(|rho| outer(rho) < 1.0, true);
    let r_inner = crossing(|rho| inner(rho) < 1.0, false);
    Ok((r_inner, r_outer))
}

/// Bisection for the point where a monotone predicate flips. With
/// `holds_above`, returns a ρ where it holds and everything above holds;
/// otherwise a ρ where it holds and everything below holds.
fn crossing<P: Fn(f64) -> bool>(pred: P, holds_above: bool) -> f64 {
    let (mut good, mut bad) = (1.0f64, 1.0f64);
    if pred(1.0) {
        while pred(bad) {
            bad = if holds_above { bad * 0.5 } else { bad * 2.0 };
        }
        good = if holds_above { bad * 2.0 } else { bad * 0.5 };
    } else {
        while !pred(good) {
            good = if holds_above { good * 2.0 } else { good * 0.5 };
        }
        bad = if holds_above { good * 0.5 } else { good * 2.0 };
    }
    for _ in 0..200 {
        let mid = (good * bad).sqrt();
        if mid == good || mid == bad {
            break;
        }
        if pred(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

#[derive(Debug)]
enum Tracking {
    Ok(f64),
    ZeroOnContour,
    DepthExceeded,
}

/// Accumulated `arg F` along `s(u)`, `u ∈ [0, 1]`.
fn track_piece<F, S>(f: &F, s_of: &S) -> Tracking
where
    F: Fn(Complex64) -> Complex64,
    S: Fn(f64) -> Complex64,
{
    let mut total = 0.0;
    let mut u0 = 0.0;
    let mut f0 = f(s_of(0.0));
    if f0.norm() == 0.0 {
        return Tracking::ZeroOnContour;
    }
    for i in 1..=SEGMENTS_PER_PIECE {
        let u1 = i as f64 / SEGMENTS_PER_PIECE as f64;
        let f1 = f(s_of(u1));
        if f1.norm() == 0.0 {
            return Tracking::ZeroOnContour;
        }
        match refine(f, s_of, u0, u1, f0, f1, 0) {
            Tracking::Ok(d) => total += d,
            other => return other,
        }
        u0 = u1;
        f0 = f1;
    }
    Tracking::Ok(total)
}

fn refine<F, S>(
    f: &F,
    s_of: &S,
    u0: f64,
    u1: f64,
    f0: Complex64,
    f1: Complex64,
    depth: usize,
) -> Tracking
where
    F: Fn(Complex64) -> Complex64,
    S: Fn(f64) -> Complex64,
{
    let um = 0.5 * (u0 + u1);
    let fm = f(s_of(um));
    if fm.norm() == 0.0 {
        return Tracking::ZeroOnContour;
    }
    let d1 = (fm / f0).arg();
    let d2 = (f1 / fm).arg();
    if d1.abs() < FRAC_PI_4 && d2.abs() < FRAC_PI_4 {
        return Tracking::Ok(d1 + d2);
    }
    if depth >= MAX_REFINE_DEPTH || um <= u0 || um >= u1 {
        return Tracking::DepthExceeded;
    }
    let a = match refine(f, s_of, u0, um, f0, fm, depth + 1) {
        Tracking::Ok(a) => a,
        other => return other,
    };
    match refine(f, s_of, um, u1, fm, f1, depth + 1) {
        Tracking::Ok(b) => Tracking::Ok(a + b),
        other => other,
    }
}

/// Winding number of `F` around the boundary of
/// `{Re s > ε₀, ρ_in < |s| < ρ_out}`, walked counterclockwise.
fn winding_number<F: Fn(Complex64) -> Complex64>(
    f: &F,
    eps: f64,
    rho_in: f64,
    rho_out: f64,
) -> std::result::Result<i64, String> {
    let y_out = (rho_out * rho_out - eps * eps).sqrt();
    let y_in = (rho_in * rho_in - eps * eps).sqrt();
    let th_out = y_out.atan2(eps);
    let th_in = y_in.atan2(eps);
    let pieces: [Box<dyn Fn(f64) -> Complex64>; 4] = [
        Box::new(move |u| Complex64::from_polar(rho_out, -th_out + 2.0 * th_out * u)),
        Box::new(move |u| Complex64::new(eps, y_out * (y_in / y_out).powf(u))),
        Box::new(move |u| Complex64::from_polar(rho_in, th_in - 2.0 * th_in * u)),
        Box::new(move |u| Complex64::new(eps, -y_in * (y_out / y_in).powf(u))),
    ];
    let mut total = 0.0;
    for (i, piece) in pieces.iter().enumerate() {
        match track_piece(f, piece) {
            Tracking::Ok(d) => total += d,
            Tracking::ZeroOnContour => return Err(format!("F vanishes on contour piece {i}")),
            Tracking::DepthExceeded => {
                return Err(format!(
                    "phase tracking did not resolve on contour piece {i}"
                ))
            }
        }
    }
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() > 1e-6 {
        return Err(format!("non-integer winding {w}"));
    }
    Ok(rounded as i64)
}

/// Local minima of `|F(iy)|` over `y ∈ [y_lo, y_hi]` that are zeros to within
/// `AXIS_ZERO_RTOL` of the term magnitude `Σ|aᵢ| y^{γᵢ}`.
fn scan_axis<F: Fn(Complex64) -> Complex64>(
    f: &F,
    atoms: &[(f64, f64)],
    y_lo: f64,
    y_hi: f64,
) -> Vec<AxisZero> {
    let ln_lo = y_lo.ln();
    let ln_hi = y_hi.ln();
    let at = |x: f64| f(Complex64::new(0.0, x.exp())).norm();
    let scale = |y: f64| atoms.iter().map(|&(a, g)| a.abs() * y.powf(g)).sum::<f64>();
    let xs: Vec<f64> = (0..AXIS_SAMPLES)
        .map(|i| ln_lo + (ln_hi - ln_lo) * i as f64 / (AXIS_SAMPLES - 1) as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| at(x)).collect();
    let mut zeros: Vec<AxisZero> = Vec::new();
    for i in 0..AXIS_SAMPLES {
        let left = if i > 0 { vals[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < AXIS_SAMPLES {
            vals[i + 1]
        } else {
            f64::INFINITY
        };
        if !(vals[i] <= left && vals[i] <= right) {
            continue;
        }
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(AXIS_SAMPLES - 1)];
        let (x, v) = golden_min(&at, a, b);
        let y = x.exp();
        if v < AXIS_ZERO_RTOL * scale(y)
            && !zeros.iter().any(|z| (z.ordinate - y).abs() <= 1e-6 * y)
        {
            zeros.push(AxisZero {
                ordinate: y,
                residual: v,
            });
        }
    }
    let mirrored: Vec<AxisZero> = zeros
        .iter()
        .rev()
        .map(|z| AxisZero {
            ordinate: -z.ordinate,
            residual: z.residual,
        })
        .collect();
    mirrored.into_iter().chain(zeros).collect()
}

fn golden_min<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    if gc < gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Decides whether `F(s) = Σ aᵢ s^{γᵢ}` is zero-free on `Re s > 0`.
///
/// Orders may be arbitrary reals here (not only `[0, 2)`).
pub fn check_a0(phi2: &OrderWeight) -> Result<AdmissibilityReport> {
    let atoms = atoms_of(phi2)?;
    let (r_inner, r_outer) = bracket_zero_region(phi2)?;
    let f = |s: Complex64| symbol_eval_unchecked(phi2, s);
    let eps = 1e-9 * r_inner;
    let rho_in = 0.5 * r_inner;
    let rho_out = 2.0 * r_outer;
    let axis_zeros = scan_axis(&f, &atoms, rho_in, rho_out);
    let mut notes = Vec::new();
    let (verdict, winding_count) = match winding_number(&f, eps, rho_in, rho_out) {
        Ok(w) if w > 0 => (Verdict::NotAdmissible, w),
        Ok(0) if axis_zeros.is_empty() => (Verdict::Admissible, 0),
        Ok(0) => {
            notes.push(format!(
                "{} zero(s) on the imaginary axis",
                axis_zeros.len()
            ));
            (Verdict::BoundaryDegenerate, 0)
        }
        Ok(w) => {
            notes.push(format!("negative winding {w} for an analytic symbol"));
            (Verdict::Indeterminate, -1)
        }
        Err(msg) => {
            notes.push(msg);
            (Verdict::Indeterminate, -1)
        }
    };
    notes.push(format!(
        "contour: Re s > {eps:e}, {rho_in} < |s| < {rho_out}"
    ));
    Ok(AdmissibilityReport {
        admissible: winding_count == 0,
        verdict,
        r_inner,
        r_outer,
        winding_count,
        axis_zeros,
        notes: notes.join("; "),
    })
}
