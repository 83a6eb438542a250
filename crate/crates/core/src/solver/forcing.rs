use crate::error::{invalid, Result};

/// A scalar function of time: closed form or piecewise-linear samples.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// `coef · t^exponent`
    Power {
        coef: f64,
        exponent: f64,
    },
    /// `(t, value)` pairs, ascending in `t`; linear in between, clamped outside.
    Samples(Vec<(f64, f64)>),
}

impl Profile {
    pub fn samples(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("sample profile needs at least one point"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(invalid("sample times must be strictly increasing"));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(invalid("sample values must be finite"));
        }
        Ok(Profile::Samples(points))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Power { coef, exponent } => {
                if *exponent == 0.0 {
                    *coef
                } else {
                    coef * t.powf(*exponent)
                }
            }
            Profile::Samples(pts) => {
                if t <= pts[0].0 {
                    return pts[0].1;
                }
                let last = pts[pts.len() - 1];
                if t >= last.0 {
                    return last.1;
                }
                let i = pts.partition_point(|p| p.0 <= t) - 1;
                let (t0, v0) = pts[i];
                let (t1, v1) = pts[i + 1];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            Profile::Constant(c) => *c == 0.0,
            Profile::Power { coef, .. } => *coef == 0.0,
            Profile::Samples(pts) => pts.iter().all(|p| p.1 == 0.0),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Profile::Constant(c) => *c >= 0.0,
            Profile::Power { coef, .. } => *coef >= 0.0,
            Profile::Samples(pts) => pts.iter().all(|p| p.1 >= 0.0),
        }
    }

    /// `∫₀ᵗ |p(x)| (t − x) dx`
    pub fn moment_abs(&self, t: f64) -> f64 {
        match self {
            Profile::Constant(c) => c.abs() * t * t / 2.0,
            Profile::Power { coef, exponent } => {
                coef.abs() * t.powf(exponent + 2.0) / ((exponent + 1.0) * (exponent + 2.0))
            }
            Profile::Samples(_) => {
                // Composite Simpson; the integrand is piecewise smooth.
                let n = 512;
                let h = t / n as f64;
                let g = |x: f64| self.eval(x).abs() * (t - x);
                let mut acc = g(0.0) + g(t);
                for i in 1..n {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * g(i as f64 * h);
                }
                acc * h / 3.0
            }
        }
    }
}

/// The right-hand side `f(t, y)` of the oscillator equation.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingTerm {
    Zero,
    /// `f(t, y) = g(t)`
    TimeOnly {
        g: Profile,
    },
    /// `f(t, y) = h(t)·sign(y)|y|^α`, `h ≥ 0`
    PowerBound {
        h: Profile,
        alpha: f64,
    },
    /// `f(t, y) = h(t)·y`
    Lipschitz {
        h: Profile,
    },
    /// `f(t, y) = amp·sin y`
    Pendulum {
        amp: f64,
    },
}

/// Which structural hypotheses on `f` hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Capabilities {
    /// `|f(t,u)| ≤ h(t)|u|^α` with `h ≥ 0` locally integrable
    pub growth_bound: bool,
    /// continuous, `f(t,0) = 0`, `|f(t,u) − f(t,v)| ≤ h(t)|u − v|` with `h(0) = 0`
    pub lipschitz: bool,
    /// `|f(t,u) − f(s,v)| ≤ h(t,s)(|t − s| + |u − v|)` with `h(0,0) = 0`
    pub joint_lipschitz: bool,
}

impl ForcingTerm {
    pub fn power_bound(h: Profile, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!(
                "power-bound exponent must be > 0, got {alpha}"
            )));
        }
        if !h.is_nonnegative() {
            return Err(invalid("power-bound profile h must be nonnegative"));
        }
        Ok(ForcingTerm::PowerBound { h, alpha })
    }

    pub fn eval(&self, t: f64, u: f64) -> f64 {
        match self {
            ForcingTerm::Zero => 0.0,
            ForcingTerm::TimeOnly { g } => g.eval(t),
            ForcingTerm::PowerBound { h, alpha } => h.eval(t) * u.signum() * u.abs().powf(*alpha),
            ForcingTerm::Lipschitz { h } => h.eval(t) * u,
            ForcingTerm::Pendulum { amp } => amp * u.sin(),
        }
    }

    /// `∂f/∂u`, used by the Newton step of the reference solver.
    pub fn du(&self, t: f64, u: f64) -> f64 {
        match self {
            ForcingTerm::Zero | ForcingTerm::TimeOnly { .. } => 0.0,
            ForcingTerm::PowerBound { h, alpha } => {
                if u == 0.0 {
                    if *alpha >= 1.0 {
                        if *alpha == 1.0 {
                            h.eval(t)
                        } else {
                            0.0
                        }
                    } else {
                        f64::INFINITY
                    }
                } else {
                    h.eval(t) * alpha * u.abs().powf(alpha - 1.0)
                }
            }
            ForcingTerm::Lipschitz { h } => h.eval(t),
            ForcingTerm::Pendulum { amp } => amp * u.cos(),
        }
    }

    pub fn capabilities(&self) -> Capabilities {
        match self {
            ForcingTerm::Zero => Capabilities {
                growth_bound: true,
                lipschitz: true,
                joint_lipschitz: true,
            },
            ForcingTerm::TimeOnly { g } if g.is_identically_zero() => {
                ForcingTerm::Zero.capabilities()
            }
            ForcingTerm::TimeOnly { .. } => Capabilities::default(),
            ForcingTerm::PowerBound { h, alpha } => Capabilities {
                growth_bound: true,
                lipschitz: *alpha == 1.0 && h.eval(0.0) == 0.0,
                joint_lipschitz: false,
            },
            ForcingTerm::Lipschitz { h } => Capabilities {
                growth_bound: true,
                lipschitz: h.eval(0.0) == 0.0,
                joint_lipschitz: false,
            },
            ForcingTerm::Pendulum { .. } => Capabilities {
                growth_bound: true,
                lipschitz: false,
                joint_lipschitz: false,
            },
        }
    }

    /// `(C_t, α)` for the self-map estimate: `∫₀ᵗ h(x)(t−x)dx` and the growth
    /// exponent. A time-only forcing is bounded with `α = 0`, `h = |g|`.
    pub fn growth_moment(&self, t: f64) -> (f64, f64) {
        match self {
            ForcingTerm::Zero => (0.0, 1.0),
            ForcingTerm::TimeOnly { g } => (g.moment_abs(t), 0.0),
            ForcingTerm::PowerBound { h, alpha } => (h.moment_abs(t), *alpha),
            ForcingTerm::Lipschitz { h } => (h.moment_abs(t), 1.0),
            ForcingTerm::Pendulum { amp } => (amp.abs() * t * t / 2.0, 1.0),
        }
    }
}
