use std::fmt;

use super::ProblemSpec;
use crate::dist_order::{
    classify_weight, OrderWeight, Phi1Class, Phi2Class, WeightClass, WeightRole,
};
use crate::laplace::check_a0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolutionClass {
    Mild,
    NonImpact,
    Classical,
}

impl fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionClass::Mild => "mild",
            SolutionClass::NonImpact => "non_impact",
            SolutionClass::Classical => "classical",
        })
    }
}

/// A class together with the hypothesis clause that grants it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grant {
    pub class: SolutionClass,
    pub clause: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Classification {
    grants: Vec<Grant>,
    /// why stronger classes were not granted, when that is decided by a single check
    pub notes: Vec<String>,
}

impl Classification {
    pub fn has(&self, class: SolutionClass) -> bool {
        self.grants.iter().any(|g| g.class == class)
    }

    pub fn grant(&self, class: SolutionClass) -> Option<&Grant> {
        self.grants.iter().find(|g| g.class == class)
    }

    /// Grants ordered mild, non_impact, classical.
    pub fn grants(&self) -> &[Grant] {
        &self.grants
    }

    pub fn strongest(&self) -> Option<SolutionClass> {
        self.grants.last().map(|g| g.class)
    }

    fn add(&mut self, class: SolutionClass, clause: &'static str) {
        if !self.has(class) {
            self.grants.push(Grant { class, clause });
        }
    }

    fn close(&mut self) {
        if self.has(SolutionClass::Classical) {
            self.add(SolutionClass::NonImpact, "implied by classical");
        }
        if self.has(SolutionClass::NonImpact) {
            self.add(SolutionClass::Mild, "implied by non_impact");
        }
        self.grants.sort_by_key(|g| g.class);
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.grants.is_empty() {
            return f.write_str("none");
        }
        for (i, g) in self.grants.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} ({})", g.class, g.clause)?;
        }
        Ok(())
    }
}

/// Which solution classes the hypotheses of `problem` guarantee. Decided from
/// the weight classes, the zero-freeness of the symbol, the forcing's
/// capability flags and the initial data only; nothing is inferred from a
/// computed solution.
pub fn classify_solution(problem: &ProblemSpec) -> Classification {
    use SolutionClass::*;
    let mut out = Classification::default();
    let caps = problem.forcing.capabilities();
    let growth = caps.growth_bound || caps.lipschitz;
    let (lip, joint) = (caps.lipschitz, caps.joint_lipschitz);
    let y0z = problem.y0 == 0.0;
    let v0z = problem.v0 == 0.0;

    if !growth {
        out.notes
            .push("forcing has no growth bound |f(t,u)| <= h(t)|u|^a".into());
        return out;
    }

    if let (OrderWeight::Exponential { .. }, OrderWeight::Exponential { .. }) =
        (&problem.phi1, &problem.phi2)
    {
        out.add(NonImpact, "exponential weights, growth bound");
        if lip && y0z {
            out.add(
                Classical,
                "exponential weights, Lipschitz forcing, zero displacement",
            );
        }
    }

    let c1 = classify_weight(&problem.phi1, WeightRole::Phi1);
    let c2 = classify_weight(&problem.phi2, WeightRole::Phi2);
    let phi1_class = match &c1 {
        WeightClass::Phi1(c) => *c,
        other => {
            out.notes.push(format!("phi1 {other}"));
            out.close();
            return out;
        }
    };
    let phi1_top = problem.phi1.support().map_or(f64::NEG_INFINITY, |s| s.1);

    match c2 {
        WeightClass::Phi2(Phi2Class::AtomicBelowTwo) => {
            if !symbol_zero_free(&problem.phi2) {
                out.notes
                    .push("symbol of phi2 has zeros in Re s > 0".into());
                out.close();
                return out;
            }
            let (lo, hi) = problem.phi2.support().expect("phi2 is nonempty");
            let wide = hi - lo > 1.0;
            match phi1_class {
                Phi1Class::ContinuousBelowTwo => {
                    out.add(
                        Mild,
                        "continuous phi1 below order 2, atomic phi2, growth bound",
                    );
                    if y0z && wide {
                        out.add(
                            NonImpact,
                            "zero displacement, phi2 orders spread by more than 1",
                        );
                    }
                    if lip && y0z && v0z {
                        out.add(Classical, "Lipschitz forcing, zero initial data");
                    }
                }
                Phi1Class::ContinuousBelowOne => {
                    out.add(
                        NonImpact,
                        "continuous phi1 below order 1, atomic phi2, growth bound",
                    );
                    if lip && y0z {
                        out.add(
                            Classical,
                            "continuous phi1 below order 1, Lipschitz forcing, zero displacement",
                        );
                    } else if joint && y0z {
                        out.add(Classical, "continuous phi1 below order 1, jointly Lipschitz forcing, zero displacement");
                    }
                }
                Phi1Class::ContinuousNegative => {
                    out.add(Mild, "negative-order phi1, atomic phi2, growth bound");
                    if lip {
                        out.add(Classical, "negative-order phi1, Lipschitz forcing");
                    } else {
                        out.add(NonImpact, "negative-order phi1, growth bound");
                    }
                }
                Phi1Class::AtomicBelowTwo => {
                    out.add(Mild, "atomic phi1 and phi2, growth bound");
                    if y0z && wide {
                        out.add(
                            NonImpact,
                            "zero displacement, phi2 orders spread by more than 1",
                        );
                    } else if phi1_top < 1.0 {
                        out.add(NonImpact, "phi1 orders below 1");
                    }
                    if lip {
                        if y0z && v0z {
                            out.add(Classical, "Lipschitz forcing, zero initial data");
                        } else if phi1_top < 0.0 {
                            out.add(Classical, "phi1 without positive orders, Lipschitz forcing");
                        } else if phi1_top < 1.0 && y0z {
                            out.add(
                                Classical,
                                "phi1 orders below 1, Lipschitz forcing, zero displacement",
                            );
                        }
                    }
                }
            }
        }
        WeightClass::Phi2(Phi2Class::ContinuousUnit) => {
            out.add(Mild, "continuous phi2 on [0,1], growth bound");
            let sub_unit = phi1_top < 1.0;
            if sub_unit {
                out.add(NonImpact, "continuous phi2, phi1 supported below order 1");
            }
            if lip {
                if y0z && v0z {
                    out.add(
                        Classical,
                        "continuous phi2, Lipschitz forcing, zero initial data",
                    );
                } else if phi1_top < 0.0 {
                    out.add(
                        Classical,
                        "continuous phi2, negative-order phi1, Lipschitz forcing",
                    );
                } else if sub_unit && y0z {
                    out.add(
                        Classical,
                        "continuous phi2, phi1 below order 1, Lipschitz forcing, zero displacement",
                    );
                }
            }
        }
        other => out.notes.push(format!("phi2 {other}")),
    }
    out.close();
    out
}

fn symbol_zero_free(phi2: &OrderWeight) -> bool {
    match phi2 {
        OrderWeight::Atomic(a) if a.len() == 1 => true,
        _ => check_a0(phi2).map(|r| r.admissible).unwrap_or(false),
    }
}
