//! The pipeline steps, in execution order.

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub name: &'static str,
    pub text: &'static str,
}

pub const STEPS: [Step; 9] = [
    Step {
        name: "input-residual",
        text: "Checks that every input map is symplectic: max |J^T Omega J - Omega| over seeded \
               sample points must stay below tolerances.residual_gate. Runs before any other step.",
    },
    Step {
        name: "normalization",
        text: "Translates the limit to fix the origin and applies linear symplectic charts so \
               that its graph projects onto the base; produces the slope bound A = 2|w| and the \
               radius r0 on which the projection stays nondegenerate. The window radius r must \
               satisfy 0 < r < r0/4.",
    },
    Step {
        name: "approximation",
        text: "Replaces each map by the time-one map of a compactly supported Hamiltonian \
               isotopy within e_n on B_{r0} (default schedule e_n = 1/n). The schedule must be \
               non-increasing and shrink to at most tolerances.schedule_tail_ratio * e_1.",
    },
    Step {
        name: "window-bound",
        text: "Samples the graph window: base in B_r and fiber in B_{3Ar} must force fiber in \
               B_{2Ar}. N_r is the least n from which this holds for every later map. The \
               sufficient condition d(psi_n, psi) < Ar/(A+1) is reported alongside.",
    },
    Step {
        name: "degree-gate",
        text: "For every n >= N_r, the base projection of the windowed twisted graph onto B_r \
               must have degree 1 at the origin.",
    },
    Step {
        name: "ladder",
        text: "Slopes c1 = (3Ar)^-1 and c2 = (2Ar)^-1 give the cut-off parameters, the split \
               radius r1, and four nested windows shrunk by mu_i = (5 - i)/100 from the slices \
               (-r1/8, -r1/16), (-r1/4, 0), (-r1/2, r1/2), (-r1, r1). The nesting margin must \
               be positive.",
    },
    Step {
        name: "section",
        text: "The limit graph must be a section of the base projection over the window: \
               |det dx'/dxi| stays above tolerances.section_floor times its value at 0.",
    },
    Step {
        name: "hull-convergence",
        text: "For base points in B_r, the convex hull of the fiber of each graph is compared \
               with the fiber point of the limit. The distance must be non-increasing for \
               n >= N_r up to tolerances.monotone.",
    },
    Step {
        name: "verdict",
        text: "Fits the tangent plane of the limit's twisted graph at 0 by Gaussian-weighted \
               least squares on samples within 1e-2 * r0, then reports whether the plane is \
               coisotropic, together with the fit residual.",
    },
];

pub fn describe(name: &str) -> Result<&'static str, BenchError> {
    STEPS
        .iter()
        .find(|s| s.name == name)
        .map(|s| s.text)
        .ok_or_else(|| BenchError::UnknownStep(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog() {
        assert!(describe("degree-gate").unwrap().contains("degree 1"));
        assert!(describe("ladder").unwrap().contains("c1 = (3Ar)^-1"));
        assert!(matches!(describe("nope"), Err(BenchError::UnknownStep(_))));
    }
}
