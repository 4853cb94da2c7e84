//! Iteration logs for the consensus solver.

use std::io::Write;

use crate::scalar::Real;

/// One outer-iteration snapshot of the consensus solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord<T> {
    /// Outer iteration number, starting at 1.
    pub t: usize,
    /// Norm of the primal residual `sum_i (r^i - g)`.
    pub eta_pri: T,
    /// Norm of the dual residual `g_t - g_{t-1}`.
    pub eta_dual: T,
    /// Augmented Lagrangian value at the end of the iteration.
    pub objective: T,
    /// Conjugate-gradient iterations summed over all clusters this round.
    pub cg_iters: usize,
    /// Inner FISTA iterations spent on the g-update this round.
    pub fista_iters: usize,
}

/// Full convergence history of a consensus run.
///
/// Hitting the iteration cap without meeting the tolerance is recorded in
/// `converged`, never raised as an error: the caller still gets the final
/// iterates and the history that explains them.
#[derive(Debug, Clone, Default)]
pub struct SolverReport<T> {
    /// One record per completed outer iteration, in order.
    pub records: Vec<IterationRecord<T>>,
    /// Whether both residual norms fell below the tolerance.
    pub converged: bool,
}

impl<T: Real> SolverReport<T> {
    /// An empty report (no iterations yet, not converged).
    pub fn new() -> Self {
        Self {
            records: Vec::new(),
            converged: false,
        }
    }

    /// Renders the history as a comma-separated log, one line per
    /// iteration:
    ///
    /// ```text
    /// t, ||eta_pri||, ||eta_dual||, objective, cg_iters_total, fista_iters
    /// ```
    pub fn to_log(&self) -> String {
        let mut out = String::from("# t, eta_pri, eta_dual, objective, cg_iters_total, fista_iters\n");
        for r in &self.records {
            out.push_str(&format!(
                "{}, {:.6e}, {:.6e}, {:.6e}, {}, {}\n",
                r.t, r.eta_pri, r.eta_dual, r.objective, r.cg_iters, r.fista_iters
            ));
        }
        out
    }

    /// Writes [`Self::to_log`] to a writer.
    pub fn write_log(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(self.to_log().as_bytes())
    }
}
