//! Optimization engines for the order-domination programs: a dense simplex,
//! two log-det barrier SDP templates, and the cutting-plane driver.

mod barrier;
mod block_sdp;
mod cutting_plane;
mod diag_sdp;
mod lp;

pub use block_sdp::{solve_blockmaxdiag_sdp, BlockMaxDiagProblem, BlockMaxDiagSolution};
pub use cutting_plane::{
    build_certificate, check_pool_feasible, psd_schur_norm, separation_oracle, solve_program_p, violated_cuts, Cut,
    CutPool, CutSign, ProgramPSolution, MAX_CUTS_PER_DIM, POOL_FEAS_TOL,
};
pub use diag_sdp::{solve_diag_sdp, DiagSdpProblem, DiagSdpSolution};
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus, LP_TOL};
