#pragma once

#include <cstdint>

#include "coopq/types.hpp"

namespace coopq {

// Brute-force ground truth on the full 3^N product space: exact state
// construction from a tanglemeter matrix, matrix-free Hamiltonian
// application in the rotating frame, norm-preserving time evolution, and
// comparison reports against the analytic modules.
//
// Basis encoding: site levels {-1, 0, +1} map to base-3 digits {0, 1, 2},
// site 0 least significant.  States are not normalized (the collective
// state construction is not), so observables divide by <psi|psi>.

inline constexpr int kMaxQutrits = 12;       // 531441 amplitudes
inline constexpr int kMaxDenseQutrits = 6;   // dense-exponential cross-check path

class StateVector {
  public:
    explicit StateVector(int n_qutrits);

    int n_qutrits() const { return n_; }
    std::int64_t dim() const { return static_cast<std::int64_t>(amps_.size()); }
    Complex& operator[](std::int64_t b) { return amps_[static_cast<std::size_t>(b)]; }
    const Complex& operator[](std::int64_t b) const { return amps_[static_cast<std::size_t>(b)]; }
    std::vector<Complex>& amplitudes() { return amps_; }
    const std::vector<Complex>& amplitudes() const { return amps_; }

    double norm_sq() const;

    // All qutrits in the middle level.
    static StateVector vacuum(int n_qutrits);

  private:
    int n_;
    std::vector<Complex> amps_;
};

// digit of site i in basis index b
int site_level(std::int64_t b, int site);                 // returns digit 0/1/2
std::int64_t with_site_level(std::int64_t b, int site, int digit);
std::int64_t vacuum_index(int n_qutrits);

// |Psi_W> = exp( sum_{i,j} W_ij t_i^+ u_j^+ ) |O>, expanded as a finite sum
// (the per-site raising operators are nilpotent).  Diagonal entries of W do
// not act: u_i^+ t_i^+ |0>_i = 0.
StateVector state_from_tanglemeter(const TanglemeterMatrix& W);

// H |psi> with H = alpha * (number of sites at level +-1)
//              + sum_{i != j} V_ji (u_j^+ + t_j^-)(u_i^- + t_i^+).
// `interaction_scale` exposes the pair-sum convention toggle (1 applies the
// ordered double sum verbatim, 2 doubles it).
StateVector apply_hamiltonian(const StateVector& psi, const CouplingMatrix& V, double alpha,
                              double interaction_scale = 1.0);

struct EvolveOptions {
    double tol = 1e-9;            // unitarity drift budget for the whole run
    int krylov_dim = 24;
    double interaction_scale = 1.0;
    bool use_dense = false;       // dense eigendecomposition path (N <= 6)
};

// Norm-preserving evolution under a piecewise-constant detuning schedule.
StateVector evolve(const StateVector& psi0, const CouplingMatrix& V,
                   const DetuningSchedule& sched, double t, const EvolveOptions& opts = {});

struct LevelPopulations {
    double n_upper = 0.0;   // expected sites at level +1
    double n_middle = 0.0;  // level 0
    double n_lower = 0.0;   // level -1
};

LevelPopulations measure_populations(const StateVector& psi);

// Leading-order inversion of the collective-state construction: W_ij is the
// amplitude of (site i at +1, site j at -1, rest middle) relative to the
// vacuum amplitude.  Requires a nonzero vacuum amplitude.
MatrixXcd extract_tanglemeter(const StateVector& psi);

// ── Analytic-vs-exact comparison ─────────────────────────────────────────

struct ScaleError {
    double scale = 0.0;
    double n1_exact = 0.0;
    double n1_analytic = 0.0;
    double rel_error = 0.0;
};

struct OracleReport {
    int n_qutrits = 0;
    double alpha = 0.0;
    double t = 0.0;
    std::vector<ScaleError> errors;      // one row per coupling scale
    std::vector<double> orders;          // empirical order between rows
    double norm_exact = 0.0;             // at the last scale
    double norm_formula = 0.0;
    double tanglemeter_max_dev = 0.0;    // max |W_extracted - W_analytic| off-diagonal
};

// Runs exact vs trace-formula populations at each coupling scale and
// estimates the empirical convergence order from consecutive error ratios.
OracleReport compare_analytic_vs_exact(const CouplingMatrix& V_base,
                                       const std::vector<double>& scales, double alpha, double t,
                                       const EvolveOptions& opts = {});

// Hollow constant coupling whose largest eigenvalue equals `collective`
// exactly (off-diagonal value collective/(n-1)).
CouplingMatrix collective_coupling(int n_qutrits, double collective);

}  // namespace coopq
