#pragma once

#include "coopq/types.hpp"

namespace coopq {

// Closed-form constant-detuning dynamics of the collective qutrit state.
// Everything factorizes over the coupling-matrix modes; the per-mode
// frequency-squared is z2 = alpha (alpha + 2 V), which may have either
// sign.  All evaluations below are functions of z2 only, so they are
// independent of the branch chosen for z = sqrt(z2).

namespace detail {

// z cot(z t) as a function of z2 = z^2; series below |z t| ~ 1e-4.
double cot_scaled(double z2, double t);
// sin(z t)/z as a function of z2; hyperbolic for z2 < 0.
double sinc_scaled(double z2, double t);
// cos(z t) as a function of z2; cosh for z2 < 0.
double cos_scaled(double z2, double t);

}  // namespace detail

// Per-mode tanglemeter amplitude w(V, alpha, t) for a mode of eigenvalue V
// at constant detuning alpha.  w(., ., 0) = 0 and w(0, ., .) = 0; at the
// resonance alpha = -V the amplitude is -i tanh(V t).
Complex mode_amplitude(double V, double alpha, double t);

// Full tanglemeter matrix W = C diag(w(V_m)) C^T from a spectral
// decomposition; complex symmetric and normal.
TanglemeterMatrix tanglemeter_matrix(const SpectralDecomposition& sd, double alpha, double t);

// Norm and upper-level population of the collective state described by W:
//   norm    = exp(Tr WW+)
//   n1      = Tr WW+/(1 - WW+)
// Throws SingularPopulationError when the spectral radius of WW+ reaches 1.
PopulationResult population_from_tanglemeter(const TanglemeterMatrix& W);

// Upper-level population by the trace formula
//   n1 = sum_m V_m^2 sin^2(t z_m)/z_m^2,  z_m^2 = alpha(alpha + 2 V_m),
// finite for every sign of z_m^2 (the z -> 0 limit is V_m^2 t^2).
double population_trace(const VectorXd& eigenvalues, double alpha, double t);
double population_trace(const SpectralDecomposition& sd, double alpha, double t);

// Collective-coupling population for the rank-one case with single
// eigenvalue NV:
//   n1 = (NV)^2 sin^2[t sqrt(alpha(2NV+alpha))] / (alpha(2NV+alpha)),
// implemented independently of population_trace so that the rank-one
// consistency check is a genuine cross-validation.  At alpha = -NV this is
// sinh^2(NV t).
double population_collective(double NV, double alpha, double t);

// ── Figure-data sweeps ───────────────────────────────────────────────────

struct SweepPoint {
    double x = 0.0;  // coupling v = NV, or scaled time
    double y = 0.0;  // detuning alpha (possibly scaled)
    double n1 = 0.0;
};

// Collective population over a (v, alpha) grid at fixed t.
std::vector<SweepPoint> sweep_collective(const std::vector<double>& v_grid,
                                         const std::vector<double>& alpha_grid, double t);

// Ensemble-averaged population over a (t, alpha) grid; `spectra` holds the
// raw eigenvalues of each sampled coupling matrix.  When `scaled_axes` is
// set, the grid values are interpreted in the cooperative units
// t_scaled = t N^(3/2), alpha_scaled = alpha / N^(3/2).
std::vector<SweepPoint> sweep_ensemble(const std::vector<VectorXd>& spectra, int n_dipoles,
                                       const std::vector<double>& t_grid,
                                       const std::vector<double>& alpha_grid, bool scaled_axes);

}  // namespace coopq
