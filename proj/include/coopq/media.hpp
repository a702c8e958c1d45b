#pragma once

#include <cstdint>
#include <functional>

#include "coopq/types.hpp"

namespace coopq {

// Random dipole geometry, coupling construction, spectral decomposition and
// eigenvalue-density statistics for 1/r^3 media.

struct GeometrySample {
    // Row i holds the (x, y, z) position of dipole i in the unit cube.
    MatrixXd positions;
    std::uint64_t seed = 0;

    int size() const { return static_cast<int>(positions.rows()); }
};

// Uniform i.i.d. positions in the unit cube, deterministic for a given
// seed.  Points closer than cfg.min_separation to an accepted point are
// redrawn, so 1/r^3 couplings stay finite.
GeometrySample sample_geometry(int n_dipoles, std::uint64_t seed,
                               const PhysicalConfig& cfg = {});

// Pairwise couplings V_ij = mu^2 (1 - c cos^2 theta_ij) / r_ij^3 with theta
// measured from the z axis; symmetric, zero diagonal.
CouplingMatrix coupling_from_geometry(const GeometrySample& g, const PhysicalConfig& cfg = {});

// Full symmetric eigendecomposition, eigenvalues ascending.
SpectralDecomposition decompose(const CouplingMatrix& V);
// Eigenvalues only (cheaper when the modes are not needed).
VectorXd eigenvalues_only(const CouplingMatrix& V);

// ── Eigenvalue density ───────────────────────────────────────────────────

// Average of per-matrix eigenvalue densities, so the density integrates to
// (in-range eigenvalues per sample).  Eigenvalues are recorded in units of
// the mean-density coupling scale mu^2 n (n = dipoles per unit volume);
// with that scaling the central peak sits at |V| < 1 for any N.
struct EigenvalueHistogram {
    std::vector<double> bin_edges;  // size bins + 1
    std::vector<double> density;    // size bins, per-matrix average
    int n_samples = 0;
    int n_dipoles = 0;
    std::int64_t n_total = 0;     // pooled eigenvalue count
    std::int64_t n_in_range = 0;  // eigenvalues inside [edges.front(), edges.back()]

    int bins() const { return static_cast<int>(density.size()); }
    double bin_width() const { return bin_edges[1] - bin_edges[0]; }
    double center(int b) const { return 0.5 * (bin_edges[b] + bin_edges[b + 1]); }
};

// Diagnostics accumulated alongside the histogram.
struct SpectrumStats {
    double max_trace_ratio = 0.0;  // max over samples of |sum V_m| / ||V||_F
    // Raw pooled central moments of the scaled eigenvalues (no range cut).
    double mean = 0.0;
    double stddev = 0.0;
    double skewness = 0.0;
};

struct SpectrumParams {
    int n_dipoles = 300;
    int n_samples = 100;
    int bins = 201;
    double range_min = -25.0;
    double range_max = 25.0;
    std::uint64_t seed = 1;
    int threads = 1;
    PhysicalConfig physical{};
};

// Monte Carlo eigenvalue density.  Sample k draws its seed from
// derive_seed(seed, k) and results are merged in sample order, so the
// output is bit-identical for any thread count.
EigenvalueHistogram eigenvalue_density(const SpectrumParams& params,
                                       SpectrumStats* stats = nullptr,
                                       std::vector<VectorXd>* raw_spectra = nullptr);

// ── Heuristic density fit ────────────────────────────────────────────────

// The printed fit is typographically ambiguous about what divides what;
// both readings are provided and `denominator` is the default (the other
// one is not normalizable near zero).
enum class FitGrouping { denominator, prefactor };

// Heuristic fit g(V) to the eigenvalue density, extended symmetrically to
// V < 0; V is in units of mu^2 n.  Rejects V = 0 (pole).
double spectral_density_fit(double V, int n_dipoles,
                            FitGrouping grouping = FitGrouping::denominator);

}  // namespace coopq
