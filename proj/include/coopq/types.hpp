#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace coopq {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// ── Errors ───────────────────────────────────────────────────────────────

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input values (rejected before any numerics run).
struct ValidationError : Error {
    using Error::Error;
};

// Numerical blow-up; message carries the location (time / parameters).
struct DivergenceError : Error {
    using Error::Error;
};

// Spectral radius of WW+ reached 1: the closed-form population leaves its
// domain, which coincides with leaving the weak-deviation regime.
struct SingularPopulationError : Error {
    using Error::Error;
};

struct EigensolverError : Error {
    using Error::Error;
};

// ── Physical configuration ───────────────────────────────────────────────

// Couplings are mu^2 (1 - c cos^2 theta) / r^3 with theta measured from the
// z axis.  The angular coefficient c defaults to 2; the sampling region is
// the unit cube, so the number density equals the dipole count.
struct PhysicalConfig {
    double mu = 1.0;
    double angular_coefficient = 2.0;
    double min_separation = 1e-3;  // pairs closer than this are resampled

    void validate() const {
        if (!(mu > 0.0)) throw ValidationError("PhysicalConfig: mu must be positive");
        if (!std::isfinite(angular_coefficient))
            throw ValidationError("PhysicalConfig: angular coefficient must be finite");
        if (!(min_separation > 0.0))
            throw ValidationError("PhysicalConfig: min_separation must be positive");
    }
};

// ── Coupling matrix ──────────────────────────────────────────────────────

enum class Strictness { strict, lenient };

// Real symmetric pairwise coupling matrix with zero diagonal (h-bar = 1).
// Immutable after construction; safe to share across threads.
class CouplingMatrix {
  public:
    // Validates a raw square array: symmetry is enforced (rejected in strict
    // mode, symmetrized in lenient mode), the diagonal is forced to zero and
    // finiteness is checked.  Warnings (e.g. a nonzero diagonal that was
    // zeroed) are appended to *warnings when provided.
    static CouplingMatrix from_raw(const MatrixXd& raw, Strictness mode = Strictness::strict,
                                   std::vector<std::string>* warnings = nullptr);

    int size() const { return static_cast<int>(values_.rows()); }
    const MatrixXd& values() const { return values_; }
    double operator()(int i, int j) const { return values_(i, j); }

  private:
    explicit CouplingMatrix(MatrixXd v) : values_(std::move(v)) {}
    MatrixXd values_;
};

// ── Spectral decomposition ───────────────────────────────────────────────

// Eigenvalues (ascending) and orthonormal eigenvectors of a CouplingMatrix;
// columns of `modes` are the eigenvectors.
struct SpectralDecomposition {
    VectorXd eigenvalues;
    MatrixXd modes;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

// ── Tanglemeter matrix ───────────────────────────────────────────────────

// Complex pair-correlation matrix W of the collective state.  For W built
// from a real symmetric coupling it is complex symmetric and normal.
struct TanglemeterMatrix {
    MatrixXcd values;

    int size() const { return static_cast<int>(values.rows()); }
    // Tr WW+ = sum |W_ij|^2, the smallness diagnostic of the weak-deviation
    // regime (must stay well below the qutrit count).
    double weight() const { return values.squaredNorm(); }
};

// ── Detuning schedule ────────────────────────────────────────────────────

// Piecewise-constant detuning alpha(t); right-continuous at the switch
// times.  Immutable after construction.
class DetuningSchedule {
  public:
    struct Segment {
        double duration;
        double alpha;
    };

    static DetuningSchedule make(const std::vector<Segment>& segments);

    // Convenience: constant alpha for the given duration.
    static DetuningSchedule constant(double alpha, double duration);

    // The on-off-on switch protocol: alpha until t1, zero until t2, alpha
    // again until total_duration.
    static DetuningSchedule switched(double alpha, double t1, double t2, double total_duration);

    double alpha_at(double t) const;
    // Closed-form integral of alpha over [0, t].
    double integral(double t) const;
    double total_duration() const { return total_; }
    const std::vector<Segment>& segments() const { return segments_; }

  private:
    DetuningSchedule(std::vector<Segment> segs, double total)
        : segments_(std::move(segs)), total_(total) {}
    std::vector<Segment> segments_;
    double total_ = 0.0;
};

// ── Population result ────────────────────────────────────────────────────

// Upper-level population and norm of the collective state, together with
// the smallness diagnostic w_trace = Tr WW+.  `valid_regime` is false once
// w_trace reaches a tenth of the qutrit count.
struct PopulationResult {
    double n1 = 0.0;
    double norm = 1.0;
    double w_trace = 0.0;
    bool valid_regime = true;
};

}  // namespace coopq
