#include "coopq/media.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "coopq/rng.hpp"

namespace coopq {

namespace {

// Static split of [0, n) across workers; results land in caller-owned slots
// indexed by task, so the merge order never depends on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

GeometrySample sample_geometry(int n_dipoles, std::uint64_t seed, const PhysicalConfig& cfg) {
    if (n_dipoles < 1) throw ValidationError("sample_geometry: need at least one dipole");
    cfg.validate();

    Xoshiro256 rng(seed);
    MatrixXd pos(n_dipoles, 3);
    const double r2min = cfg.min_separation * cfg.min_separation;
    for (int i = 0; i < n_dipoles; ++i) {
        long attempts = 0;
        for (;;) {
            const double x = rng.uniform(), y = rng.uniform(), z = rng.uniform();
            bool ok = true;
            for (int j = 0; j < i; ++j) {
                const double dx = x - pos(j, 0), dy = y - pos(j, 1), dz = z - pos(j, 2);
                if (dx * dx + dy * dy + dz * dz < r2min) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                pos(i, 0) = x;
                pos(i, 1) = y;
                pos(i, 2) = z;
                break;
            }
            if (++attempts > 1000000)
                throw ValidationError("sample_geometry: cannot satisfy min_separation");
        }
    }
    return GeometrySample{std::move(pos), seed};
}

CouplingMatrix coupling_from_geometry(const GeometrySample& g, const PhysicalConfig& cfg) {
    cfg.validate();
    const int n = g.size();
    const double mu2 = cfg.mu * cfg.mu;
    MatrixXd V = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = g.positions(i, 0) - g.positions(j, 0);
            const double dy = g.positions(i, 1) - g.positions(j, 1);
            const double dz = g.positions(i, 2) - g.positions(j, 2);
            const double r2 = dx * dx + dy * dy + dz * dz;
            if (r2 == 0.0) throw ValidationError("coupling_from_geometry: coincident dipoles");
            const double cos2 = dz * dz / r2;  // z axis is the quantization direction
            const double v = mu2 * (1.0 - cfg.angular_coefficient * cos2) / (r2 * std::sqrt(r2));
            V(i, j) = v;
            V(j, i) = v;
        }
    }
    return CouplingMatrix::from_raw(V, Strictness::strict);
}

SpectralDecomposition decompose(const CouplingMatrix& V) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(V.values());
    if (es.info() != Eigen::Success)
        throw EigensolverError("symmetric eigendecomposition did not converge (n=" +
                               std::to_string(V.size()) + ")");
    return SpectralDecomposition{es.eigenvalues(), es.eigenvectors()};
}

VectorXd eigenvalues_only(const CouplingMatrix& V) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(V.values(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw EigensolverError("symmetric eigendecomposition did not converge (n=" +
                               std::to_string(V.size()) + ")");
    return es.eigenvalues();
}

EigenvalueHistogram eigenvalue_density(const SpectrumParams& params, SpectrumStats* stats,
                                       std::vector<VectorXd>* raw_spectra) {
    if (params.n_samples < 1) throw ValidationError("eigenvalue_density: n_samples >= 1");
    if (params.bins < 1) throw ValidationError("eigenvalue_density: bins >= 1");
    if (!(params.range_min < params.range_max))
        throw ValidationError("eigenvalue_density: empty range");

    const int B = params.bins, S = params.n_samples, N = params.n_dipoles;
    const double lo = params.range_min, hi = params.range_max;
    const double width = (hi - lo) / B;
    // Unit cube: number density n equals the dipole count.
    const double scale = params.physical.mu * params.physical.mu * static_cast<double>(N);

    struct SampleOut {
        std::vector<double> counts;
        double trace_ratio = 0.0;
        double s1 = 0.0, s2 = 0.0, s3 = 0.0;  // raw pooled moments, scaled units
        std::int64_t in_range = 0;
        VectorXd ev;
    };
    std::vector<SampleOut> slots(static_cast<std::size_t>(S));

    const bool keep_raw = raw_spectra != nullptr;
    parallel_for(S, params.threads, [&](int k) {
        auto& out = slots[static_cast<std::size_t>(k)];
        out.counts.assign(static_cast<std::size_t>(B), 0.0);
        const auto g = sample_geometry(N, derive_seed(params.seed, static_cast<std::uint64_t>(k)),
                                       params.physical);
        const auto V = coupling_from_geometry(g, params.physical);
        const VectorXd ev = eigenvalues_only(V);
        out.trace_ratio = std::abs(ev.sum()) / std::max(1e-300, V.values().norm());
        for (int m = 0; m < ev.size(); ++m) {
            const double v = ev(m) / scale;
            out.s1 += v;
            out.s2 += v * v;
            out.s3 += v * v * v;
            if (v >= lo && v < hi) {
                const int b = std::min(B - 1, static_cast<int>((v - lo) / width));
                out.counts[static_cast<std::size_t>(b)] += 1.0;
                ++out.in_range;
            } else if (v == hi) {
                out.counts[static_cast<std::size_t>(B - 1)] += 1.0;
                ++out.in_range;
            }
        }
        if (keep_raw) out.ev = ev;
    });

    EigenvalueHistogram h;
    h.bin_edges.resize(static_cast<std::size_t>(B) + 1);
    for (int b = 0; b <= B; ++b) h.bin_edges[static_cast<std::size_t>(b)] = lo + b * width;
    h.density.assign(static_cast<std::size_t>(B), 0.0);
    h.n_samples = S;
    h.n_dipoles = N;

    double s1 = 0.0, s2 = 0.0, s3 = 0.0, max_tr = 0.0;
    for (auto& slot : slots) {  // fixed merge order: sample index
        for (int b = 0; b < B; ++b)
            h.density[static_cast<std::size_t>(b)] += slot.counts[static_cast<std::size_t>(b)];
        h.n_in_range += slot.in_range;
        s1 += slot.s1;
        s2 += slot.s2;
        s3 += slot.s3;
        max_tr = std::max(max_tr, slot.trace_ratio);
        if (keep_raw) raw_spectra->push_back(std::move(slot.ev));
    }
    h.n_total = static_cast<std::int64_t>(S) * N;
    for (auto& d : h.density) d /= (static_cast<double>(S) * width);

    if (stats) {
        const double n = static_cast<double>(h.n_total);
        const double mean = s1 / n;
        const double var = std::max(0.0, s2 / n - mean * mean);
        const double sd = std::sqrt(var);
        const double m3 = s3 / n - 3.0 * mean * var - mean * mean * mean;
        stats->mean = mean;
        stats->stddev = sd;
        stats->skewness = sd > 0.0 ? m3 / (sd * sd * sd) : 0.0;
        stats->max_trace_ratio = max_tr;
    }
    return h;
}

double spectral_density_fit(double V, int n_dipoles, FitGrouping grouping) {
    if (V == 0.0) throw ValidationError("spectral_density_fit: pole at V = 0");
    const double v = std::abs(V);  // symmetric about zero
    const double N = static_cast<double>(n_dipoles);
    const double e = std::exp(std::sqrt(std::numbers::pi / 2.0));
    const double ch = std::cosh(std::log(4.0 * v) / std::sqrt(std::numbers::pi));
    if (grouping == FitGrouping::denominator) return N / (4.0 * v * e * ch);
    return N / (4.0 * v) * e * ch;
}

}  // namespace coopq
