#include "coopq/types.hpp"

#include <cmath>
#include <sstream>

namespace coopq {

CouplingMatrix CouplingMatrix::from_raw(const MatrixXd& raw, Strictness mode,
                                        std::vector<std::string>* warnings) {
    if (raw.rows() != raw.cols())
        throw ValidationError("coupling matrix must be square, got " +
                              std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
    if (raw.rows() == 0) throw ValidationError("coupling matrix must be non-empty");
    if (!raw.allFinite()) throw ValidationError("coupling matrix has non-finite entries");

    const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
    const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
        if (mode == Strictness::strict) {
            std::ostringstream os;
            os << "coupling matrix asymmetric (max deviation " << asym << ")";
            throw ValidationError(os.str());
        }
        if (warnings) warnings->push_back("coupling matrix symmetrized");
    }
    MatrixXd v = 0.5 * (raw + raw.transpose());

    if (v.diagonal().cwiseAbs().maxCoeff() > 0.0) {
        if (warnings) warnings->push_back("nonzero coupling diagonal zeroed");
        v.diagonal().setZero();
    }
    return CouplingMatrix(std::move(v));
}

DetuningSchedule DetuningSchedule::make(const std::vector<Segment>& segments) {
    if (segments.empty()) throw ValidationError("schedule needs at least one segment");
    double total = 0.0;
    for (const auto& s : segments) {
        if (!(s.duration > 0.0))
            throw ValidationError("schedule segment durations must be positive");
        if (!std::isfinite(s.alpha)) throw ValidationError("schedule alpha must be finite");
        total += s.duration;
    }
    return DetuningSchedule(segments, total);
}

DetuningSchedule DetuningSchedule::constant(double alpha, double duration) {
    return make({{duration, alpha}});
}

DetuningSchedule DetuningSchedule::switched(double alpha, double t1, double t2,
                                            double total_duration) {
    if (!(0.0 <= t1 && t1 <= t2 && t2 <= total_duration))
        throw ValidationError("switch protocol needs 0 <= t1 <= t2 <= total duration");
    std::vector<Segment> segs;
    if (t1 > 0.0) segs.push_back({t1, alpha});
    if (t2 > t1) segs.push_back({t2 - t1, 0.0});
    if (total_duration > t2) segs.push_back({total_duration - t2, alpha});
    if (segs.empty()) segs.push_back({total_duration > 0 ? total_duration : 1.0, alpha});
    return make(segs);
}

double DetuningSchedule::alpha_at(double t) const {
    if (t < 0.0 || t > total_) throw ValidationError("schedule queried outside [0, total]");
    double acc = 0.0;
    for (const auto& s : segments_) {
        acc += s.duration;
        if (t < acc) return s.alpha;
    }
    return segments_.back().alpha;  // right endpoint
}

double DetuningSchedule::integral(double t) const {
    if (t < 0.0 || t > total_ + 1e-12 * std::max(1.0, total_))
        throw ValidationError("schedule integral outside [0, total]");
    double acc = 0.0, out = 0.0;
    for (const auto& s : segments_) {
        const double tau = std::min(s.duration, t - acc);
        if (tau <= 0.0) break;
        out += s.alpha * tau;
        acc += s.duration;
    }
    return out;
}

}  // namespace coopq
