#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "bose/hamiltonian.hpp"

namespace bose {

enum class Direction { forward, backward };

/// Complex amplitudes over a FockBasis; unit norm is an invariant that every
/// evolution re-checks.
struct StateVector {
    const FockBasis* basis = nullptr;
    VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }

    static StateVector basis_state(const FockBasis& b, const FockState& s) {
        const long idx = b.index_of(s);
        if (idx < 0) throw validation_error("StateVector: state not in basis");
        StateVector out;
        out.basis = &b;
        out.amplitudes = VectorXcd::Zero(static_cast<Eigen::Index>(b.dimension()));
        out.amplitudes(idx) = 1.0;
        return out;
    }
};

namespace detail {

inline void check_norm(const StateVector& psi, const char* where) {
    const double drift = std::abs(psi.norm() - 1.0);
    if (drift > 1e-8)
        throw numerical_error(std::string(where) + ": norm drifted by " + std::to_string(drift));
}

}  // namespace detail

/// Time-ordered evolution of psi0 over the window [t0, t1] of the schedule,
/// restricted to terms inside `region`. Piecewise-constant segments make the
/// time ordering a plain product of matrix exponentials; partial segments are
/// split, never interpolated.
inline StateVector evolve_window(const CouplingSchedule& schedule, const StateVector& psi0,
                                 double t0, double t1, const Region& region = Region{},
                                 Direction dir = Direction::forward) {
    if (t1 < t0) throw validation_error("evolve_window: t1 < t0");
    if (t1 > schedule.total_duration() + 1e-12)
        throw validation_error("evolve_window: window exceeds schedule duration");
    if (std::abs(psi0.norm() - 1.0) > 1e-8)
        throw validation_error("evolve_window: initial state not normalised");

    StateVector psi = psi0;
    const double sign = (dir == Direction::forward) ? 1.0 : -1.0;
    double seg_start = 0.0;
    // Backward direction is the adjoint of the whole window: the segment
    // exponentials are conjugated and applied in reverse order.
    std::vector<std::pair<const ScheduleSegment*, double>> slices;
    for (const auto& seg : schedule.segments()) {
        const double seg_end = seg_start + seg.duration;
        const double lo = std::max(t0, seg_start);
        const double hi = std::min(t1, seg_end);
        if (hi - lo > 1e-15) slices.emplace_back(&seg, hi - lo);
        seg_start = seg_end;
        if (seg_start >= t1) break;
    }
    if (dir == Direction::backward) std::reverse(slices.begin(), slices.end());
    for (const auto& [seg, dt] : slices) {
        const MatrixXcd h = build_hamiltonian(*seg, schedule.interaction_v(), *psi.basis, region);
        psi.amplitudes = evolution_operator(h, sign * dt) * psi.amplitudes;
    }
    detail::check_norm(psi, "evolve_window");
    return psi;
}

/// Exact global evolution for time t from the start of the schedule.
inline StateVector evolve_exact(const CouplingSchedule& schedule, const StateVector& psi0,
                                double t) {
    if (t < 0.0) throw validation_error("evolve_exact: negative time");
    return evolve_window(schedule, psi0, 0.0, t);
}

/// Evolution under H_R only: the sum of terms supported completely in region.
inline StateVector evolve_region(const CouplingSchedule& schedule, const StateVector& psi0,
                                 double t, const Region& region,
                                 Direction dir = Direction::forward) {
    if (t < 0.0) throw validation_error("evolve_region: negative time");
    return evolve_window(schedule, psi0, 0.0, t, region, dir);
}

}  // namespace bose
