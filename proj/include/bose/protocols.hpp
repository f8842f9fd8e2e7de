#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bose/lattice.hpp"
#include "bose/numerics.hpp"

namespace bose {

/// One pulse of a free-particle protocol: a set of simultaneous couplings
/// held for `duration`, followed by instantaneous on-site phase rotations
/// (on-site strength is unconstrained, so their duration is recorded as 0).
struct ProtocolSegment {
    double duration = 0.0;
    std::vector<std::tuple<int, int, Complex>> couplings;  // (i, j, J_ij), i<j half
    std::vector<std::pair<int, double>> phase_shifts;      // site -> angle of e^{i phi n}
};

/// Record of a synthesized protocol on the single-particle sector.
struct ProtocolTrace {
    std::vector<ProtocolSegment> segments;
    double total_time = 0.0;
    VectorXcd achieved;  // single-particle amplitudes after the last segment
    double fidelity = 0.0;
    double leakage = 1.0;
    bool degenerate = false;  // column already localised; identity returned
};

namespace detail {

inline MatrixXcd single_particle_hamiltonian(int m, const ProtocolSegment& seg) {
    MatrixXcd h = MatrixXcd::Zero(m, m);
    for (const auto& [i, j, val] : seg.couplings) {
        h(i, j) += val;
        h(j, i) += std::conj(val);
    }
    return h;
}

inline void check_caps(const LatticeGeometry& geom, const ProtocolSegment& seg, double alpha) {
    for (const auto& [i, j, val] : seg.couplings) {
        const double cap = std::pow(geom.distance(i, j), -alpha);
        if (std::abs(val) > cap * (1.0 + 1e-9))
            throw cap_violation_error("protocol coupling exceeds the power-law cap at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
    }
}

inline void run_segments(const LatticeGeometry& geom, double alpha, ProtocolTrace& trace,
                         VectorXcd& psi) {
    for (const auto& seg : trace.segments) {
        check_caps(geom, seg, alpha);
        const MatrixXcd h = single_particle_hamiltonian(geom.site_count(), seg);
        psi = evolution_operator(h, seg.duration) * psi;
        for (const auto& [site, angle] : seg.phase_shifts)
            psi(site) *= std::exp(Complex(0.0, angle));
    }
}

/// Align achieved phases with the target by instantaneous on-site rotations;
/// appends them to the last segment. Magnitude errors are untouched, so the
/// fidelity still reflects them honestly.
inline void append_phase_fix(ProtocolTrace& trace, VectorXcd& psi, const VectorXcd& target) {
    if (trace.segments.empty()) trace.segments.emplace_back();
    auto& seg = trace.segments.back();
    for (Eigen::Index k = 0; k < target.size(); ++k) {
        if (std::abs(target(k)) < 1e-12 || std::abs(psi(k)) < 1e-15) continue;
        const double angle = std::arg(target(k)) - std::arg(psi(k));
        if (std::abs(angle) < 1e-15) continue;
        seg.phase_shifts.emplace_back(static_cast<int>(k), angle);
        psi(k) *= std::exp(Complex(0.0, angle));
    }
}

inline void finalize(ProtocolTrace& trace, const VectorXcd& psi, const VectorXcd& target) {
    trace.achieved = psi;
    trace.total_time = 0.0;
    for (const auto& seg : trace.segments) trace.total_time += seg.duration;
    const Complex overlap = (target.adjoint() * psi)(0);
    trace.fidelity = std::norm(overlap);
    trace.leakage = 1.0 - trace.fidelity;
    if (std::abs(psi.norm() - 1.0) > 1e-10)
        throw numerical_error("protocol lost single-particle norm");
}

/// Global coupling derating for alpha > 0: every strength is divided by the
/// worst-pair factor max(1, d_max^alpha) so all caps hold simultaneously.
inline double worst_pair_factor(const LatticeGeometry& geom, double alpha) {
    if (alpha <= 0.0) return 1.0;
    const double f = std::pow(geom.max_distance(), alpha);
    if (!std::isfinite(f) || f <= 0.0)
        throw cap_violation_error("power-law derating factor is degenerate at this alpha");
    return std::max(1.0, f);
}

}  // namespace detail

/// Single-shot map a_i^dag -> gamma_i a_i^dag + sum_j gamma_j a_j^dag through
/// one pulse H = a_i^dag (sum_j J_j a_j) + h.c. with J_j = conj(gamma_j)/max,
/// run for t = arccos|gamma_i| / omega. The effective two-mode rotation has
/// omega = sqrt(sum |J_j|^2).
inline ProtocolTrace single_shot(int source, const VectorXcd& gammas,
                                 const LatticeGeometry& geom, double alpha) {
    const int m = geom.site_count();
    if (gammas.size() != m) throw validation_error("single_shot: amplitude vector size mismatch");
    if (std::abs(gammas.norm() - 1.0) > 1e-9)
        throw validation_error("single_shot: target amplitudes must be normalised");
    double max_off = 0.0;
    for (int j = 0; j < m; ++j)
        if (j != source) max_off = std::max(max_off, std::abs(gammas(j)));
    if (max_off == 0.0)
        throw validation_error("single_shot: need a nonzero amplitude away from the source");

    const double scale = 1.0 / (max_off * detail::worst_pair_factor(geom, alpha));
    ProtocolSegment pulse;
    double omega_sq = 0.0;
    for (int j = 0; j < m; ++j) {
        if (j == source || std::abs(gammas(j)) == 0.0) continue;
        const Complex coupling = std::conj(gammas(j)) * scale;
        pulse.couplings.emplace_back(source, j, coupling);
        omega_sq += std::norm(coupling);
    }
    const double omega = std::sqrt(omega_sq);
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw cap_violation_error("single_shot: couplings rescale to zero rate");
    pulse.duration = std::acos(std::min(1.0, std::abs(gammas(source)))) / omega;

    ProtocolTrace trace;
    trace.segments.push_back(std::move(pulse));
    VectorXcd psi = VectorXcd::Zero(m);
    psi(source) = 1.0;
    detail::run_segments(geom, alpha, trace, psi);
    detail::append_phase_fix(trace, psi, gammas);
    detail::finalize(trace, psi, gammas);
    return trace;
}

/// Two-round transfer i -> j through the uniform superposition over the
/// ancilla set: a partial rotation parks 1-|gamma_i|^2 of the weight on the
/// ancilla mode, a quarter period then moves all of it onto j. Total time
/// (pi/2 + arccos|gamma_i|) / omega with omega = sqrt(|A|) before derating.
inline ProtocolTrace state_transfer(int site_i, int site_j, Complex gamma_i, Complex gamma_j,
                                    const std::vector<int>& ancillas,
                                    const LatticeGeometry& geom, double alpha) {
    const int m = geom.site_count();
    if (ancillas.empty()) throw validation_error("state_transfer: ancilla set is empty");
    for (const int a : ancillas)
        if (a == site_i || a == site_j)
            throw validation_error("state_transfer: ancillas must avoid the endpoints");
    if (std::abs(std::norm(gamma_i) + std::norm(gamma_j) - 1.0) > 1e-9)
        throw validation_error("state_transfer: |gamma_i|^2 + |gamma_j|^2 must be 1");

    const double factor = detail::worst_pair_factor(geom, alpha);
    const double strength = 1.0 / factor;
    const double omega = std::sqrt(static_cast<double>(ancillas.size())) * strength;

    ProtocolSegment round1;
    round1.duration = std::acos(std::min(1.0, std::abs(gamma_i))) / omega;
    for (const int a : ancillas) round1.couplings.emplace_back(site_i, a, Complex(strength, 0.0));
    ProtocolSegment round2;
    round2.duration = (std::asin(1.0)) / omega;  // pi/2: full swap of the collective mode
    for (const int a : ancillas) round2.couplings.emplace_back(site_j, a, Complex(strength, 0.0));

    ProtocolTrace trace;
    trace.segments.push_back(std::move(round1));
    trace.segments.push_back(std::move(round2));
    VectorXcd psi = VectorXcd::Zero(m);
    psi(site_i) = 1.0;
    VectorXcd target = VectorXcd::Zero(m);
    target(site_i) = gamma_i;
    target(site_j) = gamma_j;
    detail::run_segments(geom, alpha, trace, psi);
    detail::append_phase_fix(trace, psi, target);
    detail::finalize(trace, psi, target);
    return trace;
}

/// Frequency statistic of the two-step column protocol:
///   omega^2 = (1 - |U_1j|^2 - |U_jj|^2) / |U_2j|^2
/// with U_1j, U_2j the largest and second-largest off-diagonal magnitudes.
inline double column_omega_sq(const VectorXcd& column, int j) {
    double top = 0.0, second = 0.0;
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        if (i == j) continue;
        const double a = std::abs(column(i));
        if (a > top) {
            second = top;
            top = a;
        } else if (a > second) {
            second = a;
        }
    }
    if (second <= 0.0) throw degenerate_error("column_omega_sq: fewer than two off-diagonal entries");
    const double rest = std::max(0.0, 1.0 - top * top - std::norm(column(j)));
    return rest / (second * second);
}

/// Realise column j of a unitary as a single-particle state: relabel by
/// magnitude, park U_jj at the source with a state transfer to the largest
/// mode (skipped when the diagonal already dominates), then distribute the
/// remainder in a single shot.
inline ProtocolTrace implement_column(const MatrixXcd& u, int j, const LatticeGeometry& geom,
                                      double alpha) {
    const int m = geom.site_count();
    if (u.rows() != m || u.cols() != m) throw validation_error("implement_column: size mismatch");
    if ((u.adjoint() * u - MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
        throw validation_error("implement_column: matrix is not unitary");
    const VectorXcd target = u.col(j);

    ProtocolTrace trace;
    VectorXcd psi = VectorXcd::Zero(m);
    psi(j) = 1.0;

    const double diag = std::abs(u(j, j));
    const double spill_sq = 1.0 - diag * diag;
    if (spill_sq < 1e-14) {
        // column already localised on its own mode
        trace.degenerate = true;
        detail::append_phase_fix(trace, psi, target);
        detail::finalize(trace, psi, target);
        return trace;
    }

    // modes sorted by nonincreasing |U_ij|, ties broken by original index
    std::vector<int> order;
    for (int i = 0; i < m; ++i)
        if (i != j) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(u(a, j)) > std::abs(u(b, j));
    });
    const int lead = order.front();

    const double factor = detail::worst_pair_factor(geom, alpha);
    int source = j;
    if (diag < std::abs(u(lead, j))) {
        // park |U_jj| at mode j and move the rest onto the lead mode
        const double strength = 1.0 / factor;
        const double omega = std::sqrt(static_cast<double>(m - 2)) * strength;
        ProtocolSegment round1;
        round1.duration = std::acos(std::min(1.0, diag)) / omega;
        ProtocolSegment round2;
        round2.duration = std::asin(1.0) / omega;
        for (int i = 0; i < m; ++i) {
            if (i == j || i == lead) continue;
            round1.couplings.emplace_back(j, i, Complex(strength, 0.0));
            round2.couplings.emplace_back(lead, i, Complex(strength, 0.0));
        }
        trace.segments.push_back(std::move(round1));
        trace.segments.push_back(std::move(round2));
        source = lead;
    }

    // single shot from `source` distributing everything but the parked weight
    {
        double max_off = 0.0;
        for (int i = 0; i < m; ++i)
            if (i != j && i != source) max_off = std::max(max_off, std::abs(u(i, j)));
        if (max_off > 0.0) {
            const double parked = (source == j) ? 0.0 : diag;
            const double live = std::sqrt(std::max(1e-300, 1.0 - parked * parked));
            const double scale = live / (max_off * factor);
            ProtocolSegment pulse;
            double omega_sq = 0.0;
            double keep = (source == j) ? diag : std::abs(u(source, j));
            for (int i = 0; i < m; ++i) {
                if (i == j || i == source || std::abs(u(i, j)) == 0.0) continue;
                const Complex coupling = std::conj(u(i, j) / live) * scale;
                pulse.couplings.emplace_back(source, i, coupling);
                omega_sq += std::norm(coupling);
            }
            const double omega = std::sqrt(omega_sq);
            pulse.duration = std::acos(std::min(1.0, keep / live)) / omega;
            trace.segments.push_back(std::move(pulse));
        }
    }

    detail::run_segments(geom, alpha, trace, psi);
    detail::append_phase_fix(trace, psi, target);
    detail::finalize(trace, psi, target);
    return trace;
}

}  // namespace bose
