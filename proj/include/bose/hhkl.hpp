#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bose/propagator.hpp"
#include "bose/rng.hpp"

namespace bose {

enum class StepRegime { single_step, fixed_step };

inline const char* to_string(StepRegime r) {
    return r == StepRegime::single_step ? "single_step" : "fixed_step";
}

/// Nested-ball evolution plan. Ball k of cluster i collects the cluster sites
/// within distance r0 + k*ell of the initially occupied set; the forward
/// evolutions U^{B_N} ... U^{B_1} applied to the cluster's creation operators
/// are the whole approximant (the backward shell factors commute through to
/// the vacuum for clustered initial states and are never executed).
struct HHKLPlan {
    int steps = 1;                // N
    double step_time = 0.0;       // t1
    int shell_width = 0;          // ell
    int core_radius = 0;          // r0
    double velocity = 0.0;        // v, an input parameter
    StepRegime regime = StepRegime::single_step;
    std::vector<std::vector<std::vector<int>>> balls;  // [cluster][step k-1] -> global sites

    double total_time() const { return step_time * steps; }
};

/// Choose step count and shell width for evolving to time t.
///
/// Fixed O(1) steps (default t1) pay off only when alpha > 2D + D/(beta-1);
/// otherwise a single step is used. The shell width is the largest integer
/// with r0 + N*ell <= L so the balls stay inside their clusters.
inline HHKLPlan plan_decomposition(const LatticeGeometry& geom, const ClusterPartition& part,
                                   double t, double alpha, double v, double beta,
                                   double t1_fixed = 0.5) {
    const int d = geom.dimension();
    if (!(alpha > d + 1))
        throw domain_error("plan_decomposition: requires alpha > D+1");
    const double width = part.min_width();
    if (!std::isfinite(width))
        throw domain_error("plan_decomposition: single-cluster partition has no finite width");

    HHKLPlan plan;
    plan.velocity = v;
    const double threshold =
        (beta > 1.0) ? 2.0 * d + d / (beta - 1.0) : std::numeric_limits<double>::infinity();
    plan.regime = (alpha > threshold) ? StepRegime::fixed_step : StepRegime::single_step;
    if (plan.regime == StepRegime::fixed_step && t > 0.0)
        plan.steps = std::max(1, static_cast<int>(std::ceil(t / t1_fixed - 1e-12)));
    else
        plan.steps = 1;
    plan.step_time = (plan.steps > 0) ? t / plan.steps : 0.0;

    // Core radius: half the diameter of the occupied set, maximised over
    // clusters (0 for a single occupied site).
    int r0 = 0;
    for (int c = 0; c < part.cluster_count(); ++c) {
        const auto& occ = part.occupied_in(c);
        double diam = 0.0;
        for (std::size_t a = 0; a < occ.size(); ++a)
            for (std::size_t b = a + 1; b < occ.size(); ++b)
                diam = std::max(diam, geom.distance(occ[a], occ[b]));
        r0 = std::max(r0, static_cast<int>(std::ceil(0.5 * diam)));
    }
    plan.core_radius = r0;
    plan.shell_width = static_cast<int>(std::floor((width - r0) / plan.steps));
    if (plan.shell_width < 1)
        throw infeasible_plan_error(
            "plan_decomposition: shell width would be " + std::to_string(plan.shell_width) +
            "; evolution time too long for this geometry, fall back to the exact propagator");

    plan.balls.resize(static_cast<std::size_t>(part.cluster_count()));
    for (int c = 0; c < part.cluster_count(); ++c) {
        auto& cluster_balls = plan.balls[static_cast<std::size_t>(c)];
        cluster_balls.resize(static_cast<std::size_t>(plan.steps));
        const auto& occ = part.occupied_in(c);
        for (int k = 1; k <= plan.steps; ++k) {
            const double radius = r0 + static_cast<double>(k) * plan.shell_width;
            auto& ball = cluster_balls[static_cast<std::size_t>(k - 1)];
            for (const int s : part.cluster_sites(c)) {
                double dist = std::numeric_limits<double>::infinity();
                for (const int o : occ) dist = std::min(dist, geom.distance(s, o));
                if (dist <= radius + 1e-12) ball.push_back(s);
            }
        }
    }
    return plan;
}

/// Evolve each cluster independently through its nested balls. The input is a
/// cluster-product Fock state given by the partition's occupied sites; the
/// output is one StateVector per cluster on that cluster's own basis. Bases
/// are owned by the returned structure.
struct ClusterStates {
    std::vector<FockBasis> bases;
    std::vector<StateVector> states;
};

inline ClusterStates decompose_evolve(const HHKLPlan& plan, const CouplingSchedule& schedule,
                                      const ClusterPartition& part) {
    ClusterStates out;
    const int k_clusters = part.cluster_count();
    out.bases.reserve(static_cast<std::size_t>(k_clusters));
    for (int c = 0; c < k_clusters; ++c) {
        const auto& sites = part.cluster_sites(c);
        const auto& occ = part.occupied_in(c);
        FockBasis basis = FockBasis::enumerate(static_cast<int>(sites.size()),
                                               static_cast<int>(occ.size()));
        basis.relabel_sites(sites);
        out.bases.push_back(std::move(basis));
    }
    for (int c = 0; c < k_clusters; ++c) {
        const auto& basis = out.bases[static_cast<std::size_t>(c)];
        const auto& sites = part.cluster_sites(c);
        FockState initial(sites.size(), 0);
        for (const int o : part.occupied_in(c)) {
            const auto it = std::find(sites.begin(), sites.end(), o);
            initial[static_cast<std::size_t>(it - sites.begin())] += 1;
        }
        StateVector psi = StateVector::basis_state(basis, initial);
        for (int k = 1; k <= plan.steps; ++k) {
            Region region;
            for (const int s : plan.balls[static_cast<std::size_t>(c)][static_cast<std::size_t>(k - 1)])
                region.sites.insert(s);
            psi = evolve_window(schedule, psi, (k - 1) * plan.step_time, k * plan.step_time, region);
        }
        out.states.push_back(std::move(psi));
    }
    return out;
}

/// Embed the product of per-cluster states into a basis over the full lattice.
inline StateVector embed_product(const ClusterStates& cs, const ClusterPartition& part,
                                 const FockBasis& full_basis) {
    StateVector out;
    out.basis = &full_basis;
    out.amplitudes = VectorXcd::Zero(static_cast<Eigen::Index>(full_basis.dimension()));
    const int k_clusters = part.cluster_count();
    for (std::size_t idx = 0; idx < full_basis.dimension(); ++idx) {
        const FockState& s = full_basis.state(idx);
        Complex amp = 1.0;
        for (int c = 0; c < k_clusters && amp != Complex(0.0, 0.0); ++c) {
            const auto& basis_c = cs.bases[static_cast<std::size_t>(c)];
            const auto& sites = basis_c.sites();
            FockState local(sites.size(), 0);
            int count = 0;
            for (std::size_t a = 0; a < sites.size(); ++a) {
                local[a] = s[static_cast<std::size_t>(sites[a])];
                count += local[a];
            }
            if (count != basis_c.total_n()) {
                amp = 0.0;
                break;
            }
            const long li = basis_c.index_of(local);
            amp *= (li >= 0) ? cs.states[static_cast<std::size_t>(c)].amplitudes(li) : Complex(0.0);
        }
        out.amplitudes(static_cast<Eigen::Index>(idx)) = amp;
    }
    return out;
}

/// 2-norm error bound of the decomposition:
///   K (e^{v t1} - 1) (ell^{-alpha+D+1} + e^{-ell}) sum_{j=0}^{N-1} (r0 + j ell)^{D-1}
/// with every implicit constant set to 1 (calibration happens in acceptance
/// tests, not here). The decay rate in e^{-ell} is likewise fixed to 1.
inline double error_bound(const HHKLPlan& plan, const ClusterPartition& part, double alpha, int d) {
    const double k = static_cast<double>(part.cluster_count());
    const double ell = static_cast<double>(plan.shell_width);
    double boundary = 0.0;
    for (int j = 0; j < plan.steps; ++j) {
        const double r = plan.core_radius + static_cast<double>(j) * ell;
        boundary += (d == 1) ? 1.0 : std::pow(r, d - 1);
    }
    const double step_factor = std::expm1(plan.velocity * plan.step_time);
    const double tail = std::pow(ell, -alpha + d + 1) + std::exp(-ell);
    return k * step_factor * tail * boundary;
}

/// The three closed-form error regimes for the optimised step choice. Pass
/// alpha = infinity for the nearest-neighbour branch. The boundary
/// alpha = 2D + D/(beta-1) belongs to the lower branch.
inline double regime_error(double alpha, double beta, int d, int n, double width, double v,
                           double t) {
    const double nn = static_cast<double>(n);
    if (std::isinf(alpha)) return nn * std::exp(v * t - width);
    if (!(alpha > d + 1)) throw domain_error("regime_error: requires alpha > D+1");
    const double threshold =
        (beta > 1.0) ? 2.0 * d + d / (beta - 1.0) : std::numeric_limits<double>::infinity();
    if (alpha > threshold) return nn * std::pow(t, alpha - d) / std::pow(width, alpha - 2.0 * d);
    return nn * std::expm1(v * t) / std::pow(width, alpha - d - 1.0);
}

/// Easiness timescale: the time where the matching regime error reaches 1.
inline double easiness_timescale(double alpha, double beta, int d, int n, double width, double v) {
    const double nn = static_cast<double>(n);
    if (std::isinf(alpha)) return (width - std::log(nn)) / v;
    if (!(alpha > d + 1)) throw domain_error("easiness_timescale: requires alpha > D+1");
    const double threshold =
        (beta > 1.0) ? 2.0 * d + d / (beta - 1.0) : std::numeric_limits<double>::infinity();
    if (alpha > threshold)
        return std::pow(nn, -1.0 / (alpha - d)) * std::pow(width, (alpha - 2.0 * d) / (alpha - d));
    return std::log1p(std::pow(width, alpha - d - 1.0) / nn) / v;
}

/// Density column of the timescale table: t_easy(rho)/t_easy(1) when the
/// boson count and the velocity both scale by rho.
inline double density_scaling_ratio(double alpha, double beta, int d, double rho) {
    if (std::isinf(alpha)) return 1.0 / rho;
    const double threshold =
        (beta > 1.0) ? 2.0 * d + d / (beta - 1.0) : std::numeric_limits<double>::infinity();
    if (alpha > threshold) return std::pow(rho, -2.0 / (alpha - d));
    return 1.0 / rho;
}

/// Truncation closeness: delta(t) <= ||H - QHQ||_bound * integral of eps.
/// The integral runs adaptive Simpson at relative tolerance 1e-6.
inline double truncation_error_bound(const LatticeGeometry& geom, const ClusterPartition& part,
                                     double alpha, int b, double t,
                                     const std::function<double(double)>& eps_of_tau) {
    const auto bound = offcluster_norm_bound(geom, part, alpha, b);
    return bound.analytic * adaptive_simpson(eps_of_tau, 0.0, t, 1e-6);
}

/// Sample one occupation configuration of the whole lattice from the product
/// of per-cluster states. Cluster c draws from its own stream seeded
/// seed + c, so any parallel schedule reproduces the same output.
inline std::vector<int> sample_output(const ClusterStates& cs, int total_sites,
                                      std::uint64_t seed) {
    std::vector<int> occupation(static_cast<std::size_t>(total_sites), 0);
    for (std::size_t c = 0; c < cs.states.size(); ++c) {
        const auto& psi = cs.states[c];
        if (std::abs(psi.norm() - 1.0) > 1e-8)
            throw validation_error("sample_output: cluster state not normalised");
        Rng rng(seed + c);
        std::vector<double> weights(psi.basis->dimension());
        for (std::size_t k = 0; k < weights.size(); ++k)
            weights[k] = std::norm(psi.amplitudes(static_cast<Eigen::Index>(k)));
        const int pick = rng.pick(weights);
        const FockState& s = psi.basis->state(static_cast<std::size_t>(pick));
        const auto& sites = psi.basis->sites();
        for (std::size_t a = 0; a < sites.size(); ++a)
            occupation[static_cast<std::size_t>(sites[a])] = s[a];
    }
    return occupation;
}

}  // namespace bose
