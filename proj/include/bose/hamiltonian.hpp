#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <unordered_set>
#include <vector>

#include "bose/fock.hpp"
#include "bose/lattice.hpp"
#include "bose/numerics.hpp"

namespace bose {

/// Sparse region handle: empty set means "all sites".
struct Region {
    std::unordered_set<int> sites;
    bool contains(int global_site) const { return sites.empty() || sites.count(global_site) > 0; }
};

/// Assemble the many-body matrix of one schedule segment on `basis`. Only
/// terms supported completely inside `region` (global site ids) enter. The
/// construction adds J_ij a_i^dag a_j and its conjugate together, so the
/// result is Hermitian by construction. Hop images that fall outside a
/// truncated basis are dropped, which realises QHQ directly.
inline MatrixXcd build_hamiltonian(const ScheduleSegment& seg, double v_interaction,
                                   const FockBasis& basis, const Region& region = Region{}) {
    const std::size_t dim = basis.dimension();
    const int m = basis.site_count();
    const auto& sites = basis.sites();
    MatrixXcd h = MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));

    for (std::size_t col = 0; col < dim; ++col) {
        const FockState& s = basis.state(col);
        double diag = 0.0;
        for (int a = 0; a < m; ++a) {
            if (!region.contains(sites[static_cast<std::size_t>(a)])) continue;
            const double na = static_cast<double>(s[static_cast<std::size_t>(a)]);
            diag += std::real(seg.couplings(sites[static_cast<std::size_t>(a)],
                                            sites[static_cast<std::size_t>(a)])) * na;
            diag += 0.5 * v_interaction * na * (na - 1.0);
        }
        h(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col)) += diag;

        for (int a = 0; a < m; ++a) {
            const int ga = sites[static_cast<std::size_t>(a)];
            if (!region.contains(ga)) continue;
            for (int b = 0; b < m; ++b) {
                if (a == b) continue;
                const int gb = sites[static_cast<std::size_t>(b)];
                if (!region.contains(gb)) continue;
                const Complex j = seg.couplings(ga, gb);
                if (j == Complex(0.0, 0.0)) continue;
                const auto hop = hop_element(s, a, b);
                if (!hop) continue;
                const long row = basis.index_of(hop->first);
                if (row < 0) continue;  // projected away by the truncation
                h(row, static_cast<Eigen::Index>(col)) += j * hop->second;
            }
        }
    }
    return h;
}

/// H' = QHQ as the principal submatrix of H on the truncated states.
inline MatrixXcd truncate_hamiltonian(const MatrixXcd& h, const FockBasis& basis_full,
                                      const FockBasis& basis_trunc) {
    const std::size_t dt = basis_trunc.dimension();
    std::vector<long> map(dt);
    for (std::size_t k = 0; k < dt; ++k) {
        const long idx = basis_full.index_of(basis_trunc.state(k));
        if (idx < 0)
            throw validation_error("truncate_hamiltonian: truncated state missing from full basis");
        map[k] = idx;
    }
    MatrixXcd out(static_cast<Eigen::Index>(dt), static_cast<Eigen::Index>(dt));
    for (std::size_t r = 0; r < dt; ++r)
        for (std::size_t c = 0; c < dt; ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = h(map[r], map[c]);
    return out;
}

struct OffClusterBound {
    double analytic;
    std::optional<double> exact;
};

/// Bound on the norm of (H - QHQ) restricted to the image of Q for the cap
/// b+1. Each pair of clusters at cluster distance l contributes like a hop
/// block of <= 2b bosons whose Gershgorin row sum is L^D over the separation
/// to the power alpha; the grid gives 2^{D+1} D l^{D-1} non-overlapping
/// groupings per distance. Adjacent clusters (l = 0) enter at separation L,
/// the width floor between any occupied core and a neighbouring cluster. The
/// finite l-sum is evaluated as is, no asymptotics.
///
/// When a coupling matrix is supplied and the instance is small, the exact
/// norm max_eta ||(H - QHQ)|eta>|| is also computed by dense SVD of the
/// inter-subspace block.
inline OffClusterBound offcluster_norm_bound(const LatticeGeometry& geom,
                                             const ClusterPartition& part, double alpha, int b,
                                             const MatrixXcd* couplings = nullptr,
                                             double v_interaction = 0.0) {
    const int d = geom.dimension();
    if (!(alpha > static_cast<double>(d)))
        throw domain_error("offcluster_norm_bound: requires alpha > D, the cluster sum diverges");
    const double width = part.min_width();
    OffClusterBound out{0.0, std::nullopt};
    if (part.cluster_count() >= 2 && std::isfinite(width)) {
        const int l_max = part.max_cluster_distance();
        double lsum = 0.0;
        for (int l = 0; l <= l_max; ++l) {
            const double le = std::max(1.0, static_cast<double>(l));
            lsum += std::pow(2.0, d + 1) * d * std::pow(le, d - 1) * std::pow(le, -alpha);
        }
        out.analytic = 2.0 * b * std::pow(width, d - alpha) * lsum;
    }

    if (couplings != nullptr) {
        const int n = part.total_bosons();
        const int cap = b + 1;
        const FockBasis full = FockBasis::enumerate(geom.site_count(), n);
        const FockBasis trunc =
            FockBasis::enumerate_truncated(geom.site_count(), n, part.assignment(), cap);
        ScheduleSegment seg{1.0, *couplings};
        const MatrixXcd h = build_hamiltonian(seg, v_interaction, full);
        // Rows outside im Q, columns inside: the (1-Q) H Q block.
        std::vector<long> in, outside;
        for (std::size_t k = 0; k < full.dimension(); ++k) {
            if (trunc.index_of(full.state(k)) >= 0)
                in.push_back(static_cast<long>(k));
            else
                outside.push_back(static_cast<long>(k));
        }
        MatrixXcd block(static_cast<Eigen::Index>(outside.size()),
                        static_cast<Eigen::Index>(in.size()));
        for (std::size_t r = 0; r < outside.size(); ++r)
            for (std::size_t c = 0; c < in.size(); ++c)
                block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    h(outside[r], in[c]);
        out.exact = spectral_norm(block);
    }
    return out;
}

}  // namespace bose
