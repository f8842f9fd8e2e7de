#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bose/errors.hpp"
#include "bose/numerics.hpp"

namespace bose {

enum class Metric { euclidean, chebyshev };

/// Cubic lattice of unit spacing in D dimensions. Site indices are row-major
/// with the first axis fastest, so a 1D chain is just 0..m-1.
class LatticeGeometry {
  public:
    LatticeGeometry(std::vector<int> shape, Metric metric = Metric::euclidean)
        : shape_(std::move(shape)), metric_(metric) {
        if (shape_.empty()) throw validation_error("LatticeGeometry: empty shape");
        m_ = 1;
        for (const int s : shape_) {
            if (s < 1) throw validation_error("LatticeGeometry: axis extent must be >= 1");
            m_ *= s;
        }
    }

    int dimension() const { return static_cast<int>(shape_.size()); }
    int site_count() const { return m_; }
    const std::vector<int>& shape() const { return shape_; }
    Metric metric() const { return metric_; }

    std::vector<int> coords(int site) const {
        std::vector<int> c(shape_.size());
        for (std::size_t d = 0; d < shape_.size(); ++d) {
            c[d] = site % shape_[d];
            site /= shape_[d];
        }
        return c;
    }

    int site_at(const std::vector<int>& c) const {
        int idx = 0;
        for (std::size_t d = shape_.size(); d-- > 0;) idx = idx * shape_[d] + c[d];
        return idx;
    }

    double distance(int i, int j) const {
        if (i == j) return 0.0;
        const auto a = coords(i), b = coords(j);
        if (metric_ == Metric::chebyshev) {
            int best = 0;
            for (std::size_t d = 0; d < a.size(); ++d) best = std::max(best, std::abs(a[d] - b[d]));
            return static_cast<double>(best);
        }
        double s = 0.0;
        for (std::size_t d = 0; d < a.size(); ++d) {
            const double delta = static_cast<double>(a[d] - b[d]);
            s += delta * delta;
        }
        return std::sqrt(s);
    }

    /// Largest pairwise distance on this lattice (corner to corner).
    double max_distance() const {
        int lo = 0;
        std::vector<int> far(shape_.size());
        for (std::size_t d = 0; d < shape_.size(); ++d) far[d] = shape_[d] - 1;
        return distance(lo, site_at(far));
    }

  private:
    std::vector<int> shape_;
    Metric metric_;
    int m_;
};

/// Disjoint cover of the lattice into K clusters, each holding its initially
/// occupied sites. Widths L_i (distance from an occupied site to the nearest
/// site outside the cluster) are recomputed here, never trusted from input.
/// Cluster grid coordinates support the inter-cluster distance count, where
/// distance l between clusters is defined through l+1 = max_d |i_d - j_d|.
class ClusterPartition {
  public:
    ClusterPartition(const LatticeGeometry& geom, std::vector<int> assignment,
                     const std::vector<int>& occupied_sites,
                     std::vector<std::vector<int>> cluster_coords)
        : assignment_(std::move(assignment)), cluster_coords_(std::move(cluster_coords)) {
        if (assignment_.size() != static_cast<std::size_t>(geom.site_count()))
            throw validation_error("ClusterPartition: assignment size mismatch");
        k_ = 1 + *std::max_element(assignment_.begin(), assignment_.end());
        if (cluster_coords_.size() != static_cast<std::size_t>(k_))
            throw validation_error("ClusterPartition: need one grid coordinate per cluster");
        sites_.resize(static_cast<std::size_t>(k_));
        for (int s = 0; s < geom.site_count(); ++s)
            sites_[static_cast<std::size_t>(assignment_[static_cast<std::size_t>(s)])].push_back(s);
        for (const auto& cs : sites_)
            if (cs.empty()) throw validation_error("ClusterPartition: empty cluster");

        occupied_.resize(static_cast<std::size_t>(k_));
        for (const int s : occupied_sites) {
            if (s < 0 || s >= geom.site_count())
                throw validation_error("ClusterPartition: occupied site out of range");
            occupied_[static_cast<std::size_t>(assignment_[static_cast<std::size_t>(s)])].push_back(s);
        }
        b_ = 0;
        for (const auto& occ : occupied_) b_ = std::max(b_, static_cast<int>(occ.size()));

        widths_.assign(static_cast<std::size_t>(k_), std::numeric_limits<double>::infinity());
        for (int c = 0; c < k_; ++c) {
            const auto& occ = occupied_[static_cast<std::size_t>(c)];
            if (occ.empty()) continue;
            double w = std::numeric_limits<double>::infinity();
            for (int s = 0; s < geom.site_count(); ++s) {
                if (assignment_[static_cast<std::size_t>(s)] == c) continue;
                for (const int o : occ) w = std::min(w, geom.distance(s, o));
            }
            widths_[static_cast<std::size_t>(c)] = w;
        }
        width_ = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k_; ++c)
            if (!occupied_[static_cast<std::size_t>(c)].empty())
                width_ = std::min(width_, widths_[static_cast<std::size_t>(c)]);
    }

    /// Blocks of `cluster_width` sites along axis 0 (full extent elsewhere).
    static ClusterPartition tiled_axis0(const LatticeGeometry& geom, int cluster_count,
                                        int cluster_width, const std::vector<int>& occupied_sites) {
        if (cluster_count < 1) throw validation_error("ClusterPartition: need >= 1 cluster");
        if (cluster_count * cluster_width != geom.shape()[0])
            throw validation_error("ClusterPartition: count * width must equal the axis-0 extent");
        std::vector<int> assignment(static_cast<std::size_t>(geom.site_count()));
        for (int s = 0; s < geom.site_count(); ++s)
            assignment[static_cast<std::size_t>(s)] = geom.coords(s)[0] / cluster_width;
        std::vector<std::vector<int>> coords;
        coords.reserve(static_cast<std::size_t>(cluster_count));
        for (int c = 0; c < cluster_count; ++c)
            coords.push_back(std::vector<int>{c});
        return ClusterPartition(geom, std::move(assignment), occupied_sites, std::move(coords));
    }

    int cluster_count() const { return k_; }
    int cluster_of(int site) const { return assignment_[static_cast<std::size_t>(site)]; }
    const std::vector<int>& assignment() const { return assignment_; }
    const std::vector<int>& cluster_sites(int c) const { return sites_[static_cast<std::size_t>(c)]; }
    const std::vector<int>& occupied_in(int c) const { return occupied_[static_cast<std::size_t>(c)]; }
    double width_of(int c) const { return widths_[static_cast<std::size_t>(c)]; }

    /// L = min_i L_i; +infinity for the degenerate single-cluster partition.
    double min_width() const { return width_; }

    /// b = max_i b_i, the largest initial boson count of any cluster.
    int max_bosons_per_cluster() const { return b_; }

    int total_bosons() const {
        int n = 0;
        for (const auto& occ : occupied_) n += static_cast<int>(occ.size());
        return n;
    }

    /// Cluster distance: l + 1 = max_d |i_d - j_d| over grid coordinates.
    int cluster_distance(int a, int b) const {
        if (a == b) return 0;
        const auto& ca = cluster_coords_[static_cast<std::size_t>(a)];
        const auto& cb = cluster_coords_[static_cast<std::size_t>(b)];
        int cheb = 0;
        for (std::size_t d = 0; d < ca.size(); ++d)
            cheb = std::max(cheb, std::abs(ca[d] - cb[d]));
        return cheb - 1;
    }

    int max_cluster_distance() const {
        int l = 0;
        for (int a = 0; a < k_; ++a)
            for (int b = a + 1; b < k_; ++b) l = std::max(l, cluster_distance(a, b));
        return l;
    }

  private:
    std::vector<int> assignment_;
    std::vector<std::vector<int>> cluster_coords_;
    std::vector<std::vector<int>> sites_;
    std::vector<std::vector<int>> occupied_;
    std::vector<double> widths_;
    double width_ = std::numeric_limits<double>::infinity();
    int k_ = 0;
    int b_ = 0;
};

/// One piecewise-constant slice of the drive: a Hermitian hopping matrix
/// (diagonal = on-site fields, unconstrained) held for `duration`.
struct ScheduleSegment {
    double duration;
    MatrixXcd couplings;  // m x m, Hermitian; |J_ij| <= 1/d(i,j)^alpha off-diagonal
};

/// Validated drive: every segment obeys the power-law cap at exponent alpha.
class CouplingSchedule {
  public:
    CouplingSchedule(const LatticeGeometry& geom, std::vector<ScheduleSegment> segments,
                     double alpha, double v_interaction)
        : segments_(std::move(segments)), alpha_(alpha), v_(v_interaction) {
        for (std::size_t k = 0; k < segments_.size(); ++k) {
            const auto& seg = segments_[k];
            if (!(seg.duration > 0.0))
                throw validation_error("CouplingSchedule: segment " + std::to_string(k) +
                                       " has non-positive duration");
            validate_segment(geom, seg.couplings, alpha, static_cast<int>(k));
        }
    }

    static void validate_segment(const LatticeGeometry& geom, const MatrixXcd& j, double alpha,
                                 int segment_index = 0) {
        const int m = geom.site_count();
        if (j.rows() != m || j.cols() != m)
            throw validation_error("CouplingSchedule: coupling matrix size mismatch");
        constexpr double tol = 1e-12;
        for (int a = 0; a < m; ++a) {
            for (int b = a + 1; b < m; ++b) {
                if (std::abs(j(a, b) - std::conj(j(b, a))) > tol)
                    throw validation_error("CouplingSchedule: segment " +
                                           std::to_string(segment_index) + " not Hermitian at (" +
                                           std::to_string(a) + "," + std::to_string(b) + ")");
                const double cap = std::pow(geom.distance(a, b), -alpha);
                if (std::abs(j(a, b)) > cap + tol)
                    throw validation_error("CouplingSchedule: power-law cap violated at (" +
                                           std::to_string(a) + "," + std::to_string(b) + "): |J|=" +
                                           std::to_string(std::abs(j(a, b))) + " > " +
                                           std::to_string(cap));
            }
        }
    }

    const std::vector<ScheduleSegment>& segments() const { return segments_; }
    double alpha() const { return alpha_; }
    double interaction_v() const { return v_; }

    double total_duration() const {
        double t = 0.0;
        for (const auto& s : segments_) t += s.duration;
        return t;
    }

    /// Largest off-diagonal coupling magnitude over all segments.
    double max_hop() const {
        double j = 0.0;
        for (const auto& seg : segments_)
            for (int a = 0; a < seg.couplings.rows(); ++a)
                for (int b = 0; b < seg.couplings.cols(); ++b)
                    if (a != b) j = std::max(j, std::abs(seg.couplings(a, b)));
        return j;
    }

  private:
    std::vector<ScheduleSegment> segments_;
    double alpha_;
    double v_;
};

/// Power-law drive at the cap: J_ij = scale / d(i,j)^alpha, zero diagonal.
inline MatrixXcd powerlaw_couplings(const LatticeGeometry& geom, double alpha, double scale = 1.0) {
    const int m = geom.site_count();
    MatrixXcd j = MatrixXcd::Zero(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (a != b) j(a, b) = scale * std::pow(geom.distance(a, b), -alpha);
    return j;
}

}  // namespace bose
