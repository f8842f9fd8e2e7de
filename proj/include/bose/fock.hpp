#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bose/errors.hpp"

namespace bose {

/// Occupation-number configuration: bosons per site, fixed total.
using FockState = std::vector<std::uint8_t>;

inline int total_bosons(const FockState& s) {
    return std::accumulate(s.begin(), s.end(), 0);
}

/// a_i^dag a_j applied to s. Empty when site j is unoccupied; otherwise the
/// image state and the Bose factor sqrt((n_i+1) n_j).
inline std::optional<std::pair<FockState, double>> hop_element(const FockState& s, int i, int j) {
    if (i == j) throw validation_error("hop_element: i and j must differ");
    if (s[static_cast<std::size_t>(j)] == 0) return std::nullopt;
    FockState out = s;
    const double nj = static_cast<double>(out[static_cast<std::size_t>(j)]);
    const double ni = static_cast<double>(out[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(j)] -= 1;
    out[static_cast<std::size_t>(i)] += 1;
    return std::make_pair(std::move(out), std::sqrt((ni + 1.0) * nj));
}

/// Sum_i V n_i (n_i - 1) / 2.
inline double interaction_energy(const FockState& s, double v) {
    double e = 0.0;
    for (const auto n : s) {
        const double x = static_cast<double>(n);
        e += 0.5 * v * x * (x - 1.0);
    }
    return e;
}

/// All occupation vectors of n bosons on `site_count` sites, optionally with a
/// per-cluster occupancy cap. Ordering is lexicographic descending so indices
/// are reproducible across runs. Immutable once built.
class FockBasis {
  public:
    static constexpr std::size_t kDefaultDimensionLimit = 200000;

    /// Untruncated basis; dimension is binomial(m+n-1, n).
    static FockBasis enumerate(int site_count, int n,
                               std::size_t limit = kDefaultDimensionLimit) {
        return FockBasis(site_count, n, std::vector<int>(static_cast<std::size_t>(site_count), 0),
                         n, false, limit);
    }

    /// Cluster-truncated basis: every state keeps <= cap bosons per cluster.
    static FockBasis enumerate_truncated(int site_count, int n, const std::vector<int>& cluster_of,
                                         int cap, std::size_t limit = kDefaultDimensionLimit) {
        if (cluster_of.size() != static_cast<std::size_t>(site_count))
            throw validation_error("enumerate_truncated: cluster map size mismatch");
        return FockBasis(site_count, n, cluster_of, cap, true, limit);
    }

    int site_count() const { return site_count_; }
    int total_n() const { return total_n_; }
    bool truncated() const { return truncated_; }
    int cluster_cap() const { return cap_; }
    std::size_t dimension() const { return states_.size(); }
    const std::vector<FockState>& states() const { return states_; }
    const FockState& state(std::size_t k) const { return states_[k]; }

    /// Global site ids the local indices refer to (identity by default).
    const std::vector<int>& sites() const { return sites_; }
    void relabel_sites(std::vector<int> global_ids) {
        if (global_ids.size() != static_cast<std::size_t>(site_count_))
            throw validation_error("relabel_sites: size mismatch");
        sites_ = std::move(global_ids);
    }

    /// Ordinal of a state, or -1 when it lies outside the basis (e.g. it
    /// violates the truncation cap).
    long index_of(const FockState& s) const {
        auto it = std::lower_bound(states_.begin(), states_.end(), s,
                                   [](const FockState& a, const FockState& b) { return a > b; });
        if (it == states_.end() || *it != s) return -1;
        return it - states_.begin();
    }

  private:
    FockBasis(int site_count, int n, const std::vector<int>& cluster_of, int cap, bool truncated,
              std::size_t limit)
        : site_count_(site_count), total_n_(n), cap_(cap), truncated_(truncated) {
        if (site_count < 1) throw validation_error("FockBasis: need at least one site");
        if (n < 0) throw validation_error("FockBasis: negative boson number");
        if (n > 255) throw capacity_error("FockBasis: boson number exceeds storage width");
        const double est = count_states(site_count, n, cluster_of, cap);
        if (est > static_cast<double>(limit))
            throw capacity_error("FockBasis: dimension " + std::to_string(est) +
                                 " exceeds limit " + std::to_string(limit));
        sites_.resize(static_cast<std::size_t>(site_count));
        std::iota(sites_.begin(), sites_.end(), 0);

        const int n_clusters = 1 + *std::max_element(cluster_of.begin(), cluster_of.end());
        // Remaining sites of each cluster among positions >= p; used to prune.
        std::vector<std::vector<int>> suffix_sites(
            static_cast<std::size_t>(site_count) + 1,
            std::vector<int>(static_cast<std::size_t>(n_clusters), 0));
        for (int p = site_count - 1; p >= 0; --p) {
            suffix_sites[static_cast<std::size_t>(p)] = suffix_sites[static_cast<std::size_t>(p) + 1];
            suffix_sites[static_cast<std::size_t>(p)][static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(p)])] += 1;
        }

        FockState current(static_cast<std::size_t>(site_count), 0);
        std::vector<int> used(static_cast<std::size_t>(n_clusters), 0);
        states_.reserve(static_cast<std::size_t>(est));
        emit(0, n, cluster_of, suffix_sites, current, used);
    }

    void emit(int pos, int remaining, const std::vector<int>& cluster_of,
              const std::vector<std::vector<int>>& suffix_sites, FockState& current,
              std::vector<int>& used) {
        if (pos == site_count_) {
            if (remaining == 0) states_.push_back(current);
            return;
        }
        // Capacity still reachable from here on; prunes dead branches.
        long reachable = 0;
        for (std::size_t c = 0; c < used.size(); ++c)
            if (suffix_sites[static_cast<std::size_t>(pos)][c] > 0)
                reachable += cap_ - used[c];
        if (remaining > reachable) return;

        const int c = cluster_of[static_cast<std::size_t>(pos)];
        const int top = std::min(remaining, cap_ - used[static_cast<std::size_t>(c)]);
        for (int k = top; k >= 0; --k) {
            current[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(k);
            used[static_cast<std::size_t>(c)] += k;
            emit(pos + 1, remaining - k, cluster_of, suffix_sites, current, used);
            used[static_cast<std::size_t>(c)] -= k;
        }
        current[static_cast<std::size_t>(pos)] = 0;
    }

    /// Stars-and-bars count with per-cluster caps (convolution over clusters).
    static double count_states(int site_count, int n, const std::vector<int>& cluster_of, int cap) {
        const int n_clusters = 1 + *std::max_element(cluster_of.begin(), cluster_of.end());
        std::vector<int> size(static_cast<std::size_t>(n_clusters), 0);
        for (const int c : cluster_of) size[static_cast<std::size_t>(c)] += 1;
        std::vector<double> acc(static_cast<std::size_t>(n) + 1, 0.0);
        acc[0] = 1.0;
        for (int c = 0; c < n_clusters; ++c) {
            std::vector<double> next(static_cast<std::size_t>(n) + 1, 0.0);
            for (int have = 0; have <= n; ++have) {
                if (acc[static_cast<std::size_t>(have)] == 0.0) continue;
                for (int k = 0; k <= std::min(cap, n - have); ++k)
                    next[static_cast<std::size_t>(have + k)] +=
                        acc[static_cast<std::size_t>(have)] *
                        combinations(size[static_cast<std::size_t>(c)], k);
            }
            acc.swap(next);
        }
        return acc[static_cast<std::size_t>(n)];
    }

    static double combinations(int sites, int bosons) {
        if (sites == 0) return bosons == 0 ? 1.0 : 0.0;
        double c = 1.0;
        for (int i = 1; i <= bosons; ++i)
            c = c * static_cast<double>(sites - 1 + i) / static_cast<double>(i);
        return c;
    }

    int site_count_;
    int total_n_;
    int cap_;
    bool truncated_;
    std::vector<FockState> states_;
    std::vector<int> sites_;
};

}  // namespace bose
