#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "bose/hamiltonian.hpp"
#include "bose/lattice.hpp"
#include "bose/rng.hpp"

using namespace bose;
using Catch::Approx;

namespace {

// Random Hermitian coupling matrix obeying |J_ij| <= 1/d(i,j)^alpha.
MatrixXcd random_admissible(const LatticeGeometry& geom, double alpha, Rng& rng,
                            double onsite_scale = 1.0) {
    const int m = geom.site_count();
    MatrixXcd j = MatrixXcd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        j(a, a) = onsite_scale * (2.0 * rng.uniform() - 1.0);
        for (int b = a + 1; b < m; ++b) {
            const double cap = std::pow(geom.distance(a, b), -alpha);
            const double mag = cap * rng.uniform();
            const double phase = 6.283185307179586 * rng.uniform();
            j(a, b) = std::polar(mag, phase);
            j(b, a) = std::conj(j(a, b));
        }
    }
    return j;
}

}  // namespace

TEST_CASE("lattice distances honour the metric") {
    const LatticeGeometry chain({12});
    CHECK(chain.site_count() == 12);
    CHECK(chain.distance(3, 3) == 0.0);
    CHECK(chain.distance(0, 11) == Approx(11.0));

    const LatticeGeometry sq({4, 4}, Metric::euclidean);
    CHECK(sq.distance(0, 5) == Approx(std::sqrt(2.0)));  // (0,0)->(1,1)
    const LatticeGeometry sq8({4, 4}, Metric::chebyshev);
    CHECK(sq8.distance(0, 5) == Approx(1.0));
    for (int i = 0; i < sq.site_count(); ++i)
        for (int j = 0; j < sq.site_count(); ++j)
            if (i != j) CHECK(sq.distance(i, j) >= 1.0);
}

TEST_CASE("cluster widths are recomputed from occupied sites") {
    const LatticeGeometry chain({12});
    const auto part = ClusterPartition::tiled_axis0(chain, 2, 6, {2, 9});
    CHECK(part.cluster_count() == 2);
    CHECK(part.width_of(0) == Approx(4.0));  // site 6 is 4 away from site 2
    CHECK(part.width_of(1) == Approx(4.0));
    CHECK(part.min_width() == Approx(4.0));
    CHECK(part.max_bosons_per_cluster() == 1);
    CHECK(part.total_bosons() == 2);

    const auto edges = ClusterPartition::tiled_axis0(chain, 2, 6, {0, 11});
    CHECK(edges.min_width() == Approx(6.0));

    const auto single = ClusterPartition::tiled_axis0(chain, 1, 12, {5});
    CHECK(std::isinf(single.min_width()));
}

TEST_CASE("cluster distance follows the grid coordinates") {
    const LatticeGeometry chain({15});
    const auto part = ClusterPartition::tiled_axis0(chain, 3, 5, {2, 7, 12});
    CHECK(part.cluster_distance(0, 1) == 0);  // adjacent blocks share a boundary
    CHECK(part.cluster_distance(1, 2) == 0);
    CHECK(part.cluster_distance(0, 2) == 1);
    CHECK(part.max_cluster_distance() == 1);
}

TEST_CASE("schedule validation rejects cap violations naming the pair") {
    const LatticeGeometry chain({4});
    MatrixXcd j = MatrixXcd::Zero(4, 4);
    j(0, 3) = 0.5;  // cap at alpha=2 is 1/9
    j(3, 0) = 0.5;
    try {
        CouplingSchedule(chain, {{1.0, j}}, 2.0, 0.0);
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("(0,3)") != std::string::npos);
    }

    MatrixXcd nh = MatrixXcd::Zero(4, 4);
    nh(0, 1) = 1.0;  // missing conjugate partner
    CHECK_THROWS_AS(CouplingSchedule(chain, {{1.0, nh}}, 0.0, 0.0), validation_error);

    MatrixXcd ok = MatrixXcd::Zero(4, 4);
    CHECK_THROWS_AS(CouplingSchedule(chain, {{0.0, ok}}, 0.0, 0.0), validation_error);

    // on-site fields are unconstrained
    MatrixXcd fields = MatrixXcd::Zero(4, 4);
    fields(2, 2) = 1e6;
    CHECK_NOTHROW(CouplingSchedule(chain, {{1.0, fields}}, 3.0, 0.0));
}

TEST_CASE("two-site single-particle Hamiltonian matches the hand matrix") {
    const LatticeGeometry chain({2});
    MatrixXcd j = MatrixXcd::Zero(2, 2);
    j(0, 0) = 0.3;
    j(1, 1) = -0.2;
    j(0, 1) = 1.0;
    j(1, 0) = 1.0;
    const auto basis = FockBasis::enumerate(2, 1);
    const auto h = build_hamiltonian({1.0, j}, 0.0, basis);
    CHECK(h(0, 0).real() == Approx(0.3));
    CHECK(h(1, 1).real() == Approx(-0.2));
    CHECK(h(0, 1).real() == Approx(1.0));
    CHECK(h(1, 0).real() == Approx(1.0));
}

TEST_CASE("two-site two-boson Hamiltonian assembles hops and interaction") {
    const LatticeGeometry chain({2});
    MatrixXcd j = MatrixXcd::Zero(2, 2);
    j(0, 1) = 1.0;
    j(1, 0) = 1.0;
    const double v = 1.7;
    const auto basis = FockBasis::enumerate(2, 2);
    // descending lex: (2,0), (1,1), (0,2)
    REQUIRE(basis.state(0) == FockState{2, 0});
    const auto h = build_hamiltonian({1.0, j}, v, basis);

    // oracle: assemble by hop_element / interaction_energy directly
    MatrixXcd expect = MatrixXcd::Zero(3, 3);
    for (int col = 0; col < 3; ++col) {
        expect(col, col) = interaction_energy(basis.state(static_cast<std::size_t>(col)), v);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                if (a == b) continue;
                const auto hop = hop_element(basis.state(static_cast<std::size_t>(col)), a, b);
                if (hop) expect(basis.index_of(hop->first), col) += j(a, b) * hop->second;
            }
    }
    CHECK((h - expect).cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-15));
    CHECK(std::abs(h(1, 0) - Complex(std::sqrt(2.0), 0)) < 1e-15);
    CHECK(h(0, 0).real() == Approx(v));
    CHECK(h(1, 1).real() == Approx(0.0));
    CHECK(h(2, 2).real() == Approx(v));
}

TEST_CASE("region restriction zeroes all terms touching outside sites") {
    const LatticeGeometry chain({3});
    MatrixXcd j = powerlaw_couplings(chain, 1.0);
    for (int a = 0; a < 3; ++a) j(a, a) = 1.0 + a;
    const auto basis = FockBasis::enumerate(3, 1);
    const auto h = build_hamiltonian({1.0, j}, 0.0, basis, Region{{0, 1}});
    const long k2 = basis.index_of(FockState{0, 0, 1});
    for (int r = 0; r < 3; ++r) {
        CHECK(std::abs(h(r, k2)) == Approx(0.0));
        CHECK(std::abs(h(k2, r)) == Approx(0.0));
    }
    CHECK(std::abs(h(basis.index_of(FockState{1, 0, 0}), basis.index_of(FockState{0, 1, 0}))) > 0.0);
}

TEST_CASE("assembled Hamiltonians are exactly Hermitian") {
    Rng rng(11);
    const LatticeGeometry chain({5});
    const auto basis = FockBasis::enumerate(5, 2);
    for (int trial = 0; trial < 5; ++trial) {
        const auto j = random_admissible(chain, 2.0, rng);
        const auto h = build_hamiltonian({1.0, j}, 0.9, basis);
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-18));
    }
}

TEST_CASE("truncation is the principal submatrix and preserves product states") {
    const LatticeGeometry chain({4});
    const std::vector<int> cluster_of{0, 0, 1, 1};
    const auto part = ClusterPartition::tiled_axis0(chain, 2, 2, {0, 2});
    MatrixXcd j = powerlaw_couplings(chain, 2.0);
    const auto full = FockBasis::enumerate(4, 2);
    const auto trunc = FockBasis::enumerate_truncated(4, 2, cluster_of, 1);
    REQUIRE(full.dimension() == 10);
    REQUIRE(trunc.dimension() == 4);

    const auto h = build_hamiltonian({1.0, j}, 0.5, full);
    const auto hp = truncate_hamiltonian(h, full, trunc);
    const auto hp_direct = build_hamiltonian({1.0, j}, 0.5, trunc);
    CHECK((hp - hp_direct).cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-15));

    // cap so large nothing is cut: H' = H
    const auto loose = FockBasis::enumerate_truncated(4, 2, cluster_of, 2);
    REQUIRE(loose.dimension() == full.dimension());
    const auto hsame = truncate_hamiltonian(h, full, loose);
    CHECK((hsame - h).cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-15));

    // <phi|H'|phi> = <phi|H|phi> for cluster-product states with <= b bosons
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        VectorXcd phi_full = VectorXcd::Zero(10);
        // product of one boson somewhere in cluster 0 and one in cluster 1
        VectorXcd amp0(2), amp1(2);
        for (int i = 0; i < 2; ++i) {
            amp0(i) = Complex(rng.gaussian(), rng.gaussian());
            amp1(i) = Complex(rng.gaussian(), rng.gaussian());
        }
        amp0.normalize();
        amp1.normalize();
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) {
                FockState s{0, 0, 0, 0};
                s[static_cast<std::size_t>(a)] = 1;
                s[static_cast<std::size_t>(2 + c)] = 1;
                phi_full(full.index_of(s)) = amp0(a) * amp1(c);
            }
        VectorXcd phi_trunc = VectorXcd::Zero(4);
        for (std::size_t k = 0; k < trunc.dimension(); ++k)
            phi_trunc(static_cast<Eigen::Index>(k)) = phi_full(full.index_of(trunc.state(k)));
        const Complex e_full = (phi_full.adjoint() * h * phi_full)(0);
        const Complex e_trunc = (phi_trunc.adjoint() * hp * phi_trunc)(0);
        CHECK(std::abs(e_full - e_trunc) < 1e-12);
    }
}

TEST_CASE("off-cluster bound: analytic constant, exact norm, divergence guard") {
    const LatticeGeometry chain({12});
    const auto part = ClusterPartition::tiled_axis0(chain, 2, 6, {2, 9});
    const double alpha = 3.0;

    const auto bound = offcluster_norm_bound(chain, part, alpha, 1);
    // K=2 has a single adjacent pair: 2^{D+2} D b L^{D-alpha}
    CHECK(bound.analytic == Approx(8.0 * 1.0 * std::pow(4.0, -2.0)));
    CHECK_FALSE(bound.exact.has_value());

    // with n = b+1 total bosons no single hop can overflow a cluster: the
    // exact off-cluster norm vanishes identically
    Rng rng(5);
    for (int draw = 0; draw < 3; ++draw) {
        const auto j = random_admissible(chain, alpha, rng);
        const auto withexact = offcluster_norm_bound(chain, part, alpha, 1, &j, 1.0);
        REQUIRE(withexact.exact.has_value());
        CHECK(*withexact.exact == Approx(0.0).margin(1e-14));
        CHECK(*withexact.exact <= withexact.analytic);
    }

    CHECK_THROWS_AS(offcluster_norm_bound(chain, part, 0.9, 1), domain_error);
}

TEST_CASE("off-cluster exact norm is nonzero once a cluster can overflow") {
    // Three clusters, one boson each: a state may stack b+1 = 2 bosons at a
    // cluster edge and hop a third one in. The paper-style analytic value is
    // an asymptotic statement about core-localised states; the honest dense
    // norm over the whole truncated space exceeds it here, so only positivity
    // and the Gershgorin sub-inequality are asserted.
    const LatticeGeometry chain({9});
    const auto part = ClusterPartition::tiled_axis0(chain, 3, 3, {1, 4, 7});
    const double alpha = 3.0;
    const auto j = powerlaw_couplings(chain, alpha);
    const auto bound = offcluster_norm_bound(chain, part, alpha, 1, &j);
    REQUIRE(bound.exact.has_value());
    CHECK(*bound.exact > 0.5);

    // Gershgorin: the largest singular value of the inter-cluster block is at
    // most the largest absolute row sum of its Hermitian embedding.
    Rng rng(17);
    for (int draw = 0; draw < 5; ++draw) {
        const auto jr = random_admissible(chain, alpha, rng);
        const auto& c0 = part.cluster_sites(0);
        const auto& c1 = part.cluster_sites(1);
        MatrixXcd block(c0.size(), c1.size());
        for (std::size_t r = 0; r < c0.size(); ++r)
            for (std::size_t c = 0; c < c1.size(); ++c)
                block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = jr(c0[r], c1[c]);
        double row_sum = 0.0;
        for (Eigen::Index r = 0; r < block.rows(); ++r)
            row_sum = std::max(row_sum, block.cwiseAbs().row(r).sum());
        double col_sum = 0.0;
        for (Eigen::Index c = 0; c < block.cols(); ++c)
            col_sum = std::max(col_sum, block.cwiseAbs().col(c).sum());
        CHECK(spectral_norm(block) <= std::max(row_sum, col_sum) + 1e-12);
    }
}

TEST_CASE("single-hop terms on a truncated basis have norm at most the cap") {
    const LatticeGeometry chain({6});
    const std::vector<int> cluster_of{0, 0, 0, 1, 1, 1};
    const int cap = 3;  // b + 1 with b = 2
    const auto basis = FockBasis::enumerate_truncated(6, 4, cluster_of, cap);
    for (const auto [i, j] : {std::pair{2, 3}, std::pair{0, 5}, std::pair{1, 2}}) {
        MatrixXcd hop = MatrixXcd::Zero(static_cast<Eigen::Index>(basis.dimension()),
                                        static_cast<Eigen::Index>(basis.dimension()));
        for (std::size_t col = 0; col < basis.dimension(); ++col) {
            const auto image = hop_element(basis.state(col), i, j);
            if (!image) continue;
            const long row = basis.index_of(image->first);
            if (row >= 0) hop(row, static_cast<Eigen::Index>(col)) = image->second;
        }
        CHECK(spectral_norm(hop) <= static_cast<double>(cap) + 1e-12);
    }
}
