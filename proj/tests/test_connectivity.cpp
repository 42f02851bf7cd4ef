#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "lgs/connectivity.hpp"
#include "lgs/random.hpp"

using namespace lgs;
using boost::multiprecision::cpp_rational;

namespace {

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Edge> edges;
    for (vertex_t v = 1; v < n; ++v)
        edges.push_back({static_cast<vertex_t>(rng.below(v)), v});
    for (vertex_t i = 0; i < n; ++i)
        for (vertex_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p)
                edges.push_back({i, j});
    return Graph(n, std::move(edges));
}

// a=0, b=1 each adjacent to c..f = 2..5, no a-b edge
Graph fig5() { return Graph(6, {{0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 2}, {1, 3}, {1, 4}, {1, 5}}); }

using RationalMatrix = std::vector<std::vector<cpp_rational>>;

RationalMatrix exact_power_sum(const Graph& g, int c, cpp_rational s) {
    const auto n = g.vertex_count();
    RationalMatrix a(n, std::vector<cpp_rational>(n, 0));
    for (const auto& e : g.edges())
        a[e.u][e.v] = a[e.v][e.u] = 1;
    RationalMatrix power = a, sum(n, std::vector<cpp_rational>(n, 0));
    cpp_rational weight = s;
    for (int i = 1; i <= c; ++i) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t q = 0; q < n; ++q)
                sum[r][q] += weight * power[r][q];
        if (i == c)
            break;
        RationalMatrix next(n, std::vector<cpp_rational>(n, 0));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t m = 0; m < n; ++m)
                if (power[r][m] != 0)
                    for (std::size_t q = 0; q < n; ++q)
                        next[r][q] += power[r][m] * a[m][q];
        power = std::move(next);
        weight *= s;
    }
    for (std::size_t r = 0; r < n; ++r)
        sum[r][r] = 0;
    return sum;
}

std::vector<std::uint32_t> brute_top_k(const Eigen::MatrixXd& m, std::size_t row, std::size_t k) {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t j = 0; j < m.cols(); ++j)
        if (j != row)
            idx.push_back(j);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        const double va = m(static_cast<Eigen::Index>(row), a), vb = m(static_cast<Eigen::Index>(row), b);
        return va != vb ? va > vb : a < b;
    });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<std::uint32_t> sorted(std::vector<std::uint32_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("walk counts on the two-hub example") {
    auto naive = connectivity_matrix(fig5(), 2, 1.0);
    CHECK(naive.values(0, 1) == 4.0);
    CHECK(naive.values(0, 2) == 1.0);
    CHECK(naive.values.diagonal().isZero());
    auto spectral = connectivity_matrix_spectral(fig5(), 2, 1.0);
    CHECK((spectral.values - naive.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(spectral.values(0, 1) == doctest::Approx(4.0));

    auto pairs = select_neighborhoods(naive, 1);
    CHECK(pairs.neighborhood(0) == std::vector<std::uint32_t>{1});
    CHECK(pairs.attractive(0, 1));

    // with the default decay the single-hop term outweighs the four two-hop walks
    auto damped = connectivity_matrix(fig5(), 2, 0.1);
    CHECK(damped.values(0, 2) == doctest::Approx(0.1));
    CHECK(damped.values(0, 1) == doctest::Approx(0.04));
    CHECK(select_neighborhoods(damped, 1).neighborhood(0) == std::vector<std::uint32_t>{2});
}

TEST_CASE("single term is the scaled adjacency matrix") {
    auto g = random_graph(15, 0.2, 4);
    auto m = connectivity_matrix(g, 1, 0.3);
    CHECK((m.values - 0.3 * g.adjacency_matrix()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("K2 closed form through the eigendecomposition") {
    auto m = connectivity_matrix_spectral(Graph(2, {{0, 1}}), 3, 1.0);
    CHECK(m.values(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.values(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.values(0, 0) == 0.0);
}

TEST_CASE("naive power sum matches exact rational arithmetic") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto g = random_graph(10, 0.4, seed);
        const auto exact = exact_power_sum(g, 5, cpp_rational(1, 2));
        auto m = connectivity_matrix(g, 5, 0.5);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 10; ++j)
                CHECK(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
                      doctest::Approx(static_cast<double>(exact[i][j])).epsilon(1e-14));
        // the ranking derived from both must agree
        for (std::size_t i = 0; i < 10; ++i) {
            std::vector<std::uint32_t> order(10);
            std::iota(order.begin(), order.end(), 0);
            order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return exact[i][a] > exact[i][b]; });
            std::vector<std::uint32_t> top(order.begin(), order.begin() + 3);
            CHECK(sorted(select_neighborhoods(m, 3).neighborhood(i)) == sorted(top));
        }
    }
}

TEST_CASE("spectral path agrees with the naive path") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 4 + seed * 2;
        auto g = random_graph(n, 0.2, seed);
        for (int c : {1, 2, 5, 10})
            for (double s : {0.1, 0.5, 1.0}) {
                auto a = connectivity_matrix(g, c, s);
                auto b = connectivity_matrix_spectral(g, c, s);
                const double scale = std::max(1.0, a.values.cwiseAbs().maxCoeff());
                CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-8 * scale);
                CHECK((b.values - b.values.transpose()).isZero());
            }
    }
    auto g = random_graph(32, 0.2, 123);
    CHECK((connectivity_matrix(g, 10, 0.1).values - connectivity_matrix_spectral(g, 10, 0.1).values)
              .cwiseAbs()
              .maxCoeff() < 1e-8);
}

TEST_CASE("argument checks") {
    auto g = random_graph(8, 0.3, 1);
    CHECK_THROWS_AS(connectivity_matrix(g, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(connectivity_matrix(g, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(connectivity_matrix(g, 2, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(connectivity_matrix(g, 2, 0.5, 4), std::length_error);
    CHECK_THROWS_AS(connectivity_matrix_spectral(g, 2, 0.5, 4), std::length_error);
    auto m = connectivity_matrix(g, 2, 0.5);
    CHECK_THROWS_AS(select_neighborhoods(m, 0), std::invalid_argument);
    CHECK_THROWS_AS(select_neighborhoods(m, 8), std::invalid_argument);
    CHECK_NOTHROW(select_neighborhoods(m, 7));
}

TEST_CASE("neighborhood selection") {
    SUBCASE("full neighborhoods attract every pair") {
        auto pairs = select_neighborhoods(connectivity_matrix(random_graph(12, 0.2, 2), 3, 0.5), 11);
        CHECK(pairs.attract_count() == 66);
        CHECK(pairs.repel_count() == 0);
    }
    SUBCASE("matches a full sort per row") {
        Rng rng(17);
        Eigen::MatrixXd m(20, 20);
        for (Eigen::Index i = 0; i < 20; ++i)
            for (Eigen::Index j = 0; j < 20; ++j)
                m(i, j) = rng.uniform();
        auto pairs = select_neighborhoods(m, 3);
        for (std::size_t i = 0; i < 20; ++i) {
            CHECK(sorted(pairs.neighborhood(i)) == brute_top_k(m, i, 3));
            CHECK(pairs.neighborhood(i).size() == 3);
        }
        // union rule
        for (std::uint32_t i = 0; i < 20; ++i)
            for (std::uint32_t j = 0; j < 20; ++j) {
                if (i == j)
                    continue;
                const auto& ni = pairs.neighborhood(i);
                const auto& nj = pairs.neighborhood(j);
                const bool expected = std::find(ni.begin(), ni.end(), j) != ni.end() ||
                                      std::find(nj.begin(), nj.end(), i) != nj.end();
                CHECK(pairs.attractive(i, j) == expected);
            }
        CHECK(pairs.attract_count() + pairs.repel_count() == 190);
        CHECK(pairs.attract_pairs().size() == pairs.attract_count());
        CHECK(pairs.repel_pairs().size() == pairs.repel_count());
    }
    SUBCASE("ties go to the smaller index") {
        Eigen::MatrixXd m = Eigen::MatrixXd::Ones(5, 5);
        auto pairs = select_neighborhoods(m, 2);
        CHECK(sorted(pairs.neighborhood(0)) == std::vector<std::uint32_t>{1, 2});
        CHECK(sorted(pairs.neighborhood(3)) == std::vector<std::uint32_t>{0, 1});
    }
    SUBCASE("coverage grows with k") {
        auto m = connectivity_matrix(random_graph(25, 0.15, 8), 10, 0.1);
        auto previous = select_neighborhoods(m, 1);
        for (std::size_t k = 2; k < 25; ++k) {
            auto current = select_neighborhoods(m, k);
            for (auto [i, j] : previous.attract_pairs())
                CHECK(current.attractive(i, j));
            previous = std::move(current);
        }
    }
    SUBCASE("relabeling permutes neighborhoods") {
        Rng rng(5);
        const std::size_t n = 15;
        Eigen::MatrixXd m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rng.uniform();
        std::vector<std::uint32_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm.begin(), perm.end());
        Eigen::MatrixXd pm(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                pm(perm[i], perm[j]) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        auto a = select_neighborhoods(m, 4), b = select_neighborhoods(pm, 4);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::uint32_t> mapped;
            for (auto j : a.neighborhood(i))
                mapped.push_back(perm[j]);
            CHECK(sorted(mapped) == sorted(b.neighborhood(perm[i])));
        }
    }
    SUBCASE("cliques keep neighborhoods inside") {
        std::vector<Edge> edges;
        for (vertex_t c = 0; c < 3; ++c)
            for (vertex_t i = 0; i < 6; ++i)
                for (vertex_t j = i + 1; j < 6; ++j)
                    edges.push_back({c * 6 + i, c * 6 + j});
        auto m = connectivity_matrix(Graph(18, edges), 10, 0.1);
        auto pairs = select_neighborhoods(m, 4);
        for (std::size_t v = 0; v < 18; ++v)
            for (auto u : pairs.neighborhood(v))
                CHECK(u / 6 == v / 6);
    }
}

TEST_CASE("csv dumps") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 1.5, 1.5, 0;
    std::ostringstream out;
    write_matrix_csv(m, out);
    CHECK(out.str() == "0,1.5\n1.5,0\n");
    std::ostringstream pairs_out;
    select_neighborhoods(m, 1).write_csv(pairs_out);
    CHECK(pairs_out.str() == "vertex,neighbor,rank\n0,1,0\n1,0,0\n");
}
