#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace ttsis;

namespace {

Eigen::Matrix2d single_node_generator(const ModelParams& p)
{
    Eigen::Matrix2d a;
    a << -p.eps, p.gamma, p.eps, -p.gamma;
    return a;
}

std::size_t degree_sum(const Network& g)
{
    std::size_t s = 0;
    for (int n = 0; n < g.size(); ++n)
        s += static_cast<std::size_t>(g.degree(n));
    return s;
}

} // namespace

TEST(InfectedNeighbors, Examples)
{
    const Network chain = make_chain(3);
    EXPECT_EQ(infected_neighbors(NetworkState::from_string("101"), 1, chain), 2);
    EXPECT_EQ(infected_neighbors(NetworkState::from_string("111"), 0, Network(3)), 0);
    EXPECT_EQ(infected_neighbors(NetworkState::from_string("000"), 1, chain), 0);
}

TEST(TransitionRate, Examples)
{
    const Network chain = make_chain(2);
    const ModelParams p{1.0, 0.5, 0.01};
    const auto x = NetworkState::from_string("10");
    EXPECT_DOUBLE_EQ(transition_rate(x, NetworkState::from_string("11"), chain, p), 1.01);
    EXPECT_DOUBLE_EQ(transition_rate(x, NetworkState::from_string("00"), chain, p), 0.5);
    EXPECT_EQ(transition_rate(x, NetworkState::from_string("01"), chain, p), 0.0);
    EXPECT_EQ(transition_rate(x, x, chain, p), 0.0);
}

TEST(ModelParams, Validation)
{
    EXPECT_NO_THROW((ModelParams{0.0, 0.5, 0.01}).validate());
    EXPECT_THROW((ModelParams{-1.0, 0.5, 0.01}).validate(), std::invalid_argument);
    EXPECT_THROW((ModelParams{1.0, 0.0, 0.01}).validate(), std::invalid_argument);
    EXPECT_THROW((ModelParams{1.0, 0.5, 0.0}).validate(), std::invalid_argument);
    EXPECT_THROW((ModelParams{1.0, std::nan(""), 0.01}).validate(), std::invalid_argument);
}

TEST(Generator, SingleNode)
{
    const ModelParams p{1.0, 0.5, 0.01};
    EXPECT_TRUE(cp_to_dense(build_generator_cp(Network(1), p)).isApprox(single_node_generator(p), 1e-15));
    EXPECT_TRUE(build_generator_dense(Network(1), p).isApprox(single_node_generator(p), 1e-15));
}

TEST(Generator, ChainTermCount)
{
    EXPECT_EQ(build_generator_cp(make_chain(3), ModelParams{}).size(), 10u);
}

TEST(Generator, CompleteGraphPairFromHealthy)
{
    Network k2(2);
    k2.add_edge(0, 1);
    const ModelParams p{1.0, 0.5, 0.01};
    const auto a = build_generator_dense(k2, p);
    EXPECT_DOUBLE_EQ(a(1, 0), p.eps);
    EXPECT_DOUBLE_EQ(a(2, 0), p.eps);
    EXPECT_EQ(a(3, 0), 0.0);
    EXPECT_DOUBLE_EQ(a(0, 0), -2 * p.eps);
}

TEST(Generator, CpMatchesDenseOnRandomGraphs)
{
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 5));
        const Network g = ttsis::testing::random_network(rng, n, 0.5);
        const ModelParams p{0.1 + 1.9 * uniform01(rng), 0.1 + 1.9 * uniform01(rng), 0.1 + 1.9 * uniform01(rng)};
        const auto cp = build_generator_cp(g, p);
        const auto dense = build_generator_dense(g, p);
        EXPECT_LE((cp_to_dense(cp) - dense).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE(dense.colwise().sum().cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_EQ(cp.size(), 2 * static_cast<std::size_t>(n) + degree_sum(g));

        Eigen::MatrixXd off = dense;
        off.diagonal().setZero();
        EXPECT_GE(off.minCoeff(), 0.0);
        for (Index c = 0; c < off.cols(); ++c)
            EXPECT_LE((off.col(c).array() != 0.0).count(), 2 * n);
    }
}

TEST(Generator, ZeroBetaIsKroneckerSum)
{
    Rng rng(41);
    const Network g = ttsis::testing::random_network(rng, 4, 0.6);
    const ModelParams p{0.0, 0.7, 0.2};
    const Eigen::Matrix2d a1 = single_node_generator(p);
    const Index size = 16;
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(size, size);
    for (int n = 0; n < 4; ++n) {
        // node 0 is the most significant bit: I_{2^n} (x) a1 (x) I_{2^{3-n}}
        const Index outer = Index{1} << n, inner = Index{1} << (3 - n);
        for (Index o = 0; o < outer; ++o)
            for (Index i = 0; i < inner; ++i)
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c)
                        expected(o * 2 * inner + r * inner + i, o * 2 * inner + c * inner + i) += a1(r, c);
    }
    EXPECT_LE((build_generator_dense(g, p) - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((cp_to_dense(build_generator_cp(g, p)) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Generator, ExitRateBoundDominatesDiagonal)
{
    Rng rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        const Network g = ttsis::testing::random_network(rng, 5, 0.5);
        const ModelParams p{1.0, 0.5, 0.01};
        const auto cp = build_generator_cp(g, p);
        ASSERT_TRUE(cp.exit_rate_bound.has_value());
        EXPECT_GE(*cp.exit_rate_bound, build_generator_dense(g, p).diagonal().cwiseAbs().maxCoeff() - 1e-12);
    }
}

TEST(Generator, DenseMemoryGuard)
{
    EXPECT_THROW(build_generator_dense(Network(15), ModelParams{}), MemoryGuardError);
}
