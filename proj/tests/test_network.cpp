#include "helpers.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace ttsis;
using ttsis::testing::random_network;

TEST(Laplacian, PathGraph)
{
    Eigen::Matrix3d expected;
    expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    EXPECT_EQ(laplacian(make_chain(3)), Eigen::MatrixXd(expected));
}

TEST(Laplacian, EmptyAndComplete)
{
    EXPECT_TRUE(laplacian(Network(3)).isZero());
    Network k3(3);
    k3.add_edge(0, 1);
    k3.add_edge(1, 2);
    k3.add_edge(0, 2);
    Eigen::Matrix3d expected;
    expected << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    EXPECT_EQ(laplacian(k3), Eigen::MatrixXd(expected));
}

TEST(Laplacian, PositiveSemidefiniteWithNullVector)
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 7));
        const Network g = random_network(rng, n, 0.4);
        const Eigen::MatrixXd l = laplacian(g);
        EXPECT_TRUE(l.isApprox(l.transpose()));
        EXPECT_LT((l * Eigen::VectorXd::Ones(n)).norm(), 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
        EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-10);
    }
}

TEST(Fiedler, PathGraph)
{
    const auto fp = fiedler_vector(make_chain(3));
    EXPECT_NEAR(fp.lambda1, 1.0, 1e-12);
    EXPECT_NEAR(fp.vector(0), 1.0 / std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(fp.vector(1), 0.0, 1e-10);
    EXPECT_NEAR(fp.vector(2), -1.0 / std::sqrt(2.0), 1e-10);
    EXPECT_EQ(fiedler_ordering(make_chain(3)).order, (std::vector<int>{0, 1, 2}));
}

TEST(Fiedler, CompleteGraphAndDisconnected)
{
    Network k3(3);
    k3.add_edge(0, 1);
    k3.add_edge(1, 2);
    k3.add_edge(0, 2);
    EXPECT_NEAR(fiedler_vector(k3).lambda1, 3.0, 1e-12);
    EXPECT_NEAR(fiedler_vector(ttsis::testing::two_triangles()).lambda1, 0.0, 1e-12);
}

TEST(Fiedler, VectorIsUnitAndOrthogonalToOnes)
{
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 7));
        const auto fp = fiedler_vector(random_network(rng, n, 0.5));
        EXPECT_NEAR(fp.vector.norm(), 1.0, 1e-10);
        EXPECT_NEAR(fp.vector.sum(), 0.0, 1e-10);
    }
}

TEST(Fiedler, ZeroIffDisconnected)
{
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(uniform_index(rng, 7));
        const Network g = random_network(rng, n, 0.3);
        const bool zero = fiedler_vector(g).lambda1 < 1e-9;
        EXPECT_EQ(zero, !ttsis::testing::is_connected(g)) << serialize_network(g);
    }
}

TEST(FiedlerOrdering, GroupsComponents)
{
    Network g(6);
    // components {1,4,5} and {2,3,6}, interleaved labels
    g.add_edge(0, 3);
    g.add_edge(3, 4);
    g.add_edge(1, 2);
    g.add_edge(2, 5);
    const auto order = fiedler_ordering(g).order;
    auto comp = [](int v) { return v == 0 || v == 3 || v == 4; };
    for (int i = 1; i < 6; ++i)
        if (comp(order[static_cast<std::size_t>(i)]) != comp(order[0])) {
            for (int j = i; j < 6; ++j)
                EXPECT_NE(comp(order[static_cast<std::size_t>(j)]), comp(order[0]));
        }
}

TEST(FiedlerOrdering, DeterministicBijection)
{
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Network g = random_network(rng, 7, 0.4);
        const auto a = fiedler_ordering(g);
        EXPECT_TRUE(a.is_bijection());
        EXPECT_EQ(a.order, fiedler_ordering(g).order);
    }
    Network edge(2);
    edge.add_edge(0, 1);
    EXPECT_EQ(fiedler_ordering(edge).order, (std::vector<int>{0, 1}));
}

TEST(NodePermutation, Inverse)
{
    NodePermutation p{{2, 0, 3, 1}};
    EXPECT_EQ(p.inverse(), (std::vector<int>{1, 3, 0, 2}));
    EXPECT_FALSE((NodePermutation{{0, 0, 1}}).is_bijection());
}

TEST(NetworkDistance, Examples)
{
    const Network chain = make_chain(3);
    EXPECT_EQ(network_distance(chain, chain), 0u);
    Network closed = chain;
    closed.add_edge(0, 2);
    EXPECT_EQ(network_distance(chain, closed), 1u);
    Network full(4);
    for (std::size_t i = 0; i < full.n_pairs(); ++i)
        full.toggle_pair(i);
    EXPECT_EQ(network_distance(Network(4), full), 6u);
    EXPECT_THROW(network_distance(Network(3), Network(4)), DimensionMismatch);
}

TEST(NetworkDistance, IsMetric)
{
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Network a = random_network(rng, 6, 0.5), b = random_network(rng, 6, 0.5),
                      c = random_network(rng, 6, 0.5);
        EXPECT_EQ(network_distance(a, b), network_distance(b, a));
        EXPECT_LE(network_distance(a, c), network_distance(a, b) + network_distance(b, c));
        EXPECT_EQ(network_distance(a, b) == 0, a == b);
    }
}

TEST(Network, PairIndexRoundTrip)
{
    for (std::size_t i = 0; i < Network::pair_count(10); ++i) {
        const auto [m, n] = Network::pair_nodes(i);
        EXPECT_GT(m, n);
        EXPECT_EQ(Network::pair_index(m, n), i);
        EXPECT_EQ(Network::pair_index(n, m), i);
    }
}

TEST(Network, RejectsSelfLoopsAndBadNodes)
{
    Network g(3);
    EXPECT_THROW(g.add_edge(1, 1), std::invalid_argument);
    EXPECT_THROW(g.add_edge(0, 3), std::out_of_range);
    EXPECT_THROW(Network(0), std::invalid_argument);
}

TEST(NetworkFormat, ParseExamples)
{
    EXPECT_EQ(parse_network("3\n1 2\n2 3\n"), make_chain(3));
    const Network two = parse_network("2\n");
    EXPECT_EQ(two.size(), 2);
    EXPECT_EQ(two.edge_count(), 0u);
    EXPECT_EQ(parse_network("# comment\n3\n\n3 2\n# x\n2 1\n"), make_chain(3));
}

TEST(NetworkFormat, ParseErrors)
{
    EXPECT_THROW(parse_network("3\n1 1\n"), ParseError);
    EXPECT_THROW(parse_network("3\n1 4\n"), ParseError);
    EXPECT_THROW(parse_network("3\n1 2\n2 1\n"), ParseError);
    EXPECT_THROW(parse_network("3\n1 x\n"), ParseError);
    EXPECT_THROW(parse_network("3\n1 2 3\n"), ParseError);
    EXPECT_THROW(parse_network(""), ParseError);
    EXPECT_THROW(parse_network("0\n"), ParseError);
}

TEST(NetworkFormat, RoundTrip)
{
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Network g = random_network(rng, 1 + static_cast<int>(uniform_index(rng, 9)), 0.4);
        EXPECT_EQ(parse_network(serialize_network(g)), g);
    }
}

TEST(BuiltinNetworks, Shapes)
{
    EXPECT_EQ(make_chain(5).edge_count(), 4u);
    const Network sw = make_small_world(8);
    EXPECT_EQ(sw.edge_count(), 16u);
    for (int n = 0; n < 8; ++n)
        EXPECT_EQ(sw.degree(n), 4);
    const Network rewired = make_small_world(8, std::make_pair(0, 4));
    EXPECT_FALSE(rewired.has_edge(0, 1));
    EXPECT_TRUE(rewired.has_edge(0, 4));
    EXPECT_EQ(network_distance(sw, rewired), 2u);

    const Network austria = make_austria();
    EXPECT_EQ(austria.size(), 9);
    EXPECT_TRUE(ttsis::testing::is_connected(austria));
}
