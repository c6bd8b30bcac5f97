#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace ttsis;

namespace {

const ModelParams kRates{1.0, 0.5, 0.01};

ObservationSeries synthetic(const Network& g, double t_max, std::uint64_t seed)
{
    Rng rng(seed);
    NetworkState x0(static_cast<std::size_t>(g.size()));
    x0.set(0, 1);
    return resample_uniform(simulate_epidemic(g, kRates, x0, t_max, rng), 0.1, t_max);
}

} // namespace

TEST(PairwiseSum, MatchesNaiveSum)
{
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = static_cast<double>(i % 7) - 3.0;
    EXPECT_DOUBLE_EQ(pairwise_sum(v), std::accumulate(v.begin(), v.end(), 0.0));
    EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(LogLikelihood, SingleInterval)
{
    const Network g = make_chain(3);
    const auto obs = parse_observations("0 100\n0.1 110\n");
    const auto r = log_likelihood(g, kRates, obs, SolverKind::dense, SolverConfig{});
    const double p = transition_prob_dense(g, kRates, obs[0].state, obs[1].state, 0.1);
    EXPECT_NEAR(r.log_like, std::log(p), 1e-12);
    ASSERT_EQ(r.per_interval.size(), 1u);
    EXPECT_NEAR(r.per_interval[0], std::log10(p), 1e-12);
    EXPECT_EQ(r.solver_used, SolverKind::dense);
}

TEST(LogLikelihood, MarkovFactorization)
{
    const Network g = make_chain(4);
    const auto obs = synthetic(g, 30.0, 3);
    const std::size_t mid = obs.size() / 2;
    const auto full = log_likelihood(g, kRates, obs, SolverKind::dense, SolverConfig{});
    const auto head = log_likelihood(g, kRates, obs.slice(0, mid), SolverKind::dense, SolverConfig{});
    const auto tail = log_likelihood(g, kRates, obs.slice(mid, obs.size() - 1), SolverKind::dense, SolverConfig{});
    EXPECT_NEAR(full.log_like, head.log_like + tail.log_like, 1e-10);
    EXPECT_NEAR(full.log_like, std::log(10.0) * std::accumulate(full.per_interval.begin(), full.per_interval.end(), 0.0),
                1e-9);
}

TEST(LogLikelihood, AppendingOneRecord)
{
    const Network g = make_chain(4);
    const auto obs = synthetic(g, 10.0, 4);
    const auto shorter = obs.slice(0, obs.size() - 2);
    const auto a = log_likelihood(g, kRates, obs, SolverKind::dense, SolverConfig{});
    const auto b = log_likelihood(g, kRates, shorter, SolverKind::dense, SolverConfig{});
    const auto& last = obs[obs.size() - 1];
    const auto& prev = obs[obs.size() - 2];
    const double p = transition_prob_dense(g, kRates, prev.state, last.state, last.time - prev.time);
    EXPECT_NEAR(a.log_like, b.log_like + std::log(p), 1e-10);
}

TEST(LogLikelihood, TTMatchesDenseOnChain)
{
    const Network g = make_chain(5);
    const auto obs = synthetic(g, 50.0, 5);
    const auto dense = log_likelihood(g, kRates, obs, SolverKind::dense, SolverConfig{});
    const auto tt = log_likelihood(g, kRates, obs, SolverKind::tt, SolverConfig{});
    EXPECT_LE(std::abs(tt.log_like - dense.log_like), 1e-3);
    EXPECT_EQ(tt.n_accuracy_failures, 0u);
    LikelihoodOptions threaded;
    threaded.jobs = 3;
    EXPECT_EQ(log_likelihood(g, kRates, obs, SolverKind::tt, SolverConfig{}, threaded).log_like, tt.log_like);
}

TEST(LogLikelihood, PermutationInvariance)
{
    Rng rng(6);
    const Network g = ttsis::testing::random_network(rng, 5, 0.5);
    const auto obs = synthetic(g, 20.0, 6);
    const std::vector<int> order{3, 0, 4, 1, 2};
    const auto a = log_likelihood(g, kRates, obs, SolverKind::dense, SolverConfig{});
    const auto b = log_likelihood(g.permuted(order), kRates, obs.permuted(order), SolverKind::dense, SolverConfig{});
    EXPECT_NEAR(a.log_like, b.log_like, 1e-8);
}

TEST(LogLikelihood, FloorsVanishingProbabilities)
{
    // five infections within 1e-70 time units
    const auto obs = parse_observations("0 00000\n1e-70 11111\n");
    const auto r = log_likelihood(Network(5), kRates, obs, SolverKind::dense, SolverConfig{});
    EXPECT_EQ(r.n_floored, 1u);
    EXPECT_DOUBLE_EQ(r.per_interval[0], -300.0);
    EXPECT_TRUE(std::isfinite(r.log_like));
}

TEST(LogLikelihood, SsaZeroGivesMinusInfinity)
{
    const Network chain = make_chain(6);
    const auto obs = synthetic(chain, 30.0, 7);
    LikelihoodOptions opts;
    opts.n_ssa = 10;
    const auto r = log_likelihood(Network(6), kRates, obs, SolverKind::ssa, SolverConfig{}, opts);
    EXPECT_GT(r.n_zero, 0u);
    EXPECT_EQ(r.log_like, -std::numeric_limits<double>::infinity());
    EXPECT_EQ(r.n_floored, 0u);
    EXPECT_EQ(log_likelihood(Network(6), kRates, obs, SolverKind::ssa, SolverConfig{}, opts).per_interval,
              r.per_interval);
}

TEST(LogLikelihood, Preconditions)
{
    const auto one = parse_observations("0 10\n");
    EXPECT_THROW(log_likelihood(make_chain(2), kRates, one, SolverKind::dense, SolverConfig{}),
                 std::invalid_argument);
    const auto obs = parse_observations("0 10\n0.1 11\n");
    EXPECT_THROW(log_likelihood(make_chain(3), kRates, obs, SolverKind::tt, SolverConfig{}), DimensionMismatch);
}

TEST(IntervalGrouping, SharesSourceAndLength)
{
    const auto obs = parse_observations("0 10\n0.1 10\n0.2 11\n0.3 10\n0.5 10\n");
    const auto groups = detail::group_intervals(obs);
    // (10,0.1) x2 [k=1,2], (11,0.1) [k=3], (10,0.2) [k=4]
    ASSERT_EQ(groups.size(), 3u);
    EXPECT_EQ(groups[0].intervals, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(groups[2].dt, 0.2);
}

TEST(SolverKind, Parse)
{
    EXPECT_EQ(parse_solver("tt"), SolverKind::tt);
    EXPECT_EQ(parse_solver("ssa"), SolverKind::ssa);
    EXPECT_FALSE(parse_solver("bogus").has_value());
    EXPECT_EQ(to_string(SolverKind::dense), "dense");
}

TEST(ContrastMatrix, ChainTruth)
{
    const Network truth = make_chain(4);
    std::vector<ObservationSeries> data;
    for (std::uint64_t s = 0; s < 3; ++s)
        data.push_back(synthetic(truth, 50.0, 100 + s));
    LikelihoodOptions opts;
    opts.jobs = 2;
    const auto c = contrast_matrix(truth, data, kRates, SolverKind::dense, SolverConfig{}, opts);
    for (int m = 0; m < 4; ++m) {
        EXPECT_EQ(c(m, m), 0.0);
        for (int n = 0; n < m; ++n) {
            EXPECT_EQ(c(m, n), c(n, m));
            if (truth.has_edge(m, n)) {
                EXPECT_LT(c(m, n), 0.0);
            }
        }
    }

    const auto single = contrast_matrix(truth, {data[0]}, kRates, SolverKind::dense, SolverConfig{});
    const double ref = log_likelihood(truth, kRates, data[0], SolverKind::dense, SolverConfig{}).log10_like();
    Network toggled = truth;
    toggled.remove_edge(1, 0);
    const double alt = log_likelihood(toggled, kRates, data[0], SolverKind::dense, SolverConfig{}).log10_like();
    EXPECT_NEAR(single(1, 0), alt - ref, 1e-9);
    EXPECT_THROW(contrast_matrix(truth, {}, kRates, SolverKind::dense, SolverConfig{}), std::invalid_argument);
}

TEST(ContrastMatrix, Tsv)
{
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
    c(1, 0) = c(0, 1) = -1.5;
    c(2, 1) = c(1, 2) = 0.25;
    EXPECT_EQ(contrast_tsv(c), "m\tn\tcontrast\n2\t1\t-1.5\n3\t1\t0\n3\t2\t0.25\n");
}

TEST(ParallelFor, PropagatesExceptions)
{
    std::vector<int> hit(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { hit[i] = 1; });
    EXPECT_EQ(std::accumulate(hit.begin(), hit.end(), 0), 50);
    EXPECT_THROW(parallel_for(10, 3,
                              [](std::size_t i) {
                                  if (i == 4)
                                      throw SolverError("boom");
                              }),
                 SolverError);
}
