#pragma once

#include "ttsis/error.hpp"
#include "ttsis/forward.hpp"
#include "ttsis/network.hpp"
#include "ttsis/observations.hpp"
#include "ttsis/parallel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ttsis {

enum class SolverKind { tt, dense, ssa };

inline std::string_view to_string(SolverKind s)
{
    switch (s) {
    case SolverKind::tt: return "tt";
    case SolverKind::dense: return "dense";
    case SolverKind::ssa: return "ssa";
    }
    return "?";
}

inline std::optional<SolverKind> parse_solver(std::string_view s)
{
    if (s == "tt")
        return SolverKind::tt;
    if (s == "dense")
        return SolverKind::dense;
    if (s == "ssa")
        return SolverKind::ssa;
    return std::nullopt;
}

/// Probabilities below this are floored before taking logs (TT and dense solvers).
inline constexpr double kProbabilityFloor = 1e-300;

struct LikelihoodOptions {
    std::size_t n_ssa = 1000;
    std::uint64_t ssa_seed = 0; ///< interval k uses stream k of this seed
    std::size_t jobs = 1;
};

struct LikelihoodReport {
    double log_like = 0.0;             ///< natural log; -inf when a factor is exactly zero
    std::vector<double> per_interval;  ///< log10 Prob(x_{k-1} -> x_k)
    std::size_t n_floored = 0;
    std::size_t n_zero = 0;            ///< SSA intervals with no hit
    std::size_t n_accuracy_failures = 0;
    SolverKind solver_used = SolverKind::tt;

    double log10_like() const { return log_like / std::log(10.0); }
};

/// Pairwise summation; result is independent of thread scheduling.
inline double pairwise_sum(std::span<const double> v)
{
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v)
            s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace detail {

struct IntervalGroup {
    NetworkState source;
    double dt = 0.0;
    std::vector<std::size_t> intervals;
};

/// Intervals sharing a source state and (10-digit) length need one forward solve.
inline std::vector<IntervalGroup> group_intervals(const ObservationSeries& obs)
{
    std::map<std::pair<NetworkState, double>, std::size_t> index;
    std::vector<IntervalGroup> groups;
    for (std::size_t k = 1; k < obs.size(); ++k) {
        const double dt = canonical_time(obs[k].time - obs[k - 1].time);
        auto [it, inserted] = index.try_emplace({obs[k - 1].state, dt}, groups.size());
        if (inserted)
            groups.push_back({obs[k - 1].state, dt, {}});
        groups[it->second].intervals.push_back(k);
    }
    return groups;
}

inline void check_inputs(const Network& net, const ObservationSeries& obs)
{
    if (obs.intervals() < 1)
        throw std::invalid_argument("log_likelihood: need at least two observation records");
    if (obs.node_count() != static_cast<std::size_t>(net.size()))
        throw DimensionMismatch("log_likelihood: observations have " + std::to_string(obs.node_count()) +
                                " nodes, network has " + std::to_string(net.size()));
}

} // namespace detail

/// Markov-factorized log-likelihood of the observations on one network.
inline LikelihoodReport log_likelihood(const Network& net, const ModelParams& params, const ObservationSeries& obs,
                                       SolverKind solver, const SolverConfig& cfg,
                                       const LikelihoodOptions& opts = {})
{
    detail::check_inputs(net, obs);
    params.validate();
    const std::size_t k_count = obs.intervals();
    std::vector<double> prob(k_count, 0.0);
    std::vector<char> failure(k_count, 0);

    switch (solver) {
    case SolverKind::tt: {
        const TTPropagator prop(net, params, cfg);
        const auto groups = detail::group_intervals(obs);
        parallel_for(groups.size(), opts.jobs, [&](std::size_t g) {
            const auto& group = groups[g];
            const TTVector p = prop.evolve_from(group.source, group.dt);
            for (std::size_t k : group.intervals) {
                const auto tp = clamp_probability(prop.element(p, obs[k].state));
                prob[k - 1] = tp.value;
                failure[k - 1] = tp.accuracy_failure;
            }
        });
        break;
    }
    case SolverKind::dense: {
        DenseTransitions dense(net, params);
        const auto groups = detail::group_intervals(obs);
        for (const auto& group : groups)
            for (std::size_t k : group.intervals) {
                const auto tp = clamp_probability(dense.probability(group.source, obs[k].state, group.dt));
                prob[k - 1] = tp.value;
                failure[k - 1] = tp.accuracy_failure;
            }
        break;
    }
    case SolverKind::ssa: {
        if (opts.n_ssa < 1)
            throw std::invalid_argument("log_likelihood: n_ssa must be >= 1");
        parallel_for(k_count, opts.jobs, [&](std::size_t i) {
            Rng rng = derived_rng(opts.ssa_seed, i);
            prob[i] = transition_prob_ssa(net, params, obs[i].state, obs[i + 1].state,
                                          obs[i + 1].time - obs[i].time, opts.n_ssa, rng);
        });
        break;
    }
    }

    LikelihoodReport report;
    report.solver_used = solver;
    report.per_interval.resize(k_count);
    for (std::size_t i = 0; i < k_count; ++i) {
        report.n_accuracy_failures += failure[i] != 0;
        double p = prob[i];
        if (solver == SolverKind::ssa) {
            if (p == 0.0) {
                ++report.n_zero;
                report.per_interval[i] = -std::numeric_limits<double>::infinity();
                continue;
            }
        } else if (p < kProbabilityFloor) {
            p = kProbabilityFloor;
            ++report.n_floored;
        }
        report.per_interval[i] = std::log10(p);
    }
    report.log_like = report.n_zero > 0 ? -std::numeric_limits<double>::infinity()
                                        : std::log(10.0) * pairwise_sum(report.per_interval);
    return report;
}

/// Mean over datasets of log10 L(truth with {m,n} toggled) - log10 L(truth).
/// Entries (m,n) and (n,m) hold the same value; the diagonal is zero.
inline Eigen::MatrixXd contrast_matrix(const Network& truth, const std::vector<ObservationSeries>& datasets,
                                       const ModelParams& params, SolverKind solver, const SolverConfig& cfg,
                                       const LikelihoodOptions& opts = {})
{
    if (datasets.empty())
        throw std::invalid_argument("contrast_matrix: need at least one dataset");
    const std::size_t n_pairs = truth.n_pairs();
    const std::size_t per_set = n_pairs + 1;

    LikelihoodOptions inner = opts;
    inner.jobs = 1;
    std::vector<double> values(datasets.size() * per_set);
    parallel_for(values.size(), opts.jobs, [&](std::size_t task) {
        const std::size_t d = task / per_set;
        const std::size_t c = task % per_set;
        Network g = truth;
        if (c > 0)
            g.toggle_pair(c - 1);
        values[task] = log_likelihood(g, params, datasets[d], solver, cfg, inner).log10_like();
    });

    const int n = truth.size();
    Eigen::MatrixXd contrast = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t p = 0; p < n_pairs; ++p) {
        double sum = 0.0;
        for (std::size_t d = 0; d < datasets.size(); ++d)
            sum += values[d * per_set + p + 1] - values[d * per_set];
        const auto [m, k] = truth.pair_nodes(p);
        contrast(m, k) = contrast(k, m) = sum / static_cast<double>(datasets.size());
    }
    return contrast;
}

/// "m\tn\tcontrast" with 1-based labels, one line per pair m > n.
inline std::string contrast_tsv(const Eigen::MatrixXd& contrast)
{
    std::string out = "m\tn\tcontrast\n";
    char buf[96];
    for (Eigen::Index m = 1; m < contrast.rows(); ++m)
        for (Eigen::Index n = 0; n < m; ++n) {
            std::snprintf(buf, sizeof buf, "%ld\t%ld\t%.10g\n", static_cast<long>(m + 1), static_cast<long>(n + 1),
                          contrast(m, n));
            out += buf;
        }
    return out;
}

} // namespace ttsis
