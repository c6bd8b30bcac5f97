#pragma once

#include "ttsis/error.hpp"
#include "ttsis/likelihood.hpp"
#include "ttsis/network.hpp"
#include "ttsis/observations.hpp"
#include "ttsis/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ttsis {

/// Symmetric nonnegative link evidence with zero diagonal.
struct ScoreMatrix {
    Eigen::MatrixXd h;

    int size() const { return static_cast<int>(h.rows()); }
};

/// For every newly infected node n in interval k, adds 1/|I_k| to h(m,n) for
/// each other m in I_k, the nodes infected at either end of the interval.
inline ScoreMatrix initial_scores(const ObservationSeries& obs)
{
    if (obs.intervals() < 1)
        throw std::invalid_argument("initial_scores: need at least two observation records");
    const std::size_t n = obs.node_count();
    ScoreMatrix s{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
    std::vector<std::size_t> active;
    for (std::size_t k = 1; k < obs.size(); ++k) {
        const auto& prev = obs[k - 1].state;
        const auto& next = obs[k].state;
        active.clear();
        for (std::size_t m = 0; m < n; ++m)
            if (prev[m] == 1 || next[m] == 1)
                active.push_back(m);
        const double weight = 1.0 / static_cast<double>(active.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (prev[i] != 0 || next[i] != 1)
                continue;
            for (std::size_t m : active) {
                if (m == i)
                    continue;
                const auto a = static_cast<Eigen::Index>(m), b = static_cast<Eigen::Index>(i);
                s.h(a, b) += weight;
                s.h(b, a) += weight;
            }
        }
    }
    return s;
}

enum class GuessMode { threshold, sample };

/// Threshold mode keeps links scoring at least the mean off-diagonal score;
/// sample mode keeps each link with probability h/max h.
inline Network initial_guess(const ScoreMatrix& scores, GuessMode mode, Rng* rng = nullptr)
{
    const int n = scores.size();
    if (n < 1)
        throw std::invalid_argument("initial_guess: empty score matrix");
    Network g(n);
    double total = 0.0, peak = 0.0;
    for (int m = 1; m < n; ++m)
        for (int k = 0; k < m; ++k) {
            const double v = scores.h(m, k);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("initial_guess: scores must be finite and nonnegative");
            total += v;
            peak = std::max(peak, v);
        }
    if (peak == 0.0)
        return g;

    if (mode == GuessMode::threshold) {
        const double mean = total / static_cast<double>(g.n_pairs());
        for (int m = 1; m < n; ++m)
            for (int k = 0; k < m; ++k)
                if (scores.h(m, k) >= mean)
                    g.add_edge(m, k);
        return g;
    }
    if (!rng)
        throw std::invalid_argument("initial_guess: sample mode needs a random generator");
    for (int m = 1; m < n; ++m)
        for (int k = 0; k < m; ++k)
            if (uniform01(*rng) < scores.h(m, k) / peak)
                g.add_edge(m, k);
    return g;
}

enum class ProposalKind { toggle, norepl };

inline std::optional<ProposalKind> parse_proposal(std::string_view s)
{
    if (s == "toggle")
        return ProposalKind::toggle;
    if (s == "norepl")
        return ProposalKind::norepl;
    return std::nullopt;
}

struct Proposal {
    Network network;
    std::size_t link = 0; ///< pair index that was toggled
};

inline Proposal propose_toggle(const Network& g, Rng& rng)
{
    if (g.size() < 2)
        throw std::invalid_argument("propose_toggle: need at least two nodes");
    Proposal p{g, uniform_index(rng, g.n_pairs())};
    p.network.toggle_pair(p.link);
    return p;
}

/// Position within the current block of a without-replacement proposal sequence.
struct NoReplacementCursor {
    std::vector<std::size_t> order;
    std::size_t position = 0;
};

/// Toggles links in the order of a uniform random permutation, redrawn every n_pairs proposals.
inline Proposal propose_norepl(NoReplacementCursor& cursor, const Network& g, Rng& rng)
{
    if (g.size() < 2)
        throw std::invalid_argument("propose_norepl: need at least two nodes");
    const std::size_t n_pairs = g.n_pairs();
    if (cursor.order.size() != n_pairs || cursor.position >= n_pairs) {
        cursor.order.resize(n_pairs);
        for (std::size_t i = 0; i < n_pairs; ++i)
            cursor.order[i] = i;
        for (std::size_t i = n_pairs - 1; i > 0; --i)
            std::swap(cursor.order[i], cursor.order[uniform_index(rng, i + 1)]);
        cursor.position = 0;
    }
    Proposal p{g, cursor.order[cursor.position++]};
    p.network.toggle_pair(p.link);
    return p;
}

/// exp(new - old) with -inf meaning zero likelihood; two zeros give 1.
inline double mh_ratio(double loglike_new, double loglike_old)
{
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (loglike_new == neg_inf && loglike_old == neg_inf)
        return 1.0;
    if (loglike_new == neg_inf)
        return 0.0;
    if (loglike_old == neg_inf)
        return std::numeric_limits<double>::infinity();
    return std::exp(loglike_new - loglike_old);
}

struct McmcSample {
    std::size_t iteration = 0;
    Network network;          ///< chain state after this step
    double log_like = 0.0;    ///< natural log-likelihood of the chain state
    bool accepted = false;
    std::optional<std::size_t> proposed_link;
};

struct McmcChain {
    std::vector<McmcSample> samples;
    Network best;
    double best_log_like = -std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0; ///< likelihood computations actually performed
    bool aborted = false;
    std::string abort_reason;
};

struct McmcOptions {
    bool use_cache = true;
};

/// Metropolis-Hastings search over networks for an arbitrary log-likelihood
/// functor double(const Network&). Errors derived from ttsis::Error stop the
/// chain and return the samples gathered so far.
template <class LogLike>
McmcChain mcmc_optimize(LogLike&& log_like, const Network& g0, std::size_t n_eval, ProposalKind proposal, Rng& rng,
                        const McmcOptions& opts = {})
{
    if (n_eval < 1)
        throw std::invalid_argument("mcmc_optimize: n_eval must be >= 1");
    if (g0.size() < 2)
        throw std::invalid_argument("mcmc_optimize: need at least two nodes");

    McmcChain chain;
    std::map<std::vector<bool>, double> cache;
    auto evaluate = [&](const Network& g) {
        if (opts.use_cache) {
            if (auto it = cache.find(g.links()); it != cache.end())
                return it->second;
        }
        const double value = log_like(g);
        ++chain.evaluations;
        if (opts.use_cache)
            cache.emplace(g.links(), value);
        return value;
    };

    Network current = g0;
    double current_ll = 0.0;
    try {
        current_ll = evaluate(current);
    } catch (const Error& e) {
        chain.aborted = true;
        chain.abort_reason = e.what();
        chain.best = current;
        return chain;
    }
    chain.samples.push_back({0, current, current_ll, true, std::nullopt});
    chain.best = current;
    chain.best_log_like = current_ll;

    NoReplacementCursor cursor;
    for (std::size_t i = 1; i <= n_eval; ++i) {
        Proposal p = proposal == ProposalKind::toggle ? propose_toggle(current, rng)
                                                      : propose_norepl(cursor, current, rng);
        double proposed_ll = 0.0;
        try {
            proposed_ll = evaluate(p.network);
        } catch (const Error& e) {
            chain.aborted = true;
            chain.abort_reason = e.what();
            break;
        }
        const double h = mh_ratio(proposed_ll, current_ll);
        const double r = uniform01(rng);
        const bool accept = r < std::min(h, 1.0);
        if (accept) {
            current = std::move(p.network);
            current_ll = proposed_ll;
            if (current_ll > chain.best_log_like) {
                chain.best = current;
                chain.best_log_like = current_ll;
            }
        }
        chain.samples.push_back({i, current, current_ll, accept, p.link});
    }
    return chain;
}

/// MCMC with the data log-likelihood from the chosen solver.
inline McmcChain mcmc_optimize(const ObservationSeries& obs, const ModelParams& params, const Network& g0,
                               std::size_t n_eval, ProposalKind proposal, SolverKind solver, const SolverConfig& cfg,
                               Rng& rng, const LikelihoodOptions& lopts = {}, const McmcOptions& opts = {})
{
    auto ll = [&](const Network& g) { return log_likelihood(g, params, obs, solver, cfg, lopts).log_like; };
    return mcmc_optimize(ll, g0, n_eval, proposal, rng, opts);
}

/// Links as hex, pair index i at bit i, most significant digit first.
inline std::string edge_bitset_hex(const Network& g)
{
    const std::size_t n_pairs = g.n_pairs();
    const std::size_t digits = std::max<std::size_t>(1, (n_pairs + 3) / 4);
    std::string out(digits, '0');
    for (std::size_t d = 0; d < digits; ++d) {
        unsigned v = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t i = 4 * d + b;
            if (i < n_pairs && g.has_pair(i))
                v |= 1u << b;
        }
        out[digits - 1 - d] = "0123456789abcdef"[v];
    }
    return out;
}

/// "iter\tlog_like\taccepted\tdistance_to_truth\tedge_bitset_hex"; log_like is log10,
/// distance is "NA" without a reference network.
inline std::string chain_trace_tsv(const McmcChain& chain, const Network* reference = nullptr)
{
    std::string out = "iter\tlog_like\taccepted\tdistance_to_truth\tedge_bitset_hex\n";
    char buf[64];
    for (const auto& s : chain.samples) {
        out += std::to_string(s.iteration);
        out += '\t';
        if (std::isinf(s.log_like) && s.log_like < 0)
            out += "-inf";
        else {
            std::snprintf(buf, sizeof buf, "%.10g", s.log_like / std::log(10.0));
            out += buf;
        }
        out += s.accepted ? "\t1\t" : "\t0\t";
        out += reference ? std::to_string(network_distance(s.network, *reference)) : std::string("NA");
        out += '\t';
        out += edge_bitset_hex(s.network);
        out += '\n';
    }
    return out;
}

} // namespace ttsis
