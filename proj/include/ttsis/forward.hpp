#pragma once

#include "ttsis/cp_operator.hpp"
#include "ttsis/error.hpp"
#include "ttsis/generator.hpp"
#include "ttsis/gillespie.hpp"
#include "ttsis/network.hpp"
#include "ttsis/random.hpp"
#include "ttsis/state.hpp"
#include "ttsis/tensor_train.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

namespace ttsis {

struct SolverConfig {
    double tt_tol = 1e-6;               ///< relative accuracy of the TT evolution
    std::size_t max_substeps = 1000000; ///< cap on uniformization substeps
    bool use_fiedler_ordering = true;

    void validate() const
    {
        if (!(tt_tol > 0.0 && tt_tol < 1.0))
            throw std::invalid_argument("SolverConfig: tt_tol must be in (0, 1)");
        if (max_substeps < 1)
            throw std::invalid_argument("SolverConfig: max_substeps must be >= 1");
    }
};

struct EvolveStats {
    std::size_t substeps = 0;
    std::size_t series_terms = 0;
    Index max_rank = 1;
};

/// Negative values below this are reported as accuracy failures rather than rounding noise.
inline constexpr double kNegativeProbabilityTolerance = 1e-8;

struct TransitionProbability {
    double value = 0.0; ///< clamped to [0, 1]
    double raw = 0.0;
    bool accuracy_failure = false;
};

inline TransitionProbability clamp_probability(double raw)
{
    TransitionProbability p;
    p.raw = raw;
    p.accuracy_failure = !std::isfinite(raw) || raw < -kNegativeProbabilityTolerance;
    p.value = std::isfinite(raw) ? std::clamp(raw, 0.0, 1.0) : 0.0;
    return p;
}

namespace detail {

/// Generic bound on max |diagonal| of a CP operator.
inline double cp_diagonal_bound(const CPOperator& op)
{
    double bound = 0.0;
    for (const auto& t : op.terms()) {
        double prod = std::abs(t.coeff);
        for (const auto& f : t.factors)
            prod *= std::max(std::abs(f(0, 0)), std::abs(f(1, 1)));
        bound += prod;
    }
    return bound;
}

/// Poisson(lambda) weights w_0..w_L, L the first index whose tail mass
/// sum_{j>L} w_j is below tail_tol. The tail is lumped into w_L so the
/// weights sum to one and B-stochastic iterations conserve mass.
inline std::vector<double> poisson_weights(double lambda, double tail_tol)
{
    std::vector<double> w{std::exp(-lambda)};
    while (w.size() < 10000 && (w.back() > 1e-300 || w.size() <= static_cast<std::size_t>(lambda) + 1))
        w.push_back(w.back() * lambda / static_cast<double>(w.size()));

    std::vector<double> tail(w.size(), 0.0);
    for (std::size_t k = w.size() - 1; k > 0; --k)
        tail[k - 1] = tail[k] + w[k];

    std::size_t last = 1;
    while (last + 1 < w.size() && tail[last] >= tail_tol)
        ++last;
    w.resize(last + 1);
    w.back() += tail[last];
    return w;
}

/// Relative tolerance for each rounding inside one uniformization substep.
/// Frobenius truncation at tolerance e moves individual entries by up to
/// about e, so probabilities of size tt_tol keep relative accuracy tt_tol
/// only when e is about tt_tol^2. Floored at 1e-13 to stay above round-off.
inline double rounding_tolerance(double tt_tol, std::size_t series_terms)
{
    return std::max(tt_tol * tt_tol, 1e-13) / static_cast<double>(series_terms);
}

} // namespace detail

/// Approximates exp(A dt) p0 by uniformization in TT format.
///
/// With Lambda bounding the exit rates, dt is split into substeps with
/// Lambda*delta <= 1 and each substep applies sum_k w_k B^k, B = Id + A/Lambda.
/// Every product and partial sum is rounded at rounding_tolerance(); the
/// Poisson series stops once its tail is 100 times smaller than that, so a
/// substep never leaves series-truncation residue above the rounding level.
inline TTVector evolve_tt(const CPOperator& a, const TTVector& p0, double dt, const SolverConfig& cfg,
                          EvolveStats* stats = nullptr)
{
    cfg.validate();
    if (a.dims() != p0.dims())
        throw DimensionMismatch("evolve_tt: operator and vector dimensions differ");
    if (!(dt >= 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("evolve_tt: dt must be finite and >= 0");
    if (std::abs(tt_sum(p0) - 1.0) > 1e-10)
        throw std::invalid_argument("evolve_tt: initial vector is not normalized");

    const double lambda_rate = a.exit_rate_bound.value_or(detail::cp_diagonal_bound(a));
    if (dt == 0.0 || lambda_rate == 0.0) {
        if (stats)
            *stats = EvolveStats{0, 0, p0.max_rank()};
        return p0;
    }

    const double substeps_real = std::ceil(lambda_rate * dt);
    if (substeps_real > static_cast<double>(cfg.max_substeps))
        throw SolverError("evolve_tt: substep cap exceeded (" + std::to_string(substeps_real) + " needed)");
    const auto substeps = static_cast<std::size_t>(std::max(1.0, substeps_real));
    const double delta = dt / static_cast<double>(substeps);

    CPOperator b(a.dims());
    b.add_term(CPTerm{1.0, std::vector<Local>(a.dims(), local::identity())});
    for (const auto& t : a.terms())
        b.add_term(CPTerm{t.coeff / lambda_rate, t.factors});

    // series length depends on the tail target, which depends on the length; two passes settle it
    std::vector<double> weights = detail::poisson_weights(lambda_rate * delta, cfg.tt_tol / 10.0);
    double round_tol = detail::rounding_tolerance(cfg.tt_tol, weights.size());
    weights = detail::poisson_weights(lambda_rate * delta, std::min(cfg.tt_tol / 10.0, round_tol / 100.0));
    round_tol = detail::rounding_tolerance(cfg.tt_tol, weights.size());

    EvolveStats local_stats{substeps, weights.size(), p0.max_rank()};
    TTVector p = p0;
    try {
        for (std::size_t step = 0; step < substeps; ++step) {
            TTVector v = p;
            TTVector acc = tt_scale(p, weights[0]);
            for (std::size_t k = 1; k < weights.size(); ++k) {
                v = cp_apply_round(b, v, round_tol);
                acc = tt_round(tt_add(acc, tt_scale(v, weights[k])), round_tol);
                local_stats.max_rank = std::max({local_stats.max_rank, v.max_rank(), acc.max_rank()});
            }
            p = std::move(acc);
            if (!std::isfinite(tt_norm(p)))
                throw SolverError("evolve_tt: non-finite values after substep " + std::to_string(step));
        }
    } catch (const std::invalid_argument& e) {
        throw SolverError(std::string("evolve_tt: ") + e.what());
    }
    if (stats)
        *stats = local_stats;
    return p;
}

/// Evaluates transition probabilities on one network with the TT solver,
/// optionally in Fiedler node order. States are given in the original labels.
class TTPropagator {
public:
    TTPropagator(const Network& net, const ModelParams& params, const SolverConfig& cfg) : cfg_(cfg)
    {
        cfg_.validate();
        params.validate();
        if (cfg_.use_fiedler_ordering && net.size() >= 2)
            order_ = fiedler_ordering(net).order;
        else {
            order_.resize(static_cast<std::size_t>(net.size()));
            std::iota(order_.begin(), order_.end(), 0);
        }
        generator_ = build_generator_cp(net.permuted(order_), params);
    }

    const std::vector<int>& order() const { return order_; }
    const CPOperator& generator() const { return generator_; }

    /// Distribution after dt from x_a, in the solver's internal node order.
    TTVector evolve_from(const NetworkState& xa, double dt, EvolveStats* stats = nullptr) const
    {
        return evolve_tt(generator_, unit_state_tt(xa.permuted(order_)), dt, cfg_, stats);
    }

    double element(const TTVector& p, const NetworkState& xb) const { return tt_element(p, xb.permuted(order_)); }

    TransitionProbability probability(const NetworkState& xa, const NetworkState& xb, double dt) const
    {
        return clamp_probability(element(evolve_from(xa, dt), xb));
    }

private:
    SolverConfig cfg_;
    std::vector<int> order_;
    CPOperator generator_;
};

inline TransitionProbability transition_prob_tt(const Network& net, const ModelParams& params,
                                                const NetworkState& xa, const NetworkState& xb, double dt,
                                                const SolverConfig& cfg)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("transition_prob_tt: dt must be > 0");
    if (static_cast<int>(xa.size()) != net.size() || static_cast<int>(xb.size()) != net.size())
        throw DimensionMismatch("transition_prob_tt: state length differs from node count");
    return TTPropagator(net, params, cfg).probability(xa, xb, dt);
}

/// Dense matrix exponentials of one network's generator, cached per interval length.
class DenseTransitions {
public:
    DenseTransitions(const Network& net, const ModelParams& params)
        : generator_(build_generator_dense(net, params)), n_nodes_(static_cast<std::size_t>(net.size()))
    {
    }

    /// exp(A dt); column x_a holds the distribution started from x_a.
    const Eigen::MatrixXd& kernel(double dt)
    {
        auto it = cache_.find(dt);
        if (it == cache_.end()) {
            Eigen::MatrixXd scaled = generator_ * dt;
            it = cache_.emplace(dt, scaled.exp()).first;
        }
        return it->second;
    }

    double probability(const NetworkState& xa, const NetworkState& xb, double dt)
    {
        if (xa.size() != n_nodes_ || xb.size() != n_nodes_)
            throw DimensionMismatch("DenseTransitions: state length differs from node count");
        return kernel(dt)(static_cast<Index>(state_index(xb)), static_cast<Index>(state_index(xa)));
    }

    const Eigen::MatrixXd& generator() const { return generator_; }

private:
    Eigen::MatrixXd generator_;
    std::size_t n_nodes_;
    std::map<double, Eigen::MatrixXd> cache_;
};

/// Oracle: entry (x_b, x_a) of exp(A dt) via Pade scaling and squaring.
inline double transition_prob_dense(const Network& net, const ModelParams& params, const NetworkState& xa,
                                    const NetworkState& xb, double dt)
{
    if (!(dt >= 0.0))
        throw std::invalid_argument("transition_prob_dense: dt must be >= 0");
    DenseTransitions dense(net, params);
    return dense.probability(xa, xb, dt);
}

/// Fraction of n_traj Gillespie trajectories from x_a that sit in x_b at time dt.
inline double transition_prob_ssa(const Network& net, const ModelParams& params, const NetworkState& xa,
                                  const NetworkState& xb, double dt, std::size_t n_traj, Rng& rng)
{
    if (n_traj < 1)
        throw std::invalid_argument("transition_prob_ssa: n_traj must be >= 1");
    if (xb.size() != xa.size())
        throw DimensionMismatch("transition_prob_ssa: state lengths differ");
    const EpidemicSimulator sim(net, params);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_traj; ++i)
        hits += sim.run(xa, dt, rng) == xb;
    return static_cast<double>(hits) / static_cast<double>(n_traj);
}

} // namespace ttsis
