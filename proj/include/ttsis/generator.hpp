#pragma once

#include "ttsis/cp_operator.hpp"
#include "ttsis/error.hpp"
#include "ttsis/network.hpp"
#include "ttsis/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace ttsis {

/// Rates of the epsilon-SIS process, all per unit time.
struct ModelParams {
    double beta = 1.0;   ///< per-contact infection rate
    double gamma = 0.5;  ///< recovery rate
    double eps = 0.01;   ///< self-infection rate

    void validate() const
    {
        if (!std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(eps))
            throw std::invalid_argument("ModelParams: rates must be finite");
        if (beta < 0)
            throw std::invalid_argument("ModelParams: beta must be >= 0");
        if (gamma <= 0)
            throw std::invalid_argument("ModelParams: gamma must be > 0");
        if (eps <= 0)
            throw std::invalid_argument("ModelParams: eps must be > 0");
    }
};

inline int infected_neighbors(const NetworkState& x, int n, const Network& net)
{
    int count = 0;
    for (int m = 0; m < net.size(); ++m)
        if (m != n && x[static_cast<std::size_t>(m)] == 1 && net.has_edge(m, n))
            ++count;
    return count;
}

/// Rate of the single reaction taking x to y, or 0 if y is not one flip away.
inline double transition_rate(const NetworkState& x, const NetworkState& y, const Network& net,
                              const ModelParams& params)
{
    if (x.size() != y.size() || static_cast<int>(x.size()) != net.size())
        throw DimensionMismatch("transition_rate: state and network sizes differ");
    int flipped = -1;
    for (std::size_t n = 0; n < x.size(); ++n) {
        if (x[n] != y[n]) {
            if (flipped >= 0)
                return 0.0;
            flipped = static_cast<int>(n);
        }
    }
    if (flipped < 0)
        return 0.0;
    if (x[static_cast<std::size_t>(flipped)] == 1)
        return params.gamma;
    return params.beta * infected_neighbors(x, flipped, net) + params.eps;
}

/// Uniformization rate: sum over nodes of the largest possible exit rate of that node.
inline double exit_rate_bound(const Network& net, const ModelParams& params)
{
    double bound = 0.0;
    for (int n = 0; n < net.size(); ++n)
        bound += std::max(params.gamma, params.eps + net.degree(n) * params.beta);
    return bound;
}

/// CME generator as 2N + sum(deg) Kronecker terms: one recovery and one
/// self-infection term per node, one contact term per ordered adjacent pair.
inline CPOperator build_generator_cp(const Network& net, const ModelParams& params)
{
    params.validate();
    const auto n_dims = static_cast<std::size_t>(net.size());
    const Local recover = (local::shift_down() - local::identity()) * local::diag_infected();
    const Local infect = (local::shift_up() - local::identity()) * local::diag_susceptible();

    CPOperator op(n_dims);
    auto single = [&](double coeff, std::size_t n, const Local& f) {
        CPTerm term{coeff, std::vector<Local>(n_dims, local::identity())};
        term.factors[n] = f;
        op.add_term(std::move(term));
    };
    for (std::size_t n = 0; n < n_dims; ++n)
        single(params.gamma, n, recover);
    for (std::size_t n = 0; n < n_dims; ++n)
        single(params.eps, n, infect);
    for (int n = 0; n < net.size(); ++n) {
        for (int m : net.neighbors(n)) {
            CPTerm term{params.beta, std::vector<Local>(n_dims, local::identity())};
            term.factors[static_cast<std::size_t>(n)] = infect;
            term.factors[static_cast<std::size_t>(m)] = local::diag_infected();
            op.add_term(std::move(term));
        }
    }
    op.exit_rate_bound = exit_rate_bound(net, params);
    return op;
}

/// Dense generator by enumerating every state and its 2N one-flip neighbours.
/// Columns are source states; the diagonal is minus the off-diagonal column sum.
inline Eigen::MatrixXd build_generator_dense(const Network& net, const ModelParams& params)
{
    params.validate();
    const int n_nodes = net.size();
    if (n_nodes > 14)
        throw MemoryGuardError("build_generator_dense: more than 14 nodes");
    const Index size = Index{1} << n_nodes;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
    for (Index ix = 0; ix < size; ++ix) {
        const NetworkState x = index_state(static_cast<std::uint64_t>(ix), static_cast<std::size_t>(n_nodes));
        double out_rate = 0.0;
        for (int n = 0; n < n_nodes; ++n) {
            NetworkState y = x;
            y.flip(static_cast<std::size_t>(n));
            const double rate = transition_rate(x, y, net, params);
            a(static_cast<Index>(state_index(y)), ix) = rate;
            out_rate += rate;
        }
        a(ix, ix) = -out_rate;
    }
    return a;
}

} // namespace ttsis
