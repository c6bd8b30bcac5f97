#pragma once

#include "ttsis/generator.hpp"
#include "ttsis/network.hpp"
#include "ttsis/random.hpp"
#include "ttsis/state.hpp"

#include <vector>

namespace ttsis {

/// Direct-method Gillespie sampler for the epsilon-SIS process on a fixed network.
class EpidemicSimulator {
public:
    EpidemicSimulator(const Network& net, const ModelParams& params) : params_(params)
    {
        params_.validate();
        adjacency_.resize(static_cast<std::size_t>(net.size()));
        for (int n = 0; n < net.size(); ++n)
            adjacency_[static_cast<std::size_t>(n)] = net.neighbors(n);
    }

    std::size_t size() const { return adjacency_.size(); }

    /// Runs from x for a time span, calling on_event(time, node, new_value)
    /// for every reaction with time <= t_span. Returns the final state.
    template <class OnEvent>
    NetworkState run(NetworkState x, double t_span, Rng& rng, OnEvent&& on_event) const
    {
        const std::size_t n_nodes = adjacency_.size();
        if (x.size() != n_nodes)
            throw DimensionMismatch("EpidemicSimulator: state length differs from node count");

        std::vector<int> infected_nb(n_nodes, 0);
        for (std::size_t n = 0; n < n_nodes; ++n)
            if (x[n] == 1)
                for (int m : adjacency_[n])
                    ++infected_nb[static_cast<std::size_t>(m)];

        std::vector<double> rate(n_nodes);
        double t = 0.0;
        for (;;) {
            double total = 0.0;
            for (std::size_t n = 0; n < n_nodes; ++n) {
                rate[n] = x[n] == 1 ? params_.gamma : params_.eps + params_.beta * infected_nb[n];
                total += rate[n];
            }
            t += exponential(rng, total);
            if (t > t_span)
                break;

            const double target = uniform01(rng) * total;
            double cumulative = 0.0;
            std::size_t chosen = n_nodes - 1;
            for (std::size_t n = 0; n < n_nodes; ++n) {
                cumulative += rate[n];
                if (target < cumulative) {
                    chosen = n;
                    break;
                }
            }

            x.flip(chosen);
            const int delta = x[chosen] == 1 ? 1 : -1;
            for (int m : adjacency_[chosen])
                infected_nb[static_cast<std::size_t>(m)] += delta;
            on_event(t, chosen, x[chosen]);
        }
        return x;
    }

    NetworkState run(NetworkState x, double t_span, Rng& rng) const
    {
        return run(std::move(x), t_span, rng, [](double, std::size_t, int) {});
    }

private:
    ModelParams params_;
    std::vector<std::vector<int>> adjacency_;
};

} // namespace ttsis
