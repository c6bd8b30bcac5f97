#pragma once

#include "ttsis/error.hpp"
#include "ttsis/gillespie.hpp"
#include "ttsis/network.hpp"
#include "ttsis/random.hpp"
#include "ttsis/state.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ttsis {

struct ObservationRecord {
    double time = 0.0;
    NetworkState state;
};

/// Network states observed at strictly increasing times.
class ObservationSeries {
public:
    ObservationSeries() = default;

    void append(double time, NetworkState state)
    {
        if (!std::isfinite(time))
            throw std::invalid_argument("ObservationSeries: non-finite time");
        if (!records_.empty()) {
            if (state.size() != records_.front().state.size())
                throw DimensionMismatch("ObservationSeries: state length differs from earlier records");
            if (!(time > records_.back().time))
                throw std::invalid_argument("ObservationSeries: times must be strictly increasing");
        }
        records_.push_back({time, std::move(state)});
    }

    const std::vector<ObservationRecord>& records() const { return records_; }
    const ObservationRecord& operator[](std::size_t k) const { return records_[k]; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    /// Number of transitions K (records minus one).
    std::size_t intervals() const { return records_.empty() ? 0 : records_.size() - 1; }
    std::size_t node_count() const { return records_.empty() ? 0 : records_.front().state.size(); }

    /// Records first..last inclusive.
    ObservationSeries slice(std::size_t first, std::size_t last) const
    {
        ObservationSeries out;
        for (std::size_t k = first; k <= last && k < records_.size(); ++k)
            out.records_.push_back(records_[k]);
        return out;
    }

    ObservationSeries permuted(const std::vector<int>& order) const
    {
        ObservationSeries out;
        for (const auto& r : records_)
            out.records_.push_back({r.time, r.state.permuted(order)});
        return out;
    }

    bool operator==(const ObservationSeries& other) const
    {
        if (records_.size() != other.records_.size())
            return false;
        for (std::size_t k = 0; k < records_.size(); ++k)
            if (records_[k].time != other.records_[k].time || !(records_[k].state == other.records_[k].state))
                return false;
        return true;
    }

private:
    std::vector<ObservationRecord> records_;
};

struct EpidemicEvent {
    double time = 0.0;
    int node = 0;
    int new_value = 0;
};

struct EventTrajectory {
    NetworkState initial;
    std::vector<EpidemicEvent> events;

    /// State after all events with time <= t.
    NetworkState state_at(double t) const
    {
        NetworkState x = initial;
        for (const auto& e : events) {
            if (e.time > t)
                break;
            x.set(static_cast<std::size_t>(e.node), e.new_value);
        }
        return x;
    }
};

/// Rounds a time to the 10 significant digits used in observation files.
inline double canonical_time(double t)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", t);
    return std::strtod(buf, nullptr);
}

inline EventTrajectory simulate_epidemic(const Network& net, const ModelParams& params, const NetworkState& x0,
                                         double t_max, Rng& rng)
{
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw std::invalid_argument("simulate_epidemic: t_max must be finite and > 0");
    if (static_cast<int>(x0.size()) != net.size())
        throw DimensionMismatch("simulate_epidemic: initial state length differs from node count");
    EventTrajectory traj{x0, {}};
    const EpidemicSimulator sim(net, params);
    sim.run(x0, t_max, rng, [&](double t, std::size_t node, int value) {
        traj.events.push_back({t, static_cast<int>(node), value});
    });
    return traj;
}

/// Samples the trajectory at t_k = k*tau, k = 0..floor(t_max/tau), right-continuous.
inline ObservationSeries resample_uniform(const EventTrajectory& traj, double tau, double t_max)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("resample_uniform: tau must be finite and > 0");
    if (!(t_max >= 0.0) || !std::isfinite(t_max))
        throw std::invalid_argument("resample_uniform: t_max must be finite and >= 0");
    const auto k_max = static_cast<std::size_t>(std::floor(t_max / tau + 1e-9));

    ObservationSeries obs;
    NetworkState x = traj.initial;
    std::size_t next_event = 0;
    for (std::size_t k = 0; k <= k_max; ++k) {
        const double t = canonical_time(static_cast<double>(k) * tau);
        while (next_event < traj.events.size() && traj.events[next_event].time <= t) {
            const auto& e = traj.events[next_event++];
            x.set(static_cast<std::size_t>(e.node), e.new_value);
        }
        obs.append(t, x);
    }
    return obs;
}

/// Reads "# N=<n>" (optional) followed by "<t> <bitstring>" lines.
inline ObservationSeries parse_observations(std::string_view text)
{
    ObservationSeries obs;
    long declared = -1;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos)
            continue;
        const std::string where = "observations line " + std::to_string(line_no) + ": ";
        if (line[first] == '#') {
            const auto pos = line.find("N=", first);
            if (pos != std::string::npos) {
                char* end = nullptr;
                declared = std::strtol(line.c_str() + pos + 2, &end, 10);
                if (end == line.c_str() + pos + 2 || declared < 1)
                    throw ParseError(where + "malformed node count header");
            }
            continue;
        }

        std::istringstream fields(line);
        std::string time_text, bits, extra;
        fields >> time_text >> bits;
        if (bits.empty())
            throw ParseError(where + "expected '<time> <bitstring>'");
        if (fields >> extra)
            throw ParseError(where + "unexpected trailing field '" + extra + "'");

        char* end = nullptr;
        const double t = std::strtod(time_text.c_str(), &end);
        if (end != time_text.c_str() + time_text.size() || !std::isfinite(t))
            throw ParseError(where + "malformed time '" + time_text + "'");

        NetworkState x;
        try {
            x = NetworkState::from_string(bits);
        } catch (const ParseError& e) {
            throw ParseError(where + e.what());
        }
        if (declared > 0 && x.size() != static_cast<std::size_t>(declared))
            throw ParseError(where + "bit string length " + std::to_string(x.size()) + " differs from N=" +
                             std::to_string(declared));
        if (!obs.empty() && x.size() != obs.node_count())
            throw ParseError(where + "bit string length differs from earlier records");
        if (!obs.empty() && !(t > obs.records().back().time))
            throw ParseError(where + "times must be strictly increasing");
        obs.append(t, std::move(x));
    }
    return obs;
}

inline std::string serialize_observations(const ObservationSeries& obs)
{
    std::string out = "# N=" + std::to_string(obs.node_count()) + "\n";
    char buf[64];
    for (const auto& r : obs.records()) {
        std::snprintf(buf, sizeof buf, "%.10g ", r.time);
        out += buf;
        out += r.state.to_string();
        out += '\n';
    }
    return out;
}

} // namespace ttsis
