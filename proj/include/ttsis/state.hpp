#pragma once

#include "ttsis/error.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ttsis {

/// Node states of the whole network: 0 = susceptible, 1 = infected.
class NetworkState {
public:
    NetworkState() = default;
    explicit NetworkState(std::size_t n_nodes) : bits_(n_nodes, 0) {}
    explicit NetworkState(std::vector<std::uint8_t> bits) : bits_(std::move(bits))
    {
        for (auto b : bits_)
            if (b > 1)
                throw std::invalid_argument("NetworkState: entries must be 0 or 1");
    }

    /// Parses "0110..." with node 1 leftmost.
    static NetworkState from_string(std::string_view text)
    {
        std::vector<std::uint8_t> bits;
        bits.reserve(text.size());
        for (char c : text) {
            if (c != '0' && c != '1')
                throw ParseError(std::string("state: invalid character '") + c + "'");
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        if (bits.empty())
            throw ParseError("state: empty bit string");
        return NetworkState(std::move(bits));
    }

    std::string to_string() const
    {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_)
            s.push_back(static_cast<char>('0' + b));
        return s;
    }

    std::size_t size() const { return bits_.size(); }
    int operator[](std::size_t n) const { return bits_[n]; }
    void set(std::size_t n, int value) { bits_.at(n) = static_cast<std::uint8_t>(value != 0); }
    void flip(std::size_t n) { bits_.at(n) ^= 1u; }
    std::size_t infected_count() const
    {
        std::size_t c = 0;
        for (auto b : bits_)
            c += b;
        return c;
    }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    /// State seen from a relabelled network where new node i is old node order[i].
    NetworkState permuted(const std::vector<int>& order) const
    {
        if (order.size() != bits_.size())
            throw DimensionMismatch("NetworkState::permuted: permutation length differs from state length");
        NetworkState out(bits_.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            out.bits_[i] = bits_[static_cast<std::size_t>(order[i])];
        return out;
    }

    friend bool operator==(const NetworkState& a, const NetworkState& b) { return a.bits_ == b.bits_; }
    friend bool operator!=(const NetworkState& a, const NetworkState& b) { return !(a == b); }
    friend bool operator<(const NetworkState& a, const NetworkState& b) { return a.bits_ < b.bits_; }

private:
    std::vector<std::uint8_t> bits_;
};

/// Big-endian linear index: sum_n x_n 2^(N-1-n), node 0 most significant.
inline std::uint64_t state_index(const NetworkState& x)
{
    if (x.size() > 63)
        throw MemoryGuardError("state_index: more than 63 nodes");
    std::uint64_t idx = 0;
    for (std::size_t n = 0; n < x.size(); ++n)
        idx = (idx << 1) | static_cast<std::uint64_t>(x[n]);
    return idx;
}

inline NetworkState index_state(std::uint64_t index, std::size_t n_nodes)
{
    if (n_nodes > 63 || (n_nodes < 64 && index >> n_nodes) != 0)
        throw std::out_of_range("index_state: index out of range for " + std::to_string(n_nodes) + " nodes");
    NetworkState x(n_nodes);
    for (std::size_t n = 0; n < n_nodes; ++n)
        x.set(n, static_cast<int>((index >> (n_nodes - 1 - n)) & 1u));
    return x;
}

} // namespace ttsis

template <>
struct std::hash<ttsis::NetworkState> {
    std::size_t operator()(const ttsis::NetworkState& x) const noexcept
    {
        std::size_t h = 1469598103934665603ull;
        for (auto b : x.bits())
            h = (h ^ b) * 1099511628211ull;
        return h ^ x.size();
    }
};
