#pragma once

#include "ttsis/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ttsis {

/// Undirected simple graph on nodes 0..N-1.
///
/// Links are stored as one flag per unordered pair {m,n}, m>n, at
/// pair_index(m,n) = m(m-1)/2 + n. Node labels are 0-based in memory and
/// 1-based in files.
class Network {
public:
    Network() = default;
    explicit Network(int n_nodes) : n_(n_nodes), links_(pair_count(n_nodes), false)
    {
        if (n_nodes < 1)
            throw std::invalid_argument("Network: node count must be positive");
    }

    static std::size_t pair_count(int n_nodes)
    {
        return static_cast<std::size_t>(n_nodes) * static_cast<std::size_t>(n_nodes - 1) / 2;
    }

    static std::size_t pair_index(int m, int n)
    {
        if (m < n)
            std::swap(m, n);
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(m - 1) / 2 + static_cast<std::size_t>(n);
    }

    /// Inverse of pair_index, returns (m, n) with m > n.
    static std::pair<int, int> pair_nodes(std::size_t index)
    {
        int m = 1;
        while (pair_index(m + 1, 0) <= index)
            ++m;
        return {m, static_cast<int>(index - pair_index(m, 0))};
    }

    int size() const { return n_; }
    std::size_t n_pairs() const { return links_.size(); }

    bool has_edge(int m, int n) const
    {
        if (m == n)
            return false;
        check_node(m);
        check_node(n);
        return links_[pair_index(m, n)];
    }

    void set_edge(int m, int n, bool present)
    {
        check_node(m);
        check_node(n);
        if (m == n)
            throw std::invalid_argument("Network: self-loop at node " + std::to_string(m + 1));
        links_[pair_index(m, n)] = present;
    }

    void add_edge(int m, int n) { set_edge(m, n, true); }
    void remove_edge(int m, int n) { set_edge(m, n, false); }
    void toggle_pair(std::size_t index) { links_.at(index) = !links_.at(index); }
    bool has_pair(std::size_t index) const { return links_.at(index); }

    /// Edges as (m, n) with m > n, in pair-index order.
    std::vector<std::pair<int, int>> edges() const
    {
        std::vector<std::pair<int, int>> out;
        for (std::size_t i = 0; i < links_.size(); ++i)
            if (links_[i])
                out.push_back(pair_nodes(i));
        return out;
    }

    std::size_t edge_count() const { return static_cast<std::size_t>(std::count(links_.begin(), links_.end(), true)); }

    std::vector<int> neighbors(int n) const
    {
        check_node(n);
        std::vector<int> out;
        for (int m = 0; m < n_; ++m)
            if (m != n && links_[pair_index(m, n)])
                out.push_back(m);
        return out;
    }

    int degree(int n) const { return static_cast<int>(neighbors(n).size()); }

    const std::vector<bool>& links() const { return links_; }

    /// Relabels nodes so that new node i is old node order[i].
    Network permuted(const std::vector<int>& order) const
    {
        if (static_cast<int>(order.size()) != n_)
            throw DimensionMismatch("Network::permuted: permutation length differs from node count");
        Network out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < i; ++j)
                if (has_edge(order[i], order[j]))
                    out.add_edge(i, j);
        return out;
    }

    friend bool operator==(const Network& a, const Network& b) { return a.n_ == b.n_ && a.links_ == b.links_; }
    friend bool operator!=(const Network& a, const Network& b) { return !(a == b); }

private:
    void check_node(int n) const
    {
        if (n < 0 || n >= n_)
            throw std::out_of_range("Network: node index " + std::to_string(n) + " out of range");
    }

    int n_ = 0;
    std::vector<bool> links_;
};

/// Node order produced by spectral sorting; order[i] is the node placed at position i.
struct NodePermutation {
    std::vector<int> order;

    std::vector<int> inverse() const
    {
        std::vector<int> inv(order.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            inv[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
        return inv;
    }

    bool is_bijection() const
    {
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != static_cast<int>(i))
                return false;
        return true;
    }
};

/// L = diag(G e) - G.
inline Eigen::MatrixXd laplacian(const Network& net)
{
    const int n = net.size();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (auto [m, k] : net.edges()) {
        lap(m, k) = -1.0;
        lap(k, m) = -1.0;
        lap(m, m) += 1.0;
        lap(k, k) += 1.0;
    }
    return lap;
}

struct FiedlerPair {
    double lambda1 = 0.0;
    Eigen::VectorXd vector;
};

/// Second-smallest Laplacian eigenpair, with the eigenvector taken orthogonal
/// to the all-ones vector, normalized, and signed so that its first nonzero
/// component is positive.
inline FiedlerPair fiedler_vector(const Network& net)
{
    const int n = net.size();
    if (n < 2)
        throw std::invalid_argument("fiedler_vector: need at least 2 nodes");

    // Lift the constant mode above the spectrum (max eigenvalue <= 2 max degree <= 2(n-1)),
    // so that the lowest eigenpair of the shifted matrix lives in the complement of e.
    const double lift = 2.0 * n + 1.0;
    Eigen::MatrixXd shifted = laplacian(net);
    shifted.array() += lift / n;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(shifted);
    if (solver.info() != Eigen::Success)
        throw EigenSolverError("fiedler_vector: symmetric eigen-solver did not converge");

    FiedlerPair out;
    out.lambda1 = std::max(0.0, solver.eigenvalues()(0));
    Eigen::VectorXd v = solver.eigenvectors().col(0);
    v.array() -= v.mean();
    v.normalize();

    for (int i = 0; i < n; ++i) {
        if (std::abs(v(i)) > 1e-10) {
            if (v(i) < 0)
                v = -v;
            break;
        }
    }
    out.vector = std::move(v);
    return out;
}

/// Nodes sorted by descending Fiedler-vector entry; near-equal entries
/// (within 1e-10) keep ascending label order.
inline NodePermutation fiedler_ordering(const Network& net)
{
    const FiedlerPair fp = fiedler_vector(net);
    const int n = net.size();
    std::vector<long long> key(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        key[static_cast<std::size_t>(i)] = std::llround(fp.vector(i) * 1e10);

    NodePermutation perm;
    perm.order.resize(static_cast<std::size_t>(n));
    std::iota(perm.order.begin(), perm.order.end(), 0);
    std::stable_sort(perm.order.begin(), perm.order.end(),
                     [&](int a, int b) { return key[static_cast<std::size_t>(a)] > key[static_cast<std::size_t>(b)]; });
    return perm;
}

/// Number of node pairs linked in exactly one of the two networks.
inline std::size_t network_distance(const Network& a, const Network& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("network_distance: networks have different node counts");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.n_pairs(); ++i)
        d += a.links()[i] != b.links()[i];
    return d;
}

// Text format: first non-comment line "N", then one "m n" line per edge,
// 1-based labels in either order; '#' lines are comments.
inline Network parse_network(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    Network net;
    bool have_header = false;

    auto fail = [&](const std::string& what) {
        throw ParseError("network line " + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;

        std::istringstream fields(line);
        if (!have_header) {
            long long n = 0;
            std::string extra;
            if (!(fields >> n) || (fields >> extra))
                fail("expected node count");
            if (n < 1 || n > 4096)
                fail("node count out of range");
            net = Network(static_cast<int>(n));
            have_header = true;
            continue;
        }
        long long m = 0, k = 0;
        std::string extra;
        if (!(fields >> m >> k) || (fields >> extra))
            fail("expected \"m n\"");
        if (m < 1 || k < 1 || m > net.size() || k > net.size())
            fail("node index out of range");
        if (m == k)
            fail("self-loop");
        if (net.has_edge(static_cast<int>(m - 1), static_cast<int>(k - 1)))
            fail("duplicate edge");
        net.add_edge(static_cast<int>(m - 1), static_cast<int>(k - 1));
    }
    if (!have_header)
        throw ParseError("network: missing node count");
    return net;
}

inline std::string serialize_network(const Network& net)
{
    std::ostringstream out;
    out << net.size() << '\n';
    for (auto [m, n] : net.edges())
        out << (n + 1) << ' ' << (m + 1) << '\n';
    return out.str();
}

/// Path 1-2-...-N.
inline Network make_chain(int n_nodes)
{
    Network net(n_nodes);
    for (int i = 1; i < n_nodes; ++i)
        net.add_edge(i - 1, i);
    return net;
}

/// Ring where node n links to n+1 and n+2 (cyclically). With a rewire (a, b),
/// 0-based, the ring link (a, a+1) is replaced by (a, b).
inline Network make_small_world(int n_nodes, std::optional<std::pair<int, int>> rewire = std::nullopt)
{
    if (n_nodes < 5)
        throw std::invalid_argument("make_small_world: need at least 5 nodes");
    Network net(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        net.add_edge(i, (i + 1) % n_nodes);
        net.add_edge(i, (i + 2) % n_nodes);
    }
    if (rewire) {
        auto [a, b] = *rewire;
        net.remove_edge(a, (a + 1) % n_nodes);
        net.add_edge(a, b);
    }
    return net;
}

/// Austrian road network, 9 cities, transcribed by eye from a map figure:
/// 1 Bregenz, 2 Innsbruck, 3 Salzburg, 4 Linz, 5 Wien, 6 Eisenstadt,
/// 7 Graz, 8 Klagenfurt, 9 Villach.
inline Network make_austria()
{
    return parse_network("9\n1 2\n2 3\n3 4\n4 5\n5 6\n5 7\n7 8\n8 9\n2 9\n3 9\n4 7\n");
}

} // namespace ttsis
