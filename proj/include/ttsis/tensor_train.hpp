#pragma once

#include "ttsis/error.hpp"
#include "ttsis/state.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace ttsis {

using Index = Eigen::Index;

/// Three-way TT core of shape left x 2 x right.
///
/// Entry (a, x, b) lives at a + left*(x + 2*b), so the left unfolding
/// (rows a + left*x, cols b) and the right unfolding (rows a, cols x + 2*b)
/// are both plain column-major views of the same storage.
class TTCore {
public:
    using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
    using ConstSlice = Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>>;

    TTCore() = default;
    TTCore(Index left, Index right) : left_(left), right_(right), data_(static_cast<std::size_t>(2 * left * right), 0.0) {}

    static TTCore from_left_unfolding(const Eigen::MatrixXd& m, Index left)
    {
        if (m.rows() != 2 * left)
            throw DimensionMismatch("TTCore: left unfolding has wrong row count");
        TTCore c(left, m.cols());
        std::copy(m.data(), m.data() + m.size(), c.data_.begin());
        return c;
    }

    static TTCore from_right_unfolding(const Eigen::MatrixXd& m, Index right)
    {
        if (m.cols() != 2 * right)
            throw DimensionMismatch("TTCore: right unfolding has wrong column count");
        TTCore c(m.rows(), right);
        std::copy(m.data(), m.data() + m.size(), c.data_.begin());
        return c;
    }

    Index left() const { return left_; }
    Index right() const { return right_; }

    double& operator()(Index a, int x, Index b) { return data_[static_cast<std::size_t>(a + left_ * (x + 2 * b))]; }
    double operator()(Index a, int x, Index b) const { return data_[static_cast<std::size_t>(a + left_ * (x + 2 * b))]; }

    ConstMap left_unfolding() const { return ConstMap(data_.data(), 2 * left_, right_); }
    ConstMap right_unfolding() const { return ConstMap(data_.data(), left_, 2 * right_); }

    /// left x right matrix for a fixed mode value x.
    ConstSlice slice(int x) const
    {
        return ConstSlice(data_.data() + left_ * x, left_, right_, Eigen::OuterStride<>(2 * left_));
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    Index left_ = 0;
    Index right_ = 0;
    std::vector<double> data_;
};

/// Tensor-train vector over {0,1}^N with boundary ranks 1.
class TTVector {
public:
    TTVector() = default;
    explicit TTVector(std::vector<TTCore> cores) : cores_(std::move(cores)) { validate(); }

    std::size_t dims() const { return cores_.size(); }
    const TTCore& core(std::size_t n) const { return cores_[n]; }
    const std::vector<TTCore>& cores() const { return cores_; }

    /// r_0, ..., r_N.
    std::vector<Index> ranks() const
    {
        std::vector<Index> r;
        r.reserve(cores_.size() + 1);
        for (const auto& c : cores_)
            r.push_back(c.left());
        r.push_back(cores_.empty() ? 1 : cores_.back().right());
        return r;
    }

    Index max_rank() const
    {
        Index m = 1;
        for (auto r : ranks())
            m = std::max(m, r);
        return m;
    }

private:
    void validate() const
    {
        if (cores_.empty())
            throw std::invalid_argument("TTVector: no cores");
        if (cores_.front().left() != 1 || cores_.back().right() != 1)
            throw std::invalid_argument("TTVector: boundary ranks must be 1");
        for (std::size_t n = 0; n + 1 < cores_.size(); ++n)
            if (cores_[n].right() != cores_[n + 1].left())
                throw std::invalid_argument("TTVector: rank mismatch between cores " + std::to_string(n) + " and " +
                                            std::to_string(n + 1));
        for (const auto& c : cores_)
            for (double v : c.data())
                if (!std::isfinite(v))
                    throw std::invalid_argument("TTVector: non-finite core entry");
    }

    std::vector<TTCore> cores_;
};

/// Rank-1 indicator of a single state.
inline TTVector unit_state_tt(const NetworkState& x)
{
    std::vector<TTCore> cores;
    cores.reserve(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        TTCore c(1, 1);
        c(0, x[n], 0) = 1.0;
        cores.push_back(std::move(c));
    }
    return TTVector(std::move(cores));
}

/// Rank-1 tensor with every local factor (a0, a1).
inline TTVector constant_tt(std::size_t n_dims, double a0, double a1)
{
    std::vector<TTCore> cores;
    for (std::size_t n = 0; n < n_dims; ++n) {
        TTCore c(1, 1);
        c(0, 0, 0) = a0;
        c(0, 1, 0) = a1;
        cores.push_back(std::move(c));
    }
    return TTVector(std::move(cores));
}

inline TTVector ones_tt(std::size_t n_dims) { return constant_tt(n_dims, 1.0, 1.0); }
inline TTVector zero_tt(std::size_t n_dims) { return constant_tt(n_dims, 0.0, 0.0); }

inline double tt_element(const TTVector& p, const NetworkState& x)
{
    if (x.size() != p.dims())
        throw DimensionMismatch("tt_element: state length differs from TT dimension");
    Eigen::RowVectorXd acc = p.core(0).slice(x[0]);
    for (std::size_t n = 1; n < p.dims(); ++n)
        acc = acc * p.core(n).slice(x[n]);
    return acc(0);
}

/// Dense expansion in big-endian state order.
inline Eigen::VectorXd tt_to_dense(const TTVector& p)
{
    const std::size_t n_dims = p.dims();
    if (n_dims > 24)
        throw MemoryGuardError("tt_to_dense: more than 24 dimensions");
    // rows: big-endian index of (x_1..x_n), cols: current right bond
    Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
    for (std::size_t n = 0; n < n_dims; ++n) {
        const TTCore& c = p.core(n);
        Eigen::MatrixXd next(acc.rows() * 2, c.right());
        const Eigen::MatrixXd s0 = acc * c.slice(0);
        const Eigen::MatrixXd s1 = acc * c.slice(1);
        for (Index row = 0; row < acc.rows(); ++row) {
            next.row(2 * row) = s0.row(row);
            next.row(2 * row + 1) = s1.row(row);
        }
        acc = std::move(next);
    }
    return acc.col(0);
}

namespace detail {

/// Smallest rank whose discarded tail sqrt(sum s_i^2) is within delta.
inline Index truncation_rank(const Eigen::VectorXd& sv, double delta)
{
    Index r = sv.size();
    double tail = 0.0;
    while (r > 1) {
        const double next = tail + sv(r - 1) * sv(r - 1);
        if (std::sqrt(next) > delta)
            break;
        tail = next;
        --r;
    }
    return r;
}

/// Thin QR: m = q * r with q orthonormal columns, k = min(rows, cols).
inline void thin_qr(const Eigen::MatrixXd& m, Eigen::MatrixXd& q, Eigen::MatrixXd& r)
{
    const Index k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), k);
    r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
}

/// Right-to-left SVD truncation of a TT whose cores 0..N-2 are left-orthogonal.
inline void truncate_right_to_left(std::vector<TTCore>& cores, double tol)
{
    const std::size_t n_dims = cores.size();
    if (n_dims < 2)
        return;
    const double norm = Eigen::Map<const Eigen::VectorXd>(cores.back().data().data(),
                                                          static_cast<Index>(cores.back().data().size()))
                            .norm();
    const double delta = tol / std::sqrt(static_cast<double>(n_dims - 1)) * norm;

    for (std::size_t n = n_dims - 1; n >= 1; --n) {
        const Eigen::MatrixXd unf = cores[n].right_unfolding();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(unf, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Index r = truncation_rank(svd.singularValues(), delta);
        const Eigen::MatrixXd vt = svd.matrixV().leftCols(r).transpose();
        const Eigen::MatrixXd us = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal();
        const Index right = cores[n].right();
        cores[n] = TTCore::from_right_unfolding(vt, right);
        const Index left = cores[n - 1].left();
        cores[n - 1] = TTCore::from_left_unfolding(cores[n - 1].left_unfolding() * us, left);
    }
}

} // namespace detail

/// TT-SVD of a dense vector of length 2^N, big-endian order. The relative
/// Frobenius error is at most tol.
inline TTVector tt_from_dense(const Eigen::VectorXd& v, double tol)
{
    const Index len = v.size();
    if (len < 2 || (len & (len - 1)) != 0)
        throw std::invalid_argument("tt_from_dense: length must be a power of two >= 2");
    std::size_t n_dims = 0;
    while ((Index{1} << n_dims) < len)
        ++n_dims;

    const double delta = n_dims > 1 ? tol / std::sqrt(static_cast<double>(n_dims - 1)) * v.norm() : 0.0;
    std::vector<TTCore> cores;
    cores.reserve(n_dims);

    // rest(a, j): a = left bond, j = big-endian index of remaining modes
    Eigen::MatrixXd rest = Eigen::Map<const Eigen::MatrixXd>(v.data(), 1, len);
    Index left = 1;
    for (std::size_t n = 0; n + 1 < n_dims; ++n) {
        const Index tail = rest.cols() / 2;
        Eigen::MatrixXd unf(2 * left, tail);
        for (Index a = 0; a < left; ++a)
            for (int x = 0; x < 2; ++x)
                unf.row(a + left * x) = rest.row(a).segment(x * tail, tail);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(unf, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Index r = detail::truncation_rank(svd.singularValues(), delta);
        cores.push_back(TTCore::from_left_unfolding(svd.matrixU().leftCols(r), left));
        rest = svd.singularValues().head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
        left = r;
    }
    TTCore last(left, 1);
    for (Index a = 0; a < left; ++a)
        for (int x = 0; x < 2; ++x)
            last(a, x, 0) = rest(a, x);
    cores.push_back(std::move(last));
    return TTVector(std::move(cores));
}

inline TTVector tt_scale(const TTVector& a, double c)
{
    std::vector<TTCore> cores = a.cores();
    for (double& v : cores.front().data())
        v *= c;
    return TTVector(std::move(cores));
}

/// Exact sum; ranks add at interior bonds.
inline TTVector tt_add(const TTVector& a, const TTVector& b)
{
    if (a.dims() != b.dims())
        throw DimensionMismatch("tt_add: dimension mismatch");
    const std::size_t n_dims = a.dims();
    std::vector<TTCore> cores;
    cores.reserve(n_dims);
    if (n_dims == 1) {
        TTCore c(1, 1);
        for (int x = 0; x < 2; ++x)
            c(0, x, 0) = a.core(0)(0, x, 0) + b.core(0)(0, x, 0);
        cores.push_back(std::move(c));
        return TTVector(std::move(cores));
    }
    for (std::size_t n = 0; n < n_dims; ++n) {
        const TTCore& ca = a.core(n);
        const TTCore& cb = b.core(n);
        const bool first = n == 0;
        const bool last = n + 1 == n_dims;
        const Index left = first ? 1 : ca.left() + cb.left();
        const Index right = last ? 1 : ca.right() + cb.right();
        const Index b_left = first ? 0 : ca.left();
        const Index b_right = last ? 0 : ca.right();
        TTCore c(left, right);
        for (int x = 0; x < 2; ++x) {
            for (Index i = 0; i < ca.left(); ++i)
                for (Index j = 0; j < ca.right(); ++j)
                    c(i, x, j) = ca(i, x, j);
            for (Index i = 0; i < cb.left(); ++i)
                for (Index j = 0; j < cb.right(); ++j)
                    c(b_left + i, x, b_right + j) += cb(i, x, j);
        }
        cores.push_back(std::move(c));
    }
    return TTVector(std::move(cores));
}

/// Left-to-right QR orthogonalization followed by right-to-left SVD
/// truncation with per-bond budget tol/sqrt(N-1).
inline TTVector tt_round(const TTVector& p, double tol)
{
    if (tol < 0)
        throw std::invalid_argument("tt_round: negative tolerance");
    std::vector<TTCore> cores = p.cores();
    const std::size_t n_dims = cores.size();
    if (n_dims < 2)
        return p;
    for (std::size_t n = 0; n + 1 < n_dims; ++n) {
        Eigen::MatrixXd q, r;
        detail::thin_qr(cores[n].left_unfolding(), q, r);
        const Index left = cores[n].left();
        cores[n] = TTCore::from_left_unfolding(q, left);
        const Index right = cores[n + 1].right();
        cores[n + 1] = TTCore::from_right_unfolding(r * cores[n + 1].right_unfolding(), right);
    }
    detail::truncate_right_to_left(cores, tol);
    return TTVector(std::move(cores));
}

inline double tt_inner(const TTVector& a, const TTVector& b)
{
    if (a.dims() != b.dims())
        throw DimensionMismatch("tt_inner: dimension mismatch");
    Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
    for (std::size_t n = 0; n < a.dims(); ++n)
        acc = a.core(n).slice(0).transpose() * acc * b.core(n).slice(0) +
              a.core(n).slice(1).transpose() * acc * b.core(n).slice(1);
    return acc(0, 0);
}

/// Sum of all entries.
inline double tt_sum(const TTVector& a)
{
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Ones(1);
    for (const auto& c : a.cores())
        acc = acc * (c.slice(0) + c.slice(1));
    return acc(0);
}

inline double tt_norm(const TTVector& a) { return std::sqrt(std::max(0.0, tt_inner(a, a))); }

} // namespace ttsis
