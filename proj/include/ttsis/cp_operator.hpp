#pragma once

#include "ttsis/error.hpp"
#include "ttsis/tensor_train.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace ttsis {

using Local = Eigen::Matrix2d;

/// Single Kronecker-product term coeff * (F_1 x ... x F_N).
struct CPTerm {
    double coeff = 1.0;
    std::vector<Local> factors;
};

/// Operator on 2^N-vectors stored as an explicit sum of Kronecker terms.
///
/// exit_rate_bound, when set, is an upper bound on max_x |A(x,x)|; the
/// forward solver uses it as the uniformization rate.
class CPOperator {
public:
    CPOperator() = default;
    explicit CPOperator(std::size_t n_dims) : n_dims_(n_dims) {}

    void add_term(CPTerm term)
    {
        if (term.factors.size() != n_dims_)
            throw DimensionMismatch("CPOperator: term has wrong number of factors");
        if (!std::isfinite(term.coeff) || !std::all_of(term.factors.begin(), term.factors.end(),
                                                       [](const Local& f) { return f.allFinite(); }))
            throw std::invalid_argument("CPOperator: non-finite term");
        terms_.push_back(std::move(term));
    }

    std::size_t dims() const { return n_dims_; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<CPTerm>& terms() const { return terms_; }

    std::optional<double> exit_rate_bound;

private:
    std::size_t n_dims_ = 0;
    std::vector<CPTerm> terms_;
};

namespace local {
inline Local identity() { return Local::Identity(); }
/// Moves mass from state 1 to state 0.
inline Local shift_down() { return (Local() << 0, 1, 0, 0).finished(); }
/// Moves mass from state 0 to state 1.
inline Local shift_up() { return (Local() << 0, 0, 1, 0).finished(); }
inline Local diag_infected() { return (Local() << 0, 0, 0, 1).finished(); }
inline Local diag_susceptible() { return (Local() << 1, 0, 0, 0).finished(); }
} // namespace local

/// Dense matrix of a CP operator, big-endian state order.
inline Eigen::MatrixXd cp_to_dense(const CPOperator& op)
{
    if (op.dims() > 14)
        throw MemoryGuardError("cp_to_dense: more than 14 dimensions");
    const Index size = Index{1} << op.dims();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size, size);
    for (const auto& t : op.terms()) {
        Eigen::MatrixXd kron = Eigen::MatrixXd::Constant(1, 1, t.coeff);
        // walk factors from the last, so earlier factors end up more significant
        for (auto it = t.factors.rbegin(); it != t.factors.rend(); ++it) {
            const Local& f = *it;
            Eigen::MatrixXd next(kron.rows() * 2, kron.cols() * 2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    next.block(i * kron.rows(), j * kron.cols(), kron.rows(), kron.cols()) = f(i, j) * kron;
            kron = std::move(next);
        }
        out += kron;
    }
    return out;
}

namespace detail {

/// Core of F applied on the mode index: out(a, y, b) = sum_x F(y, x) c(a, x, b).
inline TTCore apply_local(const Local& f, const TTCore& c)
{
    TTCore out(c.left(), c.right());
    for (Index b = 0; b < c.right(); ++b)
        for (Index a = 0; a < c.left(); ++a) {
            const double v0 = c(a, 0, b);
            const double v1 = c(a, 1, b);
            out(a, 0, b) = f(0, 0) * v0 + f(0, 1) * v1;
            out(a, 1, b) = f(1, 0) * v0 + f(1, 1) * v1;
        }
    return out;
}

} // namespace detail

/// Exact product A p. Interior ranks become (number of terms) * ranks(p);
/// callers round afterwards.
inline TTVector cp_apply(const CPOperator& op, const TTVector& p)
{
    if (op.dims() != p.dims())
        throw DimensionMismatch("cp_apply: operator and vector dimensions differ");
    const std::size_t n_dims = p.dims();
    const Index n_terms = static_cast<Index>(op.size());
    if (n_terms == 0)
        return zero_tt(n_dims);

    std::vector<TTCore> cores;
    cores.reserve(n_dims);
    if (n_dims == 1) {
        TTCore c(1, 1);
        for (const auto& t : op.terms()) {
            const TTCore applied = detail::apply_local(t.factors[0], p.core(0));
            for (int x = 0; x < 2; ++x)
                c(0, x, 0) += t.coeff * applied(0, x, 0);
        }
        cores.push_back(std::move(c));
        return TTVector(std::move(cores));
    }

    for (std::size_t n = 0; n < n_dims; ++n) {
        const TTCore& pc = p.core(n);
        const bool first = n == 0;
        const bool last = n + 1 == n_dims;
        const Index left = first ? 1 : n_terms * pc.left();
        const Index right = last ? 1 : n_terms * pc.right();
        TTCore c(left, right);
        for (Index t = 0; t < n_terms; ++t) {
            const CPTerm& term = op.terms()[static_cast<std::size_t>(t)];
            const TTCore applied = detail::apply_local(term.factors[n], pc);
            const double scale = first ? term.coeff : 1.0;
            const Index off_l = first ? 0 : t * pc.left();
            const Index off_r = last ? 0 : t * pc.right();
            for (int x = 0; x < 2; ++x)
                for (Index j = 0; j < pc.right(); ++j)
                    for (Index i = 0; i < pc.left(); ++i)
                        c(off_l + i, x, off_r + j) = scale * applied(i, x, j);
        }
        cores.push_back(std::move(c));
    }
    return TTVector(std::move(cores));
}

/// Same result as tt_round(cp_apply(op, p), tol), computed without forming
/// the block-diagonal interior cores: the left-to-right orthogonalization
/// sweep consumes the blocks term by term.
inline TTVector cp_apply_round(const CPOperator& op, const TTVector& p, double tol)
{
    if (op.dims() != p.dims())
        throw DimensionMismatch("cp_apply_round: operator and vector dimensions differ");
    const std::size_t n_dims = p.dims();
    if (n_dims == 1 || op.size() == 0)
        return tt_round(cp_apply(op, p), tol);

    const Index n_terms = static_cast<Index>(op.size());
    std::vector<TTCore> cores;
    cores.reserve(n_dims);

    // carry: k x (n_terms * r_n), column block t belongs to term t
    Eigen::MatrixXd carry(1, n_terms);
    for (Index t = 0; t < n_terms; ++t)
        carry(0, t) = op.terms()[static_cast<std::size_t>(t)].coeff;

    for (std::size_t n = 0; n < n_dims; ++n) {
        const TTCore& pc = p.core(n);
        const Index rl = pc.left();
        const Index rr = pc.right();
        const Index k = carry.rows();
        const bool last = n + 1 == n_dims;

        // merged(a, x, t*rr + b) = sum_i carry(a, t*rl + i) * (F_t p_n)(i, x, b)
        const Index merged_right = last ? 1 : n_terms * rr;
        Eigen::MatrixXd merged = Eigen::MatrixXd::Zero(k, 2 * merged_right);
        for (Index t = 0; t < n_terms; ++t) {
            const TTCore applied = detail::apply_local(op.terms()[static_cast<std::size_t>(t)].factors[n], pc);
            const Eigen::MatrixXd block = carry.middleCols(t * rl, rl) * applied.right_unfolding();
            if (last) {
                merged += block;
            } else {
                for (Index b = 0; b < rr; ++b)
                    for (int x = 0; x < 2; ++x)
                        merged.col(x + 2 * (t * rr + b)) = block.col(x + 2 * b);
            }
        }
        TTCore mc = TTCore::from_right_unfolding(merged, merged_right);
        if (last) {
            cores.push_back(std::move(mc));
            break;
        }
        Eigen::MatrixXd q, r;
        detail::thin_qr(mc.left_unfolding(), q, r);
        cores.push_back(TTCore::from_left_unfolding(q, k));
        carry = std::move(r);
    }
    detail::truncate_right_to_left(cores, tol);
    return TTVector(std::move(cores));
}

} // namespace ttsis
