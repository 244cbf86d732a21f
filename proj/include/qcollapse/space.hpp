#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "qcollapse/errors.hpp"
#include "qcollapse/matrix.hpp"

namespace qcollapse {

/// Ordered tensor factorization of a finite-dimensional space. Factor 0
/// varies slowest in the flat index, matching kron's layout.
class CompositeSpace {
public:
    explicit CompositeSpace(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) {
            throw ValidationError("composite space needs at least one factor");
        }
        std::size_t total = 1;
        for (std::size_t d : dims_) {
            if (d == 0) throw ValidationError("factor dimension must be positive");
            if (d > kMaxDim / total) {
                throw SizeError("composite dimension exceeds maximum " +
                                std::to_string(kMaxDim));
            }
            total *= d;
        }
        total_ = total;
        strides_.assign(dims_.size(), 1);
        for (std::size_t f = dims_.size(); f-- > 1;) {
            strides_[f - 1] = strides_[f] * dims_[f];
        }
    }

    std::size_t num_factors() const { return dims_.size(); }
    std::size_t factor_dim(std::size_t f) const {
        if (f >= dims_.size()) throw IndexError("factor index out of range");
        return dims_[f];
    }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t total_dim() const { return total_; }

    std::size_t component(std::size_t flat, std::size_t f) const {
        return (flat / strides_[f]) % dims_[f];
    }

    std::size_t pack(const std::vector<std::size_t>& multi) const {
        if (multi.size() != dims_.size()) {
            throw ShapeError("multi-index length does not match factor count");
        }
        std::size_t flat = 0;
        for (std::size_t f = 0; f < dims_.size(); ++f) {
            if (multi[f] >= dims_[f]) throw IndexError("component out of range");
            flat += multi[f] * strides_[f];
        }
        return flat;
    }

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 1;
};

/// Lift an operator acting on factor k to the full space:
/// I x ... x op x ... x I.
inline ComplexMatrix embed(const ComplexMatrix& op, const CompositeSpace& space,
                           std::size_t factor) {
    if (factor >= space.num_factors()) throw IndexError("factor index out of range");
    if (!op.is_square() || op.rows() != space.factor_dim(factor)) {
        throw ShapeError("operator shape " + op.shape_str() + " does not match factor dim " +
                         std::to_string(space.factor_dim(factor)));
    }
    ComplexMatrix out = ComplexMatrix::identity(1);
    for (std::size_t f = 0; f < space.num_factors(); ++f) {
        out = kron(out, f == factor ? op : ComplexMatrix::identity(space.factor_dim(f)));
    }
    return out;
}

/// Trace out every factor not listed in `keep`. Kept factors retain their
/// original order, so `keep` must be strictly increasing. Preserves the
/// total trace exactly (it is a plain regrouped sum of diagonal terms).
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const CompositeSpace& space,
                                   const std::vector<std::size_t>& keep) {
    if (!m.is_square() || m.rows() != space.total_dim()) {
        throw ShapeError("matrix shape " + m.shape_str() + " does not match space dim " +
                         std::to_string(space.total_dim()));
    }
    std::size_t prev_plus_one = 0;
    for (std::size_t f : keep) {
        if (f >= space.num_factors()) throw IndexError("kept factor index out of range");
        if (f + 1 <= prev_plus_one) {
            throw ValidationError("kept factor list must be strictly increasing");
        }
        prev_plus_one = f + 1;
    }

    std::vector<bool> kept(space.num_factors(), false);
    for (std::size_t f : keep) kept[f] = true;

    const std::size_t total = space.total_dim();
    // Flat index -> (reduced kept index, flat traced index), both with the
    // surviving factors in original order.
    std::vector<std::size_t> keep_part(total, 0), trace_part(total, 0);
    for (std::size_t x = 0; x < total; ++x) {
        std::size_t kp = 0, tp = 0;
        for (std::size_t f = 0; f < space.num_factors(); ++f) {
            const std::size_t c = space.component(x, f);
            if (kept[f]) {
                kp = kp * space.factor_dim(f) + c;
            } else {
                tp = tp * space.factor_dim(f) + c;
            }
        }
        keep_part[x] = kp;
        trace_part[x] = tp;
    }

    std::size_t reduced = 1;
    for (std::size_t f : keep) reduced *= space.factor_dim(f);

    ComplexMatrix out(reduced, reduced);
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < total; ++c) {
            if (trace_part[r] != trace_part[c]) continue;
            out(keep_part[r], keep_part[c]) += m(r, c);
        }
    }
    return out;
}

} // namespace qcollapse
