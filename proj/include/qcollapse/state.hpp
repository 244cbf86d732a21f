#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qcollapse/errors.hpp"
#include "qcollapse/matrix.hpp"
#include "qcollapse/rng.hpp"

namespace qcollapse {

/// Eigenvalues of a state may dip this far below zero before the state is
/// rejected as non-positive.
inline constexpr double kPsdTol = 1e-10;

/// Spectrum entries below this floor contribute nothing to the entropy.
inline constexpr double kEntropyFloor = 1e-14;

/// Statistical operator. Deliberately kept unnormalized: collapse branches
/// carry their weight in the trace, and probabilities are always ratios of
/// traces. Construction validates and never repairs.
class DensityState {
public:
    explicit DensityState(ComplexMatrix m) : m_(std::move(m)) {
        if (!m_.is_square()) {
            throw ShapeError("state matrix must be square, got " + m_.shape_str());
        }
        if (!is_hermitian(m_)) {
            throw ValidationError("state matrix is not Hermitian within tolerance");
        }
        const std::vector<double> spectrum = hermitian_eigenvalues(m_);
        if (!spectrum.empty() && spectrum.front() < -kPsdTol) {
            throw ValidationError("state matrix has eigenvalue " +
                                  std::to_string(spectrum.front()) +
                                  " below the positivity tolerance");
        }
        weight_ = std::real(trace(m_));
        if (!(weight_ > 0.0)) {
            throw ValidationError("state matrix must have positive trace");
        }
    }

    static DensityState pure(const cvector& v) {
        return DensityState(outer(v, v));
    }

    std::size_t dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }

    /// Tr S. This is the branch weight when the state arose from collapse.
    double weight() const { return weight_; }

    /// Unit-trace copy of the matrix, for spectra and entropy.
    ComplexMatrix normalized() const { return m_ * complex(1.0 / weight_, 0.0); }

private:
    ComplexMatrix m_;
    double weight_;
};

/// Orthogonal projection operator. Hermitian and idempotent within
/// kStructureTol; rejected otherwise, never repaired.
class Projector {
public:
    explicit Projector(ComplexMatrix m) : m_(std::move(m)) {
        if (!m_.is_square()) {
            throw ShapeError("projector must be square, got " + m_.shape_str());
        }
        if (!is_hermitian(m_)) {
            throw ValidationError("projector is not Hermitian within tolerance");
        }
        if (max_abs_diff(m_ * m_, m_) > kStructureTol) {
            throw ValidationError("projector is not idempotent within tolerance");
        }
        rank_ = static_cast<std::size_t>(std::llround(std::real(trace(m_))));
    }

    /// Projector onto a single computational basis state.
    static Projector basis_state(std::size_t dim, std::size_t k) {
        if (k >= dim) throw IndexError("basis index out of range");
        ComplexMatrix m(dim, dim);
        m(k, k) = 1.0;
        return Projector(std::move(m));
    }

    /// Projector onto the span of vectors that must already be orthonormal.
    static Projector onto_orthonormal(const std::vector<cvector>& basis) {
        if (basis.empty()) throw ValidationError("projector span needs at least one vector");
        const std::size_t dim = basis.front().size();
        ComplexMatrix m(dim, dim);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (basis[i].size() != dim) throw ShapeError("span vectors differ in length");
            for (std::size_t j = 0; j <= i; ++j) {
                const complex g = inner(basis[i], basis[j]);
                const double target = (i == j) ? 1.0 : 0.0;
                if (std::abs(g - complex(target, 0.0)) > kStructureTol) {
                    throw ValidationError("span vectors are not orthonormal");
                }
            }
            m = m + outer(basis[i], basis[i]);
        }
        return Projector(std::move(m));
    }

    std::size_t dim() const { return m_.rows(); }
    std::size_t rank() const { return rank_; }
    const ComplexMatrix& matrix() const { return m_; }

    Projector complement() const {
        return Projector(ComplexMatrix::identity(dim()) - m_);
    }

private:
    ComplexMatrix m_;
    std::size_t rank_;
};

/// Both branches of posing a yes/no question to a state. Branch matrices
/// stay unnormalized; their traces are the branch weights. A branch with
/// zero weight is a legitimate (dead) outcome and is kept as the zero
/// matrix rather than a state object.
struct CollapseOutcome {
    ComplexMatrix yes_branch;  // P S P
    ComplexMatrix no_branch;   // (1-P) S (1-P)
    double weight_yes = 0.0;
    double weight_no = 0.0;
    double prob_yes = 0.0;     // weight_yes / (weight_yes + weight_no)
};

namespace detail {

inline void require_same_dim(const DensityState& s, const Projector& p) {
    if (s.dim() != p.dim()) {
        throw ShapeError("state dim " + std::to_string(s.dim()) +
                         " does not match projector dim " + std::to_string(p.dim()));
    }
}

inline double branch_trace(const ComplexMatrix& branch) {
    const double w = std::real(trace(branch));
    return w < 0.0 ? 0.0 : w;  // clamp roundoff noise on dead branches
}

} // namespace detail

/// Split a state along a question: S -> P S P and (1-P) S (1-P).
inline CollapseOutcome process_one(const DensityState& s, const Projector& p) {
    detail::require_same_dim(s, p);
    CollapseOutcome out;
    const ComplexMatrix comp = ComplexMatrix::identity(p.dim()) - p.matrix();
    out.yes_branch = p.matrix() * s.matrix() * p.matrix();
    out.no_branch = comp * s.matrix() * comp;
    out.weight_yes = detail::branch_trace(out.yes_branch);
    out.weight_no = detail::branch_trace(out.no_branch);
    const double total = out.weight_yes + out.weight_no;
    if (!(total > 0.0)) {
        throw DegenerateStateError("both branches carry zero weight");
    }
    out.prob_yes = out.weight_yes / total;
    return out;
}

/// Weight Tr(P S P) of the yes branch alone.
inline double branch_weight(const DensityState& s, const Projector& p) {
    detail::require_same_dim(s, p);
    return detail::branch_trace(p.matrix() * s.matrix() * p.matrix());
}

/// Probability that the question comes out yes. Defined as the yes-branch
/// share of the two branch weights; equals Tr(P S)/Tr S for exact inputs.
inline double prob_yes(const DensityState& s, const Projector& p) {
    return process_one(s, p).prob_yes;
}

struct HeisenbergResult {
    bool yes = false;
    double prob_yes = 0.0;
    DensityState state;  // the selected branch, still unnormalized
};

/// Pose the question and keep exactly one branch, sampled with the branch
/// probability. The survivor keeps its reduced weight.
inline HeisenbergResult heisenberg_collapse(const DensityState& s, const Projector& p,
                                            RandomEngine& rng) {
    CollapseOutcome split = process_one(s, p);
    const bool yes = rng.next_double() < split.prob_yes;
    ComplexMatrix& chosen = yes ? split.yes_branch : split.no_branch;
    const double w = yes ? split.weight_yes : split.weight_no;
    if (!(w > 0.0)) {
        throw DegenerateStateError("sampled branch carries zero weight");
    }
    return HeisenbergResult{yes, split.prob_yes, DensityState(std::move(chosen))};
}

/// U S U^dagger as a new state. Requires u unitary.
inline DensityState evolved(const DensityState& s, const ComplexMatrix& u) {
    if (u.rows() != s.dim() || !is_unitary(u)) {
        throw ValidationError("evolution operator must be unitary and match the state dim");
    }
    return DensityState(conjugate_by(u, s.matrix()));
}

/// Von Neumann entropy of the normalized state, natural log. Spectrum
/// entries below kEntropyFloor are treated as exact zeros.
inline double entropy(const DensityState& s) {
    const std::vector<double> spectrum = hermitian_eigenvalues(s.normalized());
    double h = 0.0;
    for (double lambda : spectrum) {
        if (lambda < kEntropyFloor) continue;
        h -= lambda * std::log(lambda);
    }
    return h;
}

/// |Tr(U S U^dagger) - Tr S|. Zero up to roundoff for genuine unitaries;
/// callers assert their own bound on the returned defect.
inline double invariance_check(const DensityState& s, const ComplexMatrix& u) {
    if (u.rows() != s.dim() || !is_unitary(u)) {
        throw ValidationError("invariance check needs a unitary matching the state dim");
    }
    const double after = std::real(trace(conjugate_by(u, s.matrix())));
    return std::abs(after - s.weight());
}

} // namespace qcollapse
