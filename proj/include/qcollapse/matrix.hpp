#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qcollapse/errors.hpp"

namespace qcollapse {

using complex = std::complex<double>;
/// State vectors are plain complex sequences.
using cvector = std::vector<complex>;

/// Tolerance for Hermiticity, idempotence and unitarity checks.
inline constexpr double kStructureTol = 1e-10;

/// Default cap on any composite dimension. Larger spaces are handled in
/// log space by the lattice module, never materialized.
inline constexpr std::size_t kMaxDim = std::size_t{1} << 20;

/// Dense row-major complex matrix. Values are immutable in spirit: all
/// operations return new matrices, and the entry-list constructor rejects
/// non-finite input.
class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, complex(0.0, 0.0)) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<complex> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (entries_.size() != rows_ * cols_) {
            throw ShapeError("entry count " + std::to_string(entries_.size()) +
                             " does not match " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
        }
        for (const complex& e : entries_) {
            if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
                throw ValidationError("matrix entry is not finite");
            }
        }
    }

    /// Row-list constructor for small literals in tests and presets.
    ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows)
        : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
        entries_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) {
                throw ShapeError("ragged row list");
            }
            entries_.insert(entries_.end(), r.begin(), r.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<complex>& d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const complex& operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }

    const std::vector<complex>& entries() const { return entries_; }

    bool is_finite() const {
        for (const complex& e : entries_) {
            if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
        }
        return true;
    }

    ComplexMatrix operator+(const ComplexMatrix& o) const {
        require_same_shape(o, "+");
        ComplexMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < entries_.size(); ++k)
            out.entries_[k] = entries_[k] + o.entries_[k];
        return out;
    }

    ComplexMatrix operator-(const ComplexMatrix& o) const {
        require_same_shape(o, "-");
        ComplexMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < entries_.size(); ++k)
            out.entries_[k] = entries_[k] - o.entries_[k];
        return out;
    }

    ComplexMatrix operator*(const ComplexMatrix& o) const {
        if (cols_ != o.rows_) {
            throw ShapeError("matmul shape mismatch: " + shape_str() + " * " + o.shape_str());
        }
        ComplexMatrix out(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const complex aik = entries_[i * cols_ + k];
                if (aik == complex(0.0, 0.0)) continue;
                const complex* brow = &o.entries_[k * o.cols_];
                complex* orow = &out.entries_[i * o.cols_];
                for (std::size_t j = 0; j < o.cols_; ++j) orow[j] += aik * brow[j];
            }
        }
        return out;
    }

    ComplexMatrix operator*(complex s) const {
        ComplexMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = entries_[k] * s;
        return out;
    }

    friend ComplexMatrix operator*(complex s, const ComplexMatrix& m) { return m * s; }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

private:
    void require_same_shape(const ComplexMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw ShapeError(std::string("shape mismatch for ") + op + ": " + shape_str() +
                             " vs " + o.shape_str());
        }
    }

    std::size_t rows_, cols_;
    std::vector<complex> entries_;
};

inline ComplexMatrix adjoint(const ComplexMatrix& m) {
    ComplexMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
    return out;
}

/// Sum of diagonal elements. Requires a square matrix.
inline complex trace(const ComplexMatrix& m) {
    if (!m.is_square()) {
        throw ShapeError("trace of non-square matrix " + m.shape_str());
    }
    complex t(0.0, 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

/// Kronecker product; the left factor varies slowest in the composite
/// index. Output dimensions are capped at max_dim.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                          std::size_t max_dim = kMaxDim) {
    const std::size_t r = a.rows() * b.rows();
    const std::size_t c = a.cols() * b.cols();
    if ((a.rows() != 0 && r / a.rows() != b.rows()) ||
        (a.cols() != 0 && c / a.cols() != b.cols()) || r > max_dim || c > max_dim) {
        throw SizeError("kron result " + std::to_string(r) + "x" + std::to_string(c) +
                        " exceeds maximum dimension " + std::to_string(max_dim));
    }
    ComplexMatrix out(r, c);
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const complex av = a(ia, ja);
            if (av == complex(0.0, 0.0)) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    out(ia * b.rows() + ib, ja * b.cols() + jb) = av * b(ib, jb);
        }
    return out;
}

inline double max_abs(const ComplexMatrix& m) {
    double v = 0.0;
    for (const complex& e : m.entries()) v = std::max(v, std::abs(e));
    return v;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return max_abs(a - b);
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kStructureTol) {
    if (!m.is_square()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    return true;
}

inline bool is_unitary(const ComplexMatrix& m, double tol = kStructureTol) {
    if (!m.is_square()) return false;
    return max_abs_diff(adjoint(m) * m, ComplexMatrix::identity(m.rows())) <= tol;
}

/// U M U^dagger.
inline ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& m) {
    return u * m * adjoint(u);
}

inline complex inner(const cvector& u, const cvector& v) {
    if (u.size() != v.size()) {
        throw ShapeError("inner product of vectors with different lengths");
    }
    complex s(0.0, 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}

inline double norm(const cvector& v) { return std::sqrt(std::real(inner(v, v))); }

inline cvector apply(const ComplexMatrix& m, const cvector& v) {
    if (m.cols() != v.size()) {
        throw ShapeError("matrix-vector shape mismatch: " + m.shape_str() + " * vec[" +
                         std::to_string(v.size()) + "]");
    }
    cvector out(m.rows(), complex(0.0, 0.0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
    return out;
}

/// |u><v|
inline ComplexMatrix outer(const cvector& u, const cvector& v) {
    ComplexMatrix out(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out(i, j) = u[i] * std::conj(v[j]);
    return out;
}

/// <v|op|v>. Real up to roundoff when op is Hermitian.
inline complex expectation(const ComplexMatrix& op, const cvector& v) {
    if (!op.is_square() || op.cols() != v.size()) {
        throw ShapeError("expectation shape mismatch: " + op.shape_str() + " with vec[" +
                         std::to_string(v.size()) + "]");
    }
    return inner(v, apply(op, v));
}

struct HermitianEigensystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns are orthonormal eigenvectors
};

namespace detail {

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.rows()),
                         static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return out;
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
    ComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
    return out;
}

} // namespace detail

inline HermitianEigensystem hermitian_eigensystem(const ComplexMatrix& m,
                                                  double tol = kStructureTol) {
    if (!is_hermitian(m, tol)) {
        throw ValidationError("matrix is not Hermitian within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(detail::to_eigen(m));
    if (solver.info() != Eigen::Success) {
        throw ValidationError("eigendecomposition failed");
    }
    HermitianEigensystem sys;
    sys.values.assign(solver.eigenvalues().data(),
                      solver.eigenvalues().data() + solver.eigenvalues().size());
    sys.vectors = detail::from_eigen(solver.eigenvectors());
    return sys;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m,
                                                 double tol = kStructureTol) {
    return hermitian_eigensystem(m, tol).values;
}

/// U = exp(-i h t) for Hermitian h, via eigendecomposition. The result is
/// unitary to within kStructureTol by construction.
inline ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double t) {
    const HermitianEigensystem sys = hermitian_eigensystem(h);
    const std::size_t n = h.rows();
    ComplexMatrix phase(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        phase(k, k) = std::exp(complex(0.0, -sys.values[k] * t));
    }
    ComplexMatrix u = sys.vectors * phase * adjoint(sys.vectors);
    if (!is_unitary(u)) {
        throw ValidationError("synthesized evolution operator failed the unitarity check");
    }
    return u;
}

} // namespace qcollapse
