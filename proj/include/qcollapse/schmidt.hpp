#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qcollapse/errors.hpp"
#include "qcollapse/matrix.hpp"
#include "qcollapse/state.hpp"

namespace qcollapse {

/// Joint system-environment vector assembled from correlated pairs:
/// Psi = sum_i  phi_i (x) chi_i, with the system factor varying slowest.
/// The environment records chi_i must be orthonormal (they are perfectly
/// distinguishable records); the system vectors phi_i are unconstrained.
class SchmidtSystem {
public:
    SchmidtSystem(std::vector<cvector> system_vectors, std::vector<cvector> env_vectors)
        : sys_(std::move(system_vectors)), env_(std::move(env_vectors)) {
        if (sys_.empty() || sys_.size() != env_.size()) {
            throw ValidationError("need matching, nonempty system and environment vector lists");
        }
        sys_dim_ = sys_.front().size();
        env_dim_ = env_.front().size();
        if (sys_dim_ == 0 || env_dim_ == 0) {
            throw ValidationError("factor dimensions must be positive");
        }
        if (sys_.size() > env_dim_) {
            throw ValidationError("more terms than the environment can distinguish");
        }
        if (sys_dim_ > kMaxDim / env_dim_) {
            throw SizeError("joint dimension exceeds maximum " + std::to_string(kMaxDim));
        }
        for (const cvector& v : sys_) {
            if (v.size() != sys_dim_) throw ShapeError("system vectors differ in length");
        }
        for (std::size_t i = 0; i < env_.size(); ++i) {
            if (env_[i].size() != env_dim_) throw ShapeError("environment vectors differ in length");
            for (std::size_t j = 0; j <= i; ++j) {
                const complex g = inner(env_[i], env_[j]);
                const double target = (i == j) ? 1.0 : 0.0;
                if (std::abs(g - complex(target, 0.0)) > kStructureTol) {
                    throw ValidationError("environment records are not orthonormal");
                }
            }
        }
    }

    std::size_t num_terms() const { return sys_.size(); }
    std::size_t system_dim() const { return sys_dim_; }
    std::size_t env_dim() const { return env_dim_; }
    std::size_t joint_dim() const { return sys_dim_ * env_dim_; }
    const std::vector<cvector>& system_vectors() const { return sys_; }
    const std::vector<cvector>& env_vectors() const { return env_; }

    cvector joint_vector() const {
        cvector psi(joint_dim(), complex(0.0, 0.0));
        for (std::size_t i = 0; i < sys_.size(); ++i) {
            for (std::size_t s = 0; s < sys_dim_; ++s) {
                if (sys_[i][s] == complex(0.0, 0.0)) continue;
                for (std::size_t e = 0; e < env_dim_; ++e) {
                    psi[s * env_dim_ + e] += sys_[i][s] * env_[i][e];
                }
            }
        }
        return psi;
    }

private:
    std::vector<cvector> sys_, env_;
    std::size_t sys_dim_ = 0, env_dim_ = 0;
};

namespace detail {

/// Modified Gram-Schmidt. Residuals below the tolerance (relative to the
/// vector's own norm) are treated as linearly dependent and dropped.
inline std::vector<cvector> orthonormal_span(const std::vector<cvector>& vectors,
                                             double tol = 1e-12) {
    std::vector<cvector> basis;
    for (const cvector& v : vectors) {
        cvector r = v;
        const double scale = norm(v);
        if (scale == 0.0) continue;
        for (const cvector& b : basis) {
            const complex c = inner(b, r);
            for (std::size_t k = 0; k < r.size(); ++k) r[k] -= c * b[k];
        }
        // second pass for numerical orthogonality
        for (const cvector& b : basis) {
            const complex c = inner(b, r);
            for (std::size_t k = 0; k < r.size(); ++k) r[k] -= c * b[k];
        }
        const double rn = norm(r);
        if (rn <= tol * scale) continue;
        for (complex& x : r) x /= rn;
        basis.push_back(std::move(r));
    }
    return basis;
}

inline void require_index_set(const SchmidtSystem& sys, const std::vector<std::size_t>& set) {
    if (set.empty()) throw ValidationError("outcome index set must be nonempty");
    std::vector<bool> seen(sys.num_terms(), false);
    for (std::size_t i : set) {
        if (i >= sys.num_terms()) throw IndexError("outcome index out of range");
        if (seen[i]) throw ValidationError("outcome index set has duplicates");
        seen[i] = true;
    }
}

} // namespace detail

/// The two readings of one coarse outcome: asking the environment records,
/// or asking the system directly.
struct GoodMeasurement {
    Projector env_side;     // I_sys (x) sum over the set of |chi_i><chi_i|
    Projector system_side;  // span projector of the selected phi_i, (x) I_env
};

inline GoodMeasurement build_good_measurement(const SchmidtSystem& sys,
                                              const std::vector<std::size_t>& index_set) {
    detail::require_index_set(sys, index_set);
    const std::size_t ds = sys.system_dim();
    const std::size_t de = sys.env_dim();

    ComplexMatrix env_small(de, de);
    std::vector<cvector> selected;
    selected.reserve(index_set.size());
    for (std::size_t i : index_set) {
        env_small = env_small + outer(sys.env_vectors()[i], sys.env_vectors()[i]);
        selected.push_back(sys.system_vectors()[i]);
    }

    const std::vector<cvector> basis = detail::orthonormal_span(selected);
    if (basis.empty()) {
        throw DegenerateStateError("selected system vectors span nothing");
    }
    ComplexMatrix sys_small(ds, ds);
    for (const cvector& b : basis) sys_small = sys_small + outer(b, b);

    return GoodMeasurement{
        Projector(kron(ComplexMatrix::identity(ds), env_small)),
        Projector(kron(sys_small, ComplexMatrix::identity(de))),
    };
}

/// Whether, and how well, the two readings agree on the joint vector.
struct EquivalenceReport {
    /// True when every deselected system vector is orthogonal to the span
    /// of the selected ones. Only then are the two projections guaranteed
    /// to pick out the same part of the joint vector.
    bool applicable = false;
    double max_cross_overlap = 0.0;  // worst |<basis, phi_out>| seen
    double defect = 0.0;             // max abs difference of the two projected vectors
};

inline EquivalenceReport vn_equivalence_check(const SchmidtSystem& sys,
                                              const std::vector<std::size_t>& index_set,
                                              double tol = kStructureTol) {
    detail::require_index_set(sys, index_set);
    const GoodMeasurement gm = build_good_measurement(sys, index_set);

    std::vector<bool> in_set(sys.num_terms(), false);
    for (std::size_t i : index_set) in_set[i] = true;

    std::vector<cvector> selected;
    for (std::size_t i = 0; i < sys.num_terms(); ++i) {
        if (in_set[i]) selected.push_back(sys.system_vectors()[i]);
    }
    const std::vector<cvector> basis = detail::orthonormal_span(selected);

    EquivalenceReport rep;
    for (std::size_t j = 0; j < sys.num_terms(); ++j) {
        if (in_set[j]) continue;
        for (const cvector& b : basis) {
            rep.max_cross_overlap =
                std::max(rep.max_cross_overlap, std::abs(inner(b, sys.system_vectors()[j])));
        }
    }
    rep.applicable = rep.max_cross_overlap <= tol;

    const cvector psi = sys.joint_vector();
    const cvector via_env = apply(gm.env_side.matrix(), psi);
    const cvector via_sys = apply(gm.system_side.matrix(), psi);
    for (std::size_t k = 0; k < psi.size(); ++k) {
        rep.defect = std::max(rep.defect, std::abs(via_env[k] - via_sys[k]));
    }
    return rep;
}

} // namespace qcollapse
