#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qcollapse/errors.hpp"
#include "qcollapse/local_polytope.hpp"
#include "qcollapse/matrix.hpp"
#include "qcollapse/state.hpp"

namespace qcollapse {

/// A two-outcome projective measurement; outcome 1 is the complement of
/// outcome 0, and the pair must resolve the identity.
struct BinaryMeasurement {
    Projector outcome0;
    Projector outcome1;

    BinaryMeasurement(Projector p0, Projector p1)
        : outcome0(std::move(p0)), outcome1(std::move(p1)) {
        if (outcome0.dim() != outcome1.dim() ||
            max_abs_diff(outcome0.matrix() + outcome1.matrix(),
                         ComplexMatrix::identity(outcome0.dim())) > kStructureTol) {
            throw ValidationError("outcome projectors must sum to the identity");
        }
    }

    const Projector& outcome(int a) const { return a == 0 ? outcome0 : outcome1; }
    std::size_t dim() const { return outcome0.dim(); }
};

/// Qubit measurement along the axis at angle theta (radians) in the x-z
/// plane of the Bloch sphere.
inline BinaryMeasurement qubit_measurement(double theta) {
    const cvector plus = {complex(std::cos(theta / 2.0), 0.0),
                          complex(std::sin(theta / 2.0), 0.0)};
    Projector p0 = Projector::onto_orthonormal({plus});
    Projector p1 = p0.complement();
    return BinaryMeasurement(std::move(p0), std::move(p1));
}

/// Two spacelike-separated regions, two measurement choices per region,
/// two outcomes each. The joint state is held normalized here so that the
/// Born rule emits genuine probabilities.
class BipartiteExperiment {
public:
    BipartiteExperiment(DensityState joint, std::vector<BinaryMeasurement> left,
                        std::vector<BinaryMeasurement> right)
        : joint_(std::move(joint)), left_(std::move(left)), right_(std::move(right)) {
        if (left_.size() != 2 || right_.size() != 2) {
            throw ValidationError("need exactly two measurement settings per side");
        }
        if (std::abs(joint_.weight() - 1.0) > kStructureTol) {
            throw ValidationError("joint state must be normalized to trace 1");
        }
        const std::size_t dl = left_[0].dim();
        const std::size_t dr = right_[0].dim();
        if (left_[1].dim() != dl || right_[1].dim() != dr) {
            throw ShapeError("settings on one side differ in dimension");
        }
        if (joint_.dim() != dl * dr) {
            throw ShapeError("joint state dimension does not factor into the two sides");
        }
    }

    const DensityState& joint() const { return joint_; }
    const BinaryMeasurement& left(int x) const { return left_[static_cast<std::size_t>(x)]; }
    const BinaryMeasurement& right(int y) const { return right_[static_cast<std::size_t>(y)]; }

private:
    DensityState joint_;
    std::vector<BinaryMeasurement> left_, right_;
};

/// Spin singlet of two qubits, trace 1.
inline DensityState singlet_state() {
    const double h = std::sqrt(0.5);
    const cvector psi = {complex(0.0, 0.0), complex(h, 0.0), complex(-h, 0.0),
                         complex(0.0, 0.0)};
    return DensityState::pure(psi);
}

/// Singlet mixed with white noise: v * singlet + (1 - v) * I/4.
inline DensityState noisy_singlet(double visibility) {
    if (visibility < 0.0 || visibility > 1.0) {
        throw ValidationError("visibility must lie in [0, 1]");
    }
    const ComplexMatrix mixed =
        singlet_state().matrix() * complex(visibility, 0.0) +
        ComplexMatrix::identity(4) * complex((1.0 - visibility) / 4.0, 0.0);
    return DensityState(mixed);
}

/// The full 16-entry table p(a, b | x, y). Construction rejects negative
/// entries, unnormalized setting pairs and signaling tables; the locality
/// question is only well posed for what survives.
class CorrelationTable {
public:
    explicit CorrelationTable(std::array<double, 16> p) : p_(p) {
        for (double v : p_) {
            if (!(v >= -1e-12) || !std::isfinite(v)) {
                throw ValidationError("probabilities must be nonnegative");
            }
        }
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                double sum = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) sum += at(a, b, x, y);
                if (std::abs(sum - 1.0) > kStructureTol) {
                    throw ValidationError("outcomes for one setting pair do not sum to 1");
                }
            }
        for (int x = 0; x < 2; ++x)
            for (int a = 0; a < 2; ++a) {
                const double m0 = at(a, 0, x, 0) + at(a, 1, x, 0);
                const double m1 = at(a, 0, x, 1) + at(a, 1, x, 1);
                if (std::abs(m0 - m1) > kStructureTol) {
                    throw ValidationError(
                        "left marginal depends on the right setting (signaling table)");
                }
            }
        for (int y = 0; y < 2; ++y)
            for (int b = 0; b < 2; ++b) {
                const double m0 = at(0, b, 0, y) + at(1, b, 0, y);
                const double m1 = at(0, b, 1, y) + at(1, b, 1, y);
                if (std::abs(m0 - m1) > kStructureTol) {
                    throw ValidationError(
                        "right marginal depends on the left setting (signaling table)");
                }
            }
    }

    double at(int a, int b, int x, int y) const { return p_[coord_index(x, y, a, b)]; }
    const std::array<double, 16>& raw() const { return p_; }

    /// E(x, y) = sum over outcomes of (-1)^(a+b) p(a, b | x, y).
    double correlator(int x, int y) const {
        double e = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) e += ((a + b) % 2 == 0 ? 1.0 : -1.0) * at(a, b, x, y);
        return e;
    }

private:
    std::array<double, 16> p_;
};

/// Born-rule table of the experiment: p = Tr((L_a|x (x) R_b|y) S).
inline CorrelationTable joint_probs(const BipartiteExperiment& exp) {
    std::array<double, 16> p{};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const ComplexMatrix joint_proj =
                        kron(exp.left(x).outcome(a).matrix(), exp.right(y).outcome(b).matrix());
                    p[coord_index(x, y, a, b)] =
                        std::real(trace(joint_proj * exp.joint().matrix()));
                }
    return CorrelationTable(p);
}

/// The 8 sign combinations +-E(0,0) +-E(0,1) +-E(1,0) +-E(1,1) with an odd
/// number of minus signs, in ascending order of the sign mask (bit xy set
/// means E(x,y) enters negatively).
inline std::array<double, 8> chsh_values(const CorrelationTable& t) {
    std::array<double, 8> out{};
    std::size_t next = 0;
    for (unsigned mask = 0; mask < 16; ++mask) {
        if (__builtin_popcount(mask) % 2 == 0) continue;
        double v = 0.0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                const int bit = x * 2 + y;
                v += ((mask >> bit) & 1 ? -1.0 : 1.0) * t.correlator(x, y);
            }
        out[next++] = v;
    }
    return out;
}

struct LocalModelVerdict {
    std::array<double, 8> chsh_values{};
    double local_bound = 2.0;
    double max_abs_chsh = 0.0;
    bool locally_explainable = false;  // inequality criterion
    bool lp_feasible = false;          // exact vertex-mixture oracle
    std::array<int, 4> witness_signs{};  // coefficients of E(0,0),E(0,1),E(1,0),E(1,1)
    double witness_value = 0.0;
    std::array<double, 16> mixture{};  // meaningful when lp_feasible
};

/// Decide local explainability two independent ways: the complete
/// inequality criterion for this scenario, and exact feasibility over the
/// 16 deterministic strategies. Both verdicts are reported.
inline LocalModelVerdict local_model_check(const CorrelationTable& t) {
    LocalModelVerdict v;
    v.chsh_values = chsh_values(t);

    unsigned best_mask = 0;
    std::size_t next = 0;
    for (unsigned mask = 0; mask < 16; ++mask) {
        if (__builtin_popcount(mask) % 2 == 0) continue;
        const double val = v.chsh_values[next++];
        if (std::abs(val) > v.max_abs_chsh) {
            v.max_abs_chsh = std::abs(val);
            v.witness_value = val;
            best_mask = mask;
        }
    }
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const int bit = x * 2 + y;
            v.witness_signs[static_cast<std::size_t>(bit)] = (best_mask >> bit) & 1 ? -1 : 1;
        }

    v.locally_explainable = v.max_abs_chsh <= v.local_bound + 1e-9;

    const LocalFit fit = local_polytope_fit(t.raw());
    v.lp_feasible = fit.feasible;
    if (fit.feasible) v.mixture = fit.weights;
    return v;
}

/// Plain-language reading of the verdict in terms of the locality
/// conditions: can pre-decided answers, untouched by the distant choice,
/// reproduce the table?
inline std::string loc_report(const LocalModelVerdict& v) {
    std::ostringstream out;
    out.precision(12);
    out << "max |combination| = " << v.max_abs_chsh << " against local bound "
        << v.local_bound << "\n";
    out << "witness coefficients on E(0,0),E(0,1),E(1,0),E(1,1): ";
    for (std::size_t i = 0; i < 4; ++i) out << (i ? "," : "") << v.witness_signs[i];
    out << " -> value " << v.witness_value << "\n";
    if (std::abs(v.max_abs_chsh - v.local_bound) <= 1e-9) {
        out << "boundary case: the table sits on the edge of the local region "
               "within tolerance.\n";
    }
    if (v.locally_explainable) {
        out << "a local model exists: outcomes on each side can be pre-decided "
               "independently of the distant setting choice.\n";
        if (v.lp_feasible) {
            out << "one mixture over deterministic strategies (a0a1b0b1: weight):\n";
            for (unsigned l = 0; l < 16; ++l) {
                if (v.mixture[l] <= 0.0) continue;
                out << "  " << ((l >> 0) & 1) << ((l >> 1) & 1) << ((l >> 2) & 1)
                    << ((l >> 3) & 1) << ": " << v.mixture[l] << "\n";
            }
        }
    } else {
        out << "no local model: every assignment of outcomes made independently of "
               "the distant choice fails; altering the far setting must disturb "
               "near outcomes. margin over the bound: "
            << (v.max_abs_chsh - v.local_bound) << "\n";
    }
    if (v.locally_explainable != v.lp_feasible) {
        out << "note: the inequality criterion and the exact mixture oracle "
               "disagree; the table lies within tolerance of the boundary.\n";
    }
    return out.str();
}

/// The standard maximal-violation setup: singlet state, left axes at 0 and
/// 90 degrees, right axes at 45 and 135 degrees.
inline BipartiteExperiment singlet_chsh_experiment() {
    const double deg = std::acos(-1.0) / 180.0;
    std::vector<BinaryMeasurement> left{qubit_measurement(0.0 * deg),
                                        qubit_measurement(90.0 * deg)};
    std::vector<BinaryMeasurement> right{qubit_measurement(45.0 * deg),
                                         qubit_measurement(135.0 * deg)};
    return BipartiteExperiment(singlet_state(), std::move(left), std::move(right));
}

} // namespace qcollapse
