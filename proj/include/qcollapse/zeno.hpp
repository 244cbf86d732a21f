#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "qcollapse/errors.hpp"
#include "qcollapse/matrix.hpp"
#include "qcollapse/state.hpp"

namespace qcollapse {

/// Three-level control model. State 2 feeds a motor action, state 3 is the
/// motor state it drains into, state 1 is a neighbor that mixes with 2.
/// The initial statistical operator has entries S11 = x, S22 = y, S12 = z
/// (one-based labels); the question projects onto state 2.
struct ZenoParams {
    double x = 1.0;
    double y = 1.0;
    complex z{1.0, 0.0};
    complex c{std::sqrt(0.5), 0.0};
    complex s{std::sqrt(0.5), 0.0};

    /// Coupling amplitude between states 2 and 3, fixed by the model.
    static constexpr double r = 0.70710678118654752440;

    /// Rejects parameter sets whose S would not be a valid state or whose
    /// mixing amplitudes are not normalized.
    void validate() const {
        if (!(x >= 0.0) || !(y >= 0.0)) {
            throw ValidationError("populations x and y must be nonnegative");
        }
        if (std::abs(std::norm(c) + std::norm(s) - 1.0) > 1e-12) {
            throw ValidationError("mixing amplitudes must satisfy |c|^2 + |s|^2 = 1");
        }
        if (std::norm(z) > x * y + 1e-12) {
            throw ValidationError("coherence too large: need |z|^2 <= x*y for positivity");
        }
    }

    /// The worked example: equal populations and full coherence, with
    /// maximal mixing.
    static ZenoParams model_default() { return ZenoParams{}; }
};

/// Closed-form weight of state 2 after the full protocol,
///   x|s|^2 + y|c|^2/2 - z c s* r - z* c* s r,
/// with the coherence z zeroed when the question was posed first.
inline double zeno_closed_form(const ZenoParams& p, bool collapsed) {
    p.validate();
    const complex z = collapsed ? complex(0.0, 0.0) : p.z;
    const complex cross = z * p.c * std::conj(p.s) * ZenoParams::r;
    return p.x * std::norm(p.s) + p.y * std::norm(p.c) / 2.0 - 2.0 * std::real(cross);
}

struct ZenoReadout {
    double w_initial = 0.0;  // Tr(P S)
    double w_after_u = 0.0;  // Tr(P U S U^-1)
    double w_final = 0.0;    // Tr(P M U S U^-1 M^-1)
};

namespace detail {

inline double weight_on(const Projector& p, const DensityState& s) {
    return std::real(trace(p.matrix() * s.matrix()));
}

} // namespace detail

/// Dense-matrix run of the same protocol: optionally reduce along P, then
/// couple 2-3 with U, then mix 1-2 with M, reading off the raw weight of
/// state 2 at each stage.
inline ZenoReadout zeno_matrix_run(const ZenoParams& p, bool collapsed) {
    p.validate();

    ComplexMatrix s0(3, 3);
    s0(0, 0) = p.x;
    s0(1, 1) = p.y;
    s0(0, 1) = p.z;
    s0(1, 0) = std::conj(p.z);
    DensityState state(std::move(s0));

    const double r = ZenoParams::r;
    ComplexMatrix u(3, 3);
    u(0, 0) = 1.0;
    u(1, 1) = r;
    u(1, 2) = r;
    u(2, 2) = r;
    u(2, 1) = -r;

    ComplexMatrix m(3, 3);
    m(0, 0) = p.c;
    m(0, 1) = p.s;
    m(1, 0) = -std::conj(p.s);
    m(1, 1) = std::conj(p.c);
    m(2, 2) = 1.0;

    const Projector proj = Projector::basis_state(3, 1);

    ZenoReadout out;
    out.w_initial = detail::weight_on(proj, state);
    if (collapsed) {
        CollapseOutcome split = process_one(state, proj);
        state = DensityState(split.yes_branch + split.no_branch);
    }
    state = evolved(state, u);
    out.w_after_u = detail::weight_on(proj, state);
    state = evolved(state, m);
    out.w_final = detail::weight_on(proj, state);
    return out;
}

} // namespace qcollapse
