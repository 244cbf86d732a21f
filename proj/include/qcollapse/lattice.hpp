#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qcollapse/errors.hpp"
#include "qcollapse/matrix.hpp"
#include "qcollapse/rng.hpp"
#include "qcollapse/state.hpp"

namespace qcollapse {

/// Local update rules for the lattice automaton. Xor is the reversible
/// workhorse; Zero exists to exercise the non-reversible rejection path.
enum class UpdateRule { Identity, Xor, Zero };

inline UpdateRule parse_rule(const std::string& name) {
    if (name == "identity") return UpdateRule::Identity;
    if (name == "xor") return UpdateRule::Xor;
    if (name == "zero") return UpdateRule::Zero;
    throw ValidationError("unknown update rule: " + name);
}

inline const char* rule_name(UpdateRule r) {
    switch (r) {
        case UpdateRule::Identity: return "identity";
        case UpdateRule::Xor: return "xor";
        case UpdateRule::Zero: return "zero";
    }
    return "?";
}

/// Periodic 3D lattice of sites, each carrying `fields` digits with
/// `values` possible values. Concrete simulation is only allowed while the
/// full configuration count stays within kMaxDim; the log-space helpers
/// have no such limit.
struct LatticeConfig {
    std::size_t nx = 2, ny = 2, nz = 1;
    std::size_t fields = 1;
    std::size_t values = 2;
    UpdateRule rule = UpdateRule::Xor;

    void validate() const {
        if (nx == 0 || ny == 0 || nz == 0 || fields == 0 || values == 0) {
            throw ValidationError("lattice extents, fields and values must be positive");
        }
        if (rule == UpdateRule::Xor && (values & (values - 1)) != 0) {
            throw ValidationError("xor rule needs a power-of-two value range");
        }
    }

    /// Site count as a double; exact while below 2^53.
    double site_count() const {
        return static_cast<double>(nx) * static_cast<double>(ny) * static_cast<double>(nz);
    }

    std::size_t sites_concrete() const {
        validate();
        const double s = site_count();
        if (s > static_cast<double>(kMaxDim)) {
            throw SizeError("lattice too large for concrete simulation");
        }
        return nx * ny * nz;
    }

    /// Total classical configuration count, guarded by kMaxDim.
    std::size_t total_configs() const {
        const std::size_t sites = sites_concrete();
        std::size_t per_site = 1;
        for (std::size_t k = 0; k < fields; ++k) {
            if (per_site > kMaxDim / values) {
                throw SizeError("per-site state count exceeds the concrete limit");
            }
            per_site *= values;
        }
        std::size_t total = 1;
        for (std::size_t s = 0; s < sites; ++s) {
            if (total > kMaxDim / per_site) {
                throw SizeError("configuration space exceeds the concrete limit of " +
                                std::to_string(kMaxDim));
            }
            total *= per_site;
        }
        return total;
    }

    std::size_t digit_count() const { return sites_concrete() * fields; }

    std::size_t site_index(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return (ix * ny + iy) * nz + iz;
    }
};

/// log10 of the full classical configuration count: sites * fields *
/// log10(values). When `values` is a power of ten the digit count is
/// integral and the result is exact (up to the 2^53 double limit).
inline double config_space_log10(const LatticeConfig& cfg) {
    cfg.validate();
    const double digits = cfg.site_count() * static_cast<double>(cfg.fields);
    std::size_t v = cfg.values;
    std::size_t pow10 = 0;
    while (v % 10 == 0) {
        v /= 10;
        ++pow10;
    }
    if (v == 1) {
        return digits * static_cast<double>(pow10);
    }
    return digits * std::log10(static_cast<double>(cfg.values));
}

/// One classical lattice state: per-site field digits, site-major with
/// field varying fastest. Every digit must stay below cfg.values.
struct ClassicalConfig {
    std::vector<std::size_t> digits;
};

inline void validate_config(const LatticeConfig& cfg, const ClassicalConfig& c) {
    if (c.digits.size() != cfg.digit_count()) {
        throw ShapeError("classical state has " + std::to_string(c.digits.size()) +
                         " digits, lattice needs " + std::to_string(cfg.digit_count()));
    }
    for (std::size_t d : c.digits) {
        if (d >= cfg.values) throw ValidationError("field value out of range");
    }
}

/// Digit 0 is the most significant position of the configuration index.
inline std::size_t index_from_config(const LatticeConfig& cfg, const ClassicalConfig& c) {
    validate_config(cfg, c);
    std::size_t idx = 0;
    for (std::size_t d : c.digits) idx = idx * cfg.values + d;
    return idx;
}

inline ClassicalConfig config_from_index(const LatticeConfig& cfg, std::size_t index) {
    const std::size_t n = cfg.digit_count();
    if (index >= cfg.total_configs()) throw IndexError("configuration index out of range");
    ClassicalConfig c;
    c.digits.assign(n, 0);
    for (std::size_t k = n; k-- > 0;) {
        c.digits[k] = index % cfg.values;
        index /= cfg.values;
    }
    return c;
}

namespace detail {

/// Distinct axis neighbors of a site, self excluded. An axis of length 1
/// contributes nothing; an axis of length 2 contributes its single
/// opposite site once.
inline std::vector<std::size_t> axis_neighbors(const LatticeConfig& cfg, std::size_t ix,
                                               std::size_t iy, std::size_t iz) {
    std::vector<std::size_t> out;
    const std::size_t len[3] = {cfg.nx, cfg.ny, cfg.nz};
    const std::size_t pos[3] = {ix, iy, iz};
    for (int axis = 0; axis < 3; ++axis) {
        const std::size_t L = len[axis];
        if (L == 1) continue;
        std::size_t coord[3] = {ix, iy, iz};
        coord[axis] = (pos[axis] + 1) % L;
        out.push_back(cfg.site_index(coord[0], coord[1], coord[2]));
        if (L > 2) {
            coord[axis] = (pos[axis] + L - 1) % L;
            out.push_back(cfg.site_index(coord[0], coord[1], coord[2]));
        }
    }
    return out;
}

} // namespace detail

/// Advance every site one tick as a pure function of its radius-1
/// neighborhood, with periodic boundaries.
inline ClassicalConfig classical_step(const LatticeConfig& cfg, const ClassicalConfig& c) {
    validate_config(cfg, c);
    if (cfg.rule == UpdateRule::Identity) return c;

    ClassicalConfig out;
    out.digits.assign(c.digits.size(), 0);
    if (cfg.rule == UpdateRule::Zero) return out;

    // Xor: each field becomes itself xor the same field of every distinct
    // axis neighbor.
    for (std::size_t ix = 0; ix < cfg.nx; ++ix)
        for (std::size_t iy = 0; iy < cfg.ny; ++iy)
            for (std::size_t iz = 0; iz < cfg.nz; ++iz) {
                const std::size_t site = cfg.site_index(ix, iy, iz);
                const std::vector<std::size_t> nbr = detail::axis_neighbors(cfg, ix, iy, iz);
                for (std::size_t f = 0; f < cfg.fields; ++f) {
                    std::size_t v = c.digits[site * cfg.fields + f];
                    for (std::size_t n : nbr) v ^= c.digits[n * cfg.fields + f];
                    out.digits[site * cfg.fields + f] = v;
                }
            }
    return out;
}

/// Amplitude vector over the classical configuration space: one complex
/// number per super-point. Unnormalized but never zero.
class SuperpositionState {
public:
    explicit SuperpositionState(std::vector<complex> amps) : amps_(std::move(amps)) {
        double n2 = 0.0;
        for (const complex& a : amps_) {
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
                throw ValidationError("amplitude is not finite");
            }
            n2 += std::norm(a);
        }
        if (!(n2 > 0.0)) throw DegenerateStateError("superposition has zero norm");
        norm2_ = n2;
    }

    std::size_t dim() const { return amps_.size(); }
    const std::vector<complex>& amplitudes() const { return amps_; }
    double norm2() const { return norm2_; }

private:
    std::vector<complex> amps_;
    double norm2_;
};

/// Weighted classical configurations; amplitudes become sqrt(weight).
inline SuperpositionState lift_to_superposition(
        const LatticeConfig& cfg,
        const std::vector<std::pair<ClassicalConfig, double>>& distribution) {
    const std::size_t total = cfg.total_configs();
    std::vector<complex> amps(total, complex(0.0, 0.0));
    std::vector<bool> seen(total, false);
    for (const auto& [config, weight] : distribution) {
        if (!(weight >= 0.0)) throw ValidationError("distribution weights must be nonnegative");
        const std::size_t idx = index_from_config(cfg, config);
        if (seen[idx]) throw ValidationError("distribution lists the same configuration twice");
        seen[idx] = true;
        amps[idx] = complex(std::sqrt(weight), 0.0);
    }
    return SuperpositionState(std::move(amps));
}

inline SuperpositionState uniform_superposition(const LatticeConfig& cfg) {
    const std::size_t total = cfg.total_configs();
    const double amp = 1.0 / std::sqrt(static_cast<double>(total));
    return SuperpositionState(std::vector<complex>(total, complex(amp, 0.0)));
}

inline SuperpositionState basis_superposition(const LatticeConfig& cfg,
                                              const ClassicalConfig& c) {
    std::vector<complex> amps(cfg.total_configs(), complex(0.0, 0.0));
    amps[index_from_config(cfg, c)] = 1.0;
    return SuperpositionState(std::move(amps));
}

/// index -> stepped index for every configuration. Throws when the rule
/// fails to be a bijection on this lattice, since only permutations lift
/// to unitaries here.
inline std::vector<std::size_t> step_permutation(const LatticeConfig& cfg) {
    const std::size_t total = cfg.total_configs();
    std::vector<std::size_t> perm(total, 0);
    std::vector<bool> hit(total, false);
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t j = index_from_config(cfg, classical_step(cfg, config_from_index(cfg, i)));
        if (hit[j]) {
            throw ValidationError(std::string("rule '") + rule_name(cfg.rule) +
                                  "' is not reversible on this lattice, cannot lift to a unitary");
        }
        hit[j] = true;
        perm[i] = j;
    }
    return perm;
}

/// Apply the permutation unitary induced by one classical tick. Norm is
/// preserved exactly: amplitudes are only moved, never combined.
inline SuperpositionState quantum_step(const LatticeConfig& cfg,
                                       const SuperpositionState& state) {
    const std::vector<std::size_t> perm = step_permutation(cfg);
    if (state.dim() != perm.size()) {
        throw ShapeError("state dimension does not match the configuration space");
    }
    std::vector<complex> out(state.dim(), complex(0.0, 0.0));
    for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = state.amplitudes()[i];
    return SuperpositionState(std::move(out));
}

/// One constrained cell of a face pattern: site (x, y) on the z = 0 face,
/// one field pinned to one value.
struct PatternCell {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t field = 0;
    std::size_t value = 0;
};

/// Diagonal 0/1 operator on the configuration index. Stored as a mask so
/// that desk-scale spaces never pay for a dense matrix.
class DiagonalProjector {
public:
    explicit DiagonalProjector(std::vector<bool> mask) : mask_(std::move(mask)) {
        if (mask_.empty()) throw ValidationError("projector mask must be nonempty");
        for (bool b : mask_) rank_ += b ? 1 : 0;
    }

    std::size_t dim() const { return mask_.size(); }
    std::size_t rank() const { return rank_; }
    bool selects(std::size_t idx) const {
        if (idx >= mask_.size()) throw IndexError("configuration index out of range");
        return mask_[idx];
    }

    DiagonalProjector complement() const {
        std::vector<bool> inv(mask_.size());
        for (std::size_t i = 0; i < mask_.size(); ++i) inv[i] = !mask_[i];
        return DiagonalProjector(std::move(inv));
    }

    /// Dense form for small-dimension cross checks.
    Projector to_dense() const {
        ComplexMatrix m(dim(), dim());
        for (std::size_t i = 0; i < dim(); ++i)
            if (mask_[i]) m(i, i) = 1.0;
        return Projector(std::move(m));
    }

private:
    std::vector<bool> mask_;
    std::size_t rank_ = 0;
};

/// Build the diagonal projector selecting configurations that match a
/// partial assignment on the z = 0 face.
inline DiagonalProjector pattern_projector(const LatticeConfig& cfg,
                                           const std::vector<PatternCell>& pattern) {
    const std::size_t total = cfg.total_configs();
    std::vector<std::pair<std::size_t, std::size_t>> constraints;  // digit pos -> value
    std::vector<bool> seen(cfg.digit_count(), false);
    for (const PatternCell& cell : pattern) {
        if (cell.x >= cfg.nx || cell.y >= cfg.ny) {
            throw IndexError("pattern cell outside the z=0 face");
        }
        if (cell.field >= cfg.fields) throw IndexError("pattern field out of range");
        if (cell.value >= cfg.values) throw ValidationError("pattern value out of range");
        const std::size_t digit = cfg.site_index(cell.x, cell.y, 0) * cfg.fields + cell.field;
        if (seen[digit]) throw ValidationError("pattern constrains the same cell twice");
        seen[digit] = true;
        constraints.emplace_back(digit, cell.value);
    }

    std::vector<bool> mask(total, false);
    for (std::size_t idx = 0; idx < total; ++idx) {
        const ClassicalConfig c = config_from_index(cfg, idx);
        bool ok = true;
        for (const auto& [digit, value] : constraints) {
            if (c.digits[digit] != value) {
                ok = false;
                break;
            }
        }
        mask[idx] = ok;
    }
    return DiagonalProjector(std::move(mask));
}

/// Outcome of a whole-pattern question on a superposition. Both branches
/// are kept unnormalized; `yes` and `collapsed` record the sampled answer.
struct GestaltOutcome {
    double prob_yes = 0.0;
    double weight_yes = 0.0;  // squared norm of the matching part
    double weight_no = 0.0;
    bool yes = false;
    SuperpositionState collapsed;
};

/// Heisenberg collapse of a superposition along a pattern question: the
/// yes branch keeps exactly the matching super-points.
inline GestaltOutcome gestalt_collapse(const SuperpositionState& state,
                                       const DiagonalProjector& p, RandomEngine& rng) {
    if (state.dim() != p.dim()) {
        throw ShapeError("projector dimension does not match the state");
    }
    double w_yes = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (p.selects(i)) w_yes += std::norm(state.amplitudes()[i]);
    }
    const double total = state.norm2();
    const double prob = w_yes / total;
    const bool yes = rng.next_double() < prob;

    std::vector<complex> amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (p.selects(i) != yes) amps[i] = complex(0.0, 0.0);
    }
    const double w_kept = yes ? w_yes : total - w_yes;
    if (!(w_kept > 0.0)) {
        throw DegenerateStateError("sampled branch carries zero weight");
    }
    return GestaltOutcome{prob, w_yes, total - w_yes, yes,
                          SuperpositionState(std::move(amps))};
}

/// A 5x5 letter glyph pinned onto the z = 0 face: stroke cells are 1,
/// background cells are 0, so the whole face is constrained.
inline std::vector<PatternCell> m_glyph_pattern() {
    static const char* rows[5] = {
        "X...X",
        "XX.XX",
        "X.X.X",
        "X...X",
        "X...X",
    };
    std::vector<PatternCell> cells;
    cells.reserve(25);
    for (std::size_t y = 0; y < 5; ++y) {
        for (std::size_t x = 0; x < 5; ++x) {
            const std::size_t value = rows[y][x] == 'X' ? 1 : 0;
            cells.push_back(PatternCell{x, y, 0, value});
        }
    }
    return cells;
}

inline LatticeConfig m_glyph_lattice() {
    LatticeConfig cfg;
    cfg.nx = 5;
    cfg.ny = 5;
    cfg.nz = 1;
    cfg.fields = 1;
    cfg.values = 2;
    cfg.rule = UpdateRule::Xor;
    return cfg;
}

} // namespace qcollapse
