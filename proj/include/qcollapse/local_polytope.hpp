#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qcollapse/errors.hpp"

namespace qcollapse {

using Rational = boost::multiprecision::cpp_rational;

/// Coordinate order used for 2-setting/2-outcome tables everywhere:
/// settings outermost, outcomes innermost.
inline std::size_t coord_index(int x, int y, int a, int b) {
    return static_cast<std::size_t>(((x * 2 + y) * 2 + a) * 2 + b);
}

/// A deterministic local strategy is four pre-decided answers (a0, a1,
/// b0, b1), encoded in the four low bits of lambda.
inline int vertex_value(unsigned lambda, int x, int y, int a, int b) {
    const int ax = (lambda >> (x == 0 ? 0 : 1)) & 1;
    const int by = (lambda >> (y == 0 ? 2 : 3)) & 1;
    return (ax == a && by == b) ? 1 : 0;
}

struct LocalFit {
    bool feasible = false;
    std::array<double, 16> weights{};  // mixture over the 16 strategies when feasible
};

namespace detail {

/// Phase-1 simplex with Bland's rule, exact rational arithmetic.
/// Feasibility of: A x = b, x >= 0. Returns the basic solution when
/// feasible (artificials at zero).
class ExactFeasibility {
public:
    ExactFeasibility(std::vector<std::vector<Rational>> a, std::vector<Rational> b)
        : a_(std::move(a)), b_(std::move(b)) {}

    bool solve(std::vector<Rational>& solution) {
        const std::size_t m = a_.size();
        const std::size_t n = a_.empty() ? 0 : a_.front().size();

        // rhs must be nonnegative before artificials enter the basis
        for (std::size_t r = 0; r < m; ++r) {
            if (b_[r] < 0) {
                b_[r] = -b_[r];
                for (Rational& x : a_[r]) x = -x;
            }
        }

        const std::size_t cols = n + m;
        tab_.assign(m, std::vector<Rational>(cols, Rational(0)));
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t j = 0; j < n; ++j) tab_[r][j] = a_[r][j];
            tab_[r][n + r] = 1;
        }
        basis_.resize(m);
        for (std::size_t r = 0; r < m; ++r) basis_[r] = n + r;

        // reduced costs for minimizing the artificial sum
        std::vector<Rational> obj(cols, Rational(0));
        Rational value(0);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t j = 0; j < n; ++j) obj[j] -= tab_[r][j];
            value += b_[r];
        }

        while (true) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < cols; ++j) {
                if (obj[j] < 0) {
                    enter = j;
                    break;  // Bland: lowest index
                }
            }
            if (enter == cols) break;

            std::size_t leave = m;
            Rational best;
            for (std::size_t r = 0; r < m; ++r) {
                if (tab_[r][enter] <= 0) continue;
                const Rational ratio = b_[r] / tab_[r][enter];
                if (leave == m || ratio < best ||
                    (ratio == best && basis_[r] < basis_[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
            if (leave == m) {
                throw ValidationError("feasibility program is unbounded; inputs malformed");
            }
            pivot(leave, enter, obj, value);
        }

        if (value != 0) return false;

        solution.assign(n, Rational(0));
        for (std::size_t r = 0; r < m; ++r) {
            if (basis_[r] < n) solution[basis_[r]] = b_[r];
        }
        return true;
    }

private:
    void pivot(std::size_t leave, std::size_t enter, std::vector<Rational>& obj,
               Rational& value) {
        const std::size_t m = tab_.size();
        const std::size_t cols = tab_.front().size();
        const Rational piv = tab_[leave][enter];
        for (std::size_t j = 0; j < cols; ++j) tab_[leave][j] /= piv;
        b_[leave] /= piv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == leave || tab_[r][enter] == 0) continue;
            const Rational f = tab_[r][enter];
            for (std::size_t j = 0; j < cols; ++j) tab_[r][j] -= f * tab_[leave][j];
            b_[r] -= f * b_[leave];
        }
        if (obj[enter] != 0) {
            const Rational f = obj[enter];
            for (std::size_t j = 0; j < cols; ++j) obj[j] -= f * tab_[leave][j];
            value += f * b_[leave];  // f < 0 here, so the artificial sum shrinks
        }
        basis_[leave] = enter;
    }

    std::vector<std::vector<Rational>> a_;
    std::vector<Rational> b_;
    std::vector<std::vector<Rational>> tab_;
    std::vector<std::size_t> basis_;
};

} // namespace detail

/// Decide whether a 16-entry table is a mixture of the 16 deterministic
/// local strategies, allowing each coordinate to deviate by at most
/// `slack`. Exact rational arithmetic throughout; the default slack keeps
/// any feasible table within 1e-9 of the polytope in CHSH units.
inline LocalFit local_polytope_fit(const std::array<double, 16>& table,
                                   const Rational& slack = Rational(1, 16000000000LL)) {
    if (slack < 0) throw ValidationError("slack must be nonnegative");

    // variables: w (16), u (16), v (16)
    // rows:      sum_l V[l][k] w_l + u_k           = t_k + slack   (16)
    //            u_k + v_k                         = 2 slack       (16)
    //            sum_l w_l                         = 1             (1)
    const std::size_t nw = 16, nu = 16, nv = 16;
    const std::size_t n = nw + nu + nv;
    std::vector<std::vector<Rational>> a(33, std::vector<Rational>(n, Rational(0)));
    std::vector<Rational> b(33, Rational(0));

    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int av = 0; av < 2; ++av)
                for (int bv = 0; bv < 2; ++bv) {
                    const std::size_t k = coord_index(x, y, av, bv);
                    for (unsigned lambda = 0; lambda < 16; ++lambda) {
                        a[k][lambda] = vertex_value(lambda, x, y, av, bv);
                    }
                    a[k][nw + k] = 1;
                    b[k] = Rational(table[k]) + slack;
                }
    for (std::size_t k = 0; k < 16; ++k) {
        a[16 + k][nw + k] = 1;
        a[16 + k][nw + nu + k] = 1;
        b[16 + k] = 2 * slack;
    }
    for (std::size_t l = 0; l < 16; ++l) a[32][l] = 1;
    b[32] = 1;

    detail::ExactFeasibility lp(std::move(a), std::move(b));
    std::vector<Rational> solution;
    LocalFit fit;
    fit.feasible = lp.solve(solution);
    if (fit.feasible) {
        for (std::size_t l = 0; l < 16; ++l) {
            fit.weights[l] = static_cast<double>(solution[l]);
        }
    }
    return fit;
}

} // namespace qcollapse
