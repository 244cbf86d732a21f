#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <string>

#include "test_support.hpp"

using namespace qcollapse;

namespace {

constexpr double kRoot2 = 1.4142135623730951;
constexpr double kDeg = 3.14159265358979323846 / 180.0;

// p(a,b|x,y) = (1 + (-1)^(a+b) E_xy) / 4: uniform marginals, chosen correlators
CorrelationTable table_from_correlators(double e00, double e01, double e10, double e11) {
    const double e[2][2] = {{e00, e01}, {e10, e11}};
    std::array<double, 16> p{};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double sign = (a + b) % 2 == 0 ? 1.0 : -1.0;
                    p[coord_index(x, y, a, b)] = 0.25 * (1.0 + sign * e[x][y]);
                }
    return CorrelationTable(p);
}

std::array<double, 16> mixture_table(const std::array<double, 16>& weights) {
    std::array<double, 16> p{};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (unsigned l = 0; l < 16; ++l)
                        p[coord_index(x, y, a, b)] +=
                            weights[l] * vertex_value(l, x, y, a, b);
    return p;
}

BipartiteExperiment experiment_with_state(DensityState joint) {
    std::vector<BinaryMeasurement> left{qubit_measurement(0.0), qubit_measurement(90.0 * kDeg)};
    std::vector<BinaryMeasurement> right{qubit_measurement(45.0 * kDeg),
                                         qubit_measurement(135.0 * kDeg)};
    return BipartiteExperiment(std::move(joint), std::move(left), std::move(right));
}

} // namespace

TEST_CASE("coordinate layout and strategy encoding are pinned down") {
    REQUIRE(coord_index(0, 0, 0, 0) == 0);
    REQUIRE(coord_index(0, 0, 0, 1) == 1);
    REQUIRE(coord_index(1, 0, 1, 0) == 10);
    REQUIRE(coord_index(1, 1, 1, 1) == 15);

    // strategy 0b0101: answer 1 at x=0, 0 at x=1; 1 at y=0, 0 at y=1
    REQUIRE(vertex_value(5, 0, 0, 1, 1) == 1);
    REQUIRE(vertex_value(5, 0, 0, 0, 1) == 0);
    REQUIRE(vertex_value(5, 1, 1, 0, 0) == 1);
    REQUIRE(vertex_value(5, 1, 0, 0, 1) == 1);
    // exactly one outcome pair fires per setting pair
    for (unsigned l = 0; l < 16; ++l)
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                int hits = 0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) hits += vertex_value(l, x, y, a, b);
                REQUIRE(hits == 1);
            }
}

TEST_CASE("binary measurements resolve the identity") {
    const BinaryMeasurement m = qubit_measurement(0.7);
    REQUIRE(max_abs_diff(m.outcome0.matrix() + m.outcome1.matrix(),
                         ComplexMatrix::identity(2)) < 1e-12);
    REQUIRE(std::abs(trace(m.outcome0.matrix()).real() - 1.0) < 1e-12);

    // two copies of the same rank-1 projector do not resolve the identity
    const Projector p0 = qubit_measurement(0.3).outcome0;
    REQUIRE_THROWS_AS(BinaryMeasurement(p0, p0), ValidationError);
}

TEST_CASE("the singlet anticorrelates every common axis") {
    REQUIRE(std::abs(singlet_state().weight() - 1.0) < 1e-12);
    REQUIRE(entropy(singlet_state()) < 1e-10);

    for (const double theta : {0.0, 0.35, 1.2}) {
        std::vector<BinaryMeasurement> left{qubit_measurement(theta),
                                            qubit_measurement(theta + 1.0)};
        std::vector<BinaryMeasurement> right{qubit_measurement(theta),
                                             qubit_measurement(theta + 1.0)};
        const BipartiteExperiment exp(singlet_state(), std::move(left), std::move(right));
        const CorrelationTable t = joint_probs(exp);
        for (int xy = 0; xy < 2; ++xy) {
            REQUIRE(std::abs(t.at(0, 0, xy, xy)) < 1e-12);
            REQUIRE(std::abs(t.at(1, 1, xy, xy)) < 1e-12);
            REQUIRE(std::abs(t.at(0, 1, xy, xy) - 0.5) < 1e-12);
            REQUIRE(std::abs(t.at(1, 0, xy, xy) - 0.5) < 1e-12);
            REQUIRE(std::abs(t.correlator(xy, xy) + 1.0) < 1e-12);
        }
    }
}

TEST_CASE("product states factor into independent local statistics") {
    RandomEngine rng(31);
    for (int it = 0; it < 50; ++it) {
        const DensityState ra = support::random_density(rng, 2);
        const DensityState rb = support::random_density(rng, 2);
        const ComplexMatrix na = ra.matrix() * complex(1.0 / ra.weight(), 0.0);
        const ComplexMatrix nb = rb.matrix() * complex(1.0 / rb.weight(), 0.0);

        std::vector<BinaryMeasurement> left{
            qubit_measurement(3.0 * rng.next_double()),
            qubit_measurement(3.0 * rng.next_double())};
        std::vector<BinaryMeasurement> right{
            qubit_measurement(3.0 * rng.next_double()),
            qubit_measurement(3.0 * rng.next_double())};

        double pa[2][2], pb[2][2];
        for (int s = 0; s < 2; ++s)
            for (int o = 0; o < 2; ++o) {
                pa[s][o] = std::real(trace(left[static_cast<std::size_t>(s)].outcome(o).matrix() * na));
                pb[s][o] = std::real(trace(right[static_cast<std::size_t>(s)].outcome(o).matrix() * nb));
            }

        const BipartiteExperiment exp(DensityState(kron(na, nb)), std::move(left),
                                      std::move(right));
        const CorrelationTable t = joint_probs(exp);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        REQUIRE(std::abs(t.at(a, b, x, y) - pa[x][a] * pb[y][b]) < 1e-12);
                    }

        // independent statistics always admit a local account
        const LocalModelVerdict v = local_model_check(t);
        REQUIRE(v.locally_explainable);
        REQUIRE(v.lp_feasible);
    }
}

TEST_CASE("experiment validation") {
    std::vector<BinaryMeasurement> one{qubit_measurement(0.0)};
    std::vector<BinaryMeasurement> two{qubit_measurement(0.0), qubit_measurement(1.0)};
    REQUIRE_THROWS_AS(
        BipartiteExperiment(singlet_state(), one, two), ValidationError);

    const DensityState unnormalized(ComplexMatrix::identity(4));
    REQUIRE_THROWS_AS(BipartiteExperiment(unnormalized, two, two), ValidationError);

    const DensityState small(ComplexMatrix::identity(2) * complex(0.5, 0.0));
    REQUIRE_THROWS_AS(BipartiteExperiment(small, two, two), ShapeError);
}

TEST_CASE("table validation rejects unphysical inputs") {
    std::array<double, 16> p{};
    for (double& v : p) v = 1.0 / 16.0;  // wrong: setting pairs must sum to 1
    REQUIRE_THROWS_AS(CorrelationTable(p), ValidationError);

    for (double& v : p) v = 0.25;
    REQUIRE_NOTHROW(CorrelationTable(p));

    p[coord_index(0, 0, 0, 0)] = -0.25;
    p[coord_index(0, 0, 1, 1)] = 0.75;
    REQUIRE_THROWS_AS(CorrelationTable(p), ValidationError);

    // left outcome flips with the right setting: signaling
    std::array<double, 16> s{};
    for (int x = 0; x < 2; ++x) {
        s[coord_index(x, 0, 0, 0)] = 1.0;
        s[coord_index(x, 1, 1, 0)] = 1.0;
    }
    REQUIRE_THROWS_AS(CorrelationTable(s), ValidationError);
}

TEST_CASE("combination values follow the documented mask order") {
    const CorrelationTable t = table_from_correlators(0.5, -0.25, 0.125, 0.0625);
    const double e[4] = {0.5, -0.25, 0.125, 0.0625};  // E(0,0),E(0,1),E(1,0),E(1,1)
    const unsigned masks[8] = {1, 2, 4, 7, 8, 11, 13, 14};
    const std::array<double, 8> got = chsh_values(t);
    for (std::size_t k = 0; k < 8; ++k) {
        double expect = 0.0;
        for (int bit = 0; bit < 4; ++bit) {
            expect += ((masks[k] >> bit) & 1 ? -1.0 : 1.0) * e[bit];
        }
        REQUIRE(std::abs(got[k] - expect) < 1e-12);
    }
}

TEST_CASE("the preset experiment reaches the quantum maximum") {
    const BipartiteExperiment exp = singlet_chsh_experiment();
    const CorrelationTable t = joint_probs(exp);

    const double h = kRoot2 / 2.0;
    REQUIRE(std::abs(t.correlator(0, 0) + h) < 1e-12);
    REQUIRE(std::abs(t.correlator(0, 1) - h) < 1e-12);
    REQUIRE(std::abs(t.correlator(1, 0) + h) < 1e-12);
    REQUIRE(std::abs(t.correlator(1, 1) + h) < 1e-12);

    const LocalModelVerdict v = local_model_check(t);
    REQUIRE(std::abs(v.max_abs_chsh - 2.0 * kRoot2) < 1e-12);
    REQUIRE_FALSE(v.locally_explainable);
    REQUIRE_FALSE(v.lp_feasible);
    REQUIRE(v.witness_signs == std::array<int, 4>{1, -1, 1, 1});
    REQUIRE(std::abs(v.witness_value + 2.0 * kRoot2) < 1e-12);

    const std::string report = loc_report(v);
    REQUIRE(report.find("no local model") != std::string::npos);
    REQUIRE(report.find("margin over the bound") != std::string::npos);
}

TEST_CASE("deterministic strategies sit exactly on the bound") {
    // every vertex: all correlators are +-1, best combination exactly 2
    for (unsigned l = 0; l < 16; ++l) {
        std::array<double, 16> w{};
        w[l] = 1.0;
        const CorrelationTable t = CorrelationTable(mixture_table(w));
        const LocalModelVerdict v = local_model_check(t);
        REQUIRE(v.max_abs_chsh == 2.0);
        REQUIRE(v.locally_explainable);
        REQUIRE(v.lp_feasible);
    }
}

TEST_CASE("vertex mixtures are certified with a reconstruction") {
    RandomEngine rng(47);
    for (int it = 0; it < 10; ++it) {
        std::array<double, 16> w{};
        double total = 0.0;
        for (int k = 0; k < 5; ++k) {
            const std::size_t l = rng.next_below(16);
            const double add = rng.next_double() + 0.05;
            w[l] += add;
            total += add;
        }
        for (double& x : w) x /= total;

        const std::array<double, 16> p = mixture_table(w);
        const LocalModelVerdict v = local_model_check(CorrelationTable(p));
        REQUIRE(v.locally_explainable);
        REQUIRE(v.lp_feasible);

        // the certificate must itself reproduce the table
        const std::array<double, 16> back = mixture_table(v.mixture);
        double wsum = 0.0;
        for (double x : v.mixture) {
            REQUIRE(x >= 0.0);
            wsum += x;
        }
        REQUIRE(std::abs(wsum - 1.0) < 1e-9);
        for (std::size_t k = 0; k < 16; ++k) {
            REQUIRE(std::abs(back[k] - p[k]) < 1e-9);
        }

        const std::string report = loc_report(v);
        REQUIRE(report.find("a local model exists") != std::string::npos);
        REQUIRE(report.find(": ") != std::string::npos);
    }
}

TEST_CASE("uniform noise is locally explainable") {
    std::array<double, 16> p{};
    for (double& v : p) v = 0.25;
    const LocalModelVerdict v = local_model_check(CorrelationTable(p));
    REQUIRE(v.max_abs_chsh < 1e-12);
    REQUIRE(v.locally_explainable);
    REQUIRE(v.lp_feasible);
}

TEST_CASE("the critical visibility sits on the boundary, still local") {
    const double vis = 1.0 / kRoot2;
    const CorrelationTable t = joint_probs(experiment_with_state(noisy_singlet(vis)));
    const LocalModelVerdict v = local_model_check(t);
    REQUIRE(std::abs(v.max_abs_chsh - 2.0) < 1e-12);
    REQUIRE(v.locally_explainable);
    REQUIRE(v.lp_feasible);
    REQUIRE(loc_report(v).find("boundary case") != std::string::npos);
}

TEST_CASE("the perfect xor box overshoots everything quantum") {
    // p(a, b | x, y) = 1/2 when a xor b = x and y, else 0
    std::array<double, 16> p{};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    if ((a ^ b) == (x & y)) p[coord_index(x, y, a, b)] = 0.5;
                }
    const LocalModelVerdict v = local_model_check(CorrelationTable(p));
    REQUIRE(v.max_abs_chsh == 4.0);
    REQUIRE_FALSE(v.locally_explainable);
    REQUIRE_FALSE(v.lp_feasible);
}

TEST_CASE("inequality and mixture oracle agree away from the boundary") {
    RandomEngine rng(53);
    const CorrelationTable quantum = joint_probs(singlet_chsh_experiment());
    int checked = 0;
    while (checked < 60) {
        std::array<double, 16> w{};
        double total = 0.0;
        for (std::size_t l = 0; l < 16; ++l) {
            w[l] = rng.next_double();
            total += w[l];
        }
        for (double& x : w) x /= total;
        const std::array<double, 16> local = mixture_table(w);

        const double alpha = rng.next_double();
        std::array<double, 16> p{};
        for (std::size_t k = 0; k < 16; ++k) {
            p[k] = alpha * local[k] + (1.0 - alpha) * quantum.raw()[k];
        }
        const LocalModelVerdict v = local_model_check(CorrelationTable(p));
        if (std::abs(v.max_abs_chsh - 2.0) < 1e-6) continue;  // too close to call
        REQUIRE(v.locally_explainable == v.lp_feasible);
        REQUIRE(v.locally_explainable == (v.max_abs_chsh < 2.0));
        ++checked;
    }
}
