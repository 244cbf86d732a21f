#pragma once

#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

#include "qcollapse/errors.hpp"
#include "qcollapse/rng.hpp"
#include "qcollapse/zeno.hpp"

namespace qcollapse {

struct SelectionResult {
    std::size_t n_trials = 0;
    std::size_t hits_with_questions = 0;
    std::size_t hits_without = 0;
    double rate_with_questions = 0.0;
    double rate_without = 0.0;
    double prob_with_questions = 0.0;  // exact per-trial activation probability
    double prob_without = 0.0;
};

/// Compare two lineages through the three-level model: one poses the
/// question before the coupling acts, one never asks. Each trial draws the
/// motor activation with probability w_final / Tr S for both arms. Trials
/// use derived per-index engines, so the tally is independent of the
/// thread count and of execution order.
inline SelectionResult selection_advantage_mc(const ZenoParams& p, std::size_t n_trials,
                                              std::uint64_t seed, unsigned threads = 1) {
    if (n_trials == 0) throw ValidationError("need at least one trial");
    if (threads == 0) throw ValidationError("need at least one thread");
    p.validate();
    const double total = p.x + p.y;
    if (!(total > 0.0)) {
        throw ValidationError("total weight x + y must be positive");
    }

    SelectionResult res;
    res.n_trials = n_trials;
    res.prob_with_questions = zeno_matrix_run(p, true).w_final / total;
    res.prob_without = zeno_matrix_run(p, false).w_final / total;

    const unsigned used = static_cast<unsigned>(
        std::min<std::size_t>(threads, n_trials));
    std::vector<std::size_t> hits_w(used, 0), hits_wo(used, 0);

    auto worker = [&](unsigned part) {
        std::size_t w = 0, wo = 0;
        for (std::size_t i = part; i < n_trials; i += used) {
            RandomEngine eng = RandomEngine::child(seed, i);
            if (eng.next_double() < res.prob_with_questions) ++w;
            if (eng.next_double() < res.prob_without) ++wo;
        }
        hits_w[part] = w;
        hits_wo[part] = wo;
    };

    if (used == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(used);
        for (unsigned t = 0; t < used; ++t) pool.emplace_back(worker, t);
        for (std::thread& t : pool) t.join();
    }

    for (unsigned t = 0; t < used; ++t) {
        res.hits_with_questions += hits_w[t];
        res.hits_without += hits_wo[t];
    }
    res.rate_with_questions =
        static_cast<double>(res.hits_with_questions) / static_cast<double>(n_trials);
    res.rate_without = static_cast<double>(res.hits_without) / static_cast<double>(n_trials);
    return res;
}

} // namespace qcollapse
