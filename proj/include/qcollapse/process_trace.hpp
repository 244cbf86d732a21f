#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qcollapse/errors.hpp"
#include "qcollapse/matrix.hpp"
#include "qcollapse/rng.hpp"
#include "qcollapse/state.hpp"

namespace qcollapse {

enum class EventKind { Segment, Question };

/// One step in a run's history. Weights are traces of the unnormalized
/// state, taken before and after the step; a segment must conserve them,
/// a question generally lowers them.
struct TraceEvent {
    EventKind kind = EventKind::Segment;
    double time_after = 0.0;
    std::size_t index_after = 0;
    double weight_before = 0.0;
    double weight_after = 0.0;
    bool yes = false;       // questions only
    double prob_yes = 0.0;  // questions only
};

/// A point of the two-clock staircase: smooth evolution moves along the
/// time axis, each posed question bumps the process index by one.
struct StairPoint {
    double time = 0.0;
    std::size_t index = 0;
};

/// Run bookkeeping for a single history: alternating unitary segments and
/// posed questions, with the surviving branch kept unnormalized.
class ProcessTrace {
public:
    explicit ProcessTrace(DensityState initial, double start_time = 0.0)
        : state_(std::move(initial)), time_(start_time), start_time_(start_time) {}

    const DensityState& state() const { return state_; }
    double time() const { return time_; }
    std::size_t process_index() const { return index_; }
    const std::vector<TraceEvent>& events() const { return events_; }

    /// Apply a unitary for the given duration of smooth time.
    void evolve_segment(const ComplexMatrix& u, double duration) {
        if (!(duration >= 0.0)) {
            throw ValidationError("segment duration must be nonnegative");
        }
        const double before = state_.weight();
        state_ = evolved(state_, u);
        time_ += duration;
        events_.push_back({EventKind::Segment, time_, index_, before, state_.weight(),
                           false, 0.0});
    }

    /// A raw unitary with no stated duration counts as one unit of time.
    void evolve_segment(const ComplexMatrix& u) { evolve_segment(u, 1.0); }

    /// Pose a question and keep the branch sampled with its probability.
    /// Returns the recorded event.
    TraceEvent pose_question(const Projector& p, RandomEngine& rng) {
        const double before = state_.weight();
        HeisenbergResult res = heisenberg_collapse(state_, p, rng);
        return record_question(std::move(res), before);
    }

    /// Pose a question and keep the stated branch regardless of chance.
    /// Throws DegenerateStateError when that branch carries no weight.
    TraceEvent pose_question(const Projector& p, bool keep_yes) {
        const double before = state_.weight();
        CollapseOutcome split = process_one(state_, p);
        const double w = keep_yes ? split.weight_yes : split.weight_no;
        if (!(w > 0.0)) {
            throw DegenerateStateError("forced branch carries zero weight");
        }
        HeisenbergResult res{keep_yes, split.prob_yes,
                             DensityState(keep_yes ? std::move(split.yes_branch)
                                                   : std::move(split.no_branch))};
        return record_question(std::move(res), before);
    }

    /// Staircase of (time, process index) points, starting at the initial
    /// corner. Horizontal runs are segments, vertical rises are questions.
    std::vector<StairPoint> staircase() const {
        std::vector<StairPoint> pts;
        pts.reserve(events_.size() + 1);
        pts.push_back({start_time_, 0});
        for (const TraceEvent& e : events_) {
            pts.push_back({e.time_after, e.index_after});
        }
        return pts;
    }

private:
    TraceEvent record_question(HeisenbergResult res, double weight_before) {
        state_ = std::move(res.state);
        ++index_;
        TraceEvent ev{EventKind::Question, time_, index_, weight_before, state_.weight(),
                      res.yes, res.prob_yes};
        events_.push_back(ev);
        return ev;
    }

    DensityState state_;
    double time_;
    double start_time_;
    std::size_t index_ = 0;
    std::vector<TraceEvent> events_;
};

} // namespace qcollapse
