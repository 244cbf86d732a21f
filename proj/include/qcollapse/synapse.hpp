#pragma once

#include <cmath>

#include "qcollapse/errors.hpp"

namespace qcollapse {

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K

/// Geometry and conditions of an ion traversing a release-trigger channel.
/// Defaults describe a calcium-40 ion at body temperature squeezing through
/// a 1 nm channel and drifting 50 nm to its target.
struct SynapseParams {
    double ion_mass = 6.642e-26;        // kg
    double temperature = 310.0;         // K
    double channel_diameter = 1e-9;     // m
    double travel_distance = 50e-9;     // m

    void validate() const {
        if (!(ion_mass > 0.0) || !(temperature > 0.0) || !(channel_diameter > 0.0) ||
            !(travel_distance > 0.0)) {
            throw ValidationError("all synapse parameters must be positive");
        }
    }
};

/// Scale estimates for the quantum spreading of the ion's wave packet.
struct SynapseEstimates {
    double delta_v = 0.0;         // velocity uncertainty from channel confinement, m/s
    double v_thermal = 0.0;       // 3D RMS thermal speed, m/s
    double velocity_ratio = 0.0;  // delta_v / v_thermal
    double transit_time = 0.0;    // ballistic travel time, s
    double spread = 0.0;          // lateral packet growth over the transit, m
};

inline SynapseEstimates synapse_estimates(const SynapseParams& p) {
    p.validate();
    SynapseEstimates e;
    e.delta_v = kHbar / (p.ion_mass * p.channel_diameter);
    e.v_thermal = std::sqrt(3.0 * kBoltzmann * p.temperature / p.ion_mass);
    e.velocity_ratio = e.delta_v / e.v_thermal;
    e.transit_time = p.travel_distance / e.v_thermal;
    e.spread = e.delta_v * e.transit_time;
    return e;
}

/// log10 of the number of firing combinations across n independent
/// two-state sites.
inline double branch_count_log10(double n_sites) {
    if (!(n_sites >= 0.0)) {
        throw ValidationError("site count must be nonnegative");
    }
    return n_sites * std::log10(2.0);
}

} // namespace qcollapse
