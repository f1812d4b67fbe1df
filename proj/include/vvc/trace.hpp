#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vvc {

/// One closed-loop sample: the measured state after the plant solve, before
/// the control update of the same tick. minute is -1 for static runs.
struct TraceRecord {
    long tick = 0;
    int minute = -1;
    double mismatch_norm = 0.0;  ///< ||V - mu||_2 over non-slack buses
    Eigen::VectorXd q;           ///< setpoints, buses 1..N
    Eigen::VectorXd v;           ///< voltage magnitudes, buses 1..N
    int limits_hit = 0;          ///< buses whose setpoint sits at a VAR bound
};

/// Columnar CSV: tick,minute,mismatch_norm,limits_hit and, when full=true,
/// wide columns q_1..q_N,v_1..v_N. Written atomically (temp file + rename).
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace, bool full);

} // namespace vvc
