#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vvc/control.hpp"
#include "vvc/graph_matrices.hpp"
#include "vvc/network.hpp"
#include "vvc/trace.hpp"

namespace vvc {

/// Minute-resolution daily load and PV generation per home, kW. Timestamps
/// must be 0,1,...,len-1 (uniform one-minute spacing).
struct DailyProfile {
    std::vector<int> minutes;
    std::vector<double> load_kw;
    std::vector<double> pv_kw;

    int size() const { return static_cast<int>(minutes.size()); }

    /// CSV with header `minute,load_kw_per_home,pv_kw_per_home`.
    static DailyProfile from_csv(const std::string& path);
};

/// Time-series experiment setup. Inverter apparent rating per home is
/// inverter_rating_factor * pv_peak_kw; control runs every control_period_s
/// while the profile advances every profile_period_s.
struct DynamicScenario {
    DailyProfile profile;
    Eigen::VectorXi homes_per_bus;
    double pv_peak_kw = 3.0;
    double inverter_rating_factor = 1.05;
    double control_period_s = 5.0;
    double profile_period_s = 60.0;
    double load_q_ratio = 0.5;  ///< reactive load as a fraction of real load

    void validate(int n_buses) const;
    int ticks_per_slot() const;
};

/// Instantaneous symmetric VAR limits from the inverter rating headroom:
/// per home sqrt(S^2 - pv^2) (clamped at 0 when pv exceeds the rating),
/// scaled by homes per bus and converted to p.u.
std::pair<Eigen::VectorXd, Eigen::VectorXd> var_limits_at(const DynamicScenario& scen,
                                                          const FeederNetwork& net, int minute);

/// Dynamic controller selection. DelayedDroop recomputes the droop slope
/// every profile slot from the instantaneous limits: c_j(t) =
/// droop_voltage_window / q̄_j(t).
struct DynamicControl {
    enum class Mode { None, Scaled, DelayedDroop };
    Mode mode = Mode::Scaled;
    double c = 0.2;
    double epsilon = 0.3;
    double alpha = 0.3;
    double droop_voltage_window = 0.05;
};

struct MinuteSummary {
    int minute = 0;
    double mismatch_norm = 0.0;  ///< at the last control tick of the minute
    double v_min = 0.0;
    double v_max = 0.0;
    int limits_hit = 0;
};

struct DynamicResult {
    std::vector<TraceRecord> trace;      // one record per control tick
    std::vector<MinuteSummary> minutes;  // one row per profile slot
    Eigen::VectorXd bus_v_min;           // daily extremes per non-slack bus
    Eigen::VectorXd bus_v_max;
    bool plant_diverged = false;
};

/// Static closed-loop experiment; thin wrapper over run_closed_loop.
LoopResult run_static(const FeederNetwork& net, const GraphMatrices& gm,
                      const ControlConfig& cfg, Plant plant, int max_iter, double tol = 1e-8);

/// Full time-series replay. Per profile slot: injections and VAR limits are
/// refreshed and the carried-over setpoints re-projected; per control tick:
/// plant solve, measurement, control step. Deterministic end to end.
DynamicResult run_dynamic(const FeederNetwork& net, const GraphMatrices& gm,
                          const DynamicScenario& scen, const DynamicControl& ctrl, Plant plant);

/// Summary JSON text for a dynamic run (per-minute rows + daily per-bus
/// voltage extremes).
std::string dynamic_summary_json(const DynamicResult& result);

} // namespace vvc
