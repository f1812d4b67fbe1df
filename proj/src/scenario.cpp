#include "vvc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "vvc/powerflow.hpp"

namespace vvc {

using json = nlohmann::json;

DailyProfile DailyProfile::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open profile file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("profile file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "minute,load_kw_per_home,pv_kw_per_home")
        throw InputError("profile header must be 'minute,load_kw_per_home,pv_kw_per_home'");

    DailyProfile prof;
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        double vals[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(ss, tok, ','))
                throw InputError("profile row " + std::to_string(row) + ": expected 3 columns");
            try {
                vals[k] = std::stod(tok);
            } catch (const std::exception&) {
                throw InputError("profile row " + std::to_string(row) + ": non-numeric field '" +
                                 tok + "'");
            }
        }
        prof.minutes.push_back(static_cast<int>(vals[0]));
        prof.load_kw.push_back(vals[1]);
        prof.pv_kw.push_back(vals[2]);
        ++row;
    }
    if (prof.minutes.empty()) throw InputError("profile has no data rows");
    for (std::size_t i = 0; i < prof.minutes.size(); ++i) {
        if (prof.minutes[i] != static_cast<int>(i))
            throw InputError("profile minutes must be 0,1,2,... (uniform one-minute spacing)");
        if (prof.pv_kw[i] < 0.0)
            throw ParameterError("profile minute " + std::to_string(i) + ": pv_kw must be >= 0");
        if (prof.load_kw[i] < 0.0)
            throw ParameterError("profile minute " + std::to_string(i) + ": load_kw must be >= 0");
    }
    return prof;
}

void DynamicScenario::validate(int n_buses) const {
    if (profile.size() == 0) throw ParameterError("scenario profile is empty");
    if (homes_per_bus.size() != n_buses)
        throw DimensionError("homes_per_bus length must equal the non-slack bus count");
    if ((homes_per_bus.array() < 0).any())
        throw ParameterError("homes_per_bus entries must be >= 0");
    if (pv_peak_kw <= 0.0 || inverter_rating_factor <= 0.0)
        throw ParameterError("pv rating parameters must be > 0");
    if (control_period_s <= 0.0 || profile_period_s <= 0.0)
        throw ParameterError("periods must be > 0");
    const double ratio = profile_period_s / control_period_s;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw ParameterError("control_period_s must divide profile_period_s");
}

int DynamicScenario::ticks_per_slot() const {
    return static_cast<int>(std::lround(profile_period_s / control_period_s));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> var_limits_at(const DynamicScenario& scen,
                                                          const FeederNetwork& net, int minute) {
    if (minute < 0 || minute >= scen.profile.size())
        throw ParameterError("var_limits_at: minute outside the profile range");
    const int n = net.n();
    const double s_rating = scen.inverter_rating_factor * scen.pv_peak_kw;  // kVA per home
    const double pv = scen.profile.pv_kw[minute];
    const double headroom_kvar = std::sqrt(std::max(s_rating * s_rating - pv * pv, 0.0));
    Eigen::VectorXd q_bar(n);
    for (int j = 0; j < n; ++j)
        q_bar(j) = scen.homes_per_bus(j) * headroom_kvar / (1000.0 * net.s_base_mva());
    return {-q_bar, q_bar};
}

LoopResult run_static(const FeederNetwork& net, const GraphMatrices& gm, const ControlConfig& cfg,
                      Plant plant, int max_iter, double tol) {
    return run_closed_loop(net, gm, cfg, plant, max_iter, tol);
}

namespace {

struct SlotInputs {
    Eigen::VectorXd p;
    Eigen::VectorXd qc;
    Eigen::VectorXd q_lo;
    Eigen::VectorXd q_hi;
};

SlotInputs slot_inputs(const FeederNetwork& net, const DynamicScenario& scen, int minute) {
    const int n = net.n();
    const double load = scen.profile.load_kw[minute];
    const double pv = scen.profile.pv_kw[minute];
    SlotInputs in;
    in.p.resize(n);
    in.qc.resize(n);
    for (int j = 0; j < n; ++j) {
        const double homes = scen.homes_per_bus(j);
        in.p(j) = homes * (pv - load) / (1000.0 * net.s_base_mva());
        in.qc(j) = homes * load * scen.load_q_ratio / (1000.0 * net.s_base_mva());
    }
    std::tie(in.q_lo, in.q_hi) = var_limits_at(scen, net, minute);
    return in;
}

ControlConfig slot_config(const FeederNetwork& net, const GraphMatrices& gm,
                          const DynamicControl& ctrl, const SlotInputs& in) {
    const int n = net.n();
    const Eigen::VectorXd mu = net.targets();
    switch (ctrl.mode) {
        case DynamicControl::Mode::Scaled:
            return make_scaled(gm.X, Eigen::VectorXd::Constant(n, ctrl.c), ctrl.epsilon, in.q_lo,
                               in.q_hi, mu);
        case DynamicControl::Mode::DelayedDroop: {
            // slope from the instantaneous limits: c_j = window / q̄_j
            Eigen::VectorXd c(n);
            for (int j = 0; j < n; ++j)
                c(j) = ctrl.droop_voltage_window / std::max(in.q_hi(j), 1e-9);
            return make_delayed_droop(c, ctrl.alpha, in.q_lo, in.q_hi, mu);
        }
        case DynamicControl::Mode::None:
            break;
    }
    throw ParameterError("slot_config: no controller for mode None");
}

int bound_hits(const Eigen::VectorXd& q, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    int hits = 0;
    for (Eigen::Index j = 0; j < q.size(); ++j)
        if (q(j) <= lo(j) + 1e-12 || q(j) >= hi(j) - 1e-12) ++hits;
    return hits;
}

} // namespace

DynamicResult run_dynamic(const FeederNetwork& net, const GraphMatrices& gm,
                          const DynamicScenario& scen, const DynamicControl& ctrl, Plant plant) {
    const int n = net.n();
    scen.validate(n);
    const int ticks = scen.ticks_per_slot();
    const Eigen::VectorXd mu = net.targets();

    std::unique_ptr<AcSolver> ac;
    if (plant == Plant::Ac) ac = std::make_unique<AcSolver>(net);

    DynamicResult out;
    out.bus_v_min = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    out.bus_v_max = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
    out.trace.reserve(static_cast<std::size_t>(scen.profile.size()) * ticks);

    ControlState state;
    state.t = 0;
    state.q = Eigen::VectorXd::Zero(n);
    long tick_counter = 0;

    for (int m = 0; m < scen.profile.size(); ++m) {
        const SlotInputs in = slot_inputs(net, scen, m);
        // carried-over setpoints must stay feasible when the limits shrink
        state.q = project(state.q, in.q_lo, in.q_hi);

        ControlConfig cfg;
        const bool controlled = ctrl.mode != DynamicControl::Mode::None;
        if (controlled) cfg = slot_config(net, gm, ctrl, in);

        Eigen::VectorXd vbar;
        if (plant == Plant::Linear) vbar = baseline_voltage(gm, in.p, in.qc, net.v0());

        Eigen::VectorXd v_cached;  // uncontrolled slots solve the plant once
        double minute_mismatch = 0.0;
        double minute_vmin = std::numeric_limits<double>::infinity();
        double minute_vmax = -std::numeric_limits<double>::infinity();

        for (int k = 0; k < ticks; ++k) {
            Eigen::VectorXd v_now;
            if (!controlled && v_cached.size() > 0) {
                v_now = v_cached;
            } else if (plant == Plant::Linear) {
                v_now = lindistflow_voltage(gm, state.q, vbar);
            } else {
                const AcSolution sol = ac->solve(in.p, state.q - in.qc, net.v0());
                if (!sol.converged) {
                    out.plant_diverged = true;
                    return out;
                }
                v_now = sol.v_mag.tail(n);
            }
            if (!controlled) v_cached = v_now;

            minute_mismatch = (v_now - mu).norm();
            minute_vmin = std::min(minute_vmin, v_now.minCoeff());
            minute_vmax = std::max(minute_vmax, v_now.maxCoeff());
            out.bus_v_min = out.bus_v_min.cwiseMin(v_now);
            out.bus_v_max = out.bus_v_max.cwiseMax(v_now);

            out.trace.push_back(TraceRecord{tick_counter++, m, minute_mismatch, state.q, v_now,
                                            bound_hits(state.q, in.q_lo, in.q_hi)});
            if (controlled) state = step(state, cfg, v_now);
        }

        out.minutes.push_back(MinuteSummary{m, minute_mismatch, minute_vmin, minute_vmax,
                                            bound_hits(state.q, in.q_lo, in.q_hi)});
    }
    return out;
}

std::string dynamic_summary_json(const DynamicResult& result) {
    json doc;
    doc["plant_diverged"] = result.plant_diverged;
    json rows = json::array();
    double mean_mismatch = 0.0;
    int undervolt = 0;
    for (const MinuteSummary& ms : result.minutes) {
        rows.push_back({{"minute", ms.minute},
                        {"mismatch_norm", ms.mismatch_norm},
                        {"v_min", ms.v_min},
                        {"v_max", ms.v_max},
                        {"limits_hit", ms.limits_hit}});
        mean_mismatch += ms.mismatch_norm;
        if (ms.v_min < 0.95) ++undervolt;
    }
    if (!result.minutes.empty()) mean_mismatch /= static_cast<double>(result.minutes.size());
    doc["minutes"] = std::move(rows);
    doc["daily_mean_mismatch"] = mean_mismatch;
    doc["undervoltage_minutes"] = undervolt;
    doc["bus_v_min"] = std::vector<double>(result.bus_v_min.data(),
                                           result.bus_v_min.data() + result.bus_v_min.size());
    doc["bus_v_max"] = std::vector<double>(result.bus_v_max.data(),
                                           result.bus_v_max.data() + result.bus_v_max.size());
    return doc.dump(2);
}

} // namespace vvc
