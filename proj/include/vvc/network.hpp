#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vvc/errors.hpp"

namespace vvc {

/// One feeder bus. Bus 0 is the substation (slack) and carries no control
/// variables; all electrical quantities are per unit on the system base.
struct Bus {
    int id = 0;
    double p = 0.0;      ///< real power injection (negative for load)
    double qc = 0.0;     ///< reactive load consumption
    double q_min = 0.0;  ///< lower inverter VAR injection bound
    double q_max = 0.0;  ///< upper inverter VAR injection bound
    double c = 0.0;      ///< VAR supply penalty coefficient, >= 0
    double mu = 1.0;     ///< target voltage magnitude
};

/// Series line segment between two buses, p.u. impedance. Reactance must be
/// strictly positive so the reactance-weighted Laplacian stays invertible.
struct Line {
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.0;
};

/// A connected distribution feeder. Buses are indexed 0..N with 0 = slack;
/// topology may be a tree (L == N) or meshed (L > N). Immutable after
/// construction and safe to share across threads.
class FeederNetwork {
public:
    FeederNetwork(std::vector<Bus> buses, std::vector<Line> lines, double v0 = 1.0,
                  double s_base_mva = 1.0, double v_base_kv = 12.0);

    /// Parse the JSON network document (physical units; converted to p.u. here).
    static FeederNetwork from_json_text(const std::string& text);
    static FeederNetwork from_json_file(const std::string& path);

    int n() const { return static_cast<int>(buses_.size()) - 1; }
    int n_lines() const { return static_cast<int>(lines_.size()); }
    bool meshed() const { return meshed_; }
    double v0() const { return v0_; }
    double s_base_mva() const { return s_base_mva_; }
    double v_base_kv() const { return v_base_kv_; }

    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Line>& lines() const { return lines_; }

    // Per-bus vectors over the non-slack buses 1..N (entry j-1 <-> bus j).
    Eigen::VectorXd injections_p() const;
    Eigen::VectorXd loads_qc() const;
    Eigen::VectorXd q_lower() const;
    Eigen::VectorXd q_upper() const;
    Eigen::VectorXd penalties() const;
    Eigen::VectorXd targets() const;

private:
    void validate() const;

    std::vector<Bus> buses_;
    std::vector<Line> lines_;
    double v0_ = 1.0;
    double s_base_mva_ = 1.0;
    double v_base_kv_ = 12.0;
    bool meshed_ = false;
};

} // namespace vvc
