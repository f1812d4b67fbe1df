#include "vvc/network.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vvc {

using json = nlohmann::json;

FeederNetwork::FeederNetwork(std::vector<Bus> buses, std::vector<Line> lines, double v0,
                             double s_base_mva, double v_base_kv)
    : buses_(std::move(buses)),
      lines_(std::move(lines)),
      v0_(v0),
      s_base_mva_(s_base_mva),
      v_base_kv_(v_base_kv) {
    validate();
    meshed_ = n_lines() > n();
}

void FeederNetwork::validate() const {
    if (buses_.size() < 2) throw TopologyError("network needs at least two buses");
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        const Bus& b = buses_[i];
        if (b.id != static_cast<int>(i))
            throw InputError("bus ids must be contiguous 0..N; got id " + std::to_string(b.id) +
                             " at position " + std::to_string(i));
        if (b.q_min > b.q_max)
            throw ParameterError("bus " + std::to_string(b.id) + ": q_min > q_max");
        if (b.c < 0.0) throw ParameterError("bus " + std::to_string(b.id) + ": c must be >= 0");
        if (b.mu <= 0.0) throw ParameterError("bus " + std::to_string(b.id) + ": mu must be > 0");
    }
    const int nb = static_cast<int>(buses_.size());
    if (static_cast<int>(lines_.size()) < nb - 1)
        throw TopologyError("too few lines for a connected network");
    std::vector<std::vector<int>> adj(nb);
    for (std::size_t l = 0; l < lines_.size(); ++l) {
        const Line& ln = lines_[l];
        if (ln.from < 0 || ln.from >= nb || ln.to < 0 || ln.to >= nb)
            throw InputError("line " + std::to_string(l) + ": bus index out of range");
        if (ln.from == ln.to)
            throw ParameterError("line " + std::to_string(l) + ": from == to");
        if (ln.x <= 0.0)
            throw ParameterError("line " + std::to_string(l) + ": reactance must be > 0");
        if (ln.r < 0.0)
            throw ParameterError("line " + std::to_string(l) + ": resistance must be >= 0");
        adj[ln.from].push_back(ln.to);
        adj[ln.to].push_back(ln.from);
    }
    // connectivity from the slack
    std::vector<char> seen(nb, 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop();
        for (int w : adj[u])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                frontier.push(w);
            }
    }
    if (reached != nb) throw TopologyError("network graph is disconnected");
}

Eigen::VectorXd FeederNetwork::injections_p() const {
    Eigen::VectorXd v(n());
    for (int j = 1; j <= n(); ++j) v(j - 1) = buses_[j].p;
    return v;
}

Eigen::VectorXd FeederNetwork::loads_qc() const {
    Eigen::VectorXd v(n());
    for (int j = 1; j <= n(); ++j) v(j - 1) = buses_[j].qc;
    return v;
}

Eigen::VectorXd FeederNetwork::q_lower() const {
    Eigen::VectorXd v(n());
    for (int j = 1; j <= n(); ++j) v(j - 1) = buses_[j].q_min;
    return v;
}

Eigen::VectorXd FeederNetwork::q_upper() const {
    Eigen::VectorXd v(n());
    for (int j = 1; j <= n(); ++j) v(j - 1) = buses_[j].q_max;
    return v;
}

Eigen::VectorXd FeederNetwork::penalties() const {
    Eigen::VectorXd v(n());
    for (int j = 1; j <= n(); ++j) v(j - 1) = buses_[j].c;
    return v;
}

Eigen::VectorXd FeederNetwork::targets() const {
    Eigen::VectorXd v(n());
    for (int j = 1; j <= n(); ++j) v(j - 1) = buses_[j].mu;
    return v;
}

namespace {

double get_num(const json& obj, const char* key, double fallback, const std::string& ctx) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw InputError(ctx + ": field '" + key + "' must be a number");
    return v.get<double>();
}

} // namespace

FeederNetwork FeederNetwork::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("network file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InputError("network document must be a JSON object");
    for (const char* key : {"buses", "lines"})
        if (!doc.contains(key))
            throw InputError(std::string("network document: missing required key '") + key + "'");

    const double s_base = get_num(doc, "s_base_mva", 1.0, "network");
    const double v_base = get_num(doc, "v_base_kv", 12.0, "network");
    const double v0 = get_num(doc, "v0_pu", 1.0, "network");
    if (s_base <= 0.0) throw InputError("network: s_base_mva must be > 0");
    if (v_base <= 0.0) throw InputError("network: v_base_kv must be > 0");
    const double s_base_kva = s_base * 1000.0;
    const double z_base = v_base * v_base / s_base;  // ohm

    std::vector<Bus> buses;
    for (const json& jb : doc.at("buses")) {
        const std::string ctx = "bus entry " + std::to_string(buses.size());
        if (!jb.contains("id")) throw InputError(ctx + ": missing required key 'id'");
        Bus b;
        b.id = jb.at("id").get<int>();
        b.p = get_num(jb, "p_kw", 0.0, ctx) / s_base_kva;
        b.qc = get_num(jb, "q_load_kvar", 0.0, ctx) / s_base_kva;
        b.q_min = get_num(jb, "q_min_kvar", 0.0, ctx) / s_base_kva;
        b.q_max = get_num(jb, "q_max_kvar", 0.0, ctx) / s_base_kva;
        b.c = get_num(jb, "c", 0.0, ctx);
        b.mu = get_num(jb, "mu", 1.0, ctx);
        buses.push_back(b);
    }
    std::sort(buses.begin(), buses.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });

    std::vector<Line> lines;
    for (const json& jl : doc.at("lines")) {
        const std::string ctx = "line entry " + std::to_string(lines.size());
        for (const char* key : {"from", "to", "r_ohm", "x_ohm"})
            if (!jl.contains(key))
                throw InputError(ctx + ": missing required key '" + std::string(key) + "'");
        Line ln;
        ln.from = jl.at("from").get<int>();
        ln.to = jl.at("to").get<int>();
        ln.r = jl.at("r_ohm").get<double>() / z_base;
        ln.x = jl.at("x_ohm").get<double>() / z_base;
        lines.push_back(ln);
    }
    return FeederNetwork(std::move(buses), std::move(lines), v0, s_base, v_base);
}

FeederNetwork FeederNetwork::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open network file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

} // namespace vvc
