#include "vvc/trace.hpp"

#include <cstdio>
#include <sstream>

#include "vvc/io.hpp"

namespace vvc {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace, bool full) {
    std::ostringstream out;
    out << "tick,minute,mismatch_norm,limits_hit";
    const Eigen::Index n = trace.empty() ? 0 : trace.front().q.size();
    if (full) {
        for (Eigen::Index j = 1; j <= n; ++j) out << ",q_" << j;
        for (Eigen::Index j = 1; j <= n; ++j) out << ",v_" << j;
    }
    out << "\n";
    for (const TraceRecord& rec : trace) {
        out << rec.tick << ',' << rec.minute << ',' << fmt(rec.mismatch_norm) << ','
            << rec.limits_hit;
        if (full) {
            for (Eigen::Index j = 0; j < n; ++j) out << ',' << fmt(rec.q(j));
            for (Eigen::Index j = 0; j < n; ++j) out << ',' << fmt(rec.v(j));
        }
        out << "\n";
    }
    write_text_atomic(path, out.str());
}

} // namespace vvc
