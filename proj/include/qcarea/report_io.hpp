#pragma once

#include <ostream>
#include <vector>

#include <json.hpp>

#include "qcarea/verifier.hpp"

namespace qcarea {

/// Serialized reports omit the runtime field so that identical inputs and
/// seeds produce byte-identical output files.
inline nlohmann::json report_to_json(const DistortionReport& rep) {
    return nlohmann::json{
        {"theorem", rep.theorem}, {"p", rep.p},
        {"r", rep.r},             {"K", rep.big_k},
        {"k", rep.k},             {"grid_n", rep.grid_n},
        {"window", rep.window},   {"samples", rep.samples},
        {"seed", rep.seed},       {"lhs", rep.lhs},
        {"rhs", rep.rhs},         {"ratio", rep.ratio},
        {"std_error", rep.std_error}, {"mode", rep.mode},
        {"pass", rep.pass},       {"set_primal", rep.set_primal},
        {"set_mirror", rep.set_mirror}, {"note", rep.note},
    };
}

inline void write_reports_json(std::ostream& out, const std::vector<DistortionReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rep : reports) arr.push_back(report_to_json(rep));
    out << arr.dump(2) << '\n';
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

inline void write_reports_csv(std::ostream& out, const std::vector<DistortionReport>& reports) {
    out << "theorem,p,r,K,k,grid_n,window,samples,seed,lhs,rhs,ratio,std_error,mode,pass,"
           "set_primal,set_mirror,note\n";
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& rep : reports) {
        out << rep.theorem << ',' << num(rep.p) << ',' << num(rep.r) << ',' << num(rep.big_k)
            << ',' << num(rep.k) << ',' << rep.grid_n << ',' << num(rep.window) << ','
            << rep.samples << ',' << rep.seed << ',' << num(rep.lhs) << ',' << num(rep.rhs) << ','
            << num(rep.ratio) << ',' << num(rep.std_error) << ',' << rep.mode << ','
            << (rep.pass ? "true" : "false") << ',' << detail::csv_escape(rep.set_primal) << ','
            << detail::csv_escape(rep.set_mirror) << ',' << detail::csv_escape(rep.note) << '\n';
    }
}

}  // namespace qcarea
