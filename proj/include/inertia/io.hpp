#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "inertia/lyapunov.hpp"
#include "inertia/problems.hpp"
#include "inertia/solver.hpp"

namespace inertia {

using json = nlohmann::json;

/// Full double precision: 17 significant digits.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// CSV cell; NaN renders as an empty cell.
inline std::string csv_cell(double v) { return std::isnan(v) ? std::string() : fmt17(v); }

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    const std::size_t d = traj.states.empty() ? 0 : traj.states[0].x.size();
    os << "t";
    for (std::size_t i = 0; i < d; ++i) os << ",x" << i;
    for (std::size_t i = 0; i < d; ++i) os << ",v" << i;
    os << "\n";
    for (const auto& s : traj.states) {
        os << fmt17(s.t);
        for (double xi : s.x) os << "," << fmt17(xi);
        for (double vi : s.v) os << "," << fmt17(vi);
        os << "\n";
    }
    return os.str();
}

inline std::string energy_csv(const EnergyReport& rep) {
    std::ostringstream os;
    os << "t,W,h,hdot,E_lx,E_lp,gap,tsq_gap,norm_v\n";
    for (const auto& s : rep.samples) {
        os << fmt17(s.t) << "," << fmt17(s.w) << "," << csv_cell(s.h) << "," << csv_cell(s.hdot)
           << "," << csv_cell(s.e_lx) << "," << csv_cell(s.e_lp) << "," << csv_cell(s.gap) << ","
           << csv_cell(s.tsq_gap) << "," << fmt17(s.norm_v) << "\n";
    }
    return os.str();
}

inline std::string history_csv(const IterateHistory& hist) {
    std::ostringstream os;
    os << "k,F,gap,step_norm,k2gap,sum_k_gap,sum_k_step2\n";
    for (const auto& r : hist.records) {
        const double kk = static_cast<double>(r.k);
        os << r.k << "," << fmt17(r.f_value) << ","
           << (r.gap ? fmt17(*r.gap) : std::string()) << "," << fmt17(r.step_norm) << ","
           << (r.gap ? fmt17(kk * kk * *r.gap) : std::string()) << "," << fmt17(r.sum_k_gap) << ","
           << fmt17(r.sum_k_step2) << "\n";
    }
    return os.str();
}

inline std::string diagnostics_csv(const DiscreteDiagnostics& d) {
    std::ostringstream os;
    os << "k,k2gap,cummax_k2gap,k_step,sum_k_gap,sum_k_step2,discrete_energy\n";
    for (std::size_t i = 0; i < d.k.size(); ++i) {
        os << d.k[i] << "," << csv_cell(d.k2gap[i]) << "," << csv_cell(d.cummax_k2gap[i]) << ","
           << fmt17(d.k_step[i]) << "," << fmt17(d.sum_k_gap[i]) << "," << fmt17(d.sum_k_step2[i])
           << "," << csv_cell(d.discrete_energy[i]) << "\n";
    }
    return os.str();
}

inline json rate_fit_json(const RateFit& fit) {
    json j;
    j["exponent"] = fit.exponent;
    j["intercept"] = fit.intercept;
    j["window"] = {fit.window_lo, fit.window_hi};
    j["residual"] = fit.residual;
    j["envelope"] = fit.envelope_used;
    j["defined"] = fit.defined;
    if (!fit.note.empty()) j["note"] = fit.note;
    return j;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }

    std::vector<double> column_values(std::size_t idx) const {
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(idx < r.size() ? r[idx] : std::numeric_limits<double>::quiet_NaN());
        return v;
    }
};

struct CsvError : std::runtime_error {
    long line;
    CsvError(long line_number, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
          line(line_number) {}
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError(0, "cannot open " + path);
    CsvTable table;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            cells.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (line_number == 1) {
            table.header = cells;
            continue;
        }
        if (cells.size() != table.header.size())
            throw CsvError(line_number, "expected " + std::to_string(table.header.size()) +
                                            " cells, got " + std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            if (c.empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            try {
                std::size_t used = 0;
                row.push_back(std::stod(c, &used));
                if (used != c.size()) throw std::invalid_argument(c);
            } catch (const std::exception&) {
                throw CsvError(line_number, "not a number: '" + c + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw CsvError(1, "missing header");
    return table;
}

/// Problem-spec file: JSON object {family, params?, seed?, dim?}.
inline CompositeProblem problem_from_spec_json(const json& spec) {
    if (!spec.is_object()) throw std::invalid_argument("problem spec: expected a JSON object");
    if (!spec.contains("family")) throw std::invalid_argument("problem spec: missing 'family'");
    std::map<std::string, double> params;
    if (spec.contains("params")) {
        if (!spec["params"].is_object())
            throw std::invalid_argument("problem spec: 'params' must be an object");
        for (auto it = spec["params"].begin(); it != spec["params"].end(); ++it)
            params[it.key()] = it.value().get<double>();
    }
    if (spec.contains("seed")) params["seed"] = spec["seed"].get<double>();
    if (spec.contains("dim")) params["dim"] = spec["dim"].get<double>();
    return catalog(spec["family"].get<std::string>(), params);
}

inline CompositeProblem load_problem_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem spec: " + path);
    json spec;
    try {
        in >> spec;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("problem spec " + path + ": " + e.what());
    }
    return problem_from_spec_json(spec);
}

}  // namespace inertia
