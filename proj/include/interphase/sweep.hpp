#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "interphase/assemblage.hpp"
#include "interphase/util.hpp"

namespace interphase {

// Known curve selectors, in the canonical column order used by the CSV writer.
inline const std::vector<std::string>& curve_names() {
    static const std::vector<std::string> names = {"exact", "approx", "reference",
                                                   "high_limit", "low_limit"};
    return names;
}

// A sweep evaluates the selected effective-conductivity curves over a
// log-spaced grid of intermediate-layer conductivities sigma2.
struct SweepConfig {
    std::string name;  // label used in plot titles and CSV metadata
    double sigma1 = 1.0;
    double sigma3 = 1.0;
    double r1 = 3.0;
    double r3 = 4.0;
    double theta2 = 0.0;
    double sigma2_min = 1e-2;
    double sigma2_max = 1e2;
    int points = 121;
    std::vector<std::string> curves = curve_names();

    double theta1() const { return std::pow(r1 / r3, 3); }
    double layer_thickness() const { return radius_from_fraction(r1, r3, theta2) - r1; }

    void validate() const {
        require(std::isfinite(sigma1) && sigma1 > 0, "sigma1 must be positive");
        require(std::isfinite(sigma3) && sigma3 > 0, "sigma3 must be positive");
        require(std::isfinite(r1) && std::isfinite(r3) && r1 > 0 && r3 > r1,
                "radii must satisfy 0 < r1 < r3");
        require(std::isfinite(theta2) && theta2 >= 0, "theta2 must be nonnegative");
        require(theta1() + theta2 < 1.0, "theta1 + theta2 must be below 1");
        require(std::isfinite(sigma2_min) && sigma2_min > 0, "sigma2_min must be positive");
        require(sigma2_max >= sigma2_min, "sigma2_max must be at least sigma2_min");
        require(points >= 2, "a sweep needs at least two points");
        require(!curves.empty(), "at least one curve must be selected");
        for (const auto& c : curves) {
            const auto& known = curve_names();
            require(std::find(known.begin(), known.end(), c) != known.end(),
                    "unknown curve selector: " + c);
        }
        radius_from_fraction(r1, r3, theta2);  // rejects infeasible layer fractions
    }
};

inline SweepConfig parse_sweep_config(const nlohmann::json& j) {
    SweepConfig cfg;
    cfg.name = j.value("name", std::string("sweep"));
    cfg.sigma1 = j.at("sigma1").get<double>();
    cfg.sigma3 = j.at("sigma3").get<double>();
    cfg.r1 = j.value("r1", cfg.r1);
    cfg.r3 = j.value("r3", cfg.r3);
    cfg.theta2 = j.at("theta2").get<double>();
    cfg.sigma2_min = j.at("sigma2_min").get<double>();
    cfg.sigma2_max = j.at("sigma2_max").get<double>();
    cfg.points = j.value("points", cfg.points);
    if (j.contains("theta1")) {
        // theta1 is redundant with (r1/r3)^3; if present it must agree.
        double given = j.at("theta1").get<double>();
        double derived = std::pow(cfg.r1 / cfg.r3, 3);
        require(std::abs(given - derived) <= 1e-9 * std::max(given, derived),
                "theta1 is inconsistent with (r1/r3)^3");
    }
    if (j.contains("curves")) cfg.curves = j.at("curves").get<std::vector<std::string>>();
    cfg.validate();
    return cfg;
}

inline SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("bad JSON in " + path + ": " + e.what());
    }
    try {
        return parse_sweep_config(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad config " + path + ": " + e.what());
    }
}

struct SweepRow {
    double sigma2 = 0;
    std::optional<double> exact;
    std::optional<double> approx;
    std::optional<double> reference;
    std::optional<double> high_limit;
    std::optional<double> low_limit;
    bool outside_band = false;  // sigma2 outside the intermediate-contrast band

    std::optional<double> value(const std::string& curve) const {
        if (curve == "exact") return exact;
        if (curve == "approx") return approx;
        if (curve == "reference") return reference;
        if (curve == "high_limit") return high_limit;
        if (curve == "low_limit") return low_limit;
        throw std::invalid_argument("unknown curve selector: " + curve);
    }
};

inline int thread_count_from_env() {
    const char* env = std::getenv("INTERPHASE_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end == nullptr || *end != '\0' || n < 1 || n > 1024)
        throw std::invalid_argument("INTERPHASE_THREADS must be an integer in [1, 1024]");
    return static_cast<int>(n);
}

inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const double t1 = cfg.theta1();
    const double t3 = 1.0 - t1 - cfg.theta2;
    const double h = cfg.layer_thickness();

    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(cfg.points) + 1);
    for (int i = 0; i < cfg.points; ++i) {
        double u = static_cast<double>(i) / (cfg.points - 1);
        samples.push_back(cfg.sigma2_min * std::pow(cfg.sigma2_max / cfg.sigma2_min, u));
    }
    // Guarantee a sample exactly at sigma2 == sigma3 (where all three formulas
    // coincide) whenever it falls inside the sweep range.
    if (cfg.sigma3 >= cfg.sigma2_min && cfg.sigma3 <= cfg.sigma2_max &&
        std::find(samples.begin(), samples.end(), cfg.sigma3) == samples.end())
        samples.push_back(cfg.sigma3);
    std::sort(samples.begin(), samples.end());

    auto selected = [&](const char* name) {
        return std::find(cfg.curves.begin(), cfg.curves.end(), name) != cfg.curves.end();
    };
    const bool w_exact = selected("exact"), w_approx = selected("approx"),
               w_ref = selected("reference"), w_high = selected("high_limit"),
               w_low = selected("low_limit");

    std::vector<SweepRow> rows(samples.size());
    auto eval_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            SweepRow& row = rows[i];
            row.sigma2 = samples[i];
            if (w_exact)
                row.exact = exact_sigma_star(cfg.sigma1, row.sigma2, cfg.sigma3, t1, cfg.theta2);
            if (w_approx)
                row.approx =
                    approx_sigma_star(cfg.sigma1, row.sigma2, cfg.sigma3, t1, cfg.r1, h);
            if (w_ref) row.reference = reference_sigma_star(cfg.sigma1, cfg.sigma3, t1);
            if (w_high)
                row.high_limit =
                    high_contrast_limit(cfg.sigma1, cfg.sigma3, t3, cfg.theta2 * row.sigma2);
            if (w_low)
                row.low_limit =
                    low_contrast_limit(cfg.sigma1, cfg.sigma3, t3, row.sigma2 / cfg.theta2);
            row.outside_band = !sigma2_in_intermediate_band(cfg.sigma1, row.sigma2, cfg.sigma3);
        }
    };

    const int n_threads =
        std::min<int>(thread_count_from_env(), static_cast<int>(rows.size()));
    if (n_threads <= 1) {
        eval_range(0, rows.size());
    } else {
        std::vector<std::thread> workers;
        std::size_t chunk = (rows.size() + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            std::size_t begin = static_cast<std::size_t>(t) * chunk;
            std::size_t end = std::min(rows.size(), begin + chunk);
            if (begin >= end) break;
            workers.emplace_back(eval_range, begin, end);
        }
        for (auto& w : workers) w.join();
    }
    return rows;
}

namespace detail {

inline std::string format_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace detail

// CSV layout: '#'-prefixed metadata lines (key=value), one header line with
// column names, then one line per row. Values carry 17 significant digits so
// a parse/write round trip is bit-exact.
inline void write_sweep_csv(std::ostream& os, const SweepConfig& cfg,
                            const std::vector<SweepRow>& rows) {
    os << "# name=" << cfg.name << '\n';
    os << "# sigma1=" << detail::format_full(cfg.sigma1) << '\n';
    os << "# sigma3=" << detail::format_full(cfg.sigma3) << '\n';
    os << "# r1=" << detail::format_full(cfg.r1) << '\n';
    os << "# r3=" << detail::format_full(cfg.r3) << '\n';
    os << "# theta1=" << detail::format_full(cfg.theta1()) << '\n';
    os << "# theta2=" << detail::format_full(cfg.theta2) << '\n';
    os << "# layer_thickness=" << detail::format_full(cfg.layer_thickness()) << '\n';
    os << "sigma2";
    for (const auto& c : curve_names())
        if (std::find(cfg.curves.begin(), cfg.curves.end(), c) != cfg.curves.end()) os << ',' << c;
    os << ",outside_band\n";
    for (const auto& row : rows) {
        os << detail::format_full(row.sigma2);
        for (const auto& c : curve_names()) {
            if (std::find(cfg.curves.begin(), cfg.curves.end(), c) == cfg.curves.end()) continue;
            auto v = row.value(c);
            os << ',' << detail::format_full(v.value());
        }
        os << ',' << (row.outside_band ? 1 : 0) << '\n';
    }
}

inline void write_sweep_csv(const std::string& path, const SweepConfig& cfg,
                            const std::vector<SweepRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_sweep_csv(os, cfg, rows);
    if (!os) throw std::runtime_error("write failed: " + path);
}

struct CsvTable {
    std::vector<std::string> metadata;  // '#' lines with the marker stripped
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline CsvTable parse_csv(std::istream& is, const std::string& origin) {
    CsvTable table;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.find_first_not_of(" \t", 1);
            table.metadata.push_back(start == std::string::npos ? "" : line.substr(start));
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.push_back("");
        if (!have_header) {
            for (const auto& f : fields)
                if (f.empty()) fail("empty column name in header");
            table.columns = fields;
            have_header = true;
            continue;
        }
        if (fields.size() != table.columns.size())
            fail("expected " + std::to_string(table.columns.size()) + " fields, got " +
                 std::to_string(fields.size()));
        std::vector<double> values;
        values.reserve(fields.size());
        for (const auto& f : fields) {
            const char* s = f.c_str();
            char* end = nullptr;
            double v = std::strtod(s, &end);
            if (end == s || *end != '\0' || !std::isfinite(v))
                fail("cannot parse numeric field '" + f + "'");
            values.push_back(v);
        }
        table.rows.push_back(std::move(values));
    }
    if (!have_header) throw std::runtime_error(origin + ": no header line found");
    if (table.rows.empty()) throw std::runtime_error(origin + ": no data rows");
    return table;
}

inline CsvTable parse_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return parse_csv(is, path);
}

}  // namespace interphase
