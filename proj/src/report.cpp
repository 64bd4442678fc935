#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "genlab/cli.hpp"

namespace genlab {

const std::vector<std::string> kGenSweepHeader{"experiment_id", "route", "n",      "replicates", "seed",
                                               "estimate",      "stderr", "oracle", "bound",      "holds"};

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_real(std::optional<double> v) { return v ? format_real(*v) : std::string(); }

std::string format_bool(std::optional<bool> v) {
    if (!v) return "";
    return *v ? "true" : "false";
}

std::string to_csv(const Table& table) {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw std::invalid_argument("CSV row does not match the header");
        line(row);
    }
    return out.str();
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

void emit_csv(const Table& table, const std::string& path) { write_file(path, to_csv(table)); }

std::string verify_report_json(const std::vector<CheckResult>& checks) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json j;
        j["check_name"] = c.check_name;
        j["status"] = c.pass ? "pass" : "fail";
        // JSON has no infinities; non-finite residuals are written as strings.
        if (std::isfinite(c.residual))
            j["residual"] = c.residual;
        else
            j["residual"] = format_real(c.residual);
        j["tolerance"] = c.tolerance;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& content) { write_file(path, content); }

}  // namespace genlab
