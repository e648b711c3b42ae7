#include "stripflow/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stripflow::report {

bool Report::all_pass() const {
    for (const CheckEntry& e : entries)
        if (!e.pass) return false;
    return true;
}

void Report::save(const std::string& path) const {
    nlohmann::json j;
    j["config"] = config_echo;
    j["all_pass"] = all_pass();
    j["checks"] = nlohmann::json::array();
    for (const CheckEntry& e : entries) {
        nlohmann::json je;
        je["name"] = e.name;
        je["anchor"] = e.anchor;
        je["pass"] = e.pass;
        je["value"] = e.value;
        je["threshold"] = e.threshold;
        if (!e.details.empty()) je["details"] = e.details;
        j["checks"].push_back(std::move(je));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::string format_double(double v) {
    char buf[40];
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::add_row(const std::vector<double>& row) {
    if (row.size() != cols_.size()) throw std::invalid_argument("CsvWriter: column count mismatch");
    rows_.push_back(row);
}

void CsvWriter::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (size_t i = 0; i < cols_.size(); ++i) out << (i ? "," : "") << cols_[i];
    out << "\n";
    for (const auto& r : rows_) {
        for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
        out << "\n";
    }
}

} // namespace stripflow::report
