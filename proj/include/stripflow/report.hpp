#ifndef STRIPFLOW_REPORT_HPP
#define STRIPFLOW_REPORT_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace stripflow::report {

// One verification entry. `anchor` states the checked property as a formula.
struct CheckEntry {
    std::string name;
    std::string anchor;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string details;
};

struct Report {
    std::vector<CheckEntry> entries;
    nlohmann::json config_echo;

    void add(CheckEntry e) { entries.push_back(std::move(e)); }
    bool all_pass() const;
    void save(const std::string& path) const;
};

// deterministic CSV writer: fixed %.17g formatting, no locale dependence
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns) : cols_(std::move(columns)) {}
    void add_row(const std::vector<double>& row);
    void save(const std::string& path) const;

  private:
    std::vector<std::string> cols_;
    std::vector<std::vector<double>> rows_;
};

std::string format_double(double v);

} // namespace stripflow::report

#endif
