#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace subfourier {

// Shortest form that reads back to the same double; locale independent.
std::string format_double(double value);

// Minimal CSV emitter: header on construction, one numeric row per call.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string> columns);

    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
    std::size_t columns_;
};

// Reads a numeric CSV with a header line; used by tests and tools.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace subfourier
