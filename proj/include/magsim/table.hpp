#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace magsim {

struct ResultTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<std::pair<std::string, std::string>> metadata;  // emitted in order

    void add_column(std::string name, std::vector<double> values);
    void set_meta(const std::string& key, const std::string& value);
    const std::string* meta(const std::string& key) const;
    const std::vector<double>& column(const std::string& name) const;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

// `# key: value` lines, a header row, then data rows.
void write_csv(std::ostream& os, const ResultTable& t);
ResultTable read_csv(std::istream& is);

void write_output(const ResultTable& t, const std::string& path);
ResultTable read_table(const std::string& path);

}  // namespace magsim
