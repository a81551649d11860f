#include "magsim/table.hpp"

#include "magsim/error.hpp"
#include "magsim/format.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace magsim {

void ResultTable::add_column(std::string name, std::vector<double> values)
{
    if (!columns.empty() && values.size() != rows())
        throw ValidationError("column '" + name + "' length differs from the table");
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
}

void ResultTable::set_meta(const std::string& key, const std::string& value)
{
    for (auto& kv : metadata)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    metadata.emplace_back(key, value);
}

const std::string* ResultTable::meta(const std::string& key) const
{
    for (const auto& kv : metadata)
        if (kv.first == key) return &kv.second;
    return nullptr;
}

const std::vector<double>& ResultTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    throw ValidationError("no column named '" + name + "'");
}

void write_csv(std::ostream& os, const ResultTable& t)
{
    for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << v << '\n';
    for (std::size_t c = 0; c < t.names.size(); ++c) os << (c ? "," : "") << t.names[c];
    os << '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            os << (c ? "," : "") << format_double(t.columns[c][r]);
        os << '\n';
    }
}

ResultTable read_csv(std::istream& is)
{
    ResultTable t;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ", 2);
            if (colon == std::string::npos) throw IoError("malformed metadata line: " + line);
            t.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (!header) {
            t.names = cells;
            t.columns.assign(cells.size(), {});
            header = true;
            continue;
        }
        if (cells.size() != t.names.size()) throw IoError("row width differs from header");
        for (std::size_t c = 0; c < cells.size(); ++c) t.columns[c].push_back(parse_double(cells[c]));
    }
    return t;
}

void write_output(const ResultTable& t, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_csv(os, t);
    if (!os) throw IoError("write to '" + path + "' failed");
}

ResultTable read_table(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    return read_csv(is);
}

}  // namespace magsim
