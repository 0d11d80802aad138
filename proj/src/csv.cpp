#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "tandem/data.hpp"
#include "tandem/error.hpp"

namespace tandem {

namespace {

// RFC-4180-style record reader: quoted fields may contain commas, escaped
// quotes ("") and embedded line breaks. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            fields.push_back(std::move(field));
            return true;
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            fields.push_back(std::move(field));
            return true;
        } else {
            field += c;
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

bool parse_number(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target, Task task) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_csv: cannot open \"" + path + "\"");

    std::vector<std::string> header;
    if (!read_record(in, header) || header.empty())
        throw Error("load_csv: \"" + path + "\" has no header row");

    // Strip a UTF-8 BOM if present.
    if (header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
        header[0].erase(0, 3);

    std::set<std::string> seen;
    for (const auto& name : header)
        if (!seen.insert(name).second)
            throw Error("load_csv: duplicate header name \"" + name + "\"");

    std::size_t target_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == target) target_col = i;
    if (target_col == header.size())
        throw Error("load_csv: missing target column \"" + target + "\"");

    Dataset d;
    d.task = task;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != target_col) d.columns.push_back(header[i]);

    std::vector<std::string> fields;
    std::vector<double> row(d.columns.size());
    std::size_t line = 1;  // header was line 1
    while (read_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != header.size())
            throw Error("load_csv: row " + std::to_string(line) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(header.size()));
        std::size_t j = 0;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double v = 0.0;
            if (!parse_number(fields[i], v))
                throw Error("load_csv: non-numeric cell at row " + std::to_string(line) +
                            ", column \"" + header[i] + "\" (value \"" + fields[i] + "\")");
            if (i == target_col)
                d.y.push_back(v);
            else
                row[j++] = v;
        }
        d.X.push_row(row);
    }

    if (d.n_rows() == 0) throw Error("load_csv: \"" + path + "\" has no data rows");
    d.validate();
    return d;
}

}  // namespace tandem
