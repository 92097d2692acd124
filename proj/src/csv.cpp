#include "seqtreat/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace seqtreat {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> csv_header(const std::vector<std::string>& axes) {
    std::vector<std::string> h = axes;
    for (const char* c : {"seed", "regret", "modified_regret", "s_n", "t_i_json", "oos_arm", "oos_regret"}) {
        h.emplace_back(c);
    }
    return h;
}

namespace {

std::string t_i_json(const std::vector<std::uint64_t>& t) {
    std::string s = "\"[";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(t[i]);
    }
    return s + "]\"";
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw InvalidInput("bad number in CSV: '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw InvalidInput("bad integer in CSV: '" + s + "'");
    }
    return v;
}

std::vector<std::uint64_t> parse_t_i(const std::string& s) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw InvalidInput("bad t_i_json: '" + s + "'");
    std::vector<std::uint64_t> out;
    const std::string body = s.substr(1, s.size() - 2);
    if (body.empty()) return out;
    for (const auto& part : split_line(body)) out.push_back(parse_u64(part));
    return out;
}

}  // namespace

void write_csv(std::ostream& os, const RunSummary& summary) {
    const auto header = csv_header(summary.axes);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& cell : summary.cells) {
        std::string keys;
        for (const auto& a : summary.axes) {
            if (a == "n") keys += std::to_string(cell.key.n.value_or(0));
            if (a == "D") keys += std::to_string(cell.key.D.value_or(0));
            if (a == "P") keys += std::to_string(cell.key.P.value_or(0));
            if (a == "gap") keys += format_double(cell.key.gap.value_or(0.0));
            keys += ',';
        }
        for (const auto& r : cell.reps) {
            os << keys << r.seed << ',';
            if (r.error) {
                os << ",,,,,\n";
                continue;
            }
            os << format_double(r.regret) << ',';
            if (r.modified_regret) os << format_double(*r.modified_regret);
            os << ',' << r.s_n << ',' << t_i_json(r.t_i) << ',';
            if (r.oos_arm) os << *r.oos_arm;
            os << ',';
            if (r.oos_regret) os << format_double(*r.oos_regret);
            os << '\n';
        }
    }
}

void write_csv_file(const std::string& path, const RunSummary& summary) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("cannot write '" + path + "'");
    write_csv(os, summary);
    if (!os) throw InvalidInput("write to '" + path + "' failed");
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw InvalidInput("CSV has no column '" + name + "'");
}

CsvTable read_csv_table(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("CSV is empty");
    t.header = split_line(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto row = split_line(line);
        if (row.size() != t.header.size()) throw InvalidInput("CSV row has the wrong number of fields");
        t.rows.push_back(std::move(row));
    }
    return t;
}

RunSummary read_csv(std::istream& is) {
    const CsvTable t = read_csv_table(is);
    RunSummary s;
    const std::size_t fixed = csv_header({}).size();
    if (t.header.size() < fixed) throw InvalidInput("CSV header is too short");
    const std::size_t k = t.header.size() - fixed;
    s.axes.assign(t.header.begin(), t.header.begin() + static_cast<std::ptrdiff_t>(k));
    if (csv_header(s.axes) != t.header) throw InvalidInput("CSV header does not match the schema");

    for (const auto& row : t.rows) {
        GridPoint key;
        for (std::size_t a = 0; a < k; ++a) {
            const auto& name = s.axes[a];
            if (name == "n") key.n = parse_u64(row[a]);
            else if (name == "D") key.D = parse_u64(row[a]);
            else if (name == "P") key.P = parse_u64(row[a]);
            else if (name == "gap") key.gap = parse_double(row[a]);
            else throw InvalidInput("unknown grid axis '" + name + "'");
        }
        ReplicationResult r;
        r.seed = parse_u64(row[k]);
        if (row[k + 1].empty()) {
            r.error = "failed";
        } else {
            r.regret = parse_double(row[k + 1]);
            if (!row[k + 2].empty()) r.modified_regret = parse_double(row[k + 2]);
            r.s_n = parse_u64(row[k + 3]);
            r.t_i = parse_t_i(row[k + 4]);
            if (!row[k + 5].empty()) r.oos_arm = static_cast<TreatmentId>(parse_u64(row[k + 5]));
            if (!row[k + 6].empty()) r.oos_regret = parse_double(row[k + 6]);
        }
        auto it = std::find_if(s.cells.begin(), s.cells.end(),
                               [&](const CellResult& c) { return c.key == key; });
        if (it == s.cells.end()) {
            s.cells.push_back({key, {}, {}});
            it = s.cells.end() - 1;
        }
        it->reps.push_back(std::move(r));
    }
    for (auto& c : s.cells) c.summary = aggregate(c.reps);
    return s;
}

RunSummary read_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot read '" + path + "'");
    return read_csv(is);
}

}  // namespace seqtreat
