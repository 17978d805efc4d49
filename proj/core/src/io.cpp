#include "scalazone/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "scalazone/error.hpp"

namespace scalazone {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string where(const std::string& source, int line) {
    return source + ":" + std::to_string(line) + ": ";
}

double parse_field(const std::string& text, const std::string& source, int line) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw ValidationError(where(source, line) + "unparseable number '" + text + "'");
    }
    return value;
}

}  // namespace

Dataset parse_dataset_csv(std::istream& in, const std::string& source, std::optional<double> baseline) {
    std::string raw;
    int line_no = 0;
    int n_col = -1, x_col = -1;
    std::size_t columns = 0;
    std::vector<Measurement> points;
    std::set<double> seen;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line, ',');
        if (n_col < 0) {
            columns = fields.size();
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const std::string name = lower(fields[i]);
                if (name == "n" && n_col < 0) n_col = static_cast<int>(i);
                else if (name == "x" && x_col < 0) x_col = static_cast<int>(i);
                else throw ValidationError(where(source, line_no) + "unknown column '" + fields[i] + "'");
            }
            if (n_col < 0 || x_col < 0) {
                throw ValidationError(where(source, line_no) + "header must name columns 'n' and 'x'");
            }
            continue;
        }
        if (fields.size() != columns) {
            throw ValidationError(where(source, line_no) + "expected " + std::to_string(columns) + " fields");
        }
        const double n = parse_field(fields[static_cast<std::size_t>(n_col)], source, line_no);
        const double x = parse_field(fields[static_cast<std::size_t>(x_col)], source, line_no);
        if (!(n >= 1.0)) throw ValidationError(where(source, line_no) + "load n must be >= 1");
        if (!(x > 0.0)) throw ValidationError(where(source, line_no) + "throughput x must be > 0");
        if (!seen.insert(n).second) {
            throw ValidationError(where(source, line_no) + "duplicate n = " + fields[static_cast<std::size_t>(n_col)]);
        }
        points.push_back({n, x});
    }
    if (n_col < 0) throw ValidationError(source + ": missing header row 'n,x'");
    return Dataset(std::move(points), baseline);
}

Dataset ingest_csv(const std::filesystem::path& path, std::optional<double> baseline) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset '" + path.string() + "'");
    return parse_dataset_csv(in, path.string(), baseline);
}

PlotSeries curve_series(double alpha, double beta, int nmax, bool with_gustafson) {
    if (nmax < 1) throw ValidationError("nmax must be >= 1");
    const Amdahl amdahl(alpha);
    const Usl usl(alpha, beta);
    const Gustafson gustafson(alpha);
    PlotSeries out;
    for (int n = 0; n <= nmax; ++n) {
        PlotRow row;
        row.n = n;
        row.c_linear = eval_capacity(Linear{}, n);
        row.c_amdahl = eval_capacity(amdahl, n);
        row.c_usl = eval_capacity(usl, n);
        if (with_gustafson) row.c_gustafson = eval_capacity(gustafson, n);
        out.push_back(row);
    }
    return out;
}

PlotSeries zone_series(const ZoneReport& report) {
    std::set<double> grid;
    double nmax = 1.0;
    for (const auto& p : report.points) nmax = std::max(nmax, p.n);
    for (int n = 1; n <= static_cast<int>(std::floor(nmax)); ++n) grid.insert(n);
    for (const auto& p : report.points) grid.insert(p.n);

    PlotSeries out;
    for (double n : grid) {
        PlotRow row;
        row.n = n;
        row.c_linear = report.bounds.upper(n);
        row.c_amdahl = report.bounds.middle(n);
        row.c_usl = report.bounds.lower(n);
        const auto it = std::find_if(report.points.begin(), report.points.end(),
                                     [n](const ZonePoint& p) { return p.n == n; });
        if (it != report.points.end()) {
            row.c_data = it->capacity;
            row.zone = it->label;
        }
        out.push_back(row);
    }
    return out;
}

std::string format_exact(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_plot_series(std::ostream& out, const PlotSeries& series) {
    const bool gustafson =
        std::any_of(series.begin(), series.end(), [](const PlotRow& r) { return r.c_gustafson.has_value(); });
    out << "n,c_data,c_linear,c_amdahl,c_usl,zone" << (gustafson ? ",c_gustafson" : "") << '\n';
    for (const auto& row : series) {
        out << format_exact(row.n) << ',' << (row.c_data ? format_exact(*row.c_data) : "") << ','
            << format_exact(row.c_linear) << ',' << format_exact(row.c_amdahl) << ',' << format_exact(row.c_usl)
            << ',' << (row.zone ? std::string(to_string(*row.zone)) : "");
        if (gustafson) out << ',' << (row.c_gustafson ? format_exact(*row.c_gustafson) : "");
        out << '\n';
    }
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
    std::map<std::string, std::string> out;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(where(path.string(), line_no) + "expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ValidationError(where(path.string(), line_no) + "empty key");
        out[key] = value;
    }
    return out;
}

}  // namespace scalazone
