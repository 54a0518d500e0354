#include "pctmi/csv.hpp"

#include "pctmi/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace pctmi {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, std::size_t line) {
    if (cell.empty()) throw ParseError("line " + std::to_string(line) + ": missing value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line) + ": '" + cell + "' is not a finite number");
    }
    return v;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split(line));
    }
    if (rows.empty()) throw ParseError("empty CSV input");
    return rows;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)}); }

double median_step(std::vector<double> steps) {
    std::sort(steps.begin(), steps.end());
    return steps[steps.size() / 2];
}

Dataset read_wide(const std::vector<std::vector<std::string>>& rows) {
    const auto& header = rows.front();
    const bool has_time = !header.empty() && (header.front() == "time" || header.front() == "t");
    const std::size_t first = has_time ? 1 : 0;
    if (header.size() <= first) throw ParseError("CSV header names no series");
    Dataset data;
    for (std::size_t c = first; c < header.size(); ++c) data.series.push_back(TimeSeries{header[c], {}});
    std::vector<double> times;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw ParseError("line " + std::to_string(r + 1) + ": expected " + std::to_string(header.size()) + " cells");
        }
        if (has_time) times.push_back(parse_number(rows[r][0], r + 1));
        for (std::size_t c = first; c < header.size(); ++c) data.series[c - first].values.push_back(parse_number(rows[r][c], r + 1));
    }
    if (times.size() >= 2) {
        const double step = times[1] - times[0];
        if (!(step > 0)) throw ParseError("time column must increase");
        for (std::size_t i = 2; i < times.size(); ++i) {
            if (!close(times[i] - times[i - 1], step)) throw ParseError("time column is not evenly spaced");
        }
    }
    try {
        data.validate();
    } catch (const InvalidDataError& e) {
        throw ParseError(e.what());
    }
    return data;
}

Dataset read_long(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<double, double>>> obs;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3) throw ParseError("line " + std::to_string(r + 1) + ": expected series,time,value");
        const std::string& name = rows[r][0];
        if (name.empty()) throw ParseError("line " + std::to_string(r + 1) + ": empty series name");
        if (!obs.count(name)) order.push_back(name);
        obs[name].emplace_back(parse_number(rows[r][1], r + 1), parse_number(rows[r][2], r + 1));
    }
    if (order.empty()) throw ParseError("CSV has no observations");

    std::map<std::string, double> spacing;
    double unit = 0.0;
    double t0 = std::numeric_limits<double>::infinity();
    for (auto& [name, v] : obs) {
        std::sort(v.begin(), v.end());
        t0 = std::min(t0, v.front().first);
        if (v.size() < 2) throw ParseError("series '" + name + "' needs at least two observations");
        std::vector<double> steps;
        for (std::size_t i = 1; i < v.size(); ++i) steps.push_back(v[i].first - v[i - 1].first);
        const double step = median_step(steps);
        if (!(step > 0)) throw ParseError("series '" + name + "' has repeated time stamps");
        for (double s : steps) {
            if (!close(s, step)) throw ParseError("series '" + name + "' is not regularly sampled");
        }
        spacing[name] = step;
        unit = std::max(unit, step);
    }

    Dataset data;
    for (const auto& name : order) {
        const auto& v = obs[name];
        const double ratio = unit / spacing[name];
        const double rate = std::round(ratio);
        if (!close(ratio, rate)) {
            throw ParseError("series '" + name + "' spacing does not divide the slowest spacing evenly");
        }
        TimeSeries s;
        s.name = name;
        s.rate = static_cast<int>(rate);
        const double offset = (v.front().first - t0) / spacing[name];
        if (!close(offset, std::round(offset))) throw ParseError("series '" + name + "' starts off its sampling grid");
        s.start_time = Time(static_cast<std::int64_t>(std::llround(offset)), s.rate);
        for (const auto& [t, x] : v) s.values.push_back(x);
        data.series.push_back(std::move(s));
    }
    try {
        data.validate();
    } catch (const InvalidDataError& e) {
        throw ParseError(e.what());
    }
    return data;
}

}  // namespace

Dataset read_csv(std::istream& in, CsvLayout layout) {
    const auto rows = read_rows(in);
    if (layout == CsvLayout::Auto) {
        const auto& h = rows.front();
        layout = h.size() == 3 && h[0] == "series" && h[1] == "time" && h[2] == "value" ? CsvLayout::Long : CsvLayout::Wide;
    }
    return layout == CsvLayout::Long ? read_long(rows) : read_wide(rows);
}

Dataset read_csv_file(const std::string& path, CsvLayout layout) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_csv(in, layout);
}

void write_wide_csv(std::ostream& out, const Dataset& data) {
    std::size_t length = 0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        out << (s ? "," : "") << data[s].name;
        length = std::max(length, data[s].length());
    }
    out << "\n" << std::setprecision(17);
    for (std::size_t i = 0; i < length; ++i) {
        for (std::size_t s = 0; s < data.size(); ++s) {
            if (s) out << ",";
            if (i < data[s].length()) out << data[s].values[i];
        }
        out << "\n";
    }
}

void write_long_csv(std::ostream& out, const Dataset& data) {
    out << "series,time,value\n" << std::setprecision(17);
    for (const auto& s : data.series) {
        for (std::size_t i = 0; i < s.length(); ++i) {
            out << s.name << "," << boost::rational_cast<double>(s.time_at(i)) << "," << s.values[i] << "\n";
        }
    }
}

void write_csv(std::ostream& out, const Dataset& data) {
    bool aligned = data.size() > 0;
    for (const auto& s : data.series) {
        aligned = aligned && s.rate == data[0].rate && s.start_time == data[0].start_time && s.length() == data[0].length();
    }
    if (aligned && data[0].rate == 1) {
        write_wide_csv(out, data);
    } else {
        write_long_csv(out, data);
    }
}

}  // namespace pctmi
