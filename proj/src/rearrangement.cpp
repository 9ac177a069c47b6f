#include "sobtrace/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sobtrace {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

double parse_double(const std::string& text, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("csv line " + std::to_string(line_no) + ": cannot parse '" + text + "'");
    }
}

std::vector<std::pair<double, double>> read_two_column_csv(std::istream& in, const std::string& header) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty csv input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw std::invalid_argument("expected csv header '" + header + "', got '" + line + "'");
    std::vector<std::pair<double, double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 2) throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 2 columns");
        rows.emplace_back(parse_double(cells[0], line_no), parse_double(cells[1], line_no));
    }
    return rows;
}

}  // namespace

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

SampledFunction::SampledFunction(std::vector<Sample> samples, std::string label)
    : samples_(std::move(samples)), label_(std::move(label)) {
    if (samples_.empty()) throw std::invalid_argument("SampledFunction needs at least one sample");
    for (const auto& s : samples_) {
        if (!std::isfinite(s.value)) throw std::invalid_argument("SampledFunction: non-finite value");
        if (s.value < 0.0) throw std::invalid_argument("SampledFunction: negative value");
        if (!(s.measure > 0.0) || !std::isfinite(s.measure))
            throw std::invalid_argument("SampledFunction: measures must be positive and finite");
        total_measure_ += s.measure;
        sup_ = std::max(sup_, s.value);
    }
}

SampledFunction SampledFunction::from_arrays(const std::vector<double>& values,
                                             const std::vector<double>& measures, std::string label) {
    if (values.size() != measures.size()) throw std::invalid_argument("values and measures differ in length");
    std::vector<Sample> s(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) s[i] = {values[i], measures[i]};
    return SampledFunction(std::move(s), std::move(label));
}

SampledFunction SampledFunction::scaled(double c) const {
    if (c < 0.0) throw std::invalid_argument("scale factor must be nonnegative");
    std::vector<Sample> s = samples_;
    for (auto& x : s) x.value *= c;
    return SampledFunction(std::move(s), label_);
}

StepRearrangement::StepRearrangement(std::vector<double> breakpoints, std::vector<double> levels)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
    if (levels_.empty() || breakpoints_.size() != levels_.size() + 1)
        throw std::invalid_argument("StepRearrangement: need n levels and n+1 breakpoints");
    if (breakpoints_.front() != 0.0) throw std::invalid_argument("StepRearrangement: first breakpoint must be 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1]))
            throw std::invalid_argument("StepRearrangement: breakpoints must increase strictly");
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (!(levels_[i] >= 0.0) || !std::isfinite(levels_[i]))
            throw std::invalid_argument("StepRearrangement: levels must be finite and nonnegative");
        if (i > 0 && levels_[i] > levels_[i - 1])
            throw std::invalid_argument("StepRearrangement: levels must be non-increasing");
    }
}

double distribution(const SampledFunction& f, double xi) {
    if (!(xi >= 0.0)) throw std::invalid_argument("distribution: xi must be nonnegative");
    double m = 0.0;
    for (const auto& s : f.samples())
        if (s.value > xi) m += s.measure;
    return m;
}

double distribution(const StepRearrangement& r, double xi) {
    if (!(xi >= 0.0)) throw std::invalid_argument("distribution: xi must be nonnegative");
    const auto& lv = r.levels();
    // levels are decreasing; count how many exceed xi
    const auto it = std::partition_point(lv.begin(), lv.end(), [xi](double v) { return v > xi; });
    return r.breakpoints()[static_cast<std::size_t>(it - lv.begin())];
}

StepRearrangement rearrange(const SampledFunction& f) {
    std::vector<Sample> s = f.samples();
    std::stable_sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.value > b.value; });
    std::vector<double> breakpoints{0.0};
    std::vector<double> levels;
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size();) {
        const double level = s[i].value;
        while (i < s.size() && s[i].value == level) acc += s[i++].measure;
        levels.push_back(level);
        breakpoints.push_back(acc);
    }
    return StepRearrangement(std::move(breakpoints), std::move(levels));
}

double evaluate_rearrangement(const StepRearrangement& r, double t) {
    if (!(t >= 0.0) || !(t < r.total_measure()))
        throw std::invalid_argument("evaluate_rearrangement: t outside [0, total measure)");
    const auto& b = r.breakpoints();
    // largest i with b[i] <= t
    const auto it = std::upper_bound(b.begin(), b.end(), t);
    const auto i = static_cast<std::size_t>(it - b.begin()) - 1;
    return r.levels()[std::min(i, r.steps() - 1)];
}

void write_csv(std::ostream& out, const SampledFunction& f) {
    out << "value,measure\n";
    for (const auto& s : f.samples()) out << format_number(s.value) << ',' << format_number(s.measure) << '\n';
}

void write_csv(std::ostream& out, const StepRearrangement& r) {
    out << "t_break,level\n";
    for (std::size_t i = 0; i < r.steps(); ++i)
        out << format_number(r.breakpoints()[i]) << ',' << format_number(r.levels()[i]) << '\n';
    out << format_number(r.total_measure()) << ",0\n";
}

SampledFunction read_sampled_csv(std::istream& in, std::string label) {
    const auto rows = read_two_column_csv(in, "value,measure");
    std::vector<Sample> s;
    s.reserve(rows.size());
    for (const auto& [v, m] : rows) s.push_back({v, m});
    return SampledFunction(std::move(s), std::move(label));
}

StepRearrangement read_step_csv(std::istream& in) {
    const auto rows = read_two_column_csv(in, "t_break,level");
    if (rows.size() < 2) throw std::invalid_argument("step csv needs at least one step and the terminal row");
    std::vector<double> b, l;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        b.push_back(rows[i].first);
        if (i + 1 < rows.size()) l.push_back(rows[i].second);
    }
    return StepRearrangement(std::move(b), std::move(l));
}

}  // namespace sobtrace
