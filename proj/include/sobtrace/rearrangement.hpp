#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sobtrace {

struct Sample {
    double value;
    double measure;
};

// |f| on a finite measure space, stored as value/measure pairs.
class SampledFunction {
public:
    SampledFunction() = default;
    explicit SampledFunction(std::vector<Sample> samples, std::string label = {});

    static SampledFunction from_arrays(const std::vector<double>& values,
                                       const std::vector<double>& measures,
                                       std::string label = {});

    const std::vector<Sample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double total_measure() const { return total_measure_; }
    double sup() const { return sup_; }
    const std::string& label() const { return label_; }

    SampledFunction scaled(double c) const;

private:
    std::vector<Sample> samples_;
    double total_measure_ = 0.0;
    double sup_ = 0.0;
    std::string label_;
};

// Right-continuous non-increasing step function on [0, total measure).
// levels[i] holds on [breakpoints[i], breakpoints[i+1]); levels are strictly
// decreasing because equal sample values are merged.
class StepRearrangement {
public:
    StepRearrangement() = default;
    StepRearrangement(std::vector<double> breakpoints, std::vector<double> levels);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& levels() const { return levels_; }
    std::size_t steps() const { return levels_.size(); }
    double total_measure() const { return breakpoints_.empty() ? 0.0 : breakpoints_.back(); }

private:
    std::vector<double> breakpoints_;
    std::vector<double> levels_;
};

// mu{|f| > xi}.
double distribution(const SampledFunction& f, double xi);

// lambda{t : f*(t) > xi}, read off the step function.
double distribution(const StepRearrangement& r, double xi);

StepRearrangement rearrange(const SampledFunction& f);

double evaluate_rearrangement(const StepRearrangement& r, double t);

void write_csv(std::ostream& out, const SampledFunction& f);
void write_csv(std::ostream& out, const StepRearrangement& r);
SampledFunction read_sampled_csv(std::istream& in, std::string label = {});
StepRearrangement read_step_csv(std::istream& in);

// Shortest round-trip representation used by every text output.
std::string format_number(double x);

}  // namespace sobtrace
