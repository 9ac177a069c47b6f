#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sobtrace/lorentz.hpp"

namespace sobtrace {

struct ReproductionConfig {
    double h = 0.0;             // 0 selects each reproduction's default resolution
    std::uint64_t seed = 0;
    int k_max = 12;
    ProbeSpec probes;
};

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ReproductionResult {
    std::string id;
    std::string title;
    bool pass = false;
    double seconds = 0.0;
    std::vector<CheckLine> checks;
    std::vector<std::string> info;  // reported values that carry no pass/fail
};

struct Reproduction {
    std::string id;
    int criterion;  // acceptance criterion number
    std::string title;
    std::function<ReproductionResult(const ReproductionConfig&)> run;
};

const std::vector<Reproduction>& reproduction_registry();

// Runs the selected reproductions (all when `only` is empty); unknown ids throw std::invalid_argument.
std::vector<ReproductionResult> run_reproductions(const ReproductionConfig& cfg,
                                                  const std::vector<std::string>& only = {});

std::string to_json(const std::vector<ReproductionResult>& results);
std::string format_table(const std::vector<ReproductionResult>& results);

}  // namespace sobtrace
