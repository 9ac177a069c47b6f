// Runs every acceptance criterion once and prints one PASS/FAIL line per criterion.

#include <cstdio>
#include <string>

#include "sobtrace/reproductions.hpp"

int main() {
    using namespace sobtrace;
    ReproductionConfig cfg;
    const auto results = run_reproductions(cfg);
    const auto& reg = reproduction_registry();
    int failed = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", r.pass ? "PASS" : "FAIL", reg[i].criterion, r.id.c_str(),
                    r.title.c_str(), r.seconds);
        for (const auto& c : r.checks)
            if (!c.pass) std::printf("     failed check: %s: %s\n", c.name.c_str(), c.detail.c_str());
        if (!r.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 1;
}
