// Release-gate runner: executes every check at full strength and prints one
// PASS/FAIL line per criterion.  The process exit status is the number of
// failed checks (0 = gate open).
#include <cstdlib>
#include <iostream>

#include "inlapf/checks.hpp"

int main(int argc, char** argv) {
    inlapf::checks::CheckOptions opts;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--quick") {
            opts.quick = true;
        } else {
            std::cerr << "usage: " << argv[0] << " [--quick]\n";
            return 64;
        }
    }

    std::vector<inlapf::checks::CheckResult> results;
    try {
        results = inlapf::checks::run_acceptance_checks(opts);
    } catch (const std::exception& e) {
        std::cerr << "release-gate run aborted: " << e.what() << "\n";
        return 70;
    }

    int failures = 0;
    for (const auto& r : results) {
        std::cout << inlapf::checks::format_result(r) << "\n";
        if (!r.pass) ++failures;
    }
    std::cout << (results.size() - static_cast<std::size_t>(failures)) << "/" << results.size()
              << " checks passed" << (opts.quick ? " (quick mode)" : "") << "\n";
    return failures;
}
