// Verification gate: runs every criterion at its pinned tolerance and
// prints one pass/fail line each. Exit code is the number of failures.
#include <cstdio>

#include "breatherlab/acceptance.hpp"

int main() {
    const auto report = breatherlab::acceptance::run_all();
    int failures = 0;
    for (const auto& c : report.criteria) {
        std::printf("[%2d] %-4s %-34s measured=%-11.4g tol=%-9.4g %s\n", c.id,
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured, c.tolerance,
                    c.detail.c_str());
        if (!c.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(report.criteria.size()) - failures,
                report.criteria.size());
    return failures;
}
