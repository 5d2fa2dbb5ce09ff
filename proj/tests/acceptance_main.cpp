// Acceptance suite runner: one line per criterion, exit code counts the
// failures.
#include "acceptance.hpp"

int main() {
    const auto results = qot::run_acceptance(42);
    return qot::print_acceptance(results);
}
