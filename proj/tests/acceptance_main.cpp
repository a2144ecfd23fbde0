#include "distdelay/acceptance.hpp"

#include <algorithm>
#include <iostream>

int main()
{
    const auto results = distdelay::acceptance::run({}, &std::cout);
    const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.pass; });
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
