// Minimal worker-pool helper. Tasks are indexed and side-effect only into
// their own slot, so results are identical for any worker count; a cap of 1
// reproduces the serial loop exactly.
#pragma once

#include <functional>

namespace moss {

void set_max_threads(int n);  // n <= 1 forces serial execution
int max_threads();

void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace moss
