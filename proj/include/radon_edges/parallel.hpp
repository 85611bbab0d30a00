#pragma once

#include <cstddef>
#include <functional>

namespace radon_edges {

// Worker count: hardware concurrency capped by RADON_EDGES_THREADS when set.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// must not depend on the visiting order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace radon_edges
