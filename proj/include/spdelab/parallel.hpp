#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace spdelab {

/// Worker count used by `parallel_for`. Defaults to 1; results never depend on it.
void set_worker_count(int workers);
int worker_count();

/// Runs body(i) for i in [0, count). Each index is handled exactly once; the
/// caller owns any per-index output slot, so reductions stay order-fixed.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (balanced-tree) sum in index order.
double pairwise_sum(std::span<const double> values);

}  // namespace spdelab
