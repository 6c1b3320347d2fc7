#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracjac {

/// Worker count used when a caller passes 0. Initialized from the
/// FRACJAC_WORKERS environment variable, falling back to the hardware
/// concurrency.
std::size_t default_workers();
void set_default_workers(std::size_t workers);

/// Calls body(begin, end) on contiguous blocks of [0, count). Blocks are
/// distributed over `workers` threads (0 = default_workers()). The body must
/// only write to disjoint outputs indexed inside its block.
void parallel_for_blocks(std::size_t count,
                         const std::function<void(std::size_t, std::size_t)>& body,
                         std::size_t workers = 0);

/// Pairwise (tree) summation. The result depends only on the input order,
/// never on how the inputs were produced.
double pairwise_sum(std::span<const double> values);

/// Evaluates f(i) for every i in [0, count) in parallel and returns the
/// pairwise sum of the results.
double parallel_sum(std::size_t count, const std::function<double(std::size_t)>& f,
                    std::size_t workers = 0);

}  // namespace fracjac
