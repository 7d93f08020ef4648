#pragma once

#include <cstddef>
#include <functional>

namespace cassi {

/// Worker count for internal loops. Read once from CASSI_NUM_THREADS;
/// defaults to 1. Results never depend on it: loops only split independent
/// work items, and every reduction keeps its sequential order.
std::size_t thread_count();

/// Overrides the worker count for the process (0 restores the env default).
void set_thread_count(std::size_t n);

/// Runs fn(i) for i in [0, n), statically partitioned over thread_count()
/// workers. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cassi
