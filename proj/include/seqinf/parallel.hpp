#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seqinf {

/// Serial is the reference path; Parallel distributes replications over
/// OpenMP threads. Both produce bit-identical results because every
/// replication owns its seed and writes only its own output slot.
enum class Execution { serial, parallel };

inline void set_thread_count(int threads)
{
#ifdef _OPENMP
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
#else
    (void)threads;
#endif
}

inline int thread_count()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Calls fn(i) for i in [0, count). If any call throws, the exception of the
/// lowest failing index is rethrown after the loop, whatever the schedule.
template <class Fn>
void for_each_index(std::size_t count, Execution exec, Fn&& fn)
{
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }

    std::exception_ptr failure;
    std::size_t failed_index = std::numeric_limits<std::size_t>::max();
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(seqinf_for_each_index)
            {
                if (static_cast<std::size_t>(i) < failed_index) {
                    failed_index = static_cast<std::size_t>(i);
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace seqinf
