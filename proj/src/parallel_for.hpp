#pragma once

#include "lcmflow/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace lcmflow {

/// Runs body(row) for every row in [0, rows). Rows are split into contiguous
/// blocks, one per worker; each row is computed by exactly one thread so the
/// result never depends on the worker count.
template <typename Body>
void parallel_for_rows(int rows, Body&& body) {
    const int workers = std::min(thread_count(), rows);
    if (workers <= 1) {
        for (int r = 0; r < rows; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        const int begin = rows * t / workers;
        const int end = rows * (t + 1) / workers;
        pool.emplace_back([begin, end, &body] {
            for (int r = begin; r < end; ++r) body(r);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace lcmflow
