#pragma once

namespace lcmflow {

/// Caps the number of worker threads used by per-row kernels. 1 (the default)
/// runs everything on the calling thread. Values < 1 reset to 1.
void set_thread_count(int threads);
int thread_count();

} // namespace lcmflow
