#pragma once

#include <functional>

namespace fidkit {

/// Run fn(0) ... fn(n_jobs - 1) on up to n_threads workers. Job indices are
/// handed out from a shared counter; callers must write results into
/// per-index slots so the outcome is independent of scheduling. The first
/// exception thrown by any job is rethrown after all workers finish.
void run_indexed_jobs(int n_jobs, int n_threads, const std::function<void(int)>& fn);

}  // namespace fidkit
