#pragma once

#include <cstddef>
#include <functional>

namespace matte {

/// Upper bound on worker threads used by the library. Defaults to the
/// MATTE_THREADS environment variable when set, else hardware concurrency.
int worker_count();
void set_worker_count(int n);

/// Runs `fn(chunk)` for chunk in [0, chunks). Chunks are distributed over the
/// worker pool; callers own the reduction order, so results never depend on
/// how many workers ran.
void parallel_for(std::size_t chunks, const std::function<void(std::size_t)>& fn);

/// Rows per work chunk. Fixed, so chunked reductions are bit-identical for
/// every worker count.
inline constexpr int kRowsPerChunk = 8;

inline std::size_t row_chunks(int rows) {
  return static_cast<std::size_t>((rows + kRowsPerChunk - 1) / kRowsPerChunk);
}

}  // namespace matte
