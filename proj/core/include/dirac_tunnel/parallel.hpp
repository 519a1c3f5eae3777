#pragma once

#include <cstddef>
#include <functional>

namespace dirac_tunnel {

/// Worker threads to use: hardware concurrency, capped by the
/// DIRAC_TUNNEL_THREADS environment variable when it holds a positive integer.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Indices are split into contiguous blocks, one
/// per worker; calls made from inside a worker run serially. The first
/// exception thrown by any worker is rethrown here.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dirac_tunnel
