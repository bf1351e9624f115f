#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace tbdkit {

/// Worker count: hardware concurrency, capped by TBDKIT_THREADS when set.
inline unsigned thread_count()
{
   unsigned n = std::max(1u, std::thread::hardware_concurrency());
   if (const char* env = std::getenv("TBDKIT_THREADS")) {
      try {
         const long cap = std::stol(env);
         if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
      } catch (...) {
         // malformed values are ignored
      }
   }
   return n;
}

/// Runs body(begin, end, chunk) over contiguous chunks of [0, count). Chunk
/// boundaries depend only on `count` and `chunks`, never on the worker count, so callers that
/// reduce per-chunk results in chunk order get reproducible output.
template <class Body>
void parallel_chunks(std::size_t count, std::size_t chunks, Body&& body)
{
   chunks = std::max<std::size_t>(1, std::min(chunks, count));
   const std::size_t step = (count + chunks - 1) / chunks;
   const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(chunks));
   auto run = [&](std::size_t c) {
      const std::size_t begin = c * step;
      const std::size_t end = std::min(count, begin + step);
      if (begin < end) body(begin, end, c);
   };
   if (workers <= 1) {
      for (std::size_t c = 0; c < chunks; ++c) run(c);
      return;
   }
   std::vector<std::thread> pool;
   pool.reserve(workers);
   for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
         for (std::size_t c = w; c < chunks; c += workers) run(c);
      });
   for (auto& t : pool) t.join();
}

} // namespace tbdkit
