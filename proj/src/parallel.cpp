#include "bcrecon/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bcrecon {

std::size_t default_thread_count() {
  if (const char* env = std::getenv("BCRECON_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
      // fall through to auto
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t resolve_threads(std::size_t requested) {
  return requested == 0 ? default_thread_count() : requested;
}

}  // namespace bcrecon
