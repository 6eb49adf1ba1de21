#include "lcd/image.hpp"
#include "lcd/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lcd {

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::HU:
      return "HU";
    case Unit::MuPerMm:
      return "mu_per_mm";
    case Unit::Normalized:
      return "normalized";
  }
  return "unknown";
}

Unit unit_from_string(std::string_view text) {
  if (text == "HU") return Unit::HU;
  if (text == "mu_per_mm") return Unit::MuPerMm;
  if (text == "normalized") return Unit::Normalized;
  throw std::invalid_argument("unknown unit tag: " + std::string(text));
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  const std::size_t n_threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(n_threads - 1);
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lcd
