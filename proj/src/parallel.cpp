#include "platemr/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace platemr {

namespace {

int threads_from_env() {
  const char* env = std::getenv("PLATE_MR_THREADS");
  int hw = omp_get_max_threads();
  if (env == nullptr) return hw;
  try {
    int v = std::stoi(env);
    if (v >= 1) return v < hw ? v : hw;
  } catch (...) {
  }
  return hw;
}

std::atomic<int>& limit_slot() {
  static std::atomic<int> slot{threads_from_env()};
  return slot;
}

}  // namespace

int thread_limit() { return limit_slot().load(); }

void set_thread_limit(int threads) { limit_slot().store(threads < 1 ? 1 : threads); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace platemr
