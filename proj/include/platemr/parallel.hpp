#pragma once

#include <cstdint>

namespace platemr {

// Thread cap for the OpenMP kernels. Reads PLATE_MR_THREADS once; an
// explicit set_thread_limit() overrides it.
int thread_limit();
void set_thread_limit(int threads);

// SplitMix64 step; used to derive independent per-task seed streams so
// results do not depend on how work is split across threads.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace platemr
