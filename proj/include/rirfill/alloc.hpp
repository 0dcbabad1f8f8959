#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace rirfill {

// Denoiser activations are a few MB each and are reallocated every batch.
// glibc serves blocks that size with mmap/munmap, so training spends a third
// of its time in page faults; keeping them on the heap avoids that.
inline void keep_large_allocations_on_heap() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 32 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

}  // namespace rirfill
