// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Byte accounting for numeric buffers. Every Vec64/Mat64 allocates through
// TrackingAllocator, so the tracker sees exactly the tensor storage the
// library creates (not std::string, maps, or other bookkeeping). Counting is
// always on; `enabled` only gates whether stats may be read, which keeps the
// current-bytes figure consistent when tracking is toggled mid-run.

#pragma once

#include <atomic>
#include <cstddef>
#include <new>

namespace rwkvlab {

struct AllocStats {
  std::size_t current_bytes = 0;
  std::size_t peak_bytes = 0;
};

class AllocTracker {
 public:
  static void record_alloc(std::size_t bytes) noexcept;
  static void record_free(std::size_t bytes) noexcept;

  static void set_enabled(bool on) noexcept;
  static bool enabled() noexcept;

  // Starts a new measurement window: peak := current.
  static void reset_peak() noexcept;

  // Throws Error(Unsupported) when tracking is disabled.
  static AllocStats stats();
};

// (current bytes, peak bytes) of tracked numeric buffers.
AllocStats tracked_alloc_stats();

template <class T>
struct TrackingAllocator {
  using value_type = T;

  TrackingAllocator() noexcept = default;
  template <class U>
  TrackingAllocator(const TrackingAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    AllocTracker::record_alloc(n * sizeof(T));
    return static_cast<T*>(::operator new(n * sizeof(T)));
  }
  void deallocate(T* p, std::size_t n) noexcept {
    AllocTracker::record_free(n * sizeof(T));
    ::operator delete(p);
  }

  template <class U>
  bool operator==(const TrackingAllocator<U>&) const noexcept { return true; }
};

}  // namespace rwkvlab
