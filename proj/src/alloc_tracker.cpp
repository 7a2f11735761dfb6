// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/alloc_tracker.hpp"

#include "rwkvlab/error.hpp"

namespace rwkvlab {
namespace {

std::atomic<std::size_t> g_current{0};
std::atomic<std::size_t> g_peak{0};
std::atomic<bool> g_enabled{true};

void raise_peak(std::size_t candidate) noexcept {
  std::size_t peak = g_peak.load(std::memory_order_relaxed);
  while (candidate > peak &&
         !g_peak.compare_exchange_weak(peak, candidate, std::memory_order_relaxed)) {
  }
}

}  // namespace

void AllocTracker::record_alloc(std::size_t bytes) noexcept {
  const std::size_t now = g_current.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  raise_peak(now);
}

void AllocTracker::record_free(std::size_t bytes) noexcept {
  g_current.fetch_sub(bytes, std::memory_order_relaxed);
}

void AllocTracker::set_enabled(bool on) noexcept { g_enabled.store(on); }

bool AllocTracker::enabled() noexcept { return g_enabled.load(); }

void AllocTracker::reset_peak() noexcept {
  g_peak.store(g_current.load(std::memory_order_relaxed), std::memory_order_relaxed);
}

AllocStats AllocTracker::stats() {
  if (!enabled()) fail(ErrorKind::Unsupported, "allocation tracking is disabled");
  return {g_current.load(std::memory_order_relaxed), g_peak.load(std::memory_order_relaxed)};
}

AllocStats tracked_alloc_stats() { return AllocTracker::stats(); }

}  // namespace rwkvlab
