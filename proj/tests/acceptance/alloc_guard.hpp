#pragma once

#include <cstddef>
#include <cstdint>

/// Process-wide heap accounting. The tracking allocator interposes malloc and
/// friends, so Eigen storage and std containers are both seen.
namespace alloc_guard {

struct Snapshot {
    std::int64_t peak_bytes;
    std::size_t largest_block;
    std::size_t allocations;
};

/// Resets the counters and starts measuring relative to the current live heap.
void begin();
/// Stops measuring and returns the peak live growth since begin().
Snapshot end();

}  // namespace alloc_guard
