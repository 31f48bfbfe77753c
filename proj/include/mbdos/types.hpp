#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace mbdos {

/// Unbounded non-negative integer used for degeneracy counts.
using BigCount = boost::multiprecision::cpp_int;

/// Occupancy restriction per level: 1 for fermions, N for bosons, or any cap.
struct Restriction {
  int cap = 1;
};

}  // namespace mbdos
