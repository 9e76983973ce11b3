#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "scn/tensor.hpp"

namespace scn {

/// Picks `size` positions of the sample at random (seeded), returned in
/// ascending order. With `balanced`, every class contributes size / classes
/// points (the remainder goes to the lowest labels); a class too small for
/// its share is a UsageError, as is size > sample size.
std::vector<std::size_t> select_subset(const Sample& sample, std::size_t size, bool balanced, std::uint64_t seed);

}  // namespace scn
