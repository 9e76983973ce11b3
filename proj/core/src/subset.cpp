#include "scn/subset.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "scn/error.hpp"
#include "scn/rng.hpp"

namespace scn {
namespace {

void shuffle_prefix(std::vector<std::size_t>& v, std::size_t count, Stream& s) {
  for (std::size_t i = 0; i < count; ++i) std::swap(v[i], v[i + s.below(v.size() - i)]);
}

}  // namespace

std::vector<std::size_t> select_subset(const Sample& sample, std::size_t size, bool balanced, std::uint64_t seed) {
  if (size == 0) throw UsageError("subset size must be positive");
  if (size > sample.size()) {
    throw UsageError("subset size " + std::to_string(size) + " exceeds dataset size " + std::to_string(sample.size()));
  }
  Stream s({seed, 0x737562736574ULL});
  std::vector<std::size_t> picked;
  if (!balanced) {
    std::vector<std::size_t> all(sample.size());
    std::iota(all.begin(), all.end(), 0);
    shuffle_prefix(all, size, s);
    picked.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
  } else {
    std::map<Label, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < sample.size(); ++i) by_class[sample.labels()[i]].push_back(i);
    const std::size_t classes = by_class.size();
    std::size_t extra = size % classes;
    for (auto& [label, members] : by_class) {
      const std::size_t share = size / classes + (extra > 0 ? 1 : 0);
      if (extra > 0) --extra;
      if (share > members.size()) {
        throw UsageError("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                         " points, balanced subset needs " + std::to_string(share));
      }
      shuffle_prefix(members, share, s);
      picked.insert(picked.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(share));
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace scn
