#include "fplab/parallel.hpp"

#include <algorithm>

namespace fplab {

int resolve_workers(int requested) {
  if (requested > 0) return std::min(requested, 256);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 64u));
}

}  // namespace fplab
