#include "partrans/store.hpp"

#include <algorithm>
#include <cmath>

namespace partrans {

bool EmbeddingStore::all_finite() const noexcept {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::ranges::all_of(entities.data(), finite) &&
         std::ranges::all_of(relations.data(), finite) &&
         std::ranges::all_of(hyperplanes.data(), finite);
}

}  // namespace partrans
