#include "rxl/lattice.hpp"

namespace rxl {

std::int64_t lattice_size(int s) {
  const std::int64_t n = s;
  return (n + 1) * (n + 2) * (n + 3) / 6;
}

namespace {
// Number of (x2, x3) pairs with x2 + x3 <= k.
inline std::int64_t pairs_up_to(std::int64_t k) { return (k + 1) * (k + 2) / 2; }
}  // namespace

std::int64_t composition_rank(int s, int x1, int x2, int x3) {
  // Ranks lexicographic in (x1, x2, x3): all blocks with smaller x1, then
  // rows with smaller x2, then x3 itself.
  std::int64_t r = 0;
  for (int i = 0; i < x1; ++i) r += pairs_up_to(s - i);
  const std::int64_t k = s - x1;
  r += x2 * (k + 1) - static_cast<std::int64_t>(x2) * (x2 - 1) / 2;
  return r + x3;
}

void composition_unrank(int s, std::int64_t rank, int* x1, int* x2, int* x3) {
  int i = 0;
  while (rank >= pairs_up_to(s - i)) rank -= pairs_up_to(s - i), ++i;
  *x1 = i;
  const int k = s - i;
  int j = 0;
  while (rank > k - j) rank -= k - j + 1, ++j;
  *x2 = j;
  *x3 = static_cast<int>(rank);
}

TypeConfig type_config_at(int s, std::int64_t rank) {
  int a, b, c;
  composition_unrank(s, rank, &a, &b, &c);
  return TypeConfig{a, b, c, s - a - b - c};
}

DataConfig data_config_at(int s, std::int64_t rank) {
  int a, b, c;
  composition_unrank(s, rank, &a, &b, &c);
  return DataConfig{a, b, c, s - a - b - c};
}

RankIndex::RankIndex(int s) : s_(s) {
  g1_base_.resize(s + 1);
  std::int64_t acc = 0;
  for (int i = 0; i <= s; ++i) {
    g1_base_[i] = acc;
    acc += pairs_up_to(s - i);
  }
  rest_.assign(static_cast<std::size_t>(s + 1) * (s + 1), 0);
  for (int k = 0; k <= s; ++k) {
    std::int32_t row = 0;
    for (int x2 = 0; x2 <= k; ++x2) {
      rest_[static_cast<std::size_t>(k) * (s + 1) + x2] = row;
      row += k - x2 + 1;
    }
  }
}

}  // namespace rxl
