#pragma once

#include <cstdint>
#include <iterator>
#include <vector>

#include "rxl/types.hpp"

namespace rxl {

// Both configuration lattices are the set of 4-part compositions of s.
// Canonical order is lexicographic ascending in the first three coordinates;
// ranks index the persisted table format.

std::int64_t lattice_size(int s);

std::int64_t composition_rank(int s, int x1, int x2, int x3);
void composition_unrank(int s, std::int64_t rank, int* x1, int* x2, int* x3);

inline std::int64_t rank_of(const TypeConfig& t) {
  return composition_rank(t.sample_size(), t.never, t.defiers, t.compliers);
}
inline std::int64_t rank_of(const DataConfig& g) {
  return composition_rank(g.sample_size(), g.g1, g.g2, g.g3);
}

TypeConfig type_config_at(int s, std::int64_t rank);
DataConfig data_config_at(int s, std::int64_t rank);

// Lazily enumerates 4-part compositions of s in canonical order. Instances
// are cheap to create, so each thread can walk its own copy.
template <class Config>
class ConfigRange {
 public:
  explicit ConfigRange(int s) : s_(s) {}

  class iterator {
   public:
    using value_type = Config;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::forward_iterator_tag;

    iterator() = default;
    iterator(int s, int x1, int x2, int x3) : s_(s), x1_(x1), x2_(x2), x3_(x3) {}

    Config operator*() const {
      return Config{x1_, x2_, x3_, s_ - x1_ - x2_ - x3_};
    }
    iterator& operator++() {
      if (x1_ + x2_ + x3_ < s_) {
        ++x3_;
      } else if (x2_ < s_ - x1_) {
        ++x2_;
        x3_ = 0;
      } else {
        ++x1_;
        x2_ = 0;
        x3_ = 0;
      }
      return *this;
    }
    iterator operator++(int) {
      iterator copy = *this;
      ++*this;
      return copy;
    }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.x1_ == b.x1_ && a.x2_ == b.x2_ && a.x3_ == b.x3_;
    }

   private:
    int s_ = 0, x1_ = 0, x2_ = 0, x3_ = 0;
  };

  iterator begin() const { return iterator(s_, 0, 0, 0); }
  iterator end() const { return iterator(s_, s_ + 1, 0, 0); }

 private:
  int s_;
};

inline ConfigRange<TypeConfig> enumerate_type_configs(int s) {
  if (s < 1) throw input_error("sample size must be >= 1");
  return ConfigRange<TypeConfig>(s);
}
inline ConfigRange<DataConfig> enumerate_data_configs(int s) {
  if (s < 1) throw input_error("sample size must be >= 1");
  return ConfigRange<DataConfig>(s);
}

// Rank arithmetic tables for hot loops: rank(g) = g1_base[g1] + rest[s-g1][g2] + g3.
class RankIndex {
 public:
  explicit RankIndex(int s);

  std::int64_t rank(int x1, int x2, int x3) const {
    return g1_base_[x1] + rest_row(x1)[x2] + x3;
  }
  std::int64_t base(int x1) const { return g1_base_[x1]; }
  const std::int32_t* rest_row(int x1) const {
    return rest_.data() + static_cast<std::size_t>(s_ - x1) * (s_ + 1);
  }
  int sample_size() const { return s_; }

 private:
  int s_;
  std::vector<std::int64_t> g1_base_;  // rank of (x1, 0, 0)
  std::vector<std::int32_t> rest_;     // rest_[k][x2]: rank offset of (.., x2, 0) when x2+x3 <= k
};

}  // namespace rxl
