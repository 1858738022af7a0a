#pragma once

#include <map>

#include "rxl/types.hpp"

namespace rxl {
namespace oracle {

struct Caps {
  int max_iid_sample = 12;  // 2^s assignment vectors
  int max_urn_sample = 16;  // C(s,m) assignment vectors
};

// Enumerates every assignment vector under the spec, weights it exactly, and
// accumulates the induced distribution over data configurations. Rational
// arithmetic throughout; the result sums to exactly one. Test ground truth
// only -- deliberately naive.
std::map<DataConfig, Rational> exhaustive_distribution(const TypeConfig& theta,
                                                       const RandomizationSpec& spec,
                                                       const Caps& caps = {});

}  // namespace oracle
}  // namespace rxl
