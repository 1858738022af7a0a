#include "rxl/oracle.hpp"

#include <bit>
#include <cstdint>
#include <vector>

#include "rxl/errors.hpp"

namespace rxl {
namespace oracle {

namespace {

// Data configuration produced when the individuals flagged in `assigned`
// (grouped by type: never, defier, complier, always) go to intervention.
DataConfig realize(const TypeConfig& theta, std::uint32_t assigned) {
  int n12 = 0, n22 = 0, n31 = 0, n41 = 0;
  int idx = 0;
  for (int i = 0; i < theta.never; ++i, ++idx) n12 += (assigned >> idx) & 1;
  for (int i = 0; i < theta.defiers; ++i, ++idx) n22 += (assigned >> idx) & 1;
  for (int i = 0; i < theta.compliers; ++i, ++idx) n31 += (assigned >> idx) & 1;
  for (int i = 0; i < theta.always; ++i, ++idx) n41 += (assigned >> idx) & 1;
  const int s = theta.sample_size();
  const int g1 = n31 + n41;
  const int g2 = n12 + n22;
  const int g3 = (theta.defiers - n22) + (theta.always - n41);
  return DataConfig{g1, g2, g3, s - g1 - g2 - g3};
}

}  // namespace

std::map<DataConfig, Rational> exhaustive_distribution(const TypeConfig& theta,
                                                       const RandomizationSpec& spec,
                                                       const Caps& caps) {
  validate_type_config(theta);
  const int s = theta.sample_size();
  spec.validate_for(s);

  std::map<DataConfig, Rational> dist;
  if (spec.is_iid()) {
    if (s > caps.max_iid_sample) {
      throw resource_error("iid oracle capped at s <= " +
                           std::to_string(caps.max_iid_sample));
    }
    const Rational p = spec.p();
    const Rational q = 1 - p;
    // Weight of a vector depends only on its popcount.
    std::vector<Rational> weight(s + 1);
    for (int k = 0; k <= s; ++k) {
      Rational w = 1;
      for (int i = 0; i < k; ++i) w *= p;
      for (int i = 0; i < s - k; ++i) w *= q;
      weight[k] = w;
    }
    for (std::uint32_t v = 0; v < (1u << s); ++v) {
      dist[realize(theta, v)] += weight[std::popcount(v)];
    }
  } else {
    if (s > caps.max_urn_sample) {
      throw resource_error("urn oracle capped at s <= " +
                           std::to_string(caps.max_urn_sample));
    }
    const int m = spec.m();
    BigInt n_subsets = 0;
    for (std::uint32_t v = 0; v < (1u << s); ++v) {
      if (std::popcount(v) == m) ++n_subsets;
    }
    const Rational w = Rational(1, n_subsets);
    for (std::uint32_t v = 0; v < (1u << s); ++v) {
      if (std::popcount(v) == m) dist[realize(theta, v)] += w;
    }
  }
  return dist;
}

}  // namespace oracle
}  // namespace rxl
