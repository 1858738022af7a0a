// Compares the OpenMP table builder against the exact-rational serial
// reference: wall time at several thread counts, speedup, and agreement.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "rxl/lambda_table.hpp"

using namespace rxl;

namespace {

double time_of(const std::function<LambdaTable()>& fn, LambdaTable* out) {
  const auto start = std::chrono::steady_clock::now();
  *out = fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  int s = 20;
  std::string spec_text = "iid";
  if (argc > 1) s = std::atoi(argv[1]);
  if (argc > 2) spec_text = argv[2];
  const RandomizationSpec spec = spec_text == "urn"
                                     ? RandomizationSpec::urn(s / 2, s)
                                     : RandomizationSpec::iid(Rational(1, 2));

  std::printf("lambda table build, s=%d, spec=%s, lattice=%lld\n", s,
              spec.describe().c_str(), static_cast<long long>(lattice_size(s)));

  LambdaTable reference;
  const double t_ref =
      time_of([&] { return build_lambda_table_serial(s, spec); }, &reference);
  std::printf("  serial reference (exact rational): %8.3fs\n", t_ref);

  const int max_threads = omp_get_max_threads();
  std::vector<int> thread_counts{1};
  if (max_threads > 1) thread_counts.push_back(max_threads);

  std::vector<std::uint8_t> first_bytes;
  for (int nt : thread_counts) {
    LambdaTable parallel;
    const double t_par =
        time_of([&] { return build_lambda_table(s, spec, nt); }, &parallel);
    const bool ok = tables_equal(reference, parallel, 1e-10);
    const auto bytes = serialize_lambda_table(parallel);
    if (first_bytes.empty()) first_bytes = bytes;
    std::printf(
        "  parallel kernel, %d thread%s:            %8.3fs  speedup %6.1fx  "
        "matches reference: %s  bytes stable: %s\n",
        nt, nt == 1 ? " " : "s", t_par, t_ref / t_par, ok ? "yes" : "NO",
        bytes == first_bytes ? "yes" : "NO");
    if (!ok || bytes != first_bytes) return 1;
  }
  return 0;
}
