#include <bit>
#include <cstring>
#include <fstream>

#include "rxl/errors.hpp"
#include "rxl/lambda_table.hpp"
#include "rxl/lattice.hpp"

namespace rxl {

// Cache layout (all little-endian):
//   "RXLT" | u32 version | u32 spec tag | u32 tie mode | u32 reserved
//   u64 s | u64 record count | u64 argmax rank count | u64 payload checksum
//   spec params: iid -> u32 len + bytes (p numerator), u32 len + bytes (p
//   denominator); urn -> u64 m
//   records: per g-rank, f64 log max | u32 argmax count | u64 argmax offset
//   ranks:   u32 per argmax entry
// The checksum is FNV-1a 64 over everything after the checksum field.

namespace {

constexpr char kMagic[4] = {'R', 'X', 'L', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void bytes(const std::vector<std::uint8_t>& b) {
    u32(static_cast<std::uint32_t>(b.size()));
    raw(b.data(), b.size());
  }
  void raw(const void* p, std::size_t n) {
    const auto* c = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), c, c + n);
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  double f64() { return get<double>(); }
  std::vector<std::uint8_t> bytes() {
    const std::uint32_t n = u32();
    need(n);
    std::vector<std::uint8_t> b(data_ + pos_, data_ + pos_ + n);
    pos_ += n;
    return b;
  }
  std::size_t position() const { return pos_; }

 private:
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void need(std::size_t n) {
    if (pos_ + n > size_) throw cache_error("table cache truncated");
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::uint8_t> export_magnitude(const BigInt& v) {
  std::vector<std::uint8_t> bytes;
  boost::multiprecision::export_bits(v, std::back_inserter(bytes), 8, false);
  return bytes;
}

BigInt import_magnitude(const std::vector<std::uint8_t>& bytes) {
  BigInt v = 0;
  if (!bytes.empty()) {
    boost::multiprecision::import_bits(v, bytes.begin(), bytes.end(), 8, false);
  }
  return v;
}

static_assert(sizeof(double) == 8);
static_assert(std::endian::native == std::endian::little,
              "cache format is little-endian");

}  // namespace

std::vector<std::uint8_t> serialize_lambda_table(const LambdaTable& table) {
  Writer body;  // everything after the checksum field
  if (table.spec.is_iid()) {
    body.bytes(export_magnitude(numerator(table.spec.p())));
    body.bytes(export_magnitude(denominator(table.spec.p())));
  } else {
    body.u64(static_cast<std::uint64_t>(table.spec.m()));
  }
  for (std::int64_t r = 0; r < table.size(); ++r) {
    body.f64(table.log_max[r]);
    body.u32(table.argmax_count[r]);
    body.u64(table.argmax_offset[r]);
  }
  for (std::uint32_t rank : table.argmax_ranks) body.u32(rank);

  Writer head;
  head.raw(kMagic, 4);
  head.u32(kVersion);
  head.u32(table.spec.is_iid() ? 0 : 1);
  head.u32(table.exact_ties ? 1 : 0);
  head.u32(0);
  head.u64(static_cast<std::uint64_t>(table.s));
  head.u64(static_cast<std::uint64_t>(table.size()));
  head.u64(static_cast<std::uint64_t>(table.argmax_ranks.size()));
  head.u64(fnv1a(body.out.data(), body.out.size()));
  head.raw(body.out.data(), body.out.size());
  return std::move(head.out);
}

void save_lambda_table(const LambdaTable& table, const std::filesystem::path& path) {
  const auto bytes = serialize_lambda_table(table);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw cache_error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw cache_error("short write to '" + path.string() + "'");
}

LambdaTable load_lambda_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cache_error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  Reader r(bytes.data(), bytes.size());
  char magic[4];
  if (bytes.size() < 4) throw cache_error("table cache truncated");
  std::memcpy(magic, bytes.data(), 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw cache_error("'" + path.string() + "' is not a lambda table cache");
  }
  Reader body(bytes.data() + 4, bytes.size() - 4);
  const std::uint32_t version = body.u32();
  if (version != kVersion) {
    throw cache_error("unsupported table cache version " + std::to_string(version));
  }
  const std::uint32_t spec_tag = body.u32();
  const std::uint32_t tie_mode = body.u32();
  body.u32();  // reserved
  const std::uint64_t s = body.u64();
  const std::uint64_t record_count = body.u64();
  const std::uint64_t rank_count = body.u64();
  const std::uint64_t checksum = body.u64();

  const std::size_t payload_start = 4 + body.position();
  if (payload_start > bytes.size()) throw cache_error("table cache truncated");
  if (fnv1a(bytes.data() + payload_start, bytes.size() - payload_start) != checksum) {
    throw cache_error("table cache checksum mismatch in '" + path.string() + "'");
  }

  if (s < 1 || s > kMaxSampleSize) throw cache_error("table cache sample size invalid");
  const int si = static_cast<int>(s);
  if (record_count != static_cast<std::uint64_t>(lattice_size(si))) {
    throw cache_error("table cache record count does not match its sample size");
  }

  LambdaTable table;
  table.s = si;
  table.exact_ties = tie_mode != 0;
  if (spec_tag == 0) {
    const BigInt num = import_magnitude(body.bytes());
    const BigInt den = import_magnitude(body.bytes());
    if (den == 0) throw cache_error("table cache has invalid iid parameter");
    table.spec = RandomizationSpec::iid(Rational(num, den));
  } else if (spec_tag == 1) {
    table.spec = RandomizationSpec::urn(static_cast<int>(body.u64()), si);
  } else {
    throw cache_error("table cache has unknown randomization tag");
  }

  table.log_max.resize(record_count);
  table.argmax_count.resize(record_count);
  table.argmax_offset.resize(record_count);
  for (std::uint64_t i = 0; i < record_count; ++i) {
    table.log_max[i] = body.f64();
    table.argmax_count[i] = body.u32();
    table.argmax_offset[i] = body.u64();
  }
  table.argmax_ranks.resize(rank_count);
  for (std::uint64_t i = 0; i < rank_count; ++i) table.argmax_ranks[i] = body.u32();
  return table;
}

}  // namespace rxl
