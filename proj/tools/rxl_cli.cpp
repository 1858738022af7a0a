// Command-line front end: hypothesis tests, confidence intervals, table
// construction, and the appendix analyses, with JSON/CSV/text reporting.

#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rxl/extensions.hpp"
#include "rxl/inference.hpp"
#include "rxl/lattice.hpp"
#include "rxl/oracle.hpp"

using json = nlohmann::ordered_json;
using namespace rxl;

namespace {

enum ExitCode {
  kOk = 0,
  kInternalError = 1,
  kInputError = 2,
  kCacheMismatch = 3,
  kResourceCap = 4,
};

struct JobConfig {
  int s = 0;
  std::string spec_text;
  std::optional<DataConfig> g;
  std::optional<std::pair<std::string, std::string>> shares;
  std::vector<std::string> h0;
  double alpha = 0.05;
  std::string quantity = "killed";
  std::string side = "lower";
  std::string cache;
  int threads = 0;
  bool exact = false;
  bool rebuild = false;
  std::string format = "json";
  std::string pi;  // population shares for the asymptotic command
};

RandomizationSpec parse_spec(const std::string& text, int s) {
  if (text.rfind("iid:p=", 0) == 0) {
    return RandomizationSpec::iid(rational_from_string(text.substr(6)));
  }
  if (text.rfind("urn:m=", 0) == 0) {
    return RandomizationSpec::urn(std::stoi(text.substr(6)), s);
  }
  throw input_error("spec must look like iid:p=1/2 or urn:m=50");
}

DataConfig parse_g(const std::vector<int>& parts) {
  if (parts.size() != 4) throw input_error("--g expects four counts a,b,c,d");
  const DataConfig g{parts[0], parts[1], parts[2], parts[3]};
  validate_data_config(g);
  return g;
}

void merge_job_file(JobConfig& job, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open job file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw input_error("malformed job file: " + std::string(e.what()));
  }
  if (j.contains("s")) job.s = j["s"].get<int>();
  if (j.contains("g")) {
    auto parts = j["g"].get<std::vector<int>>();
    job.g = parse_g(parts);
  }
  if (j.contains("shares")) {
    auto parts = j["shares"].get<std::vector<std::string>>();
    if (parts.size() != 2) throw input_error("shares expects [v, c]");
    job.shares = {parts[0], parts[1]};
  }
  if (j.contains("spec")) {
    if (j["spec"].is_string()) {
      job.spec_text = j["spec"].get<std::string>();
    } else {
      const auto& spec = j["spec"];
      const std::string kind = spec.value("kind", spec.contains("p") ? "iid" : "urn");
      if (kind == "iid") {
        job.spec_text = "iid:p=" + spec["p"].get<std::string>();
      } else {
        job.spec_text = "urn:m=" + std::to_string(spec["m"].get<int>());
      }
    }
  }
  if (j.contains("h0")) {
    if (j["h0"].is_string()) {
      job.h0 = {j["h0"].get<std::string>()};
    } else {
      job.h0 = j["h0"].get<std::vector<std::string>>();
    }
  }
  if (j.contains("alpha")) job.alpha = j["alpha"].get<double>();
  if (j.contains("quantity")) job.quantity = j["quantity"].get<std::string>();
  if (j.contains("side")) job.side = j["side"].get<std::string>();
  if (j.contains("cache")) job.cache = j["cache"].get<std::string>();
  if (j.contains("threads")) job.threads = j["threads"].get<int>();
  if (j.contains("exact")) job.exact = j["exact"].get<bool>();
  if (j.contains("format")) job.format = j["format"].get<std::string>();
  if (j.contains("pi")) job.pi = j["pi"].get<std::string>();
}

json config_json(const TypeConfig& t) {
  return json::array({t.never, t.defiers, t.compliers, t.always});
}

json configs_json(const std::vector<TypeConfig>& list, std::size_t cap = 64) {
  json arr = json::array();
  for (std::size_t i = 0; i < list.size() && i < cap; ++i) {
    arr.push_back(config_json(list[i]));
  }
  return arr;
}

json test_result_json(const TestResult& r) {
  json out;
  out["lambda"] = r.lambda;
  if (r.p_value) {
    out["p_value"] = *r.p_value;
  } else {
    out["p_value"] = nullptr;
  }
  out["log_numerator"] = r.log_numerator;
  out["log_denominator"] = r.log_denominator;
  out["argmax_null"] = configs_json(r.argmax_null);
  out["argmax_null_count"] = r.argmax_null.size();
  out["argmax_global"] = configs_json(r.argmax_global);
  out["argmax_global_count"] = r.argmax_global.size();
  return out;
}

// Advisory lock so that only one process builds a given cache path at a time.
class BuildLock {
 public:
  explicit BuildLock(const std::string& cache_path) {
    if (cache_path.empty()) return;
    path_ = cache_path + ".lock";
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ >= 0) ::flock(fd_, LOCK_EX);
  }
  ~BuildLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
      ::unlink(path_.c_str());
    }
  }

 private:
  int fd_ = -1;
  std::string path_;
};

struct TableHandle {
  LambdaTable table;
  std::string status;  // "loaded" | "built" | "built+saved" | "memory"
};

TableHandle obtain_table(const JobConfig& job, const RandomizationSpec& spec) {
  TableHandle h;
  if (!job.cache.empty() && std::filesystem::exists(job.cache) && !job.rebuild) {
    LambdaTable t = load_lambda_table(job.cache);
    if (t.s != job.s || !(t.spec == spec)) {
      throw cache_error("cache '" + job.cache +
                        "' was built for a different (s, spec); pass --rebuild to replace it");
    }
    if (job.exact && !t.exact_ties) {
      throw cache_error("cache '" + job.cache +
                        "' lacks certified argmax data; pass --rebuild to rebuild in exact mode");
    }
    h.table = std::move(t);
    h.status = "loaded";
    return h;
  }
  BuildLock lock(job.cache);
  h.table = build_lambda_table(job.s, spec, job.threads, job.exact ? 1 : -1);
  if (!job.cache.empty()) {
    save_lambda_table(h.table, job.cache);
    h.status = "built+saved";
  } else {
    h.status = "memory";
  }
  return h;
}

void emit(const json& report, const JobConfig& job) {
  if (job.format == "json") {
    std::cout << report.dump(2) << "\n";
    return;
  }
  // Flatten one level for csv/text.
  std::vector<std::pair<std::string, std::string>> rows;
  std::function<void(const std::string&, const json&)> flatten =
      [&](const std::string& prefix, const json& node) {
        if (node.is_object()) {
          for (auto it = node.begin(); it != node.end(); ++it) {
            flatten(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
          }
        } else if (node.is_array() && !node.empty() && node.front().is_object()) {
          for (std::size_t i = 0; i < node.size(); ++i) {
            flatten(prefix + "[" + std::to_string(i) + "]", node[i]);
          }
        } else {
          rows.emplace_back(prefix, node.is_string() ? node.get<std::string>()
                                                     : node.dump());
        }
      };
  flatten("", report);
  if (job.format == "csv") {
    std::cout << "field,value\n";
    for (const auto& [k, v] : rows) {
      std::string escaped = v;
      if (escaped.find(',') != std::string::npos) escaped = "\"" + escaped + "\"";
      std::cout << k << "," << escaped << "\n";
    }
  } else {
    std::size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    for (const auto& [k, v] : rows) {
      std::cout << k << std::string(width - k.size() + 2, ' ') << v << "\n";
    }
  }
}

json job_header(const JobConfig& job, const RandomizationSpec& spec) {
  json out;
  out["s"] = job.s;
  out["spec"] = spec.describe();
  if (job.g) {
    out["g"] = json::array({job.g->g1, job.g->g2, job.g->g3, job.g->g4});
  }
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

void check_g_matches_s(const JobConfig& job) {
  if (job.g && job.g->sample_size() != job.s) {
    throw input_error("--g sums to " + std::to_string(job.g->sample_size()) +
                      " but --s is " + std::to_string(job.s));
  }
}

int cmd_test(const JobConfig& job) {
  check_g_matches_s(job);
  if (!job.g) throw input_error("test requires a data configuration (--g)");
  if (job.h0.empty()) throw input_error("test requires at least one --h0 expression");
  const auto start = std::chrono::steady_clock::now();
  const RandomizationSpec spec = parse_spec(job.spec_text, job.s);
  TableHandle handle = obtain_table(job, spec);

  json report = job_header(job, spec);
  report["command"] = "test";
  json tests = json::array();
  for (const std::string& text : job.h0) {
    HypothesisSet h0(text, job.s);
    TestResult r = p_value(*job.g, h0, spec, handle.table, job.threads);
    json jt = test_result_json(r);
    jt["h0"] = h0.text();
    tests.push_back(jt);
  }
  // First hypothesis mirrored at the top level; "tests" carries them all.
  for (auto it = tests[0].begin(); it != tests[0].end(); ++it) {
    report[it.key()] = it.value();
  }
  report["tests"] = tests;
  report["cache"] = json{{"path", job.cache}, {"status", handle.status}};
  report["runtime_ms"] = elapsed_ms(start);
  emit(report, job);
  return kOk;
}

int cmd_ci(const JobConfig& job) {
  check_g_matches_s(job);
  if (!job.g) throw input_error("ci requires a data configuration (--g)");
  const auto start = std::chrono::steady_clock::now();
  const RandomizationSpec spec = parse_spec(job.spec_text, job.s);
  const auto q = quantity_from_name(job.quantity);
  if (!q) throw input_error("unknown quantity '" + job.quantity + "'");
  IntervalSide side;
  if (job.side == "lower") side = IntervalSide::Lower;
  else if (job.side == "upper") side = IntervalSide::Upper;
  else if (job.side == "two-sided") side = IntervalSide::TwoSided;
  else throw input_error("side must be lower, upper or two-sided");

  TableHandle handle = obtain_table(job, spec);
  const ConfidenceInterval ci =
      confidence_interval(*job.g, *q, side, job.alpha, spec, handle.table, job.threads);

  json report = job_header(job, spec);
  report["command"] = "ci";
  report["quantity"] = job.quantity;
  report["side"] = job.side;
  report["alpha"] = job.alpha;
  json jci;
  jci["lower"] = ci.lower ? json(rational_to_string(*ci.lower)) : json(nullptr);
  jci["upper"] = ci.upper ? json(rational_to_string(*ci.upper)) : json(nullptr);
  if (!ci.lower && !ci.upper) jci["note"] = "every candidate value was rejected";
  json scanned = json::array();
  for (const auto& [v, p] : ci.scanned) {
    scanned.push_back(json{{"value", rational_to_string(v)}, {"p_value", p}});
  }
  jci["scanned"] = scanned;
  report["ci"] = jci;
  report["cache"] = json{{"path", job.cache}, {"status", handle.status}};
  report["runtime_ms"] = elapsed_ms(start);
  emit(report, job);
  return kOk;
}

int cmd_table(const JobConfig& job) {
  const auto start = std::chrono::steady_clock::now();
  const RandomizationSpec spec = parse_spec(job.spec_text, job.s);
  if (job.cache.empty()) throw input_error("table requires --cache <path>");

  json report = job_header(job, spec);
  report["command"] = "table";
  if (std::filesystem::exists(job.cache) && !job.rebuild) {
    LambdaTable existing = load_lambda_table(job.cache);
    if (existing.s == job.s && existing.spec == spec &&
        (!job.exact || existing.exact_ties)) {
      report["cache"] = json{{"path", job.cache}, {"status", "up-to-date"}};
      report["records"] = existing.size();
      report["runtime_ms"] = elapsed_ms(start);
      emit(report, job);
      return kOk;
    }
    throw cache_error("cache '" + job.cache +
                      "' holds a different table; pass --rebuild to replace it");
  }
  BuildLock lock(job.cache);
  LambdaTable table = build_lambda_table(job.s, spec, job.threads, job.exact ? 1 : -1);
  save_lambda_table(table, job.cache);
  report["cache"] = json{{"path", job.cache}, {"status", "built+saved"}};
  report["records"] = table.size();
  report["multi_valued_argmax"] = table.multi_valued_count();
  report["exact_ties"] = table.exact_ties;
  report["runtime_ms"] = elapsed_ms(start);
  emit(report, job);
  return kOk;
}

SharePair job_shares(const JobConfig& job) {
  if (job.shares) {
    SharePair s;
    s.treated_intervention = rational_from_string(job.shares->first);
    s.treated_control = rational_from_string(job.shares->second);
    return s;
  }
  if (job.g) return SharePair::of(*job.g);
  throw input_error("provide --shares v,c or --g to derive shares");
}

int cmd_bounds(const JobConfig& job) {
  check_g_matches_s(job);
  const auto start = std::chrono::steady_clock::now();
  const SharePair shares = job_shares(job);
  const auto [defier_lb, complier_lb] = bfh_lower_bounds(shares);
  json report;
  report["command"] = "bounds";
  report["s"] = job.s;
  report["v_hat"] = rational_to_string(*shares.treated_intervention);
  report["c_hat"] = rational_to_string(*shares.treated_control);
  report["defier_share_lower_bound"] = rational_to_string(defier_lb);
  report["complier_share_lower_bound"] = rational_to_string(complier_lb);
  report["defier_share_lower_bound_value"] = to_double(defier_lb);
  report["complier_share_lower_bound_value"] = to_double(complier_lb);
  report["runtime_ms"] = elapsed_ms(start);
  emit(report, job);
  return kOk;
}

int cmd_limited(const JobConfig& job) {
  check_g_matches_s(job);
  if (job.h0.empty()) throw input_error("limited requires --h0");
  if (job.shares && job.g) {
    throw input_error("supply exactly one of --shares and --g");
  }
  const auto start = std::chrono::steady_clock::now();
  const RandomizationSpec spec = parse_spec(job.spec_text, job.s);
  const SharePair shares = job_shares(job);

  json report;
  report["command"] = "limited";
  report["s"] = job.s;
  report["spec"] = spec.describe();
  report["v_hat"] = shares.treated_intervention
                        ? json(rational_to_string(*shares.treated_intervention))
                        : json(nullptr);
  report["c_hat"] = shares.treated_control
                        ? json(rational_to_string(*shares.treated_control))
                        : json(nullptr);
  json tests = json::array();
  for (const std::string& text : job.h0) {
    HypothesisSet h0(text, job.s);
    TestResult r = limited_data_p_value(shares, h0, spec, job.threads);
    json jt = test_result_json(r);
    jt["h0"] = h0.text();
    tests.push_back(jt);
  }
  for (auto it = tests[0].begin(); it != tests[0].end(); ++it) {
    report[it.key()] = it.value();
  }
  report["tests"] = tests;
  report["runtime_ms"] = elapsed_ms(start);
  emit(report, job);
  return kOk;
}

int cmd_asymptotic(const JobConfig& job) {
  check_g_matches_s(job);
  if (!job.g) throw input_error("asymptotic requires a data configuration (--g)");
  const auto start = std::chrono::steady_clock::now();
  const RandomizationSpec spec = parse_spec(job.spec_text, job.s);
  const DataConfig& g = *job.g;

  json report = job_header(job, spec);
  report["command"] = "asymptotic";
  report["approximate"] = true;
  report["note"] = "population-level quantities under an added sampling assumption";

  const PopulationMle mle = population_mle(g);
  json jmle;
  jmle["v_hat"] = rational_to_string(mle.v_hat);
  jmle["c_hat"] = rational_to_string(mle.c_hat);
  jmle["implied_average_effect"] = rational_to_string(mle.effect);
  jmle["implied_average_effect_value"] = to_double(mle.effect);
  jmle["pi1_range"] =
      json::array({rational_to_string(mle.pi1_min), rational_to_string(mle.pi1_max)});
  jmle["zero_defier_maximizer_exists"] = mle.zero_defier_exists;
  jmle["zero_complier_maximizer_exists"] = mle.zero_complier_exists;
  report["population_mle"] = jmle;

  // Impossibility check: the zero-defier rewrite of a maximizer attains the
  // same likelihood, so a test of "defiers > 0" can never reject.
  if (mle.zero_defier_exists) {
    const PopulationConfig rep = mle.representative;
    const PopulationConfig transformed = zero_defier_transform(rep);
    LikelihoodValue l_rep, l_tr;
    if (spec.is_urn()) {
      l_rep = asymptotic_likelihood_urn(rep, g, spec.m());
      l_tr = asymptotic_likelihood_urn(transformed, g, spec.m());
    } else {
      l_rep = asymptotic_likelihood_iid(rep, g, spec.p());
      l_tr = asymptotic_likelihood_iid(transformed, g, spec.p());
    }
    report["zero_defier_check"] =
        json{{"maximizer_likelihood", l_rep.value()},
             {"zero_defier_likelihood", l_tr.value()},
             {"equal", *l_rep.exact == *l_tr.exact},
             {"lambda_for_zero_defier_null", 1.0}};
  }

  if (!job.pi.empty()) {
    std::istringstream in(job.pi);
    std::string a, b, c;
    if (!std::getline(in, a, ',') || !std::getline(in, b, ',') || !std::getline(in, c)) {
      throw input_error("--pi expects three comma-separated shares");
    }
    const PopulationConfig pi{rational_from_string(a), rational_from_string(b),
                              rational_from_string(c)};
    const LikelihoodValue lv = spec.is_urn()
                                   ? asymptotic_likelihood_urn(pi, g, spec.m())
                                   : asymptotic_likelihood_iid(pi, g, spec.p());
    report["likelihood_at_pi"] = lv.value();
  }

  const TwoProportionResult tp = two_proportion_test(g);
  report["two_proportion_test"] = json{{"estimate", tp.estimate},
                                       {"std_error", tp.std_error},
                                       {"z", tp.z},
                                       {"p_value", tp.p_value},
                                       {"approximate", true}};
  report["runtime_ms"] = elapsed_ms(start);
  emit(report, job);
  return kOk;
}

int cmd_mle_count(const JobConfig& job) {
  check_g_matches_s(job);
  const auto start = std::chrono::steady_clock::now();
  const RandomizationSpec spec = parse_spec(job.spec_text, job.s);
  TableHandle handle = obtain_table(job, spec);
  const LambdaTable& t = handle.table;

  std::int64_t nonzero = 0;
  std::uint32_t largest = 0;
  for (auto c : t.argmax_count) {
    nonzero += c > 0;
    largest = std::max(largest, c);
  }
  json report = job_header(job, spec);
  report["command"] = "mle-count";
  report["records"] = t.size();
  report["reachable"] = nonzero;
  report["multi_valued_argmax"] = t.multi_valued_count();
  report["largest_argmax_set"] = largest;
  report["exact_ties"] = t.exact_ties;
  report["cache"] = json{{"path", job.cache}, {"status", handle.status}};
  report["runtime_ms"] = elapsed_ms(start);
  emit(report, job);
  return kOk;
}

int cmd_oracle_check(const JobConfig& job) {
  const auto start = std::chrono::steady_clock::now();
  const int cap = job.s > 0 ? std::min(job.s, 8) : 6;
  std::int64_t checked = 0, failures = 0;
  for (int s = 1; s <= cap; ++s) {
    std::vector<RandomizationSpec> specs;
    specs.push_back(RandomizationSpec::iid(Rational(1, 4)));
    specs.push_back(RandomizationSpec::iid(Rational(1, 2)));
    specs.push_back(RandomizationSpec::iid(Rational(2, 3)));
    for (int m = 1; m <= s - 1; ++m) specs.push_back(RandomizationSpec::urn(m, s));
    for (const auto& spec : specs) {
      LikelihoodEngine engine(s, spec);
      for (const TypeConfig& theta : enumerate_type_configs(s)) {
        const auto dist = oracle::exhaustive_distribution(theta, spec);
        for (const DataConfig& g : enumerate_data_configs(s)) {
          const auto it = dist.find(g);
          const Rational want = it == dist.end() ? Rational(0) : it->second;
          const Rational got = engine.exact_likelihood(theta, g);
          ++checked;
          if (want != got) ++failures;
        }
      }
    }
  }
  json report;
  report["command"] = "oracle-check";
  report["max_s"] = cap;
  report["comparisons"] = checked;
  report["failures"] = failures;
  report["runtime_ms"] = elapsed_ms(start);
  emit(report, job);
  return failures == 0 ? kOk : kInternalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact finite-sample randomization inference engine"};
  app.require_subcommand(1);

  JobConfig job;
  std::string job_file;
  std::vector<int> g_parts;
  std::string shares_text;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--job", job_file, "JSON job file; flags override its fields");
    cmd->add_option("--s", job.s, "sample size");
    cmd->add_option("--g", g_parts, "data configuration a,b,c,d")->delimiter(',');
    cmd->add_option("--spec", job.spec_text, "iid:p=1/2 or urn:m=50");
    cmd->add_option("--h0", job.h0, "null hypothesis expression (repeatable)");
    cmd->add_option("--alpha", job.alpha, "test level");
    cmd->add_option("--quantity", job.quantity, "quantity of interest");
    cmd->add_option("--side", job.side, "lower | upper | two-sided");
    cmd->add_option("--cache", job.cache, "lambda table cache path");
    cmd->add_option("--threads", job.threads, "worker threads (0 = all)");
    cmd->add_option("--shares", shares_text, "observed shares v,c");
    cmd->add_option("--pi", job.pi, "population shares p1,p2,p3");
    cmd->add_flag("--exact", job.exact, "require certified exact argmax mode");
    cmd->add_flag("--rebuild", job.rebuild, "rebuild a mismatched or stale cache");
    cmd->add_option("--format", job.format, "json | csv | text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
  };

  CLI::App* test = app.add_subcommand("test", "likelihood ratio test with exact p-value");
  CLI::App* ci = app.add_subcommand("ci", "confidence interval by test inversion");
  CLI::App* table = app.add_subcommand("table", "build and persist the lambda table");
  CLI::App* bounds = app.add_subcommand("bounds", "share-based lower bounds");
  CLI::App* limited = app.add_subcommand("limited", "test from arm shares only");
  CLI::App* asymptotic =
      app.add_subcommand("asymptotic", "population-level analyses (approximate)");
  CLI::App* mle_count =
      app.add_subcommand("mle-count", "argmax multiplicity statistics");
  CLI::App* oracle_check =
      app.add_subcommand("oracle-check", "small-sample validation against the oracle");
  for (CLI::App* cmd : {test, ci, table, bounds, limited, asymptotic, mle_count,
                        oracle_check}) {
    add_common(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (!job_file.empty()) {
      JobConfig from_file;
      merge_job_file(from_file, job_file);
      // Flags take precedence over the job file.
      if (job.s == 0) job.s = from_file.s;
      if (job.spec_text.empty()) job.spec_text = from_file.spec_text;
      if (job.h0.empty()) job.h0 = from_file.h0;
      if (!job.g && from_file.g) job.g = from_file.g;
      if (!job.shares && from_file.shares) job.shares = from_file.shares;
      if (job.cache.empty()) job.cache = from_file.cache;
      if (job.format == "json") job.format = from_file.format.empty() ? "json" : from_file.format;
      if (job.threads == 0) job.threads = from_file.threads;
      if (job.alpha == 0.05) job.alpha = from_file.alpha;
      if (job.quantity == "killed" && !from_file.quantity.empty()) {
        job.quantity = from_file.quantity;
      }
      if (job.side == "lower" && !from_file.side.empty()) job.side = from_file.side;
      if (job.pi.empty()) job.pi = from_file.pi;
      job.exact = job.exact || from_file.exact;
      job.rebuild = job.rebuild || from_file.rebuild;
    }
    if (!g_parts.empty()) job.g = parse_g(g_parts);
    if (!shares_text.empty()) {
      const auto comma = shares_text.find(',');
      if (comma == std::string::npos) throw input_error("--shares expects v,c");
      job.shares = {shares_text.substr(0, comma), shares_text.substr(comma + 1)};
    }
    if (app.got_subcommand(oracle_check)) return cmd_oracle_check(job);
    if (job.s < 1) throw input_error("sample size --s is required");
    if (job.spec_text.empty() && !app.got_subcommand(bounds)) {
      throw input_error("randomization --spec is required");
    }

    if (app.got_subcommand(test)) return cmd_test(job);
    if (app.got_subcommand(ci)) return cmd_ci(job);
    if (app.got_subcommand(table)) return cmd_table(job);
    if (app.got_subcommand(bounds)) return cmd_bounds(job);
    if (app.got_subcommand(limited)) return cmd_limited(job);
    if (app.got_subcommand(asymptotic)) return cmd_asymptotic(job);
    if (app.got_subcommand(mle_count)) return cmd_mle_count(job);
  } catch (const HypothesisParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const cache_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCacheMismatch;
  } catch (const resource_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kResourceCap;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}
