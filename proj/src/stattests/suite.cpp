#include <cmath>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "common.hpp"

namespace qrng::stattests {
namespace {

// Kernels accept the short worked examples, but a suite run holds every test
// to the recommended minimum input length.
constexpr std::size_t kSuiteMinBits = 100;

// One runnable test: produces zero or more records.
struct Job {
  std::string name;
  std::function<std::vector<LabelledOutcome>()> run;
};

std::vector<LabelledOutcome> single(Outcome o) { return {{"", o}}; }

unsigned floor_log2(std::size_t n) {
  unsigned l = 0;
  while (n > 1) {
    n >>= 1;
    ++l;
  }
  return l;
}

std::vector<Job> jobs_for(BitView bits, Suite suite, const SuiteOptions& opt) {
  const unsigned lg = floor_log2(bits.size());
  const unsigned serial_m = opt.serial_m ? opt.serial_m : (lg > 5 ? std::min(16u, lg - 3) : 0u);
  const unsigned apen_m = opt.apen_m ? opt.apen_m : (lg > 7 ? std::min(10u, lg - 6) : 0u);

  std::vector<Job> jobs{
      {"frequency_monobit", [=] { return single(frequency_monobit(bits)); }},
      {"block_frequency", [=] { return single(block_frequency(bits, opt.block_frequency_len)); }},
      {"runs", [=] { return single(runs(bits)); }},
      {"longest_run_of_ones", [=] { return single(longest_run_of_ones(bits)); }},
      {"cumulative_sums",
       [=] {
         return std::vector<LabelledOutcome>{{"forward", cumulative_sums(bits, CusumMode::forward)},
                                             {"backward", cumulative_sums(bits, CusumMode::backward)}};
       }},
      {"dft_spectral", [=] { return single(dft_spectral(bits)); }},
      {"serial",
       [=] {
         if (serial_m < 2) throw InsufficientDataError("serial: input too short for m >= 2");
         const auto r = serial(bits, serial_m);
         return std::vector<LabelledOutcome>{{"p1", r[0]}, {"p2", r[1]}};
       }},
      {"approximate_entropy",
       [=] {
         if (apen_m < 1) throw InsufficientDataError("approximate_entropy: input too short for m >= 1");
         return single(approximate_entropy(bits, apen_m));
       }},
  };
  if (suite == Suite::full) {
    jobs.push_back({"binary_matrix_rank", [=] { return single(binary_matrix_rank(bits)); }});
    jobs.push_back({"non_overlapping_template", [=] { return non_overlapping_template(bits); }});
    jobs.push_back({"overlapping_template", [=] { return single(overlapping_template(bits)); }});
    jobs.push_back({"universal", [=] { return single(universal(bits)); }});
    jobs.push_back({"linear_complexity", [=] { return single(linear_complexity(bits)); }});
    jobs.push_back({"random_excursions", [=] { return random_excursions(bits); }});
    jobs.push_back({"random_excursions_variant", [=] { return random_excursions_variant(bits); }});
  }
  return jobs;
}

std::vector<TestRecord> execute(const Job& job, std::size_t n_bits, double alpha) {
  std::vector<TestRecord> records;
  try {
    if (n_bits < kSuiteMinBits)
      throw InsufficientDataError(job.name + " needs at least " + std::to_string(kSuiteMinBits) + " bits, got " +
                                  std::to_string(n_bits));
    for (auto& [variant, o] : job.run()) {
      TestRecord r;
      r.name = job.name;
      r.variant = variant;
      r.statistic = o.statistic;
      r.p_value = o.p_value;
      r.pass = o.p_value >= alpha;
      records.push_back(std::move(r));
    }
  } catch (const InsufficientDataError& e) {
    TestRecord r;
    r.name = job.name;
    r.skipped = true;
    r.note = e.what();
    records.assign(1, std::move(r));
  }
  return records;
}

}  // namespace

Suite parse_suite(std::string_view name) {
  if (name == "core") return Suite::core;
  if (name == "full") return Suite::full;
  throw ParameterError("unknown suite '" + std::string(name) + "' (expected core or full)");
}

std::string_view suite_name(Suite s) { return s == Suite::full ? "full" : "core"; }

std::vector<std::string> TestReport::failed_tests() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : records)
    if (!r.skipped && !r.pass && seen.insert(r.name).second) out.push_back(r.name);
  return out;
}

TestReport run_suite(BitView bits, double alpha, Suite suite, const SuiteOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  require_bits(bits);

  const auto jobs = jobs_for(bits, suite, options);
  std::vector<std::vector<TestRecord>> results(jobs.size());
  if (options.parallel) {
    // Tests only read the shared buffer, so each may run on its own thread.
    std::vector<std::jthread> workers;
    workers.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i)
      workers.emplace_back([&, i] { results[i] = execute(jobs[i], bits.size(), alpha); });
  } else {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = execute(jobs[i], bits.size(), alpha);
  }

  TestReport report;
  report.alpha = alpha;
  report.n_bits = bits.size();
  report.suite = suite;
  for (auto& rs : results)
    for (auto& r : rs) {
      if (!r.skipped) {
        ++report.executed_count;
        report.suite_pass_count += r.pass;
      }
      report.records.push_back(std::move(r));
    }
  return report;
}

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : report.records) {
    nlohmann::json j = {{"name", r.name}, {"variant", r.variant}, {"pass", r.pass}, {"skipped", r.skipped}};
    j["statistic"] = r.statistic ? nlohmann::json(*r.statistic) : nlohmann::json(nullptr);
    j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
    if (!r.note.empty()) j["note"] = r.note;
    records.push_back(std::move(j));
  }
  return {{"alpha", report.alpha},
          {"n_bits", report.n_bits},
          {"suite", std::string(suite_name(report.suite))},
          {"executed_count", report.executed_count},
          {"suite_pass_count", report.suite_pass_count},
          {"all_passed", report.all_passed()},
          {"records", records}};
}

TestReport report_from_json(const nlohmann::json& j) {
  try {
    TestReport report;
    report.alpha = j.at("alpha").get<double>();
    report.n_bits = j.at("n_bits").get<std::size_t>();
    report.suite = parse_suite(j.at("suite").get<std::string>());
    for (const auto& rj : j.at("records")) {
      TestRecord r;
      r.name = rj.at("name").get<std::string>();
      r.variant = rj.value("variant", std::string());
      r.skipped = rj.value("skipped", false);
      if (!rj.at("p_value").is_null()) r.p_value = rj.at("p_value").get<double>();
      if (!rj.at("statistic").is_null()) r.statistic = rj.at("statistic").get<double>();
      r.pass = !r.skipped && r.p_value && *r.p_value >= report.alpha;
      r.note = rj.value("note", std::string());
      if (!r.skipped) {
        ++report.executed_count;
        report.suite_pass_count += r.pass;
      }
      report.records.push_back(std::move(r));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("test report: ") + e.what());
  }
}

std::string format_table(const TestReport& report) {
  std::size_t width = 4;
  auto label = [](const TestRecord& r) { return r.variant.empty() ? r.name : r.name + "[" + r.variant + "]"; };
  for (const auto& r : report.records) width = std::max(width, label(r).size());

  std::ostringstream out;
  out << std::left << std::setw(int(width)) << "test" << "  " << std::right << std::setw(10) << "p-value"
      << "  result\n";
  out << std::string(width + 20, '-') << '\n';
  for (const auto& r : report.records) {
    out << std::left << std::setw(int(width)) << label(r) << "  " << std::right << std::setw(10);
    if (r.p_value)
      out << std::fixed << std::setprecision(6) << *r.p_value;
    else
      out << "-";
    out << "  " << (r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL") << '\n';
  }
  out << std::string(width + 20, '-') << '\n';
  out << report.suite_pass_count << "/" << report.executed_count << " passed at alpha = " << report.alpha
      << " (" << report.n_bits << " bits, " << suite_name(report.suite) << " suite)\n";
  return out.str();
}

}  // namespace qrng::stattests
