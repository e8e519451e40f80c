#pragma once

// Statistical randomness tests over 0/1 byte sequences, following the
// SP 800-22 definitions. Each kernel checks its own minimum input size and
// throws InsufficientDataError below it. run_suite() also requires 100 bits
// for every test, and it turns either shortfall into a "skipped" record
// rather than inventing a p-value.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qrng/error.hpp"

namespace qrng::stattests {

using BitView = std::span<const std::uint8_t>;

/// Input is valid but too short (or, for random excursions, has too few
/// cycles) for the test's reference distribution.
class InsufficientDataError : public RangeError {
 public:
  using RangeError::RangeError;
};

struct Outcome {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// For tests that report several p-values (one per template, state, ...).
struct LabelledOutcome {
  std::string variant;
  Outcome outcome;
};

// Core kernels -------------------------------------------------------------

Outcome frequency_monobit(BitView bits);
Outcome block_frequency(BitView bits, std::size_t block_len = 128);
/// Fails the frequency prerequisite |π - 1/2| >= 2/√n with p = 0.
Outcome runs(BitView bits);
Outcome longest_run_of_ones(BitView bits);

enum class CusumMode { forward, backward };
Outcome cumulative_sums(BitView bits, CusumMode mode);

/// Peak threshold T = sqrt(ln(1/0.05) n); variance n·0.95·0.05/4.
Outcome dft_spectral(BitView bits);

/// p-values for ∇ψ²_m and ∇²ψ²_m.
std::array<Outcome, 2> serial(BitView bits, unsigned m);
Outcome approximate_entropy(BitView bits, unsigned m);

// Extended kernels ---------------------------------------------------------

Outcome binary_matrix_rank(BitView bits);
/// One result per aperiodic template of length m, labelled by its bits.
std::vector<LabelledOutcome> non_overlapping_template(BitView bits, unsigned m = 9);
Outcome overlapping_template(BitView bits);
Outcome universal(BitView bits);
Outcome linear_complexity(BitView bits, std::size_t block_len = 500);
/// One result per state x in {-4..-1, 1..4}.
std::vector<LabelledOutcome> random_excursions(BitView bits);
/// One result per state x in {-9..-1, 1..9}.
std::vector<LabelledOutcome> random_excursions_variant(BitView bits);

/// All binary words of length m without a proper border, in increasing order.
std::vector<std::uint32_t> aperiodic_templates(unsigned m);

/// Linear complexity of a GF(2) sequence (Berlekamp-Massey).
std::size_t berlekamp_massey(BitView bits);

// Suite --------------------------------------------------------------------

enum class Suite { core, full };

Suite parse_suite(std::string_view name);
std::string_view suite_name(Suite s);

inline constexpr double kDefaultAlpha = 0.01;

struct TestRecord {
  std::string name;
  std::string variant;             // empty for single-valued tests
  std::optional<double> statistic;  // unset when skipped
  std::optional<double> p_value;    // unset when skipped
  bool pass = false;                // p_value >= alpha
  bool skipped = false;
  std::string note;  // reason for skipping
};

struct TestReport {
  double alpha = kDefaultAlpha;
  std::size_t n_bits = 0;
  Suite suite = Suite::core;
  std::vector<TestRecord> records;
  std::size_t suite_pass_count = 0;  // executed records that pass
  std::size_t executed_count = 0;

  bool all_passed() const { return suite_pass_count == executed_count; }
  /// Names of tests with at least one executed, failing record.
  std::vector<std::string> failed_tests() const;
};

struct SuiteOptions {
  std::size_t block_frequency_len = 128;
  unsigned serial_m = 0;  // 0: min(16, floor(log2 n) - 3)
  unsigned apen_m = 0;    // 0: min(10, floor(log2 n) - 6)
  bool parallel = false;  // evaluate tests on worker threads
};

/// Throws InputError if any value is outside {0, 1}.
TestReport run_suite(BitView bits, double alpha = kDefaultAlpha, Suite suite = Suite::core,
                     const SuiteOptions& options = {});

nlohmann::json to_json(const TestReport& report);
TestReport report_from_json(const nlohmann::json& j);

/// Aligned table: name, p-value to 6 decimals, PASS/FAIL/SKIP.
std::string format_table(const TestReport& report);

/// Throws InputError unless every value is 0 or 1.
void require_bits(BitView bits);

}  // namespace qrng::stattests
