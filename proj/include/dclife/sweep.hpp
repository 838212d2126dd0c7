#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dclife/error.hpp"
#include "dclife/model.hpp"

namespace dclife::sweep {

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class Command { stationary, approx, qbd, simulate, sweep };
enum class OutputFormat { csv, json };

struct RunSpec {
  Command command = Command::sweep;
  ModelParams params;
  std::optional<std::pair<int, int>> d_range;  // inclusive; unset = params.d
  double tol = 1e-8;
  std::size_t samples = 0;  // 0 = no simulation column
  std::uint64_t seed = 42;
  OutputFormat format = OutputFormat::csv;
  std::string out;  // empty = stdout
};

// One evaluated point. Columns a method did not produce stay unset and are
// emitted as empty CSV fields / JSON nulls.
struct SweepRow {
  int d = 0;
  std::optional<double> mean_approx;
  std::optional<double> mean_qbd;
  std::optional<double> mean_sim;
  std::optional<double> sim_se;
  std::optional<std::size_t> l_max;
};

// Evaluates the methods selected by spec.command at every d in the range,
// rows ordered by d. Throws with the offending d and method named; nothing
// is emitted on error.
std::vector<SweepRow> run_sweep(const RunSpec& spec);

// Serialization at 12 significant digits, newline-terminated; parsing an
// emitted JSON table and re-emitting it reproduces the bytes.
std::string to_csv(const std::vector<SweepRow>& table);
std::string to_json(const std::vector<SweepRow>& table);
std::vector<SweepRow> parse_json(const std::string& text);

// Writes the table to `path` (empty = stdout). Empty tables are rejected.
void emit(const std::vector<SweepRow>& table, OutputFormat format,
          const std::string& path);

// Stationary-law table for the `stationary` command: one (k, theta_k) row
// per retained level.
std::vector<std::pair<std::size_t, double>> run_stationary(
    const RunSpec& spec);
void emit_stationary(const std::vector<std::pair<std::size_t, double>>& table,
                     OutputFormat format, const std::string& path);

}  // namespace dclife::sweep
