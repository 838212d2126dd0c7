#include "dclife/sweep.hpp"

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "dclife/approx_ph.hpp"
#include "dclife/montecarlo.hpp"
#include "dclife/qbd.hpp"
#include "dclife/stationary.hpp"

namespace dclife::sweep {

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<int> d_values(const RunSpec& spec) {
  if (!spec.d_range.has_value()) return {spec.params.d};
  const auto [lo, hi] = *spec.d_range;
  if (lo < 1 || hi < lo) {
    throw InvalidSpec("d range must be ascending and start at >= 1");
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(hi - lo) + 1);
  for (int d = lo; d <= hi; ++d) out.push_back(d);
  return out;
}

struct MethodSet {
  bool approx = false;
  bool qbd = false;
  bool sim = false;
};

MethodSet methods_for(const RunSpec& spec) {
  switch (spec.command) {
    case Command::approx:
      return {true, false, false};
    case Command::qbd:
      return {false, true, false};
    case Command::simulate:
      if (spec.samples < 1) {
        throw InvalidSpec("simulate requires samples >= 1");
      }
      return {false, false, true};
    case Command::sweep:
      return {true, true, spec.samples > 0};
    case Command::stationary:
      throw InvalidSpec("stationary does not produce a lifetime table");
  }
  throw InvalidSpec("unknown command");
}

void evaluate_analytic(const RunSpec& spec, const MethodSet& methods,
                       SweepRow& row) {
  const ModelParams params = validate_params(spec.params.lambda,
                                             spec.params.beta, spec.params.mu,
                                             row.d);
  if (methods.approx) {
    try {
      row.mean_approx = approx_ph::mean_lifetime_approx(params).mean;
    } catch (const std::exception& e) {
      throw Error(std::string("method approx_ph: ") + e.what());
    }
  }
  if (methods.qbd) {
    try {
      qbd::QbdOptions opts;
      opts.tol = spec.tol;
      const auto report = qbd::mean_lifetime_qbd(params, opts);
      row.mean_qbd = report.mean;
      row.l_max = report.meta.truncation_level;
    } catch (const std::exception& e) {
      throw Error(std::string("method qbd: ") + e.what());
    }
  }
}

void evaluate_simulation(const RunSpec& spec, SweepRow& row) {
  const ModelParams params = validate_params(spec.params.lambda,
                                             spec.params.beta, spec.params.mu,
                                             row.d);
  montecarlo::SimConfig config;
  config.params = params;
  config.model = montecarlo::SimModel::physical_2d;
  config.samples = spec.samples;
  // one substream per d so sweep points stay independent
  config.seed = spec.seed + static_cast<std::uint64_t>(row.d) * 0x9E3779B9ULL;
  const auto res = montecarlo::simulate_lifetime(config);
  row.mean_sim = res.mean;
  row.sim_se = res.std_error;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunSpec& spec) {
  const MethodSet methods = methods_for(spec);
  const std::vector<int> ds = d_values(spec);

  // Reject any invalid point before evaluating anything, so a bad range
  // cannot burn work on its valid prefix.
  for (int d : ds) {
    try {
      validate_params(spec.params.lambda, spec.params.beta, spec.params.mu, d);
    } catch (const std::exception& e) {
      throw Error("d=" + std::to_string(d) + ": " + e.what());
    }
  }

  std::vector<SweepRow> table(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) table[i].d = ds[i];

  // Analytic columns are deterministic and independent per d; evaluate them
  // concurrently. Errors are carried out of the loop and rethrown with the
  // offending point named.
  std::string failure;
  if (methods.approx || methods.qbd) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(table.size()); ++i) {
      try {
        evaluate_analytic(spec, methods, table[i]);
      } catch (const std::exception& e) {
        const std::string msg =
            "d=" + std::to_string(table[i].d) + ": " + e.what();
#ifdef _OPENMP
#pragma omp critical(dclife_sweep_failure)
#endif
        if (failure.empty()) failure = msg;
      }
    }
    if (!failure.empty()) throw Error(failure);
  }

  // The simulation column runs per d in order; the simulator parallelizes
  // over replications internally.
  if (methods.sim) {
    for (auto& row : table) {
      try {
        evaluate_simulation(spec, row);
      } catch (const std::exception& e) {
        throw Error("method simulation at d=" + std::to_string(row.d) + ": " +
                    e.what());
      }
    }
  }
  return table;
}

std::string to_csv(const std::vector<SweepRow>& table) {
  std::string out = "d,mean_approx,mean_qbd,mean_sim,sim_se,L_max\n";
  for (const auto& row : table) {
    out += std::to_string(row.d);
    for (const auto& cell : {row.mean_approx, row.mean_qbd, row.mean_sim,
                             row.sim_se}) {
      out += ',';
      if (cell.has_value()) out += format_number(*cell);
    }
    out += ',';
    if (row.l_max.has_value()) out += std::to_string(*row.l_max);
    out += '\n';
  }
  return out;
}

std::string to_json(const std::vector<SweepRow>& table) {
  // Hand-assembled so numbers keep the same 12-digit form as the CSV and
  // emission stays byte-deterministic.
  std::string out = "[\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& row = table[i];
    out += "  {\"d\": " + std::to_string(row.d);
    const auto field = [&out](const char* key,
                              const std::optional<double>& cell) {
      out += ", \"";
      out += key;
      out += "\": ";
      out += cell.has_value() ? format_number(*cell) : "null";
    };
    field("mean_approx", row.mean_approx);
    field("mean_qbd", row.mean_qbd);
    field("mean_sim", row.mean_sim);
    field("sim_se", row.sim_se);
    out += ", \"L_max\": ";
    out += row.l_max.has_value() ? std::to_string(*row.l_max) : "null";
    out += i + 1 < table.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

std::vector<SweepRow> parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("malformed table: ") + e.what());
  }
  if (!doc.is_array()) throw InvalidSpec("table must be a JSON array");

  std::vector<SweepRow> table;
  table.reserve(doc.size());
  for (const auto& item : doc) {
    SweepRow row;
    row.d = item.at("d").get<int>();
    const auto opt = [&item](const char* key) -> std::optional<double> {
      const auto& v = item.at(key);
      if (v.is_null()) return std::nullopt;
      return v.get<double>();
    };
    row.mean_approx = opt("mean_approx");
    row.mean_qbd = opt("mean_qbd");
    row.mean_sim = opt("mean_sim");
    row.sim_se = opt("sim_se");
    const auto& lm = item.at("L_max");
    if (!lm.is_null()) row.l_max = lm.get<std::size_t>();
    table.push_back(row);
  }
  return table;
}

namespace {

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!std::cout.good()) throw IoError("failed to write to stdout");
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open output file: " + path);
  file << text;
  file.flush();
  if (!file.good()) throw IoError("failed to write output file: " + path);
}

}  // namespace

void emit(const std::vector<SweepRow>& table, OutputFormat format,
          const std::string& path) {
  if (table.empty()) throw InvalidSpec("refusing to emit an empty table");
  write_text(format == OutputFormat::csv ? to_csv(table) : to_json(table),
             path);
}

std::vector<std::pair<std::size_t, double>> run_stationary(
    const RunSpec& spec) {
  const auto dist = stationary::poisson_stationary(spec.params, spec.tol);
  std::vector<std::pair<std::size_t, double>> table;
  table.reserve(dist.probs.size());
  for (std::size_t k = 0; k < dist.probs.size(); ++k) {
    table.emplace_back(k, dist.probs[k]);
  }
  return table;
}

void emit_stationary(const std::vector<std::pair<std::size_t, double>>& table,
                     OutputFormat format, const std::string& path) {
  if (table.empty()) throw InvalidSpec("refusing to emit an empty table");
  std::string out;
  if (format == OutputFormat::csv) {
    out = "k,theta\n";
    for (const auto& [k, theta] : table) {
      out += std::to_string(k) + ',' + format_number(theta) + '\n';
    }
  } else {
    out = "[\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
      out += "  {\"k\": " + std::to_string(table[i].first) +
             ", \"theta\": " + format_number(table[i].second);
      out += i + 1 < table.size() ? "},\n" : "}\n";
    }
    out += "]\n";
  }
  write_text(out, path);
}

}  // namespace dclife::sweep
