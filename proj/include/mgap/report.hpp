#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mgap/config.hpp"

namespace mgap {

// One line of the suite report. Optional fields print as empty CSV cells.
struct ReportRow {
  std::string task;
  std::string channel;
  std::optional<double> p;
  std::optional<double> c2_exact;
  std::optional<double> cp_lower;
  std::optional<double> cp_upper;
  std::string upper_source;
  std::optional<long> iterations;
  std::optional<bool> converged;
  std::optional<double> margin;
  bool pass = true;
  std::string reason;
  std::optional<AlgebraElement> witness;  // emitted by the JSON format only
};

// Deterministic given (config, seed): byte-identical output across runs.
std::vector<ReportRow> run_suite(const ExperimentConfig& cfg);

std::string format_csv(const std::vector<ReportRow>& rows);
std::string format_json(const std::vector<ReportRow>& rows);
void write_report(const std::vector<ReportRow>& rows, const std::string& path,
                  const std::string& format);

// Deterministic parallel map: results land by index regardless of schedule.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace mgap
