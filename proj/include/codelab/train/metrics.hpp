#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace codelab::train {

struct MetricsRecord {
  std::size_t iteration = 0;
  std::string algo;
  double regret = 0.0;
  double difficulty = 0.0;
  double n_hat = 0.0;
  std::size_t non_skip = 0;
  std::size_t active_count = 0;
  std::size_t passive_count = 0;
  std::vector<double> agent_returns;  // per-agent M-episode means
  double best_return = 0.0;
  std::size_t best_agent = 0;
  double generator_reward = 0.0;
  std::optional<double> eval_success;
  double wall_seconds = 0.0;  // kept out of the CSV
};

inline constexpr int kMetricsSchema = 1;

/// Shortest round-trip decimal form.
std::string format_double(double x);

std::string metrics_header(std::size_t population);
std::string metrics_row(const MetricsRecord& r);
MetricsRecord parse_metrics_row(const std::string& header, const std::string& row);
std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path);

/// Appends rows to a CSV file; the header is written on open.
class MetricsSink {
 public:
  MetricsSink(const std::filesystem::path& path, std::size_t population);
  void emit(const MetricsRecord& r);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t population_;
};

}  // namespace codelab::train
