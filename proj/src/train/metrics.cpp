#include "codelab/train/metrics.hpp"

#include "codelab/errors.hpp"

#include <charconv>
#include <sstream>

namespace codelab::train {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string metrics_header(std::size_t population) {
  std::string h = "iter,algo,regret,difficulty,n_hat,non_skip,active_count,passive_count";
  for (std::size_t i = 0; i < population; ++i) h += ",return_agent_" + std::to_string(i);
  h += ",best_return,best_agent,generator_reward,eval_success";
  return h;
}

std::string metrics_row(const MetricsRecord& r) {
  std::string s = std::to_string(r.iteration) + "," + r.algo + "," + format_double(r.regret) + "," +
                  format_double(r.difficulty) + "," + format_double(r.n_hat) + "," + std::to_string(r.non_skip) +
                  "," + std::to_string(r.active_count) + "," + std::to_string(r.passive_count);
  for (double x : r.agent_returns) s += "," + format_double(x);
  s += "," + format_double(r.best_return) + "," + std::to_string(r.best_agent) + "," +
       format_double(r.generator_reward) + ",";
  if (r.eval_success) s += format_double(*r.eval_success);
  return s;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double to_double(const std::string& s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("bad number '" + s + "' in metrics");
  return x;
}

std::size_t to_size(const std::string& s) {
  std::size_t x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("bad count '" + s + "' in metrics");
  return x;
}

}  // namespace

MetricsRecord parse_metrics_row(const std::string& header, const std::string& row) {
  const auto names = split(header), cells = split(row);
  if (names.size() != cells.size()) throw IoError("metrics row has " + std::to_string(cells.size()) + " cells, header has " + std::to_string(names.size()));
  MetricsRecord r;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& n = names[i];
    const std::string& c = cells[i];
    if (n == "iter") r.iteration = to_size(c);
    else if (n == "algo") r.algo = c;
    else if (n == "regret") r.regret = to_double(c);
    else if (n == "difficulty") r.difficulty = to_double(c);
    else if (n == "n_hat") r.n_hat = to_double(c);
    else if (n == "non_skip") r.non_skip = to_size(c);
    else if (n == "active_count") r.active_count = to_size(c);
    else if (n == "passive_count") r.passive_count = to_size(c);
    else if (n.rfind("return_agent_", 0) == 0) r.agent_returns.push_back(to_double(c));
    else if (n == "best_return") r.best_return = to_double(c);
    else if (n == "best_agent") r.best_agent = to_size(c);
    else if (n == "generator_reward") r.generator_reward = to_double(c);
    else if (n == "eval_success") { if (!c.empty()) r.eval_success = to_double(c); }
    else throw IoError("unknown metrics column '" + n + "'");
  }
  return r;
}

std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read metrics " + path.string());
  std::string header, line;
  if (!std::getline(in, header)) throw IoError("empty metrics file " + path.string());
  std::vector<MetricsRecord> out;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(parse_metrics_row(header, line));
  return out;
}

MetricsSink::MetricsSink(const std::filesystem::path& path, std::size_t population)
    : path_(path), out_(path, std::ios::trunc), population_(population) {
  if (!out_) throw IoError("cannot write metrics " + path.string());
  out_ << metrics_header(population_) << '\n';
  out_.flush();
}

void MetricsSink::emit(const MetricsRecord& r) {
  if (r.agent_returns.size() != population_) throw IoError("metrics record has the wrong population size");
  out_ << metrics_row(r) << '\n';
  out_.flush();
  if (!out_) throw IoError("write failed on " + path_.string());
}

}  // namespace codelab::train
