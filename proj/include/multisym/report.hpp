#pragma once

#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace multisym {

/// Shortest round-trip decimal form of a double, locale-independent.
std::string format_double(double v);

/// Minimal CSV writer: mandatory header, comma separator, '.' decimal,
/// quoting only where the content requires it.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  void add_row(const std::vector<double>& cells);
  std::string str() const;
  void write_file(const std::string& path) const;

 private:
  static std::string escape(const std::string& cell);
  std::string buffer_;
  size_t columns_ = 0;
};

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Deterministic per-module substream derivation from one run seed.
uint64_t split_seed(uint64_t run_seed, const std::string& module_name, uint64_t counter = 0);

/// Worker cap: MULTISYM_THREADS when set, hardware concurrency otherwise.
int max_worker_threads();

/// Index-parallel loop with deterministic per-index work; results must be
/// written to disjoint slots by the callable.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace multisym
