#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>

#include "core/analysis.hpp"
#include "core/transmission.hpp"

namespace gfet {

// Emits interface.csv, bulk_1.csv, bulk_2.csv, multipliers_1.csv,
// multipliers_2.csv for a converged solve.
void emit_solution_csv(const DeviceConfig& cfg, const BlockSystem& sys,
                       const SelfConsistentResult& result, const std::string& out_dir);

// Shared per-command solve cache: convergence studies and tables reuse the
// expensive reference solutions.
class RunCache {
 public:
  struct Entry {
    std::shared_ptr<SelfConsistentSolver> solver;
    std::map<int, std::shared_ptr<SelfConsistentResult>> by_centivolt;
  };

  std::shared_ptr<SelfConsistentResult> solve(const DeviceConfig& cfg, double V_DS,
                                              std::ostream* log);
  const SelfConsistentSolver& solver(const DeviceConfig& cfg);

 private:
  Entry& entry_for(const DeviceConfig& cfg);
  std::map<std::string, Entry> entries_;
};

void run_solve(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log);
void run_sweep(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log);
void run_converge(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log);
void run_compare(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log);
void run_tables(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log);

// Dispatches one of the five commands above; throws ConfigError for an
// unknown command name.
void run_command(const DeviceConfig& cfg, const std::string& command,
                 const std::string& out_dir, std::ostream* log);

}  // namespace gfet
