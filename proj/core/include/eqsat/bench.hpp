#pragma once

#include <any>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "eqsat/egraph.hpp"
#include "eqsat/language.hpp"

namespace eqsat {

std::string to_string(RebuildStrategy s);

/// Measurements of one workload under one rebuild strategy.
struct BenchRecord {
  std::string workload;
  RebuildStrategy strategy = RebuildStrategy::Deferred;
  size_t iters = 0;
  uint64_t rewrites = 0;  // productive applications (or external merges for synthetic workloads)
  uint64_t repairs = 0;
  uint64_t hashcons_updates = 0;
  double congruence_ms = 0;  // apply + rebuild
  double total_ms = 0;
  size_t enodes = 0;
  size_t eclasses = 0;
  /// Per iteration: (cumulative rewrites, cumulative congruence ms).
  std::vector<std::pair<uint64_t, double>> series;
};

/// Result of a single run, with enough of the final graph kept to compare
/// strategies.
struct WorkloadOutcome {
  BenchRecord record;
  std::vector<std::string> extracted;  // best term per root, ast-size
  std::any graph;
  /// Compares this outcome's final graph with another outcome of the same workload.
  std::function<bool(const WorkloadOutcome &other, std::string *why)> same_partition;
};

struct Workload {
  std::string name;
  std::function<WorkloadOutcome(RebuildStrategy)> run;
};

/// f_1(x) .. f_n(x), y_1 .. y_n, then merge(x, y_i) for every i.
Workload hashcons_workload(size_t n);
/// w chains f_1(f_2(..f_d(x_i))) and merges x_1 with every x_i.
Workload width_depth_workload(size_t w, size_t d);
/// Equality saturation of math terms with the math rules (every-rule scheduler).
Workload math_workload(std::string name, std::vector<std::string> terms, size_t iters);
/// Equality saturation of lambda terms with the lambda rules.
Workload lambda_workload(std::string name, std::vector<std::string> terms, size_t iters);

/// Width/depth, hashcons, math and lambda workloads used by the harness.
std::vector<Workload> default_corpus();

struct BenchOptions {
  size_t repetitions = 5;
  /// Throw when strategies disagree on the final partition or extracted terms.
  bool verify = true;
};

struct BenchResult {
  std::vector<BenchRecord> records;  // medians over repetitions, Immediate then Deferred per workload
  std::vector<std::string> mismatches;
};

/// Runs every workload under both strategies. Counters must agree across
/// repetitions; timings are medians.
BenchResult run_bench(const std::vector<Workload> &workloads, const BenchOptions &opts = {});

struct SpeedupReport {
  struct Entry {
    std::string workload;
    double speedup = 0;  // immediate congruence time / deferred congruence time
    uint64_t repairs_immediate = 0;
    uint64_t repairs_deferred = 0;
    /// (cumulative rewrites, speedup so far) per iteration
    std::vector<std::pair<uint64_t, double>> series;
  };
  std::vector<Entry> entries;
  double geomean_speedup = 0;
  /// Spearman rank correlation of repairs vs congruence time over all records.
  double repair_time_spearman = 0;
};

SpeedupReport speedup_report(const std::vector<BenchRecord> &records);

double spearman(const std::vector<double> &x, const std::vector<double> &y);

void write_csv(std::ostream &os, const std::vector<BenchRecord> &records);
void write_json_lines(std::ostream &os, const std::vector<BenchRecord> &records);
std::string to_json(const SpeedupReport &r, int indent = 2);

/// `n` identities sharing one larger common subterm, for batched checking.
std::vector<std::pair<Term, Term>> batch_identity_corpus(size_t n);

}  // namespace eqsat
