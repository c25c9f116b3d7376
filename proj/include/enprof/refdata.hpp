#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enprof/predictor.hpp"

namespace enprof::refdata {

/// Reference measurements for ten ConvNets collected on a Jetson TX1
/// (single-threaded CPU inference under Caffe), embedded verbatim from the
/// source study's result tables together with the model outputs reported
/// there. Values that two tables print with different rounding are stored
/// per table, never merged; known misprints carry both the printed and the
/// corrected value.

struct NetInfo {
  std::string net;          // canonical id used across all tables
  std::string display;      // name as printed
  double top5_accuracy_pct = 0;
  std::string dataset;
  int conv_layers = 0;
  int fc_layers = 0;
  double parameters = 0;
  double model_size_mb = 0;
};

/// One leave-one-out fold: coefficients fitted with `net` excluded, the
/// energy predicted for the excluded net, and the published error columns.
struct FoldRow {
  std::string net;
  double bus_coeff = 0;   // x1, mJ per bus access
  double simd_coeff = 0;  // x2, mJ per SIMD instruction
  double predicted_energy_mj = 0;
  double measured_energy_mj = 0;
  double measured_time_s = 0;
  double train_mean_pct = 0;
  double train_std_pct = 0;
  int train_std_decimals = 2;  // squeezeNetRes is printed at one decimal
  double test_error_pct = 0;
};

struct AllNetsFit {
  double bus_coeff = 0;
  double simd_coeff = 0;
  double train_mean_pct = 0;
  double train_std_pct = 0;
};

struct SimdRow {
  std::string net;
  std::uint64_t simd_measured = 0;
  std::uint64_t mac = 0;
  std::uint64_t simd_predicted = 0;
  double rel_error_pct = 0;
  bool training = false;
};

struct BusRow {
  std::string net;
  std::uint64_t simd_hat_printed = 0;  // column repeats measured SIMD (flagged)
  std::uint64_t bus_measured = 0;
  std::uint64_t bus_predicted_printed = 0;
  std::uint64_t bus_predicted = 0;  // corrected where the printed value is a typo
  double rel_error_pct = 0;
};

struct EnergyRow {
  std::string net;
  double predicted_energy_mj = 0;
  double measured_energy_mj = 0;
  double measured_time_s = 0;
  double rel_error_pct = 0;
};

struct Aggregate {
  std::string label;
  double mean_pct = 0;
  double std_pct = 0;
  int mean_decimals = 2;
  int std_decimals = 2;
};

struct CorrelationEntry {
  std::string label;  // e.g. "alexNetGPU"
  double pearson_r = 0;
};

/// A cell whose printed value cannot be reproduced from the table's own
/// companion cells; stored so reports can show both readings.
struct Discrepancy {
  std::string cell;
  std::string published;
  std::string recomputed;
  std::string note;
};

struct Dataset {
  std::vector<NetInfo> nets;
  std::vector<FoldRow> folds;
  AllNetsFit all_nets;
  Aggregate fold_test_aggregate;
  std::vector<SimdRow> simd_rows;
  double simd_slope_printed = 0;
  Aggregate simd_all_aggregate;
  Aggregate simd_test_aggregate;
  std::vector<BusRow> bus_rows;
  double bus_slope_printed = 0;
  Aggregate bus_without_mobilenet;
  Aggregate bus_with_mobilenet;
  std::vector<EnergyRow> energy_rows;
  Aggregate energy_without_mobilenet;
  Aggregate energy_with_mobilenet;  // printed as 17.33 +- 12.2: see discrepancies
  std::vector<CorrelationEntry> correlations;
  std::vector<Discrepancy> discrepancies;

  const NetInfo* find_net(const std::string& net) const;
  const SimdRow* find_simd(const std::string& net) const;
  const BusRow* find_bus(const std::string& net) const;
  const EnergyRow* find_energy(const std::string& net) const;
  const FoldRow* find_fold(const std::string& net) const;
  const CorrelationEntry* find_correlation(const std::string& label) const;
};

/// The immutable embedded dataset.
const Dataset& dataset();

/// The dataset as counter records consumable by the predictor module: MAC,
/// SIMD and bus counts for all ten nets, energies/times from the fold table
/// for the six training nets and from the energy table for the rest.
std::vector<predictor::CounterRecord> counter_records();
std::vector<predictor::CounterRecord> training_records();

enum class CellStatus { Pass, Fail, Noted };

struct ReproCell {
  std::string table;
  std::string cell;
  double published = 0;
  double recomputed = 0;
  double deviation = 0;     // relative fraction or percentage points, per tolerance
  std::string tolerance;    // human-readable description
  CellStatus status = CellStatus::Pass;
  std::string note;
};

struct ReproReport {
  std::vector<ReproCell> cells;
  bool all_pass() const;  // Noted cells do not fail a report
};

/// Recomputes every derivable cell of the requested table ("2", "3", "4",
/// "5") or the aggregate rows of all four ("aggregates"), comparing against
/// the published values at each cell's documented tolerance. Published
/// values are treated as rounded to their printed precision: absolute
/// tolerances widen by half an ulp of the printed value.
ReproReport reproduce(const std::string& table_id);

}  // namespace enprof::refdata
