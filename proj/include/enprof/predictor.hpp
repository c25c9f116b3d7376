#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace enprof::predictor {

/// Per-network counter tuple; any field may be absent when an operation does
/// not need it.
struct CounterRecord {
  std::string net;
  std::optional<std::uint64_t> mac;
  std::optional<std::uint64_t> simd;
  std::optional<std::uint64_t> bus_access;
  std::optional<double> energy_mj;
  std::optional<double> time_s;
};

/// Single-slope least-squares fit through the origin (no intercept). The
/// slope unit depends on the role: SIMD per MAC or bus accesses per SIMD.
struct OriginModel1 {
  double slope = 0;
  std::vector<std::string> trained_on;

  double predict(double x) const { return slope * x; }
  bool operator==(const OriginModel1&) const = default;
};

/// Two-regressor energy model through the origin:
/// energy = bus_coeff * bus_accesses + simd_coeff * simd.
struct EnergyModel2 {
  double bus_coeff = 0;   // mJ per bus access
  double simd_coeff = 0;  // mJ per SIMD instruction
  std::vector<std::string> trained_on;

  bool operator==(const EnergyModel2&) const = default;
};

/// slope = sum(x*y) / sum(x^2); requires at least one pair and a nonzero
/// regressor.
OriginModel1 fit_origin_1d(Eigen::Ref<const Eigen::VectorXd> x,
                           Eigen::Ref<const Eigen::VectorXd> y,
                           std::vector<std::string> names = {});

/// Minimizes sum((y - x1*a - x2*b)^2) via the explicit 2x2 normal equations.
/// Requires >= 2 rows and a normal matrix whose determinant exceeds 1e-12 of
/// its scale (collinear regressors are rejected).
EnergyModel2 fit_origin_2d(Eigen::Ref<const Eigen::VectorXd> bus,
                           Eigen::Ref<const Eigen::VectorXd> simd,
                           Eigen::Ref<const Eigen::VectorXd> energy,
                           std::vector<std::string> names = {});

double predict_energy(double bus, double simd, const EnergyModel2& model);

struct ChainPrediction {
  double simd_hat = 0;
  double bus_hat = 0;
  double energy_hat_mj = 0;
};

/// Chains the three models: MAC -> SIMD -> bus accesses -> energy.
ChainPrediction chain_predict(double mac, const OriginModel1& simd_from_mac,
                              const OriginModel1& bus_from_simd,
                              const EnergyModel2& energy_model);

/// |predicted - actual| / actual * 100; requires actual > 0.
double relative_error(double predicted, double actual);

struct ErrorSummary {
  double mean_pct = 0;
  double stddev_pct = 0;  // sample standard deviation (n-1); 0 when n == 1
  std::size_t n = 0;
};

ErrorSummary summarize_errors(std::span<const double> errors_pct);

struct FoldResult {
  std::string excluded_net;
  EnergyModel2 model;
  std::vector<std::pair<std::string, double>> train_errors_pct;
  double test_error_pct = 0;
};

struct LoocvResult {
  std::vector<FoldResult> folds;
  EnergyModel2 all_nets;
  std::vector<std::pair<std::string, double>> all_nets_train_errors_pct;
};

/// One fold per record: fit on the pool minus that record, report per-net
/// train errors and the excluded record's test error, plus a fit over the
/// whole pool. Every record needs bus, simd and energy; the pool must hold at
/// least 3 records.
LoocvResult loocv(const std::vector<CounterRecord>& pool);

/// Counters CSV: header `net,mac,simd,bus_access,energy_mj,time_s`, absent
/// values empty.
std::vector<CounterRecord> parse_counters(const std::string& csv_text);
std::string counters_csv(const std::vector<CounterRecord>& records);

OriginModel1 fit_simd_from_mac(const std::vector<CounterRecord>& records);
OriginModel1 fit_bus_from_simd(const std::vector<CounterRecord>& records);
EnergyModel2 fit_energy(const std::vector<CounterRecord>& records);

using Model = std::variant<OriginModel1, EnergyModel2>;

/// Model documents are JSON with `kind` in {origin1, energy2}, coefficients
/// at full precision and the `trained_on` list; load(save(m)) == m. Unknown
/// or missing fields are rejected.
std::string save_model(const Model& model);
Model load_model(const std::string& document);

}  // namespace enprof::predictor
