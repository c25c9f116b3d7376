// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned here, next to each check. Published aggregates are
// compared at their printed precision: absolute bands widen by half an ulp
// of the printed value (a value printed as "6.0" carries a +-0.05 quantum).

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "enprof/netmodel.hpp"
#include "enprof/predictor.hpp"
#include "enprof/refdata.hpp"
#include "enprof/tracelab.hpp"
#include "golden.hpp"

using namespace enprof;

namespace {

int g_failures = 0;

struct Criterion {
  std::string id;
  std::string title;
  bool pass = true;
  std::vector<std::string> notes;

  Criterion(std::string id_, std::string title_) : id(std::move(id_)), title(std::move(title_)) {}

  void check(bool ok, const std::string& detail) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED: " + detail);
    }
  }

  void note(const std::string& detail) { notes.push_back(detail); }

  ~Criterion() {
    std::printf("[%s] %s %s\n", pass ? "PASS" : "FAIL", id.c_str(), title.c_str());
    for (const auto& line : notes) std::printf("       %s\n", line.c_str());
    if (!pass) ++g_failures;
  }
};

std::string fmt(const char* format, ...) {
  char buffer[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double rel_dev(double ours, double reference) {
  return std::abs(ours - reference) / std::abs(reference);
}

double half_ulp(int decimals) { return 0.5 * std::pow(10.0, -decimals); }

// ---------------------------------------------------------------- criteria

void ac1_cost_model() {
  Criterion c{"AC-1", "cost model: bundled AlexNet definition reproduces the MAC total"};
  auto net = netmodel::parse_network(slurp(std::string(ENPROF_DATA_DIR) + "/alexnet.json"));
  auto costs = netmodel::network_costs(net);
  c.check(costs.layers.size() == golden::kAlexNetLayerMacs.size(), "expected 5 conv layers");
  for (std::size_t i = 0; i < costs.layers.size(); ++i)
    c.check(costs.layers[i].mac == golden::kAlexNetLayerMacs[i],
            fmt("%s: mac %llu != oracle %llu", costs.layers[i].name.c_str(),
                (unsigned long long)costs.layers[i].mac,
                (unsigned long long)golden::kAlexNetLayerMacs[i]));
  c.check(costs.total_conv_mac == golden::kAlexNetTotalMac,
          fmt("total %llu != 665784864", (unsigned long long)costs.total_conv_mac));
  c.note(fmt("total_conv_mac = %llu (exact); per-layer sub-sums verified against the "
             "arbitrary-precision oracle (tests/oracle/recompute.py)",
             (unsigned long long)costs.total_conv_mac));
}

void ac2_simd_predictor() {
  Criterion c{"AC-2", "SIMD predictor: slope and all ten predicted-SIMD cells"};
  auto model = predictor::fit_simd_from_mac(refdata::training_records());
  for (const auto& row : refdata::dataset().simd_rows) {
    double predicted = model.predict(static_cast<double>(row.mac));
    double dev = rel_dev(predicted, static_cast<double>(row.simd_predicted));
    c.check(dev <= 0.005, fmt("%s: predicted SIMD off by %.4f%%", row.net.c_str(), dev * 100));
  }
  bool truncates = std::floor(model.slope * 100.0) == 24.0;
  c.check(truncates, fmt("slope %.6f does not truncate to 0.24", model.slope));
  c.note(fmt("slope = %.6f; prints as 0.24 at two truncated decimals (SIMD width 4)",
             model.slope));
}

void ac3_bus_predictor() {
  Criterion c{"AC-3", "bus predictor: slope 0.0663 and the predicted-bus column"};
  auto model = predictor::fit_bus_from_simd(refdata::training_records());
  double slope_dev = rel_dev(model.slope, 0.0663);
  c.check(slope_dev <= 0.01, fmt("slope %.6f deviates %.3f%% from 0.0663", model.slope,
                                 slope_dev * 100));
  const auto& d = refdata::dataset();
  for (const auto& row : d.bus_rows) {
    double predicted = model.predict(static_cast<double>(d.find_simd(row.net)->simd_predicted));
    double dev = rel_dev(predicted, static_cast<double>(row.bus_predicted));
    c.check(dev <= 0.01, fmt("%s: predicted bus off by %.4f%%", row.net.c_str(), dev * 100));
  }
  c.note(fmt("slope = %.6f; squeezeNetRes compared against the corrected cell 14033041",
             model.slope));
}

void ac4_energy_published_coefficients() {
  Criterion c{"AC-4", "energy model: published fold coefficients reproduce predicted energy"};
  const auto& d = refdata::dataset();
  for (const auto& fold : d.folds) {
    predictor::EnergyModel2 model{fold.bus_coeff, fold.simd_coeff, {}};
    double predicted =
        predictor::predict_energy(static_cast<double>(d.find_bus(fold.net)->bus_measured),
                                  static_cast<double>(d.find_simd(fold.net)->simd_measured),
                                  model);
    double dev = rel_dev(predicted, fold.predicted_energy_mj);
    c.check(dev <= 0.005, fmt("%s fold: %.2f mJ vs published %.2f (%.4f%%)", fold.net.c_str(),
                              predicted, fold.predicted_energy_mj, dev * 100));
    if (fold.net == "alexNet")
      c.note(fmt("alexNet fold: %.2f mJ vs published 951.28", predicted));
  }
}

void ac5_energy_our_fit() {
  Criterion c{"AC-5", "energy model: our two-regressor fit on the six training nets"};
  auto records = refdata::training_records();
  auto model = predictor::fit_energy(records);
  c.check(model.bus_coeff > 0 && model.simd_coeff > 0, "coefficients must be positive");
  c.check(rel_dev(model.bus_coeff, 3.34e-5) <= 0.10,
          fmt("x1 %.4e not within 10%% of 3.34e-05", model.bus_coeff));
  c.check(rel_dev(model.simd_coeff, 3.18e-6) <= 0.10,
          fmt("x2 %.4e not within 10%% of 3.18e-06", model.simd_coeff));
  std::vector<double> errors;
  for (const auto& record : records)
    errors.push_back(predictor::relative_error(
        predictor::predict_energy(static_cast<double>(*record.bus_access),
                                  static_cast<double>(*record.simd), model),
        *record.energy_mj));
  auto summary = predictor::summarize_errors(errors);
  c.check(summary.mean_pct <= 6.0, fmt("mean train error %.2f%% > 6%%", summary.mean_pct));
  c.note(fmt("x1 = %.6e, x2 = %.6e, mean train error %.2f%% (reference: 4.81 +- 3.19)",
             model.bus_coeff, model.simd_coeff, summary.mean_pct));
}

void aggregate_check(Criterion& c, const std::string& label, const std::vector<double>& errors,
                     double mean_ref, double std_ref, double mean_tol, int mean_decimals,
                     double std_tol, int std_decimals) {
  auto summary = predictor::summarize_errors(errors);
  double mean_band = mean_tol + half_ulp(mean_decimals);
  double std_band = std_tol + half_ulp(std_decimals);
  c.check(std::abs(summary.mean_pct - mean_ref) <= mean_band,
          fmt("%s: mean %.4f vs %.4g (band %.3g)", label.c_str(), summary.mean_pct, mean_ref,
              mean_band));
  c.check(std::abs(summary.stddev_pct - std_ref) <= std_band,
          fmt("%s: stddev %.4f vs %.4g (band %.3g)", label.c_str(), summary.stddev_pct, std_ref,
              std_band));
  c.note(fmt("%s: %.2f +- %.2f (published %.4g +- %.4g)", label.c_str(), summary.mean_pct,
             summary.stddev_pct, mean_ref, std_ref));
}

void ac6_error_aggregates() {
  Criterion c{"AC-6", "error aggregates from the published error columns"};
  const auto& d = refdata::dataset();

  std::vector<double> fold_tests;
  for (const auto& fold : d.folds) fold_tests.push_back(fold.test_error_pct);
  aggregate_check(c, "fold test", fold_tests, 8.04, 5.96, 0.02, 2, 0.02, 2);

  std::vector<double> simd_all, simd_test;
  for (const auto& row : d.simd_rows) {
    simd_all.push_back(row.rel_error_pct);
    if (!row.training) simd_test.push_back(row.rel_error_pct);
  }
  aggregate_check(c, "SIMD all nets", simd_all, 1.06, 0.80, 0.02, 2, 0.05, 2);
  aggregate_check(c, "SIMD test set", simd_test, 0.65, 0.94, 0.02, 2, 0.05, 2);

  std::vector<double> bus_with, bus_without;
  for (const auto& row : d.bus_rows) {
    bus_with.push_back(row.rel_error_pct);
    if (row.net != "mobileNet") bus_without.push_back(row.rel_error_pct);
  }
  aggregate_check(c, "bus w/o MobileNet", bus_without, 17.09, 13.0, 0.05, 2, 0.05, 0);
  aggregate_check(c, "bus with MobileNet", bus_with, 22.71, 21.6, 0.05, 2, 0.05, 1);

  std::vector<double> energy_with, energy_without;
  for (const auto& row : d.energy_rows) {
    energy_with.push_back(row.rel_error_pct);
    if (row.net != "mobileNet") energy_without.push_back(row.rel_error_pct);
  }
  aggregate_check(c, "energy w/o MobileNet", energy_without, 7.08, 6.0, 0.05, 2, 0.05, 1);

  // The with-MobileNet aggregate is printed as 17.33 +- 12.2; it recomputes
  // to 12.25 +- 17.33 (mean and stddev transposed) and is flagged, not failed.
  auto summary = predictor::summarize_errors(energy_with);
  c.check(std::abs(summary.mean_pct - 12.25) <= 0.05,
          fmt("with-MobileNet mean %.4f vs transposed reading 12.25", summary.mean_pct));
  c.check(std::abs(summary.stddev_pct - 17.33) <= 0.05,
          fmt("with-MobileNet stddev %.4f vs transposed reading 17.33", summary.stddev_pct));
  c.note(fmt("energy with MobileNet: %.2f +- %.2f; published \"17.33 +- 12.2\" is a "
             "documented mean/stddev transposition",
             summary.mean_pct, summary.stddev_pct));
}

void ac7_chained_prediction() {
  Criterion c{"AC-7", "chained prediction over all ten networks"};
  const auto& d = refdata::dataset();
  auto records = refdata::training_records();
  auto simd_model = predictor::fit_simd_from_mac(records);
  auto bus_model = predictor::fit_bus_from_simd(records);
  predictor::EnergyModel2 energy_model{d.all_nets.bus_coeff, d.all_nets.simd_coeff, {}};

  for (const auto& row : d.energy_rows) {
    auto chain = predictor::chain_predict(static_cast<double>(d.find_simd(row.net)->mac),
                                          simd_model, bus_model, energy_model);
    double dev = rel_dev(chain.energy_hat_mj, row.predicted_energy_mj);
    c.check(dev <= 0.01, fmt("%s: %.2f mJ vs published %.2f (%.4f%%)", row.net.c_str(),
                             chain.energy_hat_mj, row.predicted_energy_mj, dev * 100));
    if (row.net == "mobileNet") {
      double error = predictor::relative_error(chain.energy_hat_mj, row.measured_energy_mj);
      c.check(std::abs(error - 58.80) <= 0.1,
              fmt("mobileNet relative error %.3f%% vs published 58.80", error));
      c.note(fmt("mobileNet: %.2f mJ predicted vs 751.58 published, %.2f%% relative error",
                 chain.energy_hat_mj, error));
    }
  }
}

void ac8_integration_properties() {
  Criterion c{"AC-8", "integration and correlation properties"};
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int exactness_failures = 0;
  for (int iter = 0; iter < 100; ++iter) {
    int n = 2 + int(rng() % 300);
    std::vector<double> times{unit(rng)};
    for (int i = 1; i < n; ++i) times.push_back(times.back() + 1e-4 + unit(rng));
    double power = 1.0 + 5000.0 * unit(rng);
    tracelab::PowerTrace trace;
    trace.t_s = Eigen::Map<const Eigen::VectorXd>(times.data(), times.size());
    trace.channels = {tracelab::Channel::VddIn};
    trace.power_mw = {Eigen::VectorXd::Constant(n, power)};

    double span = times.back() - times.front();
    double a = times.front() + span * 0.9 * unit(rng);
    double b = a + (times.back() - a) * std::max(unit(rng), 1e-6);
    double energy = tracelab::integrate(trace, tracelab::Channel::VddIn, a, b);
    if (rel_dev(energy, power * (b - a)) > 1e-12) ++exactness_failures;

    // additivity at a sample boundary, 1e-9 relative
    std::size_t mid = 1 + rng() % (n - 1 ? n - 1 : 1);
    if (mid + 1 < times.size()) {
      double t0 = times.front(), tm = times[mid], t1 = times.back();
      double whole = tracelab::integrate(trace, tracelab::Channel::VddIn, t0, t1);
      double split = tracelab::integrate(trace, tracelab::Channel::VddIn, t0, tm) +
                     tracelab::integrate(trace, tracelab::Channel::VddIn, tm, t1);
      c.check(rel_dev(split, whole) <= 1e-9, "additivity at a sample boundary");
    }

    double lambda = 0.25 + 8.0 * unit(rng);
    auto scaled = trace;
    scaled.power_mw[0] *= lambda;
    double scaled_energy = tracelab::integrate(scaled, tracelab::Channel::VddIn, a, b);
    c.check(rel_dev(scaled_energy, lambda * energy) <= 1e-12, "linearity under power scaling");
  }
  c.check(exactness_failures == 0,
          fmt("rectangle rule inexact on %d of 100 constant traces", exactness_failures));
  c.note("rectangle rule exact on 100 random constant-power grids");

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int iter = 0; iter < 100; ++iter) {
    int n = 2 + int(rng() % 60);
    Eigen::VectorXd xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs(i) = gauss(rng);
      ys(i) = gauss(rng);
    }
    if ((xs.array() - xs.mean()).abs().maxCoeff() == 0) continue;
    if ((ys.array() - ys.mean()).abs().maxCoeff() == 0) continue;
    double r = tracelab::pearson(xs, ys);
    c.check(r >= -1.0 && r <= 1.0, "pearson out of [-1, 1]");
  }
  Eigen::VectorXd line(5), up(5), down(5);
  line << 1, 2, 3, 4, 5;
  up = (3.5 * line.array() + 2.0).matrix();
  down = (-0.25 * line.array() + 7.0).matrix();
  c.check(std::abs(tracelab::pearson(line, up) - 1.0) <= 1e-12, "pearson != 1 on exact line");
  c.check(std::abs(tracelab::pearson(line, down) + 1.0) <= 1e-12,
          "pearson != -1 on exact negative line");
  c.note("pearson bounded on 100 random series and exactly +-1 on linear fixtures");
}

void ac9_regression_properties() {
  Criterion c{"AC-9", "regression properties"};
  std::mt19937 rng(103);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int iter = 0; iter < 100; ++iter) {
    int n = 2 + int(rng() % 50);
    Eigen::VectorXd x(n), b(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = gauss(rng) + 4.0;
      b(i) = 2.0 * gauss(rng) - 3.0;
      y(i) = 10.0 * gauss(rng);
    }
    double slope = predictor::fit_origin_1d(x, y).slope;
    double scale = x.cwiseAbs().dot(y.cwiseAbs()) + 1e-30;
    c.check(std::abs(x.dot((y - slope * x).eval())) / scale <= 1e-9,
            "1-d residual orthogonality");

    auto model = predictor::fit_origin_2d(x, b, y);
    Eigen::VectorXd residual = y - model.bus_coeff * x - model.simd_coeff * b;
    c.check(std::abs(x.dot(residual)) / scale <= 1e-9, "2-d residual orthogonality (a)");
    double scale_b = b.cwiseAbs().dot(y.cwiseAbs()) + 1e-30;
    c.check(std::abs(b.dot(residual)) / scale_b <= 1e-9, "2-d residual orthogonality (b)");
  }
  c.note("residual orthogonality held on 100 random datasets (1e-9 relative)");

  for (int iter = 0; iter < 20; ++iter) {
    int n = 3 + int(rng() % 20);
    Eigen::VectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a(i) = gauss(rng) + 5.0;
      b(i) = gauss(rng) * 2.0 + 1.0;
    }
    double x1 = 0.5 + std::abs(gauss(rng)), x2 = 0.25 + std::abs(gauss(rng));
    Eigen::VectorXd y = x1 * a + x2 * b;
    auto model = predictor::fit_origin_2d(a, b, y);
    c.check(rel_dev(model.bus_coeff, x1) <= 1e-12 && rel_dev(model.simd_coeff, x2) <= 1e-12,
            "exact recovery on noise-free planar data");
  }
  c.note("noise-free planar coefficients recovered to machine precision (20 cases)");

  std::uniform_real_distribution<double> pos(0.1, 10.0);
  for (int iter = 0; iter < 20; ++iter) {
    int n = 2 + int(rng() % 6);
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = pos(rng);
      y(i) = pos(rng);
    }
    // the through-origin slope is a convex combination of the y/x ratios, so
    // a grid spanning the ratios contains the optimum
    double lo = (y.array() / x.array()).minCoeff();
    double hi = (y.array() / x.array()).maxCoeff();
    const int steps = 100000;
    double best_c = lo, best_loss = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= steps; ++s) {
      double candidate = lo + (hi - lo) * s / steps;
      double loss = (y - candidate * x).squaredNorm();
      if (loss < best_loss) {
        best_loss = loss;
        best_c = candidate;
      }
    }
    double closed = predictor::fit_origin_1d(x, y).slope;
    c.check(std::abs(closed - best_c) <= (hi - lo) / steps + 1e-12,
            fmt("grid-scan oracle disagrees: closed %.9f grid %.9f", closed, best_c));
  }
  c.note("grid-scan oracle agreed with the closed form on 20 random instances");
}

void ac10_scope_statement() {
  Criterion c{"AC-10", "raw measurements are covered by the embedded dataset, not remeasured"};
  const auto& records = refdata::counter_records();
  c.check(records.size() == 10, "dataset must cover all ten networks");
  for (const auto& record : records)
    c.check(record.mac && record.simd && record.bus_access && record.energy_mj && record.time_s,
            "record '" + record.net + "' incomplete");
  c.note("measured counters and energies require TX1 hardware; they enter as the embedded");
  c.note("dataset and are exercised by the property suites and table reproductions above");
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  ac1_cost_model();
  ac2_simd_predictor();
  ac3_bus_predictor();
  ac4_energy_published_coefficients();
  ac5_energy_our_fit();
  ac6_error_aggregates();
  ac7_chained_prediction();
  ac8_integration_properties();
  ac9_regression_properties();
  ac10_scope_statement();
  std::printf("================\n%s: %d criterion failure(s)\n",
              g_failures == 0 ? "RESULT PASS" : "RESULT FAIL", g_failures);
  return g_failures == 0 ? 0 : 1;
}
