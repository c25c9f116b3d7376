#include "enprof/refdata.hpp"

#include <algorithm>
#include <cmath>

#include "enprof/errors.hpp"

namespace enprof::refdata {

namespace {

Dataset build_dataset() {
  Dataset d;

  d.nets = {
      {"alexNet", "alexNet", 80.3, "ImageNet", 5, 3, 62e6, 244},
      {"googleNet", "googleNet", 90.85, "ImageNet", 57, 1, 6.9e6, 54},
      {"resNet50", "resNet50", 93.29, "ImageNet", 53, 1, 25e6, 103},
      {"squeezeNet", "squeezeNet", 80.3, "ImageNet", 26, 0, 1.2e6, 5},
      {"sqCompressed", "sqCompressed", 80.3, "ImageNet", 26, 0, 1.2e6, 0.6758},
      {"squeezeNetRes", "squeezeNetRes", 82.5, "ImageNet", 26, 0, 1.2e6, 6.3},
      {"vggSmall", "vgg-small", 86.9, "ImageNet", 5, 3, 102e6, 393},
      {"mobileNet", "MobileNet-224", 70.6, "ImageNet", 27, 0, 29e6, 17},
      {"placesCNDS8s", "Places-CNDS-8s", 86.8, "ImageNet", 8, 3, 60e6, 241.6},
      {"inceptionBN", "Inception-BN", 89.0, "ImageNet", 69, 1, 1.4e9, 134.6},
      {"allCnnC", "ALL-CNN-C", 90.92, "CIFAR 10", 9, 0, 1.3e6, 5.5},
  };

  // Fold table: coefficients with one net excluded, prediction for that net.
  d.folds = {
      {"alexNet", 3.37e-05, 3.16e-06, 951.28, 930.44, 0.1682, 5.36, 3.36, 2, 2.23},
      {"resNet50", 3.89e-05, 2.47e-06, 4686.75, 5261.42, 0.9468, 2.03, 2.06, 2, 10.92},
      {"squeezeNet", 4.09e-05, 2.70e-06, 1388.74, 1240.29, 0.2652, 5.26, 1.88, 2, 11.96},
      {"googleNet", 3.76e-05, 2.93e-06, 2212.37, 2072.48, 0.4228, 5.76, 3.58, 2, 6.74},
      {"squeezeNetRes", 3.30e-05, 3.20e-06, 1365.02, 1371.62, 0.2558, 5.66, 2.5, 1, 0.48},
      {"vggSmall", 1.27e-05, 4.75e-06, 3509.11, 3027.99, 0.5646, 3.41, 2.67, 2, 15.88},
  };
  d.all_nets = {3.34e-05, 3.18e-06, 4.81, 3.19};
  d.fold_test_aggregate = {"fold test errors", 8.04, 5.96, 2, 2};

  d.simd_rows = {
      {"alexNet", 166326858, 665784864, 163383605, 1.76, true},
      {"resNet50", 936965249, 3855925248, 946244055, 0.99, true},
      {"squeezeNet", 212510630, 861339936, 211372820, 0.53, true},
      {"googleNet", 383528521, 1581647872, 388136387, 1.20, true},
      {"squeezeNetRes", 213932097, 861339936, 211372820, 1.19, true},
      {"vggSmall", 638627941, 2541337632, 623644254, 2.34, true},
      {"mobileNet", 139589662, 567716352, 139317592, 0.12, false},
      {"placesCNDS8s", 492978185, 1967702016, 482874074, 2.04, false},
      {"allCnnC", 66909070, 270798336, 66453911, 0.37, false},
      {"inceptionBN", 834842927, 3400527872, 834489539, 0.02, false},
  };
  d.simd_slope_printed = 0.24;
  d.simd_all_aggregate = {"SIMD errors, all nets", 1.06, 0.80, 2, 2};
  d.simd_test_aggregate = {"SIMD errors, test set", 0.65, 0.94, 2, 2};

  // The second column repeats measured SIMD as printed; the predicted bus
  // column is slope * predicted SIMD from the SIMD table.
  d.bus_rows = {
      {"alexNet", 166326858, 12635625, 10847037, 10847037, 14.15},
      {"resNet50", 936965249, 61100440, 62821142, 62821142, 2.81},
      {"squeezeNet", 212510630, 19929941, 14033041, 14033041, 29.58},
      {"googleNet", 383528521, 28927569, 25768374, 25768374, 10.92},
      {"squeezeNetRes", 213932097, 20600111, 140330412, 14033041, 31.87},
      {"vggSmall", 638627941, 37448187, 41403742, 41403742, 10.56},
      {"mobileNet", 139589662, 34642804, 9249294, 9249294, 73.30},
      {"placesCNDS8s", 492978185, 31498902, 32058009, 32058009, 1.77},
      {"allCnnC", 66909070, 7172165, 4411875, 4411875, 38.48},
      {"inceptionBN", 834842927, 64169256, 55401760, 55401760, 13.66},
  };
  d.bus_slope_printed = 0.0663;
  d.bus_without_mobilenet = {"bus errors w/o MobileNet", 17.09, 13, 2, 0};
  d.bus_with_mobilenet = {"bus errors with MobileNet", 22.71, 21.6, 2, 1};

  d.energy_rows = {
      {"alexNet", 881.41, 930.45, 0.17, 5.26},
      {"resNet50", 5104.76, 5261.42, 0.95, 2.97},
      {"squeezeNet", 1140.30, 1240.30, 0.27, 8.06},
      {"googleNet", 2093.90, 2072.49, 0.42, 1.03},
      {"squeezeNetRes", 1140.30, 1371.62, 0.25, 16.86},
      {"vggSmall", 3364.41, 3028.00, 0.56, 11.11},
      {"placesCNDS8s", 2604.99, 2613.46, 0.46, 0.32},
      {"allCnnC", 358.50, 422.29, 0.08, 15.10},
      {"inceptionBN", 4501.87, 4641.14, 0.84, 3.00},
      {"mobileNet", 751.58, 1824.60, 0.35, 58.80},
  };
  d.energy_without_mobilenet = {"energy errors w/o MobileNet", 7.08, 6.0, 2, 1};
  d.energy_with_mobilenet = {"energy errors with MobileNet", 17.33, 12.2, 2, 1};

  d.correlations = {
      {"alexNetGPU", 0.99},
      {"googlenetGPU", 0.80},
      {"squeezeNetGPU", 0.51},
      {"Googlenetbatch16GPU", 0.91},
      {"googlenet1batch1CPU", 0.99},
  };

  d.discrepancies = {
      {"table4/predicted_bus/squeezeNetRes", "140330412", "14033041",
       "printed value is inconsistent with the row's own 31.87% error; "
       "slope * predicted SIMD gives 14033041 (digit-insertion typo)"},
      {"table5/aggregate/with_mobilenet", "17.33 +- 12.2", "12.25 +- 17.33",
       "mean and standard deviation of the ten listed errors appear transposed "
       "in the printed aggregate"},
      {"table4/column/predicted_simd", "repeats measured SIMD",
       "predicted bus = 0.0664 * predicted SIMD from the SIMD table",
       "column header says predicted SIMD but the printed values are the "
       "measured counts; the bus predictor consumes the SIMD table's "
       "predictions"},
      {"table3/rel_error/mobileNet", "0.12", "0.19",
       "inconsistent with the row's own measured/predicted cells"},
      {"table3/rel_error/allCnnC", "0.37", "0.68",
       "inconsistent with the row's own measured/predicted cells"},
      {"table3/rel_error/inceptionBN", "0.02", "0.04",
       "inconsistent with the row's own measured/predicted cells"},
      {"table2/train_mean/resNet50", "2.03", "2.22",
       "recomputing the fold's train errors from its published coefficients "
       "gives 2.22 (2.23 from an exact refit)"},
  };

  return d;
}

double half_ulp(int decimals) { return 0.5 * std::pow(10.0, -decimals); }

struct CellBuilder {
  ReproReport& report;
  std::string table;

  void relative(const std::string& cell, double published, double recomputed,
                double rel_tol, std::string note = {}) {
    ReproCell row;
    row.table = table;
    row.cell = cell;
    row.published = published;
    row.recomputed = recomputed;
    row.deviation = published == 0 ? std::abs(recomputed)
                                   : std::abs(recomputed - published) / std::abs(published);
    char text[48];
    std::snprintf(text, sizeof(text), "%.2g%% relative", rel_tol * 100);
    row.tolerance = text;
    row.status = row.deviation <= rel_tol ? CellStatus::Pass : CellStatus::Fail;
    row.note = std::move(note);
    report.cells.push_back(std::move(row));
  }

  void absolute(const std::string& cell, double published, double recomputed,
                double base_pp, int decimals, std::string note = {}) {
    ReproCell row;
    row.table = table;
    row.cell = cell;
    row.published = published;
    row.recomputed = recomputed;
    row.deviation = std::abs(recomputed - published);
    double tol = base_pp + half_ulp(decimals);
    char text[64];
    std::snprintf(text, sizeof(text), "%.3g pp absolute (incl. print quantum)", tol);
    row.tolerance = text;
    row.status = row.deviation <= tol ? CellStatus::Pass : CellStatus::Fail;
    row.note = std::move(note);
    report.cells.push_back(std::move(row));
  }

  void noted(const std::string& cell, double published, double recomputed,
             std::string note) {
    ReproCell row;
    row.table = table;
    row.cell = cell;
    row.published = published;
    row.recomputed = recomputed;
    row.deviation = std::abs(recomputed - published);
    row.tolerance = "documented discrepancy";
    row.status = CellStatus::Noted;
    row.note = std::move(note);
    report.cells.push_back(std::move(row));
  }
};

// Cell-class tolerances used by reproduce(); mirrored in the README.
constexpr double kPredictedEnergyRel = 0.005;  // fold energies, published coeffs
constexpr double kPredictedSimdRel = 0.005;    // our slope refit
constexpr double kPredictedBusRel = 0.01;      // our slope refit
constexpr double kChainedEnergyRel = 0.01;     // full chain, published 2-var coeffs
constexpr double kSimdErrorPp = 0.02;          // error cells of the SIMD table
constexpr double kErrorCellPp = 0.05;          // error cells elsewhere
constexpr double kTightAggregatePp = 0.02;     // fold and SIMD aggregates
constexpr double kAggregatePp = 0.05;          // bus and energy aggregates

std::vector<double> fold_train_errors(const Dataset& d, const FoldRow& fold) {
  predictor::EnergyModel2 model{fold.bus_coeff, fold.simd_coeff, {}};
  std::vector<double> errors;
  for (const FoldRow& other : d.folds) {
    if (other.net == fold.net) continue;
    const BusRow* bus = d.find_bus(other.net);
    const SimdRow* simd = d.find_simd(other.net);
    double predicted = predictor::predict_energy(
        static_cast<double>(bus->bus_measured), static_cast<double>(simd->simd_measured), model);
    errors.push_back(predictor::relative_error(predicted, other.measured_energy_mj));
  }
  return errors;
}

void reproduce_folds(const Dataset& d, ReproReport& report) {
  CellBuilder cells{report, "table2"};
  for (const FoldRow& fold : d.folds) {
    const BusRow* bus = d.find_bus(fold.net);
    const SimdRow* simd = d.find_simd(fold.net);
    predictor::EnergyModel2 model{fold.bus_coeff, fold.simd_coeff, {}};
    double predicted = predictor::predict_energy(static_cast<double>(bus->bus_measured),
                                                 static_cast<double>(simd->simd_measured), model);
    cells.relative("predicted_energy/" + fold.net, fold.predicted_energy_mj, predicted,
                   kPredictedEnergyRel);
    cells.absolute("test_error/" + fold.net, fold.test_error_pct,
                   predictor::relative_error(fold.predicted_energy_mj, fold.measured_energy_mj),
                   kErrorCellPp, 2);

    auto errors = fold_train_errors(d, fold);
    auto summary = predictor::summarize_errors(errors);
    if (fold.net == "resNet50") {
      cells.noted("train_mean/" + fold.net, fold.train_mean_pct, summary.mean_pct,
                  "published train mean is inconsistent with the fold's own "
                  "published coefficients");
    } else {
      cells.absolute("train_mean/" + fold.net, fold.train_mean_pct, summary.mean_pct,
                     kErrorCellPp, 2);
    }
    cells.absolute("train_std/" + fold.net, fold.train_std_pct, summary.stddev_pct,
                   kErrorCellPp, fold.train_std_decimals);
  }

  predictor::EnergyModel2 all{d.all_nets.bus_coeff, d.all_nets.simd_coeff, {}};
  std::vector<double> errors;
  for (const FoldRow& fold : d.folds) {
    const BusRow* bus = d.find_bus(fold.net);
    const SimdRow* simd = d.find_simd(fold.net);
    double predicted = predictor::predict_energy(static_cast<double>(bus->bus_measured),
                                                 static_cast<double>(simd->simd_measured), all);
    errors.push_back(predictor::relative_error(predicted, fold.measured_energy_mj));
  }
  auto summary = predictor::summarize_errors(errors);
  cells.absolute("train_mean/allNets", d.all_nets.train_mean_pct, summary.mean_pct,
                 kErrorCellPp, 2);
  cells.absolute("train_std/allNets", d.all_nets.train_std_pct, summary.stddev_pct,
                 kErrorCellPp, 2);
}

void aggregate_cells(CellBuilder& cells, const std::string& name, const Aggregate& published,
                     const std::vector<double>& values, double mean_tol_pp) {
  auto summary = predictor::summarize_errors(values);
  cells.absolute("aggregate_mean/" + name, published.mean_pct, summary.mean_pct, mean_tol_pp,
                 published.mean_decimals);
  cells.absolute("aggregate_std/" + name, published.std_pct, summary.stddev_pct, kAggregatePp,
                 published.std_decimals);
}

void reproduce_fold_aggregate(const Dataset& d, ReproReport& report) {
  CellBuilder cells{report, "table2"};
  std::vector<double> tests;
  for (const FoldRow& fold : d.folds) tests.push_back(fold.test_error_pct);
  aggregate_cells(cells, "test", d.fold_test_aggregate, tests, kTightAggregatePp);
}

void reproduce_simd(const Dataset& d, ReproReport& report) {
  CellBuilder cells{report, "table3"};
  auto slope = predictor::fit_simd_from_mac(training_records());
  bool truncates = std::floor(slope.slope * 100.0) == d.simd_slope_printed * 100.0;
  ReproCell slope_cell;
  slope_cell.table = "table3";
  slope_cell.cell = "slope";
  slope_cell.published = d.simd_slope_printed;
  slope_cell.recomputed = slope.slope;
  slope_cell.deviation = std::abs(slope.slope - d.simd_slope_printed);
  slope_cell.tolerance = "truncates to printed two decimals";
  slope_cell.status = truncates ? CellStatus::Pass : CellStatus::Fail;
  slope_cell.note = "printed slope is the two-decimal truncation";
  report.cells.push_back(std::move(slope_cell));

  for (const SimdRow& row : d.simd_rows) {
    cells.relative("predicted_simd/" + row.net, static_cast<double>(row.simd_predicted),
                   slope.slope * static_cast<double>(row.mac), kPredictedSimdRel);
    double recomputed = predictor::relative_error(static_cast<double>(row.simd_predicted),
                                                  static_cast<double>(row.simd_measured));
    bool inconsistent = row.net == "mobileNet" || row.net == "allCnnC" || row.net == "inceptionBN";
    if (inconsistent) {
      cells.noted("rel_error/" + row.net, row.rel_error_pct, recomputed,
                  "published error is inconsistent with the row's own cells");
    } else {
      cells.absolute("rel_error/" + row.net, row.rel_error_pct, recomputed, kSimdErrorPp, 2);
    }
  }
}

void reproduce_simd_aggregates(const Dataset& d, ReproReport& report) {
  CellBuilder cells{report, "table3"};
  std::vector<double> all, test;
  for (const SimdRow& row : d.simd_rows) {
    all.push_back(row.rel_error_pct);
    if (!row.training) test.push_back(row.rel_error_pct);
  }
  aggregate_cells(cells, "all_nets", d.simd_all_aggregate, all, kTightAggregatePp);
  aggregate_cells(cells, "test_set", d.simd_test_aggregate, test, kTightAggregatePp);
}

void reproduce_bus(const Dataset& d, ReproReport& report) {
  CellBuilder cells{report, "table4"};
  auto slope = predictor::fit_bus_from_simd(training_records());
  cells.relative("slope", d.bus_slope_printed, slope.slope, 0.01,
                 "printed at three significant figures");

  for (const BusRow& row : d.bus_rows) {
    const SimdRow* simd = d.find_simd(row.net);
    double recomputed = slope.slope * static_cast<double>(simd->simd_predicted);
    std::string note;
    if (row.bus_predicted != row.bus_predicted_printed)
      note = "compared against the corrected value; printed as " +
             std::to_string(row.bus_predicted_printed) + " (typo)";
    cells.relative("predicted_bus/" + row.net, static_cast<double>(row.bus_predicted),
                   recomputed, kPredictedBusRel, std::move(note));
    cells.absolute("rel_error/" + row.net, row.rel_error_pct,
                   predictor::relative_error(static_cast<double>(row.bus_predicted),
                                             static_cast<double>(row.bus_measured)),
                   kErrorCellPp, 2);
  }
}

void reproduce_bus_aggregates(const Dataset& d, ReproReport& report) {
  CellBuilder cells{report, "table4"};
  std::vector<double> with, without;
  for (const BusRow& row : d.bus_rows) {
    with.push_back(row.rel_error_pct);
    if (row.net != "mobileNet") without.push_back(row.rel_error_pct);
  }
  aggregate_cells(cells, "without_mobilenet", d.bus_without_mobilenet, without, kAggregatePp);
  aggregate_cells(cells, "with_mobilenet", d.bus_with_mobilenet, with, kAggregatePp);
}

void reproduce_energy(const Dataset& d, ReproReport& report) {
  CellBuilder cells{report, "table5"};
  auto records = training_records();
  auto simd_model = predictor::fit_simd_from_mac(records);
  auto bus_model = predictor::fit_bus_from_simd(records);
  predictor::EnergyModel2 energy_model{d.all_nets.bus_coeff, d.all_nets.simd_coeff, {}};

  for (const EnergyRow& row : d.energy_rows) {
    const SimdRow* simd = d.find_simd(row.net);
    auto chain = predictor::chain_predict(static_cast<double>(simd->mac), simd_model,
                                          bus_model, energy_model);
    cells.relative("predicted_energy/" + row.net, row.predicted_energy_mj,
                   chain.energy_hat_mj, kChainedEnergyRel);
    cells.absolute("rel_error/" + row.net, row.rel_error_pct,
                   predictor::relative_error(row.predicted_energy_mj, row.measured_energy_mj),
                   kErrorCellPp, 2);
  }
}

void reproduce_energy_aggregates(const Dataset& d, ReproReport& report) {
  CellBuilder cells{report, "table5"};
  std::vector<double> with, without;
  for (const EnergyRow& row : d.energy_rows) {
    with.push_back(row.rel_error_pct);
    if (row.net != "mobileNet") without.push_back(row.rel_error_pct);
  }
  aggregate_cells(cells, "without_mobilenet", d.energy_without_mobilenet, without, kAggregatePp);

  // The with-MobileNet aggregate is printed with mean and stddev transposed;
  // the recomputation is reported against the transposed reading instead of
  // failing, as long as that reading holds.
  auto summary = predictor::summarize_errors(with);
  const Aggregate& printed = d.energy_with_mobilenet;
  bool matches_transposed = std::abs(summary.mean_pct - printed.std_pct) <= 0.1 &&
                            std::abs(summary.stddev_pct - printed.mean_pct) <= 0.05;
  if (matches_transposed) {
    std::string note = "printed as 17.33 +- 12.2; mean and stddev are transposed";
    cells.noted("aggregate_mean/with_mobilenet", printed.mean_pct, summary.mean_pct, note);
    cells.noted("aggregate_std/with_mobilenet", printed.std_pct, summary.stddev_pct, note);
  } else {
    cells.absolute("aggregate_mean/with_mobilenet", printed.mean_pct, summary.mean_pct,
                   kAggregatePp, printed.mean_decimals);
    cells.absolute("aggregate_std/with_mobilenet", printed.std_pct, summary.stddev_pct,
                   kAggregatePp, printed.std_decimals);
  }
}

}  // namespace

const NetInfo* Dataset::find_net(const std::string& net) const {
  for (const auto& row : nets)
    if (row.net == net) return &row;
  return nullptr;
}

const SimdRow* Dataset::find_simd(const std::string& net) const {
  for (const auto& row : simd_rows)
    if (row.net == net) return &row;
  return nullptr;
}

const BusRow* Dataset::find_bus(const std::string& net) const {
  for (const auto& row : bus_rows)
    if (row.net == net) return &row;
  return nullptr;
}

const EnergyRow* Dataset::find_energy(const std::string& net) const {
  for (const auto& row : energy_rows)
    if (row.net == net) return &row;
  return nullptr;
}

const FoldRow* Dataset::find_fold(const std::string& net) const {
  for (const auto& row : folds)
    if (row.net == net) return &row;
  return nullptr;
}

const CorrelationEntry* Dataset::find_correlation(const std::string& label) const {
  for (const auto& row : correlations)
    if (row.label == label) return &row;
  return nullptr;
}

const Dataset& dataset() {
  static const Dataset instance = build_dataset();
  return instance;
}

std::vector<predictor::CounterRecord> counter_records() {
  const Dataset& d = dataset();
  std::vector<predictor::CounterRecord> records;
  for (const SimdRow& simd : d.simd_rows) {
    predictor::CounterRecord record;
    record.net = simd.net;
    record.mac = simd.mac;
    record.simd = simd.simd_measured;
    record.bus_access = d.find_bus(simd.net)->bus_measured;
    if (const FoldRow* fold = d.find_fold(simd.net)) {
      record.energy_mj = fold->measured_energy_mj;
      record.time_s = fold->measured_time_s;
    } else {
      const EnergyRow* energy = d.find_energy(simd.net);
      record.energy_mj = energy->measured_energy_mj;
      record.time_s = energy->measured_time_s;
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<predictor::CounterRecord> training_records() {
  std::vector<predictor::CounterRecord> records;
  for (auto& record : counter_records())
    if (dataset().find_simd(record.net)->training) records.push_back(std::move(record));
  return records;
}

bool ReproReport::all_pass() const {
  return std::none_of(cells.begin(), cells.end(),
                      [](const ReproCell& cell) { return cell.status == CellStatus::Fail; });
}

ReproReport reproduce(const std::string& table_id) {
  const Dataset& d = dataset();
  ReproReport report;
  if (table_id == "2") {
    reproduce_folds(d, report);
    reproduce_fold_aggregate(d, report);
  } else if (table_id == "3") {
    reproduce_simd(d, report);
    reproduce_simd_aggregates(d, report);
  } else if (table_id == "4") {
    reproduce_bus(d, report);
    reproduce_bus_aggregates(d, report);
  } else if (table_id == "5") {
    reproduce_energy(d, report);
    reproduce_energy_aggregates(d, report);
  } else if (table_id == "aggregates") {
    reproduce_fold_aggregate(d, report);
    reproduce_simd_aggregates(d, report);
    reproduce_bus_aggregates(d, report);
    reproduce_energy_aggregates(d, report);
  } else {
    throw ValidationError("unknown table '" + table_id + "'");
  }
  return report;
}

}  // namespace enprof::refdata
