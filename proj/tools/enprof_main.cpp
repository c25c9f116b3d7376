// enprof: analytical ConvNet layer costs, power-trace energy extraction,
// counter-based energy model fitting/prediction and reference-table
// reproduction, from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "enprof/csv.hpp"
#include "enprof/errors.hpp"
#include "enprof/netmodel.hpp"
#include "enprof/predictor.hpp"
#include "enprof/refdata.hpp"
#include "enprof/tracelab.hpp"

namespace {

using namespace enprof;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCompute = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (out) out << content;
  if (!out) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw ValidationError("cannot write file '" + path + "'");
  }
}

// One format for every printed number keeps outputs byte-stable across runs;
// nine significant digits also satisfies the coefficient-precision contract.
std::string num(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

struct Output {
  std::string text;
  std::optional<std::string> file;  // machine-readable copy when --out given

  void emit(const std::optional<std::string>& out_path) const {
    std::cout << text;
    if (out_path) write_file(*out_path, file ? *file : text);
  }
};

tracelab::Channel parse_channel(const std::string& name) {
  auto channel = tracelab::channel_from(name);
  if (!channel)
    throw ValidationError("unknown channel '" + name +
                          "' (expected vdd_in, vdd_cpu or vdd_gpu)");
  return *channel;
}

std::pair<double, double> parse_window(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ValidationError("window must be t0:t1, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError("window must be numeric t0:t1, got '" + text + "'");
  }
}

// ---------------------------------------------------------------- cost

int cmd_cost(const std::string& netfile, const std::string& format,
             const std::optional<std::string>& out_path) {
  std::vector<std::string> warnings;
  auto net = netmodel::parse_network(slurp(netfile), &warnings);
  for (const auto& warning : warnings) std::cerr << "warning: " << warning << "\n";
  auto costs = netmodel::network_costs(net);

  std::string csv = "layer,kind,mac,storage_bytes\n";
  for (const auto& layer : costs.layers)
    csv += layer.name + "," + std::string(netmodel::to_string(layer.kind)) + "," +
           std::to_string(layer.mac) + "," + std::to_string(layer.storage_bytes) + "\n";

  Output output;
  if (format == "csv") {
    output.text = csv;
  } else {
    std::ostringstream text;
    text << "network: " << net.name << " (batch " << net.batch << ")\n";
    for (const auto& layer : costs.layers)
      text << "  " << layer.name << " [" << netmodel::to_string(layer.kind) << "]"
           << "  mac " << layer.mac << "  storage_bytes " << layer.storage_bytes << "\n";
    text << "total_conv_mac " << costs.total_conv_mac << "\n";
    text << "total_storage_bytes " << costs.total_storage_bytes << "\n";
    output.text = text.str();
  }
  output.file = csv;
  output.emit(out_path);
  return kExitOk;
}

// ---------------------------------------------------------------- energy

int cmd_energy(const std::string& tracefile, const std::optional<std::string>& markerfile,
               const std::optional<std::string>& channel_name,
               const std::optional<std::string>& baseline_window, const std::string& format,
               const std::optional<std::string>& out_path) {
  auto trace = tracelab::parse_trace(slurp(tracefile));

  tracelab::Channel channel;
  if (channel_name) {
    channel = parse_channel(*channel_name);
    if (!trace.has_channel(channel))
      throw ValidationError("channel " + std::string(tracelab::channel_name(channel)) +
                            " not present in trace");
  } else if (trace.channels.size() == 1) {
    channel = trace.channels[0];
  } else {
    throw ValidationError("trace has multiple channels; pick one with --channel");
  }

  tracelab::MarkerSet markers;
  if (markerfile) {
    markers = tracelab::parse_markers(slurp(*markerfile));
  } else {
    markers.intervals.push_back({"trace", trace.t_begin(), trace.t_end()});
  }

  std::optional<double> baseline;
  if (baseline_window) {
    auto [t0, t1] = parse_window(*baseline_window);
    baseline = tracelab::baseline_power(trace, channel, t0, t1);
  }

  auto report = tracelab::interval_energy(trace, markers, channel, baseline);

  std::string csv = "label,t_start_s,t_end_s,duration_s,energy_mj,baseline_mj\n";
  for (const auto& row : report.rows)
    csv += row.label + "," + num(row.t_start_s) + "," + num(row.t_end_s) + "," +
           num(row.duration_s) + "," + num(row.energy_mj) + "," + num(row.baseline_mj) + "\n";

  Output output;
  if (format == "csv") {
    output.text = csv;
  } else {
    std::ostringstream text;
    text << "channel " << tracelab::channel_name(channel);
    if (baseline) text << ", baseline " << num(*baseline) << " mW";
    text << "\n";
    for (const auto& row : report.rows)
      text << "  " << row.label << " [" << num(row.t_start_s) << ", " << num(row.t_end_s)
           << "]  duration_s " << num(row.duration_s) << "  energy_mj " << num(row.energy_mj)
           << "  baseline_mj " << num(row.baseline_mj) << "\n";
    text << "total_energy_mj " << num(report.total_energy_mj) << "\n";
    if (baseline) text << "total_baseline_mj " << num(report.total_baseline_mj) << "\n";
    output.text = text.str();
  }
  output.file = csv;
  output.emit(out_path);
  return kExitOk;
}

// ---------------------------------------------------------------- fit

Eigen::VectorXd column_values(const std::vector<predictor::CounterRecord>& records,
                              const std::string& column) {
  Eigen::VectorXd values(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    std::optional<double> value;
    if (column == "mac" && record.mac) value = static_cast<double>(*record.mac);
    if (column == "simd" && record.simd) value = static_cast<double>(*record.simd);
    if (column == "bus_access" && record.bus_access)
      value = static_cast<double>(*record.bus_access);
    if (column == "energy_mj") value = record.energy_mj;
    if (column == "time_s") value = record.time_s;
    if (column != "mac" && column != "simd" && column != "bus_access" &&
        column != "energy_mj" && column != "time_s")
      throw ValidationError("unknown counters column '" + column + "'");
    if (!value)
      throw ValidationError("record '" + record.net + "': missing " + column);
    values(static_cast<Eigen::Index>(i)) = *value;
  }
  return values;
}

std::vector<std::string> record_names(const std::vector<predictor::CounterRecord>& records) {
  std::vector<std::string> names;
  for (const auto& record : records) names.push_back(record.net);
  return names;
}

int cmd_fit(const std::string& counters_file, const std::string& model_kind,
            const std::string& x_col, const std::string& y_col,
            const std::optional<std::string>& x2_col, bool run_loocv,
            const std::optional<std::string>& out_path) {
  auto records = predictor::parse_counters(slurp(counters_file));
  std::ostringstream text;
  predictor::Model model;

  if (model_kind == "origin1") {
    auto fitted = predictor::fit_origin_1d(column_values(records, x_col),
                                           column_values(records, y_col),
                                           record_names(records));
    text << "origin1 " << y_col << " ~ slope * " << x_col << "\n";
    text << "slope " << num(fitted.slope) << "\n";
    model = fitted;
  } else {
    if (!x2_col) throw ValidationError("energy2 needs --x2 (second regressor column)");
    auto fitted = predictor::fit_origin_2d(column_values(records, x_col),
                                           column_values(records, *x2_col),
                                           column_values(records, y_col),
                                           record_names(records));
    text << "energy2 " << y_col << " ~ x1 * " << x_col << " + x2 * " << *x2_col << "\n";
    text << "x1 " << num(fitted.bus_coeff) << "\n";
    text << "x2 " << num(fitted.simd_coeff) << "\n";
    model = fitted;

    if (run_loocv) {
      auto result = predictor::loocv(records);
      text << "\nleave-one-out cross validation\n";
      for (const auto& fold : result.folds) {
        std::vector<double> train;
        for (const auto& [net, error] : fold.train_errors_pct) train.push_back(error);
        auto summary = predictor::summarize_errors(train);
        text << "  excluded " << fold.excluded_net << ": x1 " << num(fold.model.bus_coeff)
             << "  x2 " << num(fold.model.simd_coeff) << "  train " << num(summary.mean_pct)
             << " +- " << num(summary.stddev_pct) << " %  test " << num(fold.test_error_pct)
             << " %\n";
      }
      std::vector<double> tests;
      for (const auto& fold : result.folds) tests.push_back(fold.test_error_pct);
      auto test_summary = predictor::summarize_errors(tests);
      std::vector<double> all_train;
      for (const auto& [net, error] : result.all_nets_train_errors_pct)
        all_train.push_back(error);
      auto train_summary = predictor::summarize_errors(all_train);
      text << "  allNets: x1 " << num(result.all_nets.bus_coeff) << "  x2 "
           << num(result.all_nets.simd_coeff) << "  train " << num(train_summary.mean_pct)
           << " +- " << num(train_summary.stddev_pct) << " %\n";
      text << "  avg test error " << num(test_summary.mean_pct) << " +- "
           << num(test_summary.stddev_pct) << " %\n";
    }
  }

  Output output;
  output.text = text.str();
  output.file = predictor::save_model(model);
  output.emit(out_path);
  return kExitOk;
}

// ---------------------------------------------------------------- predict

struct LoadedModels {
  predictor::OriginModel1 simd_from_mac;
  predictor::OriginModel1 bus_from_simd;
  predictor::EnergyModel2 energy;
};

LoadedModels load_models(const std::string& dir) {
  auto load_origin = [&](const std::string& name) {
    auto model = predictor::load_model(slurp(dir + "/" + name));
    if (const auto* origin = std::get_if<predictor::OriginModel1>(&model)) return *origin;
    throw ValidationError(name + ": expected an origin1 model");
  };
  LoadedModels models;
  models.simd_from_mac = load_origin("simd_model.json");
  models.bus_from_simd = load_origin("bus_model.json");
  auto energy = predictor::load_model(slurp(dir + "/energy_model.json"));
  if (const auto* model = std::get_if<predictor::EnergyModel2>(&energy))
    models.energy = *model;
  else
    throw ValidationError("energy_model.json: expected an energy2 model");
  return models;
}

int cmd_predict(const std::optional<std::string>& netfile, const std::optional<std::uint64_t>& mac,
                const std::optional<std::string>& counters_file, const std::string& models_dir,
                const std::vector<std::string>& exclude,
                const std::optional<std::string>& out_path) {
  int sources = int(netfile.has_value()) + int(mac.has_value()) + int(counters_file.has_value());
  if (sources != 1)
    throw ValidationError("pick exactly one of --net, --mac or --counters");
  auto models = load_models(models_dir);

  struct Item {
    std::string name;
    double mac;
    std::optional<double> measured_mj;
  };
  std::vector<Item> items;
  if (netfile) {
    std::vector<std::string> warnings;
    auto net = netmodel::parse_network(slurp(*netfile), &warnings);
    for (const auto& warning : warnings) std::cerr << "warning: " << warning << "\n";
    auto costs = netmodel::network_costs(net);
    items.push_back({net.name, static_cast<double>(costs.total_conv_mac), std::nullopt});
  } else if (mac) {
    items.push_back({"mac:" + std::to_string(*mac), static_cast<double>(*mac), std::nullopt});
  } else {
    for (const auto& record : predictor::parse_counters(slurp(*counters_file))) {
      if (!record.mac)
        throw ValidationError("record '" + record.net + "': missing mac");
      items.push_back({record.net, static_cast<double>(*record.mac), record.energy_mj});
    }
  }

  auto excluded = [&exclude](const std::string& name) {
    return std::find(exclude.begin(), exclude.end(), name) != exclude.end();
  };

  std::string csv = "net,mac,simd_hat,bus_hat,energy_hat_mj,measured_mj,rel_error_pct\n";
  std::ostringstream text;
  std::vector<double> errors, kept_errors;
  for (const auto& item : items) {
    auto chain = predictor::chain_predict(item.mac, models.simd_from_mac, models.bus_from_simd,
                                          models.energy);
    text << item.name << ": simd_hat " << num(chain.simd_hat) << "  bus_hat "
         << num(chain.bus_hat) << "  energy_hat_mj " << num(chain.energy_hat_mj);
    csv += item.name + "," + num(item.mac) + "," + num(chain.simd_hat) + "," +
           num(chain.bus_hat) + "," + num(chain.energy_hat_mj) + ",";
    if (item.measured_mj) {
      double error = predictor::relative_error(chain.energy_hat_mj, *item.measured_mj);
      errors.push_back(error);
      if (!excluded(item.name)) kept_errors.push_back(error);
      text << "  measured_mj " << num(*item.measured_mj) << "  rel_error " << num(error) << " %";
      csv += num(*item.measured_mj) + "," + num(error);
    } else {
      csv += ",";
    }
    text << "\n";
    csv += "\n";
  }

  if (!errors.empty()) {
    auto all = predictor::summarize_errors(errors);
    text << "error summary (all " << all.n << " nets): " << num(all.mean_pct) << " +- "
         << num(all.stddev_pct) << " %\n";
    if (!exclude.empty() && !kept_errors.empty()) {
      auto kept = predictor::summarize_errors(kept_errors);
      text << "error summary (excluding";
      for (const auto& name : exclude) text << " " << name;
      text << "): " << num(kept.mean_pct) << " +- " << num(kept.stddev_pct) << " %\n";
    }
  }

  Output output;
  output.text = text.str();
  output.file = csv;
  output.emit(out_path);
  return kExitOk;
}

// ---------------------------------------------------------------- report

const char* status_name(refdata::CellStatus status) {
  switch (status) {
    case refdata::CellStatus::Pass: return "pass";
    case refdata::CellStatus::Fail: return "FAIL";
    case refdata::CellStatus::Noted: return "noted";
  }
  return "?";
}

int cmd_report(std::vector<std::string> tables, const std::optional<std::string>& export_path,
               const std::string& format, const std::optional<std::string>& out_path) {
  bool export_only = export_path && tables.empty();
  if (tables.empty()) tables = {"2", "3", "4", "5", "aggregates"};

  // run every reproduction before any file is written
  std::vector<std::pair<std::string, refdata::ReproReport>> reports;
  if (!export_only)
    for (const auto& table : tables) reports.emplace_back(table, refdata::reproduce(table));

  if (export_path)
    write_file(*export_path, predictor::counters_csv(refdata::counter_records()));
  if (export_only) return kExitOk;

  std::string csv = "table,cell,published,recomputed,deviation,tolerance,status,note\n";
  std::ostringstream text;
  bool all_pass = true;
  for (const auto& [table, report] : reports) {
    all_pass = all_pass && report.all_pass();
    std::size_t pass = 0, noted = 0, fail = 0;
    for (const auto& cell : report.cells) {
      if (cell.status == refdata::CellStatus::Pass) ++pass;
      if (cell.status == refdata::CellStatus::Noted) ++noted;
      if (cell.status == refdata::CellStatus::Fail) ++fail;
      text << "  [" << status_name(cell.status) << "] " << cell.table << "/" << cell.cell
           << "  published " << num(cell.published) << "  recomputed " << num(cell.recomputed)
           << "  deviation " << num(cell.deviation) << "  (" << cell.tolerance << ")";
      if (!cell.note.empty()) text << "  -- " << cell.note;
      text << "\n";
      csv += cell.table + "," + cell.cell + "," + num(cell.published) + "," +
             num(cell.recomputed) + "," + num(cell.deviation) + "," + cell.tolerance + "," +
             status_name(cell.status) + "," + cell.note + "\n";
    }
    text << "table " << table << ": " << pass << " pass, " << noted << " noted, " << fail
         << " fail\n";
  }

  const auto& discrepancies = refdata::dataset().discrepancies;
  text << "documented source discrepancies: " << discrepancies.size() << "\n";
  for (const auto& entry : discrepancies)
    text << "  " << entry.cell << ": published " << entry.published << ", recomputed "
         << entry.recomputed << " -- " << entry.note << "\n";

  Output output;
  output.text = format == "csv" ? csv : text.str();
  output.file = csv;
  output.emit(out_path);
  return all_pass ? kExitOk : kExitCompute;
}

// ---------------------------------------------------------------- correlate

int cmd_correlate(const std::string& csv_file, const std::string& x_col,
                  const std::string& y_col, const std::optional<std::string>& out_path) {
  csv::Table table = csv::read(slurp(csv_file));
  auto x_idx = table.column(x_col);
  auto y_idx = table.column(y_col);
  if (!x_idx) throw ValidationError("no column '" + x_col + "' in " + csv_file);
  if (!y_idx) throw ValidationError("no column '" + y_col + "' in " + csv_file);

  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& xf = table.rows[r][*x_idx];
    const std::string& yf = table.rows[r][*y_idx];
    if (xf.empty() || yf.empty()) continue;  // rows missing either value are skipped
    std::string line = "line " + std::to_string(r + 2);
    xs.push_back(csv::to_double(xf, line + ", column " + x_col));
    ys.push_back(csv::to_double(yf, line + ", column " + y_col));
  }
  double r = tracelab::pearson(Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size()),
                               Eigen::Map<const Eigen::VectorXd>(ys.data(), ys.size()));
  Output output;
  output.text = "pearson_r " + num(r) + "  n " + std::to_string(xs.size()) + "\n";
  output.file = "x,y,pearson_r,n\n" + x_col + "," + y_col + "," + num(r) + "," +
                std::to_string(xs.size()) + "\n";
  output.emit(out_path);
  return kExitOk;
}

}  // namespace


int main(int argc, char** argv) {
  CLI::App app{"ConvNet energy profiling toolkit"};
  app.require_subcommand(1);

  std::string format = "text";
  std::optional<std::string> out_path;

  // cost
  auto* cost = app.add_subcommand("cost", "Per-layer MAC and storage costs of a network file");
  std::string cost_net;
  cost->add_option("netfile", cost_net, "network definition (JSON)")->required();
  cost->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));
  cost->add_option("--out", out_path, "write machine-readable CSV here");

  // energy
  auto* energy = app.add_subcommand("energy", "Integrate a power trace over marker intervals");
  std::string energy_trace;
  std::optional<std::string> energy_markers, energy_channel, energy_baseline;
  energy->add_option("tracefile", energy_trace, "trace CSV")->required();
  energy->add_option("--markers", energy_markers, "marker CSV (label,start_s,end_s)");
  energy->add_option("--channel", energy_channel, "vdd_in | vdd_cpu | vdd_gpu");
  energy->add_option("--baseline-window", energy_baseline, "idle window t0:t1 for baseline power");
  energy->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));
  energy->add_option("--out", out_path);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a through-origin model on a counters CSV");
  std::string fit_counters, fit_model = "origin1", fit_x, fit_y;
  std::optional<std::string> fit_x2;
  bool fit_loocv = false;
  fit->add_option("counters", fit_counters, "counters CSV")->required();
  fit->add_option("--model", fit_model)->check(CLI::IsMember({"origin1", "energy2"}));
  fit->add_option("--x", fit_x, "regressor column")->required();
  fit->add_option("--y", fit_y, "response column")->required();
  fit->add_option("--x2", fit_x2, "second regressor column (energy2)");
  fit->add_flag("--loocv", fit_loocv, "report leave-one-out folds (energy2)");
  fit->add_option("--out", out_path, "write the fitted model document here");

  // predict
  auto* predict = app.add_subcommand("predict", "Chain the fitted models from MAC counts");
  std::optional<std::string> predict_net, predict_counters;
  std::optional<std::uint64_t> predict_mac;
  std::string predict_models;
  std::vector<std::string> predict_exclude;
  predict->add_option("--net", predict_net, "network definition file");
  predict->add_option("--mac", predict_mac, "MAC count");
  predict->add_option("--counters", predict_counters, "counters CSV (adds measured errors)");
  predict->add_option("--models", predict_models, "directory with simd_model.json, bus_model.json, energy_model.json")
      ->required();
  predict->add_option("--exclude", predict_exclude, "net names left out of the error summary");
  predict->add_option("--out", out_path);

  // report
  auto* report = app.add_subcommand("report", "Reproduce the bundled reference tables");
  std::vector<std::string> report_tables;
  std::optional<std::string> report_export_path;
  report->add_option("--tables", report_tables, "any of 2 3 4 5 aggregates")->delimiter(',');
  report->add_option("--export-counters", report_export_path,
                     "write the bundled dataset as a counters CSV to this path");
  report->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));
  report->add_option("--out", out_path);

  // correlate
  auto* correlate = app.add_subcommand("correlate", "Pearson correlation of two CSV columns");
  std::string corr_file, corr_x, corr_y;
  correlate->add_option("csvfile", corr_file)->required();
  correlate->add_option("--x", corr_x)->required();
  correlate->add_option("--y", corr_y)->required();
  correlate->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (cost->parsed()) return cmd_cost(cost_net, format, out_path);
    if (energy->parsed())
      return cmd_energy(energy_trace, energy_markers, energy_channel, energy_baseline, format,
                        out_path);
    if (fit->parsed())
      return cmd_fit(fit_counters, fit_model, fit_x, fit_y, fit_x2, fit_loocv, out_path);
    if (predict->parsed())
      return cmd_predict(predict_net, predict_mac, predict_counters, predict_models,
                         predict_exclude, out_path);
    if (report->parsed())
      return cmd_report(report_tables, report_export_path, format, out_path);
    if (correlate->parsed()) return cmd_correlate(corr_file, corr_x, corr_y, out_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitOk;
}
