#include "enprof/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "enprof/csv.hpp"
#include "enprof/errors.hpp"

namespace enprof::predictor {

namespace {

using nlohmann::json;

constexpr double kDeterminantTolerance = 1e-12;

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw ComputeError(std::string(what) + " is not finite");
}

double require_field(const CounterRecord& record, const std::optional<std::uint64_t>& field,
                     const char* name) {
  if (!field)
    throw ValidationError("record '" + record.net + "': missing " + name);
  return static_cast<double>(*field);
}

double require_energy(const CounterRecord& record) {
  if (!record.energy_mj)
    throw ValidationError("record '" + record.net + "': missing energy_mj");
  return *record.energy_mj;
}

EnergyModel2 fit_rows(const std::vector<const CounterRecord*>& rows) {
  Eigen::VectorXd bus(rows.size()), simd(rows.size()), energy(rows.size());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bus(static_cast<Eigen::Index>(i)) = require_field(*rows[i], rows[i]->bus_access, "bus_access");
    simd(static_cast<Eigen::Index>(i)) = require_field(*rows[i], rows[i]->simd, "simd");
    energy(static_cast<Eigen::Index>(i)) = require_energy(*rows[i]);
    names.push_back(rows[i]->net);
  }
  return fit_origin_2d(bus, simd, energy, std::move(names));
}

void reject_unknown(const json& object, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : object.items())
    if (!allowed.contains(key))
      throw ValidationError("model document: unknown field '" + key + "'");
}

double coefficient(const json& object, const char* name) {
  if (!object.contains(name))
    throw ValidationError(std::string("model document: missing '") + name + "'");
  if (!object[name].is_number())
    throw ValidationError(std::string("model document: '") + name + "' must be a number");
  double value = object[name].get<double>();
  if (!std::isfinite(value))
    throw ValidationError(std::string("model document: '") + name + "' is not finite");
  return value;
}

std::vector<std::string> trained_on(const json& object) {
  if (!object.contains("trained_on")) return {};
  if (!object["trained_on"].is_array())
    throw ValidationError("model document: 'trained_on' must be an array");
  std::vector<std::string> names;
  for (const auto& entry : object["trained_on"]) {
    if (!entry.is_string())
      throw ValidationError("model document: 'trained_on' entries must be strings");
    names.push_back(entry.get<std::string>());
  }
  return names;
}

}  // namespace

OriginModel1 fit_origin_1d(Eigen::Ref<const Eigen::VectorXd> x,
                           Eigen::Ref<const Eigen::VectorXd> y,
                           std::vector<std::string> names) {
  if (x.size() != y.size()) throw ValidationError("fit_origin_1d: series lengths differ");
  if (x.size() < 1) throw ValidationError("fit_origin_1d: empty input");
  double sxx = x.squaredNorm();
  if (sxx == 0) throw ComputeError("fit_origin_1d: all regressors are zero");
  OriginModel1 model;
  model.slope = x.dot(y) / sxx;
  require_finite(model.slope, "fit_origin_1d: slope");
  model.trained_on = std::move(names);
  return model;
}

EnergyModel2 fit_origin_2d(Eigen::Ref<const Eigen::VectorXd> bus,
                           Eigen::Ref<const Eigen::VectorXd> simd,
                           Eigen::Ref<const Eigen::VectorXd> energy,
                           std::vector<std::string> names) {
  if (bus.size() != simd.size() || bus.size() != energy.size())
    throw ValidationError("fit_origin_2d: series lengths differ");
  if (bus.size() < 2) throw ValidationError("fit_origin_2d: need at least 2 rows");

  Eigen::Matrix2d normal;
  normal << bus.squaredNorm(), bus.dot(simd), bus.dot(simd), simd.squaredNorm();
  Eigen::Vector2d rhs(bus.dot(energy), simd.dot(energy));

  double det = normal(0, 0) * normal(1, 1) - normal(0, 1) * normal(0, 1);
  double scale = std::max(normal(0, 0) * normal(1, 1), normal(0, 1) * normal(0, 1));
  if (scale == 0 || std::abs(det) <= kDeterminantTolerance * scale)
    throw ComputeError("fit_origin_2d: singular normal equations (collinear regressors)");

  EnergyModel2 model;
  model.bus_coeff = (rhs(0) * normal(1, 1) - rhs(1) * normal(0, 1)) / det;
  model.simd_coeff = (normal(0, 0) * rhs(1) - normal(0, 1) * rhs(0)) / det;
  require_finite(model.bus_coeff, "fit_origin_2d: bus coefficient");
  require_finite(model.simd_coeff, "fit_origin_2d: simd coefficient");
  model.trained_on = std::move(names);
  return model;
}

double predict_energy(double bus, double simd, const EnergyModel2& model) {
  return model.bus_coeff * bus + model.simd_coeff * simd;
}

ChainPrediction chain_predict(double mac, const OriginModel1& simd_from_mac,
                              const OriginModel1& bus_from_simd,
                              const EnergyModel2& energy_model) {
  ChainPrediction prediction;
  prediction.simd_hat = simd_from_mac.predict(mac);
  prediction.bus_hat = bus_from_simd.predict(prediction.simd_hat);
  prediction.energy_hat_mj =
      predict_energy(prediction.bus_hat, prediction.simd_hat, energy_model);
  return prediction;
}

double relative_error(double predicted, double actual) {
  if (!(actual > 0)) throw ComputeError("relative_error: actual value must be positive");
  return std::abs(predicted - actual) / actual * 100.0;
}

ErrorSummary summarize_errors(std::span<const double> errors_pct) {
  if (errors_pct.empty()) throw ValidationError("summarize_errors: empty input");
  ErrorSummary summary;
  summary.n = errors_pct.size();
  for (double e : errors_pct) summary.mean_pct += e;
  summary.mean_pct /= static_cast<double>(summary.n);
  if (summary.n > 1) {
    double ss = 0;
    for (double e : errors_pct) ss += (e - summary.mean_pct) * (e - summary.mean_pct);
    summary.stddev_pct = std::sqrt(ss / static_cast<double>(summary.n - 1));
  }
  return summary;
}

LoocvResult loocv(const std::vector<CounterRecord>& pool) {
  if (pool.size() < 3)
    throw ValidationError("loocv: need at least 3 records");
  LoocvResult result;
  for (std::size_t excluded = 0; excluded < pool.size(); ++excluded) {
    std::vector<const CounterRecord*> train;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (i != excluded) train.push_back(&pool[i]);

    FoldResult fold;
    fold.excluded_net = pool[excluded].net;
    fold.model = fit_rows(train);
    for (const CounterRecord* record : train) {
      double predicted = predict_energy(require_field(*record, record->bus_access, "bus_access"),
                                        require_field(*record, record->simd, "simd"),
                                        fold.model);
      fold.train_errors_pct.emplace_back(record->net,
                                         relative_error(predicted, require_energy(*record)));
    }
    double predicted =
        predict_energy(require_field(pool[excluded], pool[excluded].bus_access, "bus_access"),
                       require_field(pool[excluded], pool[excluded].simd, "simd"),
                       fold.model);
    fold.test_error_pct = relative_error(predicted, require_energy(pool[excluded]));
    result.folds.push_back(std::move(fold));
  }

  std::vector<const CounterRecord*> all;
  for (const auto& record : pool) all.push_back(&record);
  result.all_nets = fit_rows(all);
  for (const CounterRecord* record : all) {
    double predicted = predict_energy(static_cast<double>(*record->bus_access),
                                      static_cast<double>(*record->simd), result.all_nets);
    result.all_nets_train_errors_pct.emplace_back(
        record->net, relative_error(predicted, *record->energy_mj));
  }
  return result;
}

std::vector<CounterRecord> parse_counters(const std::string& csv_text) {
  static const std::vector<std::string> kHeader = {"net",        "mac",       "simd",
                                                   "bus_access", "energy_mj", "time_s"};
  csv::Table table = csv::read(csv_text);
  if (table.header != kHeader)
    throw ValidationError("counters header must be 'net,mac,simd,bus_access,energy_mj,time_s'");

  std::vector<CounterRecord> records;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::string line = "line " + std::to_string(r + 2);
    if (row[0].empty()) throw ValidationError(line + ": empty net name");
    CounterRecord record;
    record.net = row[0];
    if (!row[1].empty()) record.mac = csv::to_u64(row[1], line + ", column mac");
    if (!row[2].empty()) record.simd = csv::to_u64(row[2], line + ", column simd");
    if (!row[3].empty()) record.bus_access = csv::to_u64(row[3], line + ", column bus_access");
    if (!row[4].empty()) {
      double energy = csv::to_double(row[4], line + ", column energy_mj");
      if (!(energy > 0)) throw ValidationError(line + ": energy_mj must be positive");
      record.energy_mj = energy;
    }
    if (!row[5].empty()) {
      double time = csv::to_double(row[5], line + ", column time_s");
      if (!(time > 0)) throw ValidationError(line + ": time_s must be positive");
      record.time_s = time;
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::string counters_csv(const std::vector<CounterRecord>& records) {
  std::string out = "net,mac,simd,bus_access,energy_mj,time_s\n";
  char buffer[64];
  auto number = [&buffer](double value) {
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return std::string(buffer);
  };
  for (const auto& record : records) {
    out += record.net;
    out += ',';
    if (record.mac) out += std::to_string(*record.mac);
    out += ',';
    if (record.simd) out += std::to_string(*record.simd);
    out += ',';
    if (record.bus_access) out += std::to_string(*record.bus_access);
    out += ',';
    if (record.energy_mj) out += number(*record.energy_mj);
    out += ',';
    if (record.time_s) out += number(*record.time_s);
    out += '\n';
  }
  return out;
}

OriginModel1 fit_simd_from_mac(const std::vector<CounterRecord>& records) {
  Eigen::VectorXd x(records.size()), y(records.size());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < records.size(); ++i) {
    x(static_cast<Eigen::Index>(i)) = require_field(records[i], records[i].mac, "mac");
    y(static_cast<Eigen::Index>(i)) = require_field(records[i], records[i].simd, "simd");
    names.push_back(records[i].net);
  }
  return fit_origin_1d(x, y, std::move(names));
}

OriginModel1 fit_bus_from_simd(const std::vector<CounterRecord>& records) {
  Eigen::VectorXd x(records.size()), y(records.size());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < records.size(); ++i) {
    x(static_cast<Eigen::Index>(i)) = require_field(records[i], records[i].simd, "simd");
    y(static_cast<Eigen::Index>(i)) = require_field(records[i], records[i].bus_access, "bus_access");
    names.push_back(records[i].net);
  }
  return fit_origin_1d(x, y, std::move(names));
}

EnergyModel2 fit_energy(const std::vector<CounterRecord>& records) {
  std::vector<const CounterRecord*> rows;
  for (const auto& record : records) rows.push_back(&record);
  return fit_rows(rows);
}

std::string save_model(const Model& model) {
  json doc;
  if (const auto* origin = std::get_if<OriginModel1>(&model)) {
    doc["kind"] = "origin1";
    doc["slope"] = origin->slope;
    doc["trained_on"] = origin->trained_on;
  } else {
    const auto& energy = std::get<EnergyModel2>(model);
    doc["kind"] = "energy2";
    doc["bus_coeff"] = energy.bus_coeff;
    doc["simd_coeff"] = energy.simd_coeff;
    doc["trained_on"] = energy.trained_on;
  }
  return doc.dump(2) + "\n";
}

Model load_model(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError("model document: syntax error at byte " + std::to_string(e.byte) +
                          ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("model document must be an object");
  if (!doc.contains("kind") || !doc["kind"].is_string())
    throw ValidationError("model document: missing 'kind'");
  std::string kind = doc["kind"].get<std::string>();
  if (kind == "origin1") {
    reject_unknown(doc, {"kind", "slope", "trained_on"});
    OriginModel1 model;
    model.slope = coefficient(doc, "slope");
    model.trained_on = trained_on(doc);
    return model;
  }
  if (kind == "energy2") {
    reject_unknown(doc, {"kind", "bus_coeff", "simd_coeff", "trained_on"});
    EnergyModel2 model;
    model.bus_coeff = coefficient(doc, "bus_coeff");
    model.simd_coeff = coefficient(doc, "simd_coeff");
    model.trained_on = trained_on(doc);
    return model;
  }
  throw ValidationError("model document: unknown kind '" + kind + "'");
}

}  // namespace enprof::predictor
