#include "enprof/tracelab.hpp"

#include <algorithm>
#include <cmath>

#include "enprof/csv.hpp"
#include "enprof/errors.hpp"

namespace enprof::tracelab {

namespace {

constexpr Channel kAllChannels[] = {Channel::VddIn, Channel::VddCpu, Channel::VddGpu};

std::string window_text(double t0, double t1) {
  return "[" + std::to_string(t0) + ", " + std::to_string(t1) + "]";
}

void check_window(const PowerTrace& trace, double t0, double t1) {
  if (!(t0 < t1))
    throw ComputeError("window " + window_text(t0, t1) + " is empty or inverted");
  if (t0 < trace.t_begin() || t1 > trace.t_end())
    throw ComputeError("window " + window_text(t0, t1) + " outside trace span " +
                       window_text(trace.t_begin(), trace.t_end()));
}

}  // namespace

std::string_view channel_name(Channel channel) {
  switch (channel) {
    case Channel::VddIn: return "VDD_IN";
    case Channel::VddCpu: return "VDD_CPU";
    case Channel::VddGpu: return "VDD_GPU";
  }
  return "VDD_IN";
}

std::string_view column_name(Channel channel) {
  switch (channel) {
    case Channel::VddIn: return "vdd_in_mw";
    case Channel::VddCpu: return "vdd_cpu_mw";
    case Channel::VddGpu: return "vdd_gpu_mw";
  }
  return "vdd_in_mw";
}

std::optional<Channel> channel_from(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (Channel channel : kAllChannels) {
    if (lower == column_name(channel)) return channel;
    std::string plain(column_name(channel));
    plain.resize(plain.size() - 3);  // drop the "_mw" suffix
    if (lower == plain) return channel;
  }
  return std::nullopt;
}

bool PowerTrace::has_channel(Channel channel) const {
  return std::find(channels.begin(), channels.end(), channel) != channels.end();
}

const Eigen::VectorXd& PowerTrace::channel_power(Channel channel) const {
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (channels[i] == channel) return power_mw[i];
  throw ValidationError("channel " + std::string(channel_name(channel)) +
                        " not present in trace");
}

PowerTrace parse_trace(const std::string& csv_text) {
  csv::Table table = csv::read(csv_text);
  if (table.header.empty() || table.header[0] != "t_s")
    throw ValidationError("trace header must start with 't_s'");
  if (table.header.size() < 2)
    throw ValidationError("trace header declares no power channel");

  PowerTrace trace;
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    std::optional<Channel> channel;
    for (Channel candidate : kAllChannels)
      if (table.header[c] == column_name(candidate)) channel = candidate;
    if (!channel)
      throw ValidationError("unknown trace column '" + table.header[c] + "'");
    if (trace.has_channel(*channel))
      throw ValidationError("duplicate trace column '" + table.header[c] + "'");
    trace.channels.push_back(*channel);
  }

  const std::size_t n = table.rows.size();
  if (n < 2) throw ValidationError("trace must contain at least 2 samples");
  trace.t_s.resize(static_cast<Eigen::Index>(n));
  trace.power_mw.assign(trace.channels.size(), Eigen::VectorXd(n));

  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    std::string line = "line " + std::to_string(r + 2);
    double t = csv::to_double(row[0], line + ", column t_s");
    if (r == 0 && t < 0) throw ValidationError(line + ": negative timestamp");
    if (r > 0 && t <= trace.t_s(static_cast<Eigen::Index>(r - 1)))
      throw ValidationError(line + ": non-increasing timestamp");
    trace.t_s(static_cast<Eigen::Index>(r)) = t;
    for (std::size_t c = 0; c < trace.channels.size(); ++c) {
      const std::string& field = row[c + 1];
      std::string where = line + ", column " + table.header[c + 1];
      if (field.empty()) throw ValidationError(where + ": missing value");
      double p = csv::to_double(field, where);
      if (p < 0) throw ValidationError(where + ": negative power");
      trace.power_mw[c](static_cast<Eigen::Index>(r)) = p;
    }
  }
  return trace;
}

MarkerSet parse_markers(const std::string& csv_text) {
  csv::Table table = csv::read(csv_text);
  if (table.header != std::vector<std::string>{"label", "start_s", "end_s"})
    throw ValidationError("marker header must be 'label,start_s,end_s'");
  MarkerSet markers;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::string line = "line " + std::to_string(r + 2);
    if (row[0].empty()) throw ValidationError(line + ": empty label");
    MarkerInterval interval;
    interval.label = row[0];
    interval.start_s = csv::to_double(row[1], line + ", column start_s");
    interval.end_s = csv::to_double(row[2], line + ", column end_s");
    if (!(interval.start_s < interval.end_s))
      throw ValidationError(line + ": marker start must precede end");
    markers.intervals.push_back(std::move(interval));
  }
  return markers;
}

double integrate(const PowerTrace& trace, Channel channel, double t0, double t1) {
  check_window(trace, t0, t1);
  const Eigen::VectorXd& power = trace.channel_power(channel);
  double energy = 0;
  for (Eigen::Index i = 0; i + 1 < trace.t_s.size(); ++i) {
    if (trace.t_s(i) >= t1) break;
    double lo = std::max(t0, trace.t_s(i));
    double hi = std::min(t1, trace.t_s(i + 1));
    if (hi > lo) energy += power(i + 1) * (hi - lo);
  }
  return energy;
}

double baseline_power(const PowerTrace& trace, Channel channel, double t0, double t1) {
  return integrate(trace, channel, t0, t1) / (t1 - t0);
}

EnergyReport interval_energy(const PowerTrace& trace, const MarkerSet& markers,
                             Channel channel, std::optional<double> baseline_mw) {
  EnergyReport report;
  for (const auto& interval : markers.intervals) {
    if (interval.start_s < trace.t_begin() || interval.end_s > trace.t_end())
      throw ComputeError("marker '" + interval.label + "' " +
                         window_text(interval.start_s, interval.end_s) +
                         " outside trace span " +
                         window_text(trace.t_begin(), trace.t_end()));
    EnergyRow row;
    row.label = interval.label;
    row.t_start_s = interval.start_s;
    row.t_end_s = interval.end_s;
    row.duration_s = interval.end_s - interval.start_s;
    row.energy_mj = integrate(trace, channel, interval.start_s, interval.end_s);
    row.baseline_mj = baseline_mw ? *baseline_mw * row.duration_s : 0.0;
    report.total_energy_mj += row.energy_mj;
    report.total_baseline_mj += row.baseline_mj;
    report.rows.push_back(std::move(row));
  }
  return report;
}

RunSummary select_run(const std::vector<Run>& runs) {
  if (runs.empty()) throw ValidationError("select_run: empty run list");
  RunSummary summary;
  summary.runs = runs;
  summary.energy_min_mj = runs[0].energy_mj;
  summary.energy_max_mj = runs[0].energy_mj;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].duration_s < runs[summary.selected].duration_s) summary.selected = i;
    summary.energy_min_mj = std::min(summary.energy_min_mj, runs[i].energy_mj);
    summary.energy_max_mj = std::max(summary.energy_max_mj, runs[i].energy_mj);
  }
  return summary;
}

double pearson(Eigen::Ref<const Eigen::VectorXd> xs, Eigen::Ref<const Eigen::VectorXd> ys) {
  if (xs.size() != ys.size())
    throw ValidationError("pearson: series lengths differ");
  if (xs.size() < 2) throw ValidationError("pearson: need at least 2 points");
  Eigen::ArrayXd xc = xs.array() - xs.mean();
  Eigen::ArrayXd yc = ys.array() - ys.mean();
  double sxx = (xc * xc).sum();
  double syy = (yc * yc).sum();
  if (sxx == 0 || syy == 0) throw ComputeError("pearson: zero variance");
  double r = (xc * yc).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace enprof::tracelab
