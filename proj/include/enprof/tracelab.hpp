#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace enprof::tracelab {

/// Power-monitor rails: system, CPU and GPU post-regulation power.
enum class Channel { VddIn, VddCpu, VddGpu };

std::string_view channel_name(Channel channel);  // "VDD_IN"
std::string_view column_name(Channel channel);   // "vdd_in_mw"
std::optional<Channel> channel_from(std::string_view name);

/// Timestamped multi-channel power samples. Timestamps are strictly
/// increasing seconds; powers are milliwatts. Every declared channel has a
/// value for every sample.
struct PowerTrace {
  Eigen::VectorXd t_s;
  std::vector<Channel> channels;
  std::vector<Eigen::VectorXd> power_mw;  // parallel to `channels`

  bool has_channel(Channel channel) const;
  const Eigen::VectorXd& channel_power(Channel channel) const;
  double t_begin() const { return t_s(0); }
  double t_end() const { return t_s(t_s.size() - 1); }
};

struct MarkerInterval {
  std::string label;
  double start_s = 0;
  double end_s = 0;
};

/// Labeled time intervals mapping application phases or layers onto a trace.
/// Labels may repeat (the same layer across runs).
struct MarkerSet {
  std::vector<MarkerInterval> intervals;
};

struct EnergyRow {
  std::string label;
  double t_start_s = 0;
  double t_end_s = 0;
  double duration_s = 0;
  double energy_mj = 0;
  double baseline_mj = 0;  // baseline power * duration; 0 when no baseline given
};

struct EnergyReport {
  std::vector<EnergyRow> rows;
  double total_energy_mj = 0;
  double total_baseline_mj = 0;
};

struct Run {
  double duration_s = 0;
  double energy_mj = 0;
};

struct RunSummary {
  std::vector<Run> runs;
  std::size_t selected = 0;  // minimum duration; first occurrence on ties
  double energy_min_mj = 0;
  double energy_max_mj = 0;
};

/// Parses a trace CSV with header `t_s` followed by any non-empty subset of
/// {vdd_in_mw, vdd_cpu_mw, vdd_gpu_mw}.
PowerTrace parse_trace(const std::string& csv_text);

/// Parses a marker CSV with header `label,start_s,end_s`.
MarkerSet parse_markers(const std::string& csv_text);

/// Right-endpoint rectangle sum over [t0, t1]: each sample interval
/// (t_i, t_i+1] contributes P_i+1 times its width clipped to the window. No
/// interpolation; a window boundary between samples keeps that interval's
/// right-endpoint power over the clipped width. mW x s = mJ.
double integrate(const PowerTrace& trace, Channel channel, double t0, double t1);

/// Time-weighted mean power over an idle window: integrate / (t1 - t0).
double baseline_power(const PowerTrace& trace, Channel channel, double t0, double t1);

/// One energy row per marker interval. When a baseline power is supplied the
/// row reports baseline * duration alongside the gross energy; gross energy
/// is never silently reduced.
EnergyReport interval_energy(const PowerTrace& trace, const MarkerSet& markers,
                             Channel channel,
                             std::optional<double> baseline_mw = std::nullopt);

RunSummary select_run(const std::vector<Run>& runs);

/// Sample Pearson correlation coefficient; requires equal sizes >= 2 and
/// nonzero variance on both sides.
double pearson(Eigen::Ref<const Eigen::VectorXd> xs, Eigen::Ref<const Eigen::VectorXd> ys);

}  // namespace enprof::tracelab
