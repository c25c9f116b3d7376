#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace enprof::netmodel {

enum class LayerKind { Conv, DwSep, Fc, Pool, Relu, Norm, Other };

std::string_view to_string(LayerKind kind);
std::optional<LayerKind> layer_kind_from(std::string_view name);

struct Dims3 {
  std::uint64_t x = 0, y = 0, z = 0;
};

struct Dims2 {
  std::uint64_t x = 0, y = 0;
};

/// One layer of a network definition. `in` is the input feature map
/// (width, height, channels), `kernel` the filter's spatial extent and `out`
/// the output feature map. Grouped convolutions carry channels-per-group in
/// in.z so the per-layer cost formula applies unchanged.
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::Other;
  std::optional<Dims3> in;
  std::optional<Dims2> kernel;
  std::optional<Dims3> out;
  std::optional<std::uint64_t> stride;  // documentation only
  std::optional<std::uint64_t> pad;     // documentation only
};

struct NetworkSpec {
  std::string name;
  std::uint64_t batch = 1;
  std::vector<LayerSpec> layers;
};

struct LayerCost {
  std::string name;
  LayerKind kind = LayerKind::Other;
  std::uint64_t mac = 0;
  std::uint64_t storage_bytes = 0;
};

struct CostBreakdown {
  std::vector<LayerCost> layers;
  std::uint64_t total_conv_mac = 0;       // conv + dwsep rows only
  std::uint64_t total_storage_bytes = 0;  // conv + dwsep rows only
};

/// Parses a JSON network definition. Top level: `name`, `batch`, `layers`;
/// per layer: `name`, `kind`, `in`, `kernel`, `out`, optional `stride`/`pad`.
/// Unknown fields are rejected. When both stride and pad are present the
/// output width/height are cross-checked against
/// floor((in + 2*pad - kernel)/stride) + 1; mismatches append to `warnings`
/// instead of failing (real definition files round inconsistently).
NetworkSpec parse_network(const std::string& text,
                          std::vector<std::string>* warnings = nullptr);

void validate_network(const NetworkSpec& net);

/// Multiply-accumulate count of a standard convolution:
/// out.x * out.y * out.z * kernel.x * kernel.y * in.z.
std::uint64_t mac_conv(const LayerSpec& layer);

/// MAC count of a depthwise-separable block: the depthwise term
/// out.x * out.y * kernel.x * kernel.y * in.z plus the 1x1 pointwise term
/// in.z * out.z * out.x * out.y.
std::uint64_t mac_dwsep(const LayerSpec& layer);

/// Bytes moved per invocation assuming 32-bit values: input map, filter
/// weights and output map, times four.
std::uint64_t storage_bytes(const LayerSpec& layer);

/// Fully-connected MAC count: flattened input size times output size.
std::uint64_t fc_mac(const LayerSpec& layer);

/// Per-layer and total costs, scaled by the batch size. Only conv and dwsep
/// rows contribute to the totals; fc MACs are reported per layer but carried
/// outside total_conv_mac. All arithmetic is exact: overflow of the unsigned
/// 64-bit range throws instead of wrapping.
CostBreakdown network_costs(const NetworkSpec& net);

}  // namespace enprof::netmodel
