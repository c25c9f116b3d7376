#include "enprof/netmodel.hpp"

#include <set>

#include <json.hpp>

#include "enprof/errors.hpp"

namespace enprof::netmodel {

namespace {

using nlohmann::json;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r))
    throw ComputeError("cost overflows 64-bit unsigned arithmetic");
  return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r))
    throw ComputeError("cost overflows 64-bit unsigned arithmetic");
  return r;
}

std::uint64_t volume(const Dims3& d) { return checked_mul(checked_mul(d.x, d.y), d.z); }

void reject_unknown(const json& object, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : object.items())
    if (!allowed.contains(key))
      throw ValidationError(where + ": unknown field '" + key + "'");
}

std::uint64_t positive_dim(const json& value, const std::string& where) {
  if (!value.is_number_unsigned() || value.get<std::uint64_t>() == 0)
    throw ValidationError(where + ": dimension must be a positive integer");
  return value.get<std::uint64_t>();
}

Dims3 read_dims3(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 3)
    throw ValidationError(where + ": expected an array of 3 positive integers");
  return {positive_dim(value[0], where), positive_dim(value[1], where),
          positive_dim(value[2], where)};
}

Dims2 read_dims2(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 2)
    throw ValidationError(where + ": expected an array of 2 positive integers");
  return {positive_dim(value[0], where), positive_dim(value[1], where)};
}

void require(bool present, const std::string& where, const char* field) {
  if (!present)
    throw ValidationError(where + ": missing " + field + " for this layer kind");
}

// O = floor((I + 2*pad - K)/stride) + 1, the usual deploy-file convention.
std::optional<std::uint64_t> expected_out(std::uint64_t in, std::uint64_t kernel,
                                          std::uint64_t stride, std::uint64_t pad) {
  if (stride == 0) return std::nullopt;
  std::uint64_t padded = checked_add(in, checked_mul(2, pad));
  if (padded < kernel) return std::nullopt;
  return (padded - kernel) / stride + 1;
}

void check_geometry(const LayerSpec& layer, std::vector<std::string>* warnings) {
  if (!warnings || !layer.stride || !layer.pad) return;
  if (!layer.in || !layer.kernel || !layer.out) return;
  struct Axis {
    const char* name;
    std::uint64_t in, kernel, out;
  };
  for (const Axis& a : {Axis{"width", layer.in->x, layer.kernel->x, layer.out->x},
                        Axis{"height", layer.in->y, layer.kernel->y, layer.out->y}}) {
    auto expect = expected_out(a.in, a.kernel, *layer.stride, *layer.pad);
    if (!expect || *expect != a.out)
      warnings->push_back("layer '" + layer.name + "': output " + a.name + " " +
                          std::to_string(a.out) +
                          " does not match stride/pad geometry" +
                          (expect ? " (expected " + std::to_string(*expect) + ")" : ""));
  }
}

LayerSpec read_layer(const json& value, std::size_t index,
                     std::vector<std::string>* warnings) {
  std::string where = "layers[" + std::to_string(index) + "]";
  if (!value.is_object()) throw ValidationError(where + ": expected an object");
  reject_unknown(value, {"name", "kind", "in", "kernel", "out", "stride", "pad"}, where);

  LayerSpec layer;
  if (!value.contains("name") || !value["name"].is_string() ||
      value["name"].get<std::string>().empty())
    throw ValidationError(where + ": missing or empty 'name'");
  layer.name = value["name"].get<std::string>();
  where += " ('" + layer.name + "')";

  if (!value.contains("kind") || !value["kind"].is_string())
    throw ValidationError(where + ": missing 'kind'");
  auto kind = layer_kind_from(value["kind"].get<std::string>());
  if (!kind)
    throw ValidationError(where + ": unknown kind '" +
                          value["kind"].get<std::string>() + "'");
  layer.kind = *kind;

  if (value.contains("in")) layer.in = read_dims3(value["in"], where + ".in");
  if (value.contains("kernel")) layer.kernel = read_dims2(value["kernel"], where + ".kernel");
  if (value.contains("out")) layer.out = read_dims3(value["out"], where + ".out");
  for (const char* field : {"stride", "pad"}) {
    if (!value.contains(field)) continue;
    if (!value[field].is_number_unsigned())
      throw ValidationError(where + "." + field + ": must be a non-negative integer");
    (field[0] == 's' ? layer.stride : layer.pad) = value[field].get<std::uint64_t>();
  }

  if (layer.kind == LayerKind::Conv || layer.kind == LayerKind::DwSep) {
    require(layer.in.has_value(), where, "in");
    require(layer.kernel.has_value(), where, "kernel");
    require(layer.out.has_value(), where, "out");
  }
  if (layer.kind == LayerKind::Fc) {
    require(layer.in.has_value(), where, "in");
    require(layer.out.has_value(), where, "out");
  }
  check_geometry(layer, warnings);
  return layer;
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::DwSep: return "dwsep";
    case LayerKind::Fc: return "fc";
    case LayerKind::Pool: return "pool";
    case LayerKind::Relu: return "relu";
    case LayerKind::Norm: return "norm";
    case LayerKind::Other: return "other";
  }
  return "other";
}

std::optional<LayerKind> layer_kind_from(std::string_view name) {
  for (LayerKind kind : {LayerKind::Conv, LayerKind::DwSep, LayerKind::Fc,
                         LayerKind::Pool, LayerKind::Relu, LayerKind::Norm,
                         LayerKind::Other})
    if (name == to_string(kind)) return kind;
  return std::nullopt;
}

NetworkSpec parse_network(const std::string& text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("syntax error at byte " + std::to_string(e.byte) + ": " +
                          e.what());
  }
  if (!doc.is_object()) throw ValidationError("network definition must be an object");
  reject_unknown(doc, {"name", "batch", "layers"}, "network");

  NetworkSpec net;
  if (!doc.contains("name") || !doc["name"].is_string() ||
      doc["name"].get<std::string>().empty())
    throw ValidationError("network: missing or empty 'name'");
  net.name = doc["name"].get<std::string>();

  if (!doc.contains("batch") || !doc["batch"].is_number_unsigned() ||
      doc["batch"].get<std::uint64_t>() == 0)
    throw ValidationError("network: 'batch' must be an integer >= 1");
  net.batch = doc["batch"].get<std::uint64_t>();

  if (!doc.contains("layers") || !doc["layers"].is_array())
    throw ValidationError("network: missing 'layers' array");
  for (std::size_t i = 0; i < doc["layers"].size(); ++i)
    net.layers.push_back(read_layer(doc["layers"][i], i, warnings));

  validate_network(net);
  return net;
}

void validate_network(const NetworkSpec& net) {
  if (net.layers.empty()) throw ValidationError("network has no layers");
  if (net.batch == 0) throw ValidationError("network: 'batch' must be >= 1");
  std::set<std::string> seen;
  for (const auto& layer : net.layers)
    if (!seen.insert(layer.name).second)
      throw ValidationError("duplicate layer name '" + layer.name + "'");
}

std::uint64_t mac_conv(const LayerSpec& layer) {
  if (layer.kind != LayerKind::Conv)
    throw ValidationError("mac_conv: layer '" + layer.name + "' is not conv");
  if (!layer.in || !layer.kernel || !layer.out)
    throw ValidationError("mac_conv: layer '" + layer.name + "' missing dimensions");
  return checked_mul(checked_mul(volume(*layer.out), checked_mul(layer.kernel->x, layer.kernel->y)),
                     layer.in->z);
}

std::uint64_t mac_dwsep(const LayerSpec& layer) {
  if (layer.kind != LayerKind::DwSep)
    throw ValidationError("mac_dwsep: layer '" + layer.name + "' is not dwsep");
  if (!layer.in || !layer.kernel || !layer.out)
    throw ValidationError("mac_dwsep: layer '" + layer.name + "' missing dimensions");
  std::uint64_t plane = checked_mul(layer.out->x, layer.out->y);
  std::uint64_t depthwise =
      checked_mul(checked_mul(plane, checked_mul(layer.kernel->x, layer.kernel->y)), layer.in->z);
  std::uint64_t pointwise = checked_mul(checked_mul(layer.in->z, layer.out->z), plane);
  return checked_add(depthwise, pointwise);
}

std::uint64_t storage_bytes(const LayerSpec& layer) {
  if (layer.kind != LayerKind::Conv && layer.kind != LayerKind::DwSep)
    throw ValidationError("storage_bytes: layer '" + layer.name + "' is not conv or dwsep");
  if (!layer.in || !layer.kernel || !layer.out)
    throw ValidationError("storage_bytes: layer '" + layer.name + "' missing dimensions");
  std::uint64_t weights =
      checked_mul(checked_mul(layer.kernel->x, layer.kernel->y),
                  checked_mul(layer.in->z, layer.out->z));
  std::uint64_t values = checked_add(checked_add(volume(*layer.in), weights), volume(*layer.out));
  return checked_mul(values, 4);
}

std::uint64_t fc_mac(const LayerSpec& layer) {
  if (layer.kind != LayerKind::Fc)
    throw ValidationError("fc_mac: layer '" + layer.name + "' is not fc");
  if (!layer.in || !layer.out)
    throw ValidationError("fc_mac: layer '" + layer.name + "' missing dimensions");
  return checked_mul(volume(*layer.in), volume(*layer.out));
}

CostBreakdown network_costs(const NetworkSpec& net) {
  validate_network(net);
  CostBreakdown breakdown;
  for (const auto& layer : net.layers) {
    LayerCost cost{layer.name, layer.kind, 0, 0};
    switch (layer.kind) {
      case LayerKind::Conv:
        cost.mac = mac_conv(layer);
        cost.storage_bytes = storage_bytes(layer);
        break;
      case LayerKind::DwSep:
        cost.mac = mac_dwsep(layer);
        cost.storage_bytes = storage_bytes(layer);
        break;
      case LayerKind::Fc:
        cost.mac = fc_mac(layer);
        break;
      default:
        break;  // pool/relu/norm/other cost nothing here
    }
    cost.mac = checked_mul(cost.mac, net.batch);
    cost.storage_bytes = checked_mul(cost.storage_bytes, net.batch);
    if (layer.kind == LayerKind::Conv || layer.kind == LayerKind::DwSep) {
      breakdown.total_conv_mac = checked_add(breakdown.total_conv_mac, cost.mac);
      breakdown.total_storage_bytes =
          checked_add(breakdown.total_storage_bytes, cost.storage_bytes);
    }
    breakdown.layers.push_back(std::move(cost));
  }
  return breakdown;
}

}  // namespace enprof::netmodel
