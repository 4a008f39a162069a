#include "gendensity/network_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gendensity/errors.hpp"

namespace gendensity {

namespace {

using nlohmann::json;

Vector read_vector(const json& node, const std::string& what) {
  if (!node.is_array()) throw LoadError(what + " must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) throw LoadError(what + " contains a non-numeric entry");
    out[static_cast<Eigen::Index>(i)] = node[i].get<double>();
  }
  return out;
}

Matrix read_matrix(const json& node, const std::string& what) {
  if (!node.is_array() || node.empty()) throw LoadError(what + " must be a non-empty array of rows");
  const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
  if (cols == 0) throw LoadError(what + " has an empty first row");
  Matrix out(static_cast<Eigen::Index>(node.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < node.size(); ++r) {
    if (!node[r].is_array() || node[r].size() != cols) {
      throw LoadError(what + " is ragged at row " + std::to_string(r));
    }
    out.row(static_cast<Eigen::Index>(r)) =
        read_vector(node[r], what + " row " + std::to_string(r)).transpose();
  }
  return out;
}

}  // namespace

NetworkBundle parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("network file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw LoadError("network document must be a JSON object");
  if (!doc.contains("layers") || !doc["layers"].is_array()) {
    throw LoadError("network document has no \"layers\" array");
  }

  NetworkBundle bundle;
  const auto& layers = doc["layers"];
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const std::string where = "layer " + std::to_string(k);
    const auto& node = layers[k];
    if (!node.is_object()) throw LoadError(where + ": expected an object");
    for (const char* key : {"weights", "bias", "activation"}) {
      if (!node.contains(key)) throw LoadError(where + ": missing \"" + key + "\"");
    }
    DenseLayer layer;
    layer.weights = read_matrix(node["weights"], where + " weights");
    layer.bias = read_vector(node["bias"], where + " bias");
    if (!node["activation"].is_string()) throw LoadError(where + ": activation must be a string");
    const auto name = node["activation"].get<std::string>();
    const auto activation = parse_activation(name);
    if (!activation) throw LoadError(where + ": unknown activation \"" + name + "\"");
    layer.activation = *activation;
    bundle.spec.layers.push_back(std::move(layer));
  }
  bundle.spec.validate();

  auto check_dim = [&](const char* key, Eigen::Index actual) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer() || doc[key].get<long long>() != actual) {
      std::ostringstream msg;
      msg << "\"" << key << "\" does not match the layer chain (layers give " << actual << ")";
      throw LoadError(msg.str());
    }
  };
  check_dim("latent_dim", bundle.spec.latent_dim());
  check_dim("output_dim", bundle.spec.output_dim());

  if (doc.contains("reference_io")) {
    const auto& pairs = doc["reference_io"];
    if (!pairs.is_array()) throw LoadError("\"reference_io\" must be an array");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string where = "reference_io[" + std::to_string(i) + "]";
      if (!pairs[i].is_object() || !pairs[i].contains("z") || !pairs[i].contains("x")) {
        throw LoadError(where + ": expected {\"z\": [...], \"x\": [...]}");
      }
      ReferencePair pair{read_vector(pairs[i]["z"], where + ".z"),
                         read_vector(pairs[i]["x"], where + ".x")};
      if (pair.z.size() != bundle.spec.latent_dim() || pair.x.size() != bundle.spec.output_dim()) {
        throw LoadError(where + ": dimensions do not match the network");
      }
      bundle.reference_io.push_back(std::move(pair));
    }
  }
  return bundle;
}

NetworkBundle read_network_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open network file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str());
}

Generator load_network(const std::filesystem::path& path) {
  return Generator::network(read_network_file(path).spec);
}

double max_reference_deviation(const Generator& generator,
                               const std::vector<ReferencePair>& pairs) {
  double worst = 0.0;
  for (const auto& pair : pairs) {
    worst = std::max(worst, (generator.evaluate(pair.z) - pair.x).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace gendensity
