#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "gendensity/generator.hpp"

namespace gendensity {

/// A recorded (z, f(z)) pair shipped alongside exported weights.
struct ReferencePair {
  Vector z;
  Vector x;
};

struct NetworkBundle {
  NetworkSpec spec;
  std::vector<ReferencePair> reference_io;
};

/// Parses the JSON interchange document
///   {"latent_dim": m, "output_dim": n,
///    "layers": [{"weights": [[...]], "bias": [...], "activation": "..."}],
///    "reference_io": [{"z": [...], "x": [...]}]}
/// Errors are LoadError and name the offending layer where there is one.
NetworkBundle parse_network(std::string_view text);
NetworkBundle read_network_file(const std::filesystem::path& path);

Generator load_network(const std::filesystem::path& path);

/// Largest absolute deviation between evaluate(z) and the recorded x.
double max_reference_deviation(const Generator& generator,
                               const std::vector<ReferencePair>& pairs);

}  // namespace gendensity
