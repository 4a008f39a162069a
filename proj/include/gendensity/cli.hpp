#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gendensity/density.hpp"
#include "gendensity/scores.hpp"

namespace gendensity::cli {

/// Resolves a generator source:
///   builtin:identity?m=3
///   builtin:linear?a=2,0;0,3
///   builtin:circle
///   builtin:memorizer?preset=square&sharpness=50[&capture=0.86]
///   builtin:memorizer?layout=layout.json
///   builtin:smooth?preset=pair
///   path/to/network.json
Generator resolve_generator(const std::string& source);

/// "normal" or "uniform:<lo>:<hi>".
LatentPrior resolve_prior(const std::string& spec, Eigen::Index dim);

/// Comma-separated numbers.
Vector parse_vector(const std::string& text);

struct AnchorFile {
  std::vector<Vector> latents;
  std::vector<std::string> labels;
};

/// Accepts a JSON list of vectors, a list of {"z": [...], "label": ...}
/// objects, or an object holding either under "anchors".
AnchorFile read_anchor_file(const std::string& path);

/// Entry point shared by the executable and the tests. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gendensity::cli
