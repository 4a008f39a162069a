#include "gendensity/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gendensity/dimension.hpp"
#include "gendensity/errors.hpp"
#include "gendensity/network_io.hpp"
#include "gendensity/paths.hpp"

namespace gendensity::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

ordered_json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v[i]));
  return out;
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current, sep)) parts.push_back(current);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw InputError("cannot parse " + what + " value \"" + text + "\"");
  }
}

Matrix read_rows(const json& node, const std::string& what) {
  if (!node.is_array() || node.empty()) throw InputError(what + " must be a non-empty list of rows");
  const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
  Matrix out(static_cast<Eigen::Index>(node.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < node.size(); ++r) {
    if (!node[r].is_array() || node[r].size() != cols || cols == 0) {
      throw InputError(what + " is ragged or empty at row " + std::to_string(r));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!node[r][c].is_number()) throw InputError(what + " has a non-numeric entry");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = node[r][c].get<double>();
    }
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + " is not valid JSON: " + e.what());
  }
}

CenterLayout read_layout_file(const std::string& path) {
  const json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("anchors") || !doc.contains("centers")) {
    throw InputError("layout file needs \"anchors\" and \"centers\"");
  }
  CenterLayout layout{read_rows(doc["anchors"], "layout anchors"),
                      read_rows(doc["centers"], "layout centers")};
  layout.validate();
  return layout;
}

std::map<std::string, std::string> parse_query(const std::string& query) {
  std::map<std::string, std::string> params;
  if (query.empty()) return params;
  for (const auto& item : split(query, '&')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("generator parameter \"" + item + "\" lacks '='");
    params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return params;
}

CenterLayout layout_from_params(const std::map<std::string, std::string>& params) {
  if (auto it = params.find("layout"); it != params.end()) return read_layout_file(it->second);
  const auto it = params.find("preset");
  const std::string preset = it == params.end() ? "square" : it->second;
  if (preset == "square") return square_layout();
  if (preset == "pair") return pair_layout();
  throw InputError("unknown layout preset \"" + preset + "\" (expected square or pair)");
}

void reject_unknown(const std::map<std::string, std::string>& params,
                    std::initializer_list<const char*> allowed, const std::string& name) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InputError("builtin:" + name + " does not take parameter \"" + key + "\"");
  }
}

}  // namespace

Vector parse_vector(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty()) throw InputError("empty vector");
  Vector out(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = parse_number(parts[i], "vector");
  }
  return out;
}

Generator resolve_generator(const std::string& source) {
  const std::string prefix = "builtin:";
  if (source.rfind(prefix, 0) != 0) return load_network(source);

  const std::string rest = source.substr(prefix.size());
  const auto q = rest.find('?');
  const std::string name = rest.substr(0, q);
  const auto params = parse_query(q == std::string::npos ? "" : rest.substr(q + 1));

  if (name == "identity") {
    reject_unknown(params, {"m"}, name);
    const auto it = params.find("m");
    const double m = it == params.end() ? 2.0 : parse_number(it->second, "m");
    if (m < 1 || m != std::floor(m)) throw InputError("identity dimension must be a positive integer");
    return Generator::identity(static_cast<Eigen::Index>(m));
  }
  if (name == "linear") {
    reject_unknown(params, {"a"}, name);
    const auto it = params.find("a");
    if (it == params.end()) throw InputError("builtin:linear needs a=<row;row;...>");
    const auto rows = split(it->second, ';');
    std::vector<Vector> parsed;
    for (const auto& row : rows) parsed.push_back(parse_vector(row));
    Matrix a(static_cast<Eigen::Index>(parsed.size()), parsed.front().size());
    for (std::size_t r = 0; r < parsed.size(); ++r) {
      if (parsed[r].size() != a.cols()) throw InputError("builtin:linear matrix is ragged");
      a.row(static_cast<Eigen::Index>(r)) = parsed[r].transpose();
    }
    return Generator::linear(std::move(a));
  }
  if (name == "circle") {
    reject_unknown(params, {}, name);
    return Generator::circle_embed();
  }
  if (name == "memorizer") {
    reject_unknown(params, {"preset", "layout", "sharpness", "capture"}, name);
    double sharpness = builtin::Memorizer::kDefaultSharpness;
    std::optional<double> capture;
    if (auto it = params.find("sharpness"); it != params.end()) sharpness = parse_number(it->second, "sharpness");
    if (auto it = params.find("capture"); it != params.end()) capture = parse_number(it->second, "capture");
    return Generator::memorizer(layout_from_params(params), sharpness, capture);
  }
  if (name == "smooth") {
    reject_unknown(params, {"preset", "layout"}, name);
    return Generator::smooth_interpolator(layout_from_params(params));
  }
  throw InputError("unknown builtin generator \"" + name + "\"");
}

LatentPrior resolve_prior(const std::string& spec, Eigen::Index dim) {
  if (spec == "normal") return LatentPrior::standard_normal(dim);
  const auto parts = split(spec, ':');
  if (parts.size() == 3 && parts[0] == "uniform") {
    return LatentPrior::uniform_box(dim, parse_number(parts[1], "prior lo"),
                                    parse_number(parts[2], "prior hi"));
  }
  throw InputError("unknown prior \"" + spec + "\" (expected normal or uniform:<lo>:<hi>)");
}

AnchorFile read_anchor_file(const std::string& path) {
  json doc = read_json_file(path);
  if (doc.is_object() && doc.contains("anchors")) doc = doc["anchors"];
  if (!doc.is_array()) throw InputError("anchors file must hold a JSON list");
  if (doc.empty()) throw InputError("anchors file " + path + " is empty");
  AnchorFile file;
  bool any_label = false;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const json* coords = &item;
    std::string label;
    if (item.is_object()) {
      if (!item.contains("z")) throw InputError("anchor " + std::to_string(i) + " lacks \"z\"");
      coords = &item["z"];
      if (item.contains("label")) {
        label = item["label"].is_string() ? item["label"].get<std::string>() : item["label"].dump();
        any_label = true;
      }
    }
    if (!coords->is_array() || coords->empty()) {
      throw InputError("anchor " + std::to_string(i) + " is not a list of numbers");
    }
    Vector z(static_cast<Eigen::Index>(coords->size()));
    for (std::size_t k = 0; k < coords->size(); ++k) {
      if (!(*coords)[k].is_number()) throw InputError("anchor " + std::to_string(i) + " has a non-numeric entry");
      z[static_cast<Eigen::Index>(k)] = (*coords)[k].get<double>();
    }
    file.latents.push_back(std::move(z));
    file.labels.push_back(std::move(label));
  }
  if (!any_label) file.labels.clear();
  return file;
}

namespace {

struct Options {
  std::vector<std::string> generators;
  std::string prior = "normal";
  double epsilon = 1e-5;
  double sv_threshold = 1e-6;
  int fixed_rank = -1;
  int samples = 0;  // 0: per-command default
  double t_max = 3.0;
  std::string radii = "0.5,1";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool allow_degenerate = false;
  std::string out;
  unsigned threads = 0;

  std::string point;
  std::string z1;
  std::string z2;
  int direction = 0;
  std::string anchors;
  int random_points = 0;
  int top_k = 20;
  bool pointcloud = false;
  std::string metric = "output";
};

EvaluationSettings settings_from(const Options& opt) {
  EvaluationSettings settings;
  settings.fd.epsilon = opt.epsilon;
  settings.rank.relative_threshold = opt.sv_threshold;
  if (opt.fixed_rank >= 0) settings.rank.fixed_rank = opt.fixed_rank;
  settings.threads = opt.threads;
  settings.fd.validate();
  settings.rank.validate();
  return settings;
}

std::vector<double> radii_from(const Options& opt) {
  const Vector r = parse_vector(opt.radii);
  return {r.data(), r.data() + r.size()};
}

ordered_json config_json(const std::string& command, const Options& opt,
                         std::size_t effective_samples) {
  ordered_json cfg;
  cfg["command"] = command;
  if (opt.generators.size() == 1) {
    cfg["generator"] = opt.generators.front();
  } else {
    cfg["generators"] = opt.generators;
  }
  cfg["prior"] = opt.prior;
  cfg["epsilon"] = opt.epsilon;
  cfg["sv_threshold"] = opt.sv_threshold;
  cfg["rank_mode"] = opt.fixed_rank >= 0 ? "fixed" : "per-point";
  if (opt.fixed_rank >= 0) cfg["fixed_rank"] = opt.fixed_rank;
  if (effective_samples > 0) cfg["samples"] = effective_samples;
  if (command == "decay" || command == "score") cfg["t_max"] = opt.t_max;
  if (command == "score") {
    cfg["radii"] = radii_from(opt);
    cfg["neighbor_metric"] = opt.metric;
  }
  if (command == "decay") {
    cfg["direction"] = opt.direction;
    cfg["allow_degenerate"] = opt.allow_degenerate;
  }
  if (!opt.point.empty()) cfg["point"] = opt.point;
  if (!opt.z1.empty()) cfg["z1"] = opt.z1;
  if (!opt.z2.empty()) cfg["z2"] = opt.z2;
  if (!opt.anchors.empty()) cfg["anchors"] = opt.anchors;
  if (opt.random_points > 0) cfg["random_points"] = opt.random_points;
  if (command == "dim") {
    cfg["top_k"] = opt.top_k;
    cfg["pointcloud"] = opt.pointcloud;
  }
  cfg["format"] = opt.format;
  cfg["seed"] = opt.seed;
  return cfg;
}

void write_csv_header(std::ostream& out, const ordered_json& cfg, const ordered_json& extra = {}) {
  out << "# config: " << cfg.dump() << "\n";
  if (!extra.is_null()) out << "# result: " << extra.dump() << "\n";
}

void emit(const Options& opt, std::ostream& stdout_stream, const std::string& payload) {
  if (opt.out.empty()) {
    stdout_stream << payload;
    return;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) throw InputError("cannot write " + opt.out);
  file << payload;
}

std::vector<Vector> gather_points(const Options& opt, const Generator& generator,
                                  const LatentPrior& prior, std::vector<std::string>* labels) {
  if (!opt.anchors.empty()) {
    auto file = read_anchor_file(opt.anchors);
    if (labels) *labels = file.labels;
    return file.latents;
  }
  if (opt.random_points > 0) {
    std::mt19937_64 rng(opt.seed);
    std::vector<Vector> points;
    for (int i = 0; i < opt.random_points; ++i) points.push_back(prior.sample(rng));
    return points;
  }
  if (auto layout = generator.layout()) {
    std::vector<Vector> points;
    for (Eigen::Index i = 0; i < layout->count(); ++i) points.emplace_back(layout->anchors.row(i).transpose());
    return points;
  }
  throw InputError("no points given: use --anchors, --random or --point");
}

ordered_json profile_json(const DensityProfile& profile) {
  ordered_json p;
  p["t"] = profile.times;
  p["s"] = profile.arclengths;
  ordered_json logs = ordered_json::array();
  for (double v : profile.log_densities) logs.push_back(number_or_null(v));
  p["log_density"] = logs;
  ordered_json flags = ordered_json::array();
  for (auto f : profile.flags) flags.push_back(to_string(f));
  p["flag"] = flags;
  p["rank"] = profile.ranks;
  return p;
}

std::string profile_csv(const DensityProfile& profile, const ordered_json& cfg,
                        const ordered_json& extra) {
  std::ostringstream out;
  write_csv_header(out, cfg, extra);
  out << "t,s,log_density,flag\n";
  for (std::size_t k = 0; k < profile.size(); ++k) {
    out << format_number(profile.times[k]) << "," << format_number(profile.arclengths[k]) << ","
        << format_number(profile.log_densities[k]) << "," << to_string(profile.flags[k]) << "\n";
  }
  return out.str();
}

std::string finish_json(ordered_json doc) { return doc.dump(2) + "\n"; }

int cmd_spectrum(const Options& opt, std::ostream& out) {
  const Generator generator = resolve_generator(opt.generators.at(0));
  const auto settings = settings_from(opt);
  const auto cfg = config_json("spectrum", opt, 0);

  std::vector<Vector> points;
  if (!opt.point.empty()) {
    points.push_back(parse_vector(opt.point));
  } else {
    points = gather_points(opt, generator, resolve_prior(opt.prior, generator.latent_dim()), nullptr);
  }

  std::vector<SpectrumResult> spectra;
  for (const auto& z : points) spectra.push_back(svd_spectrum(jacobian(generator, z, settings.fd), settings.rank));

  if (opt.format == "json") {
    ordered_json doc;
    doc["config"] = cfg;
    ordered_json list = ordered_json::array();
    for (std::size_t i = 0; i < spectra.size(); ++i) {
      ordered_json item;
      item["point"] = vector_json(points[i]);
      item["singular_values"] = vector_json(spectra[i].singular_values);
      item["rank"] = spectra[i].rank;
      item["left_vectors"] = matrix_json(spectra[i].left_vectors);
      item["right_vectors"] = matrix_json(spectra[i].right_vectors);
      list.push_back(item);
    }
    doc["spectra"] = list;
    emit(opt, out, finish_json(doc));
    return 0;
  }

  std::ostringstream csv;
  ordered_json ranks = ordered_json::array();
  for (const auto& s : spectra) ranks.push_back(s.rank);
  write_csv_header(csv, cfg, ordered_json{{"rank", ranks}});
  csv << "point,index,sigma\n";
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    for (Eigen::Index k = 0; k < spectra[i].singular_values.size(); ++k) {
      csv << i << "," << k << "," << format_number(spectra[i].singular_values[k]) << "\n";
    }
  }
  emit(opt, out, csv.str());
  return 0;
}

int cmd_path(const Options& opt, std::ostream& out) {
  const Generator generator = resolve_generator(opt.generators.at(0));
  const auto prior = resolve_prior(opt.prior, generator.latent_dim());
  const auto settings = settings_from(opt);
  if (opt.z1.empty() || opt.z2.empty()) throw InputError("path needs --z1 and --z2");
  const std::size_t samples = opt.samples > 0 ? static_cast<std::size_t>(opt.samples) : 101;
  const auto cfg = config_json("path", opt, samples);

  const auto profile =
      path_density(generator, parse_vector(opt.z1), parse_vector(opt.z2), prior, settings, samples);
  ordered_json extra;
  try {
    extra["dip"] = dip_score(profile);
  } catch (const ScoreUndefinedError&) {
    extra["dip"] = nullptr;
  }
  extra["midpoint_index"] = arclength_midpoint_index(profile);

  if (opt.format == "json") {
    ordered_json doc;
    doc["config"] = cfg;
    doc["result"] = extra;
    doc["profile"] = profile_json(profile);
    emit(opt, out, finish_json(doc));
  } else {
    emit(opt, out, profile_csv(profile, cfg, extra));
  }
  return 0;
}

int cmd_decay(const Options& opt, std::ostream& out) {
  const Generator generator = resolve_generator(opt.generators.at(0));
  const auto prior = resolve_prior(opt.prior, generator.latent_dim());
  const auto settings = settings_from(opt);
  if (opt.point.empty()) throw InputError("decay needs --point");
  DecayOptions options;
  options.t_max = opt.t_max;
  options.samples_per_side = opt.samples > 0 ? static_cast<std::size_t>(opt.samples) : 51;
  options.allow_degenerate = opt.allow_degenerate;
  const auto cfg = config_json("decay", opt, options.samples_per_side);

  const auto decay =
      decay_profile(generator, parse_vector(opt.point), opt.direction, prior, settings, options);
  ordered_json extra;
  extra["direction"] = vector_json(decay.direction);
  extra["sigma"] = decay.sigma;
  extra["rank_at_origin"] = decay.rank_at_origin;
  extra["degenerate_direction"] = decay.direction_index >= decay.rank_at_origin;

  if (opt.format == "json") {
    ordered_json doc;
    doc["config"] = cfg;
    doc["result"] = extra;
    doc["profile"] = profile_json(decay.profile);
    emit(opt, out, finish_json(doc));
  } else {
    emit(opt, out, profile_csv(decay.profile, cfg, extra));
  }
  return 0;
}

ordered_json report_json(const ScoreReport& report) {
  ordered_json r;
  r["mean_dip"] = number_or_null(report.mean_dip);
  r["mean_decay"] = number_or_null(report.mean_decay);
  r["per_path_dips"] = report.per_path_dips;
  ordered_json decays = ordered_json::array();
  for (const auto& row : report.per_point_decays) {
    ordered_json items = ordered_json::array();
    for (const auto& eta : row) items.push_back(eta ? number_or_null(*eta) : ordered_json(nullptr));
    decays.push_back(items);
  }
  r["per_point_decays"] = decays;
  r["radii_used"] = report.radii_used;
  r["n_paths"] = report.n_paths;
  r["n_excluded"] = report.n_excluded;
  r["n_excluded_decay"] = report.n_excluded_decay;
  ordered_json paths = ordered_json::array();
  for (const auto& p : report.paths) {
    ordered_json item{{"from", p.from}, {"to", p.to}};
    item["dip"] = p.dip ? number_or_null(*p.dip) : ordered_json(nullptr);
    if (!p.note.empty()) item["note"] = p.note;
    paths.push_back(item);
  }
  r["paths"] = paths;
  ordered_json points = ordered_json::array();
  for (const auto& p : report.points) {
    ordered_json item{{"anchor", p.anchor},
                      {"direction_index", p.direction_index},
                      {"sigma", p.sigma},
                      {"rank", p.rank}};
    if (!report.labels.empty()) item["label"] = report.labels[p.anchor];
    if (!p.note.empty()) item["note"] = p.note;
    points.push_back(item);
  }
  r["points"] = points;
  return r;
}

int cmd_score(const Options& opt, std::ostream& out) {
  std::vector<Generator> generators;
  for (const auto& source : opt.generators) generators.push_back(resolve_generator(source));
  ScoreConfig config;
  config.settings = settings_from(opt);
  config.path_samples = opt.samples > 0 ? static_cast<std::size_t>(opt.samples) : 101;
  config.decay.t_max = opt.t_max;
  config.radii = radii_from(opt);
  if (opt.metric == "output") {
    config.metric = NeighborMetric::output;
  } else if (opt.metric == "latent") {
    config.metric = NeighborMetric::latent;
  } else {
    throw InputError("--metric must be output or latent");
  }
  config.validate();
  const auto cfg = config_json("score", opt, config.path_samples);

  std::vector<ScoreReport> reports;
  for (const auto& generator : generators) {
    const auto prior = resolve_prior(opt.prior, generator.latent_dim());
    std::vector<std::string> labels;
    auto latents = gather_points(opt, generator, prior, &labels);
    const auto anchors = AnchorSet::from_latents(generator, std::move(latents), std::move(labels));
    reports.push_back(score_run(generator, anchors, prior, config));
  }

  if (opt.format == "json") {
    ordered_json doc;
    doc["config"] = cfg;
    ordered_json list = ordered_json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      ordered_json item;
      item["model"] = opt.generators[i];
      item["report"] = report_json(reports[i]);
      list.push_back(item);
    }
    doc["reports"] = list;
    emit(opt, out, finish_json(doc));
    return 0;
  }

  std::ostringstream csv;
  write_csv_header(csv, cfg);
  csv << "model,mean_dip,mean_decay,n_paths,n_excluded\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    csv << opt.generators[i] << "," << format_number(reports[i].mean_dip) << ","
        << format_number(reports[i].mean_decay) << "," << reports[i].n_paths << ","
        << reports[i].n_excluded << "\n";
  }
  emit(opt, out, csv.str());
  return 0;
}

int cmd_dim(const Options& opt, std::ostream& out) {
  const Generator generator = resolve_generator(opt.generators.at(0));
  const auto prior = resolve_prior(opt.prior, generator.latent_dim());
  const auto settings = settings_from(opt);
  const auto cfg = config_json("dim", opt, 0);
  const auto points = gather_points(opt, generator, prior, nullptr);

  if (opt.pointcloud) {
    const Vector sigma = pointcloud_svd(points);
    if (opt.format == "json") {
      ordered_json doc;
      doc["config"] = cfg;
      doc["singular_values"] = vector_json(sigma);
      emit(opt, out, finish_json(doc));
      return 0;
    }
    std::ostringstream csv;
    write_csv_header(csv, cfg);
    csv << "index,sigma\n";
    for (Eigen::Index k = 0; k < sigma.size(); ++k) csv << k << "," << format_number(sigma[k]) << "\n";
    emit(opt, out, csv.str());
    return 0;
  }

  const Eigen::Index available = std::min(generator.latent_dim(), generator.output_dim());
  const Eigen::Index k = std::min<Eigen::Index>(opt.top_k, available);
  const auto summary = mean_spectrum(generator, points, k, settings.fd,
                                     settings.rank.relative_threshold, settings.threads);
  ordered_json extra;
  extra["suggested_dimension"] = summary.suggested_dimension;
  extra["suggested_dimension_rule"] = "heuristic: mean sigma_i >= sv_threshold * mean sigma_1";
  extra["n_points"] = summary.n_points;
  extra["n_skipped"] = summary.n_skipped;
  if (opt.format == "json") {
    ordered_json doc;
    doc["config"] = cfg;
    doc["result"] = extra;
    doc["mean_singular_values"] = vector_json(summary.mean_singular_values);
    emit(opt, out, finish_json(doc));
    return 0;
  }
  std::ostringstream csv;
  write_csv_header(csv, cfg, extra);
  csv << "index,mean_sigma\n";
  for (Eigen::Index i = 0; i < summary.mean_singular_values.size(); ++i) {
    csv << i << "," << format_number(summary.mean_singular_values[i]) << "\n";
  }
  emit(opt, out, csv.str());
  return 0;
}

void add_common(CLI::App* cmd, Options& opt, bool multi_generator) {
  if (multi_generator) {
    cmd->add_option("--generator,-g", opt.generators, "Generator source (repeatable)")->required();
  } else {
    cmd->add_option("--generator,-g", opt.generators, "Generator source")->required()->expected(1);
  }
  cmd->add_option("--prior", opt.prior, "normal | uniform:<lo>:<hi>");
  cmd->add_option("--epsilon", opt.epsilon, "Central-difference step");
  cmd->add_option("--sv-threshold", opt.sv_threshold, "Relative singular-value threshold");
  cmd->add_option("--fixed-rank", opt.fixed_rank, "Use this rank at every point");
  cmd->add_option("--format", opt.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", opt.seed, "Seed for random point draws");
  cmd->add_option("--out,-o", opt.out, "Output file (default stdout)");
  cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Induced output-space density of generative models"};
  app.require_subcommand(1);

  auto* spectrum = app.add_subcommand("spectrum", "Jacobian singular values at points");
  add_common(spectrum, opt, false);
  spectrum->add_option("--point", opt.point, "Latent point, comma separated");
  spectrum->add_option("--anchors", opt.anchors, "Anchors JSON file");
  spectrum->add_option("--random", opt.random_points, "Number of prior draws");

  auto* path = app.add_subcommand("path", "Density along a latent segment");
  add_common(path, opt, false);
  path->add_option("--z1", opt.z1, "Start latent")->required();
  path->add_option("--z2", opt.z2, "End latent")->required();
  path->add_option("--samples", opt.samples, "Sample count (default 101)");

  auto* decay = app.add_subcommand("decay", "Density along a singular direction through a point");
  add_common(decay, opt, false);
  decay->add_option("--point,--z0", opt.point, "Ray origin")->required();
  decay->add_option("--direction", opt.direction, "Singular direction index (0 = largest)");
  decay->add_option("--samples", opt.samples, "Samples per side (default 51)");
  decay->add_option("--t-max", opt.t_max, "Ray half-length in latent units");
  decay->add_flag("--allow-degenerate", opt.allow_degenerate, "Permit below-threshold directions");

  auto* score = app.add_subcommand("score", "Mean dip and mean decay");
  add_common(score, opt, true);
  score->add_option("--anchors", opt.anchors, "Anchors JSON file");
  score->add_option("--random", opt.random_points, "Use this many prior draws as anchors");
  score->add_option("--samples", opt.samples, "Samples per path (default 101)");
  score->add_option("--t-max", opt.t_max, "Ray half-length in latent units");
  score->add_option("--radii", opt.radii, "Comma-separated decay radii");
  score->add_option("--metric", opt.metric, "Nearest-neighbour space: output | latent");

  auto* dim = app.add_subcommand("dim", "Intrinsic-dimension diagnostics");
  add_common(dim, opt, false);
  dim->add_option("--anchors", opt.anchors, "Anchors JSON file");
  dim->add_option("--random", opt.random_points, "Number of prior draws");
  dim->add_option("--top-k", opt.top_k, "Number of singular values (default 20)");
  dim->add_flag("--pointcloud", opt.pointcloud, "SVD of the latent point cloud instead");

  std::vector<const char*> argv{"gendensity"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*spectrum) return cmd_spectrum(opt, out);
    if (*path) return cmd_path(opt, out);
    if (*decay) return cmd_decay(opt, out);
    if (*score) return cmd_score(opt, out);
    if (*dim) return cmd_dim(opt, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace gendensity::cli
