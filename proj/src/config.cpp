#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "rayleigh/harness.hpp"

namespace rayleigh {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, fmt::format("{} = '{}' is not a number", key, v));
  }
}

std::vector<double> number_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(to_double(key, s));
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt::format("{:.17g}", v(i));
  return s;
}

std::string join(const std::vector<double>& v) { return join(to_vector(v)); }

}  // namespace

std::vector<double> log_space(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0) || !(hi >= lo)) throw Error(ErrorCode::ConfigError, "invalid log-spaced range");
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
  return out;
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  std::map<std::string, std::string> e;
  e["psf.kind"] = psf_kind;
  e["psf.sigma"] = fmt::format("{:.17g}", sigma);
  if (!psf_file.empty()) e["psf.file"] = psf_file;
  e["psf.max_order"] = std::to_string(psf_max_order);
  if (!scene_file.empty()) e["scene.file"] = scene_file;
  e["scene.positions"] = join(positions);
  e["scene.weights"] = join(weights);
  e["scene.epsilon"] = fmt::format("{:.17g}", epsilon);
  e["sweep.s_values"] = join(s_values);
  e["sweep.epsilons"] = join(epsilons);
  e["povm.lmax"] = std::to_string(lmax);
  e["povm.kmax"] = std::to_string(kmax);
  e["povm.series_order"] = std::to_string(series_order);
  e["povm.pixel_width"] = fmt::format("{:.17g}", pixel_width);
  std::string t;
  for (const auto& x : targets) t += (t.empty() ? "" : ",") + fmt::format("{}:{}", x.k, x.povm);
  e["fisher.targets"] = t;
  e["sim.shots"] = std::to_string(shots);
  e["sim.replications"] = std::to_string(replications);
  e["sim.seed"] = std::to_string(seed);
  e["sim.method"] = method;
  e["sim.param"] = std::to_string(param);
  e["sim.split"] = fmt::format("{:.17g}", split);
  e["units.length_unit"] = "1";  // lengths above are already in σ units
  return e;
}

ExperimentConfig load_config(const std::string& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, "config file not found: " + path);
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  const fs::path dir = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (dir / p).string();
  };
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(key)) return *v;
    return std::nullopt;
  };
  auto num = [&](const std::string& key, double fallback) {
    auto v = get(key);
    return v ? to_double(key, *v) : fallback;
  };
  auto integer = [&](const std::string& key, long fallback) {
    auto v = get(key);
    if (!v) return fallback;
    const double d = to_double(key, *v);
    if (d != std::floor(d)) throw Error(ErrorCode::ConfigError, key + " must be an integer");
    return long(d);
  };

  ExperimentConfig c;
  c.length_unit = num("units.length_unit", 1.0);
  if (!(c.length_unit > 0)) throw Error(ErrorCode::ConfigError, "units.length_unit must be positive");
  const double u = c.length_unit;

  c.psf_kind = get("psf.kind").value_or("gaussian");
  c.sigma = num("psf.sigma", 1.0) * u;
  c.psf_file = resolve(get("psf.file").value_or(""));
  c.psf_max_order = int(integer("psf.max_order", 12));

  c.scene_file = resolve(get("scene.file").value_or(""));
  c.epsilon = num("scene.epsilon", 0.01);
  if (auto p = get("scene.positions")) {
    c.positions = to_vector(number_list("scene.positions", *p)) * u;
    auto w = get("scene.weights");
    c.weights = w ? to_vector(number_list("scene.weights", *w)) : Eigen::VectorXd::Ones(c.positions.size());
  }

  if (auto v = get("sweep.s_values")) {
    c.s_values = number_list("sweep.s_values", *v);
  } else if (get("sweep.s_min")) {
    c.s_values = log_space(num("sweep.s_min", 0), num("sweep.s_max", 0), int(integer("sweep.s_count", 8)));
  }
  for (double& s : c.s_values) s *= u;
  if (auto v = get("sweep.epsilons")) c.epsilons = number_list("sweep.epsilons", *v);
  if (c.epsilons.empty()) c.epsilons = {c.epsilon};

  c.lmax = int(integer("povm.lmax", 4));
  c.kmax = int(integer("povm.kmax", -1));
  c.series_order = int(integer("povm.series_order", 8));
  c.pixel_width = num("povm.pixel_width", 0.05) * u;

  if (auto v = get("fisher.targets")) {
    for (const auto& item : split_list(*v)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw Error(ErrorCode::ConfigError, "target '" + item + "' is not k:povm");
      Target t;
      t.k = int(to_double("fisher.targets", item.substr(0, colon)));
      t.povm = item.substr(colon + 1);
      c.targets.push_back(t);
    }
  }

  c.shots = integer("sim.shots", c.shots);
  c.replications = int(integer("sim.replications", c.replications));
  c.seed = std::uint64_t(integer("sim.seed", long(c.seed)));
  c.method = get("sim.method").value_or("ml");
  c.param = int(integer("sim.param", 2));
  c.split = num("sim.split", 0.5);

  c.out = get("output.path").value_or("");
  c.format = get("output.format").value_or("csv");
  if (c.format != "csv" && c.format != "json") throw Error(ErrorCode::ConfigError, "output.format must be csv or json");
  return c;
}

PsfModel make_psf(const ExperimentConfig& c) {
  if (c.psf_kind == "gaussian") return PsfModel::gaussian(c.sigma);
  if (c.psf_kind == "sinc") return PsfModel::sinc(c.sigma);
  if (c.psf_kind == "sampled") return PsfModel::load_sampled(c.psf_file, c.psf_max_order);
  throw Error(ErrorCode::ConfigError, "unknown psf.kind '" + c.psf_kind + "'");
}

Scene shape_scene(const ExperimentConfig& c) {
  if (!c.scene_file.empty()) {
    Scene s = load_scene(c.scene_file);
    s.x *= c.length_unit;
    if (s.dimension == 2) s.y *= c.length_unit;
    return s;
  }
  if (c.positions.size() == 0) throw Error(ErrorCode::EmptyScene, "config gives no scene");
  return make_scene(c.positions, c.weights, c.epsilon);
}

void validate_config(const ExperimentConfig& c) {
  if (!c.psf_file.empty() && !fs::exists(c.psf_file)) throw Error(ErrorCode::IoError, "psf file not found: " + c.psf_file);
  if (!c.scene_file.empty() && !fs::exists(c.scene_file))
    throw Error(ErrorCode::IoError, "scene file not found: " + c.scene_file);
  for (double e : c.epsilons)
    if (!(e > 0)) throw Error(ErrorCode::ConfigError, "epsilons must be positive");
  for (double s : c.s_values)
    if (!(s > 0)) throw Error(ErrorCode::ConfigError, "s values must be positive");
  if (c.s_values.empty()) return;
  const PsfModel psf = make_psf(c);
  const double r0 = convergence_radius_lower_bound(psf, std::max(1, std::min(c.lmax, psf.max_order())));
  for (double s : c.s_values)
    if (!(s < r0))
      throw Error(ErrorCode::OutsideConvergenceRadius,
                  fmt::format("s = {} is not below the convergence radius bound {}", s, r0));
}

}  // namespace rayleigh
