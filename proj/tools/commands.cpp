#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "rayleigh/basis.hpp"
#include "rayleigh/fisher.hpp"
#include "rayleigh/harness.hpp"
#include "rayleigh/povm.hpp"
#include "rayleigh/prob.hpp"
#include "rayleigh/scene.hpp"
#include "rayleigh/sim.hpp"
#include "rayleigh/psf.hpp"

namespace rayleigh::cli {

namespace {

struct Global {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  std::string config;
  // overrides for the config file
  std::string psf;
  double sigma = 0.0;
  std::string psf_file;
  std::string scene;
  double epsilon = 0.0;
  int lmax = 0;
  bool seed_given = false;
};

ExperimentConfig build_config(const Global& g) {
  ExperimentConfig c = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (!g.psf.empty()) c.psf_kind = g.psf;
  if (g.sigma > 0) c.sigma = g.sigma;
  if (!g.psf_file.empty()) {
    c.psf_file = g.psf_file;
    c.psf_kind = "sampled";
  }
  if (!g.scene.empty()) c.scene_file = g.scene;
  if (g.epsilon > 0) {
    c.epsilon = g.epsilon;
    c.epsilons = {g.epsilon};
  }
  if (g.lmax > 0) c.lmax = g.lmax;
  if (g.seed_given || g.config.empty()) c.seed = g.seed;
  if (!g.out.empty()) c.out = g.out;
  return c;
}

void emit(const Table& t, const std::string& format, const std::string& out) {
  if (out.empty()) std::cout << render(t, format);
  else emit_results(t, format, out);
}

Table matrix_table(const FisherReport& r) {
  Table t;
  t.columns = {"row", "col", "value"};
  for (Eigen::Index i = 0; i < r.size(); ++i)
    for (Eigen::Index j = 0; j < r.size(); ++j)
      t.add({r.params[std::size_t(i)], r.params[std::size_t(j)], r.matrix(i, j)});
  t.meta["regime"] = to_string(r.regime);
  t.meta["epsilon"] = fmt::format("{:.17g}", r.epsilon);
  return t;
}

nlohmann::json matrix_json(const FisherReport& r) {
  nlohmann::json j;
  j["params"] = r.params;
  j["regime"] = to_string(r.regime);
  j["epsilon"] = r.epsilon;
  j["matrix"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    std::vector<double> row;
    for (Eigen::Index k = 0; k < r.size(); ++k) row.push_back(r.matrix(i, k));
    j["matrix"].push_back(row);
  }
  const CrbReport b = crb(r);
  j["crb"]["diagonal"] = std::vector<double>(b.diagonal_bound.data(), b.diagonal_bound.data() + b.diagonal_bound.size());
  if (b.invertible)
    j["crb"]["matrix"] = std::vector<double>(b.matrix_bound.data(), b.matrix_bound.data() + b.matrix_bound.size());
  else
    j["crb"]["note"] = b.note;
  return j;
}

void write_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + out + " for writing");
  f << text;
}

// ---- subcommands -----------------------------------------------------------

int basis_check(const Global& g) {
  const ExperimentConfig c = build_config(g);
  const PsfModel psf = make_psf(c);
  const DerivativeBasis b = gram_schmidt_basis(psf, c.lmax);
  Table t;
  t.columns = {"l", "q", "q_hermite", "hermite_overlap"};
  t.meta = c.echo();
  t.meta["orthonormality_error"] = fmt::format("{:.17g}", b.orthonormality_error());
  for (int l = 0; l <= b.lmax; ++l) {
    double qh = std::nan(""), ov = std::nan("");
    if (psf.kind() == PsfKind::Gaussian) {
      qh = std::pow(2.0 * psf.sigma(), -l) / std::sqrt(std::tgamma(l + 1.0));
      const Eigen::VectorXcd h = hermite_gaussian(l, psf.sigma(), b.grid().nodes).cast<cplx>();
      ov = std::abs(inner_product(b.grid(), h, b.modes.col(l)));
    }
    t.add({(long long)l, b.q(l), qh, ov});
  }
  emit(t, g.format, g.out);
  return 0;
}

int moments_cmd(const Global& g, int kmax) {
  const ExperimentConfig c = build_config(g);
  const Scene scene = shape_scene(c);
  const MomentVector m = moments(scene, kmax);
  Table t;
  t.columns = {"k", "radicand", "magnitude", "sign"};
  t.meta["centroid"] = fmt::format("{:.17g}", m.xbar);
  t.meta["extent"] = fmt::format("{:.17g}", m.s);
  for (int k = 1; k <= kmax; ++k) t.add({(long long)k, m.radicand(k), m.magnitude(k), (long long)m.sign(k)});
  emit(t, g.format, g.out);
  return 0;
}

int fi_sweep(const Global& g) {
  ExperimentConfig c = build_config(g);
  validate_config(c);
  Table t;
  t.columns = {"s", "epsilon", "k", "povm", "fisher", "regime"};
  t.meta = c.echo();
  for (double eps : c.epsilons) {
    c.epsilon = eps;
    for (const ScalingRow& row : run_scaling_experiment(c)) {
      for (std::size_t i = 0; i < row.s.size(); ++i)
        t.add({row.s[i] / c.length_unit, eps, (long long)row.target.k, row.target.povm,
               row.fisher[i] * c.length_unit * c.length_unit, std::string("series")});
      const std::string key = fmt::format("slope.eps{}.M{}.{}", eps, row.target.k, row.target.povm);
      t.meta[key] = fmt::format("{:.6f} +- {:.6f} (expected {}, {})", row.fit.slope, row.fit.se, row.expected,
                                row.pass ? "pass" : "fail");
    }
  }
  emit(t, g.format, g.out);
  return 0;
}

int qfim_cmd(const Global& g, bool format_given, double kx, double ky, double r, double X, double Y, double beta,
             bool angle, double l1, double l2, double theta) {
  const double eps = g.epsilon > 0 ? g.epsilon : 0.01;
  const DeltaK2D dk{kx, ky, r};
  const std::string format = format_given ? g.format : "json";
  if (angle) {
    const AngleQfim a = qfim_angle(dk, l1, l2, theta, eps);
    if (format == "json") {
      nlohmann::json j = matrix_json(a.report);
      j["theta_prime"] = a.theta_prime;
      for (int c = 0; c < 2; ++c) {
        j["basis1"].push_back({a.basis1(0, c), a.basis1(1, c)});
        j["basis2"].push_back({a.basis2(0, c), a.basis2(1, c)});
      }
      write_text(j.dump(2) + "\n", g.out);
    } else {
      emit(matrix_table(a.report), format, g.out);
    }
    return 0;
  }
  const FisherReport rep = qfim_rho2(dk, X, Y, beta, eps);
  if (format == "json") {
    nlohmann::json j = matrix_json(rep);
    j["theta_prime"] = optimal_beta_angle(X, Y, beta);
    write_text(j.dump(2) + "\n", g.out);
  } else {
    emit(matrix_table(rep), format, g.out);
  }
  return 0;
}

int simulate_cmd(const Global& g, long shots, int reps, int param, const std::string& povm_name, double s) {
  ExperimentConfig c = build_config(g);
  if (shots > 0) c.shots = shots;
  if (reps > 0) c.replications = reps;
  if (param > 0) c.param = param;
  const PsfModel psf = make_psf(c);
  const DerivativeBasis basis = gram_schmidt_basis(psf, c.lmax, c.kmax);
  Scene scene = shape_scene(c);
  if (c.scene_file.empty()) scene.epsilon = c.epsilon;
  if (s > 0) {
    const double eps = scene.epsilon;
    scene = scaled_family(scene, s * c.length_unit);
    scene.epsilon = eps;
  }
  const std::string family = !povm_name.empty() ? povm_name : c.targets.empty() ? "spade" : c.targets.front().povm;
  const Povm povm = with_frame(make_povm(family, basis, c.pixel_width), scene.centroid_x(), false);

  // per-shot information for the bound, at the simulated extent
  const MomentVector m = moments(scene, basis.kmax);
  const double fisher = fi_from_series(weak_series(scene, basis, povm), {c.param}, m)(0, 0);
  double limit = std::nan("");
  if (family == "spade" && c.param % 2 == 0 && c.param / 2 <= basis.lmax)
    limit = fi_limit_formula(basis, m, scene.epsilon, {LimitFormula::Even, c.param / 2, 0})(0, 0);
  const EstimationMethod method = c.method == "inversion" ? EstimationMethod::Inversion : EstimationMethod::MaxLikelihood;
  const VarianceStudy v =
      variance_study(scene, basis, povm, c.param, c.shots, c.replications, c.seed, method, fisher);

  Table t;
  t.columns = {"replication", "estimate"};
  t.meta = c.echo();
  for (Eigen::Index i = 0; i < v.estimates.size(); ++i) t.add({(long long)i, v.estimates(i)});
  emit(t, g.format, g.out);

  nlohmann::json summary;
  summary["param"] = fmt::format("M{}", v.param);
  summary["truth"] = v.truth;
  summary["mean"] = v.mean;
  summary["var"] = v.variance;
  summary["crb"] = v.crb;
  summary["fisher_per_shot"] = fisher;
  summary["fisher_limit_formula"] = std::isfinite(limit) ? nlohmann::json(limit) : nlohmann::json(nullptr);
  summary["extent"] = m.s;
  summary["ratio"] = v.ratio;
  summary["shots"] = c.shots;
  summary["replications"] = c.replications;
  summary["seed"] = c.seed;
  write_text(summary.dump(2) + "\n", g.out.empty() ? std::string() : g.out + ".summary.json");
  return 0;
}

int convergence_cmd(const Global& g) {
  const ExperimentConfig c = build_config(g);
  Table t;
  t.columns = {"s", "radius", "max_error", "remainder", "inside", "pass"};
  t.meta = c.echo();
  for (const ConvergenceRow& r : run_convergence_check(c))
    t.add({r.s / c.length_unit, r.radius / c.length_unit, r.max_error, r.remainder, (long long)r.inside,
           (long long)r.pass});
  emit(t, g.format, g.out);
  return 0;
}

int centroid_cmd(const Global& g, const std::string& mode, long shots, int reps, double split, double reference) {
  ExperimentConfig c = build_config(g);
  const PsfModel psf = make_psf(c);
  const double eps = c.epsilon;
  const CentroidScheme sch = centroid_scheme(psf, eps, mode == "strong" ? SourceMode::Strong : SourceMode::Weak);
  nlohmann::json j;
  j["fi11"] = sch.fi11;
  j["split_fim"] = {{sch.split_fim(0, 0), sch.split_fim(0, 1)}, {sch.split_fim(1, 0), sch.split_fim(1, 1)}};
  j["qfim"] = {{sch.qfim(0, 0), sch.qfim(0, 1)}, {sch.qfim(1, 0), sch.qfim(1, 1)}};
  j["trace_bound"] = sch.trace_bound;
  j["efficiency"] = sch.efficiency;
  if (shots > 0) {
    const DerivativeBasis basis = gram_schmidt_basis(psf, std::max(2, c.lmax));
    Scene scene = shape_scene(c);
    if (c.scene_file.empty()) scene.epsilon = eps;
    const CentroidStudy st = centroid_two_stage(scene, basis, shots, split, reference, reps > 0 ? reps : c.replications, c.seed);
    j["simulation"] = {{"split", st.split},
                       {"centroid_mean", st.centroid_mean},
                       {"centroid_variance", st.centroid_variance},
                       {"centroid_crb", st.centroid_crb},
                       {"m2_mean", st.m2_mean},
                       {"m2_variance", st.m2_variance},
                       {"m2_crb", st.m2_crb}};
  }
  write_text(j.dump(2) + "\n", g.out);
  return 0;
}

int counterexample_cmd(const Global& g, bool as_printed, long mc) {
  ExperimentConfig c = build_config(g);
  if (c.scene_file.empty() && c.positions.size() == 0) {
    c.positions = (Eigen::VectorXd(4) << -0.15, -0.05, 0.05, 0.15).finished();
    c.weights = Eigen::VectorXd::Ones(4);
    if (g.epsilon <= 0) c.epsilon = 1.0;
  }
  Scene scene = shape_scene(c);
  if (c.scene_file.empty()) scene.epsilon = c.epsilon;
  const DerivativeBasis basis = gram_schmidt_basis(make_psf(c), std::max(4, c.lmax));
  const AppFPrefactor pre = as_printed ? AppFPrefactor::AsPrinted : AppFPrefactor::Derived;
  const AppFResult r = appf_counterexample(scene, basis, pre);
  nlohmann::json j;
  j["prefactor"] = as_printed ? "as-printed" : "derived";
  j["A44"] = r.A44;
  j["A42"] = r.A42;
  j["A22"] = r.A22;
  j["diagonal_fi"] = r.diagonal_fi;
  j["subspace_qfi"] = r.subspace_qfi;
  j["numeric_subspace_qfi"] = r.numeric_subspace_qfi;
  j["ratio"] = r.ratio;
  j["total_diagonal_fi"] = r.total_diagonal_fi;
  j["total_ratio"] = r.total_ratio;
  j["improvement"] = r.improvement;
  if (mc > 0) {
    const AppFMc m = appf_monte_carlo(scene, basis, mc, c.seed, pre);
    j["mc"] = {{"mean", {m.mean(0), m.mean(1), m.mean(2)}}, {"se", {m.se(0), m.se(1), m.se(2)}}};
  }
  write_text(j.dump(2) + "\n", g.out);
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Fisher-information toolkit for subdiffraction incoherent imaging"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--out", g.out, "output path (stdout when omitted)");
  auto* fmt_opt = app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", g.config, "experiment config file")->check(CLI::ExistingFile);
  app.add_option("--psf", g.psf, "gaussian, sinc or sampled")->check(CLI::IsMember({"gaussian", "sinc", "sampled"}));
  app.add_option("--sigma", g.sigma, "PSF width");
  app.add_option("--psf-file", g.psf_file, "sampled PSF file")->check(CLI::ExistingFile);
  app.add_option("--scene", g.scene, "scene file")->check(CLI::ExistingFile);
  app.add_option("--eps", g.epsilon, "mean photon number per coherence time");
  app.add_option("--lmax", g.lmax, "highest mode index");

  auto* basis = app.add_subcommand("basis-check", "build the derivative modes and report q_l");

  int kmax = 8;
  auto* mom = app.add_subcommand("moments", "normalized moments of a scene");
  mom->add_option("--kmax", kmax, "highest order")->check(CLI::Range(1, 40));

  auto* sweep = app.add_subcommand("fi-sweep", "FI against s with slope fits per target");

  double kx = 0.5, ky = 0.5, r = 0.0, X = 0.1, Y = 0.1, beta = 0.0, l1 = 0.1, l2 = 0.05, theta = 0.0;
  bool angle = false;
  auto* q = app.add_subcommand("qfim", "2D second-moment QFIM");
  q->add_option("--kx", kx, "gradient norm along x");
  q->add_option("--ky", ky, "gradient norm along y");
  q->add_option("--r", r, "gradient cross correlation");
  q->add_option("--X", X, "spread along x");
  q->add_option("--Y", Y, "spread along y");
  q->add_option("--beta", beta, "x-y correlation");
  q->add_flag("--angle", angle, "use the (Lambda1, Lambda2, theta) parametrization");
  q->add_option("--lambda1", l1, "major axis");
  q->add_option("--lambda2", l2, "minor axis");
  q->add_option("--theta", theta, "orientation");

  long shots = 0;
  int reps = 0, param = 0;
  std::string povm;
  auto* sim = app.add_subcommand("simulate", "replicated moment estimation against the CRB");
  sim->add_option("--shots", shots, "shots per replication");
  sim->add_option("--replications", reps, "number of replications");
  sim->add_option("--param", param, "moment order to estimate");
  sim->add_option("--povm", povm, "measurement family");
  double sim_s = 0.0;
  sim->add_option("--s", sim_s, "rescale the scene to this extent first");

  auto* conv = app.add_subcommand("convergence", "series against direct overlaps over the s grid");

  std::string mode = "weak";
  double split = 0.5, reference = 0.0;
  long cshots = 0;
  int creps = 0;
  auto* cen = app.add_subcommand("centroid", "centroid pre-estimation scheme");
  cen->add_option("--mode", mode, "weak or strong")->check(CLI::IsMember({"weak", "strong"}));
  cen->add_option("--shots", cshots, "simulate with this many shots");
  cen->add_option("--replications", creps, "simulation replications");
  cen->add_option("--split", split, "fraction of shots spent locating the centroid");
  cen->add_option("--reference", reference, "initial centroid guess");

  bool as_printed = false;
  long mc = 0;
  auto* ce = app.add_subcommand("counterexample", "two-photon subspace QFI for M8 against dressed SPADE");
  ce->add_flag("--as-printed", as_printed, "use the as-printed b_2^2 normalization");
  ce->add_option("--mc", mc, "Monte Carlo samples for the A coefficients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  g.seed_given = seed_opt->count() > 0;
  if (*basis) return basis_check(g);
  if (*mom) return moments_cmd(g, kmax);
  if (*sweep) return fi_sweep(g);
  if (*q) return qfim_cmd(g, fmt_opt->count() > 0, kx, ky, r, X, Y, beta, angle, l1, l2, theta);
  if (*sim) return simulate_cmd(g, shots, reps, param, povm, sim_s);
  if (*conv) return convergence_cmd(g);
  if (*cen) return centroid_cmd(g, mode, cshots, creps, split, reference);
  if (*ce) return counterexample_cmd(g, as_printed, mc);
  return 2;
}

}  // namespace rayleigh::cli
