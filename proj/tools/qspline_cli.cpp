#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>

#include "qspline/errors.hpp"
#include "qspline/hhl.hpp"
#include "qspline/json_io.hpp"
#include "qspline/pipeline.hpp"
#include "qspline/qpe.hpp"
#include "qspline/spline.hpp"
#include "qspline/stateprep.hpp"
#include "qspline/statevector.hpp"

using namespace qspline;

namespace {

std::uint64_t next_pow2(std::uint64_t v) {
  std::uint64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

BoundaryCondition resolve_boundary(const std::string& name, double f0p,
                                   double fnp, double f0pp, double fnpp,
                                   bool has_first, bool has_second) {
  if (name == "clamped" || name == "type1") {
    if (has_second)
      throw input_error("--f0pp/--fnpp only apply to type2 boundaries");
    return BoundaryCondition::first_derivative(f0p, fnp);
  }
  if (name == "type2") {
    if (has_first)
      throw input_error("--f0p/--fnp only apply to clamped/type1 boundaries");
    return BoundaryCondition::second_derivative(f0pp, fnpp);
  }
  if (has_first || has_second)
    throw input_error("derivative flags need a clamped/type1/type2 boundary");
  if (name == "natural") return BoundaryCondition::natural();
  if (name == "periodic") return BoundaryCondition::periodic();
  throw input_error("unknown boundary '" + name + "'");
}

void write_array(JsonWriter& w, const char* name,
                 const std::vector<double>& values) {
  w.key(name).begin_array();
  for (double v : values) w.value(v);
  w.end_array();
}

std::string fit_document(const SplineDataset& data, const std::string& boundary,
                         const QuantumFit& fit) {
  JsonWriter w;
  w.begin_object();
  write_array(w, "x", data.x);
  write_array(w, "y", data.y);
  w.key("boundary").value(boundary);
  w.key("periodic").value(fit.periodic);
  w.key("zero_curvature").value(fit.zero_curvature);
  w.key("direction").begin_array();
  for (Eigen::Index i = 0; i < fit.direction.size(); ++i)
    w.value(fit.direction(i));
  w.end_array();
  w.key("scale").value(fit.scale);
  w.key("norm_estimate").value(fit.norm_estimate);
  w.key("scale_row").value(fit.scale_row);
  w.key("fit_fidelity").value(fit.fit_fidelity);
  w.key("success_probability").value(fit.success_probability);
  w.key("phase_residual").value(fit.phase_residual);
  w.key("stray_weight").value(fit.stray_weight);
  w.key("max_imag").value(fit.max_imag);
  w.key("phase_bits").value(fit.solver.phase_bits);
  w.key("shots").value(fit.solver.shots);
  w.key("seed").value(fit.solver.seed);
  w.key("prep").begin_object();
  w.key("q").value(fit.prep.q);
  w.key("weight_sum").value(fit.prep.weight_sum);
  w.key("weight_bound").value(fit.prep.weight_bound);
  w.key("weight_within_bound").value(fit.prep.weight_within_bound);
  w.key("success_probability").value(fit.prep.success_probability);
  w.key("expected_repetitions").value(fit.prep.expected_repetitions);
  w.end_object();
  w.key("repetitions").begin_object();
  w.key("naive").value(fit.repetitions_naive);
  w.key("amplified").value(fit.repetitions_amplified);
  w.end_object();
  w.end_object();
  return w.str();
}

struct FitArgs {
  std::string input;
  std::string boundary = "natural";
  std::string mode = "exact";
  std::string out;
  double f0p = 0.0, fnp = 0.0, f0pp = 0.0, fnpp = 0.0;
  bool has_first = false, has_second = false;
  int phase_bits = 8;
  std::uint64_t seed = 0;
  std::uint64_t shots = 4096;
};

int run_fit(const FitArgs& a) {
  const SplineDataset data = read_xy_csv(a.input);
  const BoundaryCondition bc = resolve_boundary(
      a.boundary, a.f0p, a.fnp, a.f0pp, a.fnpp, a.has_first, a.has_second);
  PipelineConfig cfg;
  cfg.phase_bits = a.phase_bits;
  cfg.seed = a.seed;
  cfg.shots = a.mode == "shots" ? a.shots : 0;
  const QuantumFit fit = quantum_fit(data, bc, cfg);
  const std::string doc = fit_document(data, a.boundary, fit);
  std::ofstream out(a.out);
  if (!out) throw input_error("cannot write '" + a.out + "'");
  out << doc << "\n";
  if (!out.flush()) throw input_error("failed writing '" + a.out + "'");
  std::cout << doc << "\n";
  return 0;
}

struct EvalArgs {
  std::string fit_path;
  double at = 0.0;
  double epsilon = 1e-3;
};

int run_eval(const EvalArgs& a) {
  std::ifstream in(a.fit_path);
  if (!in) throw input_error("cannot open '" + a.fit_path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw input_error("'" + a.fit_path + "' is not valid json: " + e.what());
  }
  QuantumFit fit;
  SplineDataset data;
  try {
    data = make_dataset(doc.at("x").get<std::vector<double>>(),
                        doc.at("y").get<std::vector<double>>());
    const std::vector<double> dir =
        doc.at("direction").get<std::vector<double>>();
    fit.direction = Eigen::Map<const Eigen::VectorXd>(
        dir.data(), static_cast<Eigen::Index>(dir.size()));
    fit.scale = doc.at("scale").get<double>();
    fit.norm_estimate = doc.at("norm_estimate").get<double>();
    fit.periodic = doc.at("periodic").get<bool>();
    fit.zero_curvature = doc.at("zero_curvature").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw input_error("'" + a.fit_path + "' is missing fit fields: " + e.what());
  }
  EvalOptions opt;
  opt.epsilon = a.epsilon;
  opt.swap_tests = true;
  const QuantumEvaluation ev = quantum_evaluate(fit, data, a.at, opt);
  JsonWriter w;
  w.begin_object();
  w.key("S").value(ev.value);
  w.key("S1").value(ev.slope);
  w.key("S2").value(ev.curvature);
  w.key("error_budget").value(ev.error_budget);
  w.end_object();
  std::cout << w.str() << "\n";
  return 0;
}

int run_qpe_demo(double theta, int bits) {
  if (!std::isfinite(theta)) throw input_error("--theta must be finite");
  if (bits < 1 || bits > 10)
    throw input_error("--bits must lie in [1, 10] for a printable table");
  theta -= std::floor(theta);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(2, 2);
  u(1, 1) = std::exp(cplx(0.0, 2.0 * std::numbers::pi * theta));
  PhaseEstimationConfig cfg;
  cfg.n = bits;
  cfg.m = bits;
  const PhaseOutcome outcome =
      run_qpe(Operator::unitary(u), make_basis_state(1, 1), cfg);
  std::size_t best = 0;
  for (std::size_t y = 1; y < outcome.distribution.size(); ++y)
    if (outcome.distribution[y] > outcome.distribution[best]) best = y;
  std::printf("theta %.10f with %d register bits\n", theta, bits);
  std::printf("%6s  %10s  %12s\n", "y", "phase", "probability");
  for (std::size_t y = 0; y < outcome.distribution.size(); ++y) {
    std::printf("%6zu  %10.6f  %12.9f%s\n", y,
                static_cast<double>(y) / std::ldexp(1.0, bits),
                outcome.distribution[y], y == best ? "  *" : "");
  }
  std::printf("best outcome %zu, probability %.9f\n", best,
              outcome.distribution[best]);
  return 0;
}

int run_prep(const std::string& vector_path, const std::string& method) {
  const std::vector<double> raw = read_column_csv(vector_path);
  const std::uint64_t padded =
      next_pow2(std::max<std::uint64_t>(2, raw.size()));
  TargetVector target;
  target.entries.assign(padded, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < raw.size(); ++i)
    target.entries[i] = cplx(raw[i], 0.0);

  Statevector prepared;
  double kappa = 0.0, success = 0.0;
  int q = 0;
  if (method == "flat") {
    auto result = prepare_flat(target);
    prepared = std::move(result.first);
    kappa = result.second.kappa;
    success = result.second.success_probability;
    q = 1;
  } else if (method == "binned") {
    auto result = prepare_binned(target);
    prepared = std::move(result.first);
    kappa = target.kappa();
    success = result.second.success_probability;
    q = result.second.q;
  } else {
    throw input_error("--method must be flat or binned");
  }

  std::vector<cplx> unit(target.entries);
  double norm = 0.0;
  for (const cplx& c : unit) norm += std::norm(c);
  norm = std::sqrt(norm);
  for (cplx& c : unit) c /= norm;
  const double fidelity =
      std::norm(inner_product(prepared, Statevector::from_amplitudes(unit)));

  JsonWriter w;
  w.begin_object();
  w.key("kappa").value(kappa);
  w.key("q").value(q);
  w.key("success_prob").value(success);
  w.key("fidelity").value(fidelity);
  w.end_object();
  std::cout << w.str() << "\n";
  return 0;
}

int run_conditioning(const std::string& sizes, int trials, std::uint64_t seed) {
  const std::size_t dots = sizes.find("..");
  int lo = 0, hi = 0;
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(sizes);
    } else {
      lo = std::stoi(sizes.substr(0, dots));
      hi = std::stoi(sizes.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw input_error("--sizes wants lo..hi, e.g. 8..256");
  }
  const ConditioningSweep sweep =
      run_conditioning_sweep(trials, lo, hi, 0.1, 10.0, seed);
  JsonWriter w;
  w.begin_object();
  w.key("max_kappa").value(sweep.max_kappa);
  w.key("bound_4sqrt2_ok").value(sweep.exceed_4sqrt2 == 0);
  w.key("bound_4_ok").value(sweep.exceed_4 == 0);
  w.end_object();
  std::cout << w.str() << "\n";
  return 0;
}

struct HhlArgs {
  std::string matrix_path;
  std::string rhs_path;
  int phase_bits = 8;
  double floor = 0.0;
};

int run_hhl_solve(const HhlArgs& a) {
  const Eigen::MatrixXd mat = read_matrix_csv(a.matrix_path);
  const std::vector<double> rhs = read_column_csv(a.rhs_path);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(rhs.size()));
  for (std::size_t i = 0; i < rhs.size(); ++i)
    b(static_cast<Eigen::Index>(i)) = cplx(rhs[i], 0.0);
  const LinearSystem sys = make_linear_system(mat.cast<cplx>(), b);

  double floor = a.floor;
  if (floor == 0.0) {
    // Half the smallest normalized singular value keeps the rotation from
    // clipping any eigenvalue the right-hand side can reach.
    const Eigen::MatrixXcd solve_matrix =
        sys.hermitian ? sys.a.matrix() : hermitian_embed(sys.a.matrix());
    double bound = 0.0;
    for (Eigen::Index r = 0; r < solve_matrix.rows(); ++r)
      bound = std::max(bound, solve_matrix.cwiseAbs().row(r).sum());
    const double sigma_min =
        Eigen::JacobiSVD<Eigen::MatrixXd>(mat).singularValues().minCoeff();
    floor = 0.5 * sigma_min / bound;
    if (!(floor > 0.0))
      throw input_error("matrix is singular; pass --floor explicitly");
  }

  HHLConfig cfg;
  cfg.phase_bits = a.phase_bits;
  cfg.eigenvalue_floor = floor;
  const HHLResult res = solve(sys, cfg);

  const Eigen::VectorXcd direct =
      mat.cast<cplx>().fullPivLu().solve(b);
  const double fidelity =
      std::norm(res.solution.normalized().dot(direct.normalized()));

  JsonWriter w;
  w.begin_object();
  w.key("fidelity_vs_direct").value(fidelity);
  w.key("success_prob").value(res.success_probability);
  w.key("norm_estimate").value(res.norm_estimate);
  w.end_object();
  std::cout << w.str() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum cubic spline toolkit"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "fit spline curvatures");
  fit->add_option("--input", fit_args.input, "x,y knot file")->required();
  fit->add_option("--boundary", fit_args.boundary,
                  "clamped|natural|type1|type2|periodic");
  CLI::Option* f0p = fit->add_option("--f0p", fit_args.f0p, "start slope");
  CLI::Option* fnp = fit->add_option("--fnp", fit_args.fnp, "end slope");
  CLI::Option* f0pp =
      fit->add_option("--f0pp", fit_args.f0pp, "start curvature");
  CLI::Option* fnpp = fit->add_option("--fnpp", fit_args.fnpp, "end curvature");
  fit->add_option("--phase-bits", fit_args.phase_bits, "solver register bits");
  fit->add_option("--seed", fit_args.seed, "sampler seed");
  fit->add_option("--mode", fit_args.mode, "exact|shots")
      ->check(CLI::IsMember({"exact", "shots"}));
  fit->add_option("--shots", fit_args.shots, "samples per readout in shots mode");
  fit->add_option("--out", fit_args.out, "fit document path")->required();

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a stored fit");
  eval->add_option("--fit", eval_args.fit_path, "fit document")->required();
  eval->add_option("--at", eval_args.at, "evaluation point")->required();
  eval->add_option("--epsilon", eval_args.epsilon, "swap test accuracy");

  double theta = 0.0;
  int bits = 3;
  CLI::App* qpe = app.add_subcommand("qpe-demo", "phase register readout table");
  qpe->add_option("--theta", theta, "phase to estimate")->required();
  qpe->add_option("--bits", bits, "register width");

  std::string vector_path, method = "binned";
  CLI::App* prep = app.add_subcommand("prep", "amplitude-encode a vector");
  prep->add_option("--vector", vector_path, "value file")->required();
  prep->add_option("--method", method, "flat|binned")
      ->check(CLI::IsMember({"flat", "binned"}));

  std::string sizes = "8..256";
  int trials = 1000;
  std::uint64_t sweep_seed = 0;
  bool sweep_flag = false;
  CLI::App* cond = app.add_subcommand("conditioning", "random system sweep");
  cond->add_flag("--sweep", sweep_flag, "run the sweep")->required();
  cond->add_option("--sizes", sizes, "knot count range lo..hi");
  cond->add_option("--trials", trials, "systems to draw");
  cond->add_option("--seed", sweep_seed, "draw seed");

  HhlArgs hhl_args;
  CLI::App* hhl = app.add_subcommand("hhl-solve", "solve a linear system");
  hhl->add_option("--matrix", hhl_args.matrix_path, "coefficient file")
      ->required();
  hhl->add_option("--rhs", hhl_args.rhs_path, "right-hand side file")
      ->required();
  hhl->add_option("--phase-bits", hhl_args.phase_bits, "solver register bits");
  hhl->add_option("--floor", hhl_args.floor,
                  "normalized eigenvalue floor override");

  CLI11_PARSE(app, argc, argv);

  fit_args.has_first = f0p->count() > 0 || fnp->count() > 0;
  fit_args.has_second = f0pp->count() > 0 || fnpp->count() > 0;

  try {
    if (*fit) return run_fit(fit_args);
    if (*eval) return run_eval(eval_args);
    if (*qpe) return run_qpe_demo(theta, bits);
    if (*prep) return run_prep(vector_path, method);
    if (*cond) return run_conditioning(sizes, trials, sweep_seed);
    if (*hhl) return run_hhl_solve(hhl_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
