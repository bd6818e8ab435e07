// supergeo: command line front end for the model files in models/.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "CLI11.hpp"
#include "sgeo/error.hpp"
#include "sgeo/verify.hpp"

namespace {

using namespace sgeo;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kLeftDomain = 3, kNumeric = 4 };

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ModelError:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::UnknownCoordinate:
    case ErrorCode::InvalidArgument:
    case ErrorCode::SignatureMismatch:
    case ErrorCode::InvalidPoint:
    case ErrorCode::ParityViolation:
      return kUsage;
    case ErrorCode::LeftDomain:
      return kLeftDomain;
    default:
      return kNumeric;
  }
}

// All output goes through a temporary file in the target directory and a
// rename, so a failed run never leaves a partial file behind.
void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, target);
}

// "x=2,y=0.5": even bodies by name; unnamed coordinates default to 0.
std::vector<double> parse_body_point(const std::string& text, const ChartSignature& sig) {
  std::vector<double> out(static_cast<std::size_t>(sig.even_count()), 0.0);
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "point entries look like name=value");
    const std::string name = part.substr(0, eq);
    const int idx = sig.index_of(name);
    if (sig.is_odd(idx)) throw Error(ErrorCode::InvalidArgument, "'" + name + "' is odd; points are body points");
    try {
      out[static_cast<std::size_t>(idx)] = std::stod(part.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad number in '" + part + "'");
    }
  }
  return out;
}

struct Options {
  std::string model;
  std::string ic;
  std::string point;
  std::string mode = "paper";
  std::string out;
  std::string suite = "all";
  std::vector<std::string> tol;
  double t_end = -1.0;
  double dt = -1.0;
  bool serial = false;
};

Model open_model(const Options& o) {
  Model m = load_model(o.model);
  for (const auto& kv : o.tol) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--tol expects name=value");
    double v = 0.0;
    try {
      v = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad number in --tol " + kv);
    }
    m.tol.set(kv.substr(0, eq), v);
  }
  if (o.t_end >= 0.0) m.t_end = o.t_end;
  if (o.dt >= 0.0) m.dt = o.dt;
  return m;
}

int cmd_christoffel(const Options& o) {
  const Model model = open_model(o);
  const MetricChart& m = model.metric;
  const ChartSignature& sig = m.signature();
  SuperPoint p;
  if (!o.ic.empty()) p = model.initial_condition(o.ic).ic.position;
  else p = SuperPoint::body_point(o.point.empty() ? model.body_grid.front() : parse_body_point(o.point, sig),
                                  sig.odd_count(), 0);

  const std::vector<SuperPoint> samples{p};
  const MetricValidation v = metric_validate(m, samples);
  if (!v.ok) {
    std::cerr << "invalid metric: " << v.failure << "\n";
    return kUsage;
  }
  const ChristoffelTable g = christoffel_at(m, p);
  std::string out = "k,i,j,value\n";
  for (int k = 0; k < m.dim(); ++k)
    for (int i = 0; i < m.dim(); ++i)
      for (int j = 0; j < m.dim(); ++j)
        if (!g.is_zero(k, i, j)) out += sig.name(k) + "," + sig.name(i) + "," + sig.name(j) + "," + g(k, i, j).to_string(17) + "\n";
  write_output(o.out, out);
  return kOk;
}

int cmd_geodesic(const Options& o) {
  const Model model = open_model(o);
  if (o.ic.empty()) throw Error(ErrorCode::InvalidArgument, "--ic is required");
  const InitialCondition& ic = model.initial_condition(o.ic).ic;
  Trajectory t;
  if (o.mode == "paper") t = integrate_geodesic(model.metric, ic, model.t_end, model.dt);
  else if (o.mode == "goertsches") t = integrate_goertsches(model.metric, ic, model.t_end, model.dt);
  else throw Error(ErrorCode::InvalidArgument, "--mode must be paper or goertsches");
  write_output(o.out, trajectory_csv(t, model.metric.signature()));
  return kOk;
}

int cmd_flow(const Options& o) {
  const Model model = open_model(o);
  if (o.ic.empty()) throw Error(ErrorCode::InvalidArgument, "--ic is required");
  const InitialCondition& ic = model.initial_condition(o.ic).ic;
  const FlowState f = integrate_flow(model.metric, to_phase_point(model.metric, ic), model.t_end, model.dt);
  write_output(o.out, flow_csv(f, model.metric.signature()));
  return kOk;
}

int cmd_exp(const Options& o) {
  const Model model = open_model(o);
  const MetricChart& m = model.metric;
  const ChartSignature& sig = m.signature();
  nlohmann::json out;
  std::vector<double> base;
  if (!o.ic.empty()) {
    const InitialCondition& ic = model.initial_condition(o.ic).ic;
    for (int k = 0; k < sig.even_count(); ++k) base.push_back(ic.position.values[k].body());
    const SuperPoint image = exp_at(m, TangentFiberPoint{base, ic.L, ic.velocity}, model.dt);
    nlohmann::json point = nlohmann::json::object();
    for (int k = 0; k < sig.size(); ++k) point[sig.name(k)] = to_json(image.values[k]);
    out["exp"] = point;
  } else {
    base = o.point.empty() ? model.body_grid.front() : parse_body_point(o.point, sig);
  }
  const JacobianReport j = exp_jacobian_check(m, base, 1e-4, model.dt);
  out["base"] = base;
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < j.jacobian.rows(); ++r) {
    std::vector<double> row;
    for (int c = 0; c < j.jacobian.cols(); ++c) row.push_back(j.jacobian(r, c));
    rows.push_back(row);
  }
  out["jacobian"] = rows;
  out["jacobian_deviation"] = j.deviation;
  out["odd_block_deviation"] = j.odd_deviation;
  write_output(o.out, out.dump(2) + "\n");
  return kOk;
}

int cmd_verify(const Options& o) {
  const Model model = open_model(o);
  const VerifyReport r = run_verify(model, parse_suite(o.suite), o.serial ? Execution::serial : Execution::parallel);
  write_output(o.out, to_json(r).dump(2) + "\n");
  return r.pass() ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super Levi-Civita connections, supergeodesics and the super exponential map"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* c) { c->add_option("--model", o.model, "model JSON file")->required(); };
  auto add_integration = [&](CLI::App* c) {
    c->add_option("--ic", o.ic, "named initial condition")->required();
    c->add_option("--t-end", o.t_end, "end time (model default otherwise)")->check(CLI::NonNegativeNumber);
    c->add_option("--dt", o.dt, "RK4 step (model default otherwise)")->check(CLI::PositiveNumber);
    c->add_option("--out", o.out, "output file; stdout when omitted");
  };

  auto* chr = app.add_subcommand("christoffel", "print nonzero Christoffel symbols at a point");
  add_model(chr);
  chr->add_option("--point", o.point, "body point, e.g. x=2,y=0");
  chr->add_option("--ic", o.ic, "use the position of a named initial condition");
  chr->add_option("--out", o.out, "output file; stdout when omitted");

  auto* geo = app.add_subcommand("geodesic", "integrate a supergeodesic, write CSV");
  add_model(geo);
  add_integration(geo);
  geo->add_option("--mode", o.mode, "paper or goertsches")->check(CLI::IsMember({"paper", "goertsches"}));

  auto* flow = app.add_subcommand("flow", "integrate the Hamiltonian geodesic flow, write CSV");
  add_model(flow);
  add_integration(flow);

  auto* ex = app.add_subcommand("exp", "exp_q of an initial condition and the Jacobian at v = 0");
  add_model(ex);
  ex->add_option("--ic", o.ic, "take q and v from a named initial condition");
  ex->add_option("--point", o.point, "base point when no --ic is given");
  ex->add_option("--dt", o.dt, "RK4 step")->check(CLI::PositiveNumber);
  ex->add_option("--out", o.out, "output file; stdout when omitted");

  auto* ver = app.add_subcommand("verify", "run verification suites, write a JSON report");
  add_model(ver);
  ver->add_option("--suite", o.suite, "all, metric, geodesic, flow, exp or isometry")
      ->check(CLI::IsMember({"all", "metric", "geodesic", "flow", "exp", "isometry"}));
  ver->add_option("--tol", o.tol, "override a tolerance, name=value (repeatable)");
  ver->add_option("--t-end", o.t_end, "end time")->check(CLI::NonNegativeNumber);
  ver->add_option("--dt", o.dt, "RK4 step")->check(CLI::PositiveNumber);
  ver->add_option("--out", o.out, "output file; stdout when omitted");
  ver->add_flag("--serial", o.serial, "run the items on one thread");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*chr) return cmd_christoffel(o);
    if (*geo) return cmd_geodesic(o);
    if (*flow) return cmd_flow(o);
    if (*ex) return cmd_exp(o);
    if (*ver) return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << "supergeo: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "supergeo: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
