#include "infoorder/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "infoorder/error.hpp"
#include "infoorder/json_io.hpp"
#include "infoorder/numerics.hpp"

namespace infoorder::cli {

namespace {

using Eigen::Index;
using Eigen::VectorXd;
using io::json;

constexpr int kOk = 0;
constexpr int kVerdictFails = 1;
constexpr int kInputError = 2;

struct Options {
  std::uint64_t seed = 0;
  double tol = 1e-8;

  std::string order = "lb";
  std::size_t resolution = 2000;
  std::size_t directions = 64;
  std::string prior = "uniform";
  std::string target;
  std::size_t limit = kDefaultEnumerationLimit;

  bool product = false;
  double mix = std::nan("");
  std::string dichotomy;
  std::string garble;
  std::string out_path;

  std::vector<std::string> files;
};

FiniteExperiment load_experiment(const std::string& path) {
  return io::experiment_from_json(io::load_file(path));
}

VectorXd parse_list(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, what + ": cannot read '" + item + "' as a number");
    }
  }
  return Eigen::Map<VectorXd>(vals.data(), static_cast<Index>(vals.size()));
}

void print(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

int do_compare(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.files.size() != 2) throw Error(ErrorCode::ParseError, "compare needs two experiment files");
  const auto jf = io::load_file(o.files[0]);
  const auto jg = io::load_file(o.files[1]);
  OrderVerdict v;
  if (o.order == "lb-sampled") {
    v = lb_sampled(io::experiment_from_json(jf), io::experiment_from_json(jg), o.resolution, o.seed);
  } else {
    const auto f = io::experiment_from_json(jf);
    const auto g = io::experiment_from_json(jg);
    if (o.order == "lb") {
      v = lb_exact(f, g);
    } else if (o.order == "mpe") {
      v = mpe_check(f, g);
    } else if (o.order == "blackwell") {
      v = blackwell_check(f, g);
    } else {
      const auto fg = lb_exact(f, g);
      const auto gf = lb_exact(g, f);
      v = fg.holds ? gf : fg;
      v.holds = fg.holds && gf.holds;
      v.margin = std::min(fg.margin, gf.margin);
    }
  }
  print(out, io::to_json(v));
  err << o.order << ": " << (v.holds ? "holds" : "fails") << '\n';
  return v.holds ? kOk : kVerdictFails;
}

int do_zonoid(const Options& o, std::ostream& out) {
  if (o.files.size() != 1) throw Error(ErrorCode::ParseError, "zonoid needs one experiment file");
  const auto f = load_experiment(o.files[0]);
  const Index dim = static_cast<Index>(f.state_count());
  json dirs = json::array();
  json supp = json::array();
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss;
  for (std::size_t k = 0; k < o.directions; ++k) {
    VectorXd b(dim);
    if (dim == 2) {
      // Evenly spaced angles over the half circle with b_0 >= 0.
      const double span = o.directions > 1 ? static_cast<double>(k) / static_cast<double>(o.directions - 1) : 0.5;
      const double angle = -std::numbers::pi / 2 + std::numbers::pi * span;
      b << std::cos(angle), std::sin(angle);
    } else {
      do {
        for (Index i = 0; i < dim; ++i) b(i) = gauss(rng);
      } while (b.norm() < 1e-12);
      b.normalize();
      if (b(0) < 0.0) b = -b;
    }
    dirs.push_back(io::to_json(b));
    supp.push_back(zonoid_support(f, b));
  }
  print(out, json{{"directions", dirs}, {"support", supp}});
  return kOk;
}

int do_value(const Options& o, std::ostream& out) {
  if (o.files.size() != 2) throw Error(ErrorCode::ParseError, "value needs a decision problem and an experiment");
  const auto dp = io::decision_from_json(io::load_file(o.files[0]));
  const auto f = load_experiment(o.files[1]);
  Prior q = o.prior == "uniform" ? Prior::uniform(f.states().n()) : Prior{parse_list(o.prior, "--prior")};
  if (q.q.size() != static_cast<Index>(f.states().n())) {
    throw Error(ErrorCode::ParseError, "--prior: expected " + std::to_string(f.states().n()) + " entries");
  }
  full_belief(q.q);
  print(out, json{{"value", ex_ante_value(dp, f, q)}, {"prior", io::to_json(q.q)}});
  return kOk;
}

int do_qcc(const Options& o, std::ostream& out) {
  if (o.files.size() != 1) throw Error(ErrorCode::ParseError, "qcc needs one decision problem");
  const auto dp = io::decision_from_json(io::load_file(o.files[0]));
  const auto r = is_qcc(dp);
  json cert = nullptr;
  if (r.certificate) {
    const auto& c = *r.certificate;
    cert = json{{"triple", {dp.actions()[c.triple[0]], dp.actions()[c.triple[1]], dp.actions()[c.triple[2]]}},
                {"belief", io::to_json(c.belief)},
                {"margin", c.margin}};
  }
  print(out, json{{"qcc", r.qcc}, {"lsc", is_lsc(dp)}, {"certificate", cert}});
  return kOk;
}

int do_mh(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.files.size() != 2) throw Error(ErrorCode::ParseError, "mh needs an environment and an experiment");
  const auto env = io::mh_env_from_json(io::load_file(o.files[0]));
  const auto f = load_experiment(o.files[1]);
  if (o.target.empty()) throw Error(ErrorCode::ParseError, "--target is required");
  const TargetAction t(parse_list(o.target, "--target"));
  const auto sol = min_disutility(env, f, t);
  json res{{"implementable", sol.feasible()},
           {"disutility", io::number_or_null(sol.disutility)},
           {"scheme", sol.feasible() ? io::to_json(sol.w) : json(nullptr)},
           {"binding", sol.binding},
           {"dual_bound", nullptr}};
  if ((t.delta.array() == 0.0).all()) {
    try {
      const auto d = dual_solve(env, f);
      res["dual_bound"] = io::number_or_null(d.value);
      res["multipliers"] = json{{"lambda", d.lambda}, {"mu", io::to_json(d.mu)}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroBaseDensity) throw;
      err << "dual bound unavailable: " << e.what() << '\n';
    }
  }
  print(out, res);
  return kOk;
}

int do_screen(const Options& o, std::ostream& out) {
  if (o.files.size() != 2) throw Error(ErrorCode::ParseError, "screen needs an environment and an experiment");
  const auto env = io::screening_env_from_json(io::load_file(o.files[0]));
  const auto f = load_experiment(o.files[1]);
  const auto r = optimal_mechanism(env, f, o.limit);
  json rule = json::array();
  json transfers = json::array();
  if (r.feasible) {
    for (auto a : r.rule.choice) rule.push_back(env.alternatives[a]);
    for (const auto& t : r.transfers.t) transfers.push_back(io::to_json(t));
  }
  print(out, json{{"feasible", r.feasible},
                  {"status", r.feasible ? "Optimal" : "NoFeasibleMechanism"},
                  {"value", io::number_or_null(r.value)},
                  {"rule", r.feasible ? rule : json(nullptr)},
                  {"transfers", r.feasible ? transfers : json(nullptr)}});
  return kOk;
}

int do_transform(const Options& o, std::ostream& out) {
  const int picked = int(o.product) + int(!std::isnan(o.mix)) + int(!o.dichotomy.empty()) +
                     int(!o.garble.empty());
  if (picked != 1) {
    throw Error(ErrorCode::ParseError, "transform needs exactly one of --product, --mix, --dichotomy, --garble");
  }
  const bool binary = o.product || !std::isnan(o.mix);
  if (o.files.size() != (binary ? 2u : 1u)) {
    throw Error(ErrorCode::ParseError, binary ? "this transform needs two experiment files"
                                              : "this transform needs one experiment file");
  }
  const auto f = load_experiment(o.files[0]);
  FiniteExperiment result = f;
  if (o.product) {
    result = product(f, load_experiment(o.files[1]));
  } else if (binary) {
    result = mixture(f, load_experiment(o.files[1]), o.mix);
  } else if (!o.dichotomy.empty()) {
    result = dichotomy_reduce(f, io::dichotomy_from_json(io::load_file(o.dichotomy)));
  } else {
    result = apply_garbling(f, io::garbling_from_json(io::load_file(o.garble)));
  }
  const json j = io::to_json(result);
  if (o.out_path.empty()) {
    print(out, j);
  } else {
    std::ofstream file(o.out_path);
    if (!file) throw Error(ErrorCode::ParseError, "cannot write '" + o.out_path + "'");
    print(file, j);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Informativeness orders between statistical experiments", "infoorder"};
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Seed for sampled directions");
  app.add_option("--tol", o.tol, "Feasibility tolerance")->check(CLI::PositiveNumber);

  auto* compare = app.add_subcommand("compare", "Compare two experiments");
  compare->add_option("--order", o.order, "lb, lb-sampled, mpe, blackwell or equiv")
      ->check(CLI::IsMember({"lb", "lb-sampled", "mpe", "blackwell", "equiv"}));
  compare->add_option("--resolution", o.resolution, "Samples for lb-sampled")->check(CLI::PositiveNumber);
  compare->add_option("files", o.files, "A.json B.json")->required();

  auto* zonoid = app.add_subcommand("zonoid", "Support function samples on the hemisphere");
  zonoid->add_option("--directions", o.directions, "Number of directions")->check(CLI::PositiveNumber);
  zonoid->add_option("files", o.files, "A.json")->required();

  auto* value_cmd = app.add_subcommand("value", "Ex ante value of a decision problem");
  value_cmd->add_option("--prior", o.prior, "'uniform' or comma-separated q_1..q_n");
  value_cmd->add_option("files", o.files, "dp.json A.json")->required();

  auto* qcc = app.add_subcommand("qcc", "Classify a decision problem");
  qcc->add_option("files", o.files, "dp.json")->required();

  auto* mh = app.add_subcommand("mh", "Implementability and minimal disutility");
  mh->add_option("--target", o.target, "Comma-separated delta_1..delta_n")->required();
  mh->add_option("files", o.files, "env.json A.json")->required();

  auto* screen = app.add_subcommand("screen", "Optimal deterministic screening mechanism");
  screen->add_option("--limit", o.limit, "Maximum number of allocation rules");
  screen->add_option("files", o.files, "env.json A.json")->required();

  auto* transform = app.add_subcommand("transform", "Write a transformed experiment");
  transform->add_flag("--product", o.product, "Product of two experiments");
  transform->add_option("--mix", o.mix, "Mixture weight on the first experiment");
  transform->add_option("--dichotomy", o.dichotomy, "Dichotomy file");
  transform->add_option("--garble", o.garble, "Garbling kernel file");
  transform->add_option("--out", o.out_path, "Output file (default stdout)");
  transform->add_option("files", o.files, "A.json [B.json]")->required();

  std::vector<std::string> argv_storage{"infoorder"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  const double previous_tol = numerics::feasibility_tolerance();
  numerics::set_feasibility_tolerance(o.tol);
  struct Restore {
    double tol;
    ~Restore() { numerics::set_feasibility_tolerance(tol); }
  } restore{previous_tol};

  try {
    if (*compare) return do_compare(o, out, err);
    if (*zonoid) return do_zonoid(o, out);
    if (*value_cmd) return do_value(o, out);
    if (*qcc) return do_qcc(o, out);
    if (*mh) return do_mh(o, out, err);
    if (*screen) return do_screen(o, out);
    if (*transform) return do_transform(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace infoorder::cli
