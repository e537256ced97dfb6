#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "infoorder/decision.hpp"
#include "infoorder/error.hpp"
#include "infoorder/experiment.hpp"
#include "infoorder/lborder.hpp"
#include "infoorder/moral_hazard.hpp"
#include "infoorder/numerics.hpp"
#include "infoorder/screening.hpp"

namespace py = pybind11;
using namespace infoorder;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using numerics::PiecewiseLinearConvex;

namespace {

py::dict dichotomy_dict(const WeightedDichotomy& d) {
  py::dict out;
  out["omega0"] = d.omega0;
  out["omega1"] = d.omega1;
  out["w0"] = d.w0;
  out["w1"] = d.w1;
  return out;
}

WeightedDichotomy dichotomy_from(const py::dict& d) {
  return WeightedDichotomy{d["omega0"].cast<std::vector<std::size_t>>(), d["omega1"].cast<std::vector<std::size_t>>(),
                           d["w0"].cast<VectorXd>(), d["w1"].cast<VectorXd>()};
}

}  // namespace

PYBIND11_MODULE(_infoorder, m) {
  m.doc() = "Comparing experiments by linear-Blackwell dominance";

  // Owned by the module for the life of the interpreter.
  static PyObject* error_type = PyErr_NewException("infoorder.InfoorderError", PyExc_ValueError, nullptr);
  m.add_object("InfoorderError", py::handle(error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type)(std::string(to_string(e.code())) + ": " + e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("index") = e.index() ? py::cast(*e.index()) : py::none();
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<FiniteExperiment>(m, "FiniteExperiment")
      .def(py::init([](const MatrixXd& matrix, std::vector<std::string> states, std::vector<std::string> signals) {
             if (states.empty()) states = StateSpace::indexed(static_cast<std::size_t>(matrix.rows())).labels();
             if (signals.empty()) {
               for (Eigen::Index j = 0; j < matrix.cols(); ++j) signals.push_back("x" + std::to_string(j));
             }
             return FiniteExperiment(StateSpace(std::move(states)), std::move(signals), matrix);
           }),
           py::arg("matrix"), py::arg("states") = std::vector<std::string>{},
           py::arg("signals") = std::vector<std::string>{})
      .def_property_readonly("matrix", &FiniteExperiment::matrix)
      .def_property_readonly("signals", &FiniteExperiment::signals)
      .def_property_readonly("states", [](const FiniteExperiment& f) { return f.states().labels(); })
      .def_property_readonly("state_count", &FiniteExperiment::state_count)
      .def_property_readonly("signal_count", &FiniteExperiment::signal_count)
      .def("__repr__", [](const FiniteExperiment& f) {
        return "FiniteExperiment(states=" + std::to_string(f.state_count()) +
               ", signals=" + std::to_string(f.signal_count()) + ")";
      });

  m.def("revealing_with_noise", &revealing_with_noise, py::arg("n"), py::arg("eps"));
  m.def("exclusion_experiment", &exclusion_experiment, py::arg("n"));
  m.def("apply_garbling", [](const FiniteExperiment& f, const MatrixXd& k) { return apply_garbling(f, Garbling{k}); },
        py::arg("f"), py::arg("kernel"));
  m.def("product", &product);
  m.def("mixture", &mixture, py::arg("f1"), py::arg("f2"), py::arg("t"));
  m.def("dichotomy_reduce", [](const FiniteExperiment& f, const py::dict& d) { return dichotomy_reduce(f, dichotomy_from(d)); });
  m.def("is_irredundant", &is_irredundant);

  py::class_<OrderVerdict>(m, "OrderVerdict")
      .def_readonly("holds", &OrderVerdict::holds)
      .def_readonly("witness", &OrderVerdict::witness)
      .def_readonly("margin", &OrderVerdict::margin)
      .def_readonly("kernel", &OrderVerdict::kernel)
      .def_readonly("permutation", &OrderVerdict::permutation)
      .def_property_readonly("method", [](const OrderVerdict& v) { return std::string(to_string(v.method)); })
      .def("__bool__", [](const OrderVerdict& v) { return v.holds; })
      .def("__repr__", [](const OrderVerdict& v) {
        return std::string("OrderVerdict(holds=") + (v.holds ? "True" : "False") +
               ", margin=" + std::to_string(v.margin) + ", method=" + std::string(to_string(v.method)) + ")";
      });

  m.def("support_diff", &support_diff, py::arg("f"), py::arg("g"), py::arg("b"));
  m.def("zonoid_support", &zonoid_support, py::arg("f"), py::arg("b"));
  m.def("lb_exact", [](const FiniteExperiment& f, const FiniteExperiment& g) { return lb_exact(f, g); });
  m.def("lb_sampled",
        [](const FiniteExperiment& f, const FiniteExperiment& g, std::size_t resolution, std::uint64_t seed) {
          return lb_sampled(f, g, resolution, seed);
        },
        py::arg("f"), py::arg("g"), py::arg("resolution") = 2000, py::arg("seed") = 0);
  m.def("mpe_check", [](const FiniteExperiment& f, const FiniteExperiment& g) { return mpe_check(f, g); });
  m.def("blackwell_check", &blackwell_check);
  m.def("lb_via_relabelings", &lb_via_relabelings);
  m.def("lb_equivalent", &lb_equivalent);
  m.def("is_quasi_monotone", &is_quasi_monotone);
  m.def("dichotomy_from_witness", [](const VectorXd& b) { return dichotomy_dict(dichotomy_from_witness(b)); });

  py::class_<DecisionProblem>(m, "DecisionProblem")
      .def(py::init([](const MatrixXd& payoff, std::vector<std::string> actions) {
             if (actions.empty()) return DecisionProblem::from_matrix(payoff);
             return DecisionProblem(std::move(actions), payoff);
           }),
           py::arg("payoff"), py::arg("actions") = std::vector<std::string>{})
      .def_property_readonly("payoff", &DecisionProblem::payoff)
      .def_property_readonly("actions", &DecisionProblem::actions);

  m.def("value", [](const DecisionProblem& dp, const VectorXd& p) {
    const auto r = value(dp, p);
    return py::make_tuple(r.value, r.argmax);
  });
  m.def("ex_ante_value",
        [](const DecisionProblem& dp, const FiniteExperiment& f, std::optional<VectorXd> q) {
          return ex_ante_value(dp, f, q ? Prior{*q} : Prior::uniform(f.states().n()));
        },
        py::arg("dp"), py::arg("f"), py::arg("prior") = py::none());
  m.def("is_qcc", [](const DecisionProblem& dp) {
    const auto r = is_qcc(dp);
    py::object cert = py::none();
    if (r.certificate) {
      py::dict c;
      c["triple"] = r.certificate->triple;
      c["belief"] = r.certificate->belief;
      c["margin"] = r.certificate->margin;
      cert = c;
    }
    return py::make_tuple(r.qcc, cert);
  });
  m.def("is_lsc", &is_lsc);

  py::class_<PiecewiseLinearConvex>(m, "PiecewiseLinearConvex")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("breakpoints"), py::arg("values"))
      .def_property_readonly("breakpoints", &PiecewiseLinearConvex::breakpoints)
      .def_property_readonly("values", &PiecewiseLinearConvex::values)
      .def("__call__", &PiecewiseLinearConvex::operator());
  m.def("convex_conjugate", &numerics::convex_conjugate, py::arg("gamma"), py::arg("t"));

  py::class_<MoralHazardEnv>(m, "MoralHazardEnv")
      .def(py::init([](double lo, double hi, const MatrixXd& q, const VectorXd& l, double c0,
                       const PiecewiseLinearConvex& gamma) {
             MoralHazardEnv env{lo, hi, q, l, c0, gamma};
             validate_env(env);
             return env;
           }),
           py::arg("u_lo"), py::arg("u_hi"), py::arg("Q"), py::arg("l"), py::arg("c0"), py::arg("gamma"))
      .def_readonly("u_lo", &MoralHazardEnv::u_lo)
      .def_readonly("u_hi", &MoralHazardEnv::u_hi);

  m.def("min_disutility", [](const MoralHazardEnv& env, const FiniteExperiment& f, const VectorXd& delta) {
    const auto s = min_disutility(env, f, TargetAction(delta));
    py::dict out;
    out["implementable"] = s.feasible();
    out["disutility"] = s.disutility;
    out["scheme"] = s.feasible() ? py::cast(s.w) : py::none();
    out["binding"] = s.binding;
    return out;
  });
  m.def("implementable", [](const MoralHazardEnv& env, const FiniteExperiment& f, const VectorXd& delta) {
    return implementable(env, f, TargetAction(delta));
  });
  m.def("dual_solve", [](const MoralHazardEnv& env, const FiniteExperiment& f) {
    const auto d = dual_solve(env, f);
    return py::make_tuple(d.value, d.lambda, d.mu);
  });

  py::class_<ScreeningEnv>(m, "ScreeningEnv")
      .def(py::init([](std::vector<std::string> alternatives, std::vector<VectorXd> types, const VectorXd& type_probs,
                       const VectorXd& psi, const MatrixXd& v1, const PiecewiseLinearConvex& v2, const MatrixXd& u1,
                       double m_lo, double m_hi) {
             return ScreeningEnv{std::move(alternatives), std::move(types), type_probs, psi, v1, v2, u1, m_lo, m_hi};
           }),
           py::arg("alternatives"), py::arg("types"), py::arg("type_probs"), py::arg("psi"), py::arg("v1"),
           py::arg("v2"), py::arg("u1"), py::arg("m_lo"), py::arg("m_hi"));

  m.def("implement_cost", [](const ScreeningEnv& env, const FiniteExperiment& f, std::vector<std::size_t> choice) {
    return implement_cost(env, f, AllocationRule{std::move(choice)}).cost;
  });
  m.def("optimal_mechanism",
        [](const ScreeningEnv& env, const FiniteExperiment& f, std::size_t limit) {
          const auto r = optimal_mechanism(env, f, limit);
          py::dict out;
          out["feasible"] = r.feasible;
          out["value"] = r.value;
          out["rule"] = r.feasible ? py::cast(r.rule.choice) : py::none();
          out["transfers"] = r.feasible ? py::cast(r.transfers.t) : py::none();
          return out;
        },
        py::arg("env"), py::arg("f"), py::arg("limit") = kDefaultEnumerationLimit);
}
