#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <sstream>

#include "mipool/distributions.hpp"
#include "mipool/imputer.hpp"
#include "mipool/linalg.hpp"
#include "mipool/pooling.hpp"
#include "mipool/report.hpp"
#include "mipool/simulation.hpp"

namespace py = pybind11;
using namespace mipool;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw Error("expected a 2-d array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j) m(i, j) = r(i, j);
  return m;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
  return out;
}

// NaN marks a missing cell unless an explicit mask (True = observed) is given.
IncompleteDataset to_dataset(const DoubleArray& values, const std::optional<BoolArray>& mask) {
  Matrix v = to_matrix(values);
  Mask mk(v.rows(), v.cols());
  if (mask) {
    if (mask->ndim() != 2 || mask->shape(0) != values.shape(0) || mask->shape(1) != values.shape(1))
      throw Error("mask shape differs from values shape");
    auto r = mask->unchecked<2>();
    for (std::size_t i = 0; i < v.rows(); ++i)
      for (std::size_t j = 0; j < v.cols(); ++j) mk.set(i, j, r(i, j));
  } else {
    for (std::size_t i = 0; i < v.rows(); ++i)
      for (std::size_t j = 0; j < v.cols(); ++j) mk.set(i, j, !std::isnan(v(i, j)));
  }
  return IncompleteDataset(std::move(v), std::move(mk));
}

RepeatedEstimates estimates(std::vector<double> q_hats, std::optional<std::vector<double>> u_bars) {
  RepeatedEstimates est;
  est.u_bars = u_bars ? std::move(*u_bars) : std::vector<double>(q_hats.size(), 0.0);
  est.q_hats = std::move(q_hats);
  return est;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pooling rules for multiply imputed data, a chained-equations imputer and a coverage study.";

  py::register_exception<Error>(m, "MipoolError", PyExc_ValueError);

  py::enum_<PoolingRule>(m, "PoolingRule")
      .value("conventional", PoolingRule::conventional)
      .value("simplified", PoolingRule::simplified);

  py::class_<PooledResult>(m, "PooledResult")
      .def_readonly("q_bar", &PooledResult::q_bar)
      .def_readonly("u_bar", &PooledResult::u_bar)
      .def_readonly("b", &PooledResult::b)
      .def_readonly("t", &PooledResult::t)
      .def_readonly("r", &PooledResult::r)
      .def_readonly("nu", &PooledResult::nu)
      .def_readonly("fmi", &PooledResult::fmi)
      .def_readonly("ci_low", &PooledResult::ci_low)
      .def_readonly("ci_high", &PooledResult::ci_high)
      .def_readonly("rule", &PooledResult::rule)
      .def_readonly("level", &PooledResult::level)
      .def_readonly("m", &PooledResult::m)
      .def_readonly("degenerate", &PooledResult::degenerate)
      .def("covers", &PooledResult::covers)
      .def("__repr__", [](const PooledResult& r) {
        std::ostringstream s;
        s << "PooledResult(rule=" << to_string(r.rule) << ", q_bar=" << r.q_bar << ", t=" << r.t
          << ", nu=" << r.nu << ", ci=[" << r.ci_low << ", " << r.ci_high << "])";
        return s.str();
      });

  m.def("pool_conventional",
        [](std::vector<double> q, std::vector<double> u, double nu_com, double level) {
          return pool_conventional(estimates(std::move(q), std::move(u)), nu_com, level);
        },
        py::arg("q_hats"), py::arg("u_bars"), py::arg("nu_com"), py::arg("level") = 0.95);
  m.def("pool_simplified",
        [](std::vector<double> q, std::optional<std::vector<double>> u, double level) {
          return pool_simplified(estimates(std::move(q), std::move(u)), level);
        },
        py::arg("q_hats"), py::arg("u_bars") = py::none(), py::arg("level") = 0.95);
  m.def("barnard_rubin_df", &barnard_rubin_df, py::arg("m"), py::arg("r"), py::arg("lam"), py::arg("nu_com"));
  m.def("t_quantile", &t_quantile, py::arg("p"), py::arg("df"));
  m.def("cholesky", [](const DoubleArray& a) { return to_array(cholesky(to_matrix(a))); }, py::arg("a"));

  m.def("mice",
        [](const DoubleArray& values, std::optional<BoolArray> mask, std::size_t m_imp,
           std::size_t iterations, std::uint64_t seed, std::uint64_t stream) {
          const IncompleteDataset ds = to_dataset(values, mask);
          ImputationStack stack = [&] {
            py::gil_scoped_release release;
            return mice(ds, {m_imp, iterations, RngStream(seed, stream)});
          }();
          py::list out;
          for (const auto& c : stack.completions()) out.append(to_array(c));
          return out;
        },
        py::arg("values"), py::arg("mask") = py::none(), py::arg("m") = 5, py::arg("iterations") = 10,
        py::arg("seed") = 0, py::arg("stream") = 0,
        "Chained-equations imputation. NaN cells are missing unless a boolean mask (True = observed) "
        "is passed. Returns a list of m completed arrays.");

  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init<>())
      .def_readwrite("n_pop", &SimulationConfig::n_pop)
      .def_readwrite("mu", &SimulationConfig::mu)
      .def_property(
          "sigma", [](const SimulationConfig& c) { return to_array(c.sigma); },
          [](SimulationConfig& c, const DoubleArray& a) { c.sigma = to_matrix(a); })
      .def_readwrite("miss_rates", &SimulationConfig::miss_rates)
      .def_readwrite("m", &SimulationConfig::m)
      .def_readwrite("iterations", &SimulationConfig::iterations)
      .def_readwrite("reps", &SimulationConfig::reps)
      .def_readwrite("level", &SimulationConfig::level)
      .def_readwrite("seed", &SimulationConfig::seed)
      .def_readwrite("threads", &SimulationConfig::threads);

  py::class_<ConditionSummary>(m, "ConditionSummary")
      .def_readonly("variable", &ConditionSummary::variable)
      .def_readonly("pct_missing", &ConditionSummary::pct_missing)
      .def_readonly("rule", &ConditionSummary::rule)
      .def_readonly("avg_r", &ConditionSummary::avg_r)
      .def_readonly("avg_nu", &ConditionSummary::avg_nu)
      .def_readonly("avg_fmi", &ConditionSummary::avg_fmi)
      .def_readonly("avg_ciw", &ConditionSummary::avg_ciw)
      .def_readonly("coverage", &ConditionSummary::coverage)
      .def_readonly("bias", &ConditionSummary::bias)
      .def_readonly("bias_se", &ConditionSummary::bias_se)
      .def_readonly("reps", &ConditionSummary::reps)
      .def_readonly("retries", &ConditionSummary::retries);

  m.def("run_study",
        [](const SimulationConfig& cfg) {
          py::gil_scoped_release release;
          return run_study(cfg);
        },
        py::arg("config"));
  m.def("report_csv",
        [](const std::vector<ConditionSummary>& rows) {
          std::ostringstream out;
          write_report(rows, out);
          return out.str();
        },
        py::arg("rows"));
}
