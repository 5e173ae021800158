// python bindings: constellations, code design helpers and the BER simulator
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "dstc/alphabets.hpp"
#include "dstc/design_analysis.hpp"
#include "dstc/dustm.hpp"
#include "dstc/errors.hpp"
#include "dstc/simkit.hpp"
#include "dstc/stcodes.hpp"

namespace py = pybind11;
using namespace dstc;
using nlohmann::json;

namespace {

json to_json(const py::object& o) {
  auto dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(o).cast<std::string>());
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict stats_dict(const ErrorStats& r) {
  py::dict d;
  d["scheme"] = r.scheme;
  d["M"] = r.M;
  d["N"] = r.N;
  d["T"] = r.T;
  d["constellation"] = r.constellation;
  d["metric"] = r.metric;
  d["fdts"] = r.fdts;
  d["ebn0_db"] = r.ebn0_db;
  d["rho_db"] = r.rho_db;
  d["frames"] = r.frames;
  d["bits"] = r.bits;
  d["bit_errors"] = r.bit_errors;
  d["ber"] = r.ber;
  d["ber_ci"] = py::make_tuple(r.ber_ci_low, r.ber_ci_high);
  d["symbols"] = r.symbols;
  d["symbol_errors"] = r.symbol_errors;
  d["ser"] = r.ser;
  d["seed"] = r.seed;
  d["config_hash"] = r.config_hash;
  return d;
}

}  // namespace

PYBIND11_MODULE(pydstc, m) {
  m.doc() = "differential space-time coding: constellations, code design and BER simulation";

  // one python class per error category, all deriving from pydstc.Error; leaked on purpose
  auto* base = PyErr_NewException("pydstc.Error", PyExc_RuntimeError, nullptr);
  m.attr("Error") = py::handle(base);
  static auto* sub = new std::map<ErrorKind, PyObject*>;
  for (auto [k, name] : std::vector<std::pair<ErrorKind, std::string>>{{ErrorKind::Shape, "ShapeError"},
                                                                       {ErrorKind::Parameter, "ParameterError"},
                                                                       {ErrorKind::Contract, "ContractError"},
                                                                       {ErrorKind::Capacity, "CapacityError"},
                                                                       {ErrorKind::Unsupported, "UnsupportedError"},
                                                                       {ErrorKind::Singularity, "SingularityError"},
                                                                       {ErrorKind::Degenerate, "DegenerateBlockError"},
                                                                       {ErrorKind::Config, "ConfigError"},
                                                                       {ErrorKind::Io, "IoError"}}) {
    PyObject* t = PyErr_NewException(("pydstc." + name).c_str(), base, nullptr);
    (*sub)[k] = t;
    m.attr(name.c_str()) = py::handle(t);
  }
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(sub->at(e.kind()), e.what());
    } catch (const json::exception& e) {
      PyErr_SetString(sub->at(ErrorKind::Config), e.what());
    }
  });

  py::class_<Constellation>(m, "Constellation")
      .def_readonly("points", &Constellation::points)
      .def_readonly("labels", &Constellation::labels)
      .def_readonly("bits_per_symbol", &Constellation::bits_per_symbol)
      .def_readonly("meta", &Constellation::meta)
      .def_property_readonly("kind", [](const Constellation& c) { return std::string(to_string(c.kind)); })
      .def_property_readonly("name", &Constellation::name)
      .def("__len__", &Constellation::size)
      .def("mean_energy", &Constellation::mean_energy)
      .def("constant_envelope", &Constellation::constant_envelope, py::arg("eps") = 1e-12)
      .def("bit_distance", &Constellation::bit_distance)
      .def("label_string", &Constellation::label_string)
      .def("__repr__", [](const Constellation& c) { return "<Constellation " + c.name() + ">"; });

  m.def("psk", &psk, py::arg("q"));
  m.def("rect_qam", &rect_qam, py::arg("q"));
  m.def("dask", &dask, py::arg("q_a"), py::arg("a"));
  m.def("dapsk", &dapsk, py::arg("q_p"), py::arg("q_a"), py::arg("a"));
  m.def("rotated", &rotated, py::arg("base"), py::arg("theta"));
  m.def("omdc4", &omdc4);
  m.def("omdc8", &omdc8);
  m.def("mdc_8qam", &mdc_8qam, py::arg("r"), py::arg("theta1"), py::arg("theta2"));
  m.def(
      "constellation",
      [](const py::object& spec) { return constellation_spec_from_json(to_json(spec)).build(); },
      py::arg("spec"), "build from a spec dict such as {'kind': 'DAPSK', 'q_p': 8, 'q_a': 2, 'a': 2.0}");

  m.def("table_u", &table_u, py::arg("M"), py::arg("eta"));
  m.def("table_L", &table_L, py::arg("M"), py::arg("eta"));
  m.def("coding_gain_u", &coding_gain_u, py::arg("u"), py::arg("L"));
  m.def(
      "search_u",
      [](int M, int L, int workers) {
        SearchUResult r;
        {
          py::gil_scoped_release nogil;
          r = search_u(M, L, workers);
        }
        py::dict d;
        d["M"] = r.M;
        d["L"] = r.L;
        d["u"] = r.u;
        d["coding_gain"] = r.coding_gain;
        d["candidates_scanned"] = r.candidates_scanned;
        return d;
      },
      py::arg("M"), py::arg("L"), py::arg("workers") = 1);
  m.def(
      "mdc_min_det",
      [](const Constellation& c, int M, int K) { return mdc_min_det(c, M, K).value; }, py::arg("constellation"),
      py::arg("M") = 2, py::arg("K") = 2);
  m.def("search_omdc_radii", &search_omdc_radii, py::arg("q"));

  m.def(
      "validate_config", [](const py::object& cfg) { validate_config(config_from_json(to_json(cfg))); },
      py::arg("config"));
  m.def(
      "resolve_config", [](const py::object& cfg) { return to_py(config_to_json(config_from_json(to_json(cfg)))); },
      py::arg("config"), "fill in defaults and normalize names");
  m.def(
      "run_ber",
      [](const py::object& cfg) {
        SimConfig c = config_from_json(to_json(cfg));
        std::vector<ErrorStats> rows;
        {
          py::gil_scoped_release nogil;
          rows = run_ber(c);
        }
        py::list out;
        for (auto& r : rows) out.append(stats_dict(r));
        return out;
      },
      py::arg("config"), "run the configured BER sweep; one dict per Eb/N0 point");
  m.def("ebn0_to_rho", &ebn0_to_rho, py::arg("ebn0_db"), py::arg("eta"));
  m.def("wilson_interval", &wilson_interval, py::arg("errors"), py::arg("trials"));
}
