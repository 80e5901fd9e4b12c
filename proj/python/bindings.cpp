// Thin pybind11 layer over the C++ core. Configs cross the boundary as JSON
// text; the python package wraps that into dicts.

#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qcf/output.hpp"
#include "qcf/runner.hpp"
#include "qcf/verification.hpp"

namespace py = pybind11;

namespace {

py::dict run_text(const std::string& text, const std::filesystem::path& out) {
  const qcf::RunConfig cfg = qcf::parse_config_text(text, "<python>");
  qcf::RunResult r;
  {
    py::gil_scoped_release nogil;
    r = qcf::run(cfg, out);
  }
  py::dict d;
  d["status"] = r.status;
  d["message"] = r.message;
  d["steps"] = r.steps;
  d["t_final"] = r.t_final;
  d["records"] = r.records;
  return d;
}

py::tuple verify(const std::string& suite, const std::filesystem::path& out, bool quick) {
  std::ostringstream log;
  bool ok = false;
  {
    py::gil_scoped_release nogil;
    ok = qcf::run_verification_suite(suite, out, log, quick);
  }
  return py::make_tuple(ok, log.str());
}

py::dict snapshot(const std::filesystem::path& bin) {
  py::dict d;
  for (auto& [name, values] : qcf::read_snapshot(bin)) d[py::str(name)] = py::array_t<double>(values.size(), values.data());
  return d;
}

}  // namespace

PYBIND11_MODULE(_qcf, m) {
  m.doc() = "hybrid quantum-classical fluid solver";
  static py::exception<qcf::Error> error(m, "QcfError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const qcf::Error& e) {
      py::object exc = py::handle(error.ptr())(e.what());
      exc.attr("kind") = std::string(qcf::to_string(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("version", &qcf::code_version);
  m.def("normalize_config", [](const std::string& text) { return qcf::parse_config_text(text, "<python>").echo.dump(); },
        "Validate a JSON config; returns it re-serialized or raises QcfError.");
  m.def("run", &run_text, py::arg("config_json"), py::arg("out_dir"));
  m.def("verify", &verify, py::arg("suite"), py::arg("out_dir") = std::filesystem::path(), py::arg("quick") = true);
  m.def("read_snapshot", &snapshot, py::arg("bin_path"));
  m.def("extract_series", &qcf::extract_series, py::arg("csv"), py::arg("quantity"));
  m.def("format_double", &qcf::format_double);
}
