#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "leansnap/bench.hpp"
#include "leansnap/model.hpp"
#include "leansnap/orchestrator.hpp"
#include "leansnap/sketch.hpp"

namespace py = pybind11;
using namespace leansnap;

namespace {

bench::RunMode parse_mode(const std::string& mode) {
  if (mode == "native") return bench::RunMode::Native;
  if (mode == "fallback") return bench::RunMode::Fallback;
  if (mode == "both") return bench::RunMode::Both;
  throw py::value_error("mode must be 'native', 'fallback' or 'both'");
}

}  // namespace

PYBIND11_MODULE(_leansnap, m) {
  m.doc() = "virtual-time simulation of snapshot-based parallel proof search";

  py::class_<sketch::SorrySite>(m, "SorrySite")
      .def_readonly("line", &sketch::SorrySite::line)
      .def_readonly("character", &sketch::SorrySite::character)
      .def_readonly("hole_index", &sketch::SorrySite::hole_index)
      .def_readonly("byte_offset", &sketch::SorrySite::byte_offset)
      .def("__repr__", [](const sketch::SorrySite& s) {
        return "SorrySite(line=" + std::to_string(s.line) +
               ", character=" + std::to_string(s.character) + ")";
      });

  m.def(
      "find_sorry_positions",
      [](const std::string& text, bool utf16) {
        return sketch::find_sorry_positions(
            text,
            utf16 ? sketch::ColumnUnit::Utf16 : sketch::ColumnUnit::Codepoint);
      },
      py::arg("text"), py::arg("utf16") = true,
      "Positions of placeholder holes, skipping comments and strings");

  m.def(
      "substitute_tactic",
      [](const std::string& text, const sketch::SorrySite& site,
         const std::string& tactic) {
        return sketch::substitute_tactic(text, site, tactic);
      },
      py::arg("text"), py::arg("site"), py::arg("tactic"));

  m.def("splice_header", &sketch::splice_header, py::arg("formal"),
        py::arg("sketch"),
        "Replace the sketch's theorem header with the formal one");

  py::class_<model::CostParams>(m, "CostParams")
      .def(py::init<>())
      .def_readwrite("t_elab", &model::CostParams::t_elab)
      .def_readwrite("t_tactic", &model::CostParams::t_tactic)
      .def_readwrite("t_load", &model::CostParams::t_load)
      .def_readwrite("t_import", &model::CostParams::t_import)
      .def_readwrite("t_body", &model::CostParams::t_body)
      .def_readwrite("workers", &model::CostParams::workers)
      .def_readwrite("holes", &model::CostParams::holes)
      .def_readwrite("configs", &model::CostParams::configs)
      .def("branches", &model::CostParams::branches);

  m.def("t_native", &model::t_native);
  m.def("t_fallback", &model::t_fallback);
  m.def("speedup", &model::speedup);
  m.def("crossover_branches", &model::crossover_branches, py::arg("t_elab"),
        py::arg("t_load"), py::arg("t_tactic"),
        "Smallest branch count where the snapshot path wins; None if never");
  m.def("overhead_fraction", &model::overhead_fraction,
        py::arg("fallback_per_branch"), py::arg("tactic_cpu"));

  py::class_<model::LevelParams>(m, "LevelParams")
      .def(py::init<>())
      .def_readwrite("t_import", &model::LevelParams::t_import)
      .def_readwrite("t_body", &model::LevelParams::t_body)
      .def_readwrite("t_tactic", &model::LevelParams::t_tactic)
      .def_readwrite("fallback_per_branch",
                     &model::LevelParams::fallback_per_branch)
      .def_readwrite("session_overhead", &model::LevelParams::session_overhead)
      .def_readwrite("branches", &model::LevelParams::branches)
      .def_readwrite("workers_l0", &model::LevelParams::workers_l0)
      .def_readwrite("workers_l1", &model::LevelParams::workers_l1);

  py::class_<model::LevelTimes>(m, "LevelTimes")
      .def_readonly("l0", &model::LevelTimes::l0)
      .def_readonly("l1", &model::LevelTimes::l1)
      .def_readonly("l2", &model::LevelTimes::l2)
      .def_readonly("l12", &model::LevelTimes::l12)
      .def_readonly("r1", &model::LevelTimes::r1)
      .def_readonly("r2", &model::LevelTimes::r2)
      .def_readonly("r12", &model::LevelTimes::r12);

  m.def("level_comparison", &model::level_comparison);

  py::class_<model::SweepParams>(m, "SweepParams")
      .def(py::init<>())
      .def_readwrite("drafts", &model::SweepParams::drafts)
      .def_readwrite("branches_per_draft",
                     &model::SweepParams::branches_per_draft)
      .def_readwrite("workers", &model::SweepParams::workers)
      .def_readwrite("t_load", &model::SweepParams::t_load)
      .def_readwrite("t_elab", &model::SweepParams::t_elab)
      .def_readwrite("t_tactic", &model::SweepParams::t_tactic);

  py::class_<model::SweepProjection>(m, "SweepProjection")
      .def_readonly("total_branches", &model::SweepProjection::total_branches)
      .def_readonly("fallback_hours", &model::SweepProjection::fallback_hours)
      .def_readonly("native_hours", &model::SweepProjection::native_hours);

  m.def("sweep_projection", &model::sweep_projection);

  m.def("standard_portfolio",
        [] { return orch::Portfolio::standard().tactics; });

  py::class_<TheoremProfile>(m, "TheoremProfile")
      .def_readonly("id", &TheoremProfile::id)
      .def_readonly("kind", &TheoremProfile::kind)
      .def_readonly("synthetic", &TheoremProfile::synthetic)
      .def_readonly("sketch_text", &TheoremProfile::sketch_text)
      .def_readonly("import_seconds", &TheoremProfile::import_seconds)
      .def_readonly("body_seconds", &TheoremProfile::body_seconds)
      .def_readonly("session_overhead_seconds",
                    &TheoremProfile::session_overhead_seconds)
      .def_readonly("fallback_branch_seconds",
                    &TheoremProfile::fallback_branch_seconds)
      .def("hole_count", &TheoremProfile::hole_count);

  py::class_<bench::Corpus>(m, "Corpus")
      .def_readonly("version", &bench::Corpus::version)
      .def_readonly("problems", &bench::Corpus::problems);

  m.def("load_corpus",
        [](const std::string& path) { return bench::load_corpus(path); },
        py::arg("path"));

  py::class_<bench::ReportRow>(m, "ReportRow")
      .def_readonly("theorem", &bench::ReportRow::theorem)
      .def_readonly("holes", &bench::ReportRow::holes)
      .def_readonly("branches", &bench::ReportRow::branches)
      .def_readonly("native_s", &bench::ReportRow::native_s)
      .def_readonly("fallback_s", &bench::ReportRow::fallback_s)
      .def_readonly("speedup", &bench::ReportRow::speedup)
      .def_readonly("overhead_frac", &bench::ReportRow::overhead_frac)
      .def_readonly("mem_native_gb", &bench::ReportRow::mem_native_gb)
      .def_readonly("mem_fallback_gb", &bench::ReportRow::mem_fallback_gb)
      .def_readonly("mean_cpu_s", &bench::ReportRow::mean_cpu_s)
      .def_readonly("error", &bench::ReportRow::error);

  m.def(
      "run_suite",
      [](const bench::Corpus& corpus, const std::string& mode, int workers,
         double ram_gb, std::uint64_t seed, double jitter) {
        bench::RunOptions opts;
        opts.mode = parse_mode(mode);
        opts.workers = workers;
        opts.ram_gb = ram_gb;
        opts.seed = seed;
        opts.jitter_sigma = jitter;
        return bench::run_suite(corpus, opts);
      },
      py::arg("corpus"), py::arg("mode") = "both", py::arg("workers") = 0,
      py::arg("ram_gb") = 8.0, py::arg("seed") = 0, py::arg("jitter") = 0.0);

  m.def("report_csv", &bench::report_csv);
  m.def("report_text", &bench::report_text);

  py::register_exception<bench::CorpusError>(m, "CorpusError");
  py::register_exception<sketch::SketchError>(m, "SketchError");
}
