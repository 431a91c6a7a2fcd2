// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "typobench/cli.hpp"
#include "typobench/config.hpp"
#include "typobench/error.hpp"
#include "typobench/metrics.hpp"
#include "typobench/placement.hpp"
#include "typobench/taxonomy.hpp"
#include "typobench/textmatch.hpp"

namespace py = pybind11;
using namespace typobench;

namespace {

using PyBox = std::array<double, 4>;

BBox to_box(const PyBox& b) { return {b[0], b[1], b[2], b[3]}; }
PyBox from_box(const BBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

py::dict negatives_dict(const NegativeTriple& n) {
  py::dict d;
  d["hard"] = n.hard;
  d["medium"] = n.medium;
  d["easy"] = n.easy;
  d["hard_native"] = n.hard_native;
  d["medium_native"] = n.medium_native;
  d["easy_native"] = n.easy_native;
  return d;
}

py::object locate_key_text(const std::string& question, const std::vector<std::string>& answers,
                           const std::vector<std::pair<std::string, PyBox>>& tokens,
                           double alpha, double threshold, int max_span) {
  std::vector<OcrToken> ocr;
  ocr.reserve(tokens.size());
  for (const auto& [text, box] : tokens) ocr.push_back({text, to_box(box)});
  const KeyTextMatcher matcher(FuzzyParams{alpha, threshold, max_span});
  const auto r = matcher.locate(question, answers, ocr);
  py::dict d;
  d["box"] = from_box(r.box);
  d["matched_tokens"] = r.matched_tokens;
  d["method"] = std::string(to_string(r.method));
  d["source"] = std::string(to_string(r.source));
  d["score"] = r.score ? py::cast(*r.score) : py::none();
  return d;
}

// Runs the command line in-process and captures both streams.
py::tuple run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = run_cli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "typobench core bindings";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ProviderError>(m, "ProviderError", PyExc_RuntimeError);

  m.def("normalize", [](const std::string& s) { return normalize(s); });
  m.def("similarity", [](const std::string& a, const std::string& b, double alpha) {
    return similarity(a, b, alpha);
  }, py::arg("a"), py::arg("b"), py::arg("alpha") = 0.5);
  m.def("lcs_ratio", [](const std::string& a, const std::string& b) {
    return lcs_ratio(std::string_view(a), std::string_view(b));
  });
  m.def("normalized_edit_distance", [](const std::string& a, const std::string& b) {
    return normalized_edit_distance(std::string_view(a), std::string_view(b));
  });
  m.def("locate_key_text", &locate_key_text, py::arg("question"), py::arg("answers"),
        py::arg("tokens"), py::arg("alpha") = 0.5, py::arg("threshold") = 0.6,
        py::arg("max_span") = 5,
        "Key-text region for a QA pair; tokens are (text, [x0, y0, x1, y1]).");

  m.def("box_distance", [](const PyBox& a, const PyBox& b, int width, int height) {
    return box_distance(to_box(a), to_box(b), {width, height});
  });

  py::class_<Taxonomy>(m, "Taxonomy")
      .def_static("from_json", [](const std::string& text) {
        return Taxonomy::from_json(nlohmann::json::parse(text));
      })
      .def_static("load", [](const std::string& path, std::optional<std::string> names) {
        return names ? Taxonomy::load(path, std::filesystem::path(*names)) : Taxonomy::load(path);
      }, py::arg("hierarchy"), py::arg("class_names") = py::none())
      .def("__len__", &Taxonomy::size)
      .def("__contains__", [](const Taxonomy& t, const std::string& s) { return t.contains(s); })
      .def_property_readonly("root", &Taxonomy::root)
      .def("depth", [](const Taxonomy& t, const std::string& s) { return t.depth(s); })
      .def("parent", [](const Taxonomy& t, const std::string& s) { return t.parent(s); })
      .def("ancestors", [](const Taxonomy& t, const std::string& s) { return t.ancestors(s); })
      .def("lca", [](const Taxonomy& t, const std::string& a, const std::string& b) {
        return t.lca(a, b);
      })
      .def("tree_distance", [](const Taxonomy& t, const std::string& a, const std::string& b) {
        return t.tree_distance(a, b);
      })
      .def("classes", &Taxonomy::classes)
      .def("prune_to_most_specific", &Taxonomy::prune_to_most_specific)
      .def("sample_negatives", [](const Taxonomy& t, const std::string& gt, std::uint64_t seed,
                                  const std::vector<std::string>& exclude) {
        return negatives_dict(t.sample_negatives(gt, seed, exclude));
      }, py::arg("gt"), py::arg("seed"), py::arg("also_exclude") = std::vector<std::string>{});

  m.def("vqa_accuracy", [](const std::string& prediction, const std::vector<std::string>& answers,
                           bool normalize_text) {
    return vqa_accuracy(prediction, answers, normalize_text);
  }, py::arg("prediction"), py::arg("answers"), py::arg("normalize_text") = true);
  m.def("extract_mc_choice", [](const std::string& response,
                                const std::vector<std::string>& options) {
    return extract_mc_choice(response, options);
  });

  m.def("default_config_json", [] { return config_to_json(RunConfig{}).dump(2); });
  m.def("config_hash", [](const std::string& text) {
    return config_hash(config_from_json(nlohmann::json::parse(text)));
  }, "Hash of the output-affecting fields of a JSON config overlay.");

  m.def("run_cli", &run, py::arg("args"),
        "Runs the typobench command line; returns (exit_code, stdout, stderr).");
}
