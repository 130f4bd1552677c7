#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "sandhi/checkpoint.hpp"
#include "sandhi/cli.hpp"
#include "sandhi/corpus.hpp"
#include "sandhi/error.hpp"
#include "sandhi/joiner.hpp"
#include "sandhi/oracle.hpp"
#include "sandhi/splitter.hpp"
#include "sandhi/translit.hpp"

namespace py = pybind11;
using namespace sandhi;

namespace {

using Triple = std::tuple<std::string, std::string, std::string>;

std::vector<SandhiTriple> to_triples(const std::vector<Triple>& in) {
  std::vector<SandhiTriple> out;
  out.reserve(in.size());
  for (const auto& [w1, w2, cw] : in) out.push_back({w1, w2, cw});
  return out;
}

nn::TrainConfig make_config(nn::TrainConfig cfg, std::optional<int> hidden, std::optional<int> epochs,
                            std::optional<int> batch, std::optional<double> lr, std::uint64_t seed) {
  if (hidden) cfg.hidden_size = *hidden;
  if (epochs) cfg.epochs = *epochs;
  if (batch) cfg.batch_size = *batch;
  if (lr) cfg.learning_rate = *lr;
  cfg.seed = seed;
  return cfg;
}

py::list history_list(const nn::History& h) {
  py::list out;
  for (const auto& s : h) out.append(py::make_tuple(s.epoch, s.train_loss, s.val_loss));
  return out;
}

struct Splitter {
  nn::TaggerModel tagger;
  nn::Seq2SeqModel wsplitter;
  nn::History tagger_history;
  nn::History wsplitter_history;
};

struct Joiner {
  JoinerModel model;
  nn::History history;
};

}  // namespace

PYBIND11_MODULE(_sandhi, m) {
  m.doc() = "Character-level sandhi joiner and splitter";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() -> py::object { return py::exception<Error>(m, "SandhiError", PyExc_ValueError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = error_type.get_stored();
      py::object inst = type(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  // text
  m.def("devanagari_to_slp1", [](const std::string& s) { return devanagari_to_slp1(s); });
  m.def("slp1_to_devanagari", [](const std::string& s) { return slp1_to_devanagari(s); });
  m.def("itrans_to_slp1", [](const std::string& s) { return itrans_to_slp1(s); });
  m.def("is_slp1_word", [](const std::string& s) { return is_slp1_word(s); });
  m.def("classify_phoneme", [](char c) { return std::string(to_string(classify_phoneme(c))); });
  m.def("classify_sandhi_type", [](const std::string& w1, const std::string& w2) {
    return std::string(to_string(classify_sandhi_type(w1, w2)));
  });

  // corpus
  m.def(
      "filter_triple",
      [](const std::string& w1, const std::string& w2, const std::string& cw) {
        const auto v = filter_triple({w1, w2, cw});
        return py::make_tuple(v.retained, std::string(to_string(v.reason)));
      },
      py::arg("w1"), py::arg("w2"), py::arg("cw"));
  m.def(
      "annotate_window",
      [](const std::string& w1, const std::string& w2, const std::string& cw) {
        const auto a = annotate_window({w1, w2, cw});
        py::dict d;
        d["start"] = a.n1;
        d["window"] = a.window;
        d["tw1"] = a.tw1;
        d["tw2"] = a.tw2;
        return d;
      },
      py::arg("w1"), py::arg("w2"), py::arg("cw"));
  m.def(
      "best_window",
      [](const std::vector<float>& scores, std::size_t width) {
        const auto w = best_window(scores, width);
        return py::make_tuple(w.start, w.length);
      },
      py::arg("scores"), py::arg("width") = kWindowWidth);

  // rule oracle
  m.def("apply_rules", [](const std::string& w1, const std::string& w2) { return apply_rules(w1, w2); });
  m.def("apply_rule", [](const std::string& w1, const std::string& w2) {
    const auto r = apply_rule(w1, w2);
    return py::make_tuple(r.compound, r.rule);
  });
  m.def(
      "generate_synthetic",
      [](std::size_t count, std::uint64_t seed, std::optional<std::filesystem::path> lexicon) {
        const auto triples =
            lexicon ? generate_synthetic(load_lexicon(*lexicon), count, seed) : generate_synthetic(bundled_lexicon(), count, seed);
        std::vector<Triple> out;
        for (const auto& t : triples) out.emplace_back(t.w1, t.w2, t.cw);
        return out;
      },
      py::arg("count"), py::arg("seed") = 1, py::arg("lexicon") = py::none());

  // models
  py::class_<Joiner>(m, "Joiner")
      .def("join", [](const Joiner& j, const std::string& w1, const std::string& w2) { return join(j.model, w1, w2); })
      .def("accuracy",
           [](const Joiner& j, const std::vector<Triple>& test) {
             return evaluate_joiner(j.model, to_triples(test)).accuracy;
           })
      .def("save", [](const Joiner& j, const std::filesystem::path& p) { save_joiner(j.model, p); })
      .def_static("load", [](const std::filesystem::path& p) { return Joiner{load_joiner(p), {}}; })
      .def_property_readonly("history", [](const Joiner& j) { return history_list(j.history); })
      .def_property_readonly("vocab", [](const Joiner& j) { return j.model.net.vocab.token_strings(); });

  py::class_<Splitter>(m, "Splitter")
      .def("split",
           [](const Splitter& s, const std::string& cw) {
             const auto r = split(s.tagger, s.wsplitter, cw);
             return py::make_tuple(r.pw1, r.pw2);
           })
      .def("metrics",
           [](const Splitter& s, const std::vector<Triple>& test) {
             const auto r = evaluate_splitter(s.tagger, s.wsplitter, to_triples(test));
             py::dict d;
             for (const auto& [k, v] : r.metrics) d[py::str(k)] = v.accuracy();
             return d;
           })
      .def("save",
           [](const Splitter& s, const std::filesystem::path& tagger, const std::filesystem::path& wsplitter) {
             save_tagger(s.tagger, tagger);
             save_wsplitter(s.wsplitter, wsplitter);
           },
           py::arg("tagger"), py::arg("wsplitter"))
      .def_static(
          "load",
          [](const std::filesystem::path& tagger, const std::filesystem::path& wsplitter) {
            return Splitter{load_tagger(tagger), load_seq2seq(wsplitter, "wsplitter"), {}, {}};
          },
          py::arg("tagger"), py::arg("wsplitter"))
      .def_property_readonly("tagger_history", [](const Splitter& s) { return history_list(s.tagger_history); })
      .def_property_readonly("wsplitter_history",
                             [](const Splitter& s) { return history_list(s.wsplitter_history); });

  m.def(
      "train_joiner",
      [](const std::vector<Triple>& train, const std::vector<Triple>& validation, std::optional<int> hidden,
         std::optional<int> epochs, std::optional<int> batch, std::optional<double> lr, std::uint64_t seed) {
        const auto tr = to_triples(train);
        const auto va = to_triples(validation);
        py::gil_scoped_release release;
        JoinerConfig cfg;
        cfg.train = make_config(cfg.train, hidden, epochs, batch, lr, seed);
        auto r = train_joiner(tr, va, cfg);
        return Joiner{std::move(r.model), std::move(r.history)};
      },
      py::arg("train"), py::arg("validation") = std::vector<Triple>{}, py::arg("hidden") = py::none(),
      py::arg("epochs") = py::none(), py::arg("batch") = py::none(), py::arg("lr") = py::none(),
      py::arg("seed") = 1);

  m.def(
      "train_splitter",
      [](const std::vector<Triple>& train, const std::vector<Triple>& validation, std::optional<int> hidden,
         std::optional<int> epochs, std::optional<int> batch, std::optional<double> lr, std::uint64_t seed) {
        const auto tr = to_triples(train);
        const auto va = to_triples(validation);
        py::gil_scoped_release release;
        TaggerConfig tc;
        tc.train = make_config(tc.train, hidden, epochs, batch, lr, seed);
        SplitterConfig sc;
        sc.train = make_config(sc.train, hidden, epochs, batch, lr, seed);
        auto a = train_stage1(tr, va, tc);
        auto b = train_stage2(tr, va, sc);
        return Splitter{std::move(a.model), std::move(b.model), std::move(a.history), std::move(b.history)};
      },
      py::arg("train"), py::arg("validation") = std::vector<Triple>{}, py::arg("hidden") = py::none(),
      py::arg("epochs") = py::none(), py::arg("batch") = py::none(), py::arg("lr") = py::none(),
      py::arg("seed") = 1);
}
