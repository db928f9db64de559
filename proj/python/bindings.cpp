#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "collatz/core.hpp"
#include "collatz/families.hpp"
#include "collatz/memo.hpp"
#include "collatz/verify.hpp"

namespace py = pybind11;
using namespace collatz;

namespace {

// Python ints cross the boundary as decimal text; both sides are exact.

std::string digits_of(const py::int_& v, const char* what) {
  std::string text = py::str(v);
  if (text.empty() || text[0] == '-') throw InvalidArgument(std::string(what) + " must be non-negative");
  return text;
}

u128 to_native(const py::int_& v, const char* what = "n") {
  const auto parsed = parse_u128(digits_of(v, what));
  if (!parsed) throw OverflowError(std::string(what) + " does not fit in 128 bits");
  return *parsed;
}

BigInt to_big(const py::int_& v, const char* what = "n") { return BigInt(digits_of(v, what)); }

py::int_ to_py(const std::string& decimal) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(decimal.c_str(), nullptr, 10));
}
py::int_ to_py(u128 v) { return to_py(to_string(v)); }
py::int_ to_py(const BigInt& v) { return to_py(v.str()); }

char letter(const std::string& name) {
  if (name.size() != 1) throw InvalidArgument("family names are single letters");
  return name[0];
}

py::object report_to_py(const VerifyReport& r) {
  return py::module_::import("json").attr("loads")(to_json(r).dump());
}

VerifyConfig make_config(std::uint64_t budget, unsigned workers, const std::string& convention,
                         const MemoTable* cache) {
  VerifyConfig cfg;
  cfg.step_budget = budget;
  cfg.workers = workers == 0 ? default_workers() : workers;
  cfg.convention = parse_convention(convention);
  cfg.cache = cache;
  return cfg;
}

py::dict search_to_py(const SeedSearchResult& r) {
  py::dict d;
  d["beta"] = to_py(r.beta);
  d["next_seed"] = to_py(r.next_seed);
  d["source_term"] = to_py(r.source_term);
  d["exponent"] = r.exponent;
  d["source_root"] = to_py(r.source_root);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Collatz step counts, odd-number families and range verification.";

  auto base = py::register_exception<Error>(m, "CollatzError");
  py::register_exception<OverflowError>(m, "StepOverflowError", base.ptr());
  py::register_exception<BudgetExhausted>(m, "BudgetExhausted", base.ptr());
  py::register_exception<NotFound>(m, "NotFound", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ConventionMismatch>(m, "ConventionMismatch", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.attr("DEFAULT_BUDGET") = default_budget;

  m.def("collatz_step", [](const py::int_& n) { return to_py(collatz_step(CollatzInt(to_native(n))).value()); },
        py::arg("n"));

  m.def(
      "trajectory",
      [](const py::int_& n, std::uint64_t max_steps) {
        const Trajectory t = trajectory(CollatzInt(to_native(n)), max_steps);
        py::list values;
        for (u128 v : t.values) values.append(to_py(v));
        py::dict d;
        d["seed"] = to_py(t.seed.value());
        d["values"] = values;
        d["steps"] = t.steps;
        d["peak"] = to_py(t.peak);
        d["converged"] = t.converged();
        return d;
      },
      py::arg("n"), py::arg("max_steps") = default_budget);

  m.def(
      "stopping_count",
      [](const py::int_& n, std::uint64_t budget, const std::string& convention) {
        return stopping_count(CollatzInt(to_native(n)), budget, parse_convention(convention)).count;
      },
      py::arg("n"), py::arg("budget") = default_budget, py::arg("convention") = "paper");

  m.def(
      "syracuse_decompose",
      [](const py::int_& n, std::uint64_t budget) {
        py::list pairs;
        for (const auto& t : syracuse_decompose(CollatzInt(to_native(n)), budget).terms) {
          pairs.append(py::make_tuple(t.exponent, to_py(t.odd)));
        }
        return pairs;
      },
      py::arg("n"), py::arg("budget") = default_budget);

  m.def("registry", [] {
    py::list out;
    for (const auto& spec : registry()) {
      py::dict d;
      d["name"] = std::string(1, spec.name);
      d["coefficient"] = to_py(spec.coefficient);
      d["parity"] = spec.parity;
      d["seed"] = to_py(spec.seed);
      d["base_steps"] = spec.base_steps;
      out.append(d);
    }
    return out;
  });

  m.def("family_term", [](const std::string& name, unsigned n) { return to_py(family_term(family(letter(name)), n)); },
        py::arg("name"), py::arg("n"));
  m.def(
      "family_from_recurrence",
      [](const std::string& name, std::size_t count) {
        py::list out;
        for (const auto& t : family_from_recurrence(family(letter(name)), count)) out.append(to_py(t));
        return out;
      },
      py::arg("name"), py::arg("count"));
  m.def("predicted_steps", [](const std::string& name, unsigned n) { return predicted_steps(family(letter(name)), n); },
        py::arg("name"), py::arg("n"));
  m.def("theorem_steps", [](const std::string& name, unsigned n) { return theorem_steps(family(letter(name)), n); },
        py::arg("name"), py::arg("n"));

  m.def("general_term", [](const py::int_& n, unsigned m) { return to_py(general_term(to_big(n), m)); },
        py::arg("n"), py::arg("m"));
  m.def(
      "parametric_term",
      [](const std::string& name, std::uint64_t k, unsigned n) {
        return to_py(parametric_term(parametric_family(letter(name)), k, n));
      },
      py::arg("name"), py::arg("k"), py::arg("n"));
  m.def(
      "parametric_seed",
      [](const std::string& name, std::uint64_t k) { return to_py(parametric_seed(parametric_family(letter(name)), k)); },
      py::arg("name"), py::arg("k"));

  m.def(
      "seed_search",
      [](const std::string& name, std::size_t depth, const std::vector<py::int_>& exclude) {
        std::vector<BigInt> excluded;
        for (const auto& e : exclude) excluded.push_back(to_big(e));
        return search_to_py(seed_search(family(letter(name)), depth, excluded));
      },
      py::arg("name"), py::arg("depth") = 5, py::arg("exclude") = std::vector<py::int_>{});
  m.def(
      "seed_chain",
      [](const py::int_& start_root, std::size_t stages, std::size_t depth) {
        py::list out;
        for (const auto& r : seed_chain(to_big(start_root), stages, depth)) out.append(search_to_py(r));
        return out;
      },
      py::arg("start_root"), py::arg("stages"), py::arg("depth") = 5);
  m.def(
      "seed_witness",
      [](std::uint64_t k, const std::string& which) {
        WitnessCase c;
        if (which == "I") {
          c = WitnessCase::I;
        } else if (which == "IIb") {
          c = WitnessCase::IIb;
        } else {
          throw InvalidArgument("case must be 'I' or 'IIb'");
        }
        const SeedWitness w = seed_witness(k, c);
        py::dict d;
        d["k"] = w.k;
        d["alpha"] = to_py(w.alpha);
        d["beta"] = to_py(w.beta);
        d["seed"] = to_py(w.seed);
        return d;
      },
      py::arg("k"), py::arg("case"));
  m.def(
      "family_root",
      [](const py::int_& o) {
        const FamilyRoot fr = family_root(to_big(o));
        return py::make_tuple(to_py(fr.root), fr.index);
      },
      py::arg("odd"));

  py::class_<MemoTable>(m, "MemoTable")
      .def_property_readonly("limit", &MemoTable::limit)
      .def_property_readonly("convention",
                             [](const MemoTable& t) { return std::string(to_string(t.convention())); })
      .def("lookup",
           [](const MemoTable& t, const py::int_& n) -> std::optional<std::uint32_t> {
             return t.lookup(to_native(n));
           })
      .def("save", [](const MemoTable& t, const std::string& path) { save_memo(t, std::filesystem::path(path)); })
      .def("__eq__", [](const MemoTable& a, const MemoTable& b) { return a == b; });

  m.def(
      "build_memo",
      [](std::uint64_t limit, const std::string& convention, std::uint64_t budget) {
        const Convention c = parse_convention(convention);
        py::gil_scoped_release release;
        return build_memo(limit, c, budget);
      },
      py::arg("limit"), py::arg("convention") = "paper", py::arg("budget") = default_budget);
  m.def(
      "load_memo",
      [](const std::string& path, std::optional<std::string> convention) {
        std::optional<Convention> want;
        if (convention) want = parse_convention(*convention);
        return load_memo(std::filesystem::path(path), want);
      },
      py::arg("path"), py::arg("convention") = py::none());

  m.def(
      "verify_range",
      [](const py::int_& start, const py::int_& end, std::uint64_t budget, unsigned workers,
         const std::string& convention, const MemoTable* cache) {
        VerifyConfig cfg = make_config(budget, workers, convention, cache);
        cfg.start = to_native(start, "start");
        cfg.end = to_native(end, "end");
        VerifyReport r;
        {
          py::gil_scoped_release release;
          r = verify_range(cfg);
        }
        return report_to_py(r);
      },
      py::arg("start"), py::arg("end"), py::arg("budget") = default_budget, py::arg("workers") = 0,
      py::arg("convention") = "paper", py::arg("cache") = nullptr);

  m.def(
      "check_step_identities",
      [](std::uint64_t max_k, std::uint64_t budget, unsigned workers, const std::string& convention,
         const MemoTable* cache) {
        const VerifyConfig cfg = make_config(budget, workers, convention, cache);
        VerifyReport r;
        {
          py::gil_scoped_release release;
          r = check_step_identities(max_k, cfg);
        }
        return report_to_py(r);
      },
      py::arg("max_k"), py::arg("budget") = default_budget, py::arg("workers") = 0,
      py::arg("convention") = "paper", py::arg("cache") = nullptr);

  m.def(
      "check_partition",
      [](std::uint64_t max_odd, unsigned workers) {
        VerifyReport r;
        {
          py::gil_scoped_release release;
          r = check_partition(max_odd, workers == 0 ? default_workers() : workers);
        }
        return report_to_py(r);
      },
      py::arg("max_odd"), py::arg("workers") = 0);

  m.def(
      "decomposition_consistency",
      [](std::uint64_t max_odd, std::uint64_t budget, unsigned workers, const std::string& convention,
         const MemoTable* cache) {
        const VerifyConfig cfg = make_config(budget, workers, convention, cache);
        VerifyReport r;
        {
          py::gil_scoped_release release;
          r = decomposition_consistency(max_odd, cfg);
        }
        return report_to_py(r);
      },
      py::arg("max_odd"), py::arg("budget") = default_budget, py::arg("workers") = 0,
      py::arg("convention") = "paper", py::arg("cache") = nullptr);
}
