#include "collatz/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "collatz/core.hpp"
#include "collatz/families.hpp"
#include "collatz/memo.hpp"
#include "collatz/verify.hpp"

namespace collatz::cli {

namespace {

using nlohmann::json;

enum class Format { text, json, csv };

struct GlobalOptions {
  std::string format = "text";
  std::string convention = "paper";
  std::uint64_t budget = default_budget;
  std::string cache;
  unsigned workers = default_workers();
};

/// Rows of cells; strings carry values that may exceed 64 bits.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string cell_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(cell_text(row[i]));
    out << '\n';
  }
}

void write_text(std::ostream& out, const Table& t) {
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cell_text(row[i]).size());
  }
  auto line = [&](auto cell) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      out << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << cell(i);
    }
    out << '\n';
  };
  line([&](std::size_t i) { return t.columns[i]; });
  for (const auto& row : t.rows) line([&](std::size_t i) { return cell_text(row[i]); });
}

json rows_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  return rows;
}

/// Emits a table: JSON wraps the rows under `key` next to `meta`.
void emit(std::ostream& out, Format format, const Table& t, const std::string& key, json meta) {
  switch (format) {
    case Format::text:
      write_text(out, t);
      break;
    case Format::csv:
      write_csv(out, t);
      break;
    case Format::json:
      meta[key] = rows_json(t);
      out << meta.dump() << '\n';
      break;
  }
}

u128 parse_positive(const std::string& text, const char* what) {
  const auto v = parse_u128(text);
  if (!v || *v == 0) {
    throw InvalidArgument(std::string(what) + " must be a positive integer below 2^128, got '" +
                          text + "'");
  }
  return *v;
}

BigInt parse_big(const std::string& text, const char* what) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw InvalidArgument(std::string(what) + " must be a decimal integer, got '" + text + "'");
  }
  return BigInt(text);
}

char single_letter(const std::string& text, const char* what) {
  if (text.size() != 1) throw InvalidArgument(std::string(what) + " must be a single letter");
  return text[0];
}

void emit_report(std::ostream& out, Format format, const VerifyReport& r) {
  const json j = to_json(r);
  if (format == Format::json) {
    out << j.dump() << '\n';
    return;
  }
  const std::vector<std::pair<std::string, json>> fields{
      {"kind", r.kind},
      {"start", to_string(r.start)},
      {"end", to_string(r.end)},
      {"convention", std::string(to_string(r.convention))},
      {"seeds_checked", r.seeds_checked},
      {"all_converged", r.all_converged},
      {"nonconverged", r.nonconverged.size()},
      {"max_steps_n", r.max_steps ? json(to_string(r.max_steps->n)) : json(nullptr)},
      {"max_steps", r.max_steps ? json(r.max_steps->steps) : json(nullptr)},
      {"max_excursion_n", r.max_excursion ? json(to_string(r.max_excursion->n)) : json(nullptr)},
      {"max_excursion_peak", r.max_excursion ? json(to_string(r.max_excursion->peak)) : json(nullptr)},
      {"identity_failures", r.identity_failures.size()},
      {"duration_ms", r.duration_ms},
  };
  if (format == Format::csv) {
    Table t;
    t.rows.emplace_back();
    for (const auto& [k, v] : fields) {
      t.columns.push_back(k);
      t.rows.back().push_back(v);
    }
    write_csv(out, t);
    return;
  }
  for (const auto& [k, v] : fields) out << k << ": " << cell_text(v) << '\n';
  for (const auto& [k, v] : r.tallies) out << "tally " << k << ": " << v << '\n';
  for (const auto& f : r.nonconverged) out << "nonconverged " << to_string(f.n) << ": " << f.reason << '\n';
  for (const auto& f : r.identity_failures) out << "failure " << f.identity << ": " << f.witness << '\n';
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collatz step counts, odd-number families and range verification", "collatz"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--convention", g.convention, "Step count of the input 1: paper (3) or standard (0)")
      ->check(CLI::IsMember({"paper", "standard"}));
  app.add_option("--budget", g.budget, "Maximum map applications per value")->check(CLI::PositiveNumber);
  app.add_option("--cache", g.cache, "Memo table path (written by memo-build, read by scans)");
  app.add_option("--workers", g.workers, "Worker threads for scans")->check(CLI::PositiveNumber);

  std::string value;
  std::vector<std::string> values;
  std::string name;
  std::size_t count = 5;
  std::uint64_t k = 1;
  std::size_t depth = 5;
  std::size_t chain = 0;
  std::vector<std::string> exclude;
  std::uint64_t max_k = 0;
  std::uint64_t max_odd = 0;
  std::string start = "1";
  std::string end;
  std::uint64_t limit = 0;

  auto* steps = app.add_subcommand("steps", "Stopping count of n");
  steps->add_option("n", value, "Positive integer")->required();

  auto* traj = app.add_subcommand("traj", "Trajectory of n (values after the seed)");
  traj->add_option("n", value, "Positive integer")->required();

  auto* decompose = app.add_subcommand("decompose", "Odd-step chain 3b+1 = 2^s b' of odd n");
  auto* decompose_n = decompose->add_option("n", value, "Odd positive integer");
  auto* decompose_max = decompose->add_option("--max-odd", max_odd,
                                              "Check sum(s)+k = N(n) for every odd n <= bound instead");
  decompose_n->excludes(decompose_max);
  decompose->callback([&] {
    if (decompose_n->count() == 0 && decompose_max->count() == 0) {
      throw CLI::RequiredError("decompose needs n or --max-odd");
    }
  });

  auto* fam = app.add_subcommand("family", "Terms of a registry family a..g with step predictions");
  fam->add_option("name", name, "Family letter a..g")->required();
  fam->add_option("--count", count, "Number of terms")->check(CLI::PositiveNumber);

  auto* param = app.add_subcommand("parametric", "Terms of D, J, M, K or S at a given k");
  param->add_option("name", name, "Family letter D, J, M, K or S")->required();
  param->add_option("--k", k, "Family parameter k >= 1")->check(CLI::PositiveNumber);
  param->add_option("--count", count, "Number of terms")->check(CLI::PositiveNumber);

  auto* general = app.add_subcommand("general", "Orbit ((3n+1) 4^m - 1)/3 of an odd n");
  general->add_option("n", value, "Odd positive integer")->required();
  general->add_option("--count", count, "Number of terms")->check(CLI::PositiveNumber);

  auto* seeds = app.add_subcommand("seedsearch", "Least beta = t 2^e = 1 (mod 3) over a family");
  seeds->add_option("name", name, "Registry family a..g")->required();
  seeds->add_option("--depth", depth, "Family terms scanned")->check(CLI::PositiveNumber);
  auto* seeds_exclude = seeds->add_option("--exclude", exclude, "Roots to skip");
  auto* seeds_chain = seeds->add_option("--chain", chain, "Run this many chained stages instead")
                          ->check(CLI::PositiveNumber);
  seeds_exclude->excludes(seeds_chain);

  auto* roots = app.add_subcommand("roots", "Family root and index of odd numbers");
  roots->add_option("values", values, "Odd positive integers")->required();

  auto* verify = app.add_subcommand("verify", "Convergence scan over [start, end)");
  verify->add_option("--start", start, "Inclusive lower bound");
  verify->add_option("--end", end, "Exclusive upper bound")->required();

  auto* identities = app.add_subcommand("identities", "Step recurrences and family identities");
  identities->add_option("--max-k", max_k, "Largest k")->required()->check(CLI::PositiveNumber);

  auto* partition = app.add_subcommand("partition", "Root partition of the odd numbers");
  partition->add_option("--max-odd", max_odd, "Odd upper bound")->required()->check(CLI::PositiveNumber);

  auto* memo = app.add_subcommand("memo-build", "Build a memo table and write it to --cache");
  memo->add_option("--limit", limit, "Largest n stored")->required()->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 34));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage_error;
  }

  const Format format = g.format == "json" ? Format::json : g.format == "csv" ? Format::csv : Format::text;
  const Convention convention = parse_convention(g.convention);

  try {
    std::optional<MemoTable> table;
    auto scan_config = [&] {
      if (!g.cache.empty() && !table) table = load_memo(std::filesystem::path(g.cache), convention);
      VerifyConfig cfg;
      cfg.step_budget = g.budget;
      cfg.workers = g.workers;
      cfg.convention = convention;
      cfg.cache = table ? &*table : nullptr;
      return cfg;
    };
    auto finish_report = [&](const VerifyReport& r) {
      emit_report(out, format, r);
      return r.ok() ? exit_ok : exit_domain_error;
    };

    if (*steps) {
      const CollatzInt n(parse_positive(value, "n"));
      const auto result = stopping_count(n, g.budget, convention);
      if (format == Format::text) {
        out << result.count << '\n';
      } else {
        Table t{{"n", "steps"}, {{to_string(n.value()), result.count}}};
        emit(out, format, t, "rows",
             {{"n", to_string(n.value())}, {"steps", result.count},
              {"convention", std::string(to_string(convention))}});
      }
      return exit_ok;
    }

    if (*traj) {
      const CollatzInt n(parse_positive(value, "n"));
      const Trajectory t = trajectory(n, g.budget);
      if (format == Format::json) {
        json vals = json::array();
        for (u128 v : t.values) vals.push_back(to_string(v));
        out << json{{"seed", to_string(n.value())}, {"values", vals}, {"steps", t.steps},
                    {"peak", to_string(t.peak)}, {"converged", t.converged()}}
                   .dump()
            << '\n';
      } else if (format == Format::csv) {
        Table tab{{"index", "value"}, {}};
        for (std::size_t i = 0; i < t.values.size(); ++i) tab.rows.push_back({i + 1, to_string(t.values[i])});
        write_csv(out, tab);
      } else {
        out << "values:";
        for (u128 v : t.values) out << ' ' << to_string(v);
        out << "\nsteps: " << t.steps << "\npeak: " << to_string(t.peak)
            << "\nstatus: " << (t.converged() ? "converged" : "budget exhausted") << '\n';
      }
      return t.converged() ? exit_ok : exit_domain_error;
    }

    if (*decompose) {
      if (decompose_max->count() > 0) return finish_report(decomposition_consistency(max_odd, scan_config()));
      const CollatzInt n(parse_positive(value, "n"));
      const Decomposition d = syracuse_decompose(n, g.budget);
      Table t{{"i", "s", "b"}, {}};
      for (std::size_t i = 0; i < d.terms.size(); ++i) {
        t.rows.push_back({i + 1, d.terms[i].exponent, to_string(d.terms[i].odd)});
      }
      if (format == Format::text) {
        write_text(out, t);
        out << "sum(s)+k = " << d.exponent_sum() << " + " << d.k() << " = " << d.total_steps() << '\n';
      } else {
        emit(out, format, t, "pairs",
             {{"n", to_string(n.value())}, {"k", d.k()}, {"steps", d.total_steps()}});
      }
      return exit_ok;
    }

    if (*fam) {
      const FamilySpec& spec = family(single_letter(name, "family"));
      Table t{{"n", "term", "predicted", "stated", "oracle"}, {}};
      for (unsigned n = 0; n < count; ++n) {
        const BigInt term = family_term(spec, n);
        t.rows.push_back({n, term.str(), predicted_steps(spec, n), theorem_steps(spec, n),
                          stopping_count(to_collatz(term), g.budget, convention).count});
      }
      emit(out, format, t, "terms",
           {{"family", std::string(1, spec.name)}, {"coefficient", spec.coefficient.str()},
            {"parity", spec.parity}, {"seed", spec.seed.str()}, {"base_steps", spec.base_steps},
            {"convention", std::string(to_string(convention))}});
      return exit_ok;
    }

    if (*param) {
      const ParametricFamily& pf = parametric_family(single_letter(name, "parametric family"));
      const BigInt seed = parametric_seed(pf, k);
      const std::uint64_t seed_steps = stopping_count(to_collatz(seed), g.budget, convention).count;
      Table t{{"n", "term", "steps", "expected"}, {}};
      for (unsigned n = 0; n < count; ++n) {
        const BigInt term = parametric_term(pf, k, n);
        t.rows.push_back({n, term.str(), stopping_count(to_collatz(term), g.budget, convention).count,
                          seed_steps + 2 * n});
      }
      emit(out, format, t, "terms",
           {{"family", std::string(1, pf.name)}, {"k", k},
            {"coefficient", parametric_coefficient(pf, k).str()}, {"seed", seed.str()},
            {"convention", std::string(to_string(convention))}});
      return exit_ok;
    }

    if (*general) {
      const BigInt root = parse_big(value, "n");
      const std::uint64_t base = stopping_count(to_collatz(root), g.budget, convention).count;
      Table t{{"m", "term", "steps", "expected"}, {}};
      for (unsigned m = 0; m < count; ++m) {
        const BigInt term = general_term(root, m);
        t.rows.push_back({m, term.str(), stopping_count(to_collatz(term), g.budget, convention).count,
                          base + 2 * m});
      }
      emit(out, format, t, "terms", {{"n", root.str()}, {"convention", std::string(to_string(convention))}});
      return exit_ok;
    }

    if (*seeds) {
      const FamilySpec& spec = family(single_letter(name, "family"));
      std::vector<SeedSearchResult> results;
      if (chain > 0) {
        results = seed_chain(spec.seed, chain, depth);
      } else {
        std::vector<BigInt> excluded;
        for (const auto& e : exclude) excluded.push_back(parse_big(e, "--exclude"));
        results.push_back(seed_search(spec, depth, excluded));
      }
      Table t{{"beta", "next_seed", "source_term", "exponent", "source_root"}, {}};
      for (const auto& r : results) {
        t.rows.push_back({r.beta.str(), r.next_seed.str(), r.source_term.str(), r.exponent,
                          r.source_root.str()});
      }
      emit(out, format, t, "results", {{"family", std::string(1, spec.name)}, {"depth", depth}});
      return exit_ok;
    }

    if (*roots) {
      Table t{{"value", "root", "index"}, {}};
      for (const auto& v : values) {
        const FamilyRoot fr = family_root(parse_big(v, "value"));
        t.rows.push_back({fr.value.str(), fr.root.str(), fr.index});
      }
      emit(out, format, t, "roots", json::object());
      return exit_ok;
    }

    if (*verify) {
      VerifyConfig cfg = scan_config();
      cfg.start = parse_positive(start, "--start");
      const auto parsed_end = parse_u128(end);
      if (!parsed_end) throw InvalidArgument("--end must be a decimal integer below 2^128");
      cfg.end = *parsed_end;
      return finish_report(verify_range(cfg));
    }

    if (*identities) return finish_report(check_step_identities(max_k, scan_config()));

    if (*partition) return finish_report(check_partition(max_odd, g.workers));

    if (*memo) {
      if (g.cache.empty()) throw InvalidArgument("memo-build needs --cache PATH");
      const MemoTable t = build_memo(limit, convention, g.budget);
      save_memo(t, std::filesystem::path(g.cache));
      const auto unknown = static_cast<std::uint64_t>(
          std::count(t.counts().begin(), t.counts().end(), MemoTable::sentinel));
      const json meta{{"path", g.cache}, {"limit", t.limit()},
                      {"convention", std::string(to_string(convention))}, {"unknown", unknown}};
      if (format == Format::json) {
        out << meta.dump() << '\n';
      } else if (format == Format::csv) {
        write_csv(out, Table{{"path", "limit", "convention", "unknown"},
                             {{g.cache, t.limit(), std::string(to_string(convention)), unknown}}});
      } else {
        out << "wrote " << t.limit() << " entries (" << unknown << " unknown) to " << g.cache << '\n';
      }
      return exit_ok;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_domain_error;
  }
  return exit_usage_error;
}

}  // namespace collatz::cli
