#pragma once

#include <iostream>

#include <CLI11.hpp>

#include "tbound/io.hpp"

namespace tbound::cli {

using io::json;

enum Exit : int { kDecisive = 0, kUnknown = 2, kPrecondition = 3, kModelError = 4 };

struct Options {
  std::string model, sync, rabin, formula, independence, report, word, loop, fixture;
  std::vector<std::string> letters;
  std::optional<std::size_t> budget_nodes, budget_exprs;
  bool json = false, timings = false;
};

namespace detail {

// Runs f on the system described by the model, synchronized with the
// control automaton when one is given.
template <class F>
int with_system(const io::Model& m, const std::optional<Dfa>& sync, F&& f) {
  auto go = [&](auto sys) {
    if (sync) return f(synchronous_product(std::move(sys), *sync));
    return f(std::move(sys));
  };
  if (m.is_counters()) return go(io::build_counters(m));
  if (m.kind == "lcs") return go(LcsSystem(std::get<LcsSpec>(m.body)));
  throw ModelError("a " + m.kind + " model is not a transition system");
}

inline std::optional<Dfa> load_sync(const Options& o) {
  if (o.sync.empty()) return std::nullopt;
  auto m = io::load_model(o.sync);
  if (m.kind != "dfa") throw ModelError("--sync expects a dfa model");
  return std::get<Dfa>(m.body);
}

inline json header(const char* command) { return {{"format", io::kReportFormat}, {"command", command}}; }

inline void emit(std::ostream& out, const Options& o, const json& j, const std::string& text) {
  if (o.json) out << j.dump(2) << "\n";
  else out << text;
}

inline std::string segments_text(const Alphabet& al, const AcceleratedWord& w) {
  return w.segments().empty() ? "ε" : w.format(al);
}

inline Word split_word(const Alphabet& al, const std::string& text) {
  std::stringstream ss(text);
  Word w;
  for (std::string x; ss >> x;) {
    auto a = al.find(x);
    if (!a) throw ModelError("unknown letter '" + x + "'");
    w.push_back(*a);
  }
  return w;
}

template <System S>
int report_verdict(std::ostream& out, const Options& o, const S& s, const Verdict<S>& v, const Budget& b) {
  auto j = io::verdict_json(s, v, b, o.timings);
  std::ostringstream t;
  t << "verdict: " << kind_name(static_cast<int>(v.kind)) << "\n";
  if (v.bounded()) {
    t << "expression: " << v.expr->format(s.alphabet()) << "\n";
    t << "source: " << v.expr_source << (v.via ? " (via a " + std::to_string(v.via->size()) + "-state automaton)" : "") << "\n";
    t << "inclusion: " << (v.inclusion.included ? "verified" : "not verified") << " in " << v.inclusion.iterations
      << " iterations\n";
  } else if (v.unbounded()) {
    const auto& f = *v.fork;
    t << "pivot: " << io::config_text(s, f.pivot) << "\n";
    t << "stem: " << segments_text(s.alphabet(), f.stem) << "\n";
    t << "branch a: " << segments_text(s.alphabet(), f.a_branch) << "\n";
    t << "branch b: " << s.alphabet().format(f.b_branch) << "\n";
    t << "replay: " << (replay_fork(s, f) ? "ok" : "failed") << "\n";
  }
  t << "nodes: " << v.nodes_used << ", expressions: " << v.exprs_checked << "\n";
  if (o.timings) t << "seconds: " << v.seconds << "\n";
  emit(out, o, j, t.str());
  return v.kind == Verdict<S>::Kind::Unknown ? kUnknown : kDecisive;
}

template <class S>
void require_commutable() {
  if constexpr (!Commutable<S>) throw UnsupportedModel("independence relations need a model without --sync");
}

inline int omega_exit(Answer a) { return a == Answer::Unknown ? kUnknown : kDecisive; }

}  // namespace detail

inline int cmd_bound(std::ostream& out, const Options& o, const Budget& b) {
  auto m = io::load_model(o.model);
  return detail::with_system(m, detail::load_sync(o), [&](const auto& s) {
    using S = std::decay_t<decltype(s)>;
    if (!o.independence.empty()) {
      detail::require_commutable<S>();
      if constexpr (Commutable<S>) {
        auto I = io::load_independence(o.independence, s.alphabet());
        auto v = decide_bounded_modulo(s, I, b);
        SyncProduct normalized(s, foata_automaton(I));
        return detail::report_verdict(out, o, normalized, v, b);
      }
    }
    return detail::report_verdict(out, o, s, decide_boundedness(s, b), b);
  });
}

inline int cmd_cover(std::ostream& out, const Options& o, const Budget& b) {
  auto m = io::load_model(o.model);
  return detail::with_system(m, detail::load_sync(o), [&](const auto& s) {
    auto r = clover(s, b.nodes);
    auto j = detail::header("cover");
    j["complete"] = r.complete;
    json basis = json::array();
    std::ostringstream t;
    t << (r.complete ? "cover basis" : "partial cover basis") << " (" << r.basis.size() << " elements, " << r.nodes
      << " nodes)\n";
    for (const auto& c : r.basis) {
      basis.push_back(io::config_json(s, c));
      t << "  " << io::config_text(s, c) << "\n";
    }
    j["basis"] = std::move(basis);
    j["nodes"] = r.nodes;
    j["budget"] = io::budget_json(b);
    detail::emit(out, o, j, t.str());
    return r.complete ? kDecisive : kUnknown;
  });
}

inline int cmd_omega_empty(std::ostream& out, const Options& o, const Budget& b) {
  auto m = io::load_model(o.model);
  auto rm = io::load_model(o.rabin);
  if (rm.kind != "rabin") throw ModelError("--rabin expects a rabin model");
  const auto& dra = std::get<DRabin>(rm.body);
  return detail::with_system(m, detail::load_sync(o), [&](const auto& s) {
    using S = std::decay_t<decltype(s)>;
    OmegaReport r;
    if (o.independence.empty()) {
      r = omega_language_empty(s, dra, b);
    } else {
      detail::require_commutable<S>();
      if constexpr (Commutable<S>)
        r = omega_empty_modulo(s, io::load_independence(o.independence, s.alphabet()), dra, b);
    }
    auto j = detail::header("omega-empty");
    j["empty"] = answer_name(r.empty);
    j["detail"] = io::omega_json(r);
    if (!o.independence.empty()) j["closure"] = "asserted by caller";
    std::ostringstream t;
    t << "empty: " << answer_name(r.empty) << "\n";
    if (r.witness_pair >= 0) t << "witness (pair " << r.witness_pair << "): " << r.witness_fork << "\n";
    detail::emit(out, o, j, t.str());
    return detail::omega_exit(r.empty);
  });
}

inline int cmd_ltl(std::ostream& out, const Options& o, const Budget& b) {
  auto m = io::load_model(o.model);
  auto phi = parse_ltl(o.formula);
  return detail::with_system(m, detail::load_sync(o), [&](const auto& s) {
    using S = std::decay_t<decltype(s)>;
    std::optional<Independence> I;
    LtlReport r;
    if (o.independence.empty()) {
      r = model_check_ltl(s, phi, nullptr, b);
    } else {
      detail::require_commutable<S>();
      if constexpr (Commutable<S>) {
        I = io::load_independence(o.independence, s.alphabet());
        r = model_check_ltl(s, phi, &*I, b);
      }
    }
    auto j = detail::header("ltl");
    j["formula"] = phi->str();
    j["holds"] = answer_name(r.holds);
    j["coflat_negation"] = r.coflat;
    j["nba_states"] = r.nba_states;
    j["dra_states"] = r.dra_states;
    j["pairs"] = r.pairs;
    if (I) j["closure"] = "asserted by caller";
    j["omega"] = io::omega_json(r.omega);
    std::ostringstream t;
    t << "formula: " << phi->str() << "\nholds: " << answer_name(r.holds) << "\n";
    if (r.omega.witness_pair >= 0) t << "counterexample fork: " << r.omega.witness_fork << "\n";
    detail::emit(out, o, j, t.str());
    return detail::omega_exit(r.holds);
  });
}

inline int cmd_fnf(std::ostream& out, const Options& o) {
  std::vector<std::string> names;
  auto pairs = io::load_independence_pairs(o.independence, &names);
  if (!o.model.empty()) {
    auto m = io::load_model(o.model);
    detail::with_system(m, std::nullopt, [&](const auto& s) {
      names = s.alphabet().names();
      return kDecisive;
    });
  }
  if (names.empty()) {
    std::set<std::string> seen;
    auto add = [&](const std::string& x) {
      if (seen.insert(x).second) names.push_back(x);
    };
    for (const auto& [a, c] : pairs) add(a), add(c);
    for (const auto* text : {&o.word, &o.loop}) {
      std::stringstream ss(*text);
      for (std::string x; ss >> x;) add(x);
    }
    std::sort(names.begin(), names.end());
  }
  Alphabet al(names);
  Independence I(al, pairs);
  Word u = detail::split_word(al, o.word);
  auto j = detail::header("fnf");
  std::ostringstream t;
  if (o.loop.empty()) {
    auto f = fnf_word(u, I);
    j["word"] = io::word_json(al, u);
    j["fnf"] = io::word_json(al, f);
    t << al.format(f) << "\n";
  } else {
    Word v = detail::split_word(al, o.loop);
    auto [p, q] = fnf_lasso(u, v, I);
    j["prefix"] = io::word_json(al, u);
    j["loop"] = io::word_json(al, v);
    j["fnf"] = {{"prefix", io::word_json(al, p)}, {"loop", io::word_json(al, q)}};
    t << (p.empty() ? "" : al.format(p) + " ") << "(" << al.format(q) << ")^ω\n";
  }
  detail::emit(out, o, j, t.str());
  return kDecisive;
}

inline int cmd_check_diamond(std::ostream& out, const Options& o) {
  auto m = io::load_model(o.model);
  if (!o.sync.empty()) throw ModelError("check-diamond works on the plain system; drop --sync");
  auto check = [&](const auto& s) {
    auto I = io::load_independence(o.independence, s.alphabet());
    auto f = diamond_failure(s, I);
    auto j = detail::header("check-diamond");
    j["independence"] = io::independence_json(I);
    j["diamond"] = !f;
    std::ostringstream t;
    if (f) {
      j["witness"] = {{"a", s.alphabet().name(f->a)}, {"b", s.alphabet().name(f->b)}, {"reason", f->reason}};
      t << "not a diamond at (" << s.alphabet().name(f->a) << ", " << s.alphabet().name(f->b) << "): " << f->reason << "\n";
    } else {
      t << "diamond: every independent pair commutes\n";
    }
    detail::emit(out, o, j, t.str());
    return f ? kPrecondition : kDecisive;
  };
  if (m.is_counters()) return check(io::build_counters(m));
  if (m.kind == "lcs") return check(LcsSystem(std::get<LcsSpec>(m.body)));
  throw ModelError("a " + m.kind + " model is not a transition system");
}

inline int cmd_verify(std::ostream& out, const Options& o, const Budget& b) {
  auto m = io::load_model(o.model);
  auto report = io::read_json_file(o.report);
  auto check = [&](const auto& s) {
    auto r = io::check_report(s, report, b);
    auto j = detail::header("verify");
    const char* status = r.status == io::CheckResult::Status::Valid     ? "valid"
                         : r.status == io::CheckResult::Status::Invalid ? "invalid"
                                                                        : "undecided";
    j["certificate"] = status;
    j["detail"] = r.detail;
    detail::emit(out, o, j, std::string("certificate: ") + status + " (" + r.detail + ")\n");
    return r.status == io::CheckResult::Status::Valid ? kDecisive
           : r.status == io::CheckResult::Status::Invalid ? kPrecondition
                                                           : kUnknown;
  };
  return detail::with_system(m, detail::load_sync(o), [&](const auto& s) {
    if (o.independence.empty()) return check(s);
    return check(SyncProduct(s, foata_automaton(io::load_independence(o.independence, s.alphabet()))));
  });
}

inline int cmd_fixture(std::ostream& out, const Options& o) {
  out << io::emit_model(io::load_fixture(o.fixture)).dump(2) << "\n";
  return kDecisive;
}

// Parses argv, runs one subcommand and returns its exit code.
inline int run_command(const std::vector<std::string>& argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"Trace boundedness of well-structured transition systems"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* c, bool model_required = true) {
    auto* mo = c->add_option("--model", o.model, "model JSON file or fixture:NAME(ARGS)");
    if (model_required) mo->required();
    c->add_option("--budget-nodes", o.budget_nodes, "node budget")->check(CLI::PositiveNumber);
    c->add_option("--budget-exprs", o.budget_exprs, "expression budget")->check(CLI::PositiveNumber);
    c->add_flag("--json", o.json, "emit the report as JSON");
    c->add_flag("--timings", o.timings, "include wall-clock timings");
  };
  auto* bound = app.add_subcommand("bound", "decide trace boundedness");
  common(bound);
  bound->add_option("--sync", o.sync, "control DFA to synchronize with");
  bound->add_option("--independence", o.independence, "decide boundedness modulo this independence");
  auto* cover = app.add_subcommand("cover", "compute the cover basis by acceleration");
  common(cover);
  cover->add_option("--sync", o.sync, "control DFA to synchronize with");
  auto* omega = app.add_subcommand("omega-empty", "emptiness of the Rabin language of the traces");
  common(omega);
  omega->add_option("--sync", o.sync, "control DFA to synchronize with");
  omega->add_option("--rabin", o.rabin, "deterministic Rabin automaton")->required();
  omega->add_option("--independence", o.independence, "normalize traces modulo this independence");
  auto* ltl = app.add_subcommand("ltl", "model check an action-based LTL formula");
  common(ltl);
  ltl->add_option("--sync", o.sync, "control DFA to synchronize with");
  ltl->add_option("--formula", o.formula, "LTL formula")->required();
  ltl->add_option("--independence", o.independence, "normalize traces modulo this independence");
  auto* fnf = app.add_subcommand("fnf", "Foata normal form of a word or lasso");
  common(fnf, false);
  fnf->add_option("--independence", o.independence, "independence relation")->required();
  fnf->add_option("--word", o.word, "space separated letters (the prefix, for a lasso)");
  fnf->add_option("--loop", o.loop, "space separated loop letters of a lasso");
  auto* diamond = app.add_subcommand("check-diamond", "sufficient diamond check of an independence relation");
  common(diamond);
  diamond->add_option("--sync", o.sync, "not supported");
  diamond->add_option("--independence", o.independence, "independence relation")->required();
  auto* verify = app.add_subcommand("verify", "re-check the certificate of a bound report");
  common(verify);
  verify->add_option("--report", o.report, "report produced by bound --json")->required();
  verify->add_option("--sync", o.sync, "control DFA used for the report");
  verify->add_option("--independence", o.independence, "independence used for the report");
  auto* fixture = app.add_subcommand("fixture", "print a fixture model as JSON");
  fixture->add_option("name", o.fixture, "NAME or NAME(ARGS)")->required();

  std::vector<std::string> args(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
  try {
    app.parse(args);
  } catch (const CLI::Success&) {
    out << app.help();
    return kDecisive;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  }

  std::string command = app.get_subcommands().front()->get_name();
  auto fail = [&](int code, const char* kind, const std::string& what, const json& witness = nullptr) {
    err << "error: " << what << "\n";
    if (o.json) {
      auto j = detail::header(command.c_str());
      j["error"] = {{"kind", kind}, {"message", what}};
      if (!witness.is_null()) j["error"]["witness"] = witness;
      out << j.dump(2) << "\n";
    }
    return code;
  };
  try {
    Budget b = io::default_budget();
    if (o.budget_nodes) b.nodes = *o.budget_nodes;
    if (o.budget_exprs) b.exprs = *o.budget_exprs;
    if (command == "bound") return cmd_bound(out, o, b);
    if (command == "cover") return cmd_cover(out, o, b);
    if (command == "omega-empty") return cmd_omega_empty(out, o, b);
    if (command == "ltl") return cmd_ltl(out, o, b);
    if (command == "fnf") return cmd_fnf(out, o);
    if (command == "check-diamond") return cmd_check_diamond(out, o);
    if (command == "verify") return cmd_verify(out, o, b);
    return cmd_fixture(out, o);
  } catch (const NotBounded& e) {
    return fail(kPrecondition, "precondition", e.what(), e.fork);
  } catch (const PreconditionFailed& e) {
    return fail(kPrecondition, "precondition", e.what());
  } catch (const BudgetExceeded& e) {
    return fail(kUnknown, "budget", e.what());
  } catch (const std::overflow_error& e) {
    return fail(kUnknown, "budget", e.what());
  } catch (const LtlParseError& e) {
    return fail(kModelError, "model", e.what(), json{{"position", e.position}});
  } catch (const ModelError& e) {
    return fail(kModelError, "model", e.what());
  } catch (const UnsupportedModel& e) {
    return fail(kModelError, "model", e.what());
  } catch (const UsageError& e) {
    return fail(kModelError, "model", e.what());
  } catch (const io::json::exception& e) {
    return fail(kModelError, "model", e.what());
  }
}

}  // namespace tbound::cli
