#include "nildual/report.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nildual/algebra.hpp"
#include "nildual/cad.hpp"
#include "nildual/clone.hpp"
#include "nildual/commutator.hpp"
#include "nildual/error.hpp"
#include "nildual/witness.hpp"
#include "nildual/z4.hpp"

#ifndef NILDUAL_VERSION
#define NILDUAL_VERSION "unknown"
#endif

namespace nildual {

using Json = nlohmann::ordered_json;

std::string tool_version() { return NILDUAL_VERSION; }

std::size_t default_clone_budget() {
  const char* env = std::getenv("NILDUAL_CLONE_BUDGET");
  if (env == nullptr || *env == '\0') return kDefaultCloneBudget;
  std::size_t value = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc() || ptr != end || value == 0) {
    throw InputError(std::string("NILDUAL_CLONE_BUDGET is not a positive integer: ") + env);
  }
  return value;
}

namespace {

// Exit statuses carried out of a subcommand body.
struct Outcome {
  ExitStatus status = ExitStatus::Ok;
  std::string verdict;
};

Json elems(std::span<const Elem> v) {
  Json a = Json::array();
  for (Elem x : v) a.push_back(static_cast<int>(x));
  return a;
}

Json table_json(const FunctionTable& f) {
  Json j;
  j["arity"] = f.arity();
  j["table"] = elems(f.values());
  return j;
}

Json relation_json(const RelationSet& r) {
  Json tuples = Json::array();
  for (std::size_t i = 0; i < r.size(); ++i) tuples.push_back(elems(r.tuple(i)));
  return tuples;
}

Json partial_json(const PartialFunction& f) {
  Json j;
  j["arity"] = f.arity();
  j["domain"] = relation_json(f.domain());
  j["values"] = elems(f.values());
  return j;
}

Json algebra_inputs(const std::string& path, const FiniteAlgebra& alg) {
  Json j;
  j["algebra"] = path;
  j["size"] = alg.size();
  Json ops = Json::array();
  for (const auto& op : alg.ops()) ops.push_back(Json{{"name", op.name}, {"arity", op.arity()}});
  j["operations"] = ops;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("cannot write " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_positive(const char* name, long long v) {
  if (v <= 0) throw InputError(std::string(name) + " must be positive");
}

// {"universe": n, "arity": k, "tuples": [[...], ...]}
RelationSet load_relation_file(const std::string& path, int universe) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  try {
    const int n = j.at("universe").get<int>();
    const int k = j.at("arity").get<int>();
    if (n != universe) throw InputError(path + ": universe does not match the algebra");
    if (k <= 0) throw InputError(path + ": arity must be positive");
    std::vector<std::vector<Elem>> tuples;
    for (const auto& t : j.at("tuples")) {
      std::vector<Elem> row;
      for (const auto& x : t) {
        const int v = x.get<int>();
        if (v < 0 || v >= n) throw InputError(path + ": tuple entry out of range");
        row.push_back(static_cast<Elem>(v));
      }
      if (static_cast<int>(row.size()) != k) throw InputError(path + ": tuple of wrong length");
      tuples.push_back(std::move(row));
    }
    return RelationSet::from_tuples(n, k, tuples);
  } catch (const Json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

Outcome run_clone(const RunConfig& c, std::size_t budget, Json& report) {
  require_positive("arity", c.arity);
  if (c.kind != "term" && c.kind != "polynomial") throw InputError("kind must be term or polynomial");
  const FiniteAlgebra alg = load_algebra_file(c.algebra_path);
  const CloneKind kind = c.kind == "term" ? CloneKind::Term : CloneKind::Polynomial;
  report["inputs"] = algebra_inputs(c.algebra_path, alg);
  report["caps"] = Json{{"clone_budget", budget}, {"arity", c.arity}, {"kind", c.kind}};
  Json counts = Json::array();
  Outcome out;
  for (int j = 1; j <= c.arity; ++j) {
    const ClonePrefix p = clone_prefix(alg, j, kind, budget);
    counts.push_back(Json{{"arity", j}, {"count", p.slice.size()}, {"complete", p.complete}});
    if (!p.complete) {
      report["results"] = Json{{"counts", counts}};
      return {ExitStatus::Inconclusive,
              "inconclusive: " + c.kind + " clone at arity " + std::to_string(j) + " exceeds budget"};
    }
    if (j == c.arity) {
      report["results"] = Json{{"counts", counts}, {"slice", Json::parse(p.slice.to_json())}};
      out.verdict = c.kind + " clone complete up to arity " + std::to_string(c.arity) + ": " +
                    std::to_string(p.slice.size()) + " operations at arity " + std::to_string(j);
    }
  }
  return out;
}

Outcome run_commutators(const RunConfig& c, std::size_t budget, Json& report) {
  require_positive("supernilpotence cap", c.supernilpotence_cap);
  if (c.series_cap < 0) throw InputError("series cap must be non-negative");
  const FiniteAlgebra alg = load_algebra_file(c.algebra_path);
  CommutatorLab lab(alg, budget);
  const auto lattice = lab.congruence_lattice();
  const int series_cap = c.series_cap > 0 ? c.series_cap : static_cast<int>(lattice.size());
  report["inputs"] = algebra_inputs(c.algebra_path, alg);
  report["caps"] = Json{{"clone_budget", budget},
                        {"series_cap", series_cap},
                        {"supernilpotence_cap", c.supernilpotence_cap}};

  const NilpotenceReport nr = lab.lower_central_series(series_cap, c.supernilpotence_cap);
  Json lat = Json::array();
  for (const auto& p : lattice) lat.push_back(to_string(p));

  // [alpha, beta] for every pair, flagged when only a lower bound is known.
  Json pairs = Json::array();
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    for (std::size_t j = i; j < lattice.size(); ++j) {
      const Partition args[2] = {lattice[i], lattice[j]};
      const CommutatorBound b = lab.commutator_bound(args);
      pairs.push_back(Json{{"alpha", i}, {"beta", j}, {"value", to_string(b.value)}, {"exact", b.exact}});
    }
  }
  Json series = Json::array();
  for (const auto& p : nr.series) series.push_back(to_string(p));
  Json nil;
  nil["status"] = nr.status;
  nil["series"] = series;
  nil["series_exact"] = nr.series_exact;
  nil["nilpotency_class"] = nr.nilpotency_class ? Json(*nr.nilpotency_class) : Json(nullptr);
  nil["supernilpotence_status"] = nr.supernilpotence_status;
  nil["supernilpotence_degree"] =
      nr.supernilpotence_degree ? Json(*nr.supernilpotence_degree) : Json(nullptr);
  // [1,1] = 0. A non-trivial lower bound already settles it.
  Json abelian = nullptr;
  if (nr.nilpotency_class) {
    abelian = *nr.nilpotency_class <= 1;
  } else if (nr.series.size() >= 2 && !nr.series[1].is_equality()) {
    abelian = false;
  } else if (nr.series.size() >= 2 && nr.series_exact) {
    abelian = true;
  }
  nil["abelian"] = abelian;
  report["results"] = Json{{"congruences", lat}, {"binary_commutators", pairs}, {"nilpotence", nil}};

  if (nr.status == "inconclusive") return {ExitStatus::Inconclusive, "inconclusive within the budget"};
  std::string v = nr.status;
  if (nr.nilpotency_class) {
    v += " of class " + std::to_string(*nr.nilpotency_class);
    if (*nr.nilpotency_class <= 1) v += " (abelian)";
  }
  if (nr.supernilpotence_degree) v += ", " + std::to_string(*nr.supernilpotence_degree) + "-supernilpotent";
  else if (nr.supernilpotence_status == "exceeds cap") v += ", not supernilpotent within the cap";
  return {ExitStatus::Ok, v};
}

Outcome run_dualize_scan(const RunConfig& c, std::size_t budget, Json& report) {
  require_positive("max arity", c.arity);
  require_positive("domain cap", static_cast<long long>(c.domain_cap));
  if (c.power < 0) throw InputError("power must be non-negative");
  const FiniteAlgebra alg = load_algebra_file(c.algebra_path);
  CandidateSource src;
  src.power = c.power;
  for (const auto& path : c.relation_paths) src.relations.push_back(load_relation_file(path, alg.size()));

  Json inputs = algebra_inputs(c.algebra_path, alg);
  inputs["relations"] = c.relation_paths;
  inputs["candidates"] = src.describe();
  report["inputs"] = inputs;
  report["caps"] = Json{{"clone_budget", budget},
                        {"max_arity", c.arity},
                        {"domain_cap", c.domain_cap},
                        {"power", c.power},
                        {"shrink", c.shrink}};

  ScanOptions opts;
  opts.clone_budget = budget;
  opts.domain_cap = c.domain_cap;
  opts.shrink = c.shrink;
  const RelatednessVerdict v = finite_relatedness_scan(alg, src, c.arity, opts);
  Json per = Json::array();
  for (const auto& a : v.per_arity) {
    per.push_back(Json{{"arity", a.arity},
                       {"domains", a.domains},
                       {"nodes", a.nodes},
                       {"pruned", a.pruned},
                       {"preserving", a.preserving}});
  }
  Json res;
  res["status"] = v.status;
  res["scanned_arity"] = v.scanned_arity;
  res["per_arity"] = per;
  res["counterexample"] = v.counterexample ? partial_json(*v.counterexample) : Json(nullptr);
  res["evidence"] = v.evidence;
  report["results"] = res;
  if (v.status == "certified") {
    return {ExitStatus::Ok, "certified up to arity " + std::to_string(v.scanned_arity)};
  }
  if (v.status == "counterexample") {
    return {ExitStatus::Failed, "counterexample at arity " + std::to_string(v.counterexample->arity())};
  }
  return {ExitStatus::Inconclusive, v.evidence.empty() ? v.status : v.evidence};
}

Outcome run_z4_verify(const RunConfig& c, std::size_t budget, Json& report) {
  if (c.arity < 1 || c.arity > 3) throw InputError("arity must be 1, 2 or 3");
  if (c.truncation < 2) throw InputError("truncation must be at least 2");
  report["inputs"] = Json{{"algebra", "Z4 with +, 1 and 2x1...xj for all j"}};
  report["caps"] = Json{{"clone_budget", budget},
                        {"arity", c.arity},
                        {"truncation", c.truncation},
                        {"sample", c.sample},
                        {"seed", c.seed}};

  // Closure of the truncation against the normal forms of bounded degree.
  const FiniteAlgebra trunc = z4_algebra(c.truncation);
  const ClonePrefix p = clone_prefix(trunc, c.arity, CloneKind::Term, budget);
  Json clone;
  clone["truncation"] = c.truncation;
  clone["arity"] = c.arity;
  clone["closure_count"] = p.slice.size();
  clone["closure_complete"] = p.complete;
  const auto forms = z4_normal_forms(c.arity, c.truncation);
  clone["normal_form_count"] = forms.size();
  bool equal = p.complete && forms.size() == p.slice.size();
  for (std::size_t i = 0; equal && i < forms.size(); ++i) equal = p.slice.contains(forms[i].table());
  clone["equal"] = equal;
  if (!c.emit_clone_path.empty()) {
    write_text(c.emit_clone_path, p.slice.to_json() + "\n");
    clone["emitted"] = c.emit_clone_path;
  }

  Z4VerifyOptions opts;
  opts.sample = c.sample;
  opts.seed = c.seed;
  opts.clone_budget = budget;
  const Z4DualityReport r = z4_verify_duality(c.arity, opts);
  Json dual;
  dual["arity"] = r.arity;
  dual["sampled"] = r.sampled;
  dual["domains"] = r.domains;
  dual["domains_checked_against_classify"] = r.domains_checked_against_classify;
  dual["domains_match_closure"] = r.domains_match_closure;
  dual["preserving"] = r.preserving;
  dual["extended"] = r.extended;
  dual["hom_checks"] = r.hom_checks;
  dual["dichotomy_checks"] = r.dichotomy_checks;
  dual["nodes"] = r.nodes;
  dual["pruned"] = r.pruned;
  dual["failures"] = r.failures;
  report["results"] = Json{{"clone_check", clone}, {"duality", dual}};

  if (!p.complete) return {ExitStatus::Inconclusive, "inconclusive: truncation clone exceeds budget"};
  if (!r.ok() || !equal) {
    return {ExitStatus::Failed, std::to_string(r.failures.size()) + " counterexamples" +
                                    (equal ? "" : "; closure and normal forms differ")};
  }
  return {ExitStatus::Ok, std::string("zero counterexamples") + (r.sampled ? " (sampled)" : "")};
}

// B must share A's signature and contain A = {0..|A|-1} as a subalgebra.
void check_superalgebra(const FiniteAlgebra& a, const FiniteAlgebra& b) {
  if (b.size() < a.size() || b.ops().size() != a.ops().size()) {
    throw InputError("superalgebra does not match the algebra's signature");
  }
  for (std::size_t i = 0; i < a.ops().size(); ++i) {
    const auto& oa = a.ops()[i];
    const auto& ob = b.ops()[i];
    if (oa.name != ob.name || oa.arity() != ob.arity()) {
      throw InputError("superalgebra does not match the algebra's signature");
    }
    std::vector<Elem> t(static_cast<std::size_t>(oa.arity()), 0);
    do {
      if (oa.table(t) != ob.table(t)) throw InputError("algebra is not a subalgebra of the superalgebra");
    } while (next_tuple(t, a.size()));
  }
}

Json element_json(const WitnessElement& w) {
  Json rows = Json::array();
  const std::size_t subsets = std::size_t{1} << w.k;
  for (int i = w.lo; i <= w.hi; ++i) {
    const auto off = static_cast<std::size_t>(i - w.lo) * subsets;
    rows.push_back(elems(std::span<const Elem>(w.values).subspan(off, subsets)));
  }
  return rows;
}

Outcome run_witness(const RunConfig& c, std::size_t budget, Json& report) {
  require_positive("window", c.window);
  require_positive("supernilpotence cap", c.supernilpotence_cap);
  if (c.case_override && *c.case_override != 1 && *c.case_override != 2) {
    throw InputError("case override must be 1 or 2");
  }
  const FiniteAlgebra alg = load_algebra_file(c.algebra_path);
  std::optional<FiniteAlgebra> sup;
  if (!c.superalgebra_path.empty()) {
    sup = load_algebra_file(c.superalgebra_path);
    check_superalgebra(alg, *sup);
  }
  const int lo = -(c.window / 2);
  const int hi = lo + c.window - 1;
  Json inputs = algebra_inputs(c.algebra_path, alg);
  inputs["superalgebra"] = c.superalgebra_path.empty() ? Json(nullptr) : Json(c.superalgebra_path);
  inputs["beta"] = to_string(Partition::total(alg.size()));
  report["inputs"] = inputs;
  report["caps"] = Json{{"clone_budget", budget},
                        {"window", c.window},
                        {"window_lo", lo},
                        {"window_hi", hi},
                        {"depth", c.depth},
                        {"supernilpotence_cap", c.supernilpotence_cap},
                        {"case_override", c.case_override ? Json(*c.case_override) : Json(nullptr)}};

  std::optional<WitnessCase> force;
  if (c.case_override) force = static_cast<WitnessCase>(*c.case_override);
  WitnessSetup s = setup_witness(alg, Partition::total(alg.size()), lo, hi, force,
                                 c.supernilpotence_cap, budget);
  if (sup) {
    // Generators take values in A and B agrees with A there, so only t moves.
    s.t = 2 * sup->size() + 1;
    if (s.width() < min_window_length(s.t)) {
      throw PreconditionError("window shorter than " + std::to_string(min_window_length(s.t)) +
                              " for the superalgebra");
    }
  }

  Json setup;
  setup["alpha"] = to_string(s.alpha);
  setup["gamma"] = to_string(s.gamma);
  setup["k"] = s.k;
  setup["case"] = static_cast<int>(s.which);
  setup["case_overridden"] = s.case_overridden;
  setup["f"] = table_json(s.f);
  setup["a"] = elems(s.a);
  setup["o"] = static_cast<int>(s.o);
  setup["malcev"] = table_json(s.m);
  setup["t"] = s.t;
  setup["e"] = elems(witness_e(s));

  Json gens = Json::array();
  for (const auto& g : build_generators(s)) gens.push_back(Json{{"name", g.name}, {"rows", element_json(g.element)}});

  // Shape of v_{i,j} for every in-window pair whose d's fit.
  std::uint64_t shape_checks = 0;
  std::uint64_t shape_failures = 0;
  for (int i = s.lo; i <= s.hi; ++i) {
    for (int j = i + 1; j <= s.hi; ++j) {
      if (i - s.t - 2 < s.lo || j - 1 + s.t + 3 > s.hi) continue;
      ++shape_checks;
      if (!v_has_expected_shape(s, build_v(s, i, j), i, j)) ++shape_failures;
    }
  }

  const WitnessElement g = ghost(s);
  const auto g_parity = parity_functional(s, g);
  const GhostReport gr = verify_ghost_absent(s, c.depth, budget);
  Json ver;
  ver["requested_depth"] = gr.requested_depth;
  ver["achieved_depth"] = gr.achieved_depth;
  ver["complete"] = gr.complete;
  ver["generators"] = gr.generators;
  ver["stored"] = gr.stored;
  ver["streamed"] = gr.streamed;
  ver["applicable"] = gr.applicable;
  ver["violations"] = gr.violations;
  ver["ghost_found"] = gr.ghost_found;
  ver["ghost_parity"] = g_parity ? Json(static_cast<int>(*g_parity)) : Json(nullptr);
  ver["ghost_fails_parity"] = gr.ghost_fails_parity;
  ver["v_shape_checks"] = shape_checks;
  ver["v_shape_failures"] = shape_failures;
  ver["claim"] = gr.claim;

  report["results"] = Json{{"setup", setup}, {"ghost", element_json(g)}, {"generators", gens}, {"verification", ver}};
  if (gr.ghost_found || gr.violations > 0 || !gr.ghost_fails_parity || shape_failures > 0) {
    return {ExitStatus::Failed, gr.claim};
  }
  if (!gr.complete) return {ExitStatus::Inconclusive, gr.claim};
  return {ExitStatus::Ok, gr.claim};
}

}  // namespace

RunResult run(const RunConfig& config) {
  Json report;
  report["tool"] = "nildual";
  report["version"] = tool_version();
  report["subcommand"] = config.subcommand;
  Outcome out;
  try {
    const std::size_t budget = config.clone_budget > 0 ? config.clone_budget : default_clone_budget();
    if (config.subcommand == "clone") {
      out = run_clone(config, budget, report);
    } else if (config.subcommand == "commutators") {
      out = run_commutators(config, budget, report);
    } else if (config.subcommand == "dualize-scan") {
      out = run_dualize_scan(config, budget, report);
    } else if (config.subcommand == "z4-verify") {
      out = run_z4_verify(config, budget, report);
    } else if (config.subcommand == "witness") {
      out = run_witness(config, budget, report);
    } else {
      throw InputError("unknown subcommand: " + config.subcommand);
    }
  } catch (const BudgetExceeded& e) {
    out = {ExitStatus::Inconclusive, "inconclusive"};
    report["error"] = e.what();
  } catch (const InputError& e) {
    out = {ExitStatus::InputError, "input error"};
    report["error"] = e.what();
  } catch (const PreconditionError& e) {
    out = {ExitStatus::InputError, "precondition failed"};
    report["error"] = e.what();
  } catch (const Error& e) {
    out = {ExitStatus::Failed, "internal check failed"};
    report["error"] = e.what();
  }
  report["verdict"] = out.verdict;
  report["exit_status"] = static_cast<int>(out.status);

  RunResult r;
  r.status = out.status;
  r.report = report.dump(2) + "\n";
  if (!config.output_path.empty()) {
    try {
      write_text(config.output_path, r.report);
    } catch (const InputError&) {
      r.status = ExitStatus::InputError;
    }
  }
  return r;
}

}  // namespace nildual
