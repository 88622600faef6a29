#include "nildual/algebra.hpp"

#include <deque>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "nildual/closure.hpp"
#include "nildual/error.hpp"

namespace nildual {

FiniteAlgebra::FiniteAlgebra(int size, std::vector<Operation> ops) : size_(size), ops_(std::move(ops)) {
  if (size < 1 || size > kMaxUniverse) {
    throw InputError("algebra size " + std::to_string(size) + " out of range");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const auto& op = ops_[i];
    if (op.arity() < 1) {
      throw InputError("operation '" + op.name + "' (index " + std::to_string(i) +
                       ") is nullary; model constants as constant unary operations");
    }
    if (op.table.universe() != size) {
      throw InputError("operation '" + op.name + "' (index " + std::to_string(i) +
                       ") has a table over a different universe");
    }
    if (!names.insert(op.name).second) {
      throw InputError("duplicate operation name '" + op.name + "'");
    }
  }
}

const Operation& FiniteAlgebra::op(std::string_view name) const {
  for (const auto& op : ops_) {
    if (op.name == name) return op;
  }
  throw InputError("no operation named '" + std::string(name) + "'");
}

FiniteAlgebra load_algebra(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed algebra document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("size") || !doc["size"].is_number_integer() ||
      !doc.contains("ops") || !doc["ops"].is_array()) {
    throw InputError("malformed algebra document: expected {\"size\": int, \"ops\": [...]}");
  }
  const long long size = doc["size"].get<long long>();
  if (size < 1 || size > kMaxUniverse) {
    throw InputError("algebra size " + std::to_string(size) + " out of range");
  }
  const int n = static_cast<int>(size);
  std::vector<Operation> ops;
  for (std::size_t i = 0; i < doc["ops"].size(); ++i) {
    const auto& o = doc["ops"][i];
    const std::string where = "operation index " + std::to_string(i);
    if (!o.is_object() || !o.contains("name") || !o["name"].is_string() || !o.contains("arity") ||
        !o["arity"].is_number_integer() || !o.contains("table") || !o["table"].is_array()) {
      throw InputError("malformed operation (" + where + "): expected name, arity, table");
    }
    const std::string name = o["name"].get<std::string>();
    const long long arity = o["arity"].get<long long>();
    const std::string label = "operation '" + name + "' (" + where + ")";
    if (arity == 0) throw InputError(label + ": nullary operation present");
    if (arity < 0 || arity > 16) throw InputError(label + ": arity out of range");
    const auto& table = o["table"];
    const Code expected = checked_pow(static_cast<std::size_t>(n), static_cast<std::size_t>(arity));
    if (table.size() != expected) {
      throw InputError(label + ": table length mismatch (expected " + std::to_string(expected) +
                       ", got " + std::to_string(table.size()) + ")");
    }
    std::vector<Elem> values(table.size());
    for (std::size_t j = 0; j < table.size(); ++j) {
      if (!table[j].is_number_integer() || table[j].get<long long>() < 0 ||
          table[j].get<long long>() >= n) {
        throw InputError(label + ": out-of-range entry at index " + std::to_string(j));
      }
      values[j] = static_cast<Elem>(table[j].get<long long>());
    }
    ops.push_back({name, FunctionTable(n, static_cast<int>(arity), std::move(values))});
  }
  return FiniteAlgebra(n, std::move(ops));
}

FiniteAlgebra load_algebra_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open algebra file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_algebra(ss.str());
}

std::string dump_algebra(const FiniteAlgebra& alg) {
  nlohmann::ordered_json doc;
  doc["size"] = alg.size();
  doc["ops"] = nlohmann::ordered_json::array();
  for (const auto& op : alg.ops()) {
    nlohmann::ordered_json o;
    o["name"] = op.name;
    o["arity"] = op.arity();
    std::vector<int> table(op.table.values().begin(), op.table.values().end());
    o["table"] = table;
    doc["ops"].push_back(o);
  }
  return doc.dump(2);
}

std::vector<Elem> apply_pointwise(const FunctionTable& f, std::span<const std::vector<Elem>> args) {
  if (static_cast<int>(args.size()) != f.arity()) {
    throw InputError("apply_pointwise: expected " + std::to_string(f.arity()) + " arguments, got " +
                     std::to_string(args.size()));
  }
  const std::size_t n = args.empty() ? 0 : args[0].size();
  for (const auto& a : args) {
    if (a.size() != n) throw InputError("apply_pointwise: argument tuples differ in arity");
  }
  std::vector<Elem> out(n);
  std::vector<Elem> row(args.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < args.size(); ++i) row[i] = args[i][j];
    out[j] = f(row);
  }
  return out;
}

RelationSet subuniverse_generate(const FiniteAlgebra& alg, int n, const RelationSet& gens) {
  if (gens.arity() != n || gens.universe() != alg.size()) {
    throw InputError("subuniverse_generate: generator arity mismatch");
  }
  std::vector<std::vector<Elem>> seeds;
  for (std::size_t i = 0; i < gens.size(); ++i) seeds.push_back(gens.tuple(i));
  ClosureOptions opts;
  opts.budget = static_cast<std::size_t>(checked_pow(alg.size(), n));
  const ClosureResult r = close_under(alg, static_cast<std::size_t>(n), seeds, opts);
  std::vector<Code> codes;
  codes.reserve(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) codes.push_back(encode(r.element(i), alg.size()));
  return RelationSet(alg.size(), n, std::move(codes), true);
}

Partition congruence_generate(const FiniteAlgebra& alg,
                              std::span<const std::pair<Elem, Elem>> pairs) {
  // Closing under basic translations x -> g(c_1..x..c_m) suffices: unary
  // polynomials are compositions of those.
  const int n = alg.size();
  UnionFind uf(n);
  std::deque<std::pair<Elem, Elem>> queue;
  for (auto [a, b] : pairs) {
    if (a >= n || b >= n) throw InputError("congruence_generate: pair out of range");
    if (uf.unite(a, b)) queue.emplace_back(a, b);
  }
  std::vector<Elem> args;
  while (!queue.empty()) {
    auto [a, b] = queue.front();
    queue.pop_front();
    for (const auto& op : alg.ops()) {
      const int m = op.arity();
      args.assign(static_cast<std::size_t>(m), 0);
      for (int pos = 0; pos < m; ++pos) {
        std::vector<Elem> rest(static_cast<std::size_t>(m - 1), 0);
        do {
          for (int i = 0, r = 0; i < m; ++i) {
            if (i != pos) args[static_cast<std::size_t>(i)] = rest[static_cast<std::size_t>(r++)];
          }
          args[static_cast<std::size_t>(pos)] = a;
          const Elem x = op.table(args);
          args[static_cast<std::size_t>(pos)] = b;
          const Elem y = op.table(args);
          if (uf.unite(x, y)) queue.emplace_back(x, y);
        } while (!rest.empty() && next_tuple(rest, n));
      }
    }
  }
  return uf.partition();
}

bool is_congruence(const FiniteAlgebra& alg, const Partition& p) {
  if (p.universe() != alg.size()) return false;
  const int n = alg.size();
  for (const auto& op : alg.ops()) {
    const int m = op.arity();
    std::vector<Elem> x(static_cast<std::size_t>(m), 0);
    do {
      // Compare against the tuple of block representatives.
      std::vector<Elem> r(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) r[i] = p.rep(x[i]);
      if (!p.related(op.table(x), op.table(r))) return false;
    } while (next_tuple(x, n));
  }
  return true;
}

}  // namespace nildual
