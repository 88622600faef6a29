#include "nildual/closure.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <string>

#include "nildual/error.hpp"

namespace nildual {
namespace {

// Deduplicating arena of fixed-width byte vectors. New candidates are
// written into scratch() and then either committed or discarded.
class ElementStore {
 public:
  explicit ElementStore(std::size_t width) : width_(width), slots_(1024, 0) {}

  std::size_t size() const { return count_; }
  const Elem* element(std::size_t i) const { return arena_.data() + i * width_; }

  Elem* scratch() {
    arena_.resize((count_ + 1) * width_);
    return arena_.data() + count_ * width_;
  }

  // Returns (index, inserted) for the element currently in scratch().
  std::pair<std::uint32_t, bool> commit() {
    const Elem* s = arena_.data() + count_ * width_;
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t i = hash_bytes({s, width_}) & mask;; i = (i + 1) & mask) {
      const std::uint32_t v = slots_[i];
      if (v == 0) {
        slots_[i] = static_cast<std::uint32_t>(count_ + 1);
        ++count_;
        if (count_ * 2 > slots_.size()) rehash();
        return {static_cast<std::uint32_t>(count_ - 1), true};
      }
      if (std::memcmp(element(v - 1), s, width_) == 0) return {v - 1, false};
    }
  }

  std::vector<Elem> release() {
    arena_.resize(count_ * width_);
    return std::move(arena_);
  }

 private:
  void rehash() {
    std::vector<std::uint32_t> fresh(slots_.size() * 2, 0);
    const std::size_t mask = fresh.size() - 1;
    for (std::size_t idx = 0; idx < count_; ++idx) {
      std::size_t i = hash_bytes({element(idx), width_}) & mask;
      while (fresh[i] != 0) i = (i + 1) & mask;
      fresh[i] = static_cast<std::uint32_t>(idx + 1);
    }
    slots_ = std::move(fresh);
  }

  std::size_t width_;
  std::size_t count_ = 0;
  std::vector<Elem> arena_;
  std::vector<std::uint32_t> slots_;
};

// One representative element per kernel class of an argument position.
class ShadowSet {
 public:
  ShadowSet(std::vector<Elem> kmap, std::size_t width) : kmap_(std::move(kmap)), shadows_(width) {
    identity_ = constant_ = true;
    for (std::size_t a = 0; a < kmap_.size(); ++a) {
      identity_ = identity_ && kmap_[a] == a;
      constant_ = constant_ && kmap_[a] == kmap_[0];
    }
  }

  void absorb(const ElementStore& elems, std::size_t upto, std::size_t width) {
    for (std::size_t i = seen_; i < upto; ++i) {
      if (identity_) {
        reps_.push_back(static_cast<std::uint32_t>(i));
      } else if (constant_) {
        if (reps_.empty()) reps_.push_back(static_cast<std::uint32_t>(i));
      } else {
        const Elem* e = elems.element(i);
        Elem* s = shadows_.scratch();
        for (std::size_t j = 0; j < width; ++j) s[j] = kmap_[e[j]];
        if (shadows_.commit().second) reps_.push_back(static_cast<std::uint32_t>(i));
      }
    }
    seen_ = upto;
  }

  std::size_t size() const { return reps_.size(); }
  std::uint32_t rep(std::size_t s) const { return reps_[s]; }

 private:
  std::vector<Elem> kmap_;
  bool identity_;
  bool constant_;
  ElementStore shadows_;
  std::vector<std::uint32_t> reps_;
  std::size_t seen_ = 0;
};


bool is_associative(const FunctionTable& t) {
  const int n = t.universe();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        const Elem xy = t.at(x + n * y);
        const Elem yz = t.at(y + n * z);
        if (t.at(xy + n * z) != t.at(x + n * yz)) return false;
      }
  return true;
}

bool is_commutative(const FunctionTable& t) {
  const int n = t.universe();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < x; ++y)
      if (t.at(x + n * y) != t.at(y + n * x)) return false;
  return true;
}

struct OpState {
  const FunctionTable* table;
  int arity;
  std::vector<Code> strides;
  bool shortcut = false;
  bool commutative = false;
  // Binary, commutative, same kernel at both positions: unordered pairs.
  bool symmetric = false;
  std::vector<ShadowSet> shadows;
  // Associative shortcut bookkeeping.
  std::vector<std::uint32_t> gens;
  std::size_t done_elems = 0;
  std::size_t done_gens = 0;
};

void apply(const OpState& op, std::span<const Elem* const> args, Elem* out, std::size_t width) {
  const Elem* tab = op.table->values().data();
  if (op.arity == 1) {
    for (std::size_t j = 0; j < width; ++j) out[j] = tab[args[0][j]];
  } else if (op.arity == 2) {
    const Code n = op.strides[1];
    for (std::size_t j = 0; j < width; ++j) out[j] = tab[args[0][j] + n * args[1][j]];
  } else {
    for (std::size_t j = 0; j < width; ++j) {
      Code c = 0;
      for (int i = 0; i < op.arity; ++i) c += args[static_cast<std::size_t>(i)][j] * op.strides[static_cast<std::size_t>(i)];
      out[j] = tab[c];
    }
  }
}

}  // namespace

std::vector<Elem> position_kernel(const FunctionTable& t, int pos) {
  const int n = t.universe();
  const int m = t.arity();
  const Code stride = checked_pow(n, pos);
  std::vector<std::vector<Elem>> columns(static_cast<std::size_t>(n));
  std::vector<Elem> rest(static_cast<std::size_t>(m > 0 ? m - 1 : 0), 0);
  do {
    Code base = 0;
    Code mult = 1;
    for (int i = 0, r = 0; i < m; ++i) {
      if (i != pos) base += rest[static_cast<std::size_t>(r++)] * mult;
      mult *= static_cast<Code>(n);
    }
    for (int a = 0; a < n; ++a) columns[static_cast<std::size_t>(a)].push_back(t.at(base + a * stride));
  } while (!rest.empty() && next_tuple(rest, n));
  std::vector<Elem> kmap(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    kmap[static_cast<std::size_t>(a)] = static_cast<Elem>(a);
    for (int b = 0; b < a; ++b) {
      if (columns[static_cast<std::size_t>(a)] == columns[static_cast<std::size_t>(b)]) {
        kmap[static_cast<std::size_t>(a)] = static_cast<Elem>(b);
        break;
      }
    }
  }
  return kmap;
}

bool injective_at(const FunctionTable& t, int pos) {
  const auto kmap = position_kernel(t, pos);
  for (std::size_t a = 0; a < kmap.size(); ++a) {
    if (kmap[a] != a) return false;
  }
  return true;
}

ClosureResult close_under(const FiniteAlgebra& alg, std::size_t width,
                          const std::vector<std::vector<Elem>>& seeds,
                          const ClosureOptions& options) {
  const bool bounded = options.max_depth >= 0;
  ElementStore store(width);
  std::vector<int> depth;
  std::vector<OpState> ops;
  ops.reserve(alg.ops().size());
  for (const auto& op : alg.ops()) {
    OpState s;
    s.table = &op.table;
    s.arity = op.arity();
    for (int i = 0; i < s.arity; ++i) s.strides.push_back(checked_pow(alg.size(), i));
    // Only cancellative associative operations take the shortcut; others
    // (e.g. 2xy) collapse many arguments and do better through shadows.
    if (!bounded && s.arity == 2 && is_associative(op.table) &&
        injective_at(op.table, 0) && injective_at(op.table, 1)) {
      s.shortcut = true;
      s.commutative = is_commutative(op.table);
    } else {
      for (int i = 0; i < s.arity; ++i) s.shadows.emplace_back(position_kernel(op.table, i), width);
      s.symmetric = s.arity == 2 && is_commutative(op.table) &&
                    position_kernel(op.table, 0) == position_kernel(op.table, 1);
    }
    ops.push_back(std::move(s));
  }

  bool overflow = false;
  bool streaming = false;
  std::uint64_t streamed = 0;
  std::vector<Elem> tmp(width);
  auto commit = [&](int origin, int d) {
    auto [idx, inserted] = store.commit();
    if (!inserted) return;
    depth.push_back(d);
    for (std::size_t j = 0; j < ops.size(); ++j) {
      if (ops[j].shortcut && static_cast<int>(j) != origin) ops[j].gens.push_back(idx);
    }
    if (store.size() > options.budget) overflow = true;
  };
  // Unbounded closures saturate under the associative operations as soon
  // as another operation adds an element, so later outputs already in the
  // span are never recorded as generators.
  std::function<void()> saturate;
  bool saturating = false;
  auto emit = [&](int origin, int d) {
    if (streaming) {
      ++streamed;
      options.last_round_visitor(std::span<const Elem>(tmp.data(), width));
      return;
    }
    std::memcpy(store.scratch(), tmp.data(), width);
    const std::size_t before = store.size();
    commit(origin, d);
    if (saturate && !saturating && store.size() > before && !overflow) saturate();
  };

  for (const auto& seed : seeds) {
    if (seed.size() != width) throw InputError("closure seed has wrong length");
    for (Elem x : seed) {
      if (x >= alg.size()) throw InputError("closure seed entry out of range");
    }
    std::memcpy(store.scratch(), seed.data(), width);
    commit(-1, 0);
  }

  // Saturates under the associative operations.
  auto phase_a = [&] {
    saturating = true;
    bool progress = true;
    while (progress && !overflow) {
      progress = false;
      for (std::size_t j = 0; j < ops.size() && !overflow; ++j) {
        OpState& op = ops[j];
        if (!op.shortcut) continue;
        const std::size_t e_end = store.size();
        const std::size_t g_end = op.gens.size();
        if (e_end == op.done_elems && g_end == op.done_gens) continue;
        progress = true;
        auto mult = [&](std::size_t x, std::size_t g) {
          const Elem* args[2] = {store.element(x), store.element(g)};
          apply(op, args, tmp.data(), width);
          emit(static_cast<int>(j), 0);
          if (!op.commutative && !overflow) {
            const Elem* rev[2] = {store.element(g), store.element(x)};
            apply(op, rev, tmp.data(), width);
            emit(static_cast<int>(j), 0);
          }
        };
        for (std::size_t x = op.done_elems; x < e_end && !overflow; ++x)
          for (std::size_t g = 0; g < g_end && !overflow; ++g) mult(x, op.gens[g]);
        for (std::size_t x = 0; x < op.done_elems && !overflow; ++x)
          for (std::size_t g = op.done_gens; g < g_end && !overflow; ++g) mult(x, op.gens[g]);
        op.done_elems = e_end;
        op.done_gens = g_end;
      }
    }
    saturating = false;
  };
  const bool any_shortcut = std::any_of(ops.begin(), ops.end(), [](const OpState& o) { return o.shortcut; });
  if (!bounded && any_shortcut) saturate = phase_a;

  std::size_t processed = 0;
  int round = 0;
  int depth_reached = 0;
  while (!overflow) {
    if (!bounded) phase_a();
    if (overflow) break;
    const std::size_t frontier_end = store.size();
    if (frontier_end == processed) {
      depth_reached = round;
      break;
    }
    if (bounded && round >= options.max_depth) {
      depth_reached = round;
      break;
    }
    ++round;
    streaming = bounded && round == options.max_depth && options.last_round_visitor;
    for (std::size_t j = 0; j < ops.size() && !overflow; ++j) {
      OpState& op = ops[j];
      if (op.shortcut) continue;
      const std::size_t m = static_cast<std::size_t>(op.arity);
      std::vector<std::size_t> old(m), now(m);
      for (std::size_t i = 0; i < m; ++i) {
        old[i] = op.shadows[i].size();
        op.shadows[i].absorb(store, frontier_end, width);
        now[i] = op.shadows[i].size();
      }
      std::vector<std::size_t> lo(m), hi(m), cur(m);
      std::vector<const Elem*> args(m);
      if (op.symmetric) {
        const ShadowSet& sh = op.shadows[0];
        for (std::size_t y = old[0]; y < now[0] && !overflow; ++y) {
          for (std::size_t x = 0; x <= y && !overflow; ++x) {
            args[0] = store.element(sh.rep(x));
            args[1] = store.element(sh.rep(y));
            apply(op, args, tmp.data(), width);
            emit(static_cast<int>(j), round);
          }
        }
        continue;
      }
      for (std::size_t q = 0; q < m && !overflow; ++q) {
        if (now[q] == old[q]) continue;
        bool empty = false;
        for (std::size_t i = 0; i < m; ++i) {
          lo[i] = i == q ? old[i] : 0;
          hi[i] = i < q ? old[i] : now[i];
          empty = empty || lo[i] >= hi[i];
        }
        if (empty) continue;
        cur = lo;
        while (!overflow) {
          for (std::size_t i = 0; i < m; ++i) args[i] = store.element(op.shadows[i].rep(cur[i]));
          apply(op, args, tmp.data(), width);
          emit(static_cast<int>(j), round);
          std::size_t i = 0;
          for (; i < m; ++i) {
            if (++cur[i] < hi[i]) break;
            cur[i] = lo[i];
          }
          if (i == m) break;
        }
      }
    }
    processed = frontier_end;
    if (!overflow) depth_reached = round;
  }

  ClosureResult result;
  result.width = width;
  result.depth = std::move(depth);
  result.arena = store.release();
  result.complete = !overflow;
  result.streamed = streamed;
  result.depth_reached = overflow ? round - 1 : depth_reached;
  if (result.depth_reached < 0) result.depth_reached = 0;
  return result;
}

}  // namespace nildual
