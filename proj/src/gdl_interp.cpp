#include "sbg/gdl_interp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "sbg/rng.hpp"

namespace sbg::gdl {

namespace {

bool is_atomic(const Term& t) { return t.kind != Term::Kind::Compound || t.args.empty(); }

/// Shape key of an atom; leaves are constants and variables at fixed
/// positions, in left-to-right order.
void flatten(const Term& t, std::string& key, std::vector<const Term*>& leaves, bool top) {
  if (!is_atomic(t)) {
    key += t.name;
    key += '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) key += ',';
      flatten(t.args[i], key, leaves, false);
    }
    key += ')';
  } else if (top) {
    key += t.name;
  } else {
    key += '_';
    leaves.push_back(&t);
  }
}

std::string rule_text(const Rule& r) { return to_kif(r); }

void positive_variables(const Rule& r, std::vector<std::string>& out) {
  for (const auto& l : r.body)
    if (l.kind == Literal::Kind::Positive) collect_variables(l.atom, out);
}

/// Positions where variables and compound terms occur, keyed by the functor
/// path leading there.
void record_paths(const Term& t, const std::string& path, std::set<std::string>& vars, std::set<std::string>& comps) {
  if (t.is_variable()) {
    vars.insert(path);
    return;
  }
  if (is_atomic(t)) return;
  if (!path.empty()) comps.insert(path);
  for (std::size_t i = 0; i < t.args.size(); ++i)
    record_paths(t.args[i], path + t.name + "/" + std::to_string(i) + ">", vars, comps);
}

struct Graph {
  std::vector<std::string> keys;
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<std::pair<int, bool>>> edges;  // head -> (body, negative)

  int node(const std::string& key) {
    auto [it, fresh] = index.emplace(key, static_cast<int>(keys.size()));
    if (fresh) {
      keys.push_back(key);
      edges.emplace_back();
    }
    return it->second;
  }
};

std::string atom_key(const Term& t) {
  std::string key;
  std::vector<const Term*> leaves;
  flatten(t, key, leaves, true);
  return key;
}

Graph dependency_graph(const Document& doc) {
  Graph g;
  for (const auto& r : doc.rules) {
    const int h = g.node(atom_key(r.head));
    for (const auto& l : r.body) {
      if (l.kind == Literal::Kind::Distinct) continue;
      const int b = g.node(atom_key(l.atom));
      g.edges[static_cast<std::size_t>(h)].emplace_back(b, l.kind == Literal::Kind::Negative);
    }
  }
  return g;
}

/// Strongly connected components, dependencies before dependents.
std::vector<std::vector<int>> components(const Graph& g) {
  const int n = static_cast<int>(g.keys.size());
  std::vector<int> idx(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<char> on(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;
  // Iterative Tarjan.
  for (int root = 0; root < n; ++root) {
    if (idx[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<std::pair<int, std::size_t>> work{{root, 0}};
    idx[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on[static_cast<std::size_t>(root)] = 1;
    while (!work.empty()) {
      auto& [v, next] = work.back();
      const auto& es = g.edges[static_cast<std::size_t>(v)];
      if (next < es.size()) {
        const int w = es[next++].first;
        if (idx[static_cast<std::size_t>(w)] < 0) {
          idx[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = counter++;
          stack.push_back(w);
          on[static_cast<std::size_t>(w)] = 1;
          work.emplace_back(w, 0);
        } else if (on[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], idx[static_cast<std::size_t>(w)]);
        }
        continue;
      }
      const int done = v;
      work.pop_back();
      if (!work.empty()) {
        const int parent = work.back().first;
        low[static_cast<std::size_t>(parent)] =
            std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(done)]);
      }
      if (low[static_cast<std::size_t>(done)] == idx[static_cast<std::size_t>(done)]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on[static_cast<std::size_t>(w)] = 0;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL)); }

/// Append-only set of fixed-arity integer rows with lazily built indices on
/// bound-argument masks.
class Table {
 public:
  explicit Table(int arity) : arity_(arity) {}

  int arity() const { return arity_; }
  std::size_t size() const { return rows_; }
  const int* row(std::size_t i) const { return data_.data() + i * static_cast<std::size_t>(arity_); }

  bool contains(const int* r) const {
    if (slots_.empty()) return false;
    return slots_[find_slot(r, hash(r))] != kEmpty;
  }

  bool insert(const int* r) {
    if ((rows_ + 1) * 2 > slots_.size()) grow();
    const std::uint64_t h = hash(r);
    const std::size_t s = find_slot(r, h);
    if (slots_[s] != kEmpty) return false;
    slots_[s] = static_cast<std::uint32_t>(rows_);
    data_.insert(data_.end(), r, r + arity_);
    for (auto& ix : indices_) ix->buckets[key_hash(ix->mask, r)].push_back(static_cast<std::uint32_t>(rows_));
    ++rows_;
    return true;
  }

  void clear() {
    rows_ = 0;
    data_.clear();
    std::fill(slots_.begin(), slots_.end(), kEmpty);
    for (auto& ix : indices_) ix->buckets.clear();
  }

  /// Rows whose masked positions may equal those of `probe`; callers must
  /// still compare, since buckets are keyed by hash.
  const std::vector<std::uint32_t>* lookup(std::uint32_t mask, const int* probe) {
    Index* ix = nullptr;
    for (auto& i : indices_)
      if (i->mask == mask) ix = i.get();
    if (!ix) {
      indices_.push_back(std::make_unique<Index>());
      ix = indices_.back().get();
      ix->mask = mask;
      for (std::size_t i = 0; i < rows_; ++i) ix->buckets[key_hash(mask, row(i))].push_back(static_cast<std::uint32_t>(i));
    }
    auto it = ix->buckets.find(key_hash(mask, probe));
    return it == ix->buckets.end() ? nullptr : &it->second;
  }

 private:
  static constexpr std::uint32_t kEmpty = 0xffffffffu;

  struct Index {
    std::uint32_t mask = 0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  };

  std::uint64_t hash(const int* r) const {
    std::uint64_t h = 0x51ed27;
    for (int i = 0; i < arity_; ++i) h = mix(h, static_cast<std::uint64_t>(static_cast<std::uint32_t>(r[i])));
    return h;
  }

  std::uint64_t key_hash(std::uint32_t mask, const int* r) const {
    std::uint64_t h = mask;
    for (int i = 0; i < arity_; ++i)
      if (mask & (1u << i)) h = mix(h, static_cast<std::uint64_t>(static_cast<std::uint32_t>(r[i])));
    return h;
  }

  std::size_t find_slot(const int* r, std::uint64_t h) const {
    const std::size_t m = slots_.size() - 1;
    for (std::size_t s = h & m;; s = (s + 1) & m) {
      const std::uint32_t v = slots_[s];
      if (v == kEmpty || std::equal(r, r + arity_, row(v))) return s;
    }
  }

  void grow() {
    std::vector<std::uint32_t> old;
    old.swap(slots_);
    slots_.assign(std::max<std::size_t>(16, old.size() * 2), kEmpty);
    for (std::size_t i = 0; i < rows_; ++i) slots_[find_slot(row(i), hash(row(i)))] = static_cast<std::uint32_t>(i);
  }

  int arity_;
  std::size_t rows_ = 0;
  std::vector<int> data_;
  std::vector<std::uint32_t> slots_;
  std::vector<std::unique_ptr<Index>> indices_;
};

// Argument encoding in compiled atoms: >= 0 constant id, < 0 variable -(v+1).
struct CAtom {
  int rel = 0;
  std::vector<int> args;
};

struct Step {
  Literal::Kind kind = Literal::Kind::Positive;
  int literal = 0;    // index among the rule's positive literals, for deltas
  CAtom atom;         // Positive, Negative
  int lhs = 0, rhs = 0;  // Distinct
  std::uint32_t mask = 0;                    // Positive: bound argument positions
  std::vector<std::pair<int, int>> binds;    // Positive: (position, variable) first bound here
  std::vector<std::pair<int, int>> repeats;  // Positive: (position, variable) bound earlier in this atom
};

struct CRule {
  CAtom head;
  std::vector<Step> steps;
  std::vector<int> positive_rels;  // relation of each positive literal
  int variables = 0;
  std::string text;
};

enum class Phase : unsigned char { Static, State, Does };

struct Stratum {
  std::vector<int> rels;
  std::vector<int> rules;
  bool recursive = false;
  Phase phase = Phase::Static;
};

}  // namespace

void check_safety(const Document& doc) {
  for (const auto& r : doc.rules) {
    std::vector<std::string> bound, need;
    positive_variables(r, bound);
    collect_variables(r.head, need);
    for (const auto& l : r.body) {
      if (l.kind == Literal::Kind::Positive) continue;
      collect_variables(l.atom, need);
      collect_variables(l.rhs, need);
    }
    for (const auto& v : need)
      if (std::find(bound.begin(), bound.end(), v) == bound.end())
        throw ProgramError("unsafe rule, ?" + v + " is not bound by a positive literal: " + rule_text(r));
  }
}

void check_stratification(const Document& doc) {
  const Graph g = dependency_graph(doc);
  std::vector<int> comp_of(g.keys.size(), -1);
  const auto comps = components(g);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int v : comps[c]) comp_of[static_cast<std::size_t>(v)] = static_cast<int>(c);
  for (const auto& r : doc.rules) {
    const int h = g.index.at(atom_key(r.head));
    for (const auto& l : r.body) {
      if (l.kind != Literal::Kind::Negative) continue;
      const int b = g.index.at(atom_key(l.atom));
      if (comp_of[static_cast<std::size_t>(h)] == comp_of[static_cast<std::size_t>(b)])
        throw ProgramError("negation through recursion in rule: " + rule_text(r));
    }
  }
}

struct StateMachine::Impl {
  EvalMode mode;
  std::unordered_map<std::string, int> const_ids;
  std::vector<std::string> const_names;
  std::unordered_map<std::string, int> rel_ids;
  std::vector<std::string> rel_keys;
  std::vector<Term> rel_templates;  // leaves replaced by variables "0", "1", ...
  std::vector<std::string> rel_functor;
  mutable std::vector<Table> tables;
  std::vector<CRule> rules;
  std::vector<Stratum> strata;
  std::vector<Phase> rel_phase;
  std::vector<char> is_input;
  std::vector<Term> role_list;

  mutable std::optional<GdlState> loaded_state;
  mutable std::optional<std::vector<Term>> loaded_joint;
  mutable std::vector<Term> extra_inputs;  // state facts no rule mentions

  int intern(const std::string& name) {
    auto [it, fresh] = const_ids.emplace(name, static_cast<int>(const_names.size()));
    if (fresh) const_names.push_back(name);
    return it->second;
  }

  std::optional<int> find_const(const std::string& name) const {
    auto it = const_ids.find(name);
    if (it == const_ids.end()) return std::nullopt;
    return it->second;
  }

  int relation(const Term& atom) {
    std::string key;
    std::vector<const Term*> leaves;
    flatten(atom, key, leaves, true);
    auto [it, fresh] = rel_ids.emplace(key, static_cast<int>(rel_keys.size()));
    if (fresh) {
      rel_keys.push_back(key);
      int k = 0;
      std::function<Term(const Term&, bool)> tmpl = [&](const Term& t, bool top) -> Term {
        if (!is_atomic(t)) {
          std::vector<Term> args;
          for (const auto& a : t.args) args.push_back(tmpl(a, false));
          return Term::compound(t.name, std::move(args));
        }
        if (top) return Term::constant(t.name);
        return Term::variable(std::to_string(k++));
      };
      rel_templates.push_back(tmpl(atom, true));
      rel_functor.push_back(atom.name);
      tables.emplace_back(static_cast<int>(leaves.size()));
      is_input.push_back(atom.name == "true" || atom.name == "does");
    }
    return it->second;
  }

  CAtom compile_atom(const Term& atom, std::map<std::string, int>& vars) {
    CAtom a;
    std::string key;
    std::vector<const Term*> leaves;
    flatten(atom, key, leaves, true);
    a.rel = relation(atom);
    for (const Term* leaf : leaves) {
      if (leaf->is_variable()) {
        auto [it, fresh] = vars.emplace(leaf->name, static_cast<int>(vars.size()));
        a.args.push_back(-(it->second + 1));
      } else {
        a.args.push_back(intern(leaf->name));
      }
    }
    return a;
  }

  int compile_leaf(const Term& t, std::map<std::string, int>& vars, const Rule& r) {
    if (!is_atomic(t)) throw ProgramError("distinct on compound terms is not supported: " + rule_text(r));
    if (t.is_variable()) return -(vars.emplace(t.name, static_cast<int>(vars.size())).first->second + 1);
    return intern(t.name);
  }

  CRule compile_rule(const Rule& r) {
    CRule c;
    c.text = rule_text(r);
    std::map<std::string, int> vars;
    // Positive literals first fix variable numbering in body order.
    std::vector<CAtom> pos;
    std::vector<std::pair<const Literal*, CAtom>> pending;
    for (const auto& l : r.body) {
      if (l.kind == Literal::Kind::Positive) pos.push_back(compile_atom(l.atom, vars));
    }
    for (const auto& l : r.body) {
      if (l.kind == Literal::Kind::Negative) pending.emplace_back(&l, compile_atom(l.atom, vars));
      if (l.kind == Literal::Kind::Distinct) pending.emplace_back(&l, CAtom{});
    }
    c.head = compile_atom(r.head, vars);

    std::vector<char> bound(vars.size() + 1, 0);
    auto all_bound = [&](const std::vector<int>& args) {
      return std::all_of(args.begin(), args.end(), [&](int a) { return a >= 0 || bound[static_cast<std::size_t>(-a - 1)]; });
    };
    std::vector<char> placed(pending.size(), 0);
    auto place_checks = [&] {
      for (std::size_t i = 0; i < pending.size(); ++i) {
        if (placed[i]) continue;
        const Literal& l = *pending[i].first;
        Step s;
        s.kind = l.kind;
        if (l.kind == Literal::Kind::Negative) {
          if (!all_bound(pending[i].second.args)) continue;
          s.atom = pending[i].second;
        } else {
          s.lhs = compile_leaf(l.atom, vars, r);
          s.rhs = compile_leaf(l.rhs, vars, r);
          if (!all_bound({s.lhs, s.rhs})) continue;
        }
        placed[i] = 1;
        c.steps.push_back(std::move(s));
      }
    };
    place_checks();
    for (std::size_t k = 0; k < pos.size(); ++k) {
      Step s;
      s.kind = Literal::Kind::Positive;
      s.literal = static_cast<int>(k);
      s.atom = pos[k];
      std::vector<char> here(vars.size() + 1, 0);
      for (std::size_t i = 0; i < s.atom.args.size(); ++i) {
        const int a = s.atom.args[i];
        if (a >= 0 || bound[static_cast<std::size_t>(-a - 1)]) {
          s.mask |= 1u << i;
          continue;
        }
        const auto v = static_cast<std::size_t>(-a - 1);
        if (here[v]) {
          s.repeats.emplace_back(static_cast<int>(i), static_cast<int>(v));
        } else {
          here[v] = 1;
          s.binds.emplace_back(static_cast<int>(i), static_cast<int>(v));
        }
      }
      for (const auto& [i, v] : s.binds) bound[static_cast<std::size_t>(v)] = 1;
      c.positive_rels.push_back(s.atom.rel);
      c.steps.push_back(std::move(s));
      place_checks();
    }
    if (std::find(placed.begin(), placed.end(), 0) != placed.end())
      throw ProgramError("unsafe rule: " + c.text);
    c.variables = static_cast<int>(vars.size());
    return c;
  }

  void build(const Document& doc) {
    check_safety(doc);
    check_stratification(doc);
    std::set<std::string> var_paths, comp_paths;
    for (const auto& r : doc.rules) {
      if (r.head.name == "true" || r.head.name == "does")
        throw ProgramError("rules may not define '" + r.head.name + "': " + rule_text(r));
      record_paths(r.head, "", var_paths, comp_paths);
      for (const auto& l : r.body)
        if (l.kind != Literal::Kind::Distinct) record_paths(l.atom, "", var_paths, comp_paths);
    }
    for (const auto& p : var_paths)
      if (comp_paths.count(p))
        throw ProgramError("unsupported: a variable stands where compound terms occur (" + p + ")");

    for (const auto& r : doc.rules) rules.push_back(compile_rule(r));

    // Strata over relation ids.
    const int n = static_cast<int>(rel_keys.size());
    Graph g;
    for (int i = 0; i < n; ++i) g.node(rel_keys[static_cast<std::size_t>(i)]);
    for (const auto& c : rules)
      for (const auto& s : c.steps)
        if (s.kind != Literal::Kind::Distinct)
          g.edges[static_cast<std::size_t>(c.head.rel)].emplace_back(s.atom.rel, s.kind == Literal::Kind::Negative);
    rel_phase.assign(static_cast<std::size_t>(n), Phase::Static);
    for (int i = 0; i < n; ++i) {
      if (rel_functor[static_cast<std::size_t>(i)] == "true") rel_phase[static_cast<std::size_t>(i)] = Phase::State;
      if (rel_functor[static_cast<std::size_t>(i)] == "does") rel_phase[static_cast<std::size_t>(i)] = Phase::Does;
    }
    std::vector<int> comp_of(static_cast<std::size_t>(n), -1);
    for (const auto& comp : components(g)) {
      Stratum st;
      st.rels = comp;
      for (int v : comp) {
        for (const auto& [w, neg] : g.edges[static_cast<std::size_t>(v)]) {
          (void)neg;
          st.phase = std::max(st.phase, rel_phase[static_cast<std::size_t>(w)]);
          if (std::find(comp.begin(), comp.end(), w) != comp.end()) st.recursive = true;
        }
      }
      for (int v : comp) rel_phase[static_cast<std::size_t>(v)] = std::max(rel_phase[static_cast<std::size_t>(v)], st.phase);
      for (std::size_t k = 0; k < rules.size(); ++k)
        if (std::find(comp.begin(), comp.end(), rules[k].head.rel) != comp.end()) st.rules.push_back(static_cast<int>(k));
      if (!st.rules.empty()) strata.push_back(std::move(st));
    }
    for (const auto& st : strata) {
      for (int v : st.rels) {
        const std::string& f = rel_functor[static_cast<std::size_t>(v)];
        if ((f == "legal" || f == "goal" || f == "terminal") && st.phase == Phase::Does)
          throw ProgramError("'" + f + "' may not depend on does");
      }
    }
    evaluate(Phase::Static);
    for (std::size_t r = 0; r < rel_keys.size(); ++r) {
      if (rel_functor[r] != "role") continue;
      for (std::size_t i = 0; i < tables[r].size(); ++i) role_list.push_back(to_term(static_cast<int>(r), tables[r].row(i)));
    }
    for (auto& t : role_list) t = t.args.at(0);
    std::sort(role_list.begin(), role_list.end());
  }

  Term to_term(int rel, const int* row) const {
    std::function<Term(const Term&)> sub = [&](const Term& t) -> Term {
      if (t.is_variable()) return Term::constant(const_names[static_cast<std::size_t>(row[std::stoi(t.name)])]);
      if (t.kind == Term::Kind::Constant) return t;
      std::vector<Term> args;
      for (const auto& a : t.args) args.push_back(sub(a));
      return Term::compound(t.name, std::move(args));
    };
    return sub(rel_templates[static_cast<std::size_t>(rel)]);
  }

  // Join state for one rule evaluation.
  struct Pass {
    const CRule* rule = nullptr;
    int delta_literal = -1;
    const std::vector<std::pair<std::size_t, std::size_t>>* delta = nullptr;  // per relation
    std::vector<int> env;
    std::vector<int> scratch;
    std::vector<std::vector<int>>* pending = nullptr;  // per relation, flattened rows
  };

  int value(const Pass& p, int arg) const { return arg >= 0 ? arg : p.env[static_cast<std::size_t>(-arg - 1)]; }

  void run(Pass& p, std::size_t k) const {
    const CRule& r = *p.rule;
    if (k == r.steps.size()) {
      auto& out = (*p.pending)[static_cast<std::size_t>(r.head.rel)];
      for (int a : r.head.args) out.push_back(value(p, a));
      if (r.head.args.empty()) out.push_back(0);  // marker, committed as the empty row
      return;
    }
    const Step& s = r.steps[k];
    if (s.kind == Literal::Kind::Distinct) {
      if (value(p, s.lhs) != value(p, s.rhs)) run(p, k + 1);
      return;
    }
    Table& t = tables[static_cast<std::size_t>(s.atom.rel)];
    std::vector<int> probe(s.atom.args.size());
    const bool negative = s.kind == Literal::Kind::Negative;
    for (std::size_t i = 0; i < s.atom.args.size(); ++i)
      probe[i] = negative || (s.mask >> i) & 1u ? value(p, s.atom.args[i]) : 0;
    if (negative) {
      if (!t.contains(probe.data())) run(p, k + 1);
      return;
    }
    std::size_t lo = 0, hi = t.size();
    if (s.literal == p.delta_literal) {
      lo = (*p.delta)[static_cast<std::size_t>(s.atom.rel)].first;
      hi = (*p.delta)[static_cast<std::size_t>(s.atom.rel)].second;
    }
    auto visit = [&](std::size_t i) {
      const int* row = t.row(i);
      for (std::size_t a = 0; a < probe.size(); ++a)
        if ((s.mask >> a) & 1u && row[a] != probe[a]) return;
      for (const auto& [pos, v] : s.binds) p.env[static_cast<std::size_t>(v)] = row[pos];
      for (const auto& [pos, v] : s.repeats)
        if (p.env[static_cast<std::size_t>(v)] != row[pos]) return;
      run(p, k + 1);
    };
    if (s.mask == 0 || t.size() < 8) {
      for (std::size_t i = lo; i < hi; ++i) visit(i);
      return;
    }
    const auto* bucket = t.lookup(s.mask, probe.data());
    if (!bucket) return;
    for (std::uint32_t i : *bucket)
      if (i >= lo && i < hi) visit(i);
  }

  bool commit(std::vector<std::vector<int>>& pending) const {
    bool grew = false;
    for (std::size_t rel = 0; rel < pending.size(); ++rel) {
      auto& rows = pending[rel];
      if (rows.empty()) continue;
      Table& t = tables[rel];
      const std::size_t arity = static_cast<std::size_t>(t.arity());
      if (arity == 0) {
        static const int none = 0;
        grew |= t.insert(&none);
      } else {
        for (std::size_t i = 0; i < rows.size(); i += arity) grew |= t.insert(rows.data() + i);
      }
      rows.clear();
    }
    return grew;
  }

  void eval_stratum(const Stratum& st) const {
    std::vector<std::vector<int>> pending(tables.size());
    std::vector<std::pair<std::size_t, std::size_t>> delta(tables.size(), {0, 0});
    auto pass = [&](int rule_index, int delta_literal) {
      Pass p;
      p.rule = &rules[static_cast<std::size_t>(rule_index)];
      p.delta_literal = delta_literal;
      p.delta = &delta;
      p.env.assign(static_cast<std::size_t>(p.rule->variables), 0);
      p.pending = &pending;
      run(p, 0);
    };
    auto in_stratum = [&](int rel) { return std::find(st.rels.begin(), st.rels.end(), rel) != st.rels.end(); };

    if (mode == EvalMode::Naive || !st.recursive) {
      for (;;) {
        for (int ri : st.rules) pass(ri, -1);
        if (!commit(pending) || !st.recursive) break;
      }
      return;
    }
    std::vector<std::size_t> before(tables.size());
    for (int rel : st.rels) before[static_cast<std::size_t>(rel)] = tables[static_cast<std::size_t>(rel)].size();
    for (int ri : st.rules) pass(ri, -1);
    commit(pending);
    for (;;) {
      bool any = false;
      for (int rel : st.rels) {
        const std::size_t now = tables[static_cast<std::size_t>(rel)].size();
        delta[static_cast<std::size_t>(rel)] = {before[static_cast<std::size_t>(rel)], now};
        any |= now > before[static_cast<std::size_t>(rel)];
        before[static_cast<std::size_t>(rel)] = now;
      }
      if (!any) break;
      for (int ri : st.rules) {
        const CRule& r = rules[static_cast<std::size_t>(ri)];
        for (std::size_t k = 0; k < r.positive_rels.size(); ++k)
          if (in_stratum(r.positive_rels[k])) pass(ri, static_cast<int>(k));
      }
      commit(pending);
    }
  }

  void evaluate(Phase phase) const {
    for (const auto& st : strata)
      if (st.phase == phase) eval_stratum(st);
  }

  void clear_phase(Phase from) const {
    for (std::size_t r = 0; r < tables.size(); ++r)
      if (rel_phase[r] >= from) tables[r].clear();
  }

  void insert_ground(const Term& atom, bool remember_unknown) const {
    std::string key;
    std::vector<const Term*> leaves;
    flatten(atom, key, leaves, true);
    auto it = rel_ids.find(key);
    std::vector<int> row;
    bool known = it != rel_ids.end();
    for (const Term* l : leaves) {
      if (l->is_variable()) throw StateError("state and move terms must be ground: " + to_kif(atom));
      const auto id = find_const(l->name);
      if (!id) known = false;
      row.push_back(id.value_or(-1));
    }
    if (!known) {
      if (remember_unknown) extra_inputs.push_back(atom);
      return;
    }
    Table& t = tables[static_cast<std::size_t>(it->second)];
    if (t.arity() == 0) {
      static const int none = 0;
      t.insert(&none);
    } else {
      t.insert(row.data());
    }
  }

  void load_state(const GdlState& s) const {
    if (loaded_state && *loaded_state == s) return;
    clear_phase(Phase::State);
    extra_inputs.clear();
    for (const auto& f : s.facts) insert_ground(Term::compound("true", {f}), true);
    evaluate(Phase::State);
    loaded_state = s;
    loaded_joint.reset();
  }

  void load_joint(const std::vector<Term>& joint) const {
    if (loaded_joint && *loaded_joint == joint) return;
    if (joint.size() != role_list.size()) throw StateError("expected one move per role");
    clear_phase(Phase::Does);
    for (std::size_t i = 0; i < joint.size(); ++i) insert_ground(Term::compound("does", {role_list[i], joint[i]}), false);
    evaluate(Phase::Does);
    loaded_joint = joint;
  }

  std::vector<Term> rows_of(const std::string& functor) const {
    std::vector<Term> out;
    for (std::size_t r = 0; r < rel_keys.size(); ++r) {
      if (rel_functor[r] != functor) continue;
      const Table& t = tables[r];
      for (std::size_t i = 0; i < t.size(); ++i) out.push_back(to_term(static_cast<int>(r), t.row(i)));
    }
    return out;
  }
};

StateMachine::StateMachine(const Document& doc, EvalMode mode) : impl_(std::make_unique<Impl>()) {
  impl_->mode = mode;
  impl_->build(doc);
}

StateMachine::~StateMachine() = default;
StateMachine::StateMachine(StateMachine&&) noexcept = default;
StateMachine& StateMachine::operator=(StateMachine&&) noexcept = default;

StateMachine StateMachine::from_kif(const std::string& text, EvalMode mode) {
  return StateMachine(parse_document(text), mode);
}

const std::vector<Term>& StateMachine::roles() const { return impl_->role_list; }

namespace {
GdlState normalized(std::vector<Term> facts) {
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
  return GdlState{std::move(facts)};
}
}  // namespace

GdlState StateMachine::initial_state() const {
  std::vector<Term> facts;
  for (auto& t : impl_->rows_of("init")) facts.push_back(t.args.at(0));
  return normalized(std::move(facts));
}

std::vector<Term> StateMachine::legal(const GdlState& state, const Term& role) const {
  impl_->load_state(state);
  std::vector<Term> out;
  for (auto& t : impl_->rows_of("legal"))
    if (t.args.size() == 2 && t.args[0] == role) out.push_back(t.args[1]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GdlState StateMachine::next(const GdlState& state, const std::vector<Term>& joint) const {
  impl_->load_state(state);
  impl_->load_joint(joint);
  std::vector<Term> facts;
  for (auto& t : impl_->rows_of("next")) facts.push_back(t.args.at(0));
  return normalized(std::move(facts));
}

bool StateMachine::terminal(const GdlState& state) const {
  impl_->load_state(state);
  return !impl_->rows_of("terminal").empty();
}

int StateMachine::goal(const GdlState& state, const Term& role) const {
  impl_->load_state(state);
  std::vector<int> values;
  for (auto& t : impl_->rows_of("goal"))
    if (t.args.size() == 2 && t.args[0] == role) values.push_back(std::stoi(t.args[1].name));
  if (values.size() != 1)
    throw StateError("goal of " + to_kif(role) + " is " + (values.empty() ? "undefined" : "ambiguous"));
  return values.front();
}

std::vector<Term> StateMachine::model(const GdlState& state, const std::vector<Term>& joint) const {
  impl_->load_state(state);
  if (!joint.empty()) impl_->load_joint(joint);
  std::vector<Term> out;
  for (std::size_t r = 0; r < impl_->rel_keys.size(); ++r) {
    if (joint.empty() && impl_->rel_phase[r] == Phase::Does) continue;
    const Table& t = impl_->tables[r];
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(impl_->to_term(static_cast<int>(r), t.row(i)));
  }
  out.insert(out.end(), impl_->extra_inputs.begin(), impl_->extra_inputs.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t StateMachine::stratum_count() const { return impl_->strata.size(); }

Trace random_playthrough(const StateMachine& m, std::uint64_t seed, int max_plies) {
  Rng rng(seed);
  Trace tr;
  GdlState s = m.initial_state();
  for (int ply = 0;; ++ply) {
    TraceStep step;
    step.state = s;
    for (const auto& r : m.roles()) step.legal.push_back(m.legal(s, r));
    if (m.terminal(s)) {
      tr.terminal = true;
      for (const auto& r : m.roles()) tr.goals.push_back(m.goal(s, r));
      tr.steps.push_back(std::move(step));
      break;
    }
    if (ply >= max_plies) {
      tr.steps.push_back(std::move(step));
      break;
    }
    bool stuck = false;
    for (const auto& options : step.legal) {
      if (options.empty()) {
        stuck = true;
        break;
      }
      step.joint.push_back(options[rng.index(options.size())]);
    }
    if (stuck) {
      step.joint.clear();
      tr.steps.push_back(std::move(step));
      break;
    }
    GdlState next = m.next(s, step.joint);
    tr.steps.push_back(std::move(step));
    s = std::move(next);
  }
  return tr;
}

void write_trace_jsonl(const Trace& trace, std::ostream& out) {
  using nlohmann::json;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    json j;
    j["ply"] = i;
    json facts = json::array();
    for (const auto& f : s.state.facts) facts.push_back(to_kif(f));
    j["state"] = facts;
    json legal = json::array();
    for (const auto& options : s.legal) {
      json l = json::array();
      for (const auto& m : options) l.push_back(to_kif(m));
      legal.push_back(l);
    }
    j["legal"] = legal;
    json joint = json::array();
    for (const auto& m : s.joint) joint.push_back(to_kif(m));
    j["joint"] = joint;
    if (i + 1 == trace.steps.size() && trace.terminal) j["goals"] = trace.goals;
    out << j.dump() << '\n';
  }
}

}  // namespace sbg::gdl
