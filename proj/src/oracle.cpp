// SPDX-License-Identifier: Apache-2.0
#include "qsc/oracle.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <sstream>

#include "qsc/simplex.hpp"

namespace qsc {

bool FiniteChain::in_f(size_t pair, int s) const {
  if (s == boundary_accept) return false;
  if (s == boundary_reject) return pair == 0;
  return pairs[pair].fset.count(autostate[s]) > 0;
}

bool FiniteChain::in_g(size_t pair, int s) const {
  if (s == boundary_accept) return true;
  if (s == boundary_reject) return false;
  return pairs[pair].gset.count(autostate[s]) > 0;
}

std::optional<int> FiniteChain::index_of(const std::map<Symbol, Rat>& val, int q) const {
  std::vector<long> key;
  for (auto v : vars_) {
    auto it = val.find(v);
    if (it == val.end() || !it->second.is_integer()) return std::nullopt;
    key.push_back(it->second.num().get_si());
  }
  key.push_back(q);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FiniteChain truncate(const ProductModel& p, const std::map<Symbol, std::pair<long, long>>& box,
                     const std::map<std::string, Rat>& kappa, BoundaryMode mode) {
  for (auto& v : p.base.space.variables) {
    if (v.kind != VarKind::Integer)
      throw std::runtime_error("truncation oracle supports integer-valued variables only ('" +
                               v.name + "' is real)");
    if (!box.count(v.symbol))
      throw std::runtime_error("truncation box is missing variable '" + v.name + "'");
  }
  std::map<Symbol, Rat> kappa_by_symbol;
  for (auto& [s, b] : p.base.control_box) {
    auto it = kappa.find(sym_name(s));
    if (it == kappa.end())
      throw std::runtime_error("truncation needs a value for control parameter '" + sym_name(s) +
                               "'");
    if (it->second < b.first || it->second > b.second)
      throw std::runtime_error("control parameter '" + sym_name(s) + "' outside its box");
    kappa_by_symbol[s] = it->second;
  }

  FiniteChain c;
  c.pairs = p.automaton.pairs;
  for (auto& v : p.base.space.variables) c.vars_.push_back(v.symbol);

  // Enumerate box valuations times automaton states.
  std::vector<std::vector<long>> grids(c.vars_.size());
  for (size_t i = 0; i < c.vars_.size(); ++i) {
    auto [lo, hi] = box.at(c.vars_[i]);
    if (lo > hi) throw std::runtime_error("empty truncation box");
    for (long x = lo; x <= hi; ++x) grids[i].push_back(x);
  }
  std::vector<size_t> cursor(c.vars_.size(), 0);
  for (;;) {
    std::map<Symbol, Rat> val;
    std::vector<long> key;
    for (size_t i = 0; i < c.vars_.size(); ++i) {
      val[c.vars_[i]] = Rat(grids[i][cursor[i]]);
      key.push_back(grids[i][cursor[i]]);
    }
    for (int q = 0; q < p.automaton.state_count(); ++q) {
      std::vector<long> k = key;
      k.push_back(q);
      c.index_[k] = static_cast<int>(c.valuation.size());
      c.valuation.push_back(val);
      c.autostate.push_back(q);
    }
    size_t i = 0;
    while (i < cursor.size() && ++cursor[i] == grids[i].size()) cursor[i++] = 0;
    if (i == cursor.size()) break;
    if (cursor.empty()) break;
  }
  if (c.vars_.empty()) throw std::runtime_error("truncation needs at least one variable");

  int n = static_cast<int>(c.valuation.size());
  c.boundary_accept = n;
  c.boundary_reject = n + 1;
  c.trans.resize(n + 2);
  c.trans[n] = {{n, Rat(1)}};
  c.trans[n + 1] = {{n + 1, Rat(1)}};

  auto sinks = analyze_sinks(p);
  {
    std::vector<long> k;
    for (auto v : c.vars_) k.push_back(p.base.initial.at(v).num().get_si());
    k.push_back(p.automaton.initial);
    auto it = c.index_.find(k);
    if (it == c.index_.end())
      throw std::runtime_error("truncation box does not contain the initial state");
    c.initial = it->second;
  }

  for (int s = 0; s < n; ++s) {
    const auto& val = c.valuation[s];
    int q = c.autostate[s];
    int q_next = p.automaton.step(q, val);
    size_t ci = p.base.firing_command(val);
    std::map<int, Rat> row;
    for (auto& b : p.base.commands[ci].branches) {
      Rat w = b.weight.evaluate(kappa_by_symbol);
      if (w.is_zero()) continue;
      if (w.sign() < 0) throw std::runtime_error("negative branch weight at the chosen parameter");
      std::vector<long> k;
      bool inside = true;
      std::map<Symbol, Rat> nval;
      for (auto v : c.vars_) {
        Rat nx = b.update_of(v).evaluate(val);
        if (!nx.is_integer()) throw std::runtime_error("non-integer update in integer model");
        long xi = nx.num().get_si();
        auto [lo, hi] = box.at(v);
        if (xi < lo || xi > hi) inside = false;
        k.push_back(xi);
      }
      int target;
      if (inside) {
        k.push_back(q_next);
        target = c.index_.at(k);
      } else if (sinks[q_next] == SinkStatus::SurelyAccepting) {
        target = c.boundary_accept;
      } else if (sinks[q_next] == SinkStatus::SurelyRejecting) {
        target = c.boundary_reject;
      } else {
        target = mode == BoundaryMode::Optimistic ? c.boundary_accept : c.boundary_reject;
      }
      row[target] += w;
    }
    Rat sum(0);
    for (auto& [t2, w] : row) sum += w;
    if (sum != Rat(1)) throw std::runtime_error("branch weights do not sum to 1 at a state");
    c.trans[s] = {row.begin(), row.end()};
  }
  return c;
}

namespace {

// Iterative Tarjan SCC over the support graph; returns component ids in
// reverse topological order of discovery (ids arbitrary).
std::vector<int> scc_components(const FiniteChain& c, int& count) {
  int n = static_cast<int>(c.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> onstack(n, false);
  std::vector<int> stack;
  int next_index = 0;
  count = 0;
  struct Frame {
    int v;
    size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    onstack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < c.trans[f.v].size()) {
        int w = c.trans[f.v][f.edge++].first;
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          onstack[w] = true;
          call.push_back({w, 0});
        } else if (onstack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            onstack[w] = false;
            comp[w] = count;
            if (w == f.v) break;
          }
          ++count;
        }
        int v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  return comp;
}

// Sparse exact Gaussian elimination for (I - Q) x = b over the transient
// states; natural order keeps walk-shaped chains banded.
std::vector<Rat> solve_transient(const std::vector<std::vector<std::pair<int, Rat>>>& rows,
                                 std::vector<Rat> b) {
  int m = static_cast<int>(rows.size());
  std::vector<std::map<int, Rat>> a(m);
  for (int i = 0; i < m; ++i)
    for (auto& [j, v] : rows[i])
      if (!v.is_zero()) a[i][j] = v;
  std::vector<std::set<int>> col_rows(m);
  for (int i = 0; i < m; ++i)
    for (auto& [j, v] : a[i]) col_rows[j].insert(i);

  for (int j = 0; j < m; ++j) {
    // Pivot: prefer row j itself; otherwise any later row with a[j] != 0.
    int piv = -1;
    if (a[j].count(j)) {
      piv = j;
    } else {
      for (int r : col_rows[j])
        if (r > j) {
          piv = r;
          break;
        }
    }
    if (piv == -1) throw std::runtime_error("singular transient system");
    if (piv != j) {
      std::swap(a[piv], a[j]);
      std::swap(b[piv], b[j]);
      for (auto& cr : col_rows) {
        bool hasj = cr.count(j), hasp = cr.count(piv);
        if (hasj != hasp) {
          if (hasj) {
            cr.erase(j);
            cr.insert(piv);
          } else {
            cr.erase(piv);
            cr.insert(j);
          }
        }
      }
    }
    Rat pivval = a[j].at(j);
    std::vector<int> touch(col_rows[j].begin(), col_rows[j].end());
    for (int i : touch) {
      if (i <= j) continue;
      auto it = a[i].find(j);
      if (it == a[i].end()) continue;
      Rat f = it->second / pivval;
      a[i].erase(it);
      col_rows[j].erase(i);
      for (auto& [jj, v] : a[j]) {
        if (jj == j) continue;
        auto r = a[i].emplace(jj, Rat(0));
        r.first->second -= f * v;
        if (r.first->second.is_zero()) {
          a[i].erase(r.first);
          col_rows[jj].erase(i);
        } else if (r.second) {
          col_rows[jj].insert(i);
        }
      }
      b[i] -= f * b[j];
    }
  }
  std::vector<Rat> x(m, Rat(0));
  for (int i = m - 1; i >= 0; --i) {
    Rat s = b[i];
    for (auto& [j, v] : a[i])
      if (j > i) s -= v * x[j];
    x[i] = s / a[i].at(i);
  }
  return x;
}

std::vector<Rat> probabilities(const FiniteChain& c) {
  int n = static_cast<int>(c.size());
  int ncomp = 0;
  std::vector<int> comp = scc_components(c, ncomp);
  // Bottom components: no edge leaving the component.
  std::vector<bool> bottom(ncomp, true);
  for (int s = 0; s < n; ++s)
    for (auto& [t, w] : c.trans[s])
      if (comp[t] != comp[s]) bottom[comp[s]] = false;
  // Acceptance per bottom component.
  std::vector<char> comp_accepting(ncomp, 0);
  for (int k = 0; k < ncomp; ++k) comp_accepting[k] = bottom[k] ? 1 : 0;
  for (size_t i = 0; i < c.pairs.size(); ++i) {
    std::vector<char> sees_f(ncomp, 0), sees_g(ncomp, 0);
    for (int s = 0; s < n; ++s) {
      if (c.in_f(i, s)) sees_f[comp[s]] = 1;
      if (c.in_g(i, s)) sees_g[comp[s]] = 1;
    }
    for (int k = 0; k < ncomp; ++k)
      if (bottom[k] && sees_f[k] && !sees_g[k]) comp_accepting[k] = 0;
  }

  std::vector<Rat> prob(n, Rat(0));
  std::vector<int> transient_index(n, -1);
  std::vector<int> transient;
  for (int s = 0; s < n; ++s) {
    if (bottom[comp[s]]) {
      prob[s] = comp_accepting[comp[s]] ? Rat(1) : Rat(0);
    } else {
      transient_index[s] = static_cast<int>(transient.size());
      transient.push_back(s);
    }
  }
  if (!transient.empty()) {
    std::vector<std::vector<std::pair<int, Rat>>> rows(transient.size());
    std::vector<Rat> rhs(transient.size(), Rat(0));
    for (size_t i = 0; i < transient.size(); ++i) {
      int s = transient[i];
      std::map<int, Rat> row;
      row[static_cast<int>(i)] = Rat(1);
      for (auto& [t, w] : c.trans[s]) {
        if (transient_index[t] >= 0)
          row[transient_index[t]] -= w;
        else
          rhs[i] += w * prob[t];
      }
      rows[i] = {row.begin(), row.end()};
    }
    std::vector<Rat> x = solve_transient(rows, rhs);
    for (size_t i = 0; i < transient.size(); ++i) prob[transient[i]] = x[i];
  }
  return prob;
}

}  // namespace

std::vector<Rat> state_probabilities(const FiniteChain& c) { return probabilities(c); }

Rat exact_probability(const FiniteChain& c) { return probabilities(c)[c.initial]; }

ExactInvariant exact_invariant(const FiniteChain& c) {
  std::vector<Rat> prob = probabilities(c);
  int n = static_cast<int>(c.size());
  ExactInvariant out;
  out.members.assign(n, false);
  for (int s = 0; s < n; ++s) out.members[s] = prob[s].sign() > 0;
  if (!out.members[c.initial]) {
    out.stay_probability = Rat(0);
    return out;
  }
  // Escape probability: reach the complement of I. Members inside a bottom
  // component never escape (their whole component has positive probability,
  // hence probability 1, hence lies in I); only transient members are solved.
  int ncomp = 0;
  std::vector<int> comp = scc_components(c, ncomp);
  std::vector<bool> bottom(ncomp, true);
  for (int s = 0; s < n; ++s)
    for (auto& [t, w] : c.trans[s])
      if (comp[t] != comp[s]) bottom[comp[s]] = false;

  std::vector<Rat> esc(n, Rat(0));
  for (int s = 0; s < n; ++s)
    if (!out.members[s]) esc[s] = Rat(1);

  std::vector<int> tindex(n, -1);
  std::vector<int> solve_states;
  for (int s = 0; s < n; ++s)
    if (out.members[s] && !bottom[comp[s]]) {
      tindex[s] = static_cast<int>(solve_states.size());
      solve_states.push_back(s);
    }
  if (!solve_states.empty()) {
    std::vector<std::vector<std::pair<int, Rat>>> rows(solve_states.size());
    std::vector<Rat> rhs(solve_states.size(), Rat(0));
    for (size_t i = 0; i < solve_states.size(); ++i) {
      int s = solve_states[i];
      std::map<int, Rat> row;
      row[static_cast<int>(i)] = Rat(1);
      for (auto& [t, w] : c.trans[s]) {
        if (tindex[t] >= 0)
          row[tindex[t]] -= w;
        else
          rhs[i] += w * esc[t];
      }
      rows[i] = {row.begin(), row.end()};
    }
    std::vector<Rat> x = solve_transient(rows, rhs);
    for (size_t i = 0; i < solve_states.size(); ++i) esc[solve_states[i]] = x[i];
  }
  out.stay_probability = Rat(1) - esc[c.initial];
  return out;
}

SimulationStats simulate(const ProductModel& p, const std::map<std::string, Rat>& kappa,
                         size_t n_traj, size_t horizon, std::uint64_t seed,
                         const FiniteChain* chain, std::ostream* csv) {
  SimulationStats st;
  st.trajectories = n_traj;
  st.horizon = horizon;
  std::map<Symbol, Rat> kmap;
  for (auto& [s, b] : p.base.control_box) {
    auto it = kappa.find(sym_name(s));
    if (it == kappa.end())
      throw std::runtime_error("simulation needs a value for control parameter '" + sym_name(s) +
                               "'");
    kmap[s] = it->second;
  }
  std::vector<Rat> prob;
  if (chain) prob = state_probabilities(*chain);

  auto prob_at = [&](const std::map<Symbol, Rat>& val, int q) -> Rat {
    if (!chain) return Rat(0);
    auto idx = chain->index_of(val, q);
    if (idx) return prob[*idx];
    return Rat(0);  // outside the solved box
  };

  size_t cols = std::min<size_t>(n_traj, 10);
  std::vector<std::vector<double>> traces(cols);
  std::vector<double> sum(horizon + 1, 0.0), sumsq(horizon + 1, 0.0);

  for (size_t tr = 0; tr < n_traj; ++tr) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (tr + 1));
    std::map<Symbol, Rat> state = p.base.initial;
    int q = p.automaton.initial;
    for (size_t n = 0; n <= horizon; ++n) {
      double v = prob_at(state, q).to_double();
      if (tr < cols) traces[tr].push_back(v);
      sum[n] += v;
      sumsq[n] += v * v;
      if (n == horizon) break;
      auto [nstate, nq] = p.step(state, q, kmap, rng);
      state = std::move(nstate);
      q = nq;
    }
  }
  if (chain) st.initial_probability = prob[chain->initial];
  st.step_mean.resize(horizon + 1);
  st.step_stderr.resize(horizon + 1);
  for (size_t n = 0; n <= horizon; ++n) {
    double mean = sum[n] / static_cast<double>(n_traj);
    double variance =
        std::max(0.0, sumsq[n] / static_cast<double>(n_traj) - mean * mean);
    st.step_mean[n] = mean;
    st.step_stderr[n] = std::sqrt(variance / static_cast<double>(n_traj));
    double dev = std::abs(mean - st.step_mean[0]);
    if (dev > st.max_abs_dev) st.max_abs_dev = dev;
    if (st.step_stderr[n] > 0 && dev / st.step_stderr[n] > st.max_dev_sigmas)
      st.max_dev_sigmas = dev / st.step_stderr[n];
  }
  if (csv) {
    *csv << "n";
    for (size_t i = 0; i < cols; ++i) *csv << ",s" << (i + 1);
    *csv << ",mean\n";
    for (size_t n = 0; n <= horizon; ++n) {
      *csv << n;
      for (size_t i = 0; i < cols; ++i) *csv << "," << traces[i][n];
      *csv << "," << st.step_mean[n] << "\n";
    }
  }
  return st;
}

}  // namespace qsc
