// SPDX-License-Identifier: Apache-2.0
#include "qsc/product.hpp"

namespace qsc {

const ProductCommand& ProductModel::firing(const std::map<Symbol, Rat>& state, int q) const {
  for (auto& pc : commands[q]) {
    bool hold = true;
    for (auto& c : pc.domain.cs) {
      Rat v = c.expr.evaluate(state);
      if (c.strict ? v.sign() <= 0 : v.sign() < 0) {
        hold = false;
        break;
      }
    }
    if (hold) return pc;
  }
  throw std::runtime_error("product kernel not total at automaton state " +
                           automaton.state_names[q]);
}

std::pair<std::map<Symbol, Rat>, int> ProductModel::step(const std::map<Symbol, Rat>& state, int q,
                                                         const std::map<Symbol, Rat>& kappa,
                                                         std::mt19937_64& rng) const {
  int q_next = automaton.step(q, state);
  return {sample_step(base, state, kappa, rng), q_next};
}

ProductModel compose(Model m, Dsa a) {
  ProductModel p;
  p.base = std::move(m);
  p.automaton = std::move(a);

  const Polyhedron facts = p.base.space.domain_facts();
  const std::set<Symbol> int_vars = p.base.space.integer_symbols();

  // First-match cells of the model commands (within the declared domain).
  struct ModelCell {
    Polyhedron extra;  // constraints beyond the domain facts
    size_t cmd;
  };
  std::vector<ModelCell> model_cells;
  {
    std::vector<GuardPtr> earlier;
    for (size_t j = 0; j < p.base.commands.size(); ++j) {
      for (auto& cell : first_match_cells(p.base.commands[j].guard, earlier, facts, int_vars)) {
        ModelCell mc;
        mc.cmd = j;
        mc.extra.cs.assign(cell.cs.begin() + facts.cs.size(), cell.cs.end());
        model_cells.push_back(std::move(mc));
      }
      earlier.push_back(p.base.commands[j].guard);
    }
  }

  p.commands.resize(p.automaton.state_count());
  for (int q = 0; q < p.automaton.state_count(); ++q) {
    std::vector<GuardPtr> earlier;
    for (auto& edge : p.automaton.edges[q]) {
      for (auto& lcell : first_match_cells(edge.guard, earlier, facts, int_vars)) {
        for (auto& mc : model_cells) {
          Polyhedron dom = lcell;
          dom.add_all(mc.extra);
          if (!feasible(dom)) continue;
          ProductCommand pc;
          pc.domain = std::move(dom);
          pc.q_next = edge.target;
          pc.branches = p.base.commands[mc.cmd].branches;
          pc.model_command = mc.cmd;
          p.commands[q].push_back(std::move(pc));
        }
      }
      earlier.push_back(edge.guard);
    }
  }
  return p;
}

ModeTable classify_modes(const ProductModel& p) {
  ModeTable t;
  t.mode.resize(p.automaton.pairs.size());
  for (size_t i = 0; i < p.automaton.pairs.size(); ++i) {
    auto& pr = p.automaton.pairs[i];
    t.mode[i].resize(p.automaton.state_count());
    for (int q = 0; q < p.automaton.state_count(); ++q) {
      if (pr.gset.count(q))
        t.mode[i][q] = Mode::Inc;
      else if (pr.fset.count(q))
        t.mode[i][q] = Mode::Dec;
      else
        t.mode[i][q] = Mode::NonInc;
    }
  }
  return t;
}

std::vector<SinkStatus> analyze_sinks(const ProductModel& p) {
  std::vector<SinkStatus> out(p.automaton.state_count(), SinkStatus::Neither);
  for (int q = 0; q < p.automaton.state_count(); ++q) {
    bool sink = true;
    for (auto& e : p.automaton.edges[q])
      if (e.target != q) sink = false;
    if (!sink) continue;
    bool rejecting = false;
    for (auto& pr : p.automaton.pairs)
      if (pr.fset.count(q) && !pr.gset.count(q)) rejecting = true;
    out[q] = rejecting ? SinkStatus::SurelyRejecting : SinkStatus::SurelyAccepting;
  }
  return out;
}

}  // namespace qsc
