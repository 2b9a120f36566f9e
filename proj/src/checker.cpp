// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <functional>

#include "qsc/oracle.hpp"
#include "qsc/simplex.hpp"

namespace qsc {

namespace {

TemplateSet templates_from_instance(const CertificateInstance& inst) {
  TemplateSet t;
  t.values = inst.values;
  t.invariant = inst.invariant;
  t.eps = Polynomial(inst.eps);
  t.bigm = Polynomial(inst.bigm);
  return t;
}

ProductModel substitute_control(const ProductModel& p, const std::map<std::string, Rat>& kappa) {
  ProductModel out = p;
  std::map<Symbol, Rat> by_symbol;
  for (auto& [s, b] : p.base.control_box) {
    auto it = kappa.find(sym_name(s));
    if (it == kappa.end())
      throw std::runtime_error("certificate is missing a value for control parameter '" +
                               sym_name(s) + "'");
    by_symbol[s] = it->second;
  }
  auto subst = [&](std::vector<Command>& cmds) {
    for (auto& c : cmds)
      for (auto& b : c.branches) b.weight = b.weight.substitute_values(by_symbol);
  };
  subst(out.base.commands);
  for (auto& qcmds : out.commands)
    for (auto& pc : qcmds)
      for (auto& b : pc.branches) b.weight = b.weight.substitute_values(by_symbol);
  out.base.control_box.clear();
  return out;
}

struct GridRange {
  Symbol v;
  long lo, hi;
};

}  // namespace

Verdict check_certificate(const CertificateInstance& inst, const ProductModel& p0,
                          const CheckOptions& opt) {
  Verdict verdict;

  // Structural fit between certificate and specification automaton.
  if (inst.state_names.size() != static_cast<size_t>(p0.automaton.state_count()))
    throw std::runtime_error("certificate automaton states do not match the specification (" +
                             std::to_string(inst.state_names.size()) + " vs " +
                             std::to_string(p0.automaton.state_count()) + ")");
  for (int q = 0; q < p0.automaton.state_count(); ++q)
    if (inst.state_names[q] != p0.automaton.state_names[q])
      throw std::runtime_error("certificate state '" + inst.state_names[q] +
                               "' does not match automaton state '" +
                               p0.automaton.state_names[q] + "'");
  if (inst.values.size() != p0.automaton.pairs.size() + 1)
    throw std::runtime_error("certificate must provide V_0..V_k for k = " +
                             std::to_string(p0.automaton.pairs.size()) + " pairs");

  if (inst.eps.sign() <= 0 || inst.bigm.sign() <= 0) {
    verdict.status = Verdict::Status::Violated;
    verdict.detail = "margins: eps and M must be positive";
    return verdict;
  }

  ProductModel p = p0.base.has_controls() ? substitute_control(p0, inst.kappa) : p0;
  // Weight range at the chosen parameter.
  for (auto& cmd : p.base.commands)
    for (auto& b : cmd.branches) {
      if (!b.weight.is_constant())
        throw std::runtime_error("internal: weights still symbolic after substitution");
      Rat w = b.weight.constant_value();
      if (w.sign() < 0 || w > Rat(1)) {
        verdict.status = Verdict::Status::Violated;
        verdict.detail = "branch weight " + w.to_string() + " outside [0,1] at the certificate's "
                         "control parameter";
        return verdict;
      }
    }

  TemplateSet t = templates_from_instance(inst);
  SystemOptions sopt;
  sopt.frame = opt.frame;
  sopt.eps_min = Rat(0);
  sopt.m_max = inst.bigm + Rat(1);
  sopt.target_p = Polynomial(inst.bound_p);
  sopt.prefix = "chk_";
  ConstraintSystem sys;
  try {
    sys = generate_system(p, t, sopt);
  } catch (const std::exception& e) {
    verdict.status = Verdict::Status::Violated;
    verdict.detail = e.what();
    return verdict;
  }

  // Side constraints are fully numeric now.
  for (auto& sc : sys.sides) {
    if (!sc.expr.is_constant())
      throw std::runtime_error("internal: symbolic side constraint in certificate check (" +
                               sc.tag + ")");
    Rat v = sc.expr.constant_value();
    if (v.sign() < 0 || (sc.strict && v.is_zero())) {
      verdict.status = Verdict::Status::Violated;
      verdict.detail = "side condition '" + sc.tag + "' fails (" + v.to_string() + ")";
      if (sc.tag == "target")
        for (auto& [s, x0] : p.base.initial) verdict.witness[sym_name(s)] = x0;
      return verdict;
    }
  }

  bool inconclusive = false;
  std::string inconclusive_why;
  for (size_t ii = 0; ii < sys.implications.size(); ++ii) {
    const Implication& imp = sys.implications[ii];

    // Tier (a): exact rational LP feasibility of the multiplier identity.
    ConstraintSystem scratch;
    relax_implication(imp, std::max(1u, inst.handelman_degree), "chk" + std::to_string(ii) + "_",
                      ii, scratch);
    std::map<Symbol, size_t> col;
    for (auto s : scratch.lambdas) col.emplace(s, col.size());
    std::vector<std::vector<Rat>> A;
    std::vector<Rat> b;
    bool linear = true;
    for (auto& [ctx, eq] : scratch.equations) {
      std::vector<Rat> row(col.size(), Rat(0));
      Rat rhs(0);
      for (auto& [mono, coeff] : eq.terms()) {
        if (mono.factors.empty()) {
          rhs = -coeff;  // claim part moves to the right-hand side
        } else if (mono.factors.size() == 1 && mono.factors[0].second == 1 &&
                   col.count(mono.factors[0].first)) {
          row[col.at(mono.factors[0].first)] = coeff;
        } else {
          linear = false;
        }
      }
      // eq: rhs0 + sum coeff*lambda = 0  ->  sum (-coeff)*lambda = rhs0
      for (auto& v : row) v = -v;
      A.push_back(std::move(row));
      b.push_back(-rhs);
    }
    if (linear && nonneg_solve(A, b)) continue;  // proven

    // Tier (b): exhaustive integer evaluation on the domain.
    std::vector<GridRange> ranges;
    bool grid_ok = true;
    for (auto& sv : p.base.space.variables) {
      if (sv.kind != VarKind::Integer) {
        grid_ok = false;
        inconclusive_why = "real-valued variable '" + sv.name + "' prevents grid checking";
        break;
      }
      if (!imp.claim.uses(sv.symbol) && !(imp.exp_t && imp.exp_var == sv.symbol)) {
        bool in_domain = false;
        for (auto& c : imp.domain.cs)
          if (c.expr.uses(sv.symbol)) in_domain = true;
        if (!in_domain) continue;
      }
      Polyhedron numeric;
      for (auto& c : imp.domain.cs) {
        bool num = true;
        for (auto s : c.expr.variables()) {
          if (!imp.domain_vars.count(s)) num = false;
          if (imp.exp_t && s == *imp.exp_t) num = false;
        }
        if (num) numeric.add(c);
      }
      VarBounds vb = implied_bounds(numeric, sv.symbol);
      if (!vb.lo || !vb.hi) {
        grid_ok = false;
        inconclusive_why = "variable '" + sv.name + "' unbounded in [" + imp.tag + " " +
                           imp.context + "]";
        break;
      }
      ranges.push_back({sv.symbol, vb.lo->ceil().get_si(), vb.hi->floor().get_si()});
    }
    long points = 1;
    if (grid_ok)
      for (auto& r : ranges) {
        if (r.hi < r.lo) {
          points = 0;
          break;
        }
        points *= (r.hi - r.lo + 1);
        if (points > opt.grid_cap) {
          grid_ok = false;
          inconclusive_why = "grid cap exceeded on [" + imp.tag + " " + imp.context + "]";
          break;
        }
      }
    if (!grid_ok) {
      inconclusive = true;
      continue;
    }

    bool violated = false;
    std::map<Symbol, Rat> witness;
    std::vector<long> cur(ranges.size());
    std::function<void(size_t)> walk = [&](size_t idx) {
      if (violated) return;
      if (idx == ranges.size()) {
        std::map<Symbol, Rat> point;
        for (size_t j = 0; j < ranges.size(); ++j) point[ranges[j].v] = Rat(cur[j]);
        // Check domain membership exactly (non-numeric facets are concrete
        // here except for t facets, which the curve value satisfies).
        std::map<Symbol, Rat> full = point;
        if (imp.exp_t) {
          Rat power = point.at(imp.exp_var) - imp.exp_offset;
          full[*imp.exp_t] = imp.exp_base.constant_value().pow(power.num().get_si());
        }
        for (auto& c : imp.domain.cs) {
          bool evaluable = true;
          for (auto s : c.expr.variables())
            if (!full.count(s)) evaluable = false;
          if (!evaluable) continue;
          Rat v = c.expr.evaluate(full);
          if (c.strict ? v.sign() <= 0 : v.sign() < 0) return;  // outside domain
        }
        Rat v = imp.claim.evaluate(full);
        if (v.sign() < 0) {
          violated = true;
          witness = point;
        }
        return;
      }
      for (long x = ranges[idx].lo; x <= ranges[idx].hi && !violated; ++x) {
        cur[idx] = x;
        walk(idx + 1);
      }
    };
    walk(0);
    if (violated) {
      verdict.status = Verdict::Status::Violated;
      verdict.detail = imp.tag + " at " + imp.context;
      for (auto& [s, v] : witness) verdict.witness[sym_name(s)] = v;
      return verdict;
    }
    verdict.warnings.push_back("implication [" + imp.tag + " " + imp.context +
                               "] verified by exhaustive integer evaluation (" +
                               std::to_string(points) +
                               " points); multiplier degree was insufficient");
  }

  if (inconclusive) {
    verdict.status = Verdict::Status::Inconclusive;
    verdict.detail = inconclusive_why;
    return verdict;
  }
  verdict.status = Verdict::Status::Valid;
  return verdict;
}

}  // namespace qsc
