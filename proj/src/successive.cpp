#include "regconv/successive.hpp"

#include <algorithm>
#include <cmath>

#include "regconv/kahan.hpp"

namespace regconv {

SummationPlan SummationPlan::uniform(int m, std::vector<int> perm, double tol,
                                     std::int64_t cap) {
  SummationPlan plan;
  plan.perm = std::move(perm);
  plan.tol.assign(static_cast<std::size_t>(m), tol);
  plan.cap.assign(static_cast<std::size_t>(m), cap);
  plan.validate(m);
  return plan;
}

void SummationPlan::validate(int m) const {
  if (static_cast<int>(perm.size()) != m || static_cast<int>(tol.size()) != m ||
      static_cast<int>(cap.size()) != m)
    throw std::invalid_argument("SummationPlan: wrong arity");
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (int p : perm) {
    if (p < 0 || p >= m || seen[static_cast<std::size_t>(p)])
      throw std::invalid_argument("SummationPlan: perm is not a permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }
  for (double t : tol)
    if (t <= 0) throw std::invalid_argument("SummationPlan: tolerances must be positive");
  for (std::int64_t c : cap)
    if (c < 4) throw std::invalid_argument("SummationPlan: caps must be at least 4");
}

TailSumOutcome tail_controlled_sum(const std::function<Complex(std::int64_t)>& term, double tol,
                                   std::int64_t cap, bool alternating) {
  TailSumOutcome out;
  KahanComplexSum acc;
  Complex t_cur = term(0);
  acc.add(t_cur);
  Complex t_next = term(1);
  std::int64_t n = 0;
  while (true) {
    if (n >= 2 && std::abs(t_cur) < tol && std::abs(t_next) < tol) {
      out.value = acc.value();
      if (alternating) {
        out.value += t_next / 2.0;
        out.achieved_tail = std::abs(t_next) / 2.0;
      } else {
        out.achieved_tail = std::max(std::abs(t_cur), std::abs(t_next));
      }
      out.depth = n;
      out.converged = true;
      return out;
    }
    if (n + 1 >= cap) {
      out.value = acc.value();
      out.achieved_tail = std::max(std::abs(t_cur), std::abs(t_next));
      out.depth = n;
      out.converged = false;
      return out;
    }
    ++n;
    t_cur = t_next;
    acc.add(t_cur);
    t_next = term(n + 1);
  }
}

namespace {

struct Runner {
  const TermSource& src;
  const SummationPlan& plan;
  SuccessiveResult& result;
  MultiIndex prefix;

  Complex eval_level(int level) {
    const int axis = plan.perm[static_cast<std::size_t>(level)];
    const bool innermost = level + 1 == src.dim;
    auto term = [&](std::int64_t j) {
      prefix[axis] = j;
      return innermost ? src.eval(prefix) : eval_level(level + 1);
    };
    const auto out =
        tail_controlled_sum(term, plan.tol[static_cast<std::size_t>(axis)],
                            plan.cap[static_cast<std::size_t>(axis)], src.alternating);
    auto& trace = result.axes[static_cast<std::size_t>(axis)];
    trace.achieved_tail = std::max(trace.achieved_tail, out.achieved_tail);
    trace.max_depth = std::max(trace.max_depth, out.depth);
    if (!out.converged && !result.inconclusive) {
      result.inconclusive = true;
      result.failed_axis = axis;
    }
    return out.value;
  }
};

}  // namespace

SuccessiveResult successive_sum(const TermSource& src, const SummationPlan& plan) {
  plan.validate(src.dim);
  SuccessiveResult result;
  result.plan = plan;
  result.axes.assign(static_cast<std::size_t>(src.dim), AxisTrace{});
  result.heuristic = !src.alternating;
  Runner runner{src, plan, result, MultiIndex::zeros(src.dim)};
  result.value = runner.eval_level(0);
  return result;
}

SweepResult permutation_sweep(const TermSource& src, const SummationPlan& base_plan) {
  const int m = src.dim;
  if (m > 5) throw std::invalid_argument("permutation_sweep: m must be <= 5");
  base_plan.validate(m);

  std::vector<int> perm(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) perm[static_cast<std::size_t>(p)] = p;

  SweepResult sweep;
  do {
    SummationPlan plan = base_plan;
    plan.perm = perm;
    sweep.results.push_back(successive_sum(src, plan));
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (std::size_t i = 0; i < sweep.results.size(); ++i)
    for (std::size_t j = i + 1; j < sweep.results.size(); ++j)
      sweep.max_discrepancy = std::max(
          sweep.max_discrepancy, std::abs(sweep.results[i].value - sweep.results[j].value));
  return sweep;
}

}  // namespace regconv
