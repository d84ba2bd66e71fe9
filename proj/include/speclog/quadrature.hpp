#pragma once

#include <vector>

namespace speclog {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on the three-term recurrence).
/// Rules are cached per n; the returned reference stays valid for the program lifetime.
const GaussRule& gauss_legendre(int n);

/// Appends the rule mapped onto [a, b] to the node/weight lists.
void append_panel(double a, double b, const GaussRule& rule, std::vector<double>& nodes, std::vector<double>& weights);

/// Appends panels on [0, b] refined geometrically toward 0: [b q^{k+1}, b q^k] for
/// k = 0..levels-1 plus the innermost [0, b q^levels].
void append_graded(double b, double ratio, int levels, const GaussRule& rule, std::vector<double>& nodes,
                   std::vector<double>& weights);

}  // namespace speclog
