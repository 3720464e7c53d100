#pragma once

namespace sectorial {

/// Numerical knobs shared by all modules. Every field is overridable from the
/// CLI config under "tolerances".
struct Options {
  // numcore
  double solve_tolerance = 1e-12;
  double pivot_tolerance = 1e-13;  // relative to ||A||
  double eig_residual = 1e-10;     // relative to ||A||
  double expm_norm_cap = 1e3;

  // forms
  int range_nodes = 256;
  double convexity_slack = 1e-10;
  double sector_margin = 1e-2;

  // rigging
  double tiny_threshold = 1e-3;

  // contour
  double node_spacing_factor = 10.0;
  int gauss_order = 16;
  double enclosure_trace_tolerance = 0.01;

  // semigroup
  double truncation = 1e-14;
  double sector_delta = 0.5;
  double z_floor = 1e-12;  // multiplied by the dimension

  // eigenstate
  double gap_floor = 1e-6;
  double radius_factor = 0.4;
  double repin_threshold = 0.1;
  double normalization_tolerance = 1e-8;

  // Worker threads for quadrature node evaluation. Results do not depend on
  // this value: reductions follow a fixed pairwise tree.
  unsigned threads = 1;
};

}  // namespace sectorial
