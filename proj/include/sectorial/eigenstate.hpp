#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sectorial/contour.hpp"
#include "sectorial/schrodinger.hpp"

namespace sectorial {

/// P = |phi><eta| with ||phi|| = 1, <eta, phi> = 1 and phi[pinned] real
/// positive.
struct RankOnePair {
  ComplexVector phi;
  ComplexVector eta;
  Complex e{0.0, 0.0};
  Index pinned = 0;
  bool repinned = false;
};

/// Splits a rank-one projection. With `pin` set, that component keeps the
/// phase unless its modulus drops below opt.repin_threshold, in which case the
/// largest component is pinned instead and `repinned` is set.
RankOnePair rank_one_decompose(const ComplexMatrix& p, std::optional<Index> pin = std::nullopt,
                               const Options& opt = {});

using FormFamily = std::function<FormMatrix(double)>;

struct TrackPoint {
  Index index = 0;
  double s = 0.0;
  Complex e{0.0, 0.0};
  double gap = 0.0;     // distance to the rest of the spectrum
  double radius = 0.0;  // circle used at this point
  bool repinned = false;
};

struct TrackResult {
  std::vector<TrackPoint> points;
  Complex discrepancy{0.0, 0.0};  // E(end) - E(start); nonzero on monodromy loops
};

/// Follows one isolated eigenvalue along the sampled path. The first point
/// uses c0; later points use a circle around the previous E whose radius is
/// min(previous radius, radius_factor * gap). Throws IsolationLost when the
/// gap falls below opt.gap_floor.
TrackResult track_eigenvalue(const FormFamily& fam, std::span<const double> path,
                             const Circle& c0, const Options& opt = {});

/// Circle around the eigenvalue of smallest real part, radius
/// radius_factor * gap.
Circle isolating_circle(const ComplexMatrix& a, const Options& opt = {});

struct HellmannFeynman {
  Complex derivative{0.0, 0.0};  // <eta, dH phi>
  Complex e{0.0, 0.0};
  double adjoint_residual = 0.0;  // ||H* eta - conj(E) eta|| / (||H||_1 ||eta||)
  RankOnePair pair;
};

/// dE along a direction whose form derivative is dh, for the eigenvalue
/// enclosed by c.
HellmannFeynman hellmann_feynman(const FormMatrix& h, const FormMatrix& dh, const Contour& c,
                                 const Options& opt = {});

/// Same for the Schroedinger family at x along w. Without a contour the
/// lowest eigenvalue is isolated automatically.
HellmannFeynman hellmann_feynman(const ManyBodySpace& space, const FieldConfig& x,
                                 const FieldConfig& w,
                                 const std::optional<Contour>& c = std::nullopt,
                                 const Options& opt = {});

/// Several directions sharing one projection.
std::vector<HellmannFeynman> hellmann_feynman(const ManyBodySpace& space,
                                              const FieldConfig& x,
                                              std::span<const FieldConfig> ws,
                                              const std::optional<Contour>& c = std::nullopt,
                                              const Options& opt = {});

/// rho and J of the eigenstate enclosed by c (lowest one by default).
ChargeCurrent eigenstate_density(const ManyBodySpace& space, const FieldConfig& x,
                                 const std::optional<Contour>& c = std::nullopt,
                                 const Options& opt = {});

}  // namespace sectorial
