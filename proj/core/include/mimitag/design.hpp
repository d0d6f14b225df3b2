#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mimitag/color.hpp"
#include "mimitag/tmm.hpp"

namespace mimitag {

enum class Channel { R, T };

struct DesignTarget {
  enum class Kind { peak_at, value_at, mode_color_separation };

  Kind kind = Kind::value_at;
  double wavelength_nm = 0.0;  // peak_at, value_at
  Channel channel = Channel::T;
  double value = 0.0;         // value_at target, in [0, 1]
  double min_distance = 0.0;  // mode_color_separation
  double weight = 1.0;

  static DesignTarget peak_at(double wavelength_nm, Channel c,
                              double weight = 1.0);
  static DesignTarget value_at(double wavelength_nm, Channel c, double value,
                               double weight = 1.0);
  static DesignTarget mode_color_separation(double min_distance,
                                            double weight = 1.0);
};

struct LayerBounds {
  double min_nm = 0.0;
  double max_nm = 0.0;
};

struct DesignSpace {
  StackSpec stack;  // template; layer materials stay fixed
  std::vector<LayerBounds> bounds;
  std::vector<bool> frozen;
};

struct DesignResult {
  std::vector<double> thicknesses_nm;
  double objective = 0.0;
  long evaluations = 0;
  bool converged = false;
};

// Everything an objective evaluation needs besides the stack. Color tables
// are only required when a mode_color_separation target is present.
struct ObjectiveSetup {
  std::vector<double> grid_nm;
  IncidenceSpec incidence;
  const Illuminant* illuminant = nullptr;
  const ColorMatchingTable* cmf = nullptr;

  static ObjectiveSetup standard();  // 350-800 nm, 1 nm, normal incidence
};

// Weighted sum over targets:
//   value_at            w * (channel(l) - target)^2
//   peak_at             w * (min |l - peak| / 100 nm)^2 over detected maxima,
//                       or the fixed miss penalty 10 w with no maximum at all
//   mode_color_sep      w * max(0, min_dist - actual u'v' distance)^2
double objective(const StackSpec& stack, std::span<const DesignTarget> targets,
                 const ObjectiveSetup& setup);

using EvalHook =
    std::function<void(std::span<const double> thicknesses_nm, double value)>;

// Multi-start Latin-hypercube seeding + cyclic coordinate descent with a
// shrinking step (10% of each bound range, halved on a failed cycle, floored
// at 0.25 nm). Deterministic for a fixed seed. Runs the clamped template as
// the first candidate, so the result never scores worse than the template.
DesignResult optimize(const DesignSpace& space,
                      std::span<const DesignTarget> targets, long budget,
                      std::uint64_t seed, const ObjectiveSetup& setup,
                      const EvalHook& hook = {});

}  // namespace mimitag
