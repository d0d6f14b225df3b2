#include "mimitag/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

namespace mimitag {

DesignTarget DesignTarget::peak_at(double wavelength_nm, Channel c,
                                   double weight) {
  DesignTarget t;
  t.kind = Kind::peak_at;
  t.wavelength_nm = wavelength_nm;
  t.channel = c;
  t.weight = weight;
  return t;
}

DesignTarget DesignTarget::value_at(double wavelength_nm, Channel c,
                                    double value, double weight) {
  DesignTarget t;
  t.kind = Kind::value_at;
  t.wavelength_nm = wavelength_nm;
  t.channel = c;
  t.value = value;
  t.weight = weight;
  return t;
}

DesignTarget DesignTarget::mode_color_separation(double min_distance,
                                                 double weight) {
  DesignTarget t;
  t.kind = Kind::mode_color_separation;
  t.min_distance = min_distance;
  t.weight = weight;
  return t;
}

ObjectiveSetup ObjectiveSetup::standard() {
  ObjectiveSetup s;
  s.grid_nm = make_grid(350.0, 800.0, 1.0);
  s.incidence = {0.0, Polarization::unpolarized};
  return s;
}

namespace {

constexpr double kPeakMissPenalty = 10.0;
constexpr double kPeakDistanceScaleNm = 100.0;

double value_on_grid(std::span<const double> grid,
                     std::span<const double> values, double wavelength_nm) {
  if (wavelength_nm < grid.front() || wavelength_nm > grid.back()) {
    throw ValidationError("target wavelength outside the simulation grid");
  }
  auto hi = std::lower_bound(grid.begin(), grid.end(), wavelength_nm);
  const std::size_t j = static_cast<std::size_t>(hi - grid.begin());
  if (grid[j] == wavelength_nm) {
    return values[j];
  }
  const double t = (wavelength_nm - grid[j - 1]) / (grid[j] - grid[j - 1]);
  return values[j - 1] + t * (values[j] - values[j - 1]);
}

void validate_targets(std::span<const DesignTarget> targets,
                      const ObjectiveSetup& setup) {
  for (const DesignTarget& t : targets) {
    if (!std::isfinite(t.weight) || !(t.weight > 0.0)) {
      throw ValidationError("target weight must be finite and > 0");
    }
    if (!std::isfinite(t.wavelength_nm) || !std::isfinite(t.value) ||
        !std::isfinite(t.min_distance)) {
      throw ValidationError("target parameters must be finite");
    }
    if (t.kind == DesignTarget::Kind::mode_color_separation &&
        (setup.illuminant == nullptr || setup.cmf == nullptr)) {
      throw ValidationError(
          "mode_color_separation target needs illuminant and CMF tables");
    }
  }
}

}  // namespace

double objective(const StackSpec& stack, std::span<const DesignTarget> targets,
                 const ObjectiveSetup& setup) {
  validate_targets(targets, setup);
  if (targets.empty()) {
    return 0.0;
  }
  const SpectralResponse sr = simulate(stack, setup.grid_nm, setup.incidence);

  double total = 0.0;
  for (const DesignTarget& t : targets) {
    const std::vector<double>& channel =
        t.channel == Channel::R ? sr.R : sr.T;
    switch (t.kind) {
      case DesignTarget::Kind::value_at: {
        const double v = value_on_grid(sr.grid_nm, channel, t.wavelength_nm);
        total += t.weight * (v - t.value) * (v - t.value);
        break;
      }
      case DesignTarget::Kind::peak_at: {
        if (t.wavelength_nm < sr.grid_nm.front() ||
            t.wavelength_nm > sr.grid_nm.back()) {
          throw ValidationError("target wavelength outside the simulation grid");
        }
        const std::vector<double> peaks = local_maxima(sr.grid_nm, channel);
        if (peaks.empty()) {
          total += kPeakMissPenalty * t.weight;
        } else {
          double best = std::numeric_limits<double>::infinity();
          for (double p : peaks) {
            best = std::min(best, std::abs(p - t.wavelength_nm));
          }
          const double d = best / kPeakDistanceScaleNm;
          total += t.weight * d * d;
        }
        break;
      }
      case DesignTarget::Kind::mode_color_separation: {
        const ChromaticityResult refl =
            chromaticity(sr.grid_nm, sr.R, *setup.illuminant, *setup.cmf);
        const ChromaticityResult tran =
            chromaticity(sr.grid_nm, sr.T, *setup.illuminant, *setup.cmf);
        const double dist = uv_distance(refl.uv, tran.uv);
        const double shortfall = std::max(0.0, t.min_distance - dist);
        total += t.weight * shortfall * shortfall;
        break;
      }
    }
  }
  return total;
}

namespace {

constexpr double kStepFloorNm = 0.25;

// Platform-stable uniform in [0, 1).
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates with the pinned uniform mapping, so the sampling sequence does
// not depend on the standard library's shuffle internals.
void shuffle_indices(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

class Evaluator {
 public:
  Evaluator(const DesignSpace& space, std::span<const DesignTarget> targets,
            const ObjectiveSetup& setup, long budget, const EvalHook& hook)
      : space_(space),
        targets_(targets),
        setup_(setup),
        budget_(budget),
        hook_(hook),
        work_(space.stack) {}

  bool exhausted() const { return evaluations_ >= budget_; }
  long evaluations() const { return evaluations_; }
  double best_value() const { return best_value_; }
  const std::vector<double>& best_point() const { return best_point_; }

  // Returns the objective, or nothing once the budget is spent.
  std::optional<double> eval(const std::vector<double>& thicknesses) {
    if (exhausted()) {
      return std::nullopt;
    }
    ++evaluations_;
    for (std::size_t i = 0; i < thicknesses.size(); ++i) {
      work_.layers[i].thickness_nm = thicknesses[i];
    }
    const double v = objective(work_, targets_, setup_);
    if (hook_) {
      hook_(thicknesses, v);
    }
    if (best_point_.empty() || v < best_value_) {
      best_value_ = v;
      best_point_ = thicknesses;
    }
    return v;
  }

 private:
  const DesignSpace& space_;
  std::span<const DesignTarget> targets_;
  const ObjectiveSetup& setup_;
  long budget_;
  const EvalHook& hook_;
  StackSpec work_;
  long evaluations_ = 0;
  double best_value_ = 0.0;
  std::vector<double> best_point_;
};

}  // namespace

DesignResult optimize(const DesignSpace& space,
                      std::span<const DesignTarget> targets, long budget,
                      std::uint64_t seed, const ObjectiveSetup& setup,
                      const EvalHook& hook) {
  const std::size_t n = space.stack.layers.size();
  if (space.bounds.size() != n || space.frozen.size() != n) {
    throw ValidationError("bounds/frozen size must match the layer count");
  }
  std::vector<std::size_t> free_dims;
  for (std::size_t i = 0; i < n; ++i) {
    const LayerBounds& b = space.bounds[i];
    if (!std::isfinite(b.min_nm) || !std::isfinite(b.max_nm) ||
        !(b.min_nm > 0.0) || !(b.min_nm < b.max_nm)) {
      throw ValidationError("layer bounds require finite 0 < min < max");
    }
    if (!space.frozen[i]) {
      free_dims.push_back(i);
    }
  }
  if (free_dims.empty()) {
    throw ValidationError("design space needs at least one unfrozen layer");
  }
  if (budget < 1) {
    throw ValidationError("budget must be >= 1");
  }
  validate_targets(targets, setup);

  Evaluator ev(space, targets, setup, budget, hook);
  std::mt19937_64 rng(seed);

  // Start 0 is the template clamped into bounds; the rest are Latin-hypercube
  // samples over the unfrozen coordinates.
  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = std::clamp(space.stack.layers[i].thickness_nm,
                         space.bounds[i].min_nm, space.bounds[i].max_nm);
  }
  const std::size_t starts =
      std::max<std::size_t>(4, free_dims.size());
  std::vector<std::vector<double>> start_points;
  start_points.push_back(base);
  {
    const std::size_t extra = starts - 1;
    std::vector<std::vector<std::size_t>> perms(free_dims.size());
    for (std::size_t d = 0; d < free_dims.size(); ++d) {
      perms[d].resize(extra);
      std::iota(perms[d].begin(), perms[d].end(), 0);
      shuffle_indices(perms[d], rng);
    }
    for (std::size_t s = 0; s < extra; ++s) {
      std::vector<double> x = base;
      for (std::size_t d = 0; d < free_dims.size(); ++d) {
        const LayerBounds& b = space.bounds[free_dims[d]];
        const double cell = (b.max_nm - b.min_nm) / static_cast<double>(extra);
        x[free_dims[d]] =
            b.min_nm +
            (static_cast<double>(perms[d][s]) + uniform01(rng)) * cell;
      }
      start_points.push_back(std::move(x));
    }
  }

  bool all_starts_converged = true;
  for (const std::vector<double>& start : start_points) {
    if (ev.exhausted()) {
      all_starts_converged = false;
      break;
    }
    std::optional<double> current = ev.eval(start);
    if (!current) {
      all_starts_converged = false;
      break;
    }
    std::vector<double> x = start;
    std::vector<double> step(n);
    for (std::size_t i : free_dims) {
      step[i] = 0.1 * (space.bounds[i].max_nm - space.bounds[i].min_nm);
    }

    bool start_converged = false;
    while (!start_converged) {
      bool improved = false;
      for (std::size_t i : free_dims) {
        for (double dir : {+1.0, -1.0}) {
          const double probe = std::clamp(x[i] + dir * step[i],
                                          space.bounds[i].min_nm,
                                          space.bounds[i].max_nm);
          if (probe == x[i]) {
            continue;
          }
          std::vector<double> candidate = x;
          candidate[i] = probe;
          const std::optional<double> v = ev.eval(candidate);
          if (!v) {
            break;  // budget spent mid-cycle
          }
          if (*v < *current) {
            current = v;
            x = std::move(candidate);
            improved = true;
            break;  // next coordinate
          }
        }
        if (ev.exhausted()) {
          break;
        }
      }
      if (ev.exhausted() && !start_converged) {
        all_starts_converged = false;
        break;
      }
      if (!improved) {
        bool at_floor = true;
        for (std::size_t i : free_dims) {
          if (step[i] > kStepFloorNm) {
            at_floor = false;
          }
        }
        if (at_floor) {
          start_converged = true;
        } else {
          for (std::size_t i : free_dims) {
            step[i] = std::max(step[i] * 0.5, kStepFloorNm);
          }
        }
      }
    }
  }

  DesignResult result;
  result.thicknesses_nm = ev.best_point();
  result.objective = ev.best_value();
  result.evaluations = ev.evaluations();
  result.converged = all_starts_converged;
  return result;
}

}  // namespace mimitag
