#include "mimitag/tmm.hpp"

#include <cmath>
#include <numbers>

namespace mimitag {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

struct LayerWave {
  std::complex<double> cos_theta;
  std::complex<double> eta;  // tilted admittance
};

// cos(theta_j) from the conserved n0 sin(theta0); principal sqrt branch with
// Im >= 0 so that passive layers decay.
std::complex<double> complex_cos_theta(std::complex<double> index,
                                       double n0_sin_theta0) {
  const std::complex<double> s = n0_sin_theta0 / index;
  std::complex<double> w = std::sqrt(1.0 - s * s);
  if (w.imag() < 0.0) {
    w = -w;
  }
  return w;
}

LayerWave wave_in(const MaterialDispersion& material, double wavelength_nm,
                  double n0_sin_theta0, Polarization pol) {
  const std::complex<double> index = material.at(wavelength_nm).value();
  LayerWave w;
  w.cos_theta = complex_cos_theta(index, n0_sin_theta0);
  w.eta = pol == Polarization::p ? index / w.cos_theta : index * w.cos_theta;
  return w;
}

void validate_incidence(const IncidenceSpec& incidence) {
  if (!(incidence.angle_deg >= 0.0 && incidence.angle_deg < 90.0)) {
    throw ValidationError("incidence angle must lie in [0, 90)");
  }
}

Mat2c characteristic_matrix(std::complex<double> index, double thickness_nm,
                            double wavelength_nm, double n0_sin_theta0,
                            Polarization pol) {
  const std::complex<double> ct = complex_cos_theta(index, n0_sin_theta0);
  const std::complex<double> eta =
      pol == Polarization::p ? index / ct : index * ct;
  const std::complex<double> delta =
      2.0 * std::numbers::pi * index * thickness_nm * ct / wavelength_nm;
  const std::complex<double> c = std::cos(delta);
  const std::complex<double> s = std::sin(delta);
  return {c, -kI * s / eta, -kI * eta * s, c};
}

struct PowerPair {
  double R;
  double T;
};

PowerPair powers_single_pol(const StackSpec& stack, double wavelength_nm,
                            double theta0_rad, Polarization pol) {
  const double n0 = stack.ambient->at(wavelength_nm).n;
  const double n0_sin = n0 * std::sin(theta0_rad);
  const double cos0 = std::cos(theta0_rad);
  const double eta0 = pol == Polarization::p ? n0 / cos0 : n0 * cos0;

  Mat2c m{1.0, 0.0, 0.0, 1.0};
  for (const Layer& layer : stack.layers) {
    m = m * characteristic_matrix(layer.material->at(wavelength_nm).value(),
                                  layer.thickness_nm, wavelength_nm, n0_sin,
                                  pol);
  }
  const LayerWave exit = wave_in(*stack.exit, wavelength_nm, n0_sin, pol);
  const std::complex<double> b = m.m00 + m.m01 * exit.eta;
  const std::complex<double> c = m.m10 + m.m11 * exit.eta;
  const std::complex<double> denom = eta0 * b + c;
  const double denom2 = std::norm(denom);
  PowerPair out;
  out.R = std::norm(eta0 * b - c) / denom2;
  out.T = 4.0 * eta0 * exit.eta.real() / denom2;
  return out;
}

}  // namespace

Mat2c layer_matrix(const Layer& layer, double wavelength_nm,
                   const IncidenceSpec& incidence) {
  validate_incidence(incidence);
  if (incidence.polarization == Polarization::unpolarized) {
    throw ValidationError(
        "layer matrix is polarization-specific; request s or p");
  }
  const double theta0 = incidence.angle_deg * std::numbers::pi / 180.0;
  // No ambient in this signature: the conserved transverse component
  // n0 sin(theta0) is taken with n0 = 1 (air-side incidence angle).
  return characteristic_matrix(layer.material->at(wavelength_nm).value(),
                               layer.thickness_nm, wavelength_nm,
                               std::sin(theta0), incidence.polarization);
}

SpectralResponse simulate(const StackSpec& stack, std::span<const double> grid_nm,
                          const IncidenceSpec& incidence) {
  validate_incidence(incidence);
  if (!stack.ambient || !stack.exit) {
    throw ValidationError("stack needs ambient and exit media");
  }
  for (const Layer& layer : stack.layers) {
    if (!layer.material) {
      throw ValidationError("layer without material");
    }
    if (!std::isfinite(layer.thickness_nm) || !(layer.thickness_nm > 0.0)) {
      throw ValidationError("layer thickness must be finite and > 0");
    }
  }
  if (grid_nm.empty()) {
    throw ValidationError("empty wavelength grid");
  }
  for (std::size_t i = 0; i < grid_nm.size(); ++i) {
    if (!std::isfinite(grid_nm[i]) || !(grid_nm[i] > 0.0)) {
      throw ValidationError("grid wavelengths must be finite and > 0");
    }
    if (i > 0 && grid_nm[i] <= grid_nm[i - 1]) {
      throw ValidationError("grid wavelengths must be strictly increasing");
    }
  }

  const double theta0 = incidence.angle_deg * std::numbers::pi / 180.0;
  SpectralResponse out;
  out.grid_nm.assign(grid_nm.begin(), grid_nm.end());
  out.R.resize(grid_nm.size());
  out.T.resize(grid_nm.size());
  out.A.resize(grid_nm.size());

  for (std::size_t i = 0; i < grid_nm.size(); ++i) {
    const double wl = grid_nm[i];
    if (stack.ambient->at(wl).kappa != 0.0) {
      throw LossyAmbient("ambient medium absorbs at " + std::to_string(wl) +
                         " nm");
    }
    PowerPair p;
    if (incidence.polarization == Polarization::unpolarized) {
      const PowerPair ps = powers_single_pol(stack, wl, theta0, Polarization::s);
      const PowerPair pp = powers_single_pol(stack, wl, theta0, Polarization::p);
      p = {0.5 * (ps.R + pp.R), 0.5 * (ps.T + pp.T)};
    } else {
      p = powers_single_pol(stack, wl, theta0, incidence.polarization);
    }
    out.R[i] = p.R;
    out.T[i] = p.T;
    out.A[i] = 1.0 - p.R - p.T;
  }
  return out;
}

StackSpec reverse(const StackSpec& stack) {
  StackSpec r;
  r.ambient = stack.exit;
  r.exit = stack.ambient;
  r.layers.assign(stack.layers.rbegin(), stack.layers.rend());
  return r;
}

std::vector<double> make_grid(double min_nm, double max_nm, double step_nm) {
  if (!std::isfinite(min_nm) || !std::isfinite(max_nm) ||
      !std::isfinite(step_nm)) {
    throw ValidationError("grid bounds and step must be finite");
  }
  if (!(min_nm > 0.0) || !(max_nm > min_nm) || !(step_nm > 0.0)) {
    throw ValidationError("grid requires 0 < min < max and step > 0");
  }
  std::vector<double> grid;
  const long n = std::lround(std::floor((max_nm - min_nm) / step_nm + 1e-9));
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    grid.push_back(min_nm + static_cast<double>(k) * step_nm);
  }
  return grid;
}

namespace {

std::vector<double> extrema(std::span<const double> grid,
                            std::span<const double> values, bool maxima) {
  if (grid.size() != values.size()) {
    throw ValidationError("grid/value size mismatch");
  }
  const auto above = [maxima](double a, double b) {
    return maxima ? a > b : a < b;
  };
  std::vector<double> out;
  const std::size_t n = values.size();
  for (std::size_t i = 1; i + 1 < n;) {
    if (above(values[i], values[i - 1])) {
      std::size_t j = i;
      while (j + 1 < n && values[j + 1] == values[j]) {
        ++j;
      }
      if (j + 1 < n && above(values[j], values[j + 1])) {
        out.push_back(grid[i]);  // leftmost point of a plateau
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

std::vector<double> local_maxima(std::span<const double> grid,
                                 std::span<const double> values) {
  return extrema(grid, values, true);
}

std::vector<double> local_minima(std::span<const double> grid,
                                 std::span<const double> values) {
  return extrema(grid, values, false);
}

}  // namespace mimitag
