#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mimitag/material.hpp"

namespace mimitag {

// Conventions used throughout (Born & Wolf, "Principles of Optics" §1.6):
//
//   n~ = n + i*kappa, time dependence e^(-i w t), forward wave e^(+i k z);
//   phase thickness    delta_j = 2 pi n~_j d_j cos(theta_j) / lambda,
//                      Im(delta_j) >= 0 for passive layers (decay);
//   complex Snell      cos(theta_j) = sqrt(1 - (n_0 sin(theta_0) / n~_j)^2),
//                      principal branch, Im >= 0 enforced;
//   tilted admittance  eta_j = n~_j cos(theta_j)      (s polarization)
//                      eta_j = n~_j / cos(theta_j)    (p polarization)
//   characteristic matrix of one layer (unimodular):
//       M_j = [ cos(delta_j)            -i sin(delta_j)/eta_j ]
//             [ -i eta_j sin(delta_j)    cos(delta_j)         ]
//
// Assembly, ambient -> exit order: [B; C] = (M_1 ... M_N) [1; eta_exit], then
//   r = (eta_0 B - C) / (eta_0 B + C)
//   R = |r|^2
//   T = 4 eta_0 Re(eta_exit) / |eta_0 B + C|^2
// which is Re(eta_exit)/Re(eta_0) |t|^2 with t = 2 eta_0/(eta_0 B + C) and is
// valid for absorbing exit media and oblique incidence.

struct Layer {
  MaterialRef material;
  double thickness_nm = 0.0;  // > 0; omit zero-thickness layers entirely
};

struct StackSpec {
  MaterialRef ambient;        // kappa must be 0 at every simulated wavelength
  std::vector<Layer> layers;  // indexed from the ambient side
  MaterialRef exit;
};

enum class Polarization { s, p, unpolarized };

struct IncidenceSpec {
  double angle_deg = 0.0;  // in [0, 90)
  Polarization polarization = Polarization::unpolarized;
};

struct SpectralResponse {
  std::vector<double> grid_nm;
  std::vector<double> R;
  std::vector<double> T;
  std::vector<double> A;  // 1 - R - T
};

struct Mat2c {
  std::complex<double> m00, m01, m10, m11;

  std::complex<double> det() const { return m00 * m11 - m01 * m10; }

  Mat2c operator*(const Mat2c& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }
};

// Characteristic matrix of a single layer. The matrix is polarization
// specific; incidence.polarization must be s or p (they coincide at normal
// incidence).
Mat2c layer_matrix(const Layer& layer, double wavelength_nm,
                   const IncidenceSpec& incidence);

// R/T/A of the stack at every grid wavelength. Unpolarized incidence is the
// mean of the s and p powers. Throws LossyAmbient if the ambient absorbs,
// OutOfRange if a material table does not cover the grid.
SpectralResponse simulate(const StackSpec& stack, std::span<const double> grid_nm,
                          const IncidenceSpec& incidence);

// Layers reversed, ambient and exit swapped. Transmittance is invariant under
// reversal when both end media are lossless (reciprocity); reflectance is not.
StackSpec reverse(const StackSpec& stack);

// Inclusive [min, max] grid with the given step; the last point is max when
// (max - min) is an integral number of steps.
std::vector<double> make_grid(double min_nm, double max_nm, double step_nm);

// Local extremum: strictly greater (less) than both neighbours; a plateau
// reports its leftmost point. Endpoints never qualify.
std::vector<double> local_maxima(std::span<const double> grid,
                                 std::span<const double> values);
std::vector<double> local_minima(std::span<const double> grid,
                                 std::span<const double> values);

}  // namespace mimitag
