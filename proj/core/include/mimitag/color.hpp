#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mimitag/tmm.hpp"

namespace mimitag {

struct Xyz {
  double X = 0.0, Y = 0.0, Z = 0.0;
};

struct UvPrime {
  double u = 0.0, v = 0.0;
};

struct Rgb {
  double r = 0.0, g = 0.0, b = 0.0;
};

// CIE 1931 2-degree observer table; bundled at 5 nm steps and linearly
// resampled onto the spectrum grid (zero outside the tabulated range).
class ColorMatchingTable {
 public:
  struct Row {
    double wavelength_nm, xbar, ybar, zbar;
  };

  static ColorMatchingTable load(std::istream& in);
  static ColorMatchingTable load_file(const std::string& path);

  const std::vector<Row>& rows() const { return rows_; }
  double min_wavelength_nm() const { return rows_.front().wavelength_nm; }
  double max_wavelength_nm() const { return rows_.back().wavelength_nm; }

  std::array<double, 3> at(double wavelength_nm) const;

 private:
  std::vector<Row> rows_;
};

// Relative spectral power distribution; tabulated (e.g. D65) or the analytic
// equal-energy illuminant.
class Illuminant {
 public:
  static Illuminant equal_energy();
  static Illuminant load(std::istream& in, std::string name);
  static Illuminant load_file(const std::string& path);

  const std::string& name() const { return name_; }
  double power_at(double wavelength_nm) const;

 private:
  std::string name_;
  bool equal_energy_ = false;
  std::vector<std::array<double, 2>> rows_;  // wavelength, power
};

// X = k Sum S(l) f(l) xbar(l) dl (trapezoid on the spectrum grid), with k
// normalizing a unit factor to Y = 1. The grid must cover the CMF support.
Xyz spectrum_to_xyz(std::span<const double> grid_nm,
                    std::span<const double> factor, const Illuminant& illuminant,
                    const ColorMatchingTable& cmf);

// u' = 4X / (X + 15Y + 3Z), v' = 9Y / (X + 15Y + 3Z).
UvPrime xyz_to_uv_prime(const Xyz& xyz);

double uv_distance(const UvPrime& a, const UvPrime& b);

// Linear transform with the standard D65-primary matrix, hard clip to [0,1].
Rgb xyz_to_linear_rgb(const Xyz& xyz);
Xyz linear_rgb_to_xyz(const Rgb& rgb);

// Display transfer curve applied per channel after clipping.
double display_encode(double linear);
double display_decode(double encoded);
Rgb xyz_to_display_rgb(const Xyz& xyz);

struct ChromaticityResult {
  Xyz xyz;
  UvPrime uv;
  Rgb rgb;  // display-encoded, in [0,1]^3
};

ChromaticityResult chromaticity(std::span<const double> grid_nm,
                                std::span<const double> factor,
                                const Illuminant& illuminant,
                                const ColorMatchingTable& cmf);

struct ModeColors {
  ChromaticityResult reflection;
  ChromaticityResult transmission;
};

// Simulates the stack at normal incidence over grid_nm and feeds R and T as
// spectral factors.
ModeColors classify_mode_colors(const StackSpec& stack,
                                const Illuminant& illuminant,
                                const ColorMatchingTable& cmf,
                                std::span<const double> grid_nm);

}  // namespace mimitag
