#pragma once

#include <complex>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "mimitag/errors.hpp"

namespace mimitag {

// Complex refractive index n~ = n + i*kappa, time dependence e^(-i w t),
// so kappa >= 0 means absorption.
struct ComplexIndex {
  double n = 1.0;
  double kappa = 0.0;

  std::complex<double> value() const { return {n, kappa}; }
};

struct DispersionSample {
  double wavelength_nm = 0.0;
  double n = 0.0;
  double kappa = 0.0;
};

// Dispersion data for one material: either a strictly increasing wavelength
// table (>= 2 samples) or an analytic constant. Immutable after construction.
class MaterialDispersion {
 public:
  static MaterialDispersion constant(std::string name, double n, double kappa);
  static MaterialDispersion tabulated(std::string name,
                                      std::vector<DispersionSample> samples);

  const std::string& name() const { return name_; }
  bool is_constant() const { return constant_; }

  // Empty for constant materials.
  const std::vector<DispersionSample>& samples() const { return samples_; }

  // Linear interpolation of n and kappa independently; exact at table nodes.
  // Throws OutOfRange outside [min_wavelength_nm, max_wavelength_nm].
  ComplexIndex at(double wavelength_nm) const;

  double min_wavelength_nm() const {
    return constant_ ? 0.0 : samples_.front().wavelength_nm;
  }
  double max_wavelength_nm() const {
    return constant_ ? std::numeric_limits<double>::infinity()
                     : samples_.back().wavelength_nm;
  }

 private:
  MaterialDispersion() = default;

  std::string name_;
  bool constant_ = false;
  double const_n_ = 1.0;
  double const_kappa_ = 0.0;
  std::vector<DispersionSample> samples_;
};

using MaterialRef = std::shared_ptr<const MaterialDispersion>;

// Material CSV: optional leading '#' comment lines, the exact header
// "wavelength_nm,n,k", then one "wl,n,k" row per sample.
MaterialDispersion load_material(std::istream& in, std::string name);
MaterialDispersion load_material_file(const std::string& path);
void write_material(std::ostream& out, const MaterialDispersion& material);

}  // namespace mimitag
