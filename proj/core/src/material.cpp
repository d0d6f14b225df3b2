#include "mimitag/material.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mimitag {

namespace {

void validate_sample(const DispersionSample& s) {
  if (!std::isfinite(s.wavelength_nm) || !std::isfinite(s.n) ||
      !std::isfinite(s.kappa)) {
    throw ValidationError("dispersion samples must be finite");
  }
  if (s.wavelength_nm <= 0.0) {
    throw ValidationError("sample wavelength must be > 0");
  }
  if (s.n <= 0.0) {
    throw ValidationError("refractive index n must be > 0");
  }
  if (s.kappa < 0.0) {
    throw ValidationError("extinction kappa must be >= 0");
  }
}

}  // namespace

MaterialDispersion MaterialDispersion::constant(std::string name, double n,
                                                double kappa) {
  validate_sample({1.0, n, kappa});
  MaterialDispersion m;
  m.name_ = std::move(name);
  m.constant_ = true;
  m.const_n_ = n;
  m.const_kappa_ = kappa;
  return m;
}

MaterialDispersion MaterialDispersion::tabulated(
    std::string name, std::vector<DispersionSample> samples) {
  if (samples.size() < 2) {
    throw ValidationError("tabulated material needs at least 2 samples");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    validate_sample(samples[i]);
    if (i > 0 && samples[i].wavelength_nm <= samples[i - 1].wavelength_nm) {
      throw ValidationError("sample wavelengths must be strictly increasing");
    }
  }
  MaterialDispersion m;
  m.name_ = std::move(name);
  m.samples_ = std::move(samples);
  return m;
}

ComplexIndex MaterialDispersion::at(double wavelength_nm) const {
  if (constant_) {
    return {const_n_, const_kappa_};
  }
  if (wavelength_nm < samples_.front().wavelength_nm ||
      wavelength_nm > samples_.back().wavelength_nm) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%s: wavelength %g nm outside tabulated range [%g, %g]",
                  name_.c_str(), wavelength_nm, samples_.front().wavelength_nm,
                  samples_.back().wavelength_nm);
    throw OutOfRange(buf);
  }
  auto hi = std::lower_bound(
      samples_.begin(), samples_.end(), wavelength_nm,
      [](const DispersionSample& s, double wl) { return s.wavelength_nm < wl; });
  if (hi->wavelength_nm == wavelength_nm) {
    return {hi->n, hi->kappa};
  }
  auto lo = hi - 1;
  const double t = (wavelength_nm - lo->wavelength_nm) /
                   (hi->wavelength_nm - lo->wavelength_nm);
  return {lo->n + t * (hi->n - lo->n), lo->kappa + t * (hi->kappa - lo->kappa)};
}

MaterialDispersion load_material(std::istream& in, std::string name) {
  std::string line;
  bool header_seen = false;
  std::vector<DispersionSample> samples;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      if (header_seen) {
        throw ParseError("comment lines are only permitted before the header");
      }
      continue;
    }
    if (!header_seen) {
      if (line != "wavelength_nm,n,k") {
        throw ParseError("expected header 'wavelength_nm,n,k', got '" + line +
                         "'");
      }
      header_seen = true;
      continue;
    }
    DispersionSample s;
    char trailing = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf%c", &s.wavelength_nm, &s.n,
                    &s.kappa, &trailing) != 3) {
      throw ParseError("malformed row " + std::to_string(line_no) + ": '" +
                       line + "'");
    }
    samples.push_back(s);
  }
  if (!header_seen) {
    throw ParseError("missing 'wavelength_nm,n,k' header");
  }
  return MaterialDispersion::tabulated(std::move(name), std::move(samples));
}

MaterialDispersion load_material_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open material file: " + path);
  }
  return load_material(in, std::filesystem::path(path).stem().string());
}

void write_material(std::ostream& out, const MaterialDispersion& material) {
  out << "# material: " << material.name() << "\n";
  out << "wavelength_nm,n,k\n";
  char buf[96];
  for (const DispersionSample& s : material.samples()) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", s.wavelength_nm, s.n,
                  s.kappa);
    out << buf;
  }
}

}  // namespace mimitag
