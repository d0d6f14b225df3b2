#include "mimitag/color.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>

namespace mimitag {

namespace {

// sRGB / BT.709 primaries, D65 white.
constexpr double kXyzToRgb[3][3] = {
    {3.2404542, -1.5371385, -0.4985314},
    {-0.9692660, 1.8760108, 0.0415560},
    {0.0556434, -0.2040259, 1.0572252},
};
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

std::vector<std::vector<double>> parse_table(std::istream& in,
                                             const std::string& header,
                                             std::size_t columns) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header_seen = false;
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
      if (line != header) {
        throw ParseError("expected header '" + header + "', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    const char* p = line.c_str();
    char* end = nullptr;
    for (std::size_t c = 0; c < columns; ++c) {
      row.push_back(std::strtod(p, &end));
      if (end == p || (c + 1 < columns && *end != ',')) {
        throw ParseError("malformed row " + std::to_string(line_no) + ": '" +
                         line + "'");
      }
      p = end + 1;
    }
    if (*end != '\0') {
      throw ParseError("trailing characters on row " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) {
    throw ParseError("missing '" + header + "' header");
  }
  return rows;
}

double interp_or_zero(const std::vector<std::array<double, 2>>& rows,
                      double x) {
  if (rows.empty() || x < rows.front()[0] || x > rows.back()[0]) {
    return 0.0;
  }
  auto hi = std::lower_bound(
      rows.begin(), rows.end(), x,
      [](const std::array<double, 2>& r, double v) { return r[0] < v; });
  if ((*hi)[0] == x) {
    return (*hi)[1];
  }
  auto lo = hi - 1;
  const double t = (x - (*lo)[0]) / ((*hi)[0] - (*lo)[0]);
  return (*lo)[1] + t * ((*hi)[1] - (*lo)[1]);
}

}  // namespace

ColorMatchingTable ColorMatchingTable::load(std::istream& in) {
  ColorMatchingTable t;
  for (const auto& r : parse_table(in, "wavelength_nm,xbar,ybar,zbar", 4)) {
    if (!t.rows_.empty() && r[0] <= t.rows_.back().wavelength_nm) {
      throw ValidationError("CMF wavelengths must be strictly increasing");
    }
    if (r[1] < 0.0 || r[2] < 0.0 || r[3] < 0.0) {
      throw ValidationError("CMF values must be >= 0");
    }
    t.rows_.push_back({r[0], r[1], r[2], r[3]});
  }
  if (t.rows_.size() < 2) {
    throw ValidationError("CMF table needs at least 2 rows");
  }
  return t;
}

ColorMatchingTable ColorMatchingTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open CMF file: " + path);
  }
  return load(in);
}

std::array<double, 3> ColorMatchingTable::at(double wavelength_nm) const {
  if (wavelength_nm < rows_.front().wavelength_nm ||
      wavelength_nm > rows_.back().wavelength_nm) {
    return {0.0, 0.0, 0.0};
  }
  auto hi = std::lower_bound(rows_.begin(), rows_.end(), wavelength_nm,
                             [](const Row& r, double v) {
                               return r.wavelength_nm < v;
                             });
  if (hi->wavelength_nm == wavelength_nm) {
    return {hi->xbar, hi->ybar, hi->zbar};
  }
  auto lo = hi - 1;
  const double t = (wavelength_nm - lo->wavelength_nm) /
                   (hi->wavelength_nm - lo->wavelength_nm);
  return {lo->xbar + t * (hi->xbar - lo->xbar),
          lo->ybar + t * (hi->ybar - lo->ybar),
          lo->zbar + t * (hi->zbar - lo->zbar)};
}

Illuminant Illuminant::equal_energy() {
  Illuminant i;
  i.name_ = "ee";
  i.equal_energy_ = true;
  return i;
}

Illuminant Illuminant::load(std::istream& in, std::string name) {
  Illuminant i;
  i.name_ = std::move(name);
  for (const auto& r : parse_table(in, "wavelength_nm,power", 2)) {
    if (!i.rows_.empty() && r[0] <= i.rows_.back()[0]) {
      throw ValidationError("SPD wavelengths must be strictly increasing");
    }
    if (r[1] < 0.0) {
      throw ValidationError("SPD power must be >= 0");
    }
    i.rows_.push_back({r[0], r[1]});
  }
  if (i.rows_.size() < 2) {
    throw ValidationError("SPD table needs at least 2 rows");
  }
  return i;
}

Illuminant Illuminant::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open illuminant file: " + path);
  }
  return load(in, std::filesystem::path(path).stem().string());
}

double Illuminant::power_at(double wavelength_nm) const {
  if (equal_energy_) {
    return 1.0;
  }
  return interp_or_zero(rows_, wavelength_nm);
}

Xyz spectrum_to_xyz(std::span<const double> grid_nm,
                    std::span<const double> factor, const Illuminant& illuminant,
                    const ColorMatchingTable& cmf) {
  if (grid_nm.size() != factor.size() || grid_nm.size() < 2) {
    throw ValidationError("spectrum grid/factor size mismatch");
  }
  if (grid_nm.front() > cmf.min_wavelength_nm() ||
      grid_nm.back() < cmf.max_wavelength_nm()) {
    throw GridMismatch("spectrum grid does not cover the CMF support");
  }

  const std::size_t n = grid_nm.size();
  Xyz acc;
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = factor[i];
    if (f < -1e-6 || f > 1.0 + 1e-6) {
      throw ValidationError("spectral factor outside [0, 1]");
    }
    f = std::clamp(f, 0.0, 1.0);
    const double w =
        0.5 * ((i + 1 < n ? grid_nm[i + 1] : grid_nm[i]) -
               (i > 0 ? grid_nm[i - 1] : grid_nm[i]));
    const double s = illuminant.power_at(grid_nm[i]);
    const std::array<double, 3> c = cmf.at(grid_nm[i]);
    acc.X += w * s * f * c[0];
    acc.Y += w * s * f * c[1];
    acc.Z += w * s * f * c[2];
    norm += w * s * c[1];
  }
  if (norm <= 0.0) {
    throw GridMismatch("illuminant has no power over the CMF support");
  }
  const double k = 1.0 / norm;
  return {k * acc.X, k * acc.Y, k * acc.Z};
}

UvPrime xyz_to_uv_prime(const Xyz& xyz) {
  const double den = xyz.X + 15.0 * xyz.Y + 3.0 * xyz.Z;
  if (!(den > 0.0)) {
    throw DegenerateColor("all-zero tristimulus has no chromaticity");
  }
  return {4.0 * xyz.X / den, 9.0 * xyz.Y / den};
}

double uv_distance(const UvPrime& a, const UvPrime& b) {
  return std::hypot(a.u - b.u, a.v - b.v);
}

Rgb xyz_to_linear_rgb(const Xyz& xyz) {
  const double in[3] = {xyz.X, xyz.Y, xyz.Z};
  double out[3];
  for (int r = 0; r < 3; ++r) {
    out[r] = kXyzToRgb[r][0] * in[0] + kXyzToRgb[r][1] * in[1] +
             kXyzToRgb[r][2] * in[2];
    out[r] = std::clamp(out[r], 0.0, 1.0);
  }
  return {out[0], out[1], out[2]};
}

Xyz linear_rgb_to_xyz(const Rgb& rgb) {
  const double in[3] = {rgb.r, rgb.g, rgb.b};
  double out[3];
  for (int r = 0; r < 3; ++r) {
    out[r] = kRgbToXyz[r][0] * in[0] + kRgbToXyz[r][1] * in[1] +
             kRgbToXyz[r][2] * in[2];
  }
  return {out[0], out[1], out[2]};
}

double display_encode(double linear) {
  linear = std::clamp(linear, 0.0, 1.0);
  return linear <= 0.0031308 ? 12.92 * linear
                             : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

double display_decode(double encoded) {
  encoded = std::clamp(encoded, 0.0, 1.0);
  return encoded <= 0.04045 ? encoded / 12.92
                            : std::pow((encoded + 0.055) / 1.055, 2.4);
}

Rgb xyz_to_display_rgb(const Xyz& xyz) {
  const Rgb lin = xyz_to_linear_rgb(xyz);
  return {display_encode(lin.r), display_encode(lin.g), display_encode(lin.b)};
}

ChromaticityResult chromaticity(std::span<const double> grid_nm,
                                std::span<const double> factor,
                                const Illuminant& illuminant,
                                const ColorMatchingTable& cmf) {
  ChromaticityResult out;
  out.xyz = spectrum_to_xyz(grid_nm, factor, illuminant, cmf);
  out.uv = xyz_to_uv_prime(out.xyz);
  out.rgb = xyz_to_display_rgb(out.xyz);
  return out;
}

ModeColors classify_mode_colors(const StackSpec& stack,
                                const Illuminant& illuminant,
                                const ColorMatchingTable& cmf,
                                std::span<const double> grid_nm) {
  const SpectralResponse sr =
      simulate(stack, grid_nm, {0.0, Polarization::unpolarized});
  ModeColors mc;
  mc.reflection = chromaticity(sr.grid_nm, sr.R, illuminant, cmf);
  mc.transmission = chromaticity(sr.grid_nm, sr.T, illuminant, cmf);
  return mc;
}

}  // namespace mimitag
