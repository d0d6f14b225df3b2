#pragma once

#include <iosfwd>
#include <span>
#include <string_view>

#include "mimitag/color.hpp"
#include "mimitag/qr.hpp"
#include "mimitag/tmm.hpp"

namespace mimitag {

// Polymer-dispersed liquid crystal: scatters (haze ~ 1) below the
// nematic-isotropic transition, clears above it.
struct PdlcModel {
  std::string lc_name;
  double transition_c = 0.0;
  double width_c = 2.0;

  // "5CB" -> 35 C, "E7" -> 59 C, "1825" -> 140 C; throws ValidationError on
  // unknown names.
  static PdlcModel named(std::string_view lc_name);
};

// haze = 1 / (1 + exp((T - transition) / width)); 0.5 at the transition,
// strictly decreasing in T.
double pdlc_haze(const PdlcModel& pdlc, double temperature_c);

enum class ViewMode { reflection, transmission };

struct TagModel {
  StackSpec stack;
  qr::Symbol symbol;
  PdlcModel pdlc;
  double ink_reflectance = 0.05;        // dark modules; must stay < 0.2
  Rgb white_diffuse{0.92, 0.92, 0.92};  // scattering state, linear light
};

// Rendered snapshot. Pixels are display-encoded and quantized to 1/255 steps
// (exactly what the PPM stores).
struct TagImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
  ViewMode mode = ViewMode::reflection;
  double temperature_c = 25.0;

  const Rgb& at(int row, int col) const { return pixels[row * width + col]; }
};

inline constexpr int kQuietZoneModules = 4;

// Light modules carry the stack's R (reflection) or T (transmission) color
// under the given illuminant; dark modules the flat ink color (nothing in
// transmission). Haze mixes every module toward white_diffuse in linear
// light before the display transfer.
TagImage render_tag(const TagModel& tag, double temperature_c, ViewMode mode,
                    int scale, const Illuminant& illuminant,
                    const ColorMatchingTable& cmf);

struct AuthResult {
  bool level1 = false;  // QR payload recovered
  bool level2 = false;  // mode color matches the reference stack
};

inline constexpr double kLevel2UvTolerance = 0.05;

// Closed-loop check of a rendered image. Level 1 thresholds module centers at
// the mean luminance and re-decodes; level 2 compares the mean light-module
// chromaticity against the expected mode color of the reference stack (the
// u'v' of its displayed color, per image mode). Throws NotATag when the image
// dimensions fit no rendered tag geometry.
AuthResult authenticate(const TagImage& image,
                        std::span<const std::uint8_t> expected_payload,
                        const ModeColors& expected_colors);

// Binary PPM (P6, maxval 255).
void write_ppm(std::ostream& out, const TagImage& image);
TagImage read_ppm(std::istream& in);

}  // namespace mimitag
