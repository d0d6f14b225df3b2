#include "mimitag/tag.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace mimitag {

namespace {

// Minimum (maxY - minY) / maxY over module centers before the decoder
// attempts thresholding. Quantized renders at high haze can keep a uniform
// one-LSB residual that no physical reader resolves; hidden tags sit at
// ~0.01, revealed ones at ~0.9.
constexpr double kMinLuminanceModulation = 0.2;

double quantize_255(double encoded) {
  return std::round(std::clamp(encoded, 0.0, 1.0) * 255.0) / 255.0;
}

Rgb mix_and_encode(const Rgb& base, const Rgb& white, double haze) {
  const auto channel = [haze](double b, double w) {
    return quantize_255(display_encode(haze * w + (1.0 - haze) * b));
  };
  return {channel(base.r, white.r), channel(base.g, white.g),
          channel(base.b, white.b)};
}

double linear_luminance(const Rgb& encoded) {
  return 0.2126 * display_decode(encoded.r) + 0.7152 * display_decode(encoded.g) +
         0.0722 * display_decode(encoded.b);
}

struct Geometry {
  int side = 0;   // modules
  int scale = 1;  // pixels per module
};

// The rendered geometry is width = (side + 8) * scale with side one of the
// version-1..4 sizes; dimension inference is unambiguous for those sizes.
Geometry infer_geometry(const TagImage& image) {
  if (image.width != image.height || image.width <= 0) {
    throw NotATag("tag images are square");
  }
  for (int version = 1; version <= 4; ++version) {
    const int side = 17 + 4 * version;
    const int total = side + 2 * kQuietZoneModules;
    if (image.width % total == 0) {
      return {side, image.width / total};
    }
  }
  throw NotATag("image dimensions fit no rendered tag geometry");
}

}  // namespace

PdlcModel PdlcModel::named(std::string_view lc_name) {
  PdlcModel p;
  p.lc_name = std::string(lc_name);
  if (lc_name == "5CB") {
    p.transition_c = 35.0;
  } else if (lc_name == "E7") {
    p.transition_c = 59.0;
  } else if (lc_name == "1825") {
    p.transition_c = 140.0;
  } else {
    throw ValidationError("unknown liquid crystal: " + p.lc_name);
  }
  return p;
}

double pdlc_haze(const PdlcModel& pdlc, double temperature_c) {
  if (!(pdlc.width_c > 0.0)) {
    throw ValidationError("PDLC sigmoid width must be > 0");
  }
  return 1.0 / (1.0 + std::exp((temperature_c - pdlc.transition_c) /
                               pdlc.width_c));
}

TagImage render_tag(const TagModel& tag, double temperature_c, ViewMode mode,
                    int scale, const Illuminant& illuminant,
                    const ColorMatchingTable& cmf) {
  if (scale < 1) {
    throw ValidationError("scale must be >= 1 pixel per module");
  }
  if (!std::isfinite(temperature_c)) {
    throw ValidationError("temperature must be finite");
  }
  if (!(tag.ink_reflectance >= 0.0 && tag.ink_reflectance < 0.2)) {
    throw ValidationError("ink reflectance must lie in [0, 0.2)");
  }

  const std::vector<double> grid = make_grid(350.0, 800.0, 1.0);
  const ModeColors colors = classify_mode_colors(tag.stack, illuminant, cmf, grid);
  const Xyz& xyz =
      mode == ViewMode::reflection ? colors.reflection.xyz : colors.transmission.xyz;
  const Rgb light_base = xyz_to_linear_rgb(xyz);
  const Rgb dark_base =
      mode == ViewMode::reflection
          ? Rgb{tag.ink_reflectance, tag.ink_reflectance, tag.ink_reflectance}
          : Rgb{0.0, 0.0, 0.0};  // ink transmits nothing

  const double haze = pdlc_haze(tag.pdlc, temperature_c);
  const Rgb light_px = mix_and_encode(light_base, tag.white_diffuse, haze);
  const Rgb dark_px = mix_and_encode(dark_base, tag.white_diffuse, haze);

  const int side = tag.symbol.side();
  const int total = side + 2 * kQuietZoneModules;

  TagImage image;
  image.width = total * scale;
  image.height = total * scale;
  image.mode = mode;
  image.temperature_c = temperature_c;
  image.pixels.assign(static_cast<std::size_t>(image.width) * image.height,
                      light_px);  // quiet zone is light base
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (!tag.symbol.modules.get(r, c)) {
        continue;
      }
      const int r0 = (r + kQuietZoneModules) * scale;
      const int c0 = (c + kQuietZoneModules) * scale;
      for (int y = 0; y < scale; ++y) {
        for (int x = 0; x < scale; ++x) {
          image.pixels[static_cast<std::size_t>(r0 + y) * image.width + c0 + x] =
              dark_px;
        }
      }
    }
  }
  return image;
}

AuthResult authenticate(const TagImage& image,
                        std::span<const std::uint8_t> expected_payload,
                        const ModeColors& expected_colors) {
  const Geometry geo = infer_geometry(image);
  const ChromaticityResult& expected = image.mode == ViewMode::reflection
                                           ? expected_colors.reflection
                                           : expected_colors.transmission;

  // Sample module centers.
  std::vector<Rgb> centers;
  std::vector<double> luminance;
  centers.reserve(static_cast<std::size_t>(geo.side) * geo.side);
  for (int r = 0; r < geo.side; ++r) {
    for (int c = 0; c < geo.side; ++c) {
      const int y = (r + kQuietZoneModules) * geo.scale + geo.scale / 2;
      const int x = (c + kQuietZoneModules) * geo.scale + geo.scale / 2;
      centers.push_back(image.at(y, x));
      luminance.push_back(linear_luminance(centers.back()));
    }
  }
  const auto [min_it, max_it] =
      std::minmax_element(luminance.begin(), luminance.end());
  const double modulation =
      *max_it > 0.0 ? (*max_it - *min_it) / *max_it : 0.0;

  AuthResult result;
  std::vector<std::uint8_t> is_light(luminance.size(), 1);
  if (modulation >= kMinLuminanceModulation) {
    double mean = 0.0;
    for (double v : luminance) {
      mean += v;
    }
    mean /= static_cast<double>(luminance.size());

    qr::BitMatrix grid(geo.side);
    for (int r = 0; r < geo.side; ++r) {
      for (int c = 0; c < geo.side; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * geo.side + c;
        const bool dark = luminance[i] < mean;
        grid.set(r, c, dark);
        is_light[i] = dark ? 0 : 1;
      }
    }
    const std::optional<qr::Decoded> decoded = qr::decode(grid);
    result.level1 = decoded.has_value() &&
                    decoded->payload.size() == expected_payload.size() &&
                    std::equal(decoded->payload.begin(), decoded->payload.end(),
                               expected_payload.begin());
  }

  // Level 2: mean light-module color vs the stack's predicted mode color.
  Rgb mean_linear{0.0, 0.0, 0.0};
  std::size_t light_count = 0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!is_light[i]) {
      continue;
    }
    mean_linear.r += display_decode(centers[i].r);
    mean_linear.g += display_decode(centers[i].g);
    mean_linear.b += display_decode(centers[i].b);
    ++light_count;
  }
  if (light_count > 0) {
    mean_linear.r /= static_cast<double>(light_count);
    mean_linear.g /= static_cast<double>(light_count);
    mean_linear.b /= static_cast<double>(light_count);
    try {
      const UvPrime measured = xyz_to_uv_prime(linear_rgb_to_xyz(mean_linear));
      const UvPrime predicted = xyz_to_uv_prime(linear_rgb_to_xyz(
          {display_decode(expected.rgb.r), display_decode(expected.rgb.g),
           display_decode(expected.rgb.b)}));
      result.level2 =
          uv_distance(measured, predicted) <= kLevel2UvTolerance;
    } catch (const DegenerateColor&) {
      result.level2 = false;
    }
  }
  return result;
}

void write_ppm(std::ostream& out, const TagImage& image) {
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  for (const Rgb& px : image.pixels) {
    const unsigned char bytes[3] = {
        static_cast<unsigned char>(std::lround(px.r * 255.0)),
        static_cast<unsigned char>(std::lround(px.g * 255.0)),
        static_cast<unsigned char>(std::lround(px.b * 255.0)),
    };
    out.write(reinterpret_cast<const char*>(bytes), 3);
  }
}

TagImage read_ppm(std::istream& in) {
  std::string magic;
  in >> magic;
  if (magic != "P6") {
    throw ParseError("expected a P6 PPM");
  }
  int width = 0, height = 0, maxval = 0;
  in >> width >> height >> maxval;
  if (!in || width <= 0 || height <= 0 || maxval != 255) {
    throw ParseError("malformed PPM header");
  }
  in.get();  // single whitespace after maxval
  TagImage image;
  image.width = width;
  image.height = height;
  image.pixels.resize(static_cast<std::size_t>(width) * height);
  for (Rgb& px : image.pixels) {
    unsigned char bytes[3];
    in.read(reinterpret_cast<char*>(bytes), 3);
    if (!in) {
      throw ParseError("truncated PPM pixel data");
    }
    px = {bytes[0] / 255.0, bytes[1] / 255.0, bytes[2] / 255.0};
  }
  return image;
}

}  // namespace mimitag
