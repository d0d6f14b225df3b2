// Thin-film optics workbench: simulate multilayer spectra, compute CIE
// colors, optimize layer thicknesses, and render/authenticate simulated
// thermochromic QR tags.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mimitag/color.hpp"
#include "mimitag/design.hpp"
#include "mimitag/io.hpp"
#include "mimitag/tag.hpp"
#include "mimitag/tmm.hpp"

namespace fs = std::filesystem;
using namespace mimitag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAuthFail = 1;
constexpr int kExitBadInput = 2;

fs::path default_data_dir() {
  const fs::path installed = MIMITAG_INSTALL_DATA_DIR;
  if (fs::exists(installed)) {
    return installed;
  }
  return fs::path(MIMITAG_SOURCE_DATA_DIR);
}

struct GridSpec {
  double min_nm = 350.0;
  double max_nm = 800.0;
  double step_nm = 1.0;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char trailing = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &g.min_nm, &g.max_nm,
                  &g.step_nm, &trailing) != 3) {
    throw ValidationError("grid must be min:max:step, e.g. 350:800:1");
  }
  return g;
}

Polarization parse_pol(const std::string& text) {
  if (text == "s") {
    return Polarization::s;
  }
  if (text == "p") {
    return Polarization::p;
  }
  if (text == "u" || text == "unpolarized") {
    return Polarization::unpolarized;
  }
  throw ValidationError("polarization must be s, p or unpolarized");
}

struct ColorTables {
  Illuminant illuminant;
  ColorMatchingTable cmf;
};

ColorTables load_tables(const fs::path& data_dir, const std::string& illum) {
  ColorTables t{Illuminant::equal_energy(),
                ColorMatchingTable::load_file(
                    (data_dir / "cie" / "cie1931_2deg_5nm.csv").string())};
  if (illum == "d65") {
    t.illuminant =
        Illuminant::load_file((data_dir / "cie" / "d65_5nm.csv").string());
  } else if (illum != "ee") {
    throw ValidationError("illuminant must be d65 or ee");
  }
  return t;
}

std::string extrema_json(const SpectralResponse& sr) {
  const auto list = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += (i ? "," : "") + io::format_sig(v[i], 9);
    }
    return s + "]";
  };
  std::string out = "{";
  out += "\"T\":{\"maxima_nm\":" + list(local_maxima(sr.grid_nm, sr.T)) +
         ",\"minima_nm\":" + list(local_minima(sr.grid_nm, sr.T)) + "},";
  out += "\"R\":{\"maxima_nm\":" + list(local_maxima(sr.grid_nm, sr.R)) +
         ",\"minima_nm\":" + list(local_minima(sr.grid_nm, sr.R)) + "}";
  return out + "}";
}

int cmd_simulate(const fs::path& stack_file, const std::string& grid_text,
                 double angle_deg, const std::string& pol_text,
                 const fs::path& out_csv, const fs::path& data_dir) {
  const GridSpec g = parse_grid(grid_text);
  const StackSpec stack = io::load_stack_file(stack_file, data_dir);
  const std::vector<double> grid = make_grid(g.min_nm, g.max_nm, g.step_nm);
  const SpectralResponse sr =
      simulate(stack, grid, {angle_deg, parse_pol(pol_text)});

  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::binary);
    if (!out) {
      throw ValidationError("cannot write " + out_csv.string());
    }
    io::write_spectra_csv(out, sr);
  }
  std::cout << extrema_json(sr) << "\n";
  return kExitOk;
}

int cmd_color(const fs::path& input, const std::string& mode,
              const std::string& illum, const fs::path& data_dir) {
  if (mode != "R" && mode != "T") {
    throw ValidationError("--mode must be R or T");
  }
  const ColorTables tables = load_tables(data_dir, illum);

  SpectralResponse sr;
  if (input.extension() == ".csv") {
    std::ifstream in(input, std::ios::binary);
    if (!in) {
      throw ValidationError("cannot open " + input.string());
    }
    sr = io::read_spectra_csv(in);
  } else {
    const StackSpec stack = io::load_stack_file(input, data_dir);
    sr = simulate(stack, make_grid(350.0, 800.0, 1.0),
                  {0.0, Polarization::unpolarized});
  }
  const std::vector<double>& factor = mode == "R" ? sr.R : sr.T;
  const ChromaticityResult result =
      chromaticity(sr.grid_nm, factor, tables.illuminant, tables.cmf);
  std::cout << io::chromaticity_json(result) << "\n";
  return kExitOk;
}

int cmd_optimize(const fs::path& design_file, const fs::path& out_json,
                 const fs::path& data_dir) {
  const io::DesignProblem problem = io::load_design_file(design_file, data_dir);

  ObjectiveSetup setup = ObjectiveSetup::standard();
  ColorTables tables = load_tables(data_dir, "d65");
  setup.illuminant = &tables.illuminant;
  setup.cmf = &tables.cmf;

  const DesignResult result = optimize(problem.space, problem.targets,
                                       problem.budget, problem.seed, setup);
  const std::string text = io::design_result_json(result);
  if (!out_json.empty()) {
    std::ofstream out(out_json, std::ios::binary);
    if (!out) {
      throw ValidationError("cannot write " + out_json.string());
    }
    out << text << "\n";
  }
  std::cout << text << "\n";
  return kExitOk;
}

int cmd_tag(const fs::path& tag_file, double temperature_c,
            const std::string& mode_text, const fs::path& render_ppm,
            bool do_authenticate, int scale, const fs::path& data_dir) {
  if (mode_text != "reflection" && mode_text != "transmission") {
    throw ValidationError("--mode must be reflection or transmission");
  }
  const ViewMode mode = mode_text == "reflection" ? ViewMode::reflection
                                                  : ViewMode::transmission;
  const TagModel tag = io::load_tag_file(tag_file, data_dir);
  const ColorTables tables = load_tables(data_dir, "d65");

  const TagImage image =
      render_tag(tag, temperature_c, mode, scale, tables.illuminant, tables.cmf);

  if (!render_ppm.empty()) {
    std::ofstream out(render_ppm, std::ios::binary);
    if (!out) {
      throw ValidationError("cannot write " + render_ppm.string());
    }
    write_ppm(out, image);
  }
  if (!do_authenticate) {
    return kExitOk;
  }
  const ModeColors expected = classify_mode_colors(
      tag.stack, tables.illuminant, tables.cmf, make_grid(350.0, 800.0, 1.0));
  const AuthResult auth = authenticate(image, tag.symbol.payload, expected);
  std::cout << "{\"level1\":\"" << (auth.level1 ? "pass" : "fail")
            << "\",\"level2\":\"" << (auth.level2 ? "pass" : "fail") << "\"}\n";
  return auth.level1 && auth.level2 ? kExitOk : kExitAuthFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MIMI nanocavity tag workbench"};
  app.require_subcommand(1);

  std::string data_dir_text = default_data_dir().string();
  app.add_option("--data-dir", data_dir_text,
                 "Directory holding bundled material and CIE assets")
      ->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Spectral response of a stack");
  std::string sim_stack, sim_grid = "350:800:1", sim_pol = "unpolarized";
  std::string sim_out;
  double sim_angle = 0.0;
  sim->add_option("stack", sim_stack, "Stack JSON file")->required();
  sim->add_option("--grid", sim_grid, "min:max:step in nm")
      ->capture_default_str();
  sim->add_option("--angle", sim_angle, "Incidence angle, degrees")
      ->capture_default_str();
  sim->add_option("--pol", sim_pol, "s | p | unpolarized")
      ->capture_default_str();
  sim->add_option("--out", sim_out, "Spectra CSV output path");

  auto* color = app.add_subcommand("color", "CIE chromaticity of a spectrum");
  std::string color_input, color_mode = "R", color_illum = "d65";
  color->add_option("input", color_input, "Stack JSON or spectra CSV")
      ->required();
  color->add_option("--mode", color_mode, "R | T")->capture_default_str();
  color->add_option("--illuminant", color_illum, "d65 | ee")
      ->capture_default_str();

  auto* opt = app.add_subcommand("optimize", "Thickness optimization");
  std::string opt_design, opt_out;
  opt->add_option("design", opt_design, "Design problem JSON file")->required();
  opt->add_option("--out", opt_out, "Result JSON output path");

  auto* tag = app.add_subcommand("tag", "Render or authenticate a tag");
  std::string tag_file, tag_mode = "reflection", tag_render;
  double tag_temp = 25.0;
  bool tag_auth = false;
  int tag_scale = 8;
  tag->add_option("tag", tag_file, "Tag JSON file")->required();
  tag->add_option("--temp", tag_temp, "Temperature, Celsius")
      ->capture_default_str();
  tag->add_option("--mode", tag_mode, "reflection | transmission")
      ->capture_default_str();
  tag->add_option("--render", tag_render, "Write a PPM image here");
  tag->add_option("--scale", tag_scale, "Pixels per module")
      ->capture_default_str();
  tag->add_flag("--authenticate", tag_auth, "Run the closed-loop check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    app.exit(e);
    return kExitBadInput;
  }

  try {
    const fs::path data_dir(data_dir_text);
    if (sim->parsed()) {
      return cmd_simulate(sim_stack, sim_grid, sim_angle, sim_pol, sim_out,
                          data_dir);
    }
    if (color->parsed()) {
      return cmd_color(color_input, color_mode, color_illum, data_dir);
    }
    if (opt->parsed()) {
      return cmd_optimize(opt_design, opt_out, data_dir);
    }
    if (tag->parsed()) {
      return cmd_tag(tag_file, tag_temp, tag_mode, tag_render, tag_auth,
                     tag_scale, data_dir);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
