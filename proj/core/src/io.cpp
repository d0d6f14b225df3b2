#include "mimitag/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mimitag::io {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw ParseError("malformed JSON in " + what);
  }
  return doc;
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open file: " + file.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ParseError(std::string("missing numeric field '") + key + "'");
  }
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) {
    throw ParseError(std::string("field '") + key + "' must be finite");
  }
  return v;
}

MaterialRef parse_material_ref(const json& j, const AssetPaths& paths) {
  if (j.is_object() && j.contains("constant")) {
    const json& c = j["constant"];
    const double n = require_number(c, "n");
    const double k = require_number(c, "k");
    char name[64];
    std::snprintf(name, sizeof name, "constant(n=%g,k=%g)", n, k);
    return std::make_shared<MaterialDispersion>(
        MaterialDispersion::constant(name, n, k));
  }
  if (j.is_object() && j.contains("csv") && j["csv"].is_string()) {
    const std::filesystem::path resolved =
        paths.resolve(j["csv"].get<std::string>());
    return std::make_shared<MaterialDispersion>(
        load_material_file(resolved.string()));
  }
  throw ParseError("material reference must be {\"csv\": ...} or "
                   "{\"constant\": {\"n\": ..., \"k\": ...}}");
}

StackSpec parse_stack(const json& j, const AssetPaths& paths) {
  if (!j.is_object() || !j.contains("ambient") || !j.contains("exit") ||
      !j.contains("layers") || !j["layers"].is_array()) {
    throw ParseError("stack needs 'ambient', 'layers' and 'exit'");
  }
  StackSpec stack;
  stack.ambient = parse_material_ref(j["ambient"], paths);
  stack.exit = parse_material_ref(j["exit"], paths);
  for (const json& layer : j["layers"]) {
    const double d = require_number(layer, "thickness_nm");
    if (!(d > 0.0)) {
      throw ValidationError("layer thickness must be > 0");
    }
    if (!layer.contains("material")) {
      throw ParseError("layer needs a 'material' reference");
    }
    stack.layers.push_back({parse_material_ref(layer["material"], paths), d});
  }
  return stack;
}

Channel parse_channel(const json& j) {
  const std::string c = j.is_string() ? j.get<std::string>() : "";
  if (c == "R") {
    return Channel::R;
  }
  if (c == "T") {
    return Channel::T;
  }
  throw ParseError("channel must be \"R\" or \"T\"");
}

}  // namespace

std::string format_sig(double value, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, value);
  return buf;
}

double round_sig(double value, int significant) {
  return std::strtod(format_sig(value, significant).c_str(), nullptr);
}

void write_spectra_csv(std::ostream& out, const SpectralResponse& response) {
  out << "wavelength_nm,R,T,A\n";
  char buf[160];
  for (std::size_t i = 0; i < response.grid_nm.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g\n",
                  response.grid_nm[i], response.R[i], response.T[i],
                  response.A[i]);
    out << buf;
  }
}

std::string spectra_csv(const SpectralResponse& response) {
  std::ostringstream ss;
  write_spectra_csv(ss, response);
  return ss.str();
}

SpectralResponse read_spectra_csv(std::istream& in) {
  SpectralResponse r;
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
    if (!header_seen) {
      if (line != "wavelength_nm,R,T,A") {
        throw ParseError("expected header 'wavelength_nm,R,T,A'");
      }
      header_seen = true;
      continue;
    }
    double wl, R, T, A;
    char trailing = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf%c", &wl, &R, &T, &A,
                    &trailing) != 4) {
      throw ParseError("malformed spectra row " + std::to_string(line_no));
    }
    r.grid_nm.push_back(wl);
    r.R.push_back(R);
    r.T.push_back(T);
    r.A.push_back(A);
  }
  if (!header_seen || r.grid_nm.empty()) {
    throw ParseError("empty spectra CSV");
  }
  return r;
}

std::string chromaticity_json(const ChromaticityResult& result) {
  std::ostringstream ss;
  const auto num = [](double v) { return format_sig(v, 6); };
  ss << "{\"X\":" << num(result.xyz.X) << ",\"Y\":" << num(result.xyz.Y)
     << ",\"Z\":" << num(result.xyz.Z) << ",\"u_prime\":" << num(result.uv.u)
     << ",\"v_prime\":" << num(result.uv.v) << ",\"rgb\":["
     << num(result.rgb.r) << "," << num(result.rgb.g) << ","
     << num(result.rgb.b) << "]}";
  return ss.str();
}

std::filesystem::path AssetPaths::resolve(const std::string& relative) const {
  std::filesystem::path p(relative);
  if (p.is_absolute()) {
    return p;
  }
  if (!data_dir.empty() && std::filesystem::exists(data_dir / p)) {
    return data_dir / p;
  }
  if (!base_dir.empty() && std::filesystem::exists(base_dir / p)) {
    return base_dir / p;
  }
  return p;  // last resort: relative to the working directory
}

StackSpec load_stack_json(const std::string& text, const AssetPaths& paths) {
  return parse_stack(parse_json(text, "stack"), paths);
}

StackSpec load_stack_file(const std::filesystem::path& file,
                          const std::filesystem::path& data_dir) {
  const AssetPaths paths{data_dir, file.parent_path()};
  return load_stack_json(slurp(file), paths);
}

DesignProblem load_design_file(const std::filesystem::path& file,
                               const std::filesystem::path& data_dir) {
  const AssetPaths paths{data_dir, file.parent_path()};
  const json doc = parse_json(slurp(file), file.string());
  if (!doc.contains("stack") || !doc.contains("bounds") ||
      !doc.contains("targets")) {
    throw ParseError("design file needs 'stack', 'bounds' and 'targets'");
  }

  DesignProblem problem;
  problem.space.stack = parse_stack(doc["stack"], paths);
  const std::size_t n = problem.space.stack.layers.size();

  if (!doc["bounds"].is_array() || doc["bounds"].size() != n) {
    throw ParseError("'bounds' must list [min,max] per layer");
  }
  for (const json& b : doc["bounds"]) {
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() ||
        !b[1].is_number()) {
      throw ParseError("'bounds' entries must be [min_nm, max_nm]");
    }
    problem.space.bounds.push_back({b[0].get<double>(), b[1].get<double>()});
  }
  if (doc.contains("frozen")) {
    if (!doc["frozen"].is_array() || doc["frozen"].size() != n) {
      throw ParseError("'frozen' must list one flag per layer");
    }
    for (const json& f : doc["frozen"]) {
      if (!f.is_boolean()) {
        throw ParseError("'frozen' entries must be booleans");
      }
      problem.space.frozen.push_back(f.get<bool>());
    }
  } else {
    problem.space.frozen.assign(n, false);
  }

  for (const json& t : doc["targets"]) {
    if (!t.is_object() || !t.contains("kind") || !t["kind"].is_string()) {
      throw ParseError("target needs a string 'kind'");
    }
    const std::string kind = t["kind"].get<std::string>();
    const double weight =
        t.contains("weight") ? require_number(t, "weight") : 1.0;
    if (kind == "peak_at") {
      problem.targets.push_back(DesignTarget::peak_at(
          require_number(t, "lambda_nm"), parse_channel(t["channel"]), weight));
    } else if (kind == "value_at") {
      problem.targets.push_back(DesignTarget::value_at(
          require_number(t, "lambda_nm"), parse_channel(t["channel"]),
          require_number(t, "target"), weight));
    } else if (kind == "mode_color_separation") {
      problem.targets.push_back(DesignTarget::mode_color_separation(
          require_number(t, "min_distance"), weight));
    } else {
      throw ParseError("unknown target kind: " + kind);
    }
  }

  problem.budget = doc.contains("budget")
                       ? static_cast<long>(require_number(doc, "budget"))
                       : 20000;
  problem.seed = doc.contains("seed")
                     ? static_cast<std::uint64_t>(require_number(doc, "seed"))
                     : 0;
  return problem;
}

std::string design_result_json(const DesignResult& result) {
  std::ostringstream ss;
  ss << "{\"thicknesses_nm\":[";
  for (std::size_t i = 0; i < result.thicknesses_nm.size(); ++i) {
    ss << (i ? "," : "") << format_sig(result.thicknesses_nm[i], 9);
  }
  ss << "],\"objective\":" << format_sig(result.objective, 9)
     << ",\"evaluations\":" << result.evaluations
     << ",\"converged\":" << (result.converged ? "true" : "false") << "}";
  return ss.str();
}

TagModel load_tag_file(const std::filesystem::path& file,
                       const std::filesystem::path& data_dir) {
  const AssetPaths paths{data_dir, file.parent_path()};
  const json doc = parse_json(slurp(file), file.string());
  if (!doc.contains("stack") || !doc.contains("lc")) {
    throw ParseError("tag file needs 'stack' and 'lc'");
  }

  TagModel tag;
  tag.stack = parse_stack(doc["stack"], paths);
  if (!doc["lc"].is_string()) {
    throw ParseError("'lc' must be a string");
  }
  tag.pdlc = PdlcModel::named(doc["lc"].get<std::string>());

  qr::EcLevel ec = qr::EcLevel::M;
  if (doc.contains("ec_level")) {
    const std::string e =
        doc["ec_level"].is_string() ? doc["ec_level"].get<std::string>() : "";
    if (e == "L") {
      ec = qr::EcLevel::L;
    } else if (e == "M") {
      ec = qr::EcLevel::M;
    } else if (e == "Q") {
      ec = qr::EcLevel::Q;
    } else if (e == "H") {
      ec = qr::EcLevel::H;
    } else {
      throw ParseError("'ec_level' must be L, M, Q or H");
    }
  }

  const std::uint64_t seed =
      doc.contains("seed") ? static_cast<std::uint64_t>(require_number(doc, "seed"))
                           : 0;
  std::vector<std::uint8_t> payload;
  if (doc.contains("payload")) {
    if (!doc["payload"].is_string()) {
      throw ParseError("'payload' must be a string");
    }
    const std::string s = doc["payload"].get<std::string>();
    payload.assign(s.begin(), s.end());
  } else {
    payload = qr::random_payload(seed, 16);
  }

  int mask = qr::kAutoMask;
  if (doc.contains("mask")) {
    mask = static_cast<int>(require_number(doc, "mask"));
  }
  tag.symbol = qr::encode(payload, ec, mask);
  return tag;
}

}  // namespace mimitag::io
