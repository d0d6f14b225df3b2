#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mimitag/color.hpp"
#include "mimitag/design.hpp"
#include "mimitag/tag.hpp"
#include "mimitag/tmm.hpp"

namespace mimitag::io {

// Round to the given number of significant digits and format with the
// shortest representation ("%.Ng").
std::string format_sig(double value, int significant);
double round_sig(double value, int significant);

// Spectra CSV: "wavelength_nm,R,T,A" header, 9 significant digits.
void write_spectra_csv(std::ostream& out, const SpectralResponse& response);
std::string spectra_csv(const SpectralResponse& response);
SpectralResponse read_spectra_csv(std::istream& in);

// {"X":...,"Y":...,"Z":...,"u_prime":...,"v_prime":...,"rgb":[r,g,b]}
// with 6 significant digits.
std::string chromaticity_json(const ChromaticityResult& result);

// Relative material references resolve against the data directory first,
// then against the referencing file's directory.
struct AssetPaths {
  std::filesystem::path data_dir;
  std::filesystem::path base_dir;  // directory of the file being parsed

  std::filesystem::path resolve(const std::string& relative) const;
};

// Stack JSON: {"ambient": <ref>, "layers": [{"material": <ref>,
// "thickness_nm": x}, ...], "exit": <ref>} where <ref> is {"csv": "path"} or
// {"constant": {"n": x, "k": y}}.
StackSpec load_stack_json(const std::string& text, const AssetPaths& paths);
StackSpec load_stack_file(const std::filesystem::path& file,
                          const std::filesystem::path& data_dir);

struct DesignProblem {
  DesignSpace space;
  std::vector<DesignTarget> targets;
  long budget = 0;
  std::uint64_t seed = 0;
};

DesignProblem load_design_file(const std::filesystem::path& file,
                               const std::filesystem::path& data_dir);
std::string design_result_json(const DesignResult& result);

// Tag JSON: {"stack": <stack>, "payload": "<utf8>", "ec_level": "M",
// "lc": "5CB", "seed": 7}; omitted payload -> deterministic random payload
// from the seed. Optional "mask" (0-7) overrides the auto mask.
TagModel load_tag_file(const std::filesystem::path& file,
                       const std::filesystem::path& data_dir);

}  // namespace mimitag::io
