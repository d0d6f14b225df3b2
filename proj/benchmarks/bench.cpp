#include <benchmark/benchmark.h>

#include <filesystem>
#include <memory>

#include "mimitag/color.hpp"
#include "mimitag/qr.hpp"
#include "mimitag/tag.hpp"
#include "mimitag/tmm.hpp"

using namespace mimitag;

namespace {

const std::filesystem::path kData = BENCHDATA_DIR;

MaterialRef load(const char* file) {
  return std::make_shared<MaterialDispersion>(
      load_material_file((kData / "materials" / file).string()));
}

StackSpec paper_stack() {
  static const MaterialRef ag = load("ag.csv");
  static const MaterialRef zno = load("zno.csv");
  static const MaterialRef air = std::make_shared<MaterialDispersion>(
      MaterialDispersion::constant("air", 1.0, 0.0));
  static const MaterialRef pet = std::make_shared<MaterialDispersion>(
      MaterialDispersion::constant("pet", 1.57, 0.0));
  StackSpec s;
  s.ambient = air;
  s.exit = pet;
  s.layers = {{zno, 30.0}, {ag, 30.0}, {zno, 150.0}, {ag, 30.0}};
  return s;
}

void BM_simulate_paper_stack(benchmark::State& state) {
  const StackSpec stack = paper_stack();
  const std::vector<double> grid = make_grid(350.0, 800.0, 1.0);
  for (auto _ : state) {
    SpectralResponse r = simulate(stack, grid, {0.0, Polarization::unpolarized});
    benchmark::DoNotOptimize(r.T.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(grid.size()));
}
BENCHMARK(BM_simulate_paper_stack);

void BM_layer_matrix(benchmark::State& state) {
  const Layer layer{load("ag.csv"), 30.0};
  for (auto _ : state) {
    Mat2c m = layer_matrix(layer, 550.0, {0.0, Polarization::s});
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_layer_matrix);

void BM_qr_encode_auto_mask(benchmark::State& state) {
  const std::vector<std::uint8_t> payload =
      qr::random_payload(1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    qr::Symbol s = qr::encode(payload, qr::EcLevel::M);
    benchmark::DoNotOptimize(s.mask);
  }
}
BENCHMARK(BM_qr_encode_auto_mask)->Arg(8)->Arg(24)->Arg(60);

void BM_render_tag(benchmark::State& state) {
  TagModel tag;
  tag.stack = paper_stack();
  tag.symbol = qr::encode(qr::random_payload(7, 16), qr::EcLevel::M);
  tag.pdlc = PdlcModel::named("5CB");
  const ColorMatchingTable cmf = ColorMatchingTable::load_file(
      (kData / "cie" / "cie1931_2deg_5nm.csv").string());
  const Illuminant d65 =
      Illuminant::load_file((kData / "cie" / "d65_5nm.csv").string());
  for (auto _ : state) {
    TagImage img = render_tag(tag, 45.0, ViewMode::reflection, 4, d65, cmf);
    benchmark::DoNotOptimize(img.pixels.data());
  }
}
BENCHMARK(BM_render_tag);

}  // namespace

BENCHMARK_MAIN();
