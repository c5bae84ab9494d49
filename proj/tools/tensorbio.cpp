// tensorbio: batch driver for the compression / biodiversity-error pipeline.
//
// Exit status: 0 when every item succeeded, 1 when some item failed, 2 on a
// usage or configuration error.

#include <algorithm>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tensorbio/kernels.hpp"
#include "tensorbio/pipeline.hpp"

namespace {

using namespace tensorbio;

struct Flags {
  std::string config;
  std::vector<std::string> ranks;
  std::string method;
  std::string layout;
  std::string index;
  double alpha = 0.0;
  double base = 0.0;
  std::string distance;
  std::size_t window = 0;
  std::string border;
  unsigned threads = 0;
  std::string out;
};

struct SynthFlags {
  std::string dir = "synth";
  std::size_t rows = 120;
  std::size_t cols = 150;
  std::size_t images = 3;
  std::uint64_t seed = 1;
};

PipelineConfig build_config(const CLI::App& app, const Flags& f) {
  PipelineConfig c = f.config.empty() ? PipelineConfig{} : load_config(f.config);
  auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  if (given("--rank")) {
    c.ranks.clear();
    for (const auto& r : f.ranks) c.ranks.push_back(parse_rank(r));
  }
  if (given("--method")) c.method = f.method == "t" ? Method::THosvd : Method::StHosvd;
  if (given("--layout")) c.layout = f.layout == "red-dup" ? BandLayout::RedDup : BandLayout::NirDup;
  if (given("--index")) c.index = f.index == "rao" ? IndexKind::Rao : IndexKind::Renyi;
  if (given("--alpha")) c.alpha = f.alpha;
  if (given("--base")) c.base = f.base;
  if (given("--distance")) c.distance = f.distance;
  if (given("--window")) c.window.side = f.window;
  if (given("--border")) {
    c.window.border = f.border == "interior" ? Border::InteriorMissing : Border::Shrink;
  }
  if (given("--threads")) c.threads = f.threads;
  if (given("--out")) c.out = f.out;
  if (c.images.empty()) throw ConfigError("no images configured (pass --config)", 0);
  return c;
}

int report(const std::string& name, const BatchResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
  std::cout << name << ": " << r.outputs.size() << " outputs, " << r.warnings.size() << " warnings, "
            << r.errors.size() << " errors\n";
  return r.ok() ? 0 : 1;
}

void write_synth(const SynthFlags& s) {
  const std::filesystem::path dir = s.dir;
  std::filesystem::create_directories(dir);
  std::string cfg = "# Synthetic scenes written by `tensorbio synth`.\n";
  // Three ranks that all fit the scene: 1/12, 1/4 and 1/2 of the short side.
  const std::size_t side = std::min(s.rows, s.cols);
  cfg += "out = \"out\"\nranks = [";
  for (std::size_t div : {12, 4, 2}) {
    const std::size_t r = std::max<std::size_t>(1, side / div);
    cfg += (div == 12 ? "[" : ", [") + std::to_string(r) + ", " + std::to_string(r) + ", 2]";
  }
  cfg += "]\n";
  for (std::size_t i = 0; i < s.images; ++i) {
    const std::string id = "scene" + std::to_string(i + 1);
    const auto [red, nir] = synthetic_scene(s.rows, s.cols, s.seed + i);
    write_raster(red, dir / (id + "_red.ras"));
    write_raster(nir, dir / (id + "_nir.ras"));
    cfg += "\n[image." + id + "]\nred = \"" + id + "_red.ras\"\nnir = \"" + id + "_nir.ras\"\n";
  }
  std::ofstream(dir / "tensorbio.toml") << cfg;
  std::cout << "synth: wrote " << s.images << " scenes and " << (dir / "tensorbio.toml").string()
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tucker compression of band rasters and the biodiversity-index error it causes"};
  app.fallthrough();
  app.require_subcommand(1);

  Flags f;
  app.add_option("--config", f.config, "Pipeline config file")->check(CLI::ExistingFile);
  app.add_option("--rank", f.ranks, "Multilinear rank r1,r2,r3 (repeatable)")->take_all();
  app.add_option("--method", f.method, "t (T-HOSVD) or st (ST-HOSVD)")
      ->check(CLI::IsMember({"t", "st"}));
  app.add_option("--layout", f.layout, "Band stack layout")
      ->check(CLI::IsMember({"red-dup", "nir-dup"}));
  app.add_option("--index", f.index, "Biodiversity index")->check(CLI::IsMember({"rao", "renyi"}));
  app.add_option("--alpha", f.alpha, "Renyi order");
  app.add_option("--base", f.base, "Renyi logarithm base");
  app.add_option("--distance", f.distance, "Rao distance (euclidean, discrete)");
  app.add_option("--window", f.window, "Odd window side");
  app.add_option("--border", f.border, "Border policy")->check(CLI::IsMember({"interior", "shrink"}));
  app.add_option("--threads", f.threads, "Worker threads, 0 = all cores");
  app.add_option("--out", f.out, "Output directory");
  app.add_flag_callback(
      "--isa-scalar", [] { kernels::set_isa(kernels::Isa::Scalar); },
      "Force the scalar kernels");

  using Command = BatchResult (*)(const PipelineConfig&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"compress", "Decompose the band stacks and write TUCKF001 files", &cmd_compress},
      {"ndvi", "NDVI from the raw bands and from each compressed stack", &cmd_ndvi},
      {"index", "Moving-window index maps of every NDVI raster", &cmd_index},
      {"compare", "Error reports of approximated vs raw index maps", &cmd_compare},
      {"report", "Summary table over the compare reports", &cmd_report},
      {"run", "compress, ndvi, index, compare and report in order", &cmd_run},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "Write synthetic RED/NIR scenes and a config for them");
  synth->add_option("--dir", sf.dir, "Target directory");
  synth->add_option("--rows", sf.rows, "Raster rows")->check(CLI::PositiveNumber);
  synth->add_option("--cols", sf.cols, "Raster columns")->check(CLI::PositiveNumber);
  synth->add_option("--images", sf.images, "Number of scenes")->check(CLI::PositiveNumber);
  synth->add_option("--seed", sf.seed, "Seed of the first scene");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      write_synth(sf);
      return 0;
    }
    const PipelineConfig config = build_config(app, f);
    for (const auto& [name, help, fn] : commands) {
      if (app.got_subcommand(name)) return report(name, fn(config));
    }
  } catch (const std::exception& e) {
    std::cerr << "tensorbio: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
