#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "aquaaug/bench.hpp"
#include "aquaaug/codec.hpp"
#include "aquaaug/optics.hpp"
#include "aquaaug/pipeline.hpp"
#include "aquaaug/preview.hpp"
#include "aquaaug/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace aquaaug;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartial = 2;

void setup_logging(const std::string& level) {
  auto logger = spdlog::stderr_color_mt("aquaaug");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  std::string lvl = level;
  if (lvl.empty())
    if (const char* env = std::getenv("AQUAAUG_LOG")) lvl = env;
  spdlog::set_level(lvl.empty() ? spdlog::level::warn : spdlog::level::from_str(lvl));
}

PipelineConfig config_or_default(const std::string& path, std::optional<std::uint64_t> seed,
                                 std::optional<int> threads) {
  PipelineConfig cfg = path.empty() ? PipelineConfig{} : load_config(path);
  if (seed) cfg.global_seed = *seed;
  if (threads) cfg.threads = *threads;
  cfg.validate();
  return cfg;
}

struct AugmentArgs {
  std::string config, input, output, manifest, replay;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

int cmd_augment(const AugmentArgs& a) {
  std::optional<DatasetLayout> out;
  if (!a.output.empty()) out = DatasetLayout::under(a.output);
  const Dataset ds = Dataset::open(DatasetLayout::under(a.input));

  if (!a.replay.empty()) {
    const auto records = read_manifest(fs::path(a.replay));
    const int threads = resolve_threads(a.threads.value_or(0));
    const ReplayReport rep = replay_manifest(records, ds, out, threads);
    for (const auto& id : rep.mismatched) std::cerr << "checksum mismatch: " << id << "\n";
    for (const auto& id : rep.missing) std::cerr << "no input image for: " << id << "\n";
    std::cout << "replayed " << rep.matched << " images, " << rep.mismatched.size()
              << " mismatched, " << rep.missing.size() << " missing\n";
    return rep.ok() ? kOk : kPartial;
  }

  const PipelineContext ctx(config_or_default(a.config, a.seed, a.threads));
  RunOptions opts;
  opts.output = out;
  if (!a.manifest.empty())
    opts.manifest_path = fs::path(a.manifest);
  else if (out)
    opts.manifest_path = fs::path(a.output) / "manifest.jsonl";
  if (opts.output) fs::create_directories(a.output);
  const RunResult res = run_pipeline(ctx, ds, opts);
  for (const auto& f : res.failures) std::cerr << "skipped: " << f.what() << "\n";
  std::cout << "images processed: " << res.records.size() << "\n"
            << "images skipped: " << res.failures.size() << "\n"
            << "boxes dropped: " << (res.boxes_in - res.boxes_out) << "\n";
  return res.exit_code();
}

struct PreviewArgs {
  std::string config, input, output;
  std::optional<std::uint64_t> seed;
  bool independent = false;
};

int cmd_preview(const PreviewArgs& a) {
  const PipelineContext ctx(config_or_default(a.config, a.seed, std::nullopt));
  Sample s;
  try {
    s.image = read_image(a.input);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  s.annotations.image_id = fs::path(a.input).stem().string();
  const auto panels = preview_panels(ctx, s, {a.independent});
  write_png(a.output, compose_grid(panels));
  std::cout << "wrote " << panels.size() << "-panel preview to " << a.output << "\n";
  return kOk;
}

struct KernelArgs {
  std::string type = "psf", format = "csv", output, png;
  double lambda_scatter = 1.0, lambda_turb = 1.0;
  std::optional<int> radius;
  double sigma_ref = 1.5, z_ref = 5.0, z = 5.0, exponent = 0.78;
};

int cmd_kernel(const KernelArgs& a) {
  const PsfKernel k = a.type == "psf"
                          ? build_psf({a.lambda_scatter, a.lambda_turb, a.radius})
                          : build_depth_gaussian({a.sigma_ref, a.z_ref, a.z, a.exponent});
  if (!a.png.empty()) {
    double peak = 0.0;
    for (double w : k.weights) peak = std::max(peak, w);
    std::vector<float> px(k.weights.size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<float>(k.weights[i] / peak);
    write_png(a.png, ImageBuffer(k.side, k.side, 1, std::move(px)));
  }
  std::string text;
  if (a.format == "json") {
    nlohmann::ordered_json j;
    j["type"] = a.type;
    j["side"] = k.side;
    j["weights"] = k.weights;
    text = j.dump() + "\n";
  } else {
    char buf[32];
    for (int r = 0; r < k.side; ++r) {
      for (int c = 0; c < k.side; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", k.at(r, c));
        text += (c ? "," : "") + std::string(buf);
      }
      text += "\n";
    }
  }
  if (a.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(a.output, std::ios::binary);
    f << text;
    if (!f) throw IoFailure("cannot write " + a.output);
  }
  return kOk;
}

int cmd_selfcheck() {
  const auto results = run_selfcheck();
  std::cout << format_check_table(results);
  for (const auto& r : results)
    if (!r.passed) return kConfigError;
  return kOk;
}

struct BenchArgs {
  std::string config, input, json;
  std::optional<std::uint64_t> seed;
  int reps = 3;
};

int cmd_bench(const BenchArgs& a) {
  const PipelineContext ctx(config_or_default(a.config, a.seed, std::nullopt));
  const Dataset ds = Dataset::open(DatasetLayout::under(a.input));
  if (ds.size() == 0) {
    std::cerr << "error: no images under " << a.input << "\n";
    return kConfigError;
  }
  const BenchReport rep = run_bench(ctx, ds, a.reps);
  std::cout << rep.to_table();
  if (a.json.empty()) {
    std::cout << rep.to_json() << "\n";
  } else {
    std::ofstream f(a.json, std::ios::binary);
    f << rep.to_json() << "\n";
    if (!f) throw IoFailure("cannot write " + a.json);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Underwater detection data augmentation toolkit"};
  app.require_subcommand(1, 1);
  std::string log_level;
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off (default: $AQUAAUG_LOG or warn)");

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Augment a dataset and write images, labels and a manifest");
  augment->add_option("--config", aug.config, "Pipeline config (JSON)");
  augment->add_option("--input", aug.input, "Input dataset root (images/, labels/)")->required();
  augment->add_option("--output", aug.output, "Output dataset root");
  augment->add_option("--manifest", aug.manifest, "Manifest path (default: <output>/manifest.jsonl)");
  augment->add_option("--seed", aug.seed, "Override the config's global seed");
  augment->add_option("--threads", aug.threads, "Worker threads (0 = auto)")->check(CLI::NonNegativeNumber);
  augment->add_option("--replay", aug.replay, "Re-apply a manifest instead of drawing parameters; checks checksums");
  augment->callback([&] {
    if (aug.replay.empty() && aug.config.empty())
      throw CLI::RequiredError("--config (or --replay)");
  });

  PreviewArgs pre;
  auto* preview = app.add_subcommand("preview", "Render a labelled panel grid of the enabled stages for one image");
  preview->add_option("--config", pre.config, "Pipeline config (JSON); defaults when omitted");
  preview->add_option("--input", pre.input, "Input image (PNG or JPEG)")->required();
  preview->add_option("--output", pre.output, "Output PNG")->required();
  preview->add_option("--seed", pre.seed, "Override the config's global seed");
  preview->add_flag("--independent", pre.independent, "Apply each stage to the original instead of cumulatively");

  KernelArgs ker;
  auto* kernel = app.add_subcommand("kernel", "Print a blur kernel");
  kernel->add_option("--type", ker.type, "psf or gaussian")->check(CLI::IsMember({"psf", "gaussian"}))->capture_default_str();
  kernel->add_option("--lambda-scatter", ker.lambda_scatter, "PSF scatter length, px")->capture_default_str();
  kernel->add_option("--lambda-turb", ker.lambda_turb, "PSF turbulence length, px")->capture_default_str();
  kernel->add_option("--radius", ker.radius, "PSF radius (default: auto)");
  kernel->add_option("--sigma-ref", ker.sigma_ref, "Gaussian sigma at z_ref, px")->capture_default_str();
  kernel->add_option("--z-ref", ker.z_ref, "Reference depth, m")->capture_default_str();
  kernel->add_option("--z", ker.z, "Depth, m")->capture_default_str();
  kernel->add_option("--exponent", ker.exponent, "Depth exponent")->capture_default_str();
  kernel->add_option("--format", ker.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  kernel->add_option("--output", ker.output, "Write to this file instead of stdout");
  kernel->add_option("--png", ker.png, "Also write a grayscale heatmap (peak = white)");

  auto* selfcheck = app.add_subcommand("selfcheck", "Run the invariant and gradient suite");

  BenchArgs ben;
  auto* bench = app.add_subcommand("bench", "Measure per-stage and end-to-end throughput");
  bench->add_option("--config", ben.config, "Pipeline config (JSON); defaults when omitted");
  bench->add_option("--input", ben.input, "Input dataset root")->required();
  bench->add_option("--reps", ben.reps, "Repetitions")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seed", ben.seed, "Override the config's global seed");
  bench->add_option("--json", ben.json, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  setup_logging(log_level);

  try {
    if (*augment) return cmd_augment(aug);
    if (*preview) return cmd_preview(pre);
    if (*kernel) return cmd_kernel(ker);
    if (*selfcheck) return cmd_selfcheck();
    if (*bench) return cmd_bench(ben);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
