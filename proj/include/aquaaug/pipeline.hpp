#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aquaaug/dataio.hpp"
#include "aquaaug/errors.hpp"
#include "aquaaug/occlusion.hpp"
#include "aquaaug/optics.hpp"
#include "aquaaug/spectral.hpp"

namespace aquaaug {

enum class StageKind { Flip, Blur, Hsv, Erase, Letterbox, Normalize };

const char* to_string(StageKind k);
StageKind parse_stage_kind(const std::string& s);

/// Closed interval [lo, hi] that a per-image parameter is drawn from.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

enum class BlurMode { Psf, Gaussian, Both };

const char* to_string(BlurMode m);

struct FlipStage {
  bool enabled = true;
  double probability = 0.5;
};

struct BlurStage {
  bool enabled = true;
  double probability = 0.5;
  BlurMode mode = BlurMode::Both;
  Range lambda_scatter{0.5, 2.0};  // px
  Range lambda_turb{0.5, 2.0};     // px
  std::optional<int> psf_radius;
  double sigma_ref = 1.5;  // px at z_ref
  double z_ref = 5.0;      // m
  double exponent = 0.78;
};

struct HsvStage {
  bool enabled = true;
  double probability = 0.5;
  Range beta{0.0, 0.4};
  double hue_jitter = 0.0;  // degrees, uniform +/- around the spectral shift
  double c_d = 0.05;        // 1/m
  double irradiance_ratio = 1.0;
  std::optional<std::filesystem::path> spectral_table;  // bundled table when unset
};

struct EraseStage {
  bool enabled = true;
  EraseConfig erase;  // erase.probability gates the stage
};

struct PipelineConfig {
  /// Augmentation order; letterbox and normalize always follow.
  std::vector<StageKind> order{StageKind::Flip, StageKind::Blur, StageKind::Hsv, StageKind::Erase};
  FlipStage flip;
  BlurStage blur;
  HsvStage hsv;
  EraseStage erase;
  Range depth{1.0, 10.0};  // scene optical depth z, m
  std::uint64_t global_seed = 0;
  int target_size = 640;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
  bool enabled(StageKind k) const;
  /// Enabled augmentations in order, then letterbox and normalize.
  std::vector<StageKind> stage_sequence() const;
};

/// Parse the JSON config document. Unknown keys are errors. Throws ConfigError.
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& cfg);

// ---- manifest records -------------------------------------------------------

struct FlipRecord {
  bool applied = false;
};

struct BlurRecord {
  bool applied = false;
  std::vector<std::variant<PsfParams, DepthKernelParams>> kernels;
};

struct HsvRecord {
  bool applied = false;
  double delta_h = 0.0;
  WaterParams water;
};

struct EraseStageRecord {
  bool applied = false;
  EraseFill fill = EraseFill::UniformNoise;
  double drop_visibility_below = 0.2;
  EraseRecord erase;
};

struct LetterboxRecord {
  int target = 640;
  int dropped = 0;
};

struct NormalizeRecord {};

using StageRecord = std::variant<FlipRecord, BlurRecord, HsvRecord, EraseStageRecord,
                                 LetterboxRecord, NormalizeRecord>;

StageKind kind_of(const StageRecord& r);
bool applied(const StageRecord& r);

struct ImageRecord {
  std::string image_id;
  std::vector<StageRecord> stages;
  std::size_t boxes_in = 0;
  std::size_t boxes_out = 0;
  std::string checksum;
};

std::string to_json_line(const ImageRecord& rec);
ImageRecord parse_json_line(std::string_view line);

void write_manifest(std::ostream& out, const std::vector<ImageRecord>& records);
std::vector<ImageRecord> read_manifest(std::istream& in);
std::vector<ImageRecord> read_manifest(const std::filesystem::path& path);

// ---- execution --------------------------------------------------------------

/// Wall time spent in each stage of one image, keyed by StageKind.
using StageTimings = std::array<std::chrono::nanoseconds, 6>;

/// Immutable per-run state shared by all workers.
class PipelineContext {
 public:
  explicit PipelineContext(PipelineConfig cfg);

  const PipelineConfig& config() const noexcept { return cfg_; }
  const SpectralTable& spectral_table() const noexcept { return table_; }

 private:
  PipelineConfig cfg_;
  SpectralTable table_;
};

struct ProcessedSample {
  Sample sample;  // F32 image in [0,1], target x target
  ImageRecord record;
};

/// Options that only matter for previews: `force` applies every enabled
/// stage regardless of its probability.
struct DrawOptions {
  bool force = false;
};

/// Run every stage on one sample, drawing parameters from derived streams.
/// Throws StageFailure naming the stage that failed.
ProcessedSample process_sample(const PipelineContext& ctx, const Sample& input,
                               StageTimings* timings = nullptr);

/// Re-apply the recorded parameters to the original sample.
ProcessedSample replay_sample(const ImageRecord& record, const Sample& input);

/// Apply a single augmentation stage; returns the updated sample and the record.
/// Used by previews to show intermediate results.
std::pair<Sample, StageRecord> run_stage(const PipelineContext& ctx, StageKind kind,
                                         const Sample& current, DrawOptions opts = {});

struct RunOptions {
  std::optional<DatasetLayout> output;                 // write images/labels here
  std::optional<std::filesystem::path> manifest_path;  // JSON Lines
  int threads = -1;                                    // -1: take from config
};

struct RunResult {
  std::vector<ImageRecord> records;  // sorted by image_id
  std::vector<StageFailure> failures;
  std::size_t boxes_in = 0;
  std::size_t boxes_out = 0;

  int exit_code() const noexcept { return failures.empty() ? 0 : 2; }
};

RunResult run_pipeline(const PipelineContext& ctx, const Dataset& dataset, const RunOptions& opts);

struct ReplayReport {
  std::size_t matched = 0;
  std::vector<std::string> mismatched;
  std::vector<std::string> missing;  // manifest ids with no input image

  bool ok() const noexcept { return mismatched.empty() && missing.empty(); }
};

/// Re-run every manifest record against the original dataset and compare checksums.
/// When `output` is set the replayed samples are written there as well.
ReplayReport replay_manifest(const std::vector<ImageRecord>& records, const Dataset& dataset,
                             const std::optional<DatasetLayout>& output = std::nullopt,
                             int threads = 1);

int resolve_threads(int requested);

}  // namespace aquaaug
