#include "aquaaug/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "aquaaug/checksum.hpp"
#include "aquaaug/geometry.hpp"
#include "aquaaug/letterbox.hpp"

namespace aquaaug {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double scene_depth(const PipelineContext& ctx, const std::string& image_id) {
  const auto& cfg = ctx.config();
  Stream s = derive_stream(cfg.global_seed, image_id, "scene");
  return s.uniform(cfg.depth.lo, cfg.depth.hi);
}

Sample clamp_unit(Sample s) {
  for (float& v : s.image.f32()) v = std::clamp(v, 0.0f, 1.0f);
  return s;
}

/// Apply a fully specified stage record. Erase and letterbox records are
/// completed in place (visibility deltas, dropped-box count).
Sample apply_record(StageRecord& record, Sample cur) {
  return std::visit(
      overloaded{
          [&](FlipRecord& r) {
            if (!r.applied) return cur;
            auto [img, ann] = hflip(cur.image, cur.annotations);
            return Sample{std::move(img), std::move(ann)};
          },
          [&](BlurRecord& r) {
            if (!r.applied) return cur;
            for (const auto& k : r.kernels) {
              const PsfKernel kernel = std::visit(
                  overloaded{[](const PsfParams& p) { return build_psf(p); },
                             [](const DepthKernelParams& p) { return build_depth_gaussian(p); }},
                  k);
              cur.image = convolve(cur.image, kernel);
            }
            return cur;
          },
          [&](HsvRecord& r) {
            if (!r.applied) return cur;
            cur.image = apply_hsv_physics(cur.image, r.delta_h, r.water);
            return cur;
          },
          [&](EraseStageRecord& r) {
            if (!r.applied) return cur;
            EraseConfig cfg;
            cfg.fill = r.fill;
            cfg.drop_visibility_below = r.drop_visibility_below;
            auto res = erase_rects(cur.image, cur.annotations, cfg, r.erase.rects, r.erase.fill_seed);
            r.erase.visibility_deltas = std::move(res.record.visibility_deltas);
            return Sample{std::move(res.image), std::move(res.annotations)};
          },
          [&](LetterboxRecord& r) {
            auto res = letterbox_resize(cur.image, cur.annotations, r.target);
            r.dropped = static_cast<int>(res.warnings.size());
            for (const auto& w : res.warnings) spdlog::warn("letterbox: {}", w);
            return Sample{std::move(res.image), std::move(res.annotations)};
          },
          [&](NormalizeRecord&) { return clamp_unit(std::move(cur)); }},
      record);
}

std::pair<Sample, StageRecord> draw_and_apply(const PipelineContext& ctx, StageKind kind,
                                              const Sample& cur, double z, DrawOptions opts) {
  const auto& cfg = ctx.config();
  const std::string& id = cur.annotations.image_id;
  Stream rng = derive_stream(cfg.global_seed, id, to_string(kind));
  const auto gate = [&](double p) { return opts.force || rng.bernoulli(p); };

  StageRecord record;
  switch (kind) {
    case StageKind::Flip:
      record = FlipRecord{gate(cfg.flip.probability)};
      break;
    case StageKind::Blur: {
      const auto& b = cfg.blur;
      BlurRecord r{gate(b.probability), {}};
      if (r.applied) {
        const double ls = rng.uniform(b.lambda_scatter.lo, b.lambda_scatter.hi);
        const double lt = rng.uniform(b.lambda_turb.lo, b.lambda_turb.hi);
        if (b.mode != BlurMode::Gaussian) {
          PsfParams p{ls, lt, b.psf_radius};
          p.kernel_radius = p.resolved_radius();
          r.kernels.emplace_back(p);
        }
        if (b.mode != BlurMode::Psf)
          r.kernels.emplace_back(DepthKernelParams{b.sigma_ref, b.z_ref, z, b.exponent});
      }
      record = std::move(r);
      break;
    }
    case StageKind::Hsv: {
      const auto& h = cfg.hsv;
      HsvRecord r;
      r.applied = gate(h.probability);
      if (r.applied) {
        r.water.beta_turbidity = rng.uniform(h.beta.lo, h.beta.hi);
        const double jitter = h.hue_jitter > 0.0 ? rng.uniform(-h.hue_jitter, h.hue_jitter) : 0.0;
        r.water.z = z;
        r.water.c_d = h.c_d;
        r.water.irradiance_ratio = h.irradiance_ratio;
        r.delta_h = hue_shift_degrees(ctx.spectral_table().at_depth(z)) + jitter;
      }
      record = r;
      break;
    }
    case StageKind::Erase: {
      EraseConfig ec = cfg.erase.erase;
      if (opts.force) ec.probability = 1.0;
      auto res = apply_erase(cur.image, cur.annotations, ec, rng);
      EraseStageRecord r;
      r.applied = !res.record.rects.empty();
      r.fill = ec.fill;
      r.drop_visibility_below = ec.drop_visibility_below;
      r.erase = std::move(res.record);
      return {Sample{std::move(res.image), std::move(res.annotations)}, StageRecord{std::move(r)}};
    }
    case StageKind::Letterbox:
      record = LetterboxRecord{cfg.target_size, 0};
      break;
    case StageKind::Normalize:
      record = NormalizeRecord{};
      break;
  }
  Sample next = apply_record(record, cur);
  return {std::move(next), std::move(record)};
}

Sample ingest(const Sample& input) {
  if (input.image.channels() != 3) throw InvalidArgument("pipeline expects 3-channel images");
  return Sample{as_f32(input.image), input.annotations};
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

PipelineContext::PipelineContext(PipelineConfig cfg)
    : cfg_(std::move(cfg)),
      table_(cfg_.hsv.spectral_table ? SpectralTable::load(*cfg_.hsv.spectral_table)
                                     : SpectralTable::default_table()) {
  cfg_.validate();
}

std::pair<Sample, StageRecord> run_stage(const PipelineContext& ctx, StageKind kind,
                                         const Sample& current, DrawOptions opts) {
  Sample cur = current.image.depth() == Depth::F32 ? current : ingest(current);
  return draw_and_apply(ctx, kind, cur, scene_depth(ctx, current.annotations.image_id), opts);
}

ProcessedSample process_sample(const PipelineContext& ctx, const Sample& input,
                               StageTimings* timings) {
  const std::string& id = input.annotations.image_id;
  ProcessedSample out;
  out.record.image_id = id;
  out.record.boxes_in = input.annotations.boxes.size();
  if (timings) timings->fill(std::chrono::nanoseconds{0});

  Sample cur;
  try {
    cur = ingest(input);
  } catch (const std::exception& e) {
    throw StageFailure(id, "normalize", e.what());
  }
  const double z = scene_depth(ctx, id);

  for (StageKind kind : ctx.config().stage_sequence()) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto [next, record] = draw_and_apply(ctx, kind, cur, z, {});
      cur = std::move(next);
      out.record.stages.push_back(std::move(record));
    } catch (const StageFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw StageFailure(id, to_string(kind), e.what());
    }
    if (timings) (*timings)[static_cast<std::size_t>(kind)] += std::chrono::steady_clock::now() - t0;
  }

  out.record.boxes_out = cur.annotations.boxes.size();
  out.record.checksum = sample_checksum(cur.image, cur.annotations);
  out.sample = std::move(cur);
  return out;
}

ProcessedSample replay_sample(const ImageRecord& record, const Sample& input) {
  ProcessedSample out;
  out.record = record;
  Sample cur = ingest(input);
  for (StageRecord& st : out.record.stages) {
    try {
      cur = apply_record(st, std::move(cur));
    } catch (const std::exception& e) {
      throw StageFailure(record.image_id, to_string(kind_of(st)), e.what());
    }
  }
  out.record.boxes_in = input.annotations.boxes.size();
  out.record.boxes_out = cur.annotations.boxes.size();
  out.record.checksum = sample_checksum(cur.image, cur.annotations);
  out.sample = std::move(cur);
  return out;
}

namespace {

void prepare_output(const DatasetLayout& layout) {
  std::filesystem::create_directories(layout.images_dir);
  std::filesystem::create_directories(layout.labels_dir);
}

/// Run `job(i)` for i in [0, n) on `threads` workers.
template <typename Job>
void parallel_for(std::size_t n, int threads, Job job) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
}

}  // namespace

RunResult run_pipeline(const PipelineContext& ctx, const Dataset& dataset, const RunOptions& opts) {
  const int threads = resolve_threads(opts.threads >= 0 ? opts.threads : ctx.config().threads);
  if (opts.output) prepare_output(*opts.output);

  const std::size_t n = dataset.size();
  std::vector<std::optional<ImageRecord>> records(n);
  std::vector<std::optional<StageFailure>> failures(n);

  parallel_for(n, threads, [&](std::size_t i) {
    const std::string& id = dataset.entry(i).id;
    try {
      Sample input;
      try {
        input = dataset.load(i);
      } catch (const std::exception& e) {
        throw StageFailure(id, "load", e.what());
      }
      ProcessedSample done = process_sample(ctx, input);
      if (opts.output) {
        try {
          write_sample(done.sample, *opts.output);
        } catch (const std::exception& e) {
          throw StageFailure(id, "write", e.what());
        }
      }
      records[i] = std::move(done.record);
    } catch (const StageFailure& f) {
      spdlog::error("skipping {}", f.what());
      failures[i] = f;
    }
  });

  RunResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (records[i]) {
      result.boxes_in += records[i]->boxes_in;
      result.boxes_out += records[i]->boxes_out;
      result.records.push_back(std::move(*records[i]));
    }
    if (failures[i]) result.failures.push_back(std::move(*failures[i]));
  }
  std::ranges::sort(result.records, {}, &ImageRecord::image_id);

  if (opts.manifest_path) {
    std::ofstream out(*opts.manifest_path, std::ios::binary | std::ios::trunc);
    write_manifest(out, result.records);
    if (!out) throw IoFailure("cannot write manifest " + opts.manifest_path->string());
  }
  return result;
}

ReplayReport replay_manifest(const std::vector<ImageRecord>& records, const Dataset& dataset,
                             const std::optional<DatasetLayout>& output, int threads) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < dataset.size(); ++i) index.emplace(dataset.entry(i).id, i);
  if (output) prepare_output(*output);

  enum class Outcome { Match, Mismatch, Missing };
  std::vector<Outcome> outcome(records.size(), Outcome::Missing);
  parallel_for(records.size(), resolve_threads(threads), [&](std::size_t r) {
    const ImageRecord& rec = records[r];
    auto it = index.find(rec.image_id);
    if (it == index.end()) return;
    try {
      ProcessedSample done = replay_sample(rec, dataset.load(it->second));
      if (output) write_sample(done.sample, *output);
      outcome[r] = done.record.checksum == rec.checksum ? Outcome::Match : Outcome::Mismatch;
    } catch (const std::exception& e) {
      spdlog::error("replay of {} failed: {}", rec.image_id, e.what());
      outcome[r] = Outcome::Mismatch;
    }
  });

  ReplayReport report;
  for (std::size_t r = 0; r < records.size(); ++r) {
    switch (outcome[r]) {
      case Outcome::Match: ++report.matched; break;
      case Outcome::Mismatch: report.mismatched.push_back(records[r].image_id); break;
      case Outcome::Missing: report.missing.push_back(records[r].image_id); break;
    }
  }
  return report;
}

}  // namespace aquaaug
