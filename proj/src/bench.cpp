#include "aquaaug/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>

namespace aquaaug {

namespace {

using Clock = std::chrono::steady_clock;

double rate(std::size_t images, std::chrono::nanoseconds elapsed) {
  const auto ns = std::max<std::int64_t>(elapsed.count(), 1);
  return static_cast<double>(images) * 1e9 / static_cast<double>(ns);
}

nlohmann::ordered_json series_json(const BenchSeries& s) {
  nlohmann::ordered_json j;
  j["stage"] = s.stage;
  j["samples"] = s.samples;
  j["median_images_per_s"] = s.median;
  return j;
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

BenchReport run_bench(const PipelineContext& ctx, const Dataset& dataset, int reps) {
  if (dataset.size() == 0) throw InvalidArgument("bench needs at least one image");
  if (reps < 1) throw InvalidArgument("bench needs at least one repetition");

  std::vector<Sample> samples;
  for (Sample s : dataset) samples.push_back(std::move(s));

  const auto sequence = ctx.config().stage_sequence();
  BenchReport report;
  report.images = samples.size();
  report.reps = reps;
  for (StageKind k : sequence) report.stages.push_back({to_string(k), {}, 0.0});
  report.end_to_end.stage = "end_to_end";

  for (int r = 0; r < reps; ++r) {
    StageTimings total{};
    std::chrono::nanoseconds wall{0};
    for (const Sample& s : samples) {
      StageTimings t{};
      const auto t0 = Clock::now();
      (void)process_sample(ctx, s, &t);
      wall += Clock::now() - t0;
      for (std::size_t i = 0; i < t.size(); ++i) total[i] += t[i];
    }
    for (std::size_t i = 0; i < sequence.size(); ++i)
      report.stages[i].samples.push_back(
          rate(samples.size(), total[static_cast<std::size_t>(sequence[i])]));
    report.end_to_end.samples.push_back(rate(samples.size(), wall));
  }
  for (auto& s : report.stages) s.median = median(s.samples);
  report.end_to_end.median = median(report.end_to_end.samples);
  return report;
}

std::string BenchReport::to_json() const {
  nlohmann::ordered_json j;
  j["images"] = images;
  j["reps"] = reps;
  j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : stages) j["stages"].push_back(series_json(s));
  j["end_to_end"] = series_json(end_to_end);
  return j.dump(2);
}

std::string BenchReport::to_table() const {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-12s %16s\n", "stage", "median img/s");
  out += line;
  for (const auto& s : stages) {
    std::snprintf(line, sizeof line, "%-12s %16.1f\n", s.stage.c_str(), s.median);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-12s %16.1f\n", end_to_end.stage.c_str(), end_to_end.median);
  out += line;
  return out;
}

}  // namespace aquaaug
