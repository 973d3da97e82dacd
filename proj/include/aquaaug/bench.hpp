#pragma once

#include <string>
#include <vector>

#include "aquaaug/pipeline.hpp"

namespace aquaaug {

struct BenchSeries {
  std::string stage;            // stage name, or "end_to_end"
  std::vector<double> samples;  // images per second, one per repetition
  double median = 0.0;
};

struct BenchReport {
  std::size_t images = 0;
  int reps = 0;
  std::vector<BenchSeries> stages;  // pipeline stage order
  BenchSeries end_to_end;

  std::string to_json() const;
  std::string to_table() const;
};

/// Decode every sample once, then run the pipeline `reps` times on one thread.
/// Throws InvalidArgument on an empty dataset or reps < 1.
BenchReport run_bench(const PipelineContext& ctx, const Dataset& dataset, int reps);

double median(std::vector<double> values);

}  // namespace aquaaug
