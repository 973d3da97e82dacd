#pragma once

#include <cstddef>
#include <filesystem>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aquaaug/image.hpp"

namespace aquaaug {

/// images/<stem>.{png,jpg,jpeg} paired with labels/<stem>.txt.
struct DatasetLayout {
  std::filesystem::path images_dir;
  std::filesystem::path labels_dir;
  std::vector<std::string> extensions{"png", "jpg", "jpeg"};

  /// `root/images` and `root/labels`.
  static DatasetLayout under(const std::filesystem::path& root);
};

struct Sample {
  ImageBuffer image;
  AnnotationSet annotations;
};

/// Parse `class_id cx cy w h` lines. Blank lines are ignored; `file` only
/// feeds diagnostics. Throws MalformedLine.
std::vector<BBox> parse_labels(std::string_view text, const std::string& file);

/// One `class_id cx cy w h` line per box, 6-decimal fixed point.
std::string format_labels(const AnnotationSet& ann);

/// Paired entries of a dataset directory, sorted by stem. Images are decoded
/// lazily so callers can load entries from several threads.
class Dataset {
 public:
  struct Entry {
    std::string id;
    std::filesystem::path image;
    std::filesystem::path labels;  // empty when the image has no label file
  };

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Sample;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const Dataset* ds, std::size_t i) : ds_(ds), i_(i) {}
    Sample operator*() const { return ds_->load(i_); }
    iterator& operator++() {
      ++i_;
      return *this;
    }
    void operator++(int) { ++i_; }
    bool operator==(const iterator& o) const { return i_ == o.i_; }

   private:
    const Dataset* ds_ = nullptr;
    std::size_t i_ = 0;
  };

  /// Throws OrphanLabel for a label file without an image, InvalidArgument
  /// for two images sharing a stem, IoFailure for missing directories.
  static Dataset open(const DatasetLayout& layout);

  std::size_t size() const noexcept { return entries_.size(); }
  const Entry& entry(std::size_t i) const { return entries_.at(i); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// Decode one entry. Throws UnreadableImage or MalformedLine.
  Sample load(std::size_t i) const;

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, entries_.size()}; }

 private:
  std::vector<Entry> entries_;
};

/// Directory scan plus pairing; iterate the result to decode samples in stem order.
Dataset load_dataset(const DatasetLayout& layout);

/// Write `<id>.png` and `<id>.txt` for every sample, creating both
/// directories. Returns the number of samples written. Throws IoFailure.
std::size_t write_dataset(std::span<const Sample> samples, const DatasetLayout& layout);

/// Write one sample (used by the pipeline to stream outputs).
void write_sample(const Sample& sample, const DatasetLayout& layout);

}  // namespace aquaaug
