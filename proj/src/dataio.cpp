#include "aquaaug/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "aquaaug/codec.hpp"
#include "aquaaug/errors.hpp"

namespace fs = std::filesystem;

namespace aquaaug {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_token(std::string_view tok, T& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::string lower(std::string s) {
  std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void append_fixed6(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  out.append(buf, ptr);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

DatasetLayout DatasetLayout::under(const fs::path& root) {
  return {root / "images", root / "labels", {"png", "jpg", "jpeg"}};
}

std::vector<BBox> parse_labels(std::string_view text, const std::string& file) {
  std::vector<BBox> boxes;
  int lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;

    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 5)
      throw MalformedLine(file, lineno, "expected 5 fields, got " + std::to_string(toks.size()));
    BBox b;
    if (!parse_token(toks[0], b.class_id) || b.class_id < 0)
      throw MalformedLine(file, lineno, "class id '" + std::string(toks[0]) + "' is not a non-negative integer");
    double v[4];
    static constexpr const char* names[] = {"cx", "cy", "w", "h"};
    for (int k = 0; k < 4; ++k)
      if (!parse_token(toks[k + 1], v[k]))
        throw MalformedLine(file, lineno, std::string(names[k]) + " '" + std::string(toks[k + 1]) + "' is not a number");
    for (int k = 0; k < 2; ++k)
      if (!(v[k] >= 0.0 && v[k] <= 1.0))
        throw MalformedLine(file, lineno, std::string(names[k]) + " out of [0,1]");
    for (int k = 2; k < 4; ++k)
      if (!(v[k] > 0.0 && v[k] <= 1.0))
        throw MalformedLine(file, lineno, std::string(names[k]) + " out of (0,1]");
    b.cx = snap_unit(v[0]);
    b.cy = snap_unit(v[1]);
    b.w = v[2];
    b.h = v[3];
    b.visibility = 1.0;
    boxes.push_back(b);
  }
  return boxes;
}

std::string format_labels(const AnnotationSet& ann) {
  std::string out;
  for (const BBox& b : ann.boxes) {
    out += std::to_string(b.class_id);
    for (double v : {b.cx, b.cy, b.w, b.h}) {
      out += ' ';
      append_fixed6(out, v);
    }
    out += '\n';
  }
  return out;
}

Dataset Dataset::open(const DatasetLayout& layout) {
  if (!fs::is_directory(layout.images_dir))
    throw IoFailure("image directory " + layout.images_dir.string() + " does not exist");

  std::map<std::string, fs::path> images;
  for (const auto& de : fs::directory_iterator(layout.images_dir)) {
    if (!de.is_regular_file()) continue;
    std::string ext = lower(de.path().extension().string());
    if (!ext.empty()) ext.erase(0, 1);
    if (std::ranges::find(layout.extensions, ext) == layout.extensions.end()) continue;
    const std::string stem = de.path().stem().string();
    if (!images.emplace(stem, de.path()).second)
      throw InvalidArgument("two images share the stem '" + stem + "'");
  }

  std::map<std::string, fs::path> labels;
  if (fs::is_directory(layout.labels_dir)) {
    for (const auto& de : fs::directory_iterator(layout.labels_dir)) {
      if (!de.is_regular_file() || de.path().extension() != ".txt") continue;
      const std::string stem = de.path().stem().string();
      if (!images.contains(stem))
        throw OrphanLabel("label file " + de.path().string() + " has no matching image");
      labels.emplace(stem, de.path());
    }
  }

  Dataset ds;
  for (const auto& [stem, path] : images) {  // std::map iterates in byte order
    auto it = labels.find(stem);
    ds.entries_.push_back({stem, path, it == labels.end() ? fs::path{} : it->second});
  }
  return ds;
}

Sample Dataset::load(std::size_t i) const {
  const Entry& e = entries_.at(i);
  Sample s;
  s.image = read_image(e.image);
  s.annotations.image_id = e.id;
  if (!e.labels.empty()) s.annotations.boxes = parse_labels(read_text(e.labels), e.labels.string());
  return s;
}

Dataset load_dataset(const DatasetLayout& layout) { return Dataset::open(layout); }

void write_sample(const Sample& sample, const DatasetLayout& layout) {
  const std::string& id = sample.annotations.image_id;
  if (id.empty()) throw IoFailure("cannot write a sample without an image id");
  write_png(layout.images_dir / (id + ".png"), sample.image);
  const fs::path label_path = layout.labels_dir / (id + ".txt");
  std::ofstream out(label_path, std::ios::binary | std::ios::trunc);
  out << format_labels(sample.annotations);
  if (!out) throw IoFailure("cannot write " + label_path.string());
}

std::size_t write_dataset(std::span<const Sample> samples, const DatasetLayout& layout) {
  std::error_code ec;
  fs::create_directories(layout.images_dir, ec);
  if (ec) throw IoFailure("cannot create " + layout.images_dir.string() + ": " + ec.message());
  fs::create_directories(layout.labels_dir, ec);
  if (ec) throw IoFailure("cannot create " + layout.labels_dir.string() + ": " + ec.message());
  for (const Sample& s : samples) write_sample(s, layout);
  return samples.size();
}

}  // namespace aquaaug
