#include <json.hpp>

#include <fstream>

#include "aquaaug/pipeline.hpp"

namespace aquaaug {

using json = nlohmann::ordered_json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json kernel_json(const std::variant<PsfParams, DepthKernelParams>& k) {
  return std::visit(overloaded{
                        [](const PsfParams& p) {
                          return json{{"type", "psf"},
                                      {"lambda_scatter", p.lambda_scatter},
                                      {"lambda_turb", p.lambda_turb},
                                      {"radius", p.resolved_radius()}};
                        },
                        [](const DepthKernelParams& p) {
                          return json{{"type", "gaussian"}, {"sigma_ref", p.sigma_ref},
                                      {"z_ref", p.z_ref},   {"z", p.z},
                                      {"exponent", p.exponent}, {"sigma", p.sigma()}};
                        }},
                    k);
}

std::variant<PsfParams, DepthKernelParams> kernel_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "psf")
    return PsfParams{j.at("lambda_scatter").get<double>(), j.at("lambda_turb").get<double>(),
                     j.at("radius").get<int>()};
  if (type == "gaussian")
    return DepthKernelParams{j.at("sigma_ref").get<double>(), j.at("z_ref").get<double>(),
                             j.at("z").get<double>(), j.at("exponent").get<double>()};
  throw Error("manifest: unknown kernel type '" + type + "'");
}

json stage_json(const StageRecord& r) {
  json j;
  j["stage"] = to_string(kind_of(r));
  j["applied"] = applied(r);
  std::visit(overloaded{
                 [](const FlipRecord&) {},
                 [&](const BlurRecord& b) {
                   json ks = json::array();
                   for (const auto& k : b.kernels) ks.push_back(kernel_json(k));
                   j["kernels"] = ks;
                 },
                 [&](const HsvRecord& h) {
                   j["delta_h"] = h.delta_h;
                   j["beta"] = h.water.beta_turbidity;
                   j["z"] = h.water.z;
                   j["c_d"] = h.water.c_d;
                   j["irradiance_ratio"] = h.water.irradiance_ratio;
                 },
                 [&](const EraseStageRecord& e) {
                   j["fill"] = to_string(e.fill);
                   j["drop_visibility_below"] = e.drop_visibility_below;
                   j["fill_seed"] = e.erase.fill_seed;
                   json rects = json::array();
                   for (const Rect& rc : e.erase.rects) rects.push_back({rc.x, rc.y, rc.w, rc.h});
                   j["rects"] = rects;
                   j["visibility_deltas"] = e.erase.visibility_deltas;
                 },
                 [&](const LetterboxRecord& l) {
                   j["target"] = l.target;
                   j["dropped"] = l.dropped;
                 },
                 [](const NormalizeRecord&) {}},
             r);
  return j;
}

StageRecord stage_from_json(const json& j) {
  const StageKind kind = parse_stage_kind(j.at("stage").get<std::string>());
  const bool was_applied = j.at("applied").get<bool>();
  switch (kind) {
    case StageKind::Flip:
      return FlipRecord{was_applied};
    case StageKind::Blur: {
      BlurRecord b{was_applied, {}};
      for (const json& k : j.at("kernels")) b.kernels.push_back(kernel_from_json(k));
      return b;
    }
    case StageKind::Hsv: {
      HsvRecord h;
      h.applied = was_applied;
      h.delta_h = j.at("delta_h").get<double>();
      h.water.beta_turbidity = j.at("beta").get<double>();
      h.water.z = j.at("z").get<double>();
      h.water.c_d = j.at("c_d").get<double>();
      h.water.irradiance_ratio = j.at("irradiance_ratio").get<double>();
      return h;
    }
    case StageKind::Erase: {
      EraseStageRecord e;
      e.applied = was_applied;
      e.fill = parse_erase_fill(j.at("fill").get<std::string>());
      e.drop_visibility_below = j.at("drop_visibility_below").get<double>();
      e.erase.fill_seed = j.at("fill_seed").get<std::uint64_t>();
      for (const json& rc : j.at("rects"))
        e.erase.rects.push_back({rc.at(0).get<int>(), rc.at(1).get<int>(), rc.at(2).get<int>(),
                                 rc.at(3).get<int>()});
      e.erase.visibility_deltas = j.at("visibility_deltas").get<std::vector<double>>();
      return e;
    }
    case StageKind::Letterbox:
      return LetterboxRecord{j.at("target").get<int>(), j.at("dropped").get<int>()};
    case StageKind::Normalize:
      return NormalizeRecord{};
  }
  throw Error("manifest: bad stage record");
}

}  // namespace

StageKind kind_of(const StageRecord& r) {
  return std::visit(overloaded{[](const FlipRecord&) { return StageKind::Flip; },
                               [](const BlurRecord&) { return StageKind::Blur; },
                               [](const HsvRecord&) { return StageKind::Hsv; },
                               [](const EraseStageRecord&) { return StageKind::Erase; },
                               [](const LetterboxRecord&) { return StageKind::Letterbox; },
                               [](const NormalizeRecord&) { return StageKind::Normalize; }},
                    r);
}

bool applied(const StageRecord& r) {
  return std::visit(overloaded{[](const FlipRecord& x) { return x.applied; },
                               [](const BlurRecord& x) { return x.applied; },
                               [](const HsvRecord& x) { return x.applied; },
                               [](const EraseStageRecord& x) { return x.applied; },
                               [](const LetterboxRecord&) { return true; },
                               [](const NormalizeRecord&) { return true; }},
                    r);
}

std::string to_json_line(const ImageRecord& rec) {
  json j;
  j["image_id"] = rec.image_id;
  json stages = json::array();
  for (const auto& s : rec.stages) stages.push_back(stage_json(s));
  j["stages"] = stages;
  j["boxes_in"] = rec.boxes_in;
  j["boxes_out"] = rec.boxes_out;
  j["checksum"] = rec.checksum;
  return j.dump();
}

ImageRecord parse_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    ImageRecord rec;
    rec.image_id = j.at("image_id").get<std::string>();
    for (const json& s : j.at("stages")) rec.stages.push_back(stage_from_json(s));
    rec.boxes_in = j.at("boxes_in").get<std::size_t>();
    rec.boxes_out = j.at("boxes_out").get<std::size_t>();
    rec.checksum = j.at("checksum").get<std::string>();
    return rec;
  } catch (const json::exception& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
}

void write_manifest(std::ostream& out, const std::vector<ImageRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<ImageRecord> read_manifest(std::istream& in) {
  std::vector<ImageRecord> records;
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      records.push_back(parse_json_line(line));
  return records;
}

std::vector<ImageRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read manifest " + path.string());
  return read_manifest(in);
}

}  // namespace aquaaug
