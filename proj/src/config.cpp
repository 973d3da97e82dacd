#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "aquaaug/pipeline.hpp"

namespace aquaaug {

using json = nlohmann::ordered_json;

namespace {

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_range(const json& obj, const char* key, Range& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    throw ConfigError(where + "." + key + " must be a [lo, hi] pair of numbers");
  out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

void check_probability(double p, const std::string& where) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(where + ".probability must lie in [0,1]");
}

void check_range(const Range& r, double min, double max, const std::string& what) {
  if (!(r.lo <= r.hi && r.lo >= min && r.hi <= max))
    throw ConfigError(what + " must satisfy " + std::to_string(min) + " <= lo <= hi <= " +
                      std::to_string(max));
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

}  // namespace

const char* to_string(StageKind k) {
  switch (k) {
    case StageKind::Flip: return "flip";
    case StageKind::Blur: return "blur";
    case StageKind::Hsv: return "hsv";
    case StageKind::Erase: return "erase";
    case StageKind::Letterbox: return "letterbox";
    case StageKind::Normalize: return "normalize";
  }
  return "?";
}

StageKind parse_stage_kind(const std::string& s) {
  for (StageKind k : {StageKind::Flip, StageKind::Blur, StageKind::Hsv, StageKind::Erase,
                      StageKind::Letterbox, StageKind::Normalize})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown stage '" + s + "'");
}

const char* to_string(BlurMode m) {
  switch (m) {
    case BlurMode::Psf: return "psf";
    case BlurMode::Gaussian: return "gaussian";
    case BlurMode::Both: return "both";
  }
  return "?";
}

bool PipelineConfig::enabled(StageKind k) const {
  if (k == StageKind::Letterbox || k == StageKind::Normalize) return true;
  if (std::ranges::find(order, k) == order.end()) return false;
  switch (k) {
    case StageKind::Flip: return flip.enabled;
    case StageKind::Blur: return blur.enabled;
    case StageKind::Hsv: return hsv.enabled;
    case StageKind::Erase: return erase.enabled;
    default: return true;
  }
}

std::vector<StageKind> PipelineConfig::stage_sequence() const {
  std::vector<StageKind> seq;
  for (StageKind k : order)
    if (enabled(k)) seq.push_back(k);
  seq.push_back(StageKind::Letterbox);
  seq.push_back(StageKind::Normalize);
  return seq;
}

void PipelineConfig::validate() const {
  std::set<StageKind> seen;
  for (StageKind k : order) {
    if (k == StageKind::Letterbox || k == StageKind::Normalize)
      throw ConfigError("letterbox and normalize always run last and cannot be reordered");
    if (!seen.insert(k).second) throw ConfigError(std::string("stage '") + to_string(k) + "' listed twice");
  }
  if (target_size < 32) throw ConfigError("target_size must be >= 32");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  check_range(depth, 0.0, 1e6, "depth_range_m");

  check_probability(flip.probability, "flip");

  check_probability(blur.probability, "blur");
  check_range(blur.lambda_scatter, 1e-9, 1e6, "blur.lambda_scatter_px");
  check_range(blur.lambda_turb, 1e-9, 1e6, "blur.lambda_turb_px");
  if (blur.psf_radius && (*blur.psf_radius < 1 || *blur.psf_radius > kMaxKernelRadius))
    throw ConfigError("blur.psf_radius must lie in [1, 64]");
  if (!(blur.sigma_ref > 0.0 && blur.z_ref > 0.0))
    throw ConfigError("blur.sigma_ref_px and blur.z_ref_m must be positive");

  check_probability(hsv.probability, "hsv");
  check_range(hsv.beta, 0.0, 1.0, "hsv.beta_range");
  if (!(hsv.hue_jitter >= 0.0)) throw ConfigError("hsv.hue_jitter_deg must be >= 0");
  if (!(hsv.c_d >= 0.0)) throw ConfigError("hsv.c_d must be >= 0");
  if (!(hsv.irradiance_ratio > 0.0 && hsv.irradiance_ratio <= 1.0))
    throw ConfigError("hsv.irradiance_ratio must lie in (0,1]");

  try {
    erase.erase.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("erase: ") + e.what());
  }
}

PipelineConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(doc, {"global_seed", "target_size", "threads", "depth_range_m", "stages"}, "config");

  PipelineConfig cfg;
  read(doc, "global_seed", cfg.global_seed, "config");
  read(doc, "target_size", cfg.target_size, "config");
  read(doc, "threads", cfg.threads, "config");
  read_range(doc, "depth_range_m", cfg.depth, "config");

  if (auto it = doc.find("stages"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("config.stages must be an array");
    cfg.order.clear();
    bool saw_letterbox = false;
    bool saw_normalize = false;
    for (const json& st : *it) {
      if (!st.is_object() || !st.contains("name") || !st["name"].is_string())
        throw ConfigError("every stage needs a string 'name'");
      const std::string name = st["name"].get<std::string>();
      const StageKind kind = parse_stage_kind(name);
      const std::string where = "stage '" + name + "'";
      if (saw_normalize || (saw_letterbox && kind != StageKind::Normalize))
        throw ConfigError("letterbox and normalize must be the last stages, in that order");
      switch (kind) {
        case StageKind::Flip:
          require_keys(st, {"name", "enabled", "probability"}, where);
          read(st, "enabled", cfg.flip.enabled, where);
          read(st, "probability", cfg.flip.probability, where);
          break;
        case StageKind::Blur: {
          require_keys(st, {"name", "enabled", "probability", "mode", "lambda_scatter_px",
                            "lambda_turb_px", "psf_radius", "sigma_ref_px", "z_ref_m", "exponent"},
                       where);
          read(st, "enabled", cfg.blur.enabled, where);
          read(st, "probability", cfg.blur.probability, where);
          std::string mode = to_string(cfg.blur.mode);
          read(st, "mode", mode, where);
          if (mode == "psf")
            cfg.blur.mode = BlurMode::Psf;
          else if (mode == "gaussian")
            cfg.blur.mode = BlurMode::Gaussian;
          else if (mode == "both")
            cfg.blur.mode = BlurMode::Both;
          else
            throw ConfigError(where + ".mode must be psf, gaussian or both");
          read_range(st, "lambda_scatter_px", cfg.blur.lambda_scatter, where);
          read_range(st, "lambda_turb_px", cfg.blur.lambda_turb, where);
          if (auto r = st.find("psf_radius"); r != st.end() && !r->is_null())
            cfg.blur.psf_radius = r->get<int>();
          read(st, "sigma_ref_px", cfg.blur.sigma_ref, where);
          read(st, "z_ref_m", cfg.blur.z_ref, where);
          read(st, "exponent", cfg.blur.exponent, where);
          break;
        }
        case StageKind::Hsv: {
          require_keys(st, {"name", "enabled", "probability", "beta_range", "hue_jitter_deg", "c_d",
                            "irradiance_ratio", "spectral_table"},
                       where);
          read(st, "enabled", cfg.hsv.enabled, where);
          read(st, "probability", cfg.hsv.probability, where);
          read_range(st, "beta_range", cfg.hsv.beta, where);
          read(st, "hue_jitter_deg", cfg.hsv.hue_jitter, where);
          read(st, "c_d", cfg.hsv.c_d, where);
          read(st, "irradiance_ratio", cfg.hsv.irradiance_ratio, where);
          if (auto t = st.find("spectral_table"); t != st.end() && !t->is_null())
            cfg.hsv.spectral_table = t->get<std::string>();
          break;
        }
        case StageKind::Erase: {
          require_keys(st, {"name", "enabled", "probability", "max_occluders", "fractal_dim",
                            "area_min", "area_max", "tau", "fill", "drop_visibility_below"},
                       where);
          auto& e = cfg.erase.erase;
          read(st, "enabled", cfg.erase.enabled, where);
          read(st, "probability", e.probability, where);
          read(st, "max_occluders", e.max_occluders, where);
          read(st, "fractal_dim", e.fractal_dim, where);
          read(st, "area_min", e.area_min, where);
          read(st, "area_max", e.area_max, where);
          read(st, "tau", e.tau, where);
          std::string fill = to_string(e.fill);
          read(st, "fill", fill, where);
          try {
            e.fill = parse_erase_fill(fill);
          } catch (const InvalidArgument& ex) {
            throw ConfigError(where + ": " + ex.what());
          }
          read(st, "drop_visibility_below", e.drop_visibility_below, where);
          break;
        }
        case StageKind::Letterbox:
          require_keys(st, {"name", "target_size"}, where);
          read(st, "target_size", cfg.target_size, where);
          saw_letterbox = true;
          continue;
        case StageKind::Normalize:
          require_keys(st, {"name"}, where);
          saw_normalize = true;
          continue;
      }
      if (std::ranges::find(cfg.order, kind) != cfg.order.end())
        throw ConfigError("stage '" + name + "' listed twice");
      cfg.order.push_back(kind);
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const PipelineConfig& cfg) {
  json doc;
  doc["global_seed"] = cfg.global_seed;
  doc["target_size"] = cfg.target_size;
  doc["threads"] = cfg.threads;
  doc["depth_range_m"] = range_json(cfg.depth);
  json stages = json::array();
  for (StageKind k : cfg.order) {
    json st;
    st["name"] = to_string(k);
    switch (k) {
      case StageKind::Flip:
        st["enabled"] = cfg.flip.enabled;
        st["probability"] = cfg.flip.probability;
        break;
      case StageKind::Blur:
        st["enabled"] = cfg.blur.enabled;
        st["probability"] = cfg.blur.probability;
        st["mode"] = to_string(cfg.blur.mode);
        st["lambda_scatter_px"] = range_json(cfg.blur.lambda_scatter);
        st["lambda_turb_px"] = range_json(cfg.blur.lambda_turb);
        st["psf_radius"] = cfg.blur.psf_radius ? json(*cfg.blur.psf_radius) : json(nullptr);
        st["sigma_ref_px"] = cfg.blur.sigma_ref;
        st["z_ref_m"] = cfg.blur.z_ref;
        st["exponent"] = cfg.blur.exponent;
        break;
      case StageKind::Hsv:
        st["enabled"] = cfg.hsv.enabled;
        st["probability"] = cfg.hsv.probability;
        st["beta_range"] = range_json(cfg.hsv.beta);
        st["hue_jitter_deg"] = cfg.hsv.hue_jitter;
        st["c_d"] = cfg.hsv.c_d;
        st["irradiance_ratio"] = cfg.hsv.irradiance_ratio;
        st["spectral_table"] =
            cfg.hsv.spectral_table ? json(cfg.hsv.spectral_table->string()) : json(nullptr);
        break;
      case StageKind::Erase: {
        const auto& e = cfg.erase.erase;
        st["enabled"] = cfg.erase.enabled;
        st["probability"] = e.probability;
        st["max_occluders"] = e.max_occluders;
        st["fractal_dim"] = e.fractal_dim;
        st["area_min"] = e.area_min;
        st["area_max"] = e.area_max;
        st["tau"] = e.tau;
        st["fill"] = to_string(e.fill);
        st["drop_visibility_below"] = e.drop_visibility_below;
        break;
      }
      default:
        break;
    }
    stages.push_back(st);
  }
  stages.push_back({{"name", "letterbox"}, {"target_size", cfg.target_size}});
  stages.push_back({{"name", "normalize"}});
  doc["stages"] = stages;
  return doc.dump(2);
}

}  // namespace aquaaug
