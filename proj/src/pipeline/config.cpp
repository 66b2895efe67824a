#include "spmap/pipeline/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

namespace spmap {

namespace {

double parseDouble(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument(value);
    }
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + value +
                      "'");
  }
}

int64_t parseInt(const std::string& key, const std::string& value) {
  int64_t parsed = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config: bad integer value for " + key + ": '" + value +
                      "'");
  }
  return parsed;
}

bool parseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: bad boolean value for " + key + ": '" + value +
                    "'");
}

std::string trim(const std::string& s) {
  const size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// theta_<name>_<classid> keys populate the per-class override maps.
bool applyPerClassKey(const std::string& key, const std::string& value,
                      const std::string& prefix,
                      std::map<ClassId, double>* overrides) {
  if (key.rfind(prefix, 0) != 0 || key.size() <= prefix.size()) {
    return false;
  }
  const std::string suffix = key.substr(prefix.size());
  const int64_t class_id = parseInt(key, suffix);
  if (class_id < 0 || class_id > UINT16_MAX) {
    throw ConfigError("config: class id out of range in " + key);
  }
  (*overrides)[static_cast<ClassId>(class_id)] = parseDouble(key, value);
  return true;
}

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw ConfigError("config: " + what);
    }
  };
  require(voxel_size > 0.0, "voxel_size must be > 0");
  require(truncation >= 2.0 * voxel_size, "truncation must be >= 2*voxel_size");
  require(observation_weight > 0.0, "observation_weight must be > 0");
  require(max_concavity_deg > 0.0 && max_concavity_deg < 180.0,
          "max_concavity_deg must be in (0, 180)");
  require(max_step_m > 0.0, "max_step_m must be > 0");
  require(min_segment_px >= 1, "min_segment_px must be >= 1");
  require(min_surface_px >= 1, "min_surface_px must be >= 1");
  require(min_overlap_ratio >= 0.0 && min_overlap_ratio <= 1.0,
          "min_overlap_ratio must be in [0, 1]");
  require(min_overlap_voxels >= 1, "min_overlap_voxels must be >= 1");
  require(merge_threshold >= 0, "merge_threshold must be >= 0");
  require(sigma_spatial > 0.0, "sigma_spatial must be > 0");
  require(max_edge_superpoints >= 2, "max_edge_superpoints must be >= 2");
  require(smoothing_weight > 0.0, "smoothing_weight must be > 0");
  require(smoothing_bandwidth > 0.0, "smoothing_bandwidth must be > 0");
  require(epsilon_prob > 0.0 && epsilon_prob < 1.0,
          "epsilon_prob must be in (0, 1)");
  require(theta_detach >= 0.0 && theta_instance >= 0.0 && theta_node >= 0.0,
          "refinement thresholds must be >= 0");
  require(queue_capacity >= 1, "queue_capacity must be >= 1");
  require(stage1_threads >= 1, "stage1_threads must be >= 1");
}

void PipelineConfig::applyText(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    const std::string trimmed = trim(line);
    if (trimmed.empty()) {
      continue;
    }
    const size_t equals = trimmed.find('=');
    if (equals == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(trimmed.substr(0, equals));
    const std::string value = trim(trimmed.substr(equals + 1));

    if (key == "voxel_size") {
      voxel_size = parseDouble(key, value);
    } else if (key == "truncation") {
      truncation = parseDouble(key, value);
    } else if (key == "observation_weight") {
      observation_weight = parseDouble(key, value);
    } else if (key == "max_concavity_deg") {
      max_concavity_deg = parseDouble(key, value);
    } else if (key == "max_step_m") {
      max_step_m = parseDouble(key, value);
    } else if (key == "min_segment_px") {
      min_segment_px = static_cast<int>(parseInt(key, value));
    } else if (key == "min_surface_px") {
      min_surface_px = static_cast<int>(parseInt(key, value));
    } else if (key == "min_overlap_ratio") {
      min_overlap_ratio = parseDouble(key, value);
    } else if (key == "min_overlap_voxels") {
      min_overlap_voxels = static_cast<int>(parseInt(key, value));
    } else if (key == "merge_threshold") {
      merge_threshold = static_cast<int>(parseInt(key, value));
    } else if (key == "sigma_spatial") {
      sigma_spatial = parseDouble(key, value);
    } else if (key == "max_edge_superpoints") {
      max_edge_superpoints = static_cast<int>(parseInt(key, value));
    } else if (key == "smoothing_weight") {
      smoothing_weight = parseDouble(key, value);
    } else if (key == "smoothing_bandwidth") {
      smoothing_bandwidth = parseDouble(key, value);
    } else if (key == "epsilon_prob") {
      epsilon_prob = parseDouble(key, value);
    } else if (key == "normalize_pairwise") {
      normalize_pairwise = parseBool(key, value);
    } else if (key == "theta_detach") {
      theta_detach = parseDouble(key, value);
    } else if (key == "theta_instance") {
      theta_instance = parseDouble(key, value);
    } else if (key == "theta_node") {
      theta_node = parseDouble(key, value);
    } else if (key == "semantic_consistency") {
      semantic_consistency = parseBool(key, value);
    } else if (key == "regularization") {
      regularization = parseBool(key, value);
    } else if (key == "refinement") {
      refinement = parseBool(key, value);
    } else if (key == "queue_capacity") {
      queue_capacity = static_cast<int>(parseInt(key, value));
    } else if (key == "stage1_threads") {
      stage1_threads = static_cast<int>(parseInt(key, value));
    } else if (key == "seed") {
      seed = static_cast<uint64_t>(parseInt(key, value));
    } else if (applyPerClassKey(key, value, "theta_detach_",
                                &theta_detach_by_class) ||
               applyPerClassKey(key, value, "theta_instance_",
                                &theta_instance_by_class) ||
               applyPerClassKey(key, value, "theta_node_",
                                &theta_node_by_class)) {
      // handled
    } else {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }
  validate();
}

void PipelineConfig::applyFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  applyText(buffer.str());
}

std::string PipelineConfig::toText() const {
  std::ostringstream out;
  out << "voxel_size = " << voxel_size << "\n"
      << "truncation = " << truncation << "\n"
      << "observation_weight = " << observation_weight << "\n"
      << "max_concavity_deg = " << max_concavity_deg << "\n"
      << "max_step_m = " << max_step_m << "\n"
      << "min_segment_px = " << min_segment_px << "\n"
      << "min_surface_px = " << min_surface_px << "\n"
      << "min_overlap_ratio = " << min_overlap_ratio << "\n"
      << "min_overlap_voxels = " << min_overlap_voxels << "\n"
      << "merge_threshold = " << merge_threshold << "\n"
      << "sigma_spatial = " << sigma_spatial << "\n"
      << "max_edge_superpoints = " << max_edge_superpoints << "\n"
      << "smoothing_weight = " << smoothing_weight << "\n"
      << "smoothing_bandwidth = " << smoothing_bandwidth << "\n"
      << "epsilon_prob = " << epsilon_prob << "\n"
      << "normalize_pairwise = " << (normalize_pairwise ? "true" : "false")
      << "\n"
      << "theta_detach = " << theta_detach << "\n"
      << "theta_instance = " << theta_instance << "\n"
      << "theta_node = " << theta_node << "\n"
      << "semantic_consistency = " << (semantic_consistency ? "true" : "false")
      << "\n"
      << "regularization = " << (regularization ? "true" : "false") << "\n"
      << "refinement = " << (refinement ? "true" : "false") << "\n"
      << "queue_capacity = " << queue_capacity << "\n"
      << "stage1_threads = " << stage1_threads << "\n"
      << "seed = " << seed << "\n";
  for (const auto& [class_id, value] : theta_detach_by_class) {
    out << "theta_detach_" << class_id << " = " << value << "\n";
  }
  for (const auto& [class_id, value] : theta_instance_by_class) {
    out << "theta_instance_" << class_id << " = " << value << "\n";
  }
  for (const auto& [class_id, value] : theta_node_by_class) {
    out << "theta_node_" << class_id << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace spmap
